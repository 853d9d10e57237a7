//! HTTP/JSON front end for the fare engine and the analytics.
//!
//! Read endpoints share immutable state. The engine sits behind an atomic
//! swap so an index reload is visible to every later request, and the query
//! log has exactly one writer at a time.

mod gazetteer;
mod http;
mod log;

use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use chrono_tz::Tz;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fare::{EngineConfig, FallbackModel, FareEngine, PriceProvider};
use crate::grid::{read_snapshot, GridSpec};
use crate::surge::{
    area_surge_stats, read_replay, read_routes, series_from_replay, AreaSurgeStats, DemandModel, ReplayProvider,
    SyntheticProvider, DEFAULT_MAX_STALENESS_S,
};
use crate::time::DEFAULT_TZ;

pub use gazetteer::Gazetteer;
pub use http::{
    router, serve, AreaCell, ErrorBody, EstimateRequest, HeatmapResponse, Place, QueryStatsResponse,
    StrategiesResponse, StrategySummary, LOG_WARNING,
};
pub use log::QueryLog;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProviderConfig {
    Synthetic {
        #[serde(default)]
        model: DemandModel,
    },
    Replay {
        replay: PathBuf,
        routes: PathBuf,
        #[serde(default = "default_staleness")]
        max_staleness_s: i64,
    },
}

fn default_staleness() -> i64 {
    DEFAULT_MAX_STALENESS_S
}

/// Replayed quotes whose per-area averages feed the heatmap endpoint.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeSource {
    pub replay: PathBuf,
    pub routes: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: String,
    /// OD index snapshot.
    pub index: PathBuf,
    pub gazetteer: Option<PathBuf>,
    /// Query log file; kept in memory when absent.
    pub query_log: Option<PathBuf>,
    #[serde(default = "default_tz")]
    pub timezone: String,
    #[serde(default)]
    pub engine: EngineConfig,
    pub fallback: Option<FallbackModel>,
    pub provider: ProviderConfig,
    pub surge: Option<SurgeSource>,
}

fn default_listen() -> String {
    "127.0.0.1:8080".into()
}

fn default_tz() -> String {
    DEFAULT_TZ.name().into()
}

impl ServiceConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Relative paths are taken from the config file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.index);
        self.gazetteer.as_mut().map(fix);
        self.query_log.as_mut().map(fix);
        if let ProviderConfig::Replay { replay, routes, .. } = &mut self.provider {
            fix(replay);
            fix(routes);
        }
        if let Some(s) = &mut self.surge {
            fix(&mut s.replay);
            fix(&mut s.routes);
        }
    }

    pub fn tz(&self) -> Result<Tz> {
        self.timezone
            .parse()
            .map_err(|_| Error::Config(format!("unknown timezone `{}`", self.timezone)))
    }
}

impl ProviderConfig {
    pub fn build(&self) -> Result<Arc<dyn PriceProvider>> {
        Ok(match self {
            ProviderConfig::Synthetic { model } => Arc::new(SyntheticProvider::new(model.clone())?),
            ProviderConfig::Replay {
                replay,
                routes,
                max_staleness_s,
            } => Arc::new(
                ReplayProvider::new(read_replay(replay)?, &read_routes(routes)?, GridSpec::analysis())
                    .with_max_staleness(*max_staleness_s),
            ),
        })
    }
}

/// Per-area surge averages on the grid they were computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaMap {
    pub spec: GridSpec,
    pub stats: Vec<AreaSurgeStats>,
}

pub struct ServiceState {
    engine: RwLock<Arc<FareEngine>>,
    gazetteer: Gazetteer,
    log: QueryLog,
    areas: Option<AreaMap>,
    tz: Tz,
}

impl ServiceState {
    pub fn new(engine: FareEngine, log: QueryLog) -> Self {
        ServiceState {
            engine: RwLock::new(Arc::new(engine)),
            gazetteer: Gazetteer::default(),
            log,
            areas: None,
            tz: DEFAULT_TZ,
        }
    }

    pub fn with_gazetteer(mut self, g: Gazetteer) -> Self {
        self.gazetteer = g;
        self
    }

    pub fn with_areas(mut self, areas: AreaMap) -> Self {
        self.areas = Some(areas);
        self
    }

    pub fn with_timezone(mut self, tz: Tz) -> Self {
        self.tz = tz;
        self
    }

    pub fn from_config(cfg: &ServiceConfig) -> Result<Self> {
        let index = read_snapshot(File::open(&cfg.index).map_err(|e| Error::io(&cfg.index, e))?)?;
        let engine = FareEngine::new(index, cfg.engine, cfg.fallback, cfg.provider.build()?)?;
        let log = match &cfg.query_log {
            Some(p) => QueryLog::open(p)?,
            None => QueryLog::in_memory(),
        };
        let mut state = ServiceState::new(engine, log).with_timezone(cfg.tz()?);
        if let Some(p) = &cfg.gazetteer {
            state = state.with_gazetteer(Gazetteer::from_file(p)?);
        }
        if let Some(s) = &cfg.surge {
            let spec = GridSpec::analysis();
            let series = series_from_replay(&read_replay(&s.replay)?)?;
            let stats = area_surge_stats(&series, &read_routes(&s.routes)?, &spec)?;
            state = state.with_areas(AreaMap { spec, stats });
        }
        Ok(state)
    }

    /// Current engine; callers keep using it even if a reload happens meanwhile.
    pub fn engine(&self) -> Arc<FareEngine> {
        self.engine.read().unwrap_or_else(|p| p.into_inner()).clone()
    }

    /// Installs a new engine and returns the previous one.
    pub fn swap_engine(&self, engine: FareEngine) -> Arc<FareEngine> {
        let mut slot = self.engine.write().unwrap_or_else(|p| p.into_inner());
        std::mem::replace(&mut *slot, Arc::new(engine))
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    pub fn log(&self) -> &QueryLog {
        &self.log
    }

    pub fn areas(&self) -> Option<&AreaMap> {
        self.areas.as_ref()
    }

    pub fn tz(&self) -> Tz {
        self.tz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_and_rebases() {
        let mut cfg = ServiceConfig::from_toml_str(
            r#"
index = "od.csv"
query_log = "/var/log/q.jsonl"
[provider]
mode = "replay"
replay = "quotes.replay"
routes = "routes.csv"
"#,
        )
        .unwrap();
        cfg.rebase(Path::new("/etc/faregrid"));
        assert_eq!(cfg.index, PathBuf::from("/etc/faregrid/od.csv"));
        assert_eq!(cfg.query_log, Some(PathBuf::from("/var/log/q.jsonl")));
        assert_eq!(cfg.listen, "127.0.0.1:8080");
        assert_eq!(cfg.tz().unwrap(), DEFAULT_TZ);
        match cfg.provider {
            ProviderConfig::Replay { max_staleness_s, .. } => assert_eq!(max_staleness_s, DEFAULT_MAX_STALENESS_S),
            _ => panic!("wrong provider"),
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(ServiceConfig::from_toml_str("index = \"a\"\nbogus = 1\n[provider]\nmode = \"synthetic\"\n").is_err());
        let cfg =
            ServiceConfig::from_toml_str("index = \"a\"\ntimezone = \"Mars/Base\"\n[provider]\nmode = \"synthetic\"\n")
                .unwrap();
        assert!(cfg.tz().is_err());
    }
}
