use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use faregrid::fare::FallbackModel;
use faregrid::geo::LatLon;
use faregrid::grid::{write_snapshot, GridSpec, OdIndex};
use faregrid::ingest::{ingest_files, write_reject_log, ColumnMapping};
use faregrid::predict::{
    build_features, evaluate, read_checkins, read_feature_table, read_venues, write_feature_table, EvalConfig,
    GainMode, TravelCategories,
};
use faregrid::savings::{
    delta_distribution, evaluate_strategy, hourly_winner_stripes, query_frequency_stats, read_query_log,
    stripes_string, QueryHistogram, Strategy,
};
use faregrid::service::{serve, ServiceConfig, ServiceState};
use faregrid::surge::{
    area_surge_stats, controlled_experiment, read_replay, read_routes, series_from_replay, surge_fraction,
    surge_heatmap, ExperimentMode, SurgeMatrix,
};
use faregrid::{Error, Result};

#[derive(Parser)]
#[command(
    name = "faregrid",
    version,
    about = "Taxi fare index, provider comparison and surge analytics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    App,
    Analysis,
}

impl Grid {
    fn spec(self) -> GridSpec {
        match self {
            Grid::App => GridSpec::app(),
            Grid::Analysis => GridSpec::analysis(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Gain {
    Excess,
    Raw,
}

#[derive(Subcommand)]
enum Cmd {
    /// Join trip and fare files and write an OD index snapshot.
    Ingest {
        #[arg(long)]
        trips: PathBuf,
        #[arg(long)]
        fares: PathBuf,
        /// Column mapping TOML; defaults to the 2013 TLC layout.
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "app")]
        grid: Grid,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rejects: Option<PathBuf>,
    },
    /// Compare yellow and Uber prices for one journey.
    Compare {
        /// Service config naming the index and provider.
        #[arg(long)]
        config: PathBuf,
        /// `lat,lon` or a gazetteer name.
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        time: Option<DateTime<Utc>>,
    },
    /// Weekly surge fraction weighted by when users query.
    St {
        #[arg(long)]
        replay: PathBuf,
        /// Query log supplying the hour-of-week weights; uniform when absent.
        #[arg(long)]
        queries: Option<PathBuf>,
    },
    /// Per-area average multipliers as CSV.
    Heatmap {
        #[arg(long)]
        replay: PathBuf,
        #[arg(long)]
        routes: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        bin_width: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlation of surge across routes sharing an endpoint.
    Experiment {
        #[arg(long)]
        replay: PathBuf,
        #[arg(long)]
        mode: ExperimentMode,
    },
    /// Savings and usage statistics from a query log.
    Savings {
        #[arg(long)]
        queries: PathBuf,
    },
    /// Build the per-area feature table.
    Features {
        #[arg(long)]
        od: PathBuf,
        #[arg(long)]
        venues: PathBuf,
        #[arg(long)]
        checkins: PathBuf,
        #[arg(long)]
        replay: PathBuf,
        #[arg(long)]
        routes: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-out tree evaluation over a feature table.
    Predict {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
        #[arg(long, value_enum, default_value = "excess")]
        gain: Gain,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        listen: Option<String>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

fn place(s: &str, state: &ServiceState) -> Result<LatLon> {
    if let Some((a, b)) = s.split_once(',') {
        if let (Ok(lat), Ok(lon)) = (a.trim().parse(), b.trim().parse()) {
            return Ok(LatLon::new(lat, lon));
        }
    }
    state
        .gazetteer()
        .lookup(s)
        .ok_or_else(|| Error::InvalidArgument(format!("`{s}` is neither lat,lon nor a gazetteer name")))
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Ingest {
            trips,
            fares,
            mapping,
            grid,
            out,
            rejects,
        } => {
            let mapping = match mapping {
                Some(p) => ColumnMapping::from_file(p)?,
                None => ColumnMapping::tlc_2013(),
            };
            let result = ingest_files(trips, fares, &mapping)?;
            let index = OdIndex::par_build(&result.records, grid.spec());
            write_snapshot(&index, create(&out)?)?;
            if let Some(p) = rejects {
                write_reject_log(&result.rejects, create(&p)?)?;
            }
            print_json(&serde_json::json!({
                "trips": result.trips,
                "fares": result.fares,
                "od_buckets": index.len(),
                "skipped_out_of_grid": index.skipped_out_of_grid(),
                // paste into the service config's [fallback] table
                "fallback": FallbackModel::fit(&result.records).ok(),
            }))
        }
        Cmd::Compare { config, from, to, time } => {
            let state = ServiceState::from_config(&ServiceConfig::from_file(config)?)?;
            let (o, d) = (place(&from, &state)?, place(&to, &state)?);
            print_json(&state.engine().compare(o, d, time.unwrap_or_else(Utc::now))?)
        }
        Cmd::St { replay, queries } => {
            let series = series_from_replay(&read_replay(replay)?)?;
            let matrix = SurgeMatrix::weekly(series.values())?;
            let p = match queries {
                Some(q) => query_frequency_stats(&read_query_log(q)?).hour_of_week,
                None => QueryHistogram::uniform(),
            };
            print_json(&serde_json::json!({
                "routes": matrix.n_routes(),
                "st": surge_fraction(&matrix, p.as_slice())?,
                "plain_fraction": matrix.plain_fraction(),
                // the weights are one city-wide histogram applied to every route
                "assumes_uniform_spatial_demand": true,
            }))
        }
        Cmd::Heatmap {
            replay,
            routes,
            bin_width,
            out,
        } => {
            let spec = GridSpec::analysis();
            let stats = area_surge_stats(
                &series_from_replay(&read_replay(replay)?)?,
                &read_routes(routes)?,
                &spec,
            )?;
            let map = surge_heatmap(&stats, &spec, bin_width)?;
            map.write_csv(output(out.as_deref())?)?;
            eprintln!("{} areas, {:.3} surging", map.areas, map.surging_fraction);
            Ok(())
        }
        Cmd::Experiment { replay, mode } => {
            let series: Vec<_> = series_from_replay(&read_replay(replay)?)?.into_values().collect();
            print_json(&controlled_experiment(&series, mode)?)
        }
        Cmd::Savings { queries } => {
            let log = read_query_log(queries)?;
            let deltas = delta_distribution(&log, faregrid::money::Cents(100))?;
            let strategies = Strategy::ALL
                .into_iter()
                .map(|s| evaluate_strategy(&log, s, None).map(|e| (s.to_string(), e.mean_cost)))
                .collect::<Result<Vec<_>>>()?;
            let freq = query_frequency_stats(&log);
            print_json(&serde_json::json!({
                "entries": log.len(),
                "mean_saving": deltas.mean_saving(),
                "mean_cost": strategies.into_iter().collect::<std::collections::BTreeMap<_, _>>(),
                "users": freq.users,
                "mean_queries_per_user": freq.mean_queries_per_user,
                "stripes": stripes_string(&hourly_winner_stripes(&log)),
            }))
        }
        Cmd::Features {
            od,
            venues,
            checkins,
            replay,
            routes,
            out,
        } => {
            let od = faregrid::grid::read_snapshot(File::open(&od).map_err(|e| Error::io(&od, e))?)?;
            let surge = area_surge_stats(
                &series_from_replay(&read_replay(replay)?)?,
                &read_routes(routes)?,
                od.spec(),
            )?;
            let rows = build_features(
                &od,
                &read_venues(venues)?,
                &read_checkins(checkins)?,
                &surge,
                &TravelCategories::default(),
            )?;
            write_feature_table(&rows, output(out.as_deref())?)
        }
        Cmd::Predict {
            features,
            k,
            max_depth,
            gain,
        } => {
            let rows = read_feature_table(File::open(&features).map_err(|e| Error::io(&features, e))?)?;
            let mut cfg = EvalConfig {
                k,
                gain: match gain {
                    Gain::Excess => GainMode::Excess,
                    Gain::Raw => GainMode::Raw,
                },
                ..Default::default()
            };
            cfg.tree.max_depth = max_depth;
            evaluate(&rows, &cfg)?.write_tables(io::stdout().lock())
        }
        Cmd::Serve { config, listen } => {
            let cfg = ServiceConfig::from_file(config)?;
            let listen = listen.unwrap_or_else(|| cfg.listen.clone());
            let state = Arc::new(ServiceState::from_config(&cfg)?);
            tokio::runtime::Runtime::new()
                .map_err(|e| Error::io("<runtime>", e))?
                .block_on(serve(state, &listen))
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt().with_writer(io::stderr).init();
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
