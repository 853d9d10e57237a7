use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::ServiceState;
use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::money::Cents;
use crate::savings::{
    delta_distribution, evaluate_strategy, hourly_winner_stripes_in, query_frequency_stats_in, stripes_string,
    DeltaDistribution, QueryFrequency, QueryLogEntry, Strategy,
};
use crate::surge::is_surging;

/// Sent with an estimate that was answered but could not be logged.
pub const LOG_WARNING: &str = "199 faregrid \"query log write failed\"";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Place {
    Coords { lat: f64, lon: f64 },
    Named { name: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateRequest {
    pub origin: Place,
    pub destination: Place,
    /// Defaults to the time the request arrives.
    pub time: Option<DateTime<Utc>>,
    pub user_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::OutOfGrid { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "out_of_grid"),
            Error::QuoteUnavailable(_) => (StatusCode::SERVICE_UNAVAILABLE, "provider_unavailable"),
            Error::InvalidArgument(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code.into(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

fn resolve(state: &ServiceState, place: &Place, role: &str) -> std::result::Result<LatLon, ApiError> {
    match place {
        Place::Coords { lat, lon } => {
            let p = LatLon::new(*lat, *lon);
            if p.is_finite() {
                Ok(p)
            } else {
                Err(ApiError::bad_request(format!("{role} coordinates are not finite")))
            }
        }
        Place::Named { name } => state.gazetteer().lookup(name).ok_or_else(|| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "unknown_place",
                format!("{role} `{name}` is not in the gazetteer"),
            )
        }),
    }
}

async fn estimate(
    State(state): State<Arc<ServiceState>>,
    body: std::result::Result<Json<EstimateRequest>, JsonRejection>,
) -> std::result::Result<Response, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let origin = resolve(&state, &req.origin, "origin")?;
    let destination = resolve(&state, &req.destination, "destination")?;
    let time = req.time.unwrap_or_else(Utc::now);
    let result = state.engine().compare(origin, destination, time)?;

    let entry = QueryLogEntry {
        user_id: req.user_id.unwrap_or_else(|| "anonymous".into()),
        timestamp: time,
        origin,
        destination,
        yellow_price: result.yellow.mean_cents(),
        uber_price: result.uber.mean_cents(),
        winner: result.winner,
    };
    let writer = state.clone();
    let logged = tokio::task::spawn_blocking(move || writer.log().append(entry))
        .await
        .unwrap_or_else(|e| Err(Error::InvalidArgument(format!("log writer panicked: {e}"))));
    Ok(match logged {
        Ok(()) => Json(result).into_response(),
        Err(e) => {
            tracing::error!("query log append failed: {e}");
            (
                StatusCode::INTERNAL_SERVER_ERROR,
                [(header::WARNING, LOG_WARNING)],
                Json(result),
            )
                .into_response()
        }
    })
}

#[derive(Debug, Deserialize)]
struct HeatmapQuery {
    top: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaCell {
    pub row: u32,
    pub col: u32,
    pub avg_multiplier: f64,
    pub route_count: usize,
    pub south: f64,
    pub west: f64,
    pub north: f64,
    pub east: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapResponse {
    /// All areas with surge data, regardless of `top`.
    pub areas: usize,
    pub surging_fraction: f64,
    pub cells: Vec<AreaCell>,
}

async fn heatmap(
    State(state): State<Arc<ServiceState>>,
    q: std::result::Result<Query<HeatmapQuery>, QueryRejection>,
) -> std::result::Result<Json<HeatmapResponse>, ApiError> {
    let Query(q) = q.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let areas = state
        .areas()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", "no surge statistics loaded"))?;
    let mut stats: Vec<_> = areas.stats.iter().collect();
    if let Some(k) = q.top {
        stats.sort_by(|a, b| b.avg_multiplier.total_cmp(&a.avg_multiplier).then(a.cell.cmp(&b.cell)));
        stats.truncate(k);
    } else {
        stats.sort_by_key(|s| s.cell);
    }
    let n = areas.stats.len();
    let surging = areas.stats.iter().filter(|s| is_surging(s.avg_multiplier)).count();
    Ok(Json(HeatmapResponse {
        areas: n,
        surging_fraction: if n == 0 { 0.0 } else { surging as f64 / n as f64 },
        cells: stats
            .into_iter()
            .map(|s| {
                let [sw, ne] = areas.spec.cell_bounds(s.cell);
                AreaCell {
                    row: s.cell.row,
                    col: s.cell.col,
                    avg_multiplier: s.avg_multiplier,
                    route_count: s.route_count,
                    south: sw.lat,
                    west: sw.lon,
                    north: ne.lat,
                    east: ne.lon,
                }
            })
            .collect(),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryStatsResponse {
    pub frequency: QueryFrequency,
    /// Absent until at least one query has been logged.
    pub deltas: Option<DeltaDistribution>,
    /// One letter per hour of the week, `Y`, `B`, `T` or `N`.
    pub stripes: String,
}

async fn query_stats(
    State(state): State<Arc<ServiceState>>,
) -> std::result::Result<Json<QueryStatsResponse>, ApiError> {
    let log = state.log().snapshot();
    let deltas = if log.is_empty() {
        None
    } else {
        Some(delta_distribution(&log, Cents(100))?)
    };
    Ok(Json(QueryStatsResponse {
        frequency: query_frequency_stats_in(&log, state.tz()),
        deltas,
        stripes: stripes_string(&hourly_winner_stripes_in(&log, state.tz())),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub mean_cost: f64,
    pub median_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategiesResponse {
    pub journeys: usize,
    pub strategies: Vec<StrategySummary>,
}

fn strategy_table(log: &[QueryLogEntry]) -> Result<StrategiesResponse> {
    let strategies = if log.is_empty() {
        Vec::new()
    } else {
        Strategy::ALL
            .into_iter()
            .map(|s| {
                let e = evaluate_strategy(log, s, None)?;
                Ok(StrategySummary {
                    strategy: s,
                    mean_cost: e.mean_cost,
                    median_cost: e.median_cost,
                })
            })
            .collect::<Result<_>>()?
    };
    Ok(StrategiesResponse {
        journeys: log.len(),
        strategies,
    })
}

async fn strategies(State(state): State<Arc<ServiceState>>) -> std::result::Result<Json<StrategiesResponse>, ApiError> {
    Ok(Json(strategy_table(&state.log().snapshot())?))
}

async fn health(State(state): State<Arc<ServiceState>>) -> Json<serde_json::Value> {
    let engine = state.engine();
    Json(serde_json::json!({
        "status": "ok",
        "od_buckets": engine.index().len(),
        "logged_queries": state.log().len(),
    }))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/v1/health", get(health))
        .route("/v1/estimate", post(estimate))
        .route("/v1/surge/heatmap", get(heatmap))
        .route("/v1/stats/queries", get(query_stats))
        .route("/v1/strategies", get(strategies))
        .fallback(not_found)
        .with_state(state)
}

pub async fn serve(state: Arc<ServiceState>, listen: &str) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(listen)
        .await
        .map_err(|e| Error::io(listen, e))?;
    tracing::info!("listening on {listen}");
    axum::serve(listener, router(state))
        .await
        .map_err(|e| Error::io(listen, e))
}
