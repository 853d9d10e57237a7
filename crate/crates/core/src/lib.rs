//! Taxi fare transparency engine: origin-destination fare index over New York
//! trip records, yellow-versus-Uber price comparison, surge pricing analytics
//! and surge-area prediction.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fare;
pub mod geo;
pub mod grid;
pub mod ingest;
pub mod money;
pub mod predict;
pub mod savings;
pub mod service;
pub mod stats;
pub mod surge;
pub mod time;

pub use error::{Error, Result};
