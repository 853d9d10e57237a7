//! Predicting which areas surge from exogenous demand signals.

mod eval;
mod features;
mod tree;

pub use eval::{
    area_gain, evaluate, loo_evaluate, ndcg_at_k, random_baseline_ndcg, rank_by_scores, EvalConfig, EvaluationReport,
    GainMode, LooResult, Score,
};
pub use features::{
    build_features, read_checkins, read_feature_table, read_venues, write_feature_table, AreaFeatureRow, Checkin,
    TravelCategories, Venue, FEATURE_NAMES,
};
pub use tree::{RegressionTree, TreeParams};
