mod common;

use std::fs::File;

use common::{fixture, golden};
use faregrid::grid::{read_snapshot, GridSpec};
use faregrid::predict::{
    build_features, evaluate, read_checkins, read_feature_table, read_venues, AreaFeatureRow, EvalConfig,
    TravelCategories, FEATURE_NAMES,
};
use faregrid::surge::{area_surge_stats, read_replay, read_routes, series_from_replay};

fn table() -> Vec<AreaFeatureRow> {
    read_feature_table(File::open(fixture("predict/area_features.csv")).unwrap()).unwrap()
}

#[test]
fn features_rebuild_from_raw_inputs() {
    let od = read_snapshot(File::open(fixture("predict/areas_od.csv")).unwrap()).unwrap();
    let venues = read_venues(fixture("predict/venues.csv")).unwrap();
    let checkins = read_checkins(fixture("predict/checkins.csv")).unwrap();
    let series = series_from_replay(&read_replay(fixture("predict/areas_840.replay.gz")).unwrap()).unwrap();
    let routes = read_routes(fixture("predict/routes_areas.csv")).unwrap();
    let surge = area_surge_stats(&series, &routes, &GridSpec::analysis()).unwrap();
    let built = build_features(&od, &venues, &checkins, &surge, &TravelCategories::default()).unwrap();

    let mut expected = table();
    expected.sort_by_key(|r| r.cell);
    assert_eq!(built.len(), 840);
    assert_eq!(built.len(), expected.len());
    for (b, e) in built.iter().zip(&expected) {
        assert_eq!(b.cell, e.cell);
        assert_eq!(b.features(), e.features(), "cell {:?}", b.cell);
        assert_eq!(b.missing, e.missing, "cell {:?}", b.cell);
        assert!((b.target - e.target).abs() < 1e-9, "cell {:?}", b.cell);
    }
}

#[test]
fn feature_scores_match_oracle() {
    let g = golden("predict/golden.json");
    let rows = table();
    assert_eq!(rows.len() as u64, g["areas"].as_u64().unwrap());
    let report = evaluate(&rows, &EvalConfig::default()).unwrap();
    for (s, name) in report.features.iter().zip(FEATURE_NAMES) {
        let r = g["feature_pearson"][name].as_f64().unwrap();
        let n = g["feature_ndcg_at_100"][name].as_f64().unwrap();
        assert!((s.pearson_r - r).abs() < 1e-9, "{name}: r {} vs {r}", s.pearson_r);
        assert!((s.ndcg - n).abs() < 1e-9, "{name}: ndcg {} vs {n}", s.ndcg);
    }
    let base = g["baseline_ndcg_at_100"].as_f64().unwrap();
    assert!((report.baseline_ndcg - base).abs() < 0.02);
    eprintln!(
        "tree r {:.4} (reference {:.4}), ndcg {:.4} (reference {:.4}), ablations {:?}",
        report.model.pearson_r,
        g["reference_tree_loo_pearson"].as_f64().unwrap(),
        report.model.ndcg,
        g["reference_tree_ndcg_at_100"].as_f64().unwrap(),
        report.ablations
    );
    assert!((report.model.pearson_r - g["reference_tree_loo_pearson"].as_f64().unwrap()).abs() < 0.02);
    assert!((report.model.ndcg - g["reference_tree_ndcg_at_100"].as_f64().unwrap()).abs() < 0.02);
}
