use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{AreaFeatureRow, FEATURE_NAMES};
use super::tree::{RegressionTree, TreeParams};
use crate::error::{Error, Result};
use crate::grid::CellIndex;
use crate::stats::pearson;
use crate::surge::SURGE_EPSILON;

/// How an area's average multiplier turns into ranking relevance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    /// `max(0, m - 1)`, so areas that never surge contribute nothing.
    #[default]
    Excess,
    Raw,
}

pub fn area_gain(avg_multiplier: f64, mode: GainMode) -> f64 {
    match mode {
        GainMode::Excess => {
            let g = avg_multiplier - 1.0;
            if g <= SURGE_EPSILON {
                0.0
            } else {
                g
            }
        }
        GainMode::Raw => avg_multiplier,
    }
}

/// NDCG@k of `order`, a permutation of indices into `gains`.
pub fn ndcg_at_k(order: &[usize], gains: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(Error::InvalidArgument(format!("gain {g} is not a nonnegative number")));
    }
    if let Some(&i) = order.iter().find(|&&i| i >= gains.len()) {
        return Err(Error::InvalidArgument(format!("ranked item {i} has no gain")));
    }
    let dcg = |gs: &mut dyn Iterator<Item = f64>| -> f64 {
        gs.take(k).enumerate().map(|(i, g)| g / ((i + 2) as f64).log2()).sum()
    };
    let mut ideal = gains.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let idcg = dcg(&mut ideal.into_iter());
    if idcg <= 0.0 {
        return Err(Error::UndefinedNdcg);
    }
    Ok(dcg(&mut order.iter().map(|&i| gains[i])) / idcg)
}

/// Indices sorted by descending score, ties by ascending cell.
pub fn rank_by_scores(cells: &[CellIndex], scores: &[f64]) -> Vec<usize> {
    assert_eq!(cells.len(), scores.len(), "one score per cell");
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(cells[a].cmp(&cells[b])));
    order
}

/// Mean NDCG@k of uniformly random rankings.
pub fn random_baseline_ndcg(gains: &[f64], k: usize, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..gains.len()).collect();
    let mut total = 0.0;
    for _ in 0..trials {
        order.shuffle(&mut rng);
        total += ndcg_at_k(&order, gains, k)?;
    }
    Ok(total / trials as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LooResult {
    /// Held-out prediction for each input row, in input order.
    pub predictions: Vec<f64>,
    pub pearson_r: f64,
}

/// Leave-one-out predictions using the feature columns in `features`.
///
/// Rows are put in cell order before fitting, so the result does not depend
/// on how the input was ordered.
pub fn loo_evaluate(rows: &[AreaFeatureRow], features: &[usize], params: TreeParams) -> Result<LooResult> {
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "leave-one-out needs 3 rows, got {}",
            rows.len()
        )));
    }
    if features.is_empty() || features.iter().any(|&f| f >= FEATURE_NAMES.len()) {
        return Err(Error::InvalidArgument(format!("bad feature subset {features:?}")));
    }
    let targets: Vec<f64> = rows.iter().map(|r| r.target).collect();
    if targets.iter().all(|&t| t == targets[0]) {
        return Err(Error::UndefinedCorrelation("targets have zero variance"));
    }

    let mut canon: Vec<usize> = (0..rows.len()).collect();
    canon.sort_by_key(|&i| rows[i].cell);
    let x: Vec<Vec<f64>> = canon
        .iter()
        .map(|&i| {
            let all = rows[i].features();
            features.iter().map(|&f| all[f]).collect()
        })
        .collect();
    let y: Vec<f64> = canon.iter().map(|&i| rows[i].target).collect();

    let held_out: Vec<f64> = (0..canon.len())
        .into_par_iter()
        .map(|skip| {
            let xs = without(&x, skip);
            let ys = without(&y, skip);
            RegressionTree::fit(&xs, &ys, params).map(|t| t.predict(&x[skip]))
        })
        .collect::<Result<_>>()?;

    let mut predictions = vec![0.0; rows.len()];
    for (pos, &i) in canon.iter().enumerate() {
        predictions[i] = held_out[pos];
    }
    let pearson_r = pearson(&predictions, &targets)?;
    Ok(LooResult { predictions, pearson_r })
}

fn without<T: Clone>(v: &[T], skip: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len().saturating_sub(1));
    out.extend_from_slice(&v[..skip]);
    out.extend_from_slice(&v[skip + 1..]);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub tree: TreeParams,
    pub k: usize,
    pub gain: GainMode,
    pub baseline_trials: usize,
    pub seed: u64,
    /// Extra feature subsets to score with leave-one-out, by column index.
    pub ablations: Vec<Vec<usize>>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tree: TreeParams::default(),
            k: 100,
            gain: GainMode::Excess,
            baseline_trials: 1000,
            seed: 0x5eed,
            ablations: vec![vec![0, 1, 2]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Score {
    pub name: String,
    pub pearson_r: f64,
    pub ndcg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub k: usize,
    pub gain: GainMode,
    pub areas: usize,
    /// One entry per raw feature, in column order.
    pub features: Vec<Score>,
    pub model: Score,
    pub ablations: Vec<Score>,
    pub baseline_ndcg: f64,
    #[serde(skip)]
    pub predictions: Vec<f64>,
}

impl EvaluationReport {
    /// Two `name,score` tables, Pearson first, then NDCG.
    pub fn write_tables<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<report>", e);
        let scored = || self.features.iter().chain(&self.ablations).chain([&self.model]);
        writeln!(out, "feature,pearson_r").map_err(io)?;
        for s in scored() {
            writeln!(out, "{},{:.4}", s.name, s.pearson_r).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
        writeln!(out, "feature,ndcg_at_{}", self.k).map_err(io)?;
        for s in scored() {
            writeln!(out, "{},{:.4}", s.name, s.ndcg).map_err(io)?;
        }
        writeln!(out, "random_baseline,{:.4}", self.baseline_ndcg).map_err(io)?;
        Ok(())
    }
}

fn subset_name(features: &[usize]) -> String {
    let names: Vec<&str> = features.iter().map(|&f| FEATURE_NAMES[f]).collect();
    format!("tree[{}]", names.join("+"))
}

/// Score every raw feature, the full tree, and each ablation subset.
pub fn evaluate(rows: &[AreaFeatureRow], cfg: &EvalConfig) -> Result<EvaluationReport> {
    let cells: Vec<CellIndex> = rows.iter().map(|r| r.cell).collect();
    let targets: Vec<f64> = rows.iter().map(|r| r.target).collect();
    let gains: Vec<f64> = targets.iter().map(|&t| area_gain(t, cfg.gain)).collect();
    let ndcg_of = |scores: &[f64]| ndcg_at_k(&rank_by_scores(&cells, scores), &gains, cfg.k);

    let mut features = Vec::with_capacity(FEATURE_NAMES.len());
    for (f, name) in FEATURE_NAMES.iter().enumerate() {
        let col: Vec<f64> = rows.iter().map(|r| r.features()[f]).collect();
        features.push(Score {
            name: name.to_string(),
            pearson_r: pearson(&col, &targets)?,
            ndcg: ndcg_of(&col)?,
        });
    }

    let all: Vec<usize> = (0..FEATURE_NAMES.len()).collect();
    let loo = loo_evaluate(rows, &all, cfg.tree)?;
    let model = Score {
        name: "decision_tree".into(),
        pearson_r: loo.pearson_r,
        ndcg: ndcg_of(&loo.predictions)?,
    };
    let ablations = cfg
        .ablations
        .iter()
        .map(|subset| {
            let r = loo_evaluate(rows, subset, cfg.tree)?;
            Ok(Score {
                name: subset_name(subset),
                pearson_r: r.pearson_r,
                ndcg: ndcg_of(&r.predictions)?,
            })
        })
        .collect::<Result<_>>()?;

    Ok(EvaluationReport {
        k: cfg.k,
        gain: cfg.gain,
        areas: rows.len(),
        features,
        model,
        ablations,
        baseline_ndcg: random_baseline_ndcg(&gains, cfg.k, cfg.baseline_trials, cfg.seed)?,
        predictions: loo.predictions,
    })
}
