use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub max_depth: usize,
    /// Fewest training rows allowed in a leaf.
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 20,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        value: f64,
        n: usize,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART regression tree with squared-error splits.
///
/// Candidate thresholds are midpoints between consecutive distinct values.
/// Among equally good splits the lower feature index wins, then the lower
/// threshold, so fits are fully deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
    n_features: usize,
}

struct Builder<'a, R> {
    x: &'a [R],
    y: &'a [f64],
    params: TreeParams,
    n_features: usize,
    nodes: Vec<Node>,
}

struct Best {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl<R: AsRef<[f64]>> Builder<'_, R> {
    fn x(&self, row: usize, f: usize) -> f64 {
        self.x[row].as_ref()[f]
    }

    fn build(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let n = rows.len();
        let mean = rows.iter().map(|&i| self.y[i]).sum::<f64>() / n as f64;
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: mean, n });

        let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| {
            (a.min(self.y[i]), b.max(self.y[i]))
        });
        if depth >= self.params.max_depth || n < 2 * self.params.min_leaf || lo == hi {
            return id;
        }
        let Some(best) = self.best_split(rows, mean) else {
            return id;
        };
        let (f, t) = (best.feature, best.threshold);
        // stable partition keeps row order deterministic below this node
        let (mut l, mut r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x(i, f) <= t);
        let left = self.build(&mut l, depth + 1);
        let right = self.build(&mut r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: f,
            threshold: t,
            left,
            right,
        };
        id
    }

    /// Maximizes `sum_l^2 / n_l + sum_r^2 / n_r` over centred targets, which
    /// equals the reduction in squared error.
    fn best_split(&self, rows: &[usize], mean: f64) -> Option<Best> {
        let n = rows.len();
        let min_leaf = self.params.min_leaf.max(1);
        let node_sse: f64 = rows.iter().map(|&i| (self.y[i] - mean).powi(2)).sum();
        let tol = 1e-10 * node_sse;
        let mut best: Option<Best> = None;
        let mut order = rows.to_vec();
        for f in 0..self.n_features {
            order.sort_by(|&a, &b| self.x(a, f).total_cmp(&self.x(b, f)).then(a.cmp(&b)));
            let total: f64 = order.iter().map(|&i| self.y[i] - mean).sum();
            let mut left_sum = 0.0;
            for k in 0..n - 1 {
                left_sum += self.y[order[k]] - mean;
                let nl = k + 1;
                let nr = n - nl;
                let (a, b) = (self.x(order[k], f), self.x(order[k + 1], f));
                if a == b || nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let right_sum = total - left_sum;
                let score = left_sum * left_sum / nl as f64 + right_sum * right_sum / nr as f64;
                if best.as_ref().is_none_or(|bst| score > bst.score + tol) {
                    let mid = a + (b - a) / 2.0;
                    best = Some(Best {
                        score,
                        feature: f,
                        threshold: if mid < b { mid } else { a },
                    });
                }
            }
        }
        best
    }
}

impl RegressionTree {
    pub fn fit<R: AsRef<[f64]>>(x: &[R], y: &[f64], params: TreeParams) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput("training set"));
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows, {} targets",
                x.len(),
                y.len()
            )));
        }
        let n_features = x[0].as_ref().len();
        if x.iter().any(|r| r.as_ref().len() != n_features) {
            return Err(Error::DimensionMismatch("feature rows have unequal lengths".into()));
        }
        if x.iter().flat_map(|r| r.as_ref()).chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("training data must be finite".into()));
        }
        let mut b = Builder {
            x,
            y,
            params,
            n_features,
            nodes: Vec::new(),
        };
        let mut rows: Vec<usize> = (0..x.len()).collect();
        b.build(&mut rows, 0);
        Ok(RegressionTree {
            nodes: b.nodes,
            n_features,
        })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Indented text rendering, one node per line.
    pub fn dump(&self, names: &[&str]) -> String {
        fn walk(t: &RegressionTree, names: &[&str], i: usize, depth: usize, out: &mut String) {
            let pad = "  ".repeat(depth);
            match &t.nodes[i] {
                Node::Leaf { value, n } => {
                    let _ = writeln!(out, "{pad}leaf {value} (n={n})");
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let name = names
                        .get(*feature)
                        .map_or_else(|| format!("x{feature}"), |s| s.to_string());
                    let _ = writeln!(out, "{pad}{name} <= {threshold}");
                    walk(t, names, *left, depth + 1, out);
                    walk(t, names, *right, depth + 1, out);
                }
            }
        }
        let mut out = String::new();
        walk(self, names, 0, 0, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fit(x: &[[f64; 2]], y: &[f64], depth: usize) -> RegressionTree {
        RegressionTree::fit(
            x,
            y,
            TreeParams {
                max_depth: depth,
                min_leaf: 1,
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_target_is_one_leaf() {
        let t = fit(&[[1.0, 2.0], [3.0, 4.0], [5.0, 0.0]], &[7.0; 3], 20);
        assert_eq!(t.n_leaves(), 1);
        assert_eq!(t.predict(&[100.0, -1.0]), 7.0);
    }

    #[test]
    fn depth_zero_is_global_mean() {
        let t = fit(&[[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]], &[1.0, 2.0, 6.0], 0);
        assert_eq!(t.depth(), 0);
        assert_eq!(t.predict(&[9.0, 9.0]), 3.0);
    }

    #[test]
    fn four_distinct_rows_fit_exactly() {
        let x = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [1.0, 2.0, 3.0, 5.0];
        let t = fit(&x, &y, 20);
        for (r, v) in x.iter().zip(y) {
            assert_eq!(t.predict(r), v);
        }
    }

    // Feature 0 and feature 1 induce the same partition with the same score;
    // the lower feature index must win, and within a feature the lower threshold.
    #[test]
    fn ties_go_to_lower_feature_then_lower_threshold() {
        let x = [[1.0, 10.0], [2.0, 20.0], [3.0, 30.0], [4.0, 40.0]];
        let y = [1.0, 1.0, 3.0, 3.0];
        let t = fit(&x, &y, 20);
        assert_eq!(t.dump(&["a", "b"]), "a <= 2.5\n  leaf 1 (n=2)\n  leaf 3 (n=2)\n");

        // symmetric targets: splitting after row 1 or after row 3 scores the same
        let x = [[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0]];
        let y = [0.0, 1.0, 1.0, 0.0];
        let t = fit(&x, &y, 1);
        assert!(t.dump(&[]).starts_with("x0 <= 1.5\n"));
    }

    #[test]
    fn min_leaf_is_respected() {
        let x: Vec<[f64; 2]> = (0..10).map(|i| [i as f64, 0.0]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let t = RegressionTree::fit(
            &x,
            &y,
            TreeParams {
                max_depth: 20,
                min_leaf: 3,
            },
        )
        .unwrap();
        assert!(t.n_leaves() <= 3);
        assert!(t.nodes.iter().all(|n| match n {
            Node::Leaf { n, .. } => *n >= 3,
            _ => true,
        }));
    }

    #[test]
    fn empty_training_set() {
        let x: [[f64; 2]; 0] = [];
        assert!(matches!(
            RegressionTree::fit(&x, &[], TreeParams::default()),
            Err(Error::EmptyInput(_))
        ));
    }

    proptest! {
        #[test]
        fn unique_rows_are_memorized(rows in prop::collection::btree_map((0u8..20, 0u8..20), -5.0f64..5.0, 1..30)) {
            let x: Vec<[f64; 2]> = rows.keys().map(|&(a, b)| [a as f64, b as f64]).collect();
            let y: Vec<f64> = rows.values().copied().collect();
            let t = RegressionTree::fit(&x, &y, TreeParams { max_depth: 64, min_leaf: 1 }).unwrap();
            for (r, v) in x.iter().zip(&y) {
                prop_assert_eq!(t.predict(r), *v);
            }
        }

        #[test]
        fn monotone_transform_keeps_training_predictions(
            rows in prop::collection::vec((0u8..30, 0u8..30, -5.0f64..5.0), 2..40),
        ) {
            let x: Vec<[f64; 2]> = rows.iter().map(|r| [r.0 as f64, r.1 as f64]).collect();
            let xt: Vec<[f64; 2]> = x.iter().map(|r| [r[0].powi(3) + 2.0, (r[1] + 1.0).ln()]).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let p = TreeParams::default();
            let a = RegressionTree::fit(&x, &y, p).unwrap();
            let b = RegressionTree::fit(&xt, &y, p).unwrap();
            for (r, rt) in x.iter().zip(&xt) {
                prop_assert_eq!(a.predict(r), b.predict(rt));
            }
        }
    }
}
