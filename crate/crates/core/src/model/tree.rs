//! CART regression tree grown by variance reduction.
//!
//! Numeric features split at midpoints between consecutive distinct values
//! (`x <= threshold` goes left). Factor features split one level against the
//! rest (the level goes left). Ties in gain keep the earliest candidate:
//! lowest column index, then lowest threshold or level index.

use std::sync::Arc;

use super::{Predictor, Trainer};
use crate::data::{ColumnData, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Test {
    AtMost(f64),
    Level(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        test: Test,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    features: Vec<String>,
    root: Node,
}

impl TreeModel {
    pub fn depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        depth(&self.root)
    }

    pub fn n_leaves(&self) -> usize {
        fn count(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 1,
                Node::Split { left, right, .. } => count(left) + count(right),
            }
        }
        count(&self.root)
    }

    /// Split of the root node as (column, numeric threshold), if any.
    pub fn root_threshold(&self) -> Option<(&str, f64)> {
        match &self.root {
            Node::Split {
                feature,
                test: Test::AtMost(t),
                ..
            } => Some((&self.features[*feature], *t)),
            _ => None,
        }
    }

    /// Leaf values in left-to-right order.
    pub fn leaf_values(&self) -> Vec<f64> {
        fn walk(n: &Node, out: &mut Vec<f64>) {
            match n {
                Node::Leaf(v) => out.push(*v),
                Node::Split { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

/// Per-feature view of a dataset used at prediction time.
enum FeatureView<'a> {
    Numeric(&'a [f64]),
    Factor(&'a [String], &'a [u32]),
}

fn views<'a>(features: &[String], data: &'a Dataset) -> Result<Vec<FeatureView<'a>>> {
    features
        .iter()
        .map(|name| {
            let col = data
                .column(name)
                .ok_or_else(|| Error::Model(format!("column '{name}' missing")))?;
            Ok(match &col.data {
                ColumnData::Numeric(v) => FeatureView::Numeric(v),
                ColumnData::Factor { levels, codes } => FeatureView::Factor(levels, codes),
            })
        })
        .collect()
}

fn goes_left(test: &Test, view: &FeatureView<'_>, row: usize) -> Result<bool> {
    match (test, view) {
        (Test::AtMost(t), FeatureView::Numeric(v)) => Ok(v[row] <= *t),
        (Test::Level(l), FeatureView::Factor(levels, codes)) => {
            Ok(levels[codes[row] as usize] == *l)
        }
        _ => Err(Error::Model(
            "column kind differs from training data".into(),
        )),
    }
}

impl Predictor for TreeModel {
    fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        let views = views(&self.features, data)?;
        (0..data.n_rows())
            .map(|row| {
                let mut node = &self.root;
                loop {
                    match node {
                        Node::Leaf(v) => return Ok(*v),
                        Node::Split {
                            feature,
                            test,
                            left,
                            right,
                        } => {
                            node = if goes_left(test, &views[*feature], row)? {
                                left
                            } else {
                                right
                            };
                        }
                    }
                }
            })
            .collect()
    }
}

struct Grower<'a> {
    views: Vec<FeatureView<'a>>,
    y: &'a [f64],
    max_depth: usize,
    min_leaf: usize,
}

struct Candidate {
    gain: f64,
    feature: usize,
    test: Test,
}

fn sse(rows: &[usize], y: &[f64]) -> (f64, f64) {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / n;
    let sse = rows.iter().map(|&r| (y[r] - mean).powi(2)).sum();
    (mean, sse)
}

impl Grower<'_> {
    fn grow(&self, rows: &[usize], depth: usize) -> Node {
        let (mean, parent_sse) = sse(rows, self.y);
        if depth >= self.max_depth || rows.len() < 2 * self.min_leaf || parent_sse <= 0.0 {
            return Node::Leaf(mean);
        }
        let Some(best) = self.best_split(rows, mean, parent_sse) else {
            return Node::Leaf(mean);
        };
        let view = &self.views[best.feature];
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| goes_left(&best.test, view, r).expect("kinds fixed at fit"));
        Node::Split {
            feature: best.feature,
            test: best.test,
            left: Box::new(self.grow(&left, depth + 1)),
            right: Box::new(self.grow(&right, depth + 1)),
        }
    }

    fn best_split(&self, rows: &[usize], mean: f64, parent_sse: f64) -> Option<Candidate> {
        let min_gain = 1e-12 * parent_sse;
        let mut best: Option<Candidate> = None;
        let n = rows.len();
        // Sums of y - mean keep the gain arithmetic well conditioned.
        let total: f64 = rows.iter().map(|&r| self.y[r] - mean).sum();
        let total_sq: f64 = rows.iter().map(|&r| (self.y[r] - mean).powi(2)).sum();
        let gain_of = |sum_l: f64, sq_l: f64, n_l: usize| -> f64 {
            let n_r = n - n_l;
            let sum_r = total - sum_l;
            let sq_r = total_sq - sq_l;
            let sse_l = sq_l - sum_l * sum_l / n_l as f64;
            let sse_r = sq_r - sum_r * sum_r / n_r as f64;
            parent_sse - sse_l - sse_r
        };
        let mut consider = |gain: f64, feature: usize, test: Test| {
            if gain > min_gain && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Candidate {
                    gain,
                    feature,
                    test,
                });
            }
        };

        for (f, view) in self.views.iter().enumerate() {
            match view {
                FeatureView::Numeric(x) => {
                    let mut order: Vec<usize> = rows.to_vec();
                    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
                    let (mut sum_l, mut sq_l) = (0.0, 0.0);
                    for i in 0..n - 1 {
                        let r = order[i];
                        let dy = self.y[r] - mean;
                        sum_l += dy;
                        sq_l += dy * dy;
                        let (a, b) = (x[r], x[order[i + 1]]);
                        let n_l = i + 1;
                        if a == b || n_l < self.min_leaf || n - n_l < self.min_leaf {
                            continue;
                        }
                        let mut threshold = a + (b - a) / 2.0;
                        if threshold >= b {
                            threshold = a;
                        }
                        consider(gain_of(sum_l, sq_l, n_l), f, Test::AtMost(threshold));
                    }
                }
                FeatureView::Factor(levels, codes) => {
                    let mut sums = vec![(0.0, 0.0, 0usize); levels.len()];
                    for &r in rows {
                        let dy = self.y[r] - mean;
                        let s = &mut sums[codes[r] as usize];
                        s.0 += dy;
                        s.1 += dy * dy;
                        s.2 += 1;
                    }
                    for (k, &(sum_l, sq_l, n_l)) in sums.iter().enumerate() {
                        if n_l < self.min_leaf || n - n_l < self.min_leaf {
                            continue;
                        }
                        consider(gain_of(sum_l, sq_l, n_l), f, Test::Level(levels[k].clone()));
                    }
                }
            }
        }
        best
    }
}

pub fn fit_tree(d: &Dataset, max_depth: usize, min_leaf: usize) -> Result<TreeModel> {
    if min_leaf == 0 {
        return Err(Error::InvalidArgument("min_leaf must be at least 1".into()));
    }
    if d.n_rows() == 0 {
        return Err(Error::Model(
            "cannot grow a tree on an empty dataset".into(),
        ));
    }
    let features = d.predictor_names();
    let grower = Grower {
        views: views(&features, d)?,
        y: d.outcome_values(),
        max_depth,
        min_leaf,
    };
    let rows: Vec<usize> = (0..d.n_rows()).collect();
    let root = grower.grow(&rows, 0);
    Ok(TreeModel { features, root })
}

#[derive(Debug, Clone, Copy)]
pub struct TreeTrainer {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Trainer for TreeTrainer {
    fn fit(&self, data: &Dataset) -> Result<Arc<dyn Predictor>> {
        Ok(Arc::new(fit_tree(data, self.max_depth, self.min_leaf)?))
    }

    fn description(&self) -> String {
        format!(
            "tree(max_depth={}, min_leaf={})",
            self.max_depth, self.min_leaf
        )
    }
}
