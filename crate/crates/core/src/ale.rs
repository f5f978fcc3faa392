//! First-order accumulated local effects.
//!
//! Numeric variables are cut at fixed boundaries `z_0 < ... < z_k`. Each row
//! belongs to the interval `(z_{j-1}, z_j]` holding its value (rows at `z_0`
//! join the first interval). The local effect of an interval is the mean
//! change in prediction when the variable moves from `z_{j-1}` to `z_j` with
//! every other column held at the row's own values; effects are accumulated
//! from `z_0` and shifted so that their count-weighted mean is zero.
//!
//! Categorical variables use replace-and-predict: every row is scored with
//! the variable forced to each level and the level means are centred on their
//! frequency-weighted average.

use crate::data::{ColumnData, Dataset};
use crate::error::{Error, Result};
use crate::model::{predict_checked, Predictor};
use crate::quantile;

pub const DEFAULT_MAX_BINS: usize = 100;

/// Positions at which ALE values are reported.
#[derive(Debug, Clone, PartialEq)]
pub enum AleX {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl AleX {
    pub fn len(&self) -> usize {
        match self {
            AleX::Numeric(v) => v.len(),
            AleX::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, AleX::Numeric(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AleIntervals {
    pub variable: String,
    /// Boundaries for numeric variables, levels for categorical ones.
    pub x: AleX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterKind {
    Median,
    Mean,
    Zero,
}

impl CenterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CenterKind::Median => "median",
            CenterKind::Mean => "mean",
            CenterKind::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AleCurve {
    pub variable: String,
    pub ale_x: AleX,
    pub ale_n: Vec<usize>,
    /// Display scale: zero-centred values plus `center_value`.
    pub ale_y: Vec<f64>,
    pub center_kind: CenterKind,
    pub center_value: f64,
}

impl AleCurve {
    /// `ale_y` with the display constant removed.
    pub fn zero_centered(&self) -> Vec<f64> {
        self.ale_y.iter().map(|v| v - self.center_value).collect()
    }
}

/// Subtracts the `weights`-weighted mean. Zero total weight leaves the
/// values untouched.
pub fn zero_center(values: &mut [f64], weights: &[usize]) {
    let total: usize = weights.iter().sum();
    if total == 0 {
        return;
    }
    let shift = values
        .iter()
        .zip(weights)
        .map(|(v, &w)| v * w as f64)
        .sum::<f64>()
        / total as f64;
    for v in values.iter_mut() {
        *v -= shift;
    }
}

/// Builds the fixed ALE positions for one predictor.
pub fn compute_intervals(d: &Dataset, variable: &str, max_bins: usize) -> Result<AleIntervals> {
    if max_bins == 0 {
        return Err(Error::InvalidArgument("max_bins must be at least 1".into()));
    }
    let col = d.predictor(variable)?;
    let x = match &col.data {
        ColumnData::Factor { levels, .. } => AleX::Categorical(levels.clone()),
        ColumnData::Numeric(values) => {
            let sorted = quantile::sorted_copy(values);
            let mut distinct = sorted.clone();
            distinct.dedup();
            if distinct.len() < max_bins {
                AleX::Numeric(distinct)
            } else {
                AleX::Numeric(quantile_boundaries(&sorted, max_bins))
            }
        }
    };
    Ok(AleIntervals {
        variable: variable.to_string(),
        x,
    })
}

/// Minimum followed by the inverse-ECDF quantiles at `j / bins`,
/// `j = 1..=bins`, with duplicates merged. Every boundary is an observed
/// value, so no interval is empty on the data it was built from.
fn quantile_boundaries(sorted: &[f64], bins: usize) -> Vec<f64> {
    let n = sorted.len();
    let mut out = Vec::with_capacity(bins + 1);
    out.push(sorted[0]);
    for j in 1..=bins {
        let k = (n * j).div_ceil(bins);
        out.push(sorted[k.clamp(1, n) - 1]);
    }
    out.dedup();
    out
}

/// Interval index in `1..=k` used for local effects, and the `ale_n` slot in
/// `0..=k`. Values outside the boundaries are clamped to the end intervals.
fn locate(boundaries: &[f64], x: f64) -> (usize, usize) {
    let k = boundaries.len() - 1;
    let j = boundaries.partition_point(|&z| z < x);
    if j == 0 {
        (1, 0)
    } else if j > k {
        (k, k)
    } else {
        (j, j)
    }
}

pub fn compute_ale_numeric(p: &dyn Predictor, d: &Dataset, iv: &AleIntervals) -> Result<AleCurve> {
    let AleX::Numeric(z) = &iv.x else {
        return Err(Error::InvalidArgument(format!(
            "'{}' intervals are categorical",
            iv.variable
        )));
    };
    if z.is_empty() {
        return Err(Error::InvalidArgument("no ALE boundaries".into()));
    }
    let col = d.predictor(&iv.variable)?;
    let x = col.as_numeric().ok_or_else(|| {
        Error::InvalidArgument(format!("column '{}' is not numeric", iv.variable))
    })?;
    let k = z.len() - 1;
    let mut ale_n = vec![0usize; k + 1];
    if k == 0 {
        ale_n[0] = d.n_rows();
        return Ok(AleCurve {
            variable: iv.variable.clone(),
            ale_x: iv.x.clone(),
            ale_n,
            ale_y: vec![0.0],
            center_kind: CenterKind::Zero,
            center_value: 0.0,
        });
    }

    let mut interval = Vec::with_capacity(x.len());
    for &v in x {
        let (j, slot) = locate(z, v);
        interval.push(j);
        ale_n[slot] += 1;
    }
    let lower = d.with_numeric(&iv.variable, interval.iter().map(|&j| z[j - 1]).collect())?;
    let upper = d.with_numeric(&iv.variable, interval.iter().map(|&j| z[j]).collect())?;
    let pred_lo = predict_checked(p, &lower)?;
    let pred_hi = predict_checked(p, &upper)?;

    let mut sums = vec![0.0; k + 1];
    let mut counts = vec![0usize; k + 1];
    for ((&j, hi), lo) in interval.iter().zip(&pred_hi).zip(&pred_lo) {
        sums[j] += hi - lo;
        counts[j] += 1;
    }
    let mut ale_y = Vec::with_capacity(k + 1);
    let mut acc = 0.0;
    ale_y.push(0.0);
    for j in 1..=k {
        if counts[j] > 0 {
            acc += sums[j] / counts[j] as f64;
        }
        ale_y.push(acc);
    }
    zero_center(&mut ale_y, &ale_n);

    Ok(AleCurve {
        variable: iv.variable.clone(),
        ale_x: iv.x.clone(),
        ale_n,
        ale_y,
        center_kind: CenterKind::Zero,
        center_value: 0.0,
    })
}

pub fn compute_ale_categorical(
    p: &dyn Predictor,
    d: &Dataset,
    iv: &AleIntervals,
) -> Result<AleCurve> {
    let AleX::Categorical(levels) = &iv.x else {
        return Err(Error::InvalidArgument(format!(
            "'{}' intervals are numeric",
            iv.variable
        )));
    };
    if levels.is_empty() {
        return Err(Error::InvalidArgument("no ALE levels".into()));
    }
    let col = d.predictor(&iv.variable)?;
    let (data_levels, codes) = match &col.data {
        ColumnData::Factor { levels, codes } => (levels, codes),
        ColumnData::Numeric(_) => {
            return Err(Error::InvalidArgument(format!(
                "column '{}' is not categorical",
                iv.variable
            )))
        }
    };
    // Map interval levels onto this dataset's codes.
    let level_codes = levels
        .iter()
        .map(|l| {
            data_levels
                .iter()
                .position(|m| m == l)
                .map(|i| i as u32)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "level '{l}' is not a level of '{}'",
                        iv.variable
                    ))
                })
        })
        .collect::<Result<Vec<u32>>>()?;

    let n = d.n_rows();
    let ale_n: Vec<usize> = level_codes
        .iter()
        .map(|&c| codes.iter().filter(|&&k| k == c).count())
        .collect();

    // One predict call over all levels stacked.
    let rows: Vec<usize> = (0..level_codes.len()).flat_map(|_| 0..n).collect();
    let forced: Vec<u32> = level_codes
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c, n))
        .collect();
    let stacked = d.take_rows(&rows).with_codes(&iv.variable, forced)?;
    let preds = predict_checked(p, &stacked)?;
    let mut ale_y: Vec<f64> = preds
        .chunks(n)
        .map(|block| block.iter().sum::<f64>() / n as f64)
        .collect();
    zero_center(&mut ale_y, &ale_n);

    Ok(AleCurve {
        variable: iv.variable.clone(),
        ale_x: iv.x.clone(),
        ale_n,
        ale_y,
        center_kind: CenterKind::Zero,
        center_value: 0.0,
    })
}

/// Zero-centred ALE for either variable kind.
pub fn compute_ale(p: &dyn Predictor, d: &Dataset, iv: &AleIntervals) -> Result<AleCurve> {
    match iv.x {
        AleX::Numeric(_) => compute_ale_numeric(p, d, iv),
        AleX::Categorical(_) => compute_ale_categorical(p, d, iv),
    }
}

pub fn center_value(d: &Dataset, kind: CenterKind) -> f64 {
    let y = d.outcome_values();
    match kind {
        CenterKind::Median => quantile::median(y),
        CenterKind::Mean => quantile::mean(y),
        CenterKind::Zero => 0.0,
    }
}

/// Moves a curve onto the display scale.
pub fn center(curve: &AleCurve, d: &Dataset, kind: CenterKind) -> AleCurve {
    let value = center_value(d, kind);
    let mut out = curve.clone();
    for v in &mut out.ale_y {
        *v = *v - curve.center_value + value;
    }
    out.center_kind = kind;
    out.center_value = value;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Column;
    use crate::model::{ConstantPredictor, FnPredictor};

    fn numeric_data(x: Vec<f64>) -> Dataset {
        let y = vec![0.0; x.len()];
        Dataset::new(vec![Column::numeric("y", y), Column::numeric("x", x)], "y").unwrap()
    }

    fn doubler() -> FnPredictor<impl Fn(&Dataset) -> Result<Vec<f64>> + Send + Sync> {
        FnPredictor(|d: &Dataset| {
            Ok(d.column("x")
                .unwrap()
                .as_numeric()
                .unwrap()
                .iter()
                .map(|v| 2.0 * v)
                .collect())
        })
    }

    #[test]
    fn distinct_values_become_boundaries() {
        let d = numeric_data(vec![3.0, 1.0, 2.0, 2.0]);
        let iv = compute_intervals(&d, "x", 100).unwrap();
        assert_eq!(iv.x, AleX::Numeric(vec![1.0, 2.0, 3.0]));
    }

    #[test]
    fn quantile_boundaries_for_many_values() {
        // 1000 distinct values: k-th boundary is the ceil(1000 j / 100)-th
        // order statistic, i.e. sorted[10 j - 1].
        let mut rng = crate::rng::SeededRng::new(5, crate::rng::Purpose::Fixture);
        let x: Vec<f64> = (0..1000).map(|_| rng.uniform_open()).collect();
        let d = numeric_data(x.clone());
        let iv = compute_intervals(&d, "x", 100).unwrap();
        let AleX::Numeric(z) = iv.x else { panic!() };
        let sorted = quantile::sorted_copy(&x);
        assert_eq!(z.len(), 101);
        assert_eq!(z[0], sorted[0]);
        assert_eq!(z[100], sorted[999]);
        for j in 1..=100 {
            assert_eq!(z[j], sorted[10 * j - 1]);
        }
    }

    #[test]
    fn ties_merge_boundaries() {
        let x: Vec<f64> = (0..300)
            .map(|i| if i < 200 { 0.0 } else { f64::from(i) })
            .collect();
        let d = numeric_data(x);
        let iv = compute_intervals(&d, "x", 100).unwrap();
        let AleX::Numeric(z) = iv.x else { panic!() };
        assert!(z.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(z[0], 0.0);
        assert_eq!(*z.last().unwrap(), 299.0);
    }

    #[test]
    fn interval_errors() {
        let d = numeric_data(vec![1.0, 2.0]);
        assert!(matches!(
            compute_intervals(&d, "y", 100),
            Err(Error::OutcomeAsPredictor(_))
        ));
        assert!(matches!(
            compute_intervals(&d, "nope", 100),
            Err(Error::MissingColumn(_))
        ));
    }

    #[test]
    fn linear_hand_accumulation() {
        let d = numeric_data(vec![1.0, 2.0, 3.0, 4.0]);
        let iv = compute_intervals(&d, "x", 100).unwrap();
        let c = compute_ale_numeric(&doubler(), &d, &iv).unwrap();
        assert_eq!(c.ale_n, vec![1, 1, 1, 1]);
        let expected = [-3.0, -1.0, 1.0, 3.0];
        for (a, b) in c.ale_y.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_predictor_flat() {
        let d = numeric_data(vec![0.5, 1.5, 1.5, 9.0, 2.0]);
        let iv = compute_intervals(&d, "x", 100).unwrap();
        let c = compute_ale_numeric(&ConstantPredictor(4.2), &d, &iv).unwrap();
        assert!(c.ale_y.iter().all(|&v| v == 0.0));
        assert_eq!(c.ale_n.iter().sum::<usize>(), 5);
    }

    #[test]
    fn single_boundary_curve() {
        let d = numeric_data(vec![2.0, 2.0, 2.0]);
        let iv = compute_intervals(&d, "x", 100).unwrap();
        let c = compute_ale_numeric(&doubler(), &d, &iv).unwrap();
        assert_eq!(c.ale_n, vec![3]);
        assert_eq!(c.ale_y, vec![0.0]);
    }

    #[test]
    fn slope_of_second_variable() {
        let d = Dataset::new(
            vec![
                Column::numeric("y", vec![0.0; 4]),
                Column::numeric("x1", vec![0.3, -1.0, 2.0, 5.0]),
                Column::numeric("x2", vec![1.0, 0.25, 4.0, -2.0]),
            ],
            "y",
        )
        .unwrap();
        let f = FnPredictor(|d: &Dataset| {
            let a = d.column("x1").unwrap().as_numeric().unwrap();
            let b = d.column("x2").unwrap().as_numeric().unwrap();
            Ok(a.iter().zip(b).map(|(a, b)| a + 3.0 * b).collect())
        });
        let iv = compute_intervals(&d, "x2", 100).unwrap();
        let c = compute_ale_numeric(&f, &d, &iv).unwrap();
        let AleX::Numeric(z) = &c.ale_x else { panic!() };
        for i in 1..z.len() {
            let slope = (c.ale_y[i] - c.ale_y[i - 1]) / (z[i] - z[i - 1]);
            assert!((slope - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_rows_clamp() {
        let d = numeric_data(vec![1.0, 2.0, 3.0]);
        let iv = AleIntervals {
            variable: "x".into(),
            x: AleX::Numeric(vec![1.5, 2.5]),
        };
        let c = compute_ale_numeric(&doubler(), &d, &iv).unwrap();
        assert_eq!(c.ale_n, vec![1, 2]);
    }

    #[test]
    fn empty_interior_interval_is_zero_effect() {
        let d = numeric_data(vec![0.0, 0.0, 3.0]);
        let iv = AleIntervals {
            variable: "x".into(),
            x: AleX::Numeric(vec![0.0, 1.0, 2.0, 3.0]),
        };
        let c = compute_ale_numeric(&doubler(), &d, &iv).unwrap();
        // interval (0,1] holds both zero rows, (1,2] is empty, (2,3] holds x=3
        assert_eq!(c.ale_n, vec![2, 0, 0, 1]);
        let raw: Vec<f64> = c.ale_y.iter().map(|v| v - c.ale_y[0]).collect();
        assert_eq!(raw, vec![0.0, 2.0, 2.0, 4.0]);
    }

    fn cat_data() -> Dataset {
        Dataset::new(
            vec![
                Column::numeric("y", vec![0.0; 4]),
                Column::categorical("c", &["A", "A", "B", "B"]),
            ],
            "y",
        )
        .unwrap()
    }

    #[test]
    fn categorical_indicator() {
        let d = cat_data();
        let f = FnPredictor(|d: &Dataset| {
            let col = d.column("c").unwrap();
            let levels = col.levels().unwrap();
            Ok(col
                .codes()
                .unwrap()
                .iter()
                .map(|&k| if levels[k as usize] == "B" { 1.0 } else { 0.0 })
                .collect())
        });
        let iv = compute_intervals(&d, "c", 100).unwrap();
        let c = compute_ale_categorical(&f, &d, &iv).unwrap();
        assert_eq!(c.ale_n, vec![2, 2]);
        assert_eq!(c.ale_y, vec![-0.5, 0.5]);
    }

    #[test]
    fn categorical_constant_and_absent_level() {
        let d = cat_data().take_rows(&[0, 1]);
        let iv = AleIntervals {
            variable: "c".into(),
            x: AleX::Categorical(vec!["A".into(), "B".into()]),
        };
        let c = compute_ale_categorical(&ConstantPredictor(1.0), &d, &iv).unwrap();
        assert_eq!(c.ale_n, vec![2, 0]);
        assert_eq!(c.ale_y, vec![0.0, 0.0]);
    }

    #[test]
    fn binary_shape_like_sector_table() {
        let flags: Vec<bool> = (0..160).map(|i| i >= 70).collect();
        let d = Dataset::new(
            vec![
                Column::numeric("y", vec![1.0; 160]),
                Column::logical("public", &flags),
            ],
            "y",
        )
        .unwrap();
        let iv = compute_intervals(&d, "public", 100).unwrap();
        let c = compute_ale(&ConstantPredictor(0.0), &d, &iv).unwrap();
        assert_eq!(
            c.ale_x,
            AleX::Categorical(vec!["FALSE".into(), "TRUE".into()])
        );
        assert_eq!(c.ale_n, vec![70, 90]);
        assert_eq!(c.ale_n.iter().sum::<usize>(), 160);
    }

    #[test]
    fn centering_kinds() {
        let d = Dataset::new(
            vec![
                Column::numeric("y", vec![12.9, 10.0, 15.0]),
                Column::numeric("x", vec![1.0, 2.0, 3.0]),
            ],
            "y",
        )
        .unwrap();
        let curve = AleCurve {
            variable: "x".into(),
            ale_x: AleX::Categorical(vec!["FALSE".into(), "TRUE".into()]),
            ale_n: vec![1, 1],
            ale_y: vec![0.4, -0.3],
            center_kind: CenterKind::Zero,
            center_value: 0.0,
        };
        let m = center(&curve, &d, CenterKind::Median);
        assert!((m.ale_y[0] - 13.3).abs() < 1e-12);
        assert!((m.ale_y[1] - 12.6).abs() < 1e-12);
        assert_eq!(m.center_value, 12.9);
        assert_eq!(
            m.zero_centered(),
            vec![0.4 + 12.9 - 12.9, -0.3 + 12.9 - 12.9]
        );
        let z = center(&curve, &d, CenterKind::Zero);
        assert_eq!(z, curve);
        let flat = AleCurve {
            ale_y: vec![0.0, 0.0],
            ..curve.clone()
        };
        assert!(center(&flat, &d, CenterKind::Median)
            .ale_y
            .iter()
            .all(|&v| v == 12.9));
        let mean = center(&curve, &d, CenterKind::Mean);
        assert!((mean.center_value - 37.9 / 3.0).abs() < 1e-12);
    }
}
