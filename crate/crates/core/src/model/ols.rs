//! Least squares with an intercept, solved through the normal equations on
//! centred columns, with a ridge fallback when the system is singular.

use std::sync::Arc;

use super::{Predictor, Trainer};
use crate::data::{ColumnData, Dataset};
use crate::error::{Error, Result};

pub const DEFAULT_RIDGE_EPSILON: f64 = 1e-8;

/// Relative pivot size below which the normal equations count as singular.
const PIVOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
enum Term {
    Numeric {
        column: String,
        coef: f64,
    },
    /// One coefficient per level; the first level is the baseline (0).
    Factor {
        column: String,
        levels: Vec<String>,
        coefs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsModel {
    intercept: f64,
    terms: Vec<Term>,
    ridged: bool,
}

impl OlsModel {
    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    /// Slope of a numeric predictor.
    pub fn coefficient(&self, column: &str) -> Option<f64> {
        self.terms.iter().find_map(|t| match t {
            Term::Numeric { column: c, coef } if c == column => Some(*coef),
            _ => None,
        })
    }

    /// Coefficient of one level of a factor predictor (0 for the baseline).
    pub fn level_coefficient(&self, column: &str, level: &str) -> Option<f64> {
        self.terms.iter().find_map(|t| match t {
            Term::Factor {
                column: c,
                levels,
                coefs,
            } if c == column => levels.iter().position(|l| l == level).map(|i| coefs[i]),
            _ => None,
        })
    }

    /// True when the ridge fallback was needed.
    pub fn ridged(&self) -> bool {
        self.ridged
    }
}

impl Predictor for OlsModel {
    fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        let mut out = vec![self.intercept; data.n_rows()];
        for term in &self.terms {
            match term {
                Term::Numeric { column, coef } => {
                    let x = data
                        .column(column)
                        .and_then(|c| c.as_numeric())
                        .ok_or_else(|| {
                            Error::Model(format!("numeric column '{column}' missing"))
                        })?;
                    for (o, v) in out.iter_mut().zip(x) {
                        *o += coef * v;
                    }
                }
                Term::Factor {
                    column,
                    levels,
                    coefs,
                } => {
                    let col = data
                        .column(column)
                        .ok_or_else(|| Error::Model(format!("factor column '{column}' missing")))?;
                    let (data_levels, codes) = match &col.data {
                        ColumnData::Factor { levels, codes } => (levels, codes),
                        ColumnData::Numeric(_) => {
                            return Err(Error::Model(format!("column '{column}' is not a factor")))
                        }
                    };
                    let lookup = data_levels
                        .iter()
                        .map(|l| {
                            levels
                                .iter()
                                .position(|m| m == l)
                                .map(|i| coefs[i])
                                .ok_or_else(|| {
                                    Error::Model(format!("unseen level '{l}' in '{column}'"))
                                })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    for (o, &k) in out.iter_mut().zip(codes) {
                        *o += lookup[k as usize];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Encoded design: one vector per feature, plus where each feature maps back.
struct Design {
    features: Vec<Vec<f64>>,
    owners: Vec<(usize, Option<usize>)>,
}

fn encode(d: &Dataset) -> (Design, Vec<Term>) {
    let mut features = Vec::new();
    let mut owners = Vec::new();
    let mut terms = Vec::new();
    for col in d.predictors() {
        let t = terms.len();
        match &col.data {
            ColumnData::Numeric(v) => {
                features.push(v.clone());
                owners.push((t, None));
                terms.push(Term::Numeric {
                    column: col.name.clone(),
                    coef: 0.0,
                });
            }
            ColumnData::Factor { levels, codes } => {
                for level in 1..levels.len() {
                    features.push(
                        codes
                            .iter()
                            .map(|&k| if k as usize == level { 1.0 } else { 0.0 })
                            .collect(),
                    );
                    owners.push((t, Some(level)));
                }
                terms.push(Term::Factor {
                    column: col.name.clone(),
                    levels: levels.clone(),
                    coefs: vec![0.0; levels.len()],
                });
            }
        }
    }
    (Design { features, owners }, terms)
}

/// In-place Cholesky factorisation of a dense symmetric matrix (lower
/// triangle). With `tolerance`, pivots below `tolerance * original diagonal`
/// are rejected.
fn cholesky(a: &mut [Vec<f64>], tolerance: Option<f64>) -> bool {
    let p = a.len();
    for j in 0..p {
        let original = a[j][j];
        let mut diag = original;
        for k in 0..j {
            diag -= a[j][k] * a[j][k];
        }
        let floor = tolerance.map_or(0.0, |t| t * original.abs());
        if !(diag > floor) || diag <= 0.0 {
            return false;
        }
        let root = diag.sqrt();
        a[j][j] = root;
        for i in (j + 1)..p {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / root;
        }
    }
    true
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let p = b.len();
    let mut z = b.to_vec();
    for i in 0..p {
        for k in 0..i {
            z[i] -= l[i][k] * z[k];
        }
        z[i] /= l[i][i];
    }
    for i in (0..p).rev() {
        for k in (i + 1)..p {
            z[i] -= l[k][i] * z[k];
        }
        z[i] /= l[i][i];
    }
    z
}

/// Fits `y ~ 1 + predictors`. Factor columns are one-hot encoded without
/// their first level.
pub fn fit_ols(d: &Dataset, ridge_epsilon: f64) -> Result<OlsModel> {
    if !(ridge_epsilon >= 0.0) || !ridge_epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ridge epsilon must be a nonnegative finite number, got {ridge_epsilon}"
        )));
    }
    if d.predictors().next().is_none() {
        return Err(Error::Model(
            "least squares needs at least one predictor".into(),
        ));
    }
    let y = d.outcome_values();
    let n = y.len() as f64;
    let (design, mut terms) = encode(d);
    let p = design.features.len();

    let y_mean = y.iter().sum::<f64>() / n;
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let means: Vec<f64> = design
        .features
        .iter()
        .map(|f| f.iter().sum::<f64>() / n)
        .collect();
    let centred: Vec<Vec<f64>> = design
        .features
        .iter()
        .zip(&means)
        .map(|(f, m)| f.iter().map(|v| v - m).collect())
        .collect();

    let mut gram = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum();
            gram[i][j] = s;
            gram[j][i] = s;
        }
        rhs[i] = centred[i].iter().zip(&yc).map(|(a, b)| a * b).sum();
    }

    let mut ridged = false;
    let coefs = if p == 0 {
        Vec::new()
    } else {
        let mut l = gram.clone();
        if cholesky(&mut l, Some(PIVOT_TOLERANCE)) {
            cholesky_solve(&l, &rhs)
        } else {
            ridged = true;
            let mut l = gram;
            for (i, row) in l.iter_mut().enumerate() {
                row[i] += ridge_epsilon;
            }
            if !cholesky(&mut l, None) {
                return Err(Error::Model(
                    "normal equations are singular even with the ridge term".into(),
                ));
            }
            cholesky_solve(&l, &rhs)
        }
    };
    if coefs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Model(
            "least squares produced non-finite coefficients".into(),
        ));
    }

    let intercept = y_mean - coefs.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();
    for (&(t, level), &b) in design.owners.iter().zip(&coefs) {
        match (&mut terms[t], level) {
            (Term::Numeric { coef, .. }, None) => *coef = b,
            (Term::Factor { coefs, .. }, Some(k)) => coefs[k] = b,
            _ => unreachable!("owner table matches term kinds"),
        }
    }
    Ok(OlsModel {
        intercept,
        terms,
        ridged,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct OlsTrainer {
    pub ridge_epsilon: f64,
}

impl Default for OlsTrainer {
    fn default() -> Self {
        Self {
            ridge_epsilon: DEFAULT_RIDGE_EPSILON,
        }
    }
}

impl Trainer for OlsTrainer {
    fn fit(&self, data: &Dataset) -> Result<Arc<dyn Predictor>> {
        Ok(Arc::new(fit_ols(data, self.ridge_epsilon)?))
    }

    fn description(&self) -> String {
        format!("ols(ridge_epsilon={})", self.ridge_epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Column;

    fn line_data() -> Dataset {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 2.0 * v).collect();
        Dataset::new(vec![Column::numeric("y", y), Column::numeric("x", x)], "y").unwrap()
    }

    #[test]
    fn recovers_exact_line() {
        let m = fit_ols(&line_data(), DEFAULT_RIDGE_EPSILON).unwrap();
        assert!((m.intercept() - 3.0).abs() < 1e-9);
        assert!((m.coefficient("x").unwrap() - 2.0).abs() < 1e-9);
        assert!(!m.ridged());
    }

    #[test]
    fn constant_column_predicts_mean() {
        let y = vec![1.0, 4.0, 2.0, 7.0];
        let d = Dataset::new(
            vec![Column::numeric("y", y), Column::numeric("c", vec![5.0; 4])],
            "y",
        )
        .unwrap();
        let m = fit_ols(&d, DEFAULT_RIDGE_EPSILON).unwrap();
        assert!(m.ridged());
        for p in m.predict(&d).unwrap() {
            assert!((p - 3.5).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicated_column_takes_ridge_path() {
        let x: Vec<f64> = (0..20).map(|i| f64::from(i) * 0.37 - 2.0).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 1.5 - 0.8 * v + if i % 3 == 0 { 0.3 } else { -0.1 })
            .collect();
        let single = Dataset::new(
            vec![
                Column::numeric("y", y.clone()),
                Column::numeric("x1", x.clone()),
            ],
            "y",
        )
        .unwrap();
        let double = single.with_column(Column::numeric("x2", x)).unwrap();
        let m1 = fit_ols(&single, DEFAULT_RIDGE_EPSILON).unwrap();
        let m2 = fit_ols(&double, DEFAULT_RIDGE_EPSILON).unwrap();
        assert!(m2.ridged());
        assert!(m2.coefficient("x1").unwrap().is_finite());
        assert!(m2.coefficient("x2").unwrap().is_finite());
        let p1 = m1.predict(&single).unwrap();
        let p2 = m2.predict(&double).unwrap();
        for (a, b) in p1.iter().zip(&p2) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn factor_dummies_drop_first_level() {
        let d = Dataset::new(
            vec![
                Column::numeric("y", vec![1.0, 1.0, 4.0, 4.0, 2.0, 2.0]),
                Column::categorical("g", &["a", "a", "b", "b", "c", "c"]),
            ],
            "y",
        )
        .unwrap();
        let m = fit_ols(&d, DEFAULT_RIDGE_EPSILON).unwrap();
        assert!((m.intercept() - 1.0).abs() < 1e-9);
        assert_eq!(m.level_coefficient("g", "a"), Some(0.0));
        assert!((m.level_coefficient("g", "b").unwrap() - 3.0).abs() < 1e-9);
        assert!((m.level_coefficient("g", "c").unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_predictors_is_an_error() {
        let d = Dataset::new(vec![Column::numeric("y", vec![1.0, 2.0])], "y").unwrap();
        assert!(matches!(fit_ols(&d, 1e-8), Err(Error::Model(_))));
    }
}
