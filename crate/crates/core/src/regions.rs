//! Confidence-region tables: where a bootstrapped ALE curve sits relative to
//! the ALER band, summarised as maximal runs of equal status.

use crate::ale::AleX;
use crate::bootstrap::BootAleCurve;
use crate::error::{Error, Result};
use crate::stats::AlerBand;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelativeToMid {
    Below,
    Overlap,
    Above,
}

impl RelativeToMid {
    pub fn as_str(self) -> &'static str {
        match self {
            RelativeToMid::Below => "below",
            RelativeToMid::Overlap => "overlap",
            RelativeToMid::Above => "above",
        }
    }
}

/// Below when the whole interval lies under the band, above when it lies
/// over it, overlap otherwise.
pub fn classify_relative_to_band(lo: f64, hi: f64, band: &AlerBand) -> RelativeToMid {
    if hi < band.lower {
        RelativeToMid::Below
    } else if lo > band.upper {
        RelativeToMid::Above
    } else {
        RelativeToMid::Overlap
    }
}

/// Slope between two points after scaling x and y by their ranges.
pub fn trend(start: (f64, f64), end: (f64, f64), x_range: f64, y_range: f64) -> f64 {
    let dx = end.0 - start.0;
    if dx == 0.0 {
        return 0.0;
    }
    ((end.1 - start.1) / y_range) / (dx / x_range)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRowNumeric {
    pub start_x: f64,
    pub end_x: f64,
    pub x_span: f64,
    pub n: usize,
    pub n_pct: f64,
    pub start_y: f64,
    pub end_y: f64,
    pub trend: f64,
    pub relative_to_mid: RelativeToMid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRowCategorical {
    pub x: String,
    pub n: usize,
    pub n_pct: f64,
    pub y: f64,
    pub relative_to_mid: RelativeToMid,
}

/// Status of every `ale_x` entry from its confidence interval.
pub fn pointwise_status(curve: &BootAleCurve, band: &AlerBand) -> Vec<RelativeToMid> {
    curve
        .ale_y_lo
        .iter()
        .zip(&curve.ale_y_hi)
        .map(|(&lo, &hi)| classify_relative_to_band(lo, hi, band))
        .collect()
}

/// Half-open index ranges of maximal runs of equal status.
pub fn runs(status: &[RelativeToMid]) -> Vec<(usize, usize, RelativeToMid)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=status.len() {
        if i == status.len() || status[i] != status[start] {
            out.push((start, i, status[start]));
            start = i;
        }
    }
    out
}

pub fn regions_numeric(
    curve: &BootAleCurve,
    band: &AlerBand,
    y_range: f64,
) -> Result<Vec<RegionRowNumeric>> {
    let AleX::Numeric(x) = &curve.ale_x else {
        return Err(Error::InvalidArgument(format!(
            "'{}' is not numeric",
            curve.variable
        )));
    };
    if x.is_empty() {
        return Err(Error::InvalidArgument("empty curve".into()));
    }
    if !(y_range > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "y range must be positive, got {y_range}"
        )));
    }
    let n_total: usize = curve.ale_n.iter().sum();
    let x_range = x[x.len() - 1] - x[0];
    let y = &curve.ale_y_mean;
    Ok(runs(&pointwise_status(curve, band))
        .into_iter()
        .map(|(a, b, status)| {
            let (start_x, end_x) = (x[a], x[b - 1]);
            let n: usize = curve.ale_n[a..b].iter().sum();
            RegionRowNumeric {
                start_x,
                end_x,
                x_span: if x_range > 0.0 {
                    (end_x - start_x) / x_range
                } else {
                    1.0
                },
                n,
                n_pct: n as f64 / n_total as f64,
                start_y: y[a],
                end_y: y[b - 1],
                trend: if x_range > 0.0 {
                    trend((start_x, y[a]), (end_x, y[b - 1]), x_range, y_range)
                } else {
                    0.0
                },
                relative_to_mid: status,
            }
        })
        .collect())
}

pub fn regions_categorical(
    curve: &BootAleCurve,
    band: &AlerBand,
) -> Result<Vec<RegionRowCategorical>> {
    let AleX::Categorical(levels) = &curve.ale_x else {
        return Err(Error::InvalidArgument(format!(
            "'{}' is not categorical",
            curve.variable
        )));
    };
    if levels.is_empty() {
        return Err(Error::InvalidArgument("empty curve".into()));
    }
    let n_total: usize = curve.ale_n.iter().sum();
    let status = pointwise_status(curve, band);
    Ok(levels
        .iter()
        .enumerate()
        .map(|(i, level)| RegionRowCategorical {
            x: level.clone(),
            n: curve.ale_n[i],
            n_pct: curve.ale_n[i] as f64 / n_total as f64,
            y: curve.ale_y_mean[i],
            relative_to_mid: status[i],
        })
        .collect())
}

/// A variable has a meaningful effect somewhere iff one of its regions is
/// clear of the band.
pub fn has_significant_region(statuses: impl IntoIterator<Item = RelativeToMid>) -> bool {
    statuses.into_iter().any(|s| s != RelativeToMid::Overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ale::CenterKind;
    use crate::bootstrap::BootMode;

    fn band(lower: f64, upper: f64) -> AlerBand {
        AlerBand {
            lower,
            upper,
            outer_lower: lower - 1.0,
            outer_upper: upper + 1.0,
            center: (lower + upper) / 2.0,
            level: 0.95,
            outer_level: 0.99,
        }
    }

    fn curve(x: AleX, n: Vec<usize>, lo: Vec<f64>, mean: Vec<f64>, hi: Vec<f64>) -> BootAleCurve {
        BootAleCurve {
            variable: "v".into(),
            ale_x: x,
            ale_n: n,
            ale_y: mean.clone(),
            ale_y_median: mean.clone(),
            ale_y_mean: mean,
            ale_y_lo: lo,
            ale_y_hi: hi,
            center_kind: CenterKind::Median,
            center_value: 0.0,
            ci_level: 0.95,
            n_it: 10,
            mode: BootMode::DataOnly,
            per_iteration: None,
        }
    }

    #[test]
    fn classification_rules() {
        let b = band(-1.0, 1.0);
        assert_eq!(
            classify_relative_to_band(0.0, 0.0, &b),
            RelativeToMid::Overlap
        );
        assert_eq!(
            classify_relative_to_band(-3.0, -1.0 - 1e-9, &b),
            RelativeToMid::Below
        );
        assert_eq!(
            classify_relative_to_band(-3.0, -1.0, &b),
            RelativeToMid::Overlap
        );
        assert_eq!(
            classify_relative_to_band(1.0 + 1e-9, 2.0, &b),
            RelativeToMid::Above
        );
        assert_eq!(
            classify_relative_to_band(-5.0, 5.0, &b),
            RelativeToMid::Overlap
        );
    }

    #[test]
    fn trend_cases() {
        assert_eq!(trend((0.0, 0.0), (1.0, 1.0), 1.0, 1.0), 1.0);
        assert_eq!(trend((0.3, 2.0), (0.3, 2.0), 1.0, 1.0), 0.0);
        assert_eq!(trend((0.0, 1.0), (2.0, 0.0), 4.0, 2.0), -1.0);
    }

    #[test]
    fn run_boundaries() {
        use RelativeToMid::*;
        let c = curve(
            AleX::Numeric(vec![0.0, 1.0, 2.0, 4.0]),
            vec![1, 2, 3, 4],
            vec![-5.0, -4.0, -0.5, 2.0],
            vec![-4.0, -3.0, 0.0, 3.0],
            vec![-3.0, -2.0, 0.5, 4.0],
        );
        let rows = regions_numeric(&c, &band(-1.0, 1.0), 8.0).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(
            rows.iter().map(|r| r.relative_to_mid).collect::<Vec<_>>(),
            vec![Below, Overlap, Above]
        );
        assert_eq!((rows[0].start_x, rows[0].end_x, rows[0].n), (0.0, 1.0, 3));
        assert_eq!(rows[0].x_span, 0.25);
        assert_eq!(rows[0].trend, (1.0 / 8.0) / 0.25);
        assert_eq!(rows[1].trend, 0.0);
        assert_eq!(rows[2].n_pct, 0.4);
        assert!(has_significant_region(
            rows.iter().map(|r| r.relative_to_mid)
        ));
    }

    #[test]
    fn categorical_rows() {
        use RelativeToMid::*;
        let c = curve(
            AleX::Categorical(vec!["a".into(), "b".into()]),
            vec![70, 90],
            vec![2.0, -0.5],
            vec![3.0, 0.0],
            vec![4.0, 0.5],
        );
        let rows = regions_categorical(&c, &band(-1.0, 1.0)).unwrap();
        assert_eq!(rows[0].relative_to_mid, Above);
        assert_eq!(rows[1].relative_to_mid, Overlap);
        assert_eq!(rows[0].n + rows[1].n, 160);
        assert_eq!(rows[0].n_pct, 70.0 / 160.0);
        assert!(regions_numeric(&c, &band(-1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn single_level_inside() {
        let c = curve(
            AleX::Categorical(vec!["only".into()]),
            vec![5],
            vec![-0.1],
            vec![0.0],
            vec![0.1],
        );
        let rows = regions_categorical(&c, &band(-1.0, 1.0)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].relative_to_mid, RelativeToMid::Overlap);
        assert!(!has_significant_region(
            rows.iter().map(|r| r.relative_to_mid)
        ));
    }
}
