//! Empirical quantiles and small summaries shared by every module.

/// Type-7 (linear interpolation) quantile of already sorted data, `h = (n-1)p`.
pub fn type7_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn type7(values: &[f64], p: f64) -> f64 {
    type7_sorted(&sorted_copy(values), p)
}

pub fn median(values: &[f64]) -> f64 {
    type7(values, 0.5)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_by_hand() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((type7(&v, 0.025) - 1.1).abs() < 1e-12);
        assert!((type7(&v, 0.975) - 4.9).abs() < 1e-12);
        assert_eq!(type7(&v, 0.5), 3.0);
        assert_eq!(type7(&[0.0, 10.0], 0.25), 2.5);
        assert_eq!(type7(&[4.0], 0.9), 4.0);
    }

    #[test]
    fn median_even_count_interpolates() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }
}
