use std::sync::Arc;

use proptest::prelude::*;

use alestats::ale::{compute_ale, compute_intervals, AleX, DEFAULT_MAX_BINS};
use alestats::bootstrap::{bootstrap_ales, BootConfig, BootMode, ModelSource};
use alestats::data::{parse_csv, resample_indices, Column, Dataset};
use alestats::model::{fit_ols, FnPredictor, OlsTrainer, Trainer, TreeTrainer};
use alestats::par::Execution;
use alestats::regions::{runs, RelativeToMid};
use alestats::stats::{aled, aler, p_value, EcdfNormalizer, Tail};
use alestats::Result;

fn dataset(x: Vec<f64>, w: Vec<f64>, levels: Vec<u8>) -> Dataset {
    let n = x.len();
    let g: Vec<String> = levels.iter().map(|l| format!("g{l}")).collect();
    let y: Vec<f64> = (0..n).map(|i| x[i] - w[i] + f64::from(levels[i])).collect();
    Dataset::new(
        vec![
            Column::numeric("x", x),
            Column::numeric("w", w),
            Column::categorical("g", &g),
            Column::numeric("y", y),
        ],
        "y",
    )
    .unwrap()
}

fn data_strategy() -> impl Strategy<Value = Dataset> {
    (5usize..120).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(prop::sample::select(vec![-1.0, 0.0, 0.5, 2.0]), n),
            prop::collection::vec(0u8..3, n),
        )
            .prop_map(|(x, w, g)| dataset(x, w, g))
    })
}

fn g(v: f64) -> f64 {
    v * v * v - 2.0 * v + v.sin()
}

fn additive(d: &Dataset) -> Result<Vec<f64>> {
    let x = d.column("x").unwrap().as_numeric().unwrap();
    let w = d.column("w").unwrap().as_numeric().unwrap();
    let codes = d.column("g").unwrap().codes().unwrap();
    let levels = d.column("g").unwrap().levels().unwrap();
    Ok((0..d.n_rows())
        .map(|i| {
            let level: f64 = levels[codes[i] as usize][1..].parse().unwrap();
            g(x[i]) + 10.0 * w[i] + 3.0 * level * level
        })
        .collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn additive_effects_are_recovered(d in data_strategy()) {
        let p = FnPredictor(additive);
        let iv = compute_intervals(&d, "x", DEFAULT_MAX_BINS).unwrap();
        let c = compute_ale(&p, &d, &iv).unwrap();
        let AleX::Numeric(z) = &c.ale_x else { unreachable!() };
        for k in 1..z.len() {
            let want = g(z[k]) - g(z[k - 1]);
            prop_assert!((c.ale_y[k] - c.ale_y[k - 1] - want).abs() < 1e-9);
        }
        let iv = compute_intervals(&d, "g", DEFAULT_MAX_BINS).unwrap();
        let c = compute_ale(&p, &d, &iv).unwrap();
        let AleX::Categorical(levels) = &c.ale_x else { unreachable!() };
        for k in 1..levels.len() {
            let l = |s: &str| -> f64 { let v: f64 = s[1..].parse().unwrap(); 3.0 * v * v };
            let want = l(&levels[k]) - l(&levels[0]);
            prop_assert!((c.ale_y[k] - c.ale_y[0] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn intervals_have_no_empty_bins(d in data_strategy(), bins in 1usize..30) {
        for var in ["x", "w"] {
            let iv = compute_intervals(&d, var, bins).unwrap();
            let c = compute_ale(&FnPredictor(additive), &d, &iv).unwrap();
            prop_assert!(c.ale_x.len() <= bins + 1);
            prop_assert_eq!(c.ale_n.iter().sum::<usize>(), d.n_rows());
            prop_assert!(c.ale_n.iter().skip(1).all(|&n| n > 0));
        }
    }

    #[test]
    fn sequential_and_parallel_agree(d in data_strategy(), seed in any::<u64>(), model in any::<bool>()) {
        let trainer: Arc<dyn Trainer> = Arc::new(TreeTrainer { max_depth: 3, min_leaf: 2 });
        let source = if model {
            ModelSource::Trainable(trainer)
        } else {
            ModelSource::Fixed(trainer.fit(&d).unwrap())
        };
        let mode = if model { BootMode::Model } else { BootMode::DataOnly };
        let run = |execution| {
            let cfg = BootConfig { mode, n_it: 12, seed, execution, keep_iterations: true, ..BootConfig::default() };
            bootstrap_ales(&source, &d, &d.predictor_names(), &cfg).unwrap()
        };
        prop_assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }

    #[test]
    fn ols_ignores_row_order(d in data_strategy(), seed in any::<u64>()) {
        let n = d.n_rows();
        let mut order: Vec<usize> = (0..n).collect();
        // a permutation derived from a bootstrap draw's sort order
        let keys = resample_indices(n, seed);
        order.sort_by_key(|&i| (keys[i], i));
        let a = fit_ols(&d, 1e-8).unwrap();
        let b = fit_ols(&d.take_rows(&order), 1e-8).unwrap();
        for col in ["x", "w"] {
            let (ca, cb) = (a.coefficient(col).unwrap(), b.coefficient(col).unwrap());
            prop_assert!((ca - cb).abs() <= 1e-9 * (1.0 + ca.abs()), "{} vs {}", ca, cb);
        }
    }

    #[test]
    fn effect_sizes_are_consistent(values in prop::collection::vec(-100.0f64..100.0, 1..50), weights in prop::collection::vec(0usize..30, 50)) {
        let n = &weights[..values.len()];
        prop_assume!(n.iter().sum::<usize>() > 0);
        let mut y0 = values.clone();
        alestats::ale::zero_center(&mut y0, n);
        let (lo, hi) = aler(&y0).unwrap();
        let d = aled(&y0, n).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(lo <= 1e-9 && hi >= -1e-9);
        prop_assert!(d <= hi.max(-lo) + 1e-9);
    }

    #[test]
    fn normalization_is_monotone_and_bounded(y in prop::collection::vec(-20i32..20, 1..80), mut probes in prop::collection::vec(-30.0f64..30.0, 1..40)) {
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        let norm = EcdfNormalizer::new(&y).unwrap();
        probes.sort_by(f64::total_cmp);
        let out = norm.normalize_all(&probes);
        prop_assert_eq!(norm.normalize(0.0), 0.0);
        for w in out.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        prop_assert!(out.iter().all(|v| (-50.0..=50.0).contains(v)));
    }

    #[test]
    fn p_values_are_proper(reference in prop::collection::vec(-5.0f64..5.0, 1..100), observed in -6.0f64..6.0) {
        let n = reference.len() as f64;
        for tail in [Tail::Upper, Tail::Lower] {
            let p = p_value(&reference, observed, tail);
            prop_assert!(p >= 1.0 / (n + 1.0) && p <= 1.0);
        }
        let top = reference.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        prop_assert_eq!(p_value(&reference, top, Tail::Upper), 1.0 / (n + 1.0));
    }

    #[test]
    fn runs_reconstruct_statuses(raw in prop::collection::vec(0u8..3, 0..60)) {
        let status: Vec<RelativeToMid> = raw.iter().map(|s| match s {
            0 => RelativeToMid::Below,
            1 => RelativeToMid::Overlap,
            _ => RelativeToMid::Above,
        }).collect();
        let rs = runs(&status);
        let mut rebuilt = Vec::new();
        for w in rs.windows(2) {
            prop_assert_eq!(w[0].1, w[1].0);
            prop_assert_ne!(w[0].2, w[1].2);
        }
        for (a, b, s) in rs {
            prop_assert!(a < b);
            rebuilt.extend(std::iter::repeat_n(s, b - a));
        }
        prop_assert_eq!(rebuilt, status);
    }

    #[test]
    fn csv_round_trip(d in data_strategy()) {
        let mut bytes = Vec::new();
        d.write_csv(&mut bytes, true).unwrap();
        let back = parse_csv(&bytes, "y").unwrap();
        prop_assert_eq!(back.predictor_names(), d.predictor_names());
        for name in ["x", "w", "y"] {
            prop_assert_eq!(back.column(name).unwrap().as_numeric(), d.column(name).unwrap().as_numeric());
        }
        let levels = |ds: &Dataset| {
            let c = ds.column("g").unwrap();
            c.codes().unwrap().iter().map(|&k| c.levels().unwrap()[k as usize].clone()).collect::<Vec<_>>()
        };
        prop_assert_eq!(levels(&back), levels(&d));
    }
}

#[test]
fn bootstrap_is_repeatable_per_seed() {
    let d = parse_csv(b"y,x\n1,1\n2,2\n4,3\n3,4\n6,5\n5,6\n", "y").unwrap();
    let source = ModelSource::Trainable(Arc::new(OlsTrainer::default()));
    let cfg = |seed| BootConfig {
        mode: BootMode::Model,
        n_it: 20,
        seed,
        ..BootConfig::default()
    };
    let a = bootstrap_ales(&source, &d, &["x".into()], &cfg(1)).unwrap();
    let b = bootstrap_ales(&source, &d, &["x".into()], &cfg(1)).unwrap();
    let c = bootstrap_ales(&source, &d, &["x".into()], &cfg(2)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].ale_y_lo, c[0].ale_y_lo);
}
