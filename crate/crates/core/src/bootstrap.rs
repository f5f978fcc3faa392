//! Bootstrapped ALE curves.
//!
//! Intervals come from the full dataset once and are reused for every
//! iteration. Iteration `i` draws its resample from `stream_seed(seed, i)`.
//! Data-only bootstrap scores each resample with one fixed model; model
//! bootstrap refits the trainer on each resample first.

use std::sync::Arc;

use crate::ale::{self, AleCurve, AleIntervals, AleX, CenterKind, DEFAULT_MAX_BINS};
use crate::data::{resample_indices, Dataset};
use crate::error::{Error, Result};
use crate::model::{Concurrency, Predictor, Trainer};
use crate::par::{try_map_indexed, Execution};
use crate::quantile;
use crate::rng::stream_seed;

pub const DEFAULT_ITERATIONS: usize = 100;
pub const DEFAULT_CI_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootMode {
    None,
    DataOnly,
    Model,
}

impl BootMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BootMode::None => "none",
            BootMode::DataOnly => "data",
            BootMode::Model => "model",
        }
    }
}

/// Where predictions come from: a fixed model, or a trainer that can be
/// refit on resamples.
#[derive(Clone)]
pub enum ModelSource {
    Fixed(Arc<dyn Predictor>),
    Trainable(Arc<dyn Trainer>),
}

impl ModelSource {
    fn concurrency(&self) -> Concurrency {
        match self {
            ModelSource::Fixed(p) => p.concurrency(),
            ModelSource::Trainable(t) => t.concurrency(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BootConfig {
    pub mode: BootMode,
    pub n_it: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub center: CenterKind,
    pub max_bins: usize,
    /// Keep the per-iteration matrix (needed for statistics).
    pub keep_iterations: bool,
    pub execution: Execution,
}

impl Default for BootConfig {
    fn default() -> Self {
        Self {
            mode: BootMode::DataOnly,
            n_it: DEFAULT_ITERATIONS,
            ci_level: DEFAULT_CI_LEVEL,
            seed: 0,
            center: CenterKind::Median,
            max_bins: DEFAULT_MAX_BINS,
            keep_iterations: false,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub median: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Mean, median and the two-sided percentile interval (type-7) of `values`.
pub fn aggregate(values: &[f64], ci_level: f64) -> Result<Aggregate> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot aggregate an empty sample".into(),
        ));
    }
    check_ci_level(ci_level)?;
    let sorted = quantile::sorted_copy(values);
    let tail = (1.0 - ci_level) / 2.0;
    Ok(Aggregate {
        mean: quantile::mean(values),
        median: quantile::type7_sorted(&sorted, 0.5),
        lo: quantile::type7_sorted(&sorted, tail),
        hi: quantile::type7_sorted(&sorted, 1.0 - tail),
    })
}

fn check_ci_level(ci_level: f64) -> Result<()> {
    if ci_level > 0.0 && ci_level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "confidence level must lie strictly between 0 and 1, got {ci_level}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootAleCurve {
    pub variable: String,
    pub ale_x: AleX,
    /// Row counts on the full dataset.
    pub ale_n: Vec<usize>,
    /// Single ALE on the full data, display scale.
    pub ale_y: Vec<f64>,
    pub ale_y_mean: Vec<f64>,
    pub ale_y_median: Vec<f64>,
    pub ale_y_lo: Vec<f64>,
    pub ale_y_hi: Vec<f64>,
    pub center_kind: CenterKind,
    pub center_value: f64,
    pub ci_level: f64,
    pub n_it: usize,
    pub mode: BootMode,
    /// Zero-centred curve of each iteration, `n_it` rows of `ale_x.len()`.
    pub per_iteration: Option<Vec<Vec<f64>>>,
}

impl BootAleCurve {
    /// Full-data ALE without the display constant.
    pub fn zero_centered(&self) -> Vec<f64> {
        self.ale_y.iter().map(|v| v - self.center_value).collect()
    }

    /// The bootstrap mean as a plain curve (display scale).
    pub fn mean_curve(&self) -> AleCurve {
        AleCurve {
            variable: self.variable.clone(),
            ale_x: self.ale_x.clone(),
            ale_n: self.ale_n.clone(),
            ale_y: self.ale_y_mean.clone(),
            center_kind: self.center_kind,
            center_value: self.center_value,
        }
    }

    /// The full-data curve (display scale).
    pub fn single_curve(&self) -> AleCurve {
        AleCurve {
            ale_y: self.ale_y.clone(),
            ..self.mean_curve()
        }
    }

    fn from_single(curve: &AleCurve, cfg: &BootConfig, mode: BootMode) -> Self {
        Self {
            variable: curve.variable.clone(),
            ale_x: curve.ale_x.clone(),
            ale_n: curve.ale_n.clone(),
            ale_y: curve.ale_y.clone(),
            ale_y_mean: curve.ale_y.clone(),
            ale_y_median: curve.ale_y.clone(),
            ale_y_lo: curve.ale_y.clone(),
            ale_y_hi: curve.ale_y.clone(),
            center_kind: curve.center_kind,
            center_value: curve.center_value,
            ci_level: cfg.ci_level,
            n_it: 0,
            mode,
            per_iteration: None,
        }
    }
}

/// Bootstraps ALE curves for several variables at once. Every variable sees
/// the same resamples (and, for model bootstrap, the same refits).
pub fn bootstrap_ales(
    source: &ModelSource,
    d: &Dataset,
    variables: &[String],
    cfg: &BootConfig,
) -> Result<Vec<BootAleCurve>> {
    check_ci_level(cfg.ci_level)?;
    let intervals = variables
        .iter()
        .map(|v| ale::compute_intervals(d, v, cfg.max_bins))
        .collect::<Result<Vec<AleIntervals>>>()?;

    let full_model: Arc<dyn Predictor> = match source {
        ModelSource::Fixed(p) => p.clone(),
        ModelSource::Trainable(t) => t.fit(d)?,
    };
    let display = ale::center_value(d, cfg.center);
    let full_curves = intervals
        .iter()
        .map(|iv| {
            ale::compute_ale(full_model.as_ref(), d, iv).map(|c| ale::center(&c, d, cfg.center))
        })
        .collect::<Result<Vec<AleCurve>>>()?;

    let mode = if cfg.n_it == 0 {
        BootMode::None
    } else {
        cfg.mode
    };
    if mode == BootMode::None {
        return Ok(full_curves
            .iter()
            .map(|c| BootAleCurve::from_single(c, cfg, BootMode::None))
            .collect());
    }
    let trainer = match (mode, source) {
        (BootMode::Model, ModelSource::Trainable(t)) => Some(t.clone()),
        (BootMode::Model, ModelSource::Fixed(_)) => {
            return Err(Error::InvalidArgument(
                "model bootstrap needs a trainer, not a fixed predictor".into(),
            ))
        }
        _ => None,
    };
    let exec = cfg
        .execution
        .honoring(source.concurrency())
        .honoring(full_model.concurrency());

    // iterations[i][v] = zero-centred curve of variable v in iteration i
    let iterations: Vec<Vec<Vec<f64>>> = try_map_indexed(cfg.n_it, exec, |i| {
        run_iteration(
            i,
            d,
            &intervals,
            &full_curves,
            &full_model,
            trainer.as_deref(),
            cfg,
        )
        .map_err(|e| Error::Iteration {
            iteration: i,
            source: Box::new(e),
        })
    })?;

    let mut out = Vec::with_capacity(variables.len());
    for (v, full) in full_curves.iter().enumerate() {
        let width = full.ale_x.len();
        let matrix: Vec<Vec<f64>> = iterations.iter().map(|it| it[v].clone()).collect();
        let mut agg = BootAleCurve::from_single(full, cfg, mode);
        agg.n_it = cfg.n_it;
        for j in 0..width {
            let column: Vec<f64> = matrix.iter().map(|row| row[j]).collect();
            let a = aggregate(&column, cfg.ci_level)?;
            agg.ale_y_mean[j] = a.mean + display;
            agg.ale_y_median[j] = a.median + display;
            agg.ale_y_lo[j] = a.lo + display;
            agg.ale_y_hi[j] = a.hi + display;
        }
        if cfg.keep_iterations {
            agg.per_iteration = Some(matrix);
        }
        out.push(agg);
    }
    Ok(out)
}

fn run_iteration(
    i: usize,
    d: &Dataset,
    intervals: &[AleIntervals],
    full_curves: &[AleCurve],
    full_model: &Arc<dyn Predictor>,
    trainer: Option<&dyn Trainer>,
    cfg: &BootConfig,
) -> Result<Vec<Vec<f64>>> {
    let rows = resample_indices(d.n_rows(), stream_seed(cfg.seed, i as u64));
    let sample = d.take_rows(&rows);
    let model = match trainer {
        Some(t) => t.fit(&sample)?,
        None => full_model.clone(),
    };
    intervals
        .iter()
        .zip(full_curves)
        .map(|(iv, full)| {
            let curve = ale::compute_ale(model.as_ref(), &sample, iv)?;
            let mut y = curve.ale_y;
            // Centre on the full-data weights so iterations are comparable
            // entrywise and their mean stays zero-centred.
            ale::zero_center(&mut y, &full.ale_n);
            Ok(y)
        })
        .collect()
}

/// Single-variable form of [`bootstrap_ales`].
pub fn bootstrap_ale(
    source: &ModelSource,
    d: &Dataset,
    variable: &str,
    cfg: &BootConfig,
) -> Result<BootAleCurve> {
    let mut curves = bootstrap_ales(source, d, &[variable.to_string()], cfg)?;
    Ok(curves.remove(0))
}
