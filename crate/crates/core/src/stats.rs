//! ALE effect sizes and their reference distributions.
//!
//! ALED and ALER work on zero-centred ALE values in outcome units. NALED and
//! NALER first map each value to a signed percentile of the outcome around
//! its median, on a -50..=50 scale. Significance comes from injecting pure
//! noise columns, refitting, and collecting the same statistics for them.

use std::sync::Arc;

use crate::bootstrap::{aggregate, bootstrap_ale, BootAleCurve, BootConfig, ModelSource};
use crate::data::{append_random_column, Dataset};
use crate::error::{Error, Result};
use crate::model::Trainer;
use crate::par::{try_map_indexed, Execution};
use crate::quantile;
use crate::rng::stream_seed;

pub const DEFAULT_BAND_LEVEL: f64 = 0.95;
pub const DEFAULT_OUTER_BAND_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatKind {
    Aled,
    AlerMin,
    AlerMax,
    Naled,
    NalerMin,
    NalerMax,
}

/// Which tail counts as "at least as extreme" for a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Upper,
    Lower,
}

impl StatKind {
    pub const ALL: [StatKind; 6] = [
        StatKind::Aled,
        StatKind::AlerMin,
        StatKind::AlerMax,
        StatKind::Naled,
        StatKind::NalerMin,
        StatKind::NalerMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatKind::Aled => "aled",
            StatKind::AlerMin => "aler_min",
            StatKind::AlerMax => "aler_max",
            StatKind::Naled => "naled",
            StatKind::NalerMin => "naler_min",
            StatKind::NalerMax => "naler_max",
        }
    }

    pub fn tail(self) -> Tail {
        match self {
            StatKind::AlerMin | StatKind::NalerMin => Tail::Lower,
            _ => Tail::Upper,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// ALE range of zero-centred values.
pub fn aler(ale_y0: &[f64]) -> Result<(f64, f64)> {
    if ale_y0.is_empty() {
        return Err(Error::InvalidArgument("ALER of an empty curve".into()));
    }
    let min = ale_y0.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ale_y0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((min, max))
}

/// ALE deviation: `sum |y_i * n_i| / sum n_i`.
pub fn aled(ale_y0: &[f64], ale_n: &[usize]) -> Result<f64> {
    if ale_y0.len() != ale_n.len() {
        return Err(Error::InvalidArgument(format!(
            "ALED: {} values but {} counts",
            ale_y0.len(),
            ale_n.len()
        )));
    }
    let total: usize = ale_n.iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument("ALED: all weights are zero".into()));
    }
    let num: f64 = ale_y0
        .iter()
        .zip(ale_n)
        .map(|(y, &n)| (y * n as f64).abs())
        .sum();
    Ok(num / total as f64)
}

/// Maps zero-centred ALE values onto percentiles of the outcome around its
/// median.
#[derive(Debug, Clone)]
pub struct EcdfNormalizer {
    /// Negated negative centred outcomes, sorted.
    below: Vec<f64>,
    /// Nonnegative centred outcomes, sorted.
    above: Vec<f64>,
    /// Largest negative and smallest positive centred outcome.
    gap: (f64, f64),
    degenerate: bool,
}

impl EcdfNormalizer {
    pub fn new(y: &[f64]) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidArgument("empty outcome vector".into()));
        }
        let median = quantile::median(y);
        let centred: Vec<f64> = y.iter().map(|v| v - median).collect();
        let below = quantile::sorted_copy(
            &centred
                .iter()
                .filter(|&&v| v < 0.0)
                .map(|v| -v)
                .collect::<Vec<_>>(),
        );
        let above = quantile::sorted_copy(
            &centred
                .iter()
                .copied()
                .filter(|&v| v >= 0.0)
                .collect::<Vec<_>>(),
        );
        let max_negative = centred
            .iter()
            .copied()
            .filter(|&v| v < 0.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let min_positive = centred
            .iter()
            .copied()
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            degenerate: centred.iter().all(|&v| v == 0.0),
            below,
            above,
            gap: (max_negative, min_positive),
        })
    }

    pub fn normalize(&self, v: f64) -> f64 {
        if self.degenerate || v == 0.0 || (self.gap.0 < v && v < self.gap.1) {
            return 0.0;
        }
        if v < 0.0 {
            let count = self.below.partition_point(|&t| t <= -v);
            -50.0 * count as f64 / self.below.len() as f64
        } else {
            let count = self.above.partition_point(|&t| t <= v);
            50.0 * count as f64 / self.above.len() as f64
        }
    }

    pub fn normalize_all(&self, ale_y0: &[f64]) -> Vec<f64> {
        ale_y0.iter().map(|&v| self.normalize(v)).collect()
    }
}

pub fn normalize_ale_y(y: &[f64], ale_y0: &[f64]) -> Result<Vec<f64>> {
    Ok(EcdfNormalizer::new(y)?.normalize_all(ale_y0))
}

pub fn naler(y: &[f64], ale_y0: &[f64]) -> Result<(f64, f64)> {
    aler(&normalize_ale_y(y, ale_y0)?)
}

pub fn naled(y: &[f64], ale_y0: &[f64], ale_n: &[usize]) -> Result<f64> {
    aled(&normalize_ale_y(y, ale_y0)?, ale_n)
}

/// All six statistics of one zero-centred curve, indexed by [`StatKind`].
pub fn curve_statistics(
    norm: &EcdfNormalizer,
    ale_y0: &[f64],
    ale_n: &[usize],
) -> Result<[f64; 6]> {
    let (amin, amax) = aler(ale_y0)?;
    let normalized = norm.normalize_all(ale_y0);
    let (nmin, nmax) = aler(&normalized)?;
    Ok([
        aled(ale_y0, ale_n)?,
        amin,
        amax,
        aled(&normalized, ale_n)?,
        nmin,
        nmax,
    ])
}

/// Empirical p-value with the +1 finite-sample correction.
pub fn p_value(reference: &[f64], observed: f64, tail: Tail) -> f64 {
    let extreme = match tail {
        Tail::Upper => reference.iter().filter(|&&r| r >= observed).count(),
        Tail::Lower => reference.iter().filter(|&&r| r <= observed).count(),
    };
    (extreme + 1) as f64 / (reference.len() + 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatSummary {
    pub estimate: f64,
    pub p_value: Option<f64>,
    pub conf_low: f64,
    pub median: f64,
    pub mean: f64,
    pub conf_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AleStats {
    pub variable: String,
    values: [StatSummary; 6],
}

impl AleStats {
    pub fn get(&self, kind: StatKind) -> &StatSummary {
        &self.values[kind.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (StatKind, &StatSummary)> {
        StatKind::ALL.iter().map(move |&k| (k, self.get(k)))
    }
}

/// Statistics of a bootstrapped curve: computed per iteration, summarised by
/// mean (the estimate) and type-7 percentile interval. Without iterations the
/// full-data curve is the only sample.
pub fn ale_stats(
    curve: &BootAleCurve,
    norm: &EcdfNormalizer,
    refs: Option<&RandomRefDistributions>,
) -> Result<AleStats> {
    let samples: Vec<[f64; 6]> = match &curve.per_iteration {
        Some(rows) if !rows.is_empty() => rows
            .iter()
            .map(|row| curve_statistics(norm, row, &curve.ale_n))
            .collect::<Result<_>>()?,
        _ => vec![curve_statistics(
            norm,
            &curve.zero_centered(),
            &curve.ale_n,
        )?],
    };
    let mut values = [StatSummary {
        estimate: 0.0,
        p_value: None,
        conf_low: 0.0,
        median: 0.0,
        mean: 0.0,
        conf_high: 0.0,
    }; 6];
    for kind in StatKind::ALL {
        let column: Vec<f64> = samples.iter().map(|s| s[kind.index()]).collect();
        let a = aggregate(&column, curve.ci_level)?;
        values[kind.index()] = StatSummary {
            estimate: a.mean,
            p_value: refs.map(|r| p_value(r.get(kind), a.mean, kind.tail())),
            conf_low: a.lo,
            median: a.median,
            mean: a.mean,
            conf_high: a.hi,
        };
    }
    Ok(AleStats {
        variable: curve.variable.clone(),
        values,
    })
}

/// Sorted statistic values of injected pure-noise variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomRefDistributions {
    pub n_rand: usize,
    pub seed: u64,
    values: [Vec<f64>; 6],
}

impl RandomRefDistributions {
    pub fn get(&self, kind: StatKind) -> &[f64] {
        &self.values[kind.index()]
    }

    /// Builds distributions from unsorted per-variable statistic rows.
    pub fn from_samples(samples: &[[f64; 6]], seed: u64) -> Self {
        let values = std::array::from_fn(|k| {
            quantile::sorted_copy(&samples.iter().map(|s| s[k]).collect::<Vec<_>>())
        });
        Self {
            n_rand: samples.len(),
            seed,
            values,
        }
    }
}

fn random_column_name(d: &Dataset) -> String {
    let mut name = String::from("rand_ref");
    while d.column(&name).is_some() {
        name.push('_');
    }
    name
}

/// For each `r` in `0..n_rand`: append a standard-normal column seeded from
/// `stream_seed(seed, r)`, refit the trainer, bootstrap the new column's ALE
/// under `boot` and record its six statistic estimates.
pub fn random_stat_distributions(
    trainer: Arc<dyn Trainer>,
    d: &Dataset,
    boot: &BootConfig,
    n_rand: usize,
    seed: u64,
    execution: Execution,
) -> Result<RandomRefDistributions> {
    if n_rand == 0 {
        return Err(Error::InvalidArgument(
            "need at least one random variable".into(),
        ));
    }
    let norm = EcdfNormalizer::new(d.outcome_values())?;
    let name = random_column_name(d);
    let exec = execution.honoring(trainer.concurrency());
    let source = ModelSource::Trainable(trainer);
    let samples = try_map_indexed(n_rand, exec, |r| {
        let seed_r = stream_seed(seed, r as u64);
        let run = || -> Result<[f64; 6]> {
            let augmented = append_random_column(d, &name, seed_r)?;
            let cfg = BootConfig {
                seed: seed_r,
                keep_iterations: true,
                execution: Execution::Sequential,
                ..*boot
            };
            let curve = bootstrap_ale(&source, &augmented, &name, &cfg)?;
            let stats = ale_stats(&curve, &norm, None)?;
            Ok(StatKind::ALL.map(|k| stats.get(k).estimate))
        };
        run().map_err(|e| Error::RandomVariable {
            index: r,
            source: Box::new(e),
        })
    })?;
    Ok(RandomRefDistributions::from_samples(&samples, seed))
}

/// Range around the outcome median that holds the ALE excursions of most
/// pure-noise variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlerBand {
    pub lower: f64,
    pub upper: f64,
    pub outer_lower: f64,
    pub outer_upper: f64,
    pub center: f64,
    pub level: f64,
    pub outer_level: f64,
}

impl AlerBand {
    /// Zero-width band at `center`, used when no reference distribution is
    /// available.
    pub fn degenerate(center: f64) -> Self {
        Self {
            lower: center,
            upper: center,
            outer_lower: center,
            outer_upper: center,
            center,
            level: DEFAULT_BAND_LEVEL,
            outer_level: DEFAULT_OUTER_BAND_LEVEL,
        }
    }
}

pub fn aler_band(refs: &RandomRefDistributions, level: f64, center: f64) -> Result<AlerBand> {
    aler_band_with_outer(refs, level, DEFAULT_OUTER_BAND_LEVEL.max(level), center)
}

pub fn aler_band_with_outer(
    refs: &RandomRefDistributions,
    level: f64,
    outer_level: f64,
    center: f64,
) -> Result<AlerBand> {
    for l in [level, outer_level] {
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "band level must lie strictly between 0 and 1, got {l}"
            )));
        }
    }
    if outer_level < level {
        return Err(Error::InvalidArgument(
            "outer band level must be at least the inner level".into(),
        ));
    }
    let mins = refs.get(StatKind::AlerMin);
    let maxs = refs.get(StatKind::AlerMax);
    if mins.is_empty() || maxs.is_empty() {
        return Err(Error::InvalidArgument(
            "empty reference distribution".into(),
        ));
    }
    Ok(AlerBand {
        lower: center + quantile::type7_sorted(mins, 1.0 - level),
        upper: center + quantile::type7_sorted(maxs, level),
        outer_lower: center + quantile::type7_sorted(mins, 1.0 - outer_level),
        outer_upper: center + quantile::type7_sorted(maxs, outer_level),
        center,
        level,
        outer_level,
    })
}
