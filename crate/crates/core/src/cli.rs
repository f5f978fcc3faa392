//! End-to-end analysis: load, fit, bootstrap, score, classify, write.

use std::path::PathBuf;
use std::sync::Arc;

use crate::ale::CenterKind;
use crate::bootstrap::{bootstrap_ales, BootConfig, BootMode, ModelSource};
use crate::data::{load_csv, ColumnKind, Dataset};
use crate::error::Error;
use crate::model::{exec_predictor, OlsTrainer, Trainer, TreeTrainer};
use crate::output::{AnalysisResults, BootSummary, Regions, VariableResult};
use crate::par::Execution;
use crate::quantile;
use crate::regions::{regions_categorical, regions_numeric};
use crate::stats::{
    ale_stats, aler_band, random_stat_distributions, AlerBand, EcdfNormalizer, DEFAULT_BAND_LEVEL,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Ols,
    Tree { max_depth: usize, min_leaf: usize },
    Exec(String),
}

impl std::str::FromStr for ModelSpec {
    type Err = String;

    /// `ols`, `tree:<max_depth>,<min_leaf>` or `exec:<command>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "ols" {
            return Ok(ModelSpec::Ols);
        }
        if let Some(rest) = s.strip_prefix("tree:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if let [depth, leaf] = parts.as_slice() {
                let max_depth = depth
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad tree depth '{depth}'"))?;
                let min_leaf: usize = leaf
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad tree min_leaf '{leaf}'"))?;
                if min_leaf == 0 {
                    return Err("tree min_leaf must be at least 1".into());
                }
                return Ok(ModelSpec::Tree {
                    max_depth,
                    min_leaf,
                });
            }
            return Err(format!("expected tree:<max_depth>,<min_leaf>, got '{s}'"));
        }
        if let Some(cmd) = s.strip_prefix("exec:") {
            if cmd.trim().is_empty() {
                return Err("exec model needs a command".into());
            }
            return Ok(ModelSpec::Exec(cmd.to_string()));
        }
        Err(format!(
            "unknown model '{s}' (expected ols, tree:<depth>,<min_leaf> or exec:<command>)"
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub data: PathBuf,
    pub outcome: String,
    pub model: ModelSpec,
    pub boot: BootMode,
    pub n_it: usize,
    pub ci_level: f64,
    /// Number of injected random variables; 0 disables p-values and bands.
    pub rand_it: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Variables to analyse; `None` means every predictor.
    pub variables: Option<Vec<String>>,
    pub plots: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl RunError {
    /// 1 for usage or configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Runtime(_) => 2,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(RunError::Config(format!(
                "--ci-level must lie strictly between 0 and 1, got {}",
                self.ci_level
            )));
        }
        if let ModelSpec::Exec(_) = self.model {
            if self.boot == BootMode::Model {
                return Err(RunError::Config(
                    "external models cannot be retrained; use --boot data or --boot none".into(),
                ));
            }
            if self.rand_it > 0 {
                return Err(RunError::Config(
                    "external models cannot be retrained; random-variable p-values need --rand-it 0"
                        .into(),
                ));
            }
        }
        Ok(())
    }

    fn trainer(&self) -> Option<Arc<dyn Trainer>> {
        match &self.model {
            ModelSpec::Ols => Some(Arc::new(OlsTrainer::default())),
            ModelSpec::Tree {
                max_depth,
                min_leaf,
            } => Some(Arc::new(TreeTrainer {
                max_depth: *max_depth,
                min_leaf: *min_leaf,
            })),
            ModelSpec::Exec(_) => None,
        }
    }
}

fn select_variables(cfg: &AnalysisConfig, d: &Dataset) -> Result<Vec<String>, RunError> {
    match &cfg.variables {
        None => Ok(d.predictor_names()),
        Some(list) => {
            for v in list {
                if v == d.outcome() {
                    return Err(RunError::Config(format!("'{v}' is the outcome")));
                }
                if d.column(v).is_none() {
                    return Err(RunError::Config(format!("no column named '{v}'")));
                }
            }
            Ok(list.clone())
        }
    }
}

/// Runs the whole pipeline on a loaded dataset. `execution` selects the
/// parallel or sequential engine for bootstrap and random-variable loops.
pub fn analyse(
    cfg: &AnalysisConfig,
    d: &Dataset,
    execution: Execution,
) -> Result<AnalysisResults, RunError> {
    cfg.validate()?;
    let variables = select_variables(cfg, d)?;
    let trainer = cfg.trainer();
    let (source, description) = match (&trainer, &cfg.model) {
        (Some(t), _) => (ModelSource::Trainable(t.clone()), t.description()),
        (None, ModelSpec::Exec(cmd)) => (
            ModelSource::Fixed(Arc::new(exec_predictor(cmd.clone()))),
            format!("exec({cmd})"),
        ),
        (None, _) => unreachable!("only exec models lack a trainer"),
    };

    let n_it = if cfg.boot == BootMode::None {
        0
    } else {
        cfg.n_it
    };
    let boot_cfg = BootConfig {
        mode: cfg.boot,
        n_it,
        ci_level: cfg.ci_level,
        seed: cfg.seed,
        center: CenterKind::Median,
        keep_iterations: true,
        execution,
        ..BootConfig::default()
    };
    let curves = bootstrap_ales(&source, d, &variables, &boot_cfg)?;

    let y = d.outcome_values();
    let median = quantile::median(y);
    let (y_min, y_max) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let y_range = y_max - y_min;

    let refs = match (&trainer, cfg.rand_it) {
        (Some(t), r) if r > 0 => {
            // Reference variables use single (unbootstrapped) ALE curves.
            let ref_cfg = BootConfig {
                n_it: 0,
                ..boot_cfg
            };
            Some(random_stat_distributions(
                t.clone(),
                d,
                &ref_cfg,
                r,
                cfg.seed,
                execution,
            )?)
        }
        _ => None,
    };
    let band = match &refs {
        Some(r) => aler_band(r, DEFAULT_BAND_LEVEL, median)?,
        None => {
            log::warn!(
                "no random variables requested (--rand-it 0): p-values are omitted and regions use a zero-width band at the median"
            );
            AlerBand::degenerate(median)
        }
    };

    let norm = EcdfNormalizer::new(y)?;
    let trend_range = if y_range > 0.0 { y_range } else { 1.0 };
    let mut results = Vec::with_capacity(curves.len());
    for mut curve in curves {
        let stats = ale_stats(&curve, &norm, refs.as_ref())?;
        curve.per_iteration = None;
        let column = d.predictor(&curve.variable)?;
        let kind = column.kind;
        let (regions, rug) = if kind == ColumnKind::Numeric {
            (
                Regions::Numeric(regions_numeric(&curve, &band, trend_range)?),
                column.as_numeric().map(<[f64]>::to_vec).unwrap_or_default(),
            )
        } else {
            (
                Regions::Categorical(regions_categorical(&curve, &band)?),
                Vec::new(),
            )
        };
        results.push(VariableResult {
            kind,
            curve,
            stats,
            regions,
            rug,
        });
    }

    Ok(AnalysisResults {
        outcome: d.outcome().to_string(),
        n_rows: d.n_rows(),
        median,
        y_range,
        model: description,
        boot: BootSummary {
            mode: if n_it == 0 {
                BootMode::None.as_str()
            } else {
                cfg.boot.as_str()
            },
            n_it,
            ci_level: cfg.ci_level,
            seed: cfg.seed,
        },
        rand_it: if refs.is_some() { cfg.rand_it } else { 0 },
        band,
        variables: results,
    })
}

/// Loads the data, runs the analysis and writes every output file.
pub fn run_analysis(cfg: &AnalysisConfig) -> Result<AnalysisResults, RunError> {
    cfg.validate()?;
    let d = load_csv(&cfg.data, &cfg.outcome)?;
    let results = analyse(cfg, &d, Execution::Parallel)?;
    crate::output::emit_outputs(&results, &cfg.out_dir, cfg.plots)?;
    Ok(results)
}
