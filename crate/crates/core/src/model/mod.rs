//! The black-box boundary. The ALE engine only ever sees [`Predictor`] and
//! [`Trainer`]; built-in models and the external-process adapter live behind
//! them.

use std::sync::Arc;

use crate::data::Dataset;
use crate::error::{Error, Result};

mod exec;
mod ols;
mod tree;

pub use exec::{exec_predictor, ExecPredictor};
pub use ols::{fit_ols, OlsModel, OlsTrainer, DEFAULT_RIDGE_EPSILON};
pub use tree::{fit_tree, TreeModel, TreeTrainer};

/// Whether a model may be called from several threads at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Concurrency {
    ParallelSafe,
    SerialOnly,
}

pub trait Predictor: Send + Sync {
    /// One prediction per row of `data`. Only predictor columns are read;
    /// the outcome column is ignored.
    fn predict(&self, data: &Dataset) -> Result<Vec<f64>>;

    fn concurrency(&self) -> Concurrency {
        Concurrency::ParallelSafe
    }
}

pub trait Trainer: Send + Sync {
    fn fit(&self, data: &Dataset) -> Result<Arc<dyn Predictor>>;

    fn description(&self) -> String;

    fn concurrency(&self) -> Concurrency {
        Concurrency::ParallelSafe
    }
}

/// Calls `p` and enforces the output contract: one finite value per row.
pub fn predict_checked(p: &dyn Predictor, data: &Dataset) -> Result<Vec<f64>> {
    let out = p.predict(data)?;
    if out.len() != data.n_rows() {
        return Err(Error::Model(format!(
            "predictor returned {} values for {} rows",
            out.len(),
            data.n_rows()
        )));
    }
    if let Some(i) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::Model(format!(
            "non-finite prediction at row {}",
            i + 1
        )));
    }
    Ok(out)
}

/// Adapts a closure into a [`Predictor`].
pub struct FnPredictor<F>(pub F);

impl<F> Predictor for FnPredictor<F>
where
    F: Fn(&Dataset) -> Result<Vec<f64>> + Send + Sync,
{
    fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        (self.0)(data)
    }
}

/// Adapts a closure into a [`Trainer`].
pub struct FnTrainer<F> {
    pub fit: F,
    pub description: String,
}

impl<F> Trainer for FnTrainer<F>
where
    F: Fn(&Dataset) -> Result<Arc<dyn Predictor>> + Send + Sync,
{
    fn fit(&self, data: &Dataset) -> Result<Arc<dyn Predictor>> {
        (self.fit)(data)
    }

    fn description(&self) -> String {
        self.description.clone()
    }
}

/// Predicts the same value for every row.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPredictor(pub f64);

impl Predictor for ConstantPredictor {
    fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        Ok(vec![self.0; data.n_rows()])
    }
}
