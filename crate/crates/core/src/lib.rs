//! Accumulated local effects (ALE) for black-box regression models, with
//! bootstrap confidence intervals, ALE effect-size statistics, random-variable
//! reference distributions and confidence-region tables.

pub mod ale;
pub mod bootstrap;
pub mod cli;
pub mod data;
pub mod error;
pub mod model;
pub mod output;
pub mod par;
pub mod plot;
pub mod quantile;
pub mod regions;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
