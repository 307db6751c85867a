//! Decay-rate algebra: rate functions, shell-integral kernels, the
//! self-improving iteration bounds, scenario classification, envelope
//! prediction, log-log fitting, and envelope checking.

mod classify;
mod fit;
mod iterate;
mod rate;

use crate::levysim::LevySimError;
use thiserror::Error;

pub use classify::{envelope_predict, scenario_classify, SolutionTraits};
pub use fit::{
    check_envelope, fit_decay, DecayFit, EnvelopeCheck, FitModel, FitParam, SideCheck,
    DEFAULT_ENVELOPE_BAND,
};
pub use iterate::{
    kernel_and_shell_mass, lower_iteration, lower_iteration_limit, upper_iteration,
    upper_iteration_limit,
};
pub use rate::{
    EnvelopePrediction, EnvelopeSide, FreeExponent, FreeSlot, RateForm, RateFunction, Scenario,
    Sign,
};

#[derive(Debug, Error)]
pub enum DecayLabError {
    #[error("{0}")]
    Domain(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("samples contain a nonpositive or non-finite value at r = {r}")]
    NonPositive { r: f64 },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("samples span {got:.2} decades of radius, need at least {need:.0}")]
    InsufficientRange { got: f64, need: f64 },
    #[error("design matrix is numerically singular")]
    IllConditioned,
    #[error(transparent)]
    Process(#[from] LevySimError),
}
