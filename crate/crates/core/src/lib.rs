//! Numerical laboratory for zero-energy eigenpairs of fractional Schrödinger
//! operators `(-Δ)^{α/2} + V` on `R^d`, `d ≤ 3`.
//!
//! The crate provides five cooperating toolkits:
//!
//! * [`specfun`] — log-gamma, digamma and the regularized Gauss
//!   hypergeometric function on the negative real axis.
//! * [`eigenpair`] — the explicit zero-energy eigenfunction/potential family
//!   `φ(x) = P(x) (1+|x|²)^{-κ}` with its decay classification.
//! * [`fraclap`] — pointwise fractional-Laplacian quadrature and eigenpair
//!   residuals.
//! * [`levysim`] — exact-increment Monte Carlo for isotropic stable and
//!   layered jump processes: exit times, survival, Feynman–Kac functionals,
//!   discounted lifetimes, and exit-law goodness of fit.
//! * [`decaylab`] — decay-rate algebra: iteration bounds, scenario
//!   classification, envelope prediction, log-log fitting and envelope
//!   checks.
//!
//! [`verify`] wires the pieces into the self-contained verification suite
//! used by the CLI and the acceptance tests.

// Guards on user-supplied floats are written `!(a > b)` rather than `a <= b`
// so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decaylab;
pub mod eigenpair;
pub mod fraclap;
pub mod levysim;
pub mod potential;
pub mod specfun;
pub mod verify;

mod quad;

pub use eigenpair::{DecayClass, EigenpairSpec};
pub use fraclap::{QuadConfig, ResidualReport, ScalarField};
pub use levysim::{MCEstimate, PathConfig, ProcessSpec};
pub use potential::PotentialModel;
pub use verify::{run_criterion, run_suite, Suite, SuiteReport, VerifyOptions};
