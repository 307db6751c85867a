//! Monte Carlo laboratory for rotationally symmetric jump processes:
//! isotropic α-stable and layered (α,γ)-stable paths, their ball exit
//! times, survival probabilities, Feynman–Kac functionals, discounted
//! mean lifetimes, and an exit-law goodness-of-fit check.
//!
//! Increments are sampled exactly in law (Chambers–Mallows–Stuck in one
//! dimension, Gaussian subordination above it), so the only systematic
//! errors are the exit-detection grid `dt` and, for the layered family,
//! the Gaussian small-jump approximation. Every estimator draws its
//! randomness from counter-based per-path streams keyed by
//! `(seed, path index)` and reduces with a fixed-shape pairwise sum, so
//! results are bit-for-bit reproducible for a given seed no matter how
//! many worker threads run the paths.

mod exit;
mod fk;
mod rng;
mod sampler;

pub use exit::{
    exit_law_check, exit_radius_cdf, exit_time, expected_exit_time, extrapolate_dt, mean_exit_time,
    survival_prob, Ball, ExitLawReport, ExitSample, ExitTimeReport,
};
pub use fk::{fk_functional, lifetime_lambda, Domain, FkReport, CENSOR_RELIABLE_MAX};
pub use sampler::sample_increment;

pub(crate) use rng::path_rng;
pub(crate) use sampler::IncrementSampler;

use crate::quad::{self, GaussLegendre};
use crate::specfun::SpecFunError;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevySimError {
    #[error("invalid process: {0}")]
    Process(String),
    #[error("invalid path configuration: {0}")]
    Config(String),
    #[error("invalid domain or start point: {0}")]
    Domain(String),
    #[error(transparent)]
    Potential(#[from] SpecFunError),
}

/// Jump-kernel family of the simulated process.
///
/// Both kernels share the isotropic stable normalization `C(d,α)` so that
/// the layered density is continuous at `|z| = 1`:
/// `ν(z) = C(d,α) |z|^{-d-α}` everywhere for the stable family, and
/// `ν(z) = C(d,α) (|z|^{-d-α} 𝟙_{|z|≤1} + |z|^{-d-γ} 𝟙_{|z|>1})` for the
/// layered one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProcessFamily {
    IsotropicStable {
        alpha: f64,
    },
    LayeredStable {
        alpha: f64,
        gamma: f64,
        /// Jumps below this radius are folded into a variance-matched
        /// Gaussian component instead of being sampled individually.
        #[serde(default = "default_small_jump_cutoff")]
        small_jump_cutoff: f64,
    },
}

fn default_small_jump_cutoff() -> f64 {
    1e-3
}

/// A process family together with its state-space dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(flatten)]
    pub family: ProcessFamily,
    pub d: usize,
}

impl ProcessSpec {
    pub fn isotropic_stable(d: usize, alpha: f64) -> Result<Self, LevySimError> {
        let spec = ProcessSpec {
            family: ProcessFamily::IsotropicStable { alpha },
            d,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn layered_stable(d: usize, alpha: f64, gamma: f64) -> Result<Self, LevySimError> {
        let spec = ProcessSpec {
            family: ProcessFamily::LayeredStable {
                alpha,
                gamma,
                small_jump_cutoff: default_small_jump_cutoff(),
            },
            d,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LevySimError> {
        if !(1..=3).contains(&self.d) {
            return Err(LevySimError::Process(format!(
                "dimension must be 1..=3, got {}",
                self.d
            )));
        }
        match self.family {
            ProcessFamily::IsotropicStable { alpha } => {
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(LevySimError::Process(format!(
                        "stability index must lie in (0, 2), got {alpha}"
                    )));
                }
            }
            ProcessFamily::LayeredStable {
                alpha,
                gamma,
                small_jump_cutoff,
            } => {
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(LevySimError::Process(format!(
                        "stability index must lie in (0, 2), got {alpha}"
                    )));
                }
                if !(gamma > 2.0) {
                    return Err(LevySimError::Process(format!(
                        "layered tail exponent must exceed 2, got {gamma}"
                    )));
                }
                if !(small_jump_cutoff > 0.0 && small_jump_cutoff < 1.0) {
                    return Err(LevySimError::Process(format!(
                        "small-jump cutoff must lie in (0, 1), got {small_jump_cutoff}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Local stability index (exponent of the small-jump kernel).
    pub fn alpha(&self) -> f64 {
        match self.family {
            ProcessFamily::IsotropicStable { alpha }
            | ProcessFamily::LayeredStable { alpha, .. } => alpha,
        }
    }

    /// The kernel normalization shared by both families.
    pub fn levy_constant(&self) -> f64 {
        crate::fraclap::stable_levy_constant(self.d, self.alpha())
    }

    /// Maximal symbol model `Ψ(r)`.
    ///
    /// Isotropic stable: exactly `r^α`. Layered: the model surrogate
    /// `min(r², r^α)`, which is exactly `r²` on `(0, 1]` (the
    /// finite-variance regime) and crosses over continuously to the
    /// stable growth `r^α` above 1.
    pub fn symbol_psi(&self, r: f64) -> f64 {
        match self.family {
            ProcessFamily::IsotropicStable { alpha } => r.powf(alpha),
            ProcessFamily::LayeredStable { alpha, .. } => (r * r).min(r.powf(alpha)),
        }
    }

    /// `Ψ(r) = sup_{|ξ| ≤ r} ψ(ξ)`; both model symbols are nondecreasing,
    /// so this coincides with [`symbol_psi`](Self::symbol_psi).
    pub fn maximal_symbol(&self, r: f64) -> f64 {
        self.symbol_psi(r)
    }

    /// Pruitt's concentration function
    /// `H(r) = ∫ (1 ∧ |z|²/r²) ν(dz)`
    /// (there is no Gaussian part, so the `‖A‖/r²` term vanishes),
    /// evaluated by quadrature of the radial profile with analytic
    /// continuation of the exact power behaviour at both ends.
    pub fn pruitt_h(&self, r: f64) -> Result<f64, LevySimError> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(LevySimError::Domain(format!(
                "Pruitt function needs a positive finite radius, got {r}"
            )));
        }
        self.validate()?;
        let c = self.levy_constant();
        let surf = match self.d {
            1 => 2.0,
            2 => 2.0 * std::f64::consts::PI,
            _ => 4.0 * std::f64::consts::PI,
        };
        let alpha = self.alpha();
        // radial density n(s) with ν(dz) = n(|z|) |S^{d-1}| s^{d-1} ds dσ
        let outer_exponent = match self.family {
            ProcessFamily::IsotropicStable { alpha } => alpha,
            ProcessFamily::LayeredStable { gamma, .. } => gamma,
        };
        let radial = |s: f64| -> f64 {
            match self.family {
                ProcessFamily::IsotropicStable { alpha } => s.powf(-1.0 - alpha),
                ProcessFamily::LayeredStable { alpha, gamma, .. } => {
                    if s <= 1.0 {
                        s.powf(-1.0 - alpha)
                    } else {
                        s.powf(-1.0 - gamma)
                    }
                }
            }
        };
        // below lo both kernels are the pure α power and the cap is s²/r²
        let lo = 1e-9 * r.min(1.0);
        let head = lo.powf(2.0 - alpha) / ((2.0 - alpha) * r * r);
        // beyond hi the cap is 1 and the kernel is the pure outer power
        let hi = r.max(1.0);
        let tail = hi.powf(-outer_exponent) / outer_exponent;
        // middle: log-space Gauss–Legendre between the kernel/cap breaks
        let rule = GaussLegendre::new(16);
        let mut cut: Vec<f64> = vec![lo.ln(), hi.ln()];
        for b in [r, 1.0] {
            if b > lo && b < hi {
                cut.push(b.ln());
            }
        }
        cut.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cut.dedup();
        let mut middle = 0.0;
        for seg in cut.windows(2) {
            let panels = ((seg[1] - seg[0]) / std::f64::consts::LN_10).ceil() as usize;
            middle += quad::integrate_panels(
                &rule,
                &quad::uniform_breaks(seg[0], seg[1], panels.max(1)),
                |u| {
                    let s = u.exp();
                    let cap = (s * s / (r * r)).min(1.0);
                    // radial(s) is the full s-density C⁻¹ n(s) s^{d-1};
                    // the trailing s is the Jacobian of u = ln s
                    cap * radial(s) * s
                },
            );
        }
        Ok(c * surf * (head + middle + tail))
    }
}

/// Resolution and reproducibility knobs for path estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathConfig {
    /// Exit-detection time step.
    pub dt: f64,
    /// Hard time cap per path; paths still alive are reported censored.
    pub horizon: f64,
    /// Master seed; each path derives its own stream from `(seed, index)`.
    pub seed: u64,
    pub n_paths: usize,
    /// Worker threads; the result is identical for any value.
    pub workers: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            dt: 1e-3,
            horizon: 1e4,
            seed: 0x5EED,
            n_paths: 10_000,
            workers: 1,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<(), LevySimError> {
        if !(self.dt > 0.0 && self.horizon > 0.0 && self.dt <= self.horizon) {
            return Err(LevySimError::Config(format!(
                "need 0 < dt ≤ horizon, got dt = {} and horizon = {}",
                self.dt, self.horizon
            )));
        }
        if self.n_paths == 0 || self.workers == 0 {
            return Err(LevySimError::Config(format!(
                "n_paths and workers must be ≥ 1, got {} and {}",
                self.n_paths, self.workers
            )));
        }
        Ok(())
    }
}

/// A Monte Carlo point estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
}

/// Fixed-shape pairwise summation: deterministic for a given slice and
/// accurate to `O(log n)` rounding errors.
pub(crate) fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        2 => x[0] + x[1],
        n => {
            let (a, b) = x.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Mean and standard error of a path-sample vector (two-pass, pairwise).
pub(crate) fn estimate_from_samples(samples: &[f64], seed: u64) -> MCEstimate {
    let n = samples.len();
    let mean = pairwise_sum(samples) / n as f64;
    let std_error = if n > 1 {
        let sq: Vec<f64> = samples.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&sq) / ((n - 1) as f64 * n as f64)).sqrt()
    } else {
        0.0
    };
    MCEstimate {
        mean,
        std_error,
        n,
        seed,
    }
}

/// Runs one closure per path on a dedicated worker pool, each path with
/// its own derived stream, collecting results in path order (so the
/// outcome does not depend on scheduling).
pub(crate) fn run_paths<T, F>(cfg: &PathConfig, f: F) -> Result<Vec<T>, LevySimError>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| LevySimError::Config(e.to_string()))?;
    Ok(pool.install(|| {
        (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = path_rng(cfg.seed, i);
                f(i, &mut rng)
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_values_and_doubling() {
        let iso = ProcessSpec::isotropic_stable(1, 1.5).unwrap();
        assert_eq!(iso.symbol_psi(2.0), 2.0_f64.powf(1.5));
        let lay = ProcessSpec::layered_stable(2, 1.2, 3.5).unwrap();
        assert_eq!(lay.symbol_psi(0.5), 0.25);
        assert_eq!(lay.symbol_psi(4.0), 4.0_f64.powf(1.2));
        for proc in [iso, lay] {
            for r in [0.01, 0.3, 1.0, 7.0, 100.0] {
                let ratio = proc.maximal_symbol(2.0 * r) / proc.maximal_symbol(r);
                assert!(ratio <= 4.0 + 1e-12, "doubling ratio {ratio} at r = {r}");
            }
        }
    }

    #[test]
    fn pruitt_matches_stable_closed_form() {
        // for the pure stable kernel, H(r) = C |S^{d-1}| r^{-α} (1/(2-α) + 1/α)
        for d in 1..=3 {
            let alpha = 0.8;
            let proc = ProcessSpec::isotropic_stable(d, alpha).unwrap();
            let surf = match d {
                1 => 2.0,
                2 => 2.0 * std::f64::consts::PI,
                _ => 4.0 * std::f64::consts::PI,
            };
            for r in [0.01_f64, 1.0, 30.0] {
                let want = proc.levy_constant()
                    * surf
                    * r.powf(-alpha)
                    * (1.0 / (2.0 - alpha) + 1.0 / alpha);
                let got = proc.pruitt_h(r).unwrap();
                assert!(
                    ((got - want) / want).abs() < 1e-8,
                    "d = {d}, r = {r}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn pruitt_sandwiches_the_symbol() {
        // C1 H(1/r) ≤ Ψ(r) ≤ C2 H(1/r) with bounded recorded constants
        for proc in [
            ProcessSpec::isotropic_stable(1, 0.5).unwrap(),
            ProcessSpec::isotropic_stable(3, 1.7).unwrap(),
            ProcessSpec::layered_stable(2, 1.0, 4.0).unwrap(),
        ] {
            let mut ratios = Vec::new();
            let mut r = 1e-3;
            while r <= 1.001e3 {
                ratios.push(proc.symbol_psi(r) / proc.pruitt_h(1.0 / r).unwrap());
                r *= 10.0;
            }
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(0.0, f64::max);
            assert!(lo > 0.0, "lower sandwich constant must be positive");
            assert!(
                hi / lo < 50.0,
                "sandwich constants too spread: [{lo}, {hi}] for {proc:?}"
            );
        }
    }

    #[test]
    fn pairwise_sum_matches_sequential_on_benign_data() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let seq: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - seq).abs() < 1e-9);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(ProcessSpec::isotropic_stable(4, 1.0).is_err());
        assert!(ProcessSpec::isotropic_stable(1, 2.0).is_err());
        assert!(ProcessSpec::layered_stable(1, 1.0, 2.0).is_err());
        let bad = PathConfig {
            dt: 2.0,
            horizon: 1.0,
            ..PathConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn process_spec_round_trips_through_serde() {
        let lay = ProcessSpec::layered_stable(2, 1.2, 3.5).unwrap();
        let json = serde_json::to_string(&lay).unwrap();
        let back: ProcessSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(lay, back);
        // the cutoff is defaulted when omitted
        let parsed: ProcessSpec =
            serde_json::from_str(r#"{"family":"layered_stable","alpha":1.2,"gamma":3.5,"d":2}"#)
                .unwrap();
        assert_eq!(parsed, lay);
    }
}
