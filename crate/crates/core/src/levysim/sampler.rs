//! Exact-in-law increment samplers.
//!
//! * Isotropic stable, `d = 1`: the Chambers–Mallows–Stuck representation
//!   of the symmetric α-stable law (with the Cauchy `tan` shortcut at
//!   `α = 1`), scaled by `dt^{1/α}`.
//! * Isotropic stable, `d ≥ 2`: Gaussian subordination — an `(α/2)`-stable
//!   subordinator increment `S` via Kanter's representation, then a normal
//!   vector with per-coordinate variance `2S`, which reproduces the symbol
//!   `|ξ|^α` exactly.
//! * Layered: a variance-matched Gaussian for jumps below the cutoff,
//!   plus two compound-Poisson layers sampled by inverse CDF — the
//!   truncated stable kernel on `(cutoff, 1]` and the `γ`-tail beyond 1.

use super::{LevySimError, ProcessFamily, ProcessSpec};
use rand::Rng;
use rand_distr::{Exp1, Poisson, StandardNormal};
use std::f64::consts::PI;

/// A draw from the open interval `(0, 1)`.
fn positive_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

fn positive_exp<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let w: f64 = rng.sample(Exp1);
        if w > 0.0 {
            return w;
        }
    }
}

/// Standard symmetric α-stable variate with characteristic function
/// `exp(-|ξ|^α)`.
pub(crate) fn cms_standard<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let theta = PI * (rng.gen::<f64>() - 0.5);
    if alpha == 1.0 {
        return theta.tan();
    }
    let w = positive_exp(rng);
    let s = (alpha * theta).sin() / theta.cos().powf(1.0 / alpha);
    s * (((1.0 - alpha) * theta).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Positive `ρ`-stable variate with Laplace transform `exp(-λ^ρ)`,
/// `ρ ∈ (0, 1)`, by Kanter's representation.
pub(crate) fn kanter_subordinator<R: Rng>(rho: f64, rng: &mut R) -> f64 {
    let theta = PI * positive_unit(rng);
    let w = positive_exp(rng);
    let ln_a = (rho * (rho * theta).sin().ln() + (1.0 - rho) * ((1.0 - rho) * theta).sin().ln()
        - theta.sin().ln())
        / (1.0 - rho);
    (((1.0 - rho) / rho) * (ln_a - w.ln())).exp()
}

fn unit_direction<R: Rng>(d: usize, rng: &mut R, dir: &mut [f64; 3]) {
    match d {
        1 => dir[0] = if rng.gen::<bool>() { 1.0 } else { -1.0 },
        2 => {
            let phi = 2.0 * PI * rng.gen::<f64>();
            let (s, c) = phi.sin_cos();
            dir[0] = c;
            dir[1] = s;
        }
        _ => loop {
            for v in dir.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
            if n > 1e-12 {
                for v in dir.iter_mut() {
                    *v /= n;
                }
                return;
            }
        },
    }
}

/// Precomputed per-process sampling state for the hot path loops.
pub(crate) struct IncrementSampler {
    d: usize,
    family: ProcessFamily,
    // layered per-unit-time quantities
    sigma2_unit: f64,
    rate_medium: f64,
    rate_large: f64,
    cutoff_pow: f64, // cutoff^{-α}
}

impl IncrementSampler {
    pub(crate) fn new(proc: &ProcessSpec) -> Self {
        let (sigma2_unit, rate_medium, rate_large, cutoff_pow) = match proc.family {
            ProcessFamily::IsotropicStable { .. } => (0.0, 0.0, 0.0, 0.0),
            ProcessFamily::LayeredStable {
                alpha,
                gamma,
                small_jump_cutoff: b,
            } => {
                let surf = match proc.d {
                    1 => 2.0,
                    2 => 2.0 * PI,
                    _ => 4.0 * PI,
                };
                let c = proc.levy_constant() * surf;
                (
                    c * b.powf(2.0 - alpha) / ((2.0 - alpha) * proc.d as f64),
                    c * (b.powf(-alpha) - 1.0) / alpha,
                    c / gamma,
                    b.powf(-alpha),
                )
            }
        };
        IncrementSampler {
            d: proc.d,
            family: proc.family,
            sigma2_unit,
            rate_medium,
            rate_large,
            cutoff_pow,
        }
    }

    /// One increment over time `dt`, written into `out[..d]`.
    pub(crate) fn draw<R: Rng>(&self, dt: f64, rng: &mut R, out: &mut [f64; 3]) {
        out.fill(0.0);
        match self.family {
            ProcessFamily::IsotropicStable { alpha } => {
                if self.d == 1 {
                    out[0] = dt.powf(1.0 / alpha) * cms_standard(alpha, rng);
                } else {
                    let s = dt.powf(2.0 / alpha) * kanter_subordinator(0.5 * alpha, rng);
                    let sd = (2.0 * s).sqrt();
                    for v in out[..self.d].iter_mut() {
                        let g: f64 = rng.sample(StandardNormal);
                        *v = sd * g;
                    }
                }
            }
            ProcessFamily::LayeredStable { alpha, gamma, .. } => {
                let sd = (dt * self.sigma2_unit).sqrt();
                for v in out[..self.d].iter_mut() {
                    let g: f64 = rng.sample(StandardNormal);
                    *v = sd * g;
                }
                let mut dir = [0.0_f64; 3];
                let n_med =
                    rng.sample(Poisson::new(dt * self.rate_medium).expect("positive rate")) as u64;
                for _ in 0..n_med {
                    let u: f64 = rng.gen();
                    let radius = (self.cutoff_pow - u * (self.cutoff_pow - 1.0)).powf(-1.0 / alpha);
                    unit_direction(self.d, rng, &mut dir);
                    for i in 0..self.d {
                        out[i] += radius * dir[i];
                    }
                }
                let n_large =
                    rng.sample(Poisson::new(dt * self.rate_large).expect("positive rate")) as u64;
                for _ in 0..n_large {
                    let radius = positive_unit(rng).powf(-1.0 / gamma);
                    unit_direction(self.d, rng, &mut dir);
                    for i in 0..self.d {
                        out[i] += radius * dir[i];
                    }
                }
            }
        }
    }
}

/// One increment of the process over time `dt`, as a fresh vector.
pub fn sample_increment<R: Rng>(
    proc: &ProcessSpec,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<f64>, LevySimError> {
    proc.validate()?;
    if !(dt > 0.0) {
        return Err(LevySimError::Config(format!(
            "increment step must be positive, got {dt}"
        )));
    }
    let mut out = [0.0_f64; 3];
    IncrementSampler::new(proc).draw(dt, rng, &mut out);
    Ok(out[..proc.d].to_vec())
}

#[cfg(test)]
mod tests {
    use super::super::{estimate_from_samples, path_rng};
    use super::*;

    fn draws(proc: &ProcessSpec, dt: f64, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let sampler = IncrementSampler::new(proc);
        let mut rng = path_rng(seed, 0);
        let mut out = [0.0_f64; 3];
        (0..n)
            .map(|_| {
                sampler.draw(dt, &mut rng, &mut out);
                out[..proc.d].to_vec()
            })
            .collect()
    }

    #[test]
    fn cauchy_quartile_matches_closed_form() {
        // for the Cauchy law, P(X ≤ 1) = 1/2 + arctan(1)/π = 3/4
        let proc = ProcessSpec::isotropic_stable(1, 1.0).unwrap();
        let n = 200_000;
        let hits = draws(&proc, 1.0, n, 11)
            .iter()
            .filter(|x| x[0] <= 1.0)
            .count();
        let p = hits as f64 / n as f64;
        let se = (0.75 * 0.25 / n as f64).sqrt();
        assert!(
            (p - 0.75).abs() <= 4.0 * se,
            "quartile estimate {p} vs 0.75 (se {se})"
        );
    }

    #[test]
    fn characteristic_function_matches_symbol() {
        // E cos(X) = exp(-1) for the standard draw at every α
        for &alpha in &[0.5, 1.0, 1.5] {
            let proc = ProcessSpec::isotropic_stable(1, alpha).unwrap();
            let samples: Vec<f64> = draws(&proc, 1.0, 200_000, 23)
                .iter()
                .map(|x| x[0].cos())
                .collect();
            let est = estimate_from_samples(&samples, 23);
            let want = (-1.0_f64).exp();
            assert!(
                (est.mean - want).abs() <= 5.0 * est.std_error,
                "alpha = {alpha}: {} vs {want} (se {})",
                est.mean,
                est.std_error
            );
        }
    }

    #[test]
    fn subordinator_laplace_transform() {
        // E exp(-λ S) = exp(-λ^ρ)
        let mut rng = path_rng(5, 0);
        for &rho in &[0.4, 0.7] {
            let s: Vec<f64> = (0..200_000)
                .map(|_| kanter_subordinator(rho, &mut rng))
                .collect();
            for &lambda in &[0.5, 2.0] {
                let vals: Vec<f64> = s.iter().map(|v| (-lambda * v).exp()).collect();
                let est = estimate_from_samples(&vals, 5);
                let want = (-lambda.powf(rho)).exp();
                assert!(
                    (est.mean - want).abs() <= 5.0 * est.std_error,
                    "rho = {rho}, lambda = {lambda}: {} vs {want} (se {})",
                    est.mean,
                    est.std_error
                );
            }
        }
    }

    #[test]
    fn multivariate_symbol_is_isotropic() {
        // E cos(ξ·X_dt) = exp(-dt |ξ|^α) in any direction
        let proc = ProcessSpec::isotropic_stable(2, 1.3).unwrap();
        let dt = 0.7_f64;
        let want = (-dt).exp(); // |ξ| = 1
        for xi in [[1.0, 0.0], [0.6, 0.8]] {
            let vals: Vec<f64> = draws(&proc, dt, 200_000, 31)
                .iter()
                .map(|x| (xi[0] * x[0] + xi[1] * x[1]).cos())
                .collect();
            let est = estimate_from_samples(&vals, 31);
            assert!(
                (est.mean - want).abs() <= 5.0 * est.std_error,
                "xi = {xi:?}: {} vs {want} (se {})",
                est.mean,
                est.std_error
            );
        }
    }

    #[test]
    fn increments_are_sign_symmetric() {
        let proc = ProcessSpec::isotropic_stable(3, 0.7).unwrap();
        let n = 100_000;
        let positive = draws(&proc, 0.1, n, 43)
            .iter()
            .filter(|x| x[0] > 0.0)
            .count();
        let se = (0.25 / n as f64).sqrt();
        let p = positive as f64 / n as f64;
        assert!((p - 0.5).abs() <= 4.0 * se, "sign balance {p}");
    }

    #[test]
    fn layered_second_moment_matches_kernel() {
        // E|X_dt|² = dt ∫ |z|² ν(dz) = dt C |S| (1/(2-α) + 1/(γ-2))
        let proc = ProcessSpec::layered_stable(2, 1.0, 6.0).unwrap();
        let dt = 0.01;
        let c = proc.levy_constant() * 2.0 * PI;
        let want = dt * c * (1.0 / (2.0 - 1.0) + 1.0 / (6.0 - 2.0));
        let vals: Vec<f64> = draws(&proc, dt, 200_000, 57)
            .iter()
            .map(|x| x[0] * x[0] + x[1] * x[1])
            .collect();
        let est = estimate_from_samples(&vals, 57);
        assert!(
            (est.mean - want).abs() <= 5.0 * est.std_error,
            "{} vs {want} (se {})",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn increment_stream_is_reproducible() {
        let proc = ProcessSpec::layered_stable(3, 1.4, 3.1).unwrap();
        let a = sample_increment(&proc, 0.5, &mut path_rng(9, 4)).unwrap();
        let b = sample_increment(&proc, 0.5, &mut path_rng(9, 4)).unwrap();
        assert_eq!(a, b);
    }
}
