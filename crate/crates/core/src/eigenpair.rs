//! The explicit zero-energy eigenfunction/potential family on `R^d`,
//! `d ≤ 3`.
//!
//! For `κ > l` and a degree-`l` harmonic polynomial `P` (here `P ≡ 1` or a
//! single coordinate), the pair is
//!
//! ```text
//! φ(x) = P(x) (1 + |x|²)^{-κ}
//! V(x) = -2^α Γ((μ+α)/2) Γ(α/2+κ) / Γ(κ)
//!        · (1+|x|²)^κ · F̃((μ+α)/2, α/2+κ; μ/2; -|x|²),      μ = d + 2l,
//! ```
//!
//! where `F̃` is the regularized Gauss hypergeometric function, and
//! `(-Δ)^{α/2} φ + V φ = 0` holds. The module evaluates both members,
//! classifies the potential's decay and sign at infinity, and decides
//! `L^p` membership of `φ`.

use crate::decaylab::{RateFunction, Sign};
use crate::specfun::{self, HypParams, SpecFunError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenpairError {
    #[error("dimension must be 1, 2, or 3, got {0}")]
    Dimension(usize),
    #[error("alpha must lie in the open interval (0, 2), got {0}")]
    Alpha(f64),
    #[error("polynomial degree l must be 0 or 1, got {0}")]
    Degree(usize),
    #[error("axis must lie in 1..=d, got axis {axis} for dimension {d}")]
    Axis { axis: usize, d: usize },
    #[error("kappa must exceed l = {l}, got {kappa}")]
    Kappa { kappa: f64, l: usize },
    #[error("decay classification needs kappa in (l, (mu+alpha)/2) = ({lo}, {hi}), got {kappa}")]
    KappaRange { kappa: f64, lo: f64, hi: f64 },
}

/// Parameters selecting one member of the eigenpair family.
///
/// `axis` is 1-based and only meaningful for `l = 1`, where the polynomial
/// factor is `P(x) = x_axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenpairSpec {
    pub d: usize,
    pub alpha: f64,
    pub l: usize,
    #[serde(default = "default_axis")]
    pub axis: usize,
    pub kappa: f64,
}

fn default_axis() -> usize {
    1
}

/// Decay classification of the potential at infinity: the matched rate
/// row, the sign of `V` near infinity, square-integrability of `φ`, and
/// whether the logarithmic degenerate row `κ = μ/2` applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayClass {
    pub rate: RateFunction,
    pub sign_at_infinity: Sign,
    pub l2_member: bool,
    pub degenerate_log_case: bool,
}

impl EigenpairSpec {
    /// Radially symmetric member (`l = 0`, `P ≡ 1`).
    pub fn radial(d: usize, alpha: f64, kappa: f64) -> Result<Self, EigenpairError> {
        Self::new(d, alpha, 0, 1, kappa)
    }

    /// Antisymmetric member (`l = 1`, `P(x) = x_axis`), `axis` 1-based.
    pub fn antisymmetric(
        d: usize,
        alpha: f64,
        axis: usize,
        kappa: f64,
    ) -> Result<Self, EigenpairError> {
        Self::new(d, alpha, 1, axis, kappa)
    }

    pub fn new(
        d: usize,
        alpha: f64,
        l: usize,
        axis: usize,
        kappa: f64,
    ) -> Result<Self, EigenpairError> {
        let spec = EigenpairSpec {
            d,
            alpha,
            l,
            axis,
            kappa,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), EigenpairError> {
        if !(1..=3).contains(&self.d) {
            return Err(EigenpairError::Dimension(self.d));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(EigenpairError::Alpha(self.alpha));
        }
        if self.l > 1 {
            return Err(EigenpairError::Degree(self.l));
        }
        if self.axis < 1 || self.axis > self.d {
            return Err(EigenpairError::Axis {
                axis: self.axis,
                d: self.d,
            });
        }
        if !(self.kappa > self.l as f64) {
            return Err(EigenpairError::Kappa {
                kappa: self.kappa,
                l: self.l,
            });
        }
        Ok(())
    }

    /// `μ = d + 2l`, the effective dimension of the radial profile.
    pub fn mu(&self) -> f64 {
        (self.d + 2 * self.l) as f64
    }

    /// κ interval on which the decay table applies: `(l, (μ+α)/2)`.
    pub fn kappa_range(&self) -> (f64, f64) {
        (self.l as f64, 0.5 * (self.mu() + self.alpha))
    }

    /// `φ(x) = P(x) (1+|x|²)^{-κ}`.
    pub fn eigenfunction_value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d, "point dimension mismatch");
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let poly = if self.l == 0 { 1.0 } else { x[self.axis - 1] };
        poly * (-self.kappa * r2.ln_1p()).exp()
    }

    /// `φ` along the distinguished ray: `r ↦ P(r·e) (1+r²)^{-κ}` with `e`
    /// the `axis` direction (any direction for `l = 0`).
    pub fn eigenfunction_on_axis(&self, r: f64) -> f64 {
        let poly = if self.l == 0 { 1.0 } else { r };
        poly * (-self.kappa * (r * r).ln_1p()).exp()
    }

    /// The potential at radius `r = |x|` (it is radial for every `l`).
    pub fn potential_radial(&self, r: f64) -> Result<f64, SpecFunError> {
        let mu = self.mu();
        let a = 0.5 * (mu + self.alpha);
        let b = 0.5 * self.alpha + self.kappa;
        let c = 0.5 * mu;
        // prefactor 2^α Γ(a) Γ(b) / Γ(κ) in log space; all arguments are
        // positive here so no sign tracking survives the validation gate
        let (lg_a, _) = specfun::ln_gamma(a)?;
        let (lg_b, _) = specfun::ln_gamma(b)?;
        let (lg_k, _) = specfun::ln_gamma(self.kappa)?;
        let ln_pref = self.alpha * std::f64::consts::LN_2 + lg_a + lg_b - lg_k;
        let f = specfun::hyp2f1_reg(HypParams { a, b, c }, -r * r)?;
        // assemble -pref · (1+r²)^κ · F̃ without overflow at large r
        let magnitude = (ln_pref + self.kappa * (r * r).ln_1p() + f.abs().ln()).exp();
        Ok(if f > 0.0 {
            -magnitude
        } else if f < 0.0 {
            magnitude
        } else {
            0.0
        })
    }

    /// `V(x)`; delegates to [`Self::potential_radial`].
    pub fn potential_value(&self, x: &[f64]) -> Result<f64, SpecFunError> {
        debug_assert_eq!(x.len(), self.d, "point dimension mismatch");
        let r2: f64 = x.iter().map(|v| v * v).sum();
        self.potential_radial(r2.sqrt())
    }

    /// Decay-table row, sign at infinity, and `L²` membership.
    ///
    /// Requires `κ ∈ (l, (μ+α)/2)`; outside that interval the potential
    /// does not decay and no row applies.
    pub fn decay_class(&self) -> Result<DecayClass, EigenpairError> {
        self.validate()?;
        let (lo, hi) = self.kappa_range();
        if !(self.kappa > lo && self.kappa < hi) {
            return Err(EigenpairError::KappaRange {
                kappa: self.kappa,
                lo,
                hi,
            });
        }
        let mu = self.mu();
        let alpha = self.alpha;
        let polynomial_branch = 0.5 * (mu - alpha); // fastest-decay row
        let half_mu = 0.5 * mu;
        const ROW_TOL: f64 = 1e-12;

        let mut degenerate_log_case = false;
        let rate = if (self.kappa - polynomial_branch).abs() < ROW_TOL {
            RateFunction::power(2.0 * alpha)
        } else if (self.kappa - half_mu).abs() < ROW_TOL {
            degenerate_log_case = true;
            // O(r^{-α} log r): a growing log factor
            RateFunction::power_log(alpha, -1.0)
        } else if self.kappa < half_mu {
            RateFunction::power(alpha)
        } else {
            RateFunction::power(mu + alpha - 2.0 * self.kappa)
        };

        let sign_at_infinity = if self.kappa <= polynomial_branch {
            Sign::Negative
        } else {
            Sign::Positive
        };

        Ok(DecayClass {
            rate,
            sign_at_infinity,
            l2_member: self.lp_membership(2.0),
            degenerate_log_case,
        })
    }

    /// Whether `φ ∈ L^p(R^d)` under the strict shell-integral criterion
    /// `p(2κ - l) > d` (the boundary case diverges logarithmically and is
    /// excluded).
    pub fn lp_membership(&self, p: f64) -> bool {
        debug_assert!(p >= 1.0, "L^p membership needs p >= 1");
        p * (2.0 * self.kappa - self.l as f64) > self.d as f64
    }
}

// Oracle digits are quoted exactly as the generator prints them, beyond f64
// round-trip length, so the tables can be diffed against regenerated output.
#[allow(clippy::excessive_precision)]
#[cfg(test)]
mod tests {
    use super::*;
    use crate::decaylab::RateForm;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(d: usize, alpha: f64, l: usize, kappa: f64) -> EigenpairSpec {
        EigenpairSpec::new(d, alpha, l, 1, kappa).unwrap()
    }

    #[test]
    fn eigenfunction_elementary_values() {
        let s = spec(2, 1.0, 0, 0.75);
        assert_eq!(s.eigenfunction_value(&[0.0, 0.0]), 1.0);
        // |x| = 1, κ = 1 → 1/2
        let s1 = spec(2, 1.0, 0, 1.0);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(
            s1.eigenfunction_value(&[inv_sqrt2, inv_sqrt2]),
            0.5,
            max_relative = 1e-15
        );
        // l = 1 vanishes at the origin and on the orthogonal hyperplane
        let a = EigenpairSpec::antisymmetric(3, 1.0, 2, 1.8).unwrap();
        assert_eq!(a.eigenfunction_value(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(a.eigenfunction_value(&[2.5, 0.0, -1.0]), 0.0);
    }

    #[test]
    fn eigenfunction_antisymmetry_is_exact() {
        let a = EigenpairSpec::antisymmetric(3, 1.2, 2, 2.1).unwrap();
        let x = [0.3, -1.7, 2.2];
        let mut reflected = x;
        reflected[1] = -reflected[1];
        assert_eq!(
            a.eigenfunction_value(&x),
            -a.eigenfunction_value(&reflected)
        );
    }

    #[test]
    fn eigenfunction_tail_slope_matches_2kappa() {
        // log φ(r e)/log r → -2κ for l = 0
        let s = spec(1, 1.0, 0, 1.2);
        let radii = [1e2, 1e3, 1e4, 1e5, 1e6];
        for pair in radii.windows(2) {
            let (r0, r1) = (pair[0], pair[1]);
            let slope = (s.eigenfunction_on_axis(r1).ln() - s.eigenfunction_on_axis(r0).ln())
                / (r1.ln() - r0.ln());
            assert!(
                (slope + 2.0 * s.kappa).abs() < 1e-3,
                "slope {slope} at r = {r0}"
            );
        }
    }

    // (d, alpha, l, kappa, r, V) frozen 17-digit reference values computed
    // with 40-digit arithmetic by tools/gen_oracles.py
    const POTENTIAL_TABLE: &[(usize, f64, usize, f64, f64, f64)] = &[
        (1, 1.0, 0, 1.0, 0.0, -1.0),
        (1, 1.0, 0, 1.0, 2.0, 0.6),
        (1, 1.0, 0, 0.6, 10.0, 0.19953735055103408),
        (1, 0.5, 0, 0.2, 3.0, -0.14571215102625598),
        (2, 1.0, 0, 0.75, 5.0, 0.035966207107142834),
        (2, 1.0, 0, 1.0, 1.0e4, 0.00085966346181381404),
        (3, 1.0, 0, 1.0, 20.0, -0.0049875311720698254),
        (3, 1.5, 1, 2.1, 7.0, 0.072822428252125131),
        (1, 1.0, 1, 1.8, 2.5, 0.21341497850285975),
    ];

    #[test]
    fn potential_matches_reference() {
        for &(d, alpha, l, kappa, r, want) in POTENTIAL_TABLE {
            let s = spec(d, alpha, l, kappa);
            let got = s.potential_radial(r).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn potential_closed_form_d1() {
        // d=1, α=1, l=0, κ=1 collapses to V(x) = (x²-1)/(1+x²)
        let s = spec(1, 1.0, 0, 1.0);
        for &x in &[0.0, 0.3, 1.0, 2.0, 5.0, 40.0, 1.0e3, 1.0e6] {
            let want = (x * x - 1.0) / (1.0 + x * x);
            let got = s.potential_radial(x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-11, epsilon = 1e-12);
        }
    }

    #[test]
    fn potential_closed_form_d3() {
        // d=3, α=1, l=0, κ=1 collapses to V(x) = -2/(1+|x|²)
        let s = spec(3, 1.0, 0, 1.0);
        for &r in &[0.0, 0.8, 3.0, 17.0, 2.0e4] {
            let want = -2.0 / (1.0 + r * r);
            let got = s.potential_radial(r).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-11);
        }
    }

    #[test]
    fn potential_is_radial() {
        let s = spec(3, 1.3, 0, 1.1);
        let r = 2.7;
        let dir = [0.48, -0.6, 0.64]; // unit vector
        let x: Vec<f64> = dir.iter().map(|c| c * r).collect();
        let via_point = s.potential_value(&x).unwrap();
        let via_radius = s.potential_radial(r).unwrap();
        assert_relative_eq!(via_point, via_radius, max_relative = 1e-12);
    }

    #[test]
    fn potential_negative_tail_below_polynomial_branch() {
        // κ ≤ (μ-α)/2 = 0.25 keeps V negative far out
        let s = spec(1, 0.5, 0, 0.2);
        for &r in &[1.0e2, 1.0e3, 1.0e4, 1.0e6] {
            assert!(s.potential_radial(r).unwrap() < 0.0, "r = {r}");
        }
    }

    #[test]
    fn decay_class_rows() {
        // fastest-decay polynomial branch: κ = (μ-α)/2
        let c = spec(3, 1.0, 0, 1.0).decay_class().unwrap();
        assert_eq!(c.rate.form, RateForm::Power { a: 2.0 });
        assert!(!c.degenerate_log_case);
        assert_eq!(c.sign_at_infinity, Sign::Negative);

        // degenerate log row: κ = μ/2
        let c = spec(2, 1.0, 0, 1.0).decay_class().unwrap();
        assert_eq!(c.rate.form, RateForm::PowerLog { a: 1.0, b: -1.0 });
        assert!(c.degenerate_log_case);
        assert_eq!(c.sign_at_infinity, Sign::Positive);

        // generic row below μ/2
        let c = spec(1, 1.0, 0, 0.3).decay_class().unwrap();
        assert_eq!(c.rate.form, RateForm::Power { a: 1.0 });
        assert_eq!(c.sign_at_infinity, Sign::Positive); // (μ-α)/2 = 0 < κ

        // slow row above μ/2: exponent μ+α-2κ
        let c = spec(1, 1.0, 0, 0.9).decay_class().unwrap();
        assert!(matches!(c.rate.form, RateForm::Power { a } if (a - 0.2).abs() < 1e-12));
        assert_eq!(c.sign_at_infinity, Sign::Positive);

        // negative side of the sign dichotomy
        let c = spec(1, 0.5, 0, 0.2).decay_class().unwrap();
        assert_eq!(c.sign_at_infinity, Sign::Negative);
    }

    #[test]
    fn decay_class_rejects_out_of_range_kappa() {
        let s = spec(1, 1.0, 0, 1.5); // (μ+α)/2 = 1 < κ
        assert!(matches!(
            s.decay_class(),
            Err(EigenpairError::KappaRange { .. })
        ));
    }

    #[test]
    fn potential_tracks_decay_rate_in_bounded_band() {
        // |V|·rate^{-1} stays in a bounded positive band far out
        let cases = [
            spec(1, 1.0, 0, 0.3),
            spec(3, 1.0, 0, 1.0),
            spec(2, 1.0, 0, 1.0),
            spec(1, 1.0, 0, 0.75),
        ];
        for s in cases {
            let rate = s.decay_class().unwrap().rate;
            let mut lo = f64::INFINITY;
            let mut hi = 0.0_f64;
            for k in 0..=20 {
                let r = 1.0e2 * 10f64.powf(k as f64 / 5.0); // up to 1e6
                let ratio = s.potential_radial(r).unwrap().abs() / rate.eval(r);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            assert!(lo > 0.0, "vanishing ratio for {s:?}");
            assert!(hi / lo < 10.0, "band {lo}..{hi} too wide for {s:?}");
        }
    }

    #[test]
    fn lp_membership_boundary_is_strict() {
        assert!(spec(1, 1.0, 0, 1.0).lp_membership(2.0));
        assert!(!spec(3, 1.0, 0, 0.375).lp_membership(2.0));
        // boundary p(2κ-l) = d excluded
        assert!(!spec(1, 1.0, 0, 0.25).lp_membership(2.0));
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            EigenpairSpec::new(4, 1.0, 0, 1, 1.0),
            Err(EigenpairError::Dimension(4))
        ));
        assert!(matches!(
            EigenpairSpec::new(1, 2.0, 0, 1, 1.0),
            Err(EigenpairError::Alpha(_))
        ));
        assert!(matches!(
            EigenpairSpec::new(2, 1.0, 2, 1, 2.5),
            Err(EigenpairError::Degree(2))
        ));
        assert!(matches!(
            EigenpairSpec::new(2, 1.0, 1, 3, 1.5),
            Err(EigenpairError::Axis { .. })
        ));
        assert!(matches!(
            EigenpairSpec::new(1, 1.0, 1, 1, 0.7),
            Err(EigenpairError::Kappa { .. })
        ));
    }

    proptest! {
        #[test]
        fn decay_class_total_on_valid_range(
            d in 1usize..=3,
            l in 0usize..=1,
            alpha in 0.05f64..1.95,
            t in 0.01f64..0.99,
        ) {
            // κ strictly inside (l, (μ+α)/2)
            let mu = (d + 2 * l) as f64;
            let kappa = l as f64 + t * (0.5 * (mu + alpha) - l as f64);
            let s = EigenpairSpec::new(d, alpha, l, 1, kappa).unwrap();
            let class = s.decay_class().unwrap();
            prop_assert!(class.rate.power_exponent() > 0.0);
            prop_assert!(class.rate.power_exponent() <= 2.0 * alpha + 1e-12);
        }

        #[test]
        fn eigenfunction_radial_for_l0(
            seed in 0u64..1000,
            r in 0.01f64..50.0,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s = spec(3, 1.0, 0, 1.3);
            // random direction
            let mut v = [0.0; 3];
            loop {
                for w in &mut v { *w = rng.gen_range(-1.0..1.0); }
                let n2: f64 = v.iter().map(|w| w * w).sum();
                if n2 > 1e-4 && n2 <= 1.0 {
                    let n = n2.sqrt();
                    for w in &mut v { *w *= r / n; }
                    break;
                }
            }
            let on_axis = s.eigenfunction_on_axis(r);
            let at_point = s.eigenfunction_value(&v);
            prop_assert!((on_axis - at_point).abs() <= 1e-12 * on_axis.abs());
        }

        #[test]
        fn sign_at_infinity_matches_far_field_value(
            alpha in 0.2f64..1.8,
            t in 0.05f64..0.95,
        ) {
            // d = 1, l = 0: κ ranges over (0, (1+α)/2)
            let kappa = t * 0.5 * (1.0 + alpha);
            let s = EigenpairSpec::radial(1, alpha, kappa).unwrap();
            let class = s.decay_class().unwrap();
            // near the sign-change boundary the leading coefficient is
            // proportional to the distance from it, so the radius where the
            // limiting sign wins over the next-order term scales like
            // dist^{-1/α}
            let dist = (kappa - 0.5 * (1.0 - alpha)).abs();
            prop_assume!(dist > 1e-3);
            let r = (1.0e3 / dist).powf(1.0 / alpha).clamp(1.0e6, 1.0e40);
            let v = s.potential_radial(r).unwrap();
            prop_assert_eq!(Sign::of(v), class.sign_at_infinity);
        }
    }
}
