//! Scenario classification and envelope prediction.
//!
//! Classification compares two closed-form tails: the process symbol at
//! small frequencies, `Ψ(1/r)`, against the potential `V(r)`:
//!
//! 1. `Ψ(1/r)/V(r) → 0` and the jump/potential ratio is shell-integrable
//!    at infinity — the potential fully dominates;
//! 2. the ratio still vanishes but the shell integral diverges;
//! 3. `liminf Ψ(1/r)/V(r) > 0` — the symbol stays comparable.
//!
//! Both questions reduce to exponent comparisons because every supported
//! tail is `r^{-β} (log r)^{δ}` up to constants, so the decision is made
//! symbolically — no quadrature, no sampling.
//!
//! Prediction then emits the envelope matched to the classified regime and
//! the solution's symmetry, with any exponent the theory leaves free
//! carried as a named interval.

use super::{
    DecayLabError, EnvelopePrediction, EnvelopeSide, FreeExponent, FreeSlot, RateFunction,
    Scenario, Sign,
};
use crate::levysim::{ProcessFamily, ProcessSpec};
use crate::potential::{PotentialFamily, PotentialModel};
use serde::{Deserialize, Serialize};

/// Margin used to turn open exponent intervals into closed profiling
/// ranges.
const OPEN_INTERVAL_MARGIN: f64 = 1e-3;

/// Cap on log-exponent and stretched-coefficient profiling ranges whose
/// upper end the theory leaves unbounded.
const FREE_EXPONENT_CAP: f64 = 16.0;

/// Structural knowledge about the solution an envelope is requested for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionTraits {
    /// A strictly positive bound state.
    Positive,
    /// Odd under reflection of the given 1-based coordinate and positive
    /// on its positive half-space; bounds hold along the axis ray.
    Antisymmetric { axis: usize },
    /// Bound state of a potential negative near infinity, controlled only
    /// through an `L^p` norm; bounds hold along the axis ray.
    NegativePotential,
}

/// Small-frequency symbol exponent: `Ψ(1/r) ≍ r^{-σ}` for `r ≥ 1`.
fn symbol_exponent(proc: &ProcessSpec) -> f64 {
    match proc.family {
        ProcessFamily::IsotropicStable { alpha } => alpha,
        // the quadratic component dominates the symbol near zero
        ProcessFamily::LayeredStable { .. } => 2.0,
    }
}

/// Large-radius jump-density exponent: `ν(r) ≍ r^{-d-j}`.
fn jump_exponent(proc: &ProcessSpec) -> f64 {
    match proc.family {
        ProcessFamily::IsotropicStable { alpha } => alpha,
        ProcessFamily::LayeredStable { gamma, .. } => gamma,
    }
}

/// Decide the decay scenario for a process and a potential positive at
/// infinity.
///
/// With `V ≍ r^{-β} (log r)^{δ}`, `Ψ(1/r) ≍ r^{-σ}`, and
/// `ν(r) ≍ r^{-d-j}`:
/// the ratio `Ψ(1/r)/V(r)` vanishes iff `β < σ`, or `β = σ` with `δ > 0`;
/// the shell integral `∫^∞ ν/V` converges iff `β < j`, or `β = j` with
/// `δ > 1`.
pub fn scenario_classify(
    proc: &ProcessSpec,
    pot: &PotentialModel,
) -> Result<Scenario, DecayLabError> {
    proc.validate()?;
    if pot.sign_at_infinity == Sign::Negative {
        return Err(DecayLabError::Domain(
            "classification needs a potential positive at infinity".into(),
        ));
    }
    let beta = pot.tail_exponent();
    let delta = pot.log_exponent();
    let ratio_vanishes =
        beta < symbol_exponent(proc) || (beta == symbol_exponent(proc) && delta > 0.0);
    if !ratio_vanishes {
        return Ok(Scenario::Three);
    }
    let integrable = beta < jump_exponent(proc) || (beta == jump_exponent(proc) && delta > 1.0);
    Ok(if integrable {
        Scenario::One
    } else {
        Scenario::Two
    })
}

/// Predict the asymptotic envelope(s) for a zero-energy solution with the
/// given symmetry traits; `p_norm` supplies `L^p` knowledge where an upper
/// bound needs it.
pub fn envelope_predict(
    proc: &ProcessSpec,
    pot: &PotentialModel,
    traits: SolutionTraits,
    p_norm: Option<f64>,
) -> Result<EnvelopePrediction, DecayLabError> {
    proc.validate()?;
    if let Some(p) = p_norm {
        if !(p >= 1.0) {
            return Err(DecayLabError::Domain(format!(
                "L^p knowledge needs p ≥ 1, got {p}"
            )));
        }
    }
    match traits {
        SolutionTraits::Positive => predict_positive(proc, pot, p_norm),
        SolutionTraits::Antisymmetric { axis } => predict_antisymmetric(proc, pot, axis),
        SolutionTraits::NegativePotential => predict_negative(proc, pot, p_norm),
    }
}

/// Envelope sides for the symbol-dominated regime: the lower exponent
/// `d - γ` holds for every `γ ∈ (0,1)`; an upper bound `d/p` needs `L^p`
/// membership.
fn symbol_dominated_sides(
    d: f64,
    valid_from: f64,
    p_norm: Option<f64>,
) -> (Option<EnvelopeSide>, Option<EnvelopeSide>) {
    let lower = EnvelopeSide::with_free(
        RateFunction::power(f64::NAN).with_valid_from(valid_from),
        FreeExponent {
            name: "gamma".into(),
            lo: OPEN_INTERVAL_MARGIN,
            hi: 1.0 - OPEN_INTERVAL_MARGIN,
            slot: FreeSlot::PowerA,
            base: d,
            sign: -1.0,
        },
    );
    let upper =
        p_norm.map(|p| EnvelopeSide::fixed(RateFunction::power(d / p).with_valid_from(valid_from)));
    (Some(lower), upper)
}

/// Envelopes for a potential `≍ r^{-α} (log r)^{δ}` matching the process
/// index, split by the strength `δ` of the log factor.
fn log_decorated_prediction(
    d: f64,
    delta: f64,
    valid_from: f64,
    p_norm: Option<f64>,
    scenario: Scenario,
) -> EnvelopePrediction {
    let vf = valid_from.max(std::f64::consts::E);
    if delta > 1.0 {
        return EnvelopePrediction {
            scenario,
            lower: Some(EnvelopeSide::fixed(
                RateFunction::power_log(d, delta).with_valid_from(vf),
            )),
            upper: Some(EnvelopeSide::fixed(
                RateFunction::power_log(d, delta).with_valid_from(vf),
            )),
        };
    }
    if delta == 1.0 {
        // log exponent 1 - γ with γ1 ∈ (0,1] below and γ2 ≥ 1 above: the
        // lower side may keep a residual log decay, the upper side may
        // need log growth
        let side = |name: &str, lo: f64, hi: f64| {
            EnvelopeSide::with_free(
                RateFunction::power_log(d, f64::NAN).with_valid_from(vf),
                FreeExponent {
                    name: name.into(),
                    lo,
                    hi,
                    slot: FreeSlot::LogB,
                    base: 1.0,
                    sign: -1.0,
                },
            )
        };
        return EnvelopePrediction {
            scenario,
            lower: Some(side("gamma1", OPEN_INTERVAL_MARGIN, 1.0)),
            upper: Some(side("gamma2", 1.0, FREE_EXPONENT_CAP)),
        };
    }
    if delta > 0.0 {
        // sub-logarithmic regime: both sides carry a stretched-exponential
        // correction e^{(c/(1-δ)) (log r)^{1-δ}} with its own free c
        let side = |name: &str| {
            EnvelopeSide::with_free(
                RateFunction::stretched(d, delta, f64::NAN, delta).with_valid_from(vf),
                FreeExponent {
                    name: name.into(),
                    lo: OPEN_INTERVAL_MARGIN,
                    hi: FREE_EXPONENT_CAP,
                    slot: FreeSlot::StretchC,
                    base: 0.0,
                    sign: 1.0,
                },
            )
        };
        return EnvelopePrediction {
            scenario,
            lower: Some(side("gamma1")),
            upper: Some(side("gamma2")),
        };
    }
    // a non-positive δ cannot beat the symbol: same sides as a pure power
    // with β ≥ α
    let (lower, upper) = symbol_dominated_sides(d, vf, p_norm);
    EnvelopePrediction {
        scenario,
        lower,
        upper,
    }
}

/// Check that a family potential was built for this process and solution
/// degree.
fn check_family_coherence(
    proc: &ProcessSpec,
    alpha: f64,
    spec: &crate::eigenpair::EigenpairSpec,
    l: usize,
) -> Result<(), DecayLabError> {
    if spec.alpha != alpha || spec.d != proc.d {
        return Err(DecayLabError::Unsupported(format!(
            "family potential built for (d, α) = ({}, {}), process has ({}, {alpha})",
            spec.d, spec.alpha, proc.d
        )));
    }
    if spec.l != l {
        return Err(DecayLabError::Unsupported(format!(
            "family potential has degree l = {}, these traits need l = {l}",
            spec.l
        )));
    }
    Ok(())
}

fn predict_positive(
    proc: &ProcessSpec,
    pot: &PotentialModel,
    p_norm: Option<f64>,
) -> Result<EnvelopePrediction, DecayLabError> {
    if pot.sign_at_infinity == Sign::Negative {
        return Err(DecayLabError::Domain(
            "positive solutions need a potential positive at infinity; use the negative-potential traits".into(),
        ));
    }
    let scenario = scenario_classify(proc, pot)?;
    let d = proc.d as f64;
    match proc.family {
        ProcessFamily::IsotropicStable { alpha } => {
            let (beta, delta, vf) = match &pot.family {
                PotentialFamily::Power { beta, r0 } => (*beta, 0.0, r0.max(1.0)),
                PotentialFamily::PowerLog {
                    alpha: pot_alpha,
                    delta,
                    r0,
                } => {
                    if *pot_alpha != alpha {
                        return Err(DecayLabError::Unsupported(format!(
                            "log-decorated rows need the potential power ({pot_alpha}) to match the process index ({alpha})"
                        )));
                    }
                    (*pot_alpha, *delta, r0.max(1.0))
                }
                PotentialFamily::Hypergeometric(spec) => {
                    check_family_coherence(proc, alpha, spec, 0)?;
                    (pot.tail_exponent(), pot.log_exponent(), pot.r0())
                }
            };
            if delta != 0.0 {
                return Ok(log_decorated_prediction(d, delta, vf, p_norm, scenario));
            }
            if beta < alpha {
                let rate = RateFunction::power(d + alpha - beta).with_valid_from(vf);
                Ok(EnvelopePrediction {
                    scenario,
                    lower: Some(EnvelopeSide::fixed(rate)),
                    upper: Some(EnvelopeSide::fixed(rate)),
                })
            } else {
                let (lower, upper) = symbol_dominated_sides(d, vf, p_norm);
                Ok(EnvelopePrediction {
                    scenario,
                    lower,
                    upper,
                })
            }
        }
        ProcessFamily::LayeredStable { gamma, .. } => {
            let PotentialFamily::Power { beta, r0 } = &pot.family else {
                return Err(DecayLabError::Unsupported(
                    "layered predictions cover pure power potentials".into(),
                ));
            };
            let vf = r0.max(1.0);
            if *beta < 2.0 {
                let rate = RateFunction::power(d + gamma - beta).with_valid_from(vf);
                Ok(EnvelopePrediction {
                    scenario,
                    lower: Some(EnvelopeSide::fixed(rate)),
                    upper: Some(EnvelopeSide::fixed(rate)),
                })
            } else {
                // past the quadratic threshold the jump tail alone sets the
                // floor; no free exponent here
                let lower =
                    EnvelopeSide::fixed(RateFunction::power(d + gamma - 2.0).with_valid_from(vf));
                let upper = p_norm
                    .map(|p| EnvelopeSide::fixed(RateFunction::power(d / p).with_valid_from(vf)));
                Ok(EnvelopePrediction {
                    scenario,
                    lower: Some(lower),
                    upper,
                })
            }
        }
    }
}

fn predict_antisymmetric(
    proc: &ProcessSpec,
    pot: &PotentialModel,
    axis: usize,
) -> Result<EnvelopePrediction, DecayLabError> {
    let ProcessFamily::IsotropicStable { alpha } = proc.family else {
        return Err(DecayLabError::Unsupported(
            "antisymmetric bounds are stated for the stable family".into(),
        ));
    };
    if pot.sign_at_infinity == Sign::Negative {
        return Err(DecayLabError::Domain(
            "antisymmetric traits need a potential positive at infinity; use the negative-potential traits".into(),
        ));
    }
    if axis < 1 || axis > proc.d {
        return Err(DecayLabError::Domain(format!(
            "axis {axis} out of range for dimension {}",
            proc.d
        )));
    }
    let (beta, vf) = match &pot.family {
        PotentialFamily::Power { beta, r0 } => (*beta, r0.max(1.0)),
        PotentialFamily::Hypergeometric(spec) => {
            check_family_coherence(proc, alpha, spec, 1)?;
            if spec.axis != axis {
                return Err(DecayLabError::Unsupported(format!(
                    "family potential is odd in axis {}, traits name axis {axis}",
                    spec.axis
                )));
            }
            if pot.log_exponent() != 0.0 {
                return Err(DecayLabError::Unsupported(
                    "the axis upper bound needs a pure power potential tail".into(),
                ));
            }
            (pot.tail_exponent(), pot.r0())
        }
        PotentialFamily::PowerLog { .. } => {
            return Err(DecayLabError::Unsupported(
                "the axis upper bound needs a pure power potential tail".into(),
            ));
        }
    };
    if !(beta < alpha) {
        return Err(DecayLabError::Unsupported(format!(
            "the axis upper bound needs β < α, got β = {beta}, α = {alpha}"
        )));
    }
    let d = proc.d as f64;
    let scenario = scenario_classify(proc, pot)?;
    // the whole-space exponent d+α−β sharpened by an extra α−β along the
    // axis ray
    let rate = RateFunction::power((d + alpha - beta) + (alpha - beta)).with_valid_from(vf);
    Ok(EnvelopePrediction {
        scenario,
        lower: None,
        upper: Some(EnvelopeSide::fixed(rate).axis_only()),
    })
}

fn predict_negative(
    proc: &ProcessSpec,
    pot: &PotentialModel,
    p_norm: Option<f64>,
) -> Result<EnvelopePrediction, DecayLabError> {
    if !matches!(proc.family, ProcessFamily::IsotropicStable { .. }) {
        return Err(DecayLabError::Unsupported(
            "negative-potential bounds are stated for the stable family".into(),
        ));
    }
    if pot.sign_at_infinity == Sign::Positive {
        return Err(DecayLabError::Domain(
            "negative-potential traits need a potential negative at infinity".into(),
        ));
    }
    let Some(p) = p_norm else {
        return Err(DecayLabError::Domain(
            "the negative-potential bound needs an L^p exponent".into(),
        ));
    };
    let d = proc.d as f64;
    let cap = d / p;
    // any exponent strictly below d/p works; profile within the open
    // interval
    let upper = EnvelopeSide::with_free(
        RateFunction::power(f64::NAN).with_valid_from(pot.r0().max(1.0)),
        FreeExponent {
            name: "q".into(),
            lo: OPEN_INTERVAL_MARGIN * cap,
            hi: (1.0 - OPEN_INTERVAL_MARGIN) * cap,
            slot: FreeSlot::PowerA,
            base: 0.0,
            sign: 1.0,
        },
    )
    .axis_only();
    // the regime trichotomy is a statement about |V|
    let scenario = scenario_classify(proc, &pot.clone().negated())?;
    Ok(EnvelopePrediction {
        scenario,
        lower: None,
        upper: Some(upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenpair::EigenpairSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn stable(d: usize, alpha: f64) -> ProcessSpec {
        ProcessSpec::isotropic_stable(d, alpha).unwrap()
    }

    #[test]
    fn stable_power_trichotomy() {
        let proc = stable(1, 1.0);
        let s = |beta: f64| {
            scenario_classify(&proc, &PotentialModel::power(beta, 1.0).unwrap()).unwrap()
        };
        assert_eq!(s(0.5), Scenario::One);
        // the boundary belongs to the symbol-dominated regime
        assert_eq!(s(1.0), Scenario::Three);
        assert_eq!(s(2.0), Scenario::Three);
    }

    #[test]
    fn classification_is_total_and_stable_on_a_grid() {
        for i in 0..10 {
            let alpha = 0.2 + 1.7 * i as f64 / 9.0;
            let proc = stable(2, alpha);
            for j in 0..10 {
                let beta = 0.1 + 2.4 * j as f64 / 9.0;
                let pot = PotentialModel::power(beta, 1.0).unwrap();
                let got = scenario_classify(&proc, &pot).unwrap();
                let want = if beta < alpha {
                    Scenario::One
                } else {
                    Scenario::Three
                };
                assert_eq!(got, want, "alpha = {alpha}, beta = {beta}");
            }
        }
    }

    #[test]
    fn log_decorated_trichotomy() {
        let proc = stable(1, 1.0);
        let s = |delta: f64| {
            scenario_classify(&proc, &PotentialModel::power_log(1.0, delta, 2.0).unwrap()).unwrap()
        };
        assert_eq!(s(1.5), Scenario::One);
        assert_eq!(s(1.0), Scenario::Two);
        assert_eq!(s(0.5), Scenario::Two);
        assert_eq!(s(0.0), Scenario::Three);
        assert_eq!(s(-1.0), Scenario::Three);
    }

    #[test]
    fn layered_trichotomy() {
        let proc = ProcessSpec::layered_stable(1, 1.0, 3.0).unwrap();
        let s = |beta: f64| {
            scenario_classify(&proc, &PotentialModel::power(beta, 1.0).unwrap()).unwrap()
        };
        assert_eq!(s(1.0), Scenario::One);
        assert_eq!(s(1.9), Scenario::One);
        assert_eq!(s(2.0), Scenario::Three);
        assert_eq!(s(3.0), Scenario::Three);
    }

    #[test]
    fn family_potential_trichotomy() {
        let proc = stable(1, 1.0);
        let pot = |kappa: f64| {
            PotentialModel::hypergeometric(EigenpairSpec::radial(1, 1.0, kappa).unwrap()).unwrap()
        };
        // tail slower than the symbol
        assert_eq!(scenario_classify(&proc, &pot(0.75)).unwrap(), Scenario::One);
        // matches the symbol exactly
        assert_eq!(
            scenario_classify(&proc, &pot(0.3)).unwrap(),
            Scenario::Three
        );
        // matches up to a growing log: ratio vanishes, shell diverges
        assert_eq!(scenario_classify(&proc, &pot(0.5)).unwrap(), Scenario::Two);
        // the resonant fast row is negative at infinity, so the
        // positive-tail trichotomy refuses it
        let proc3 = stable(3, 1.0);
        let resonant =
            PotentialModel::hypergeometric(EigenpairSpec::radial(3, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(resonant.sign_at_infinity, Sign::Negative);
        assert!(matches!(
            scenario_classify(&proc3, &resonant),
            Err(DecayLabError::Domain(_))
        ));
    }

    #[test]
    fn classification_rejects_negative_tails() {
        let proc = stable(1, 0.5);
        let neg = PotentialModel::power(1.0, 1.0).unwrap().negated();
        assert!(matches!(
            scenario_classify(&proc, &neg),
            Err(DecayLabError::Domain(_))
        ));
        // the resonant family row sits below zero at infinity
        let spec = EigenpairSpec::radial(1, 0.5, 0.25).unwrap();
        let pot = PotentialModel::hypergeometric(spec).unwrap();
        assert_eq!(pot.sign_at_infinity, Sign::Negative);
        assert!(scenario_classify(&proc, &pot).is_err());
    }

    #[test]
    fn dominated_regime_predicts_two_sided_power() {
        let proc = stable(1, 1.0);
        let pot = PotentialModel::power(0.5, 1.0).unwrap();
        let pred = envelope_predict(&proc, &pot, SolutionTraits::Positive, None).unwrap();
        assert_eq!(pred.scenario, Scenario::One);
        for side in [pred.lower.as_ref().unwrap(), pred.upper.as_ref().unwrap()] {
            assert_relative_eq!(side.rate.power_exponent(), 1.5);
            assert!(side.free.is_none() && !side.axis_only);
        }
    }

    #[test]
    fn symbol_regime_predicts_free_floor_and_lp_ceiling() {
        let proc = stable(2, 0.8);
        let pot = PotentialModel::power(1.5, 2.0).unwrap();
        let pred = envelope_predict(&proc, &pot, SolutionTraits::Positive, None).unwrap();
        assert_eq!(pred.scenario, Scenario::Three);
        let lower = pred.lower.as_ref().unwrap();
        let free = lower.free.as_ref().unwrap();
        assert_eq!(free.name, "gamma");
        // midpoint default of d - γ, γ ∈ (0,1)
        assert_relative_eq!(lower.rate.power_exponent(), 1.5, max_relative = 1e-12);
        assert!(pred.upper.is_none());

        let pred = envelope_predict(&proc, &pot, SolutionTraits::Positive, Some(2.0)).unwrap();
        let upper = pred.upper.as_ref().unwrap();
        assert_relative_eq!(upper.rate.power_exponent(), 1.0);
        assert!(upper.free.is_none());
    }

    proptest! {
        // in the dominated regime the family's envelope exponent collapses
        // to 2κ — the predicted tail matches the exact solution
        #[test]
        fn family_envelope_exponent_is_twice_kappa(
            d in 1_usize..=3,
            alpha in 0.25_f64..1.95,
            f in 0.02_f64..0.98,
        ) {
            let lo = d as f64 / 2.0;
            let hi = (d as f64 + alpha) / 2.0;
            let kappa = lo + f * (hi - lo);
            prop_assume!(kappa > lo * (1.0 + 1e-9) && kappa < hi * (1.0 - 1e-9));
            let spec = EigenpairSpec::radial(d, alpha, kappa).unwrap();
            let pot = PotentialModel::hypergeometric(spec).unwrap();
            let proc = stable(d, alpha);
            prop_assert_eq!(scenario_classify(&proc, &pot).unwrap(), Scenario::One);
            let pred = envelope_predict(&proc, &pot, SolutionTraits::Positive, None).unwrap();
            let exponent = pred.power_exponent().unwrap();
            prop_assert!((exponent - 2.0 * kappa).abs() < 1e-12,
                "exponent {exponent} vs 2κ = {}", 2.0 * kappa);
            prop_assert_eq!(pred.scenario, Scenario::One);
        }
    }

    #[test]
    fn log_rows_cover_all_delta_regimes() {
        let proc = stable(2, 1.0);
        let pred = |delta: f64| {
            envelope_predict(
                &proc,
                &PotentialModel::power_log(1.0, delta, 2.0).unwrap(),
                SolutionTraits::Positive,
                Some(2.0),
            )
            .unwrap()
        };

        let strong = pred(1.5);
        assert_eq!(strong.scenario, Scenario::One);
        let rate = strong.upper.unwrap().rate;
        assert_relative_eq!(rate.power_exponent(), 2.0);
        assert!(matches!(rate.form, super::super::RateForm::PowerLog { b, .. } if b == 1.5));

        let marginal = pred(1.0);
        assert_eq!(marginal.scenario, Scenario::Two);
        let lower = marginal.lower.unwrap();
        let upper = marginal.upper.unwrap();
        assert_eq!(lower.free.as_ref().unwrap().name, "gamma1");
        assert_eq!(upper.free.as_ref().unwrap().name, "gamma2");
        // γ1 midpoint ≈ 0.5 keeps a residual log decay; γ2 midpoint grows it
        assert!(matches!(lower.rate.form, super::super::RateForm::PowerLog { b, .. } if b > 0.0));
        assert!(matches!(upper.rate.form, super::super::RateForm::PowerLog { b, .. } if b < 0.0));

        let weak = pred(0.6);
        assert_eq!(weak.scenario, Scenario::Two);
        for side in [weak.lower.unwrap(), weak.upper.unwrap()] {
            match side.rate.form {
                super::super::RateForm::Stretched { a, b, delta, .. } => {
                    assert_relative_eq!(a, 2.0);
                    assert_relative_eq!(b, 0.6);
                    assert_relative_eq!(delta, 0.6);
                }
                other => panic!("expected stretched form, got {other:?}"),
            }
        }

        let vanished = pred(-0.5);
        assert_eq!(vanished.scenario, Scenario::Three);
        assert!(vanished.lower.unwrap().free.is_some());
        assert_relative_eq!(vanished.upper.unwrap().rate.power_exponent(), 1.0);
    }

    #[test]
    fn layered_rows() {
        let proc = ProcessSpec::layered_stable(1, 1.0, 3.0).unwrap();
        let pot = PotentialModel::power(1.0, 1.0).unwrap();
        let pred = envelope_predict(&proc, &pot, SolutionTraits::Positive, None).unwrap();
        assert_eq!(pred.scenario, Scenario::One);
        assert_relative_eq!(pred.power_exponent().unwrap(), 3.0);

        let pot = PotentialModel::power(2.5, 1.0).unwrap();
        let pred = envelope_predict(&proc, &pot, SolutionTraits::Positive, Some(1.0)).unwrap();
        assert_eq!(pred.scenario, Scenario::Three);
        let lower = pred.lower.unwrap();
        assert!(lower.free.is_none(), "layered floor is fixed, not profiled");
        assert_relative_eq!(lower.rate.power_exponent(), 2.0);
        assert_relative_eq!(pred.upper.unwrap().rate.power_exponent(), 1.0);

        let logpot = PotentialModel::power_log(1.0, 1.0, 2.0).unwrap();
        assert!(matches!(
            envelope_predict(&proc, &logpot, SolutionTraits::Positive, None),
            Err(DecayLabError::Unsupported(_))
        ));
    }

    #[test]
    fn antisymmetric_axis_bound() {
        let proc = stable(1, 0.8);
        let pot = PotentialModel::power(0.5, 1.0).unwrap();
        let pred =
            envelope_predict(&proc, &pot, SolutionTraits::Antisymmetric { axis: 1 }, None).unwrap();
        assert!(pred.lower.is_none());
        let upper = pred.upper.unwrap();
        assert!(upper.axis_only);
        // (d + α - β) + (α - β) = 1.3 + 0.3
        assert_relative_eq!(upper.rate.power_exponent(), 1.6, max_relative = 1e-12);

        // family potential of odd degree: exponent 4(κ-1) - d
        let spec = EigenpairSpec::antisymmetric(1, 0.6, 1, 1.7).unwrap();
        let pot = PotentialModel::hypergeometric(spec).unwrap();
        let proc = stable(1, 0.6);
        let pred =
            envelope_predict(&proc, &pot, SolutionTraits::Antisymmetric { axis: 1 }, None).unwrap();
        assert_relative_eq!(
            pred.upper.unwrap().rate.power_exponent(),
            4.0 * 0.7 - 1.0,
            max_relative = 1e-12
        );

        // β ≥ α has no stated axis bound
        let proc = stable(1, 0.4);
        let pot = PotentialModel::power(0.5, 1.0).unwrap();
        assert!(matches!(
            envelope_predict(&proc, &pot, SolutionTraits::Antisymmetric { axis: 1 }, None),
            Err(DecayLabError::Unsupported(_))
        ));
    }

    #[test]
    fn negative_potential_axis_bound() {
        let proc = stable(1, 1.0);
        let pot = PotentialModel::power(0.5, 1.0).unwrap().negated();
        let pred =
            envelope_predict(&proc, &pot, SolutionTraits::NegativePotential, Some(2.0)).unwrap();
        assert!(pred.lower.is_none());
        let upper = pred.upper.unwrap();
        assert!(upper.axis_only);
        let free = upper.free.as_ref().unwrap();
        assert_eq!(free.name, "q");
        // any q strictly below d/p = 0.5
        assert!(free.hi < 0.5 && free.lo > 0.0);

        // L^p knowledge is mandatory here
        assert!(matches!(
            envelope_predict(&proc, &pot, SolutionTraits::NegativePotential, None),
            Err(DecayLabError::Domain(_))
        ));
    }

    #[test]
    fn incoherent_combinations_are_rejected() {
        let proc = stable(1, 1.0);
        // potential carries a different stability index
        let pot = PotentialModel::power_log(0.8, 1.5, 2.0).unwrap();
        assert!(matches!(
            envelope_predict(&proc, &pot, SolutionTraits::Positive, None),
            Err(DecayLabError::Unsupported(_))
        ));
        // family potential from another dimension
        let spec = EigenpairSpec::radial(2, 1.0, 0.8).unwrap();
        let pot = PotentialModel::hypergeometric(spec).unwrap();
        assert!(matches!(
            envelope_predict(&proc, &pot, SolutionTraits::Positive, None),
            Err(DecayLabError::Unsupported(_))
        ));
        // positive traits with a negative potential
        let neg = PotentialModel::power(0.5, 1.0).unwrap().negated();
        assert!(matches!(
            envelope_predict(&proc, &neg, SolutionTraits::Positive, None),
            Err(DecayLabError::Domain(_))
        ));
        // bad p
        let pot = PotentialModel::power(2.0, 1.0).unwrap();
        assert!(envelope_predict(&proc, &pot, SolutionTraits::Positive, Some(0.5)).is_err());
    }
}
