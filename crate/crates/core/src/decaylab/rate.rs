//! Parametric decay-rate functions and envelope predictions.
//!
//! A [`RateFunction`] is one of three closed forms on a half-line
//! `r ≥ valid_from`:
//!
//! * `power(a)`: `r^{-a}`
//! * `power_log(a, b)`: `r^{-a} (log r)^{-b}` (negative `b` means a growing
//!   log factor)
//! * `stretched(a, b, c, delta)`:
//!   `exp((c/(1-δ)) (log r)^{1-δ}) · r^{-a} (log r)^{-b}` with `δ ∈ (0,1)`
//!
//! [`EnvelopePrediction`] packages one or two rate functions as asymptotic
//! lower/upper envelopes, with exponents the theory leaves free represented
//! as named [`FreeExponent`] intervals rather than baked-in numbers.

use serde::{Deserialize, Serialize};

/// Sign of a function's values near infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Positive => 1.0,
        }
    }
}

/// Decay-regime trichotomy for a process/potential pair: (1) potential
/// dominates the small-scale symbol and the jump/potential ratio is
/// integrable at infinity, (2) it dominates but the ratio is not
/// integrable, (3) the symbol term stays comparable or dominant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    One,
    Two,
    Three,
}

impl Scenario {
    pub fn as_u8(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
            Scenario::Three => 3,
        }
    }
}

impl Serialize for Scenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match u8::deserialize(d)? {
            1 => Ok(Scenario::One),
            2 => Ok(Scenario::Two),
            3 => Ok(Scenario::Three),
            n => Err(serde::de::Error::custom(format!(
                "scenario must be 1, 2, or 3, got {n}"
            ))),
        }
    }
}

/// The closed-form families a [`RateFunction`] can take.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RateForm {
    /// `r^{-a}`
    Power { a: f64 },
    /// `r^{-a} (log r)^{-b}`
    PowerLog { a: f64, b: f64 },
    /// `exp((c/(1-delta)) (log r)^{1-delta}) r^{-a} (log r)^{-b}`
    Stretched { a: f64, b: f64, c: f64, delta: f64 },
}

/// A positive decay rate on `r ≥ valid_from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub form: RateForm,
    /// Radius from which the form is evaluable and positive (log factors
    /// need `log r > 0`).
    pub valid_from: f64,
}

impl RateFunction {
    pub fn power(a: f64) -> Self {
        RateFunction {
            form: RateForm::Power { a },
            valid_from: 1.0,
        }
    }

    pub fn power_log(a: f64, b: f64) -> Self {
        RateFunction {
            form: RateForm::PowerLog { a, b },
            valid_from: std::f64::consts::E,
        }
    }

    /// Panics unless `delta ∈ (0, 1)` (outside it the stretched form is
    /// not a distinct family: use `power` / `power_log`).
    pub fn stretched(a: f64, b: f64, c: f64, delta: f64) -> Self {
        assert!(
            delta > 0.0 && delta < 1.0,
            "stretched rate needs delta in (0,1), got {delta}"
        );
        RateFunction {
            form: RateForm::Stretched { a, b, c, delta },
            valid_from: std::f64::consts::E,
        }
    }

    pub fn with_valid_from(mut self, r: f64) -> Self {
        self.valid_from = r;
        self
    }

    /// Natural log of the rate; preferred for fitting and for very large
    /// radii where the value under- or overflows.
    pub fn ln_eval(&self, r: f64) -> f64 {
        debug_assert!(r >= self.valid_from, "rate evaluated below valid_from");
        let ln_r = r.ln();
        match self.form {
            RateForm::Power { a } => -a * ln_r,
            RateForm::PowerLog { a, b } => -a * ln_r - b * ln_r.ln(),
            RateForm::Stretched { a, b, c, delta } => {
                c / (1.0 - delta) * ln_r.powf(1.0 - delta) - a * ln_r - b * ln_r.ln()
            }
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.ln_eval(r).exp()
    }

    /// Leading power exponent `a` (the polynomial part of the decay).
    pub fn power_exponent(&self) -> f64 {
        match self.form {
            RateForm::Power { a }
            | RateForm::PowerLog { a, .. }
            | RateForm::Stretched { a, .. } => a,
        }
    }

    pub fn has_log_factor(&self) -> bool {
        !matches!(self.form, RateForm::Power { .. })
    }
}

/// Which scalar slot of a [`RateForm`] a free exponent feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeSlot {
    /// the power exponent `a`
    PowerA,
    /// the log exponent `b`
    LogB,
    /// the stretched coefficient `c`
    StretchC,
}

/// A named exponent the theory asserts exists somewhere in `[lo, hi]`
/// without pinning a value. The slot receives `base + sign·t` for a
/// profiled `t ∈ [lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeExponent {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub slot: FreeSlot,
    pub base: f64,
    pub sign: f64,
}

/// One side (lower or upper) of an asymptotic envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSide {
    /// The rate with any free slot resolved at the midpoint of its interval.
    pub rate: RateFunction,
    pub free: Option<FreeExponent>,
    /// True when the bound is asserted only along the distinguished axis
    /// ray (antisymmetric solutions), not on all of `R^d`.
    pub axis_only: bool,
}

impl EnvelopeSide {
    pub fn fixed(rate: RateFunction) -> Self {
        EnvelopeSide {
            rate,
            free: None,
            axis_only: false,
        }
    }

    pub fn with_free(rate: RateFunction, free: FreeExponent) -> Self {
        let mut side = EnvelopeSide {
            rate,
            free: Some(free),
            axis_only: false,
        };
        let mid = {
            let f = side.free.as_ref().unwrap();
            0.5 * (f.lo + f.hi)
        };
        side.rate = side.resolve(mid);
        side
    }

    pub fn axis_only(mut self) -> Self {
        self.axis_only = true;
        self
    }

    /// The rate with the free exponent pinned to `t` (clamped to its
    /// interval). Identity when there is no free exponent.
    pub fn resolve(&self, t: f64) -> RateFunction {
        let Some(free) = &self.free else {
            return self.rate;
        };
        let value = free.base + free.sign * t.clamp(free.lo, free.hi);
        let mut rate = self.rate;
        match (&mut rate.form, free.slot) {
            (RateForm::Power { a }, FreeSlot::PowerA) => *a = value,
            (RateForm::PowerLog { a, .. }, FreeSlot::PowerA) => *a = value,
            (RateForm::Stretched { a, .. }, FreeSlot::PowerA) => *a = value,
            (RateForm::PowerLog { b, .. }, FreeSlot::LogB) => *b = value,
            (RateForm::Stretched { b, .. }, FreeSlot::LogB) => *b = value,
            (RateForm::Stretched { c, .. }, FreeSlot::StretchC) => *c = value,
            _ => unreachable!("free slot incompatible with rate form"),
        }
        rate
    }
}

/// Predicted asymptotic envelope(s) for a decay scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePrediction {
    pub scenario: Scenario,
    pub lower: Option<EnvelopeSide>,
    pub upper: Option<EnvelopeSide>,
}

impl EnvelopePrediction {
    /// Headline polynomial decay exponent: the upper side's when present,
    /// otherwise the lower side's.
    pub fn power_exponent(&self) -> Option<f64> {
        self.upper
            .as_ref()
            .or(self.lower.as_ref())
            .map(|s| s.rate.power_exponent())
    }
}
