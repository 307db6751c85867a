//! Log–log least-squares fitting of decay samples and empirical envelope
//! checking.
//!
//! Fitting works in `(ln r, ln value)` coordinates, where every supported
//! rate family is linear in its parameters — except the stretched
//! exponent `δ`, which is profiled: the linear fit is repeated over a grid
//! of `δ` values and the residual minimum refined by ternary search.
//!
//! Envelope checking is deliberately weaker than a fit: an asymptotic
//! two-sided comparison allows arbitrary constants, so only *drift* of the
//! sample/envelope ratio in the falsifying direction counts — growth
//! against an upper envelope, shrinkage against a lower one. A wrong
//! exponent drifts without bound; a merely loose constant does not drift
//! at all.

use super::{DecayLabError, EnvelopePrediction, EnvelopeSide, RateFunction};
use serde::{Deserialize, Serialize};

/// Default multiplicative drift a sample/envelope ratio may show before
/// the envelope is declared violated.
pub const DEFAULT_ENVELOPE_BAND: f64 = 50.0;

const MIN_SAMPLES: usize = 8;
const MIN_DECADES: f64 = 3.0;

/// Which rate family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    Power,
    PowerLog,
    Stretched,
}

/// One fitted parameter with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
}

/// A fitted rate with parameter errors and residual diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: RateFunction,
    pub params: Vec<FitParam>,
    /// Residual sum of squares in log–log coordinates.
    pub rss: f64,
    /// Root-mean-square log residual.
    pub rms_log_residual: f64,
    pub n: usize,
}

impl DecayFit {
    /// Convenience accessor: the fitted value of a named parameter.
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }
}

fn validate_samples(samples: &[(f64, f64)], needs_log: bool) -> Result<(), DecayLabError> {
    if samples.len() < MIN_SAMPLES {
        return Err(DecayLabError::TooFewSamples {
            got: samples.len(),
            need: MIN_SAMPLES,
        });
    }
    let mut prev = 0.0_f64;
    for &(r, v) in samples {
        if !(r.is_finite() && r > prev) {
            return Err(DecayLabError::Domain(
                "radii must be finite, positive, and strictly increasing".into(),
            ));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(DecayLabError::NonPositive { r });
        }
        prev = r;
    }
    let decades = (samples[samples.len() - 1].0 / samples[0].0).log10();
    if decades < MIN_DECADES {
        return Err(DecayLabError::InsufficientRange {
            got: decades,
            need: MIN_DECADES,
        });
    }
    if needs_log && samples[0].0 <= 1.0 {
        return Err(DecayLabError::Domain(
            "log-factor models need all radii above 1".into(),
        ));
    }
    Ok(())
}

/// Solve the normal equations for `k ≤ 4` regressors; returns the
/// coefficients, the diagonal of `(XᵀX)⁻¹`, and the residual sum of
/// squares. Column-equilibrated Gauss–Jordan with partial pivoting.
fn least_squares(
    rows: &[[f64; 4]],
    k: usize,
    y: &[f64],
) -> Result<([f64; 4], [f64; 4], f64), DecayLabError> {
    debug_assert!((1..=4).contains(&k) && rows.len() == y.len());
    let mut xtx = [[0.0_f64; 4]; 4];
    let mut xty = [0.0_f64; 4];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in 0..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let mut scale = [0.0_f64; 4];
    for i in 0..k {
        if !(xtx[i][i] > 0.0 && xtx[i][i].is_finite()) {
            return Err(DecayLabError::IllConditioned);
        }
        scale[i] = 1.0 / xtx[i][i].sqrt();
    }
    // augmented [D·XᵀX·D | I] with unit diagonal on the left block
    let mut a = [[0.0_f64; 8]; 4];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = xtx[i][j] * scale[i] * scale[j];
        }
        a[i][k + i] = 1.0;
    }
    for col in 0..k {
        let mut pivot = col;
        for r in col + 1..k {
            if a[r][col].abs() > a[pivot][col].abs() {
                pivot = r;
            }
        }
        if a[pivot][col].abs() < 1e-12 {
            return Err(DecayLabError::IllConditioned);
        }
        a.swap(col, pivot);
        let inv = 1.0 / a[col][col];
        for v in a[col][..2 * k].iter_mut() {
            *v *= inv;
        }
        let prow = a[col];
        for (r, row) in a.iter_mut().enumerate().take(k) {
            if r != col && row[col] != 0.0 {
                let f = row[col];
                for (v, p) in row[..2 * k].iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
    }
    let mut beta = [0.0_f64; 4];
    let mut diag = [0.0_f64; 4];
    for i in 0..k {
        let mut acc = 0.0;
        for j in 0..k {
            let inv_ij = a[i][k + j] * scale[i] * scale[j];
            acc += inv_ij * xty[j];
            if i == j {
                diag[i] = inv_ij;
            }
        }
        beta[i] = acc;
    }
    let mut rss = 0.0;
    for (row, &yi) in rows.iter().zip(y) {
        let pred: f64 = (0..k).map(|i| row[i] * beta[i]).sum();
        rss += (yi - pred) * (yi - pred);
    }
    Ok((beta, diag, rss))
}

struct LinearFit {
    beta: [f64; 4],
    se: [f64; 4],
    rss: f64,
}

fn solve_with_errors(rows: &[[f64; 4]], k: usize, y: &[f64]) -> Result<LinearFit, DecayLabError> {
    let (beta, diag, rss) = least_squares(rows, k, y)?;
    let dof = (y.len() - k).max(1) as f64;
    let sigma2 = rss / dof;
    let mut se = [0.0_f64; 4];
    for i in 0..k {
        se[i] = (sigma2 * diag[i].max(0.0)).sqrt();
    }
    Ok(LinearFit { beta, se, rss })
}

/// Fit a decay-rate family to `(r, value)` samples by least squares in
/// log–log coordinates. `model` defaults to a pure power fit.
///
/// Needs at least 8 samples with strictly increasing radii spanning three
/// decades; all values must be positive.
pub fn fit_decay(
    samples: &[(f64, f64)],
    model: Option<FitModel>,
) -> Result<DecayFit, DecayLabError> {
    let model = model.unwrap_or(FitModel::Power);
    validate_samples(samples, !matches!(model, FitModel::Power))?;
    let t: Vec<f64> = samples.iter().map(|&(r, _)| r.ln()).collect();
    let y: Vec<f64> = samples.iter().map(|&(_, v)| v.ln()).collect();
    let n = samples.len();
    let valid_from = samples[0].0;

    match model {
        FitModel::Power => {
            let rows: Vec<[f64; 4]> = t.iter().map(|&ti| [1.0, ti, 0.0, 0.0]).collect();
            let fit = solve_with_errors(&rows, 2, &y)?;
            let a = -fit.beta[1];
            Ok(DecayFit {
                rate: RateFunction::power(a).with_valid_from(valid_from),
                params: vec![
                    FitParam {
                        name: "a".into(),
                        value: a,
                        std_error: fit.se[1],
                    },
                    FitParam {
                        name: "ln_scale".into(),
                        value: fit.beta[0],
                        std_error: fit.se[0],
                    },
                ],
                rss: fit.rss,
                rms_log_residual: (fit.rss / n as f64).sqrt(),
                n,
            })
        }
        FitModel::PowerLog => {
            let rows: Vec<[f64; 4]> = t.iter().map(|&ti| [1.0, ti, ti.ln(), 0.0]).collect();
            let fit = solve_with_errors(&rows, 3, &y)?;
            let (a, b) = (-fit.beta[1], -fit.beta[2]);
            Ok(DecayFit {
                rate: RateFunction::power_log(a, b).with_valid_from(valid_from),
                params: vec![
                    FitParam {
                        name: "a".into(),
                        value: a,
                        std_error: fit.se[1],
                    },
                    FitParam {
                        name: "b".into(),
                        value: b,
                        std_error: fit.se[2],
                    },
                    FitParam {
                        name: "ln_scale".into(),
                        value: fit.beta[0],
                        std_error: fit.se[0],
                    },
                ],
                rss: fit.rss,
                rms_log_residual: (fit.rss / n as f64).sqrt(),
                n,
            })
        }
        FitModel::Stretched => fit_stretched(&t, &y, n, valid_from),
    }
}

/// Stretched fit: linear in `(1, t, ln t, t^{1-δ})` for fixed `δ`, with
/// `δ` profiled over a grid and the residual minimum refined by ternary
/// search.
fn fit_stretched(
    t: &[f64],
    y: &[f64],
    n: usize,
    valid_from: f64,
) -> Result<DecayFit, DecayLabError> {
    let rows_at = |delta: f64| -> Vec<[f64; 4]> {
        t.iter()
            .map(|&ti| [1.0, ti, ti.ln(), ti.powf(1.0 - delta)])
            .collect()
    };
    let rss_at =
        |delta: f64| -> Result<f64, DecayLabError> { Ok(least_squares(&rows_at(delta), 4, y)?.2) };

    let mut best_delta = 0.5;
    let mut best_rss = f64::INFINITY;
    for i in 1..=49 {
        let delta = 0.02 * i as f64;
        let rss = rss_at(delta)?;
        if rss < best_rss {
            best_rss = rss;
            best_delta = delta;
        }
    }
    let (mut lo, mut hi) = (
        (best_delta - 0.02).max(0.005),
        (best_delta + 0.02).min(0.995),
    );
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if rss_at(m1)? < rss_at(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let delta = 0.5 * (lo + hi);
    let fit = solve_with_errors(&rows_at(delta), 4, y)?;
    let (a, b) = (-fit.beta[1], -fit.beta[2]);
    let c = fit.beta[3] * (1.0 - delta);

    // profile-curvature standard error for δ: RSS ≈ RSS* + ½ R'' (δ-δ*)²,
    // Var(δ̂) ≈ 2σ̂² / R''
    let eps = 0.01_f64.min(delta - 0.001).min(0.999 - delta);
    let sigma2 = fit.rss / (n - 4).max(1) as f64;
    let curvature = (rss_at(delta + eps)? - 2.0 * fit.rss + rss_at(delta - eps)?) / (eps * eps);
    let delta_se = if curvature > 0.0 {
        (2.0 * sigma2 / curvature).sqrt()
    } else {
        f64::INFINITY
    };

    Ok(DecayFit {
        rate: RateFunction::stretched(a, b, c, delta).with_valid_from(valid_from),
        params: vec![
            FitParam {
                name: "a".into(),
                value: a,
                std_error: fit.se[1],
            },
            FitParam {
                name: "b".into(),
                value: b,
                std_error: fit.se[2],
            },
            FitParam {
                name: "c".into(),
                value: c,
                std_error: fit.se[3] * (1.0 - delta),
            },
            FitParam {
                name: "delta".into(),
                value: delta,
                std_error: delta_se,
            },
            FitParam {
                name: "ln_scale".into(),
                value: fit.beta[0],
                std_error: fit.se[0],
            },
        ],
        rss: fit.rss,
        rms_log_residual: (fit.rss / n as f64).sqrt(),
        n,
    })
}

/// Verdict for one side of an envelope comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideCheck {
    /// Smallest and largest sample/envelope ratio over the compared range
    /// (diagnostics: a loose but valid bound shows a wide spread here).
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Largest forward drift of the ratio in the falsifying direction —
    /// growth against an upper envelope, shrinkage against a lower one.
    pub drift: f64,
    /// Profiled value of the side's free exponent, when it has one.
    pub free_value: Option<f64>,
    /// The rate actually compared against (free exponent resolved).
    pub resolved: RateFunction,
    pub pass: bool,
}

/// Verdict of [`check_envelope`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub band: f64,
    pub lower: Option<SideCheck>,
    pub upper: Option<SideCheck>,
    pub pass: bool,
}

enum Direction {
    Lower,
    Upper,
}

/// Compare positive `(r, value)` samples against an envelope prediction.
///
/// Each present side passes when the sample/envelope ratio drifts by at
/// most `band` (default [`DEFAULT_ENVELOPE_BAND`]) in the direction that
/// would falsify the bound, after any free exponent is profiled over its
/// allowed interval. Samples below a side's validity radius are ignored
/// for that side.
pub fn check_envelope(
    samples: &[(f64, f64)],
    prediction: &EnvelopePrediction,
    band: Option<f64>,
) -> Result<EnvelopeCheck, DecayLabError> {
    let band = band.unwrap_or(DEFAULT_ENVELOPE_BAND);
    if !(band > 1.0 && band.is_finite()) {
        return Err(DecayLabError::Domain(format!(
            "band factor must be a finite value above 1, got {band}"
        )));
    }
    let lower = prediction
        .lower
        .as_ref()
        .map(|side| check_side(samples, side, band, Direction::Lower))
        .transpose()?;
    let upper = prediction
        .upper
        .as_ref()
        .map(|side| check_side(samples, side, band, Direction::Upper))
        .transpose()?;
    let pass = lower.as_ref().is_none_or(|s| s.pass) && upper.as_ref().is_none_or(|s| s.pass);
    Ok(EnvelopeCheck {
        band,
        lower,
        upper,
        pass,
    })
}

fn check_side(
    samples: &[(f64, f64)],
    side: &EnvelopeSide,
    band: f64,
    direction: Direction,
) -> Result<SideCheck, DecayLabError> {
    let mut pts = Vec::with_capacity(samples.len());
    for &(r, v) in samples {
        if !r.is_finite() || r < side.rate.valid_from {
            continue;
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(DecayLabError::NonPositive { r });
        }
        pts.push((r, v.ln()));
    }
    if pts.len() < 2 {
        return Err(DecayLabError::Domain(
            "fewer than two samples at or beyond the envelope's validity radius".into(),
        ));
    }

    // (falsifying drift, total spread) of the log ratio for a candidate
    // free-exponent value
    let score_at = |t: f64| -> (f64, f64) {
        let rate = side.resolve(t);
        let mut extreme = match direction {
            Direction::Upper => f64::INFINITY,
            Direction::Lower => f64::NEG_INFINITY,
        };
        let mut worst = 0.0_f64;
        let mut q_lo = f64::INFINITY;
        let mut q_hi = f64::NEG_INFINITY;
        for &(r, ln_v) in &pts {
            let q = ln_v - rate.ln_eval(r);
            q_lo = q_lo.min(q);
            q_hi = q_hi.max(q);
            match direction {
                // growth of the ratio past its running minimum
                Direction::Upper => {
                    extreme = extreme.min(q);
                    worst = worst.max(q - extreme);
                }
                // shrinkage of the ratio below its running maximum
                Direction::Lower => {
                    extreme = extreme.max(q);
                    worst = worst.max(extreme - q);
                }
            }
        }
        (worst, q_hi - q_lo)
    };
    // drift decides, spread breaks ties: many exponents can satisfy a
    // one-sided bound equally well (zero drift), and among those the one
    // tracking the data most tightly is the informative report
    let better = |a: (f64, f64), b: (f64, f64)| -> bool {
        a.0 < b.0 - 1e-9 || (a.0 < b.0 + 1e-9 && a.1 < b.1)
    };

    let free_value = match &side.free {
        None => None,
        Some(free) => {
            let (mut lo, mut hi) = (free.lo, free.hi);
            let mut best_t = lo;
            let mut best = (f64::INFINITY, f64::INFINITY);
            // plateaus are expected, so minimize on a shrinking grid
            // rather than by ternary search
            for _ in 0..3 {
                let n = 32;
                for i in 0..=n {
                    let t = lo + (hi - lo) * i as f64 / n as f64;
                    let score = score_at(t);
                    if better(score, best) {
                        best = score;
                        best_t = t;
                    }
                }
                let w = (hi - lo) / n as f64;
                lo = (best_t - w).max(free.lo);
                hi = (best_t + w).min(free.hi);
            }
            Some(best_t)
        }
    };

    let resolved = side.resolve(free_value.unwrap_or(0.0));
    let drift_ln = score_at(free_value.unwrap_or(0.0)).0;
    let mut q_min = f64::INFINITY;
    let mut q_max = f64::NEG_INFINITY;
    for &(r, ln_v) in &pts {
        let q = ln_v - resolved.ln_eval(r);
        q_min = q_min.min(q);
        q_max = q_max.max(q);
    }
    Ok(SideCheck {
        ratio_min: q_min.exp(),
        ratio_max: q_max.exp(),
        drift: drift_ln.exp(),
        free_value,
        resolved,
        pass: drift_ln <= band.ln(),
    })
}
