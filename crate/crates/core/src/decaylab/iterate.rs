//! Comparison kernels, shell masses, and the self-improving iteration
//! bounds.
//!
//! For two positive rates `u`, `v` on `r ≥ R0` the comparison kernel is
//! `K(r) = u(r)/v(r)`, and its accumulated shell mass is
//!
//! ```text
//! h(r) = ∫_{R0 ≤ |y| ≤ r} K(|y|) dy = |S^{d-1}| ∫_{R0}^{r} K(s) s^{d-1} ds.
//! ```
//!
//! Pure power kernels integrate in closed form (with the `a = d` case
//! giving a logarithm); any log factor is handled by Gauss–Legendre panels
//! in `ln s`, opened geometrically at the inner edge where `(log s)^{-b}`
//! can be steep.
//!
//! The two iteration bounds are truncated exponential series: repeating a
//! one-step comparison estimate `p` times yields partial sums of
//! `e^{ηh}` whose limits are the closed-form envelopes the shell mass
//! feeds into.

use super::{DecayLabError, RateForm, RateFunction};
use crate::fraclap::sphere_area;
use crate::quad::{integrate_panels, GaussLegendre};

/// `K_{u,v}(r) = u(r)/v(r)` together with the shell mass
/// `h_{u,v}(r) = ∫_{R0 ≤ |y| ≤ r} K_{u,v}(|y|) dy`, returned as `(K, h)`.
///
/// Requires `1 ≤ R0 ≤ r` and `R0` at or past both rates' `valid_from`;
/// kernels with a log factor additionally need `R0 > 1` so the factor is
/// finite on the whole shell.
pub fn kernel_and_shell_mass(
    u: &RateFunction,
    v: &RateFunction,
    r0: f64,
    r: f64,
    d: usize,
) -> Result<(f64, f64), DecayLabError> {
    if !(1..=3).contains(&d) {
        return Err(DecayLabError::Domain(format!(
            "dimension must be 1, 2, or 3, got {d}"
        )));
    }
    if !(r0 >= 1.0 && r >= r0) {
        return Err(DecayLabError::Domain(format!(
            "need 1 ≤ R0 ≤ r, got R0 = {r0}, r = {r}"
        )));
    }
    let logs_present = u.has_log_factor() || v.has_log_factor();
    if logs_present && r0 <= 1.0 {
        return Err(DecayLabError::Domain(format!(
            "a log-factor kernel needs R0 > 1, got {r0}"
        )));
    }
    if r0 < u.valid_from || r0 < v.valid_from {
        return Err(DecayLabError::Domain(format!(
            "R0 = {r0} is below a rate's validity radius ({} / {})",
            u.valid_from, v.valid_from
        )));
    }

    let kernel = (u.ln_eval(r) - v.ln_eval(r)).exp();
    let radial = match (u.form, v.form) {
        (RateForm::Power { a: au }, RateForm::Power { a: av }) => {
            power_shell_integral(au - av, r0, r, d)
        }
        _ => log_shell_integral(u, v, r0, r, d),
    };
    Ok((kernel, sphere_area(d) * radial))
}

/// `∫_{R0}^{r} s^{d-1-a} ds`, written through `expm1` so the near-`a = d`
/// regime degrades smoothly into the logarithmic case instead of
/// cancelling.
fn power_shell_integral(a: f64, r0: f64, r: f64, d: usize) -> f64 {
    let m = d as f64 - a;
    let span = (r / r0).ln();
    if m == 0.0 {
        span
    } else {
        r0.powf(m) * (m * span).exp_m1() / m
    }
}

/// Quadrature fallback in `t = ln s`: the integrand becomes
/// `exp(ln u(s) - ln v(s) + d·t)`, smooth except possibly at the inner
/// edge where an integrable `t^{-b}` shape can appear.
fn log_shell_integral(u: &RateFunction, v: &RateFunction, r0: f64, r: f64, d: usize) -> f64 {
    let t0 = r0.ln();
    let t1 = r.ln();
    if t1 <= t0 {
        return 0.0;
    }
    let rule = GaussLegendre::new(16);
    integrate_panels(&rule, &edge_opened_breaks(t0, t1), |t| {
        let s = t.exp();
        (u.ln_eval(s) - v.ln_eval(s) + d as f64 * t).exp()
    })
}

/// Panel breakpoints on `[t0, t1]` (`t = ln s`): geometric opening from
/// the inner edge while `t` is small, then uniform panels at most `0.5`
/// wide.
fn edge_opened_breaks(t0: f64, t1: f64) -> Vec<f64> {
    debug_assert!(t0 > 0.0 && t1 > t0);
    let mut breaks = vec![t0];
    let mut t = t0;
    while t * 1.6 < t1 && t < 2.0 {
        t *= 1.6;
        breaks.push(t);
    }
    let start = *breaks.last().expect("nonempty by construction");
    let panels = ((t1 - start) / 0.5).ceil().max(1.0) as usize;
    for k in 1..=panels {
        breaks.push(start + (t1 - start) * k as f64 / panels as f64);
    }
    breaks
}

/// First `p` terms of `e^x`: `Σ_{k=1}^{p} x^{k-1}/(k-1)!`.
fn exp_partial_sum(x: f64, p: u32) -> f64 {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..p {
        term *= x / k as f64;
        sum += term;
    }
    sum
}

/// Value of the `p`-th upper self-improvement bound
/// `c3·‖f‖·[K Σ_{k=1}^{p} (ηh)^{k-1}/(k-1)! + c4^p]`.
///
/// `c4 ∈ (0,1)` is the per-step contraction of the remainder; as `p → ∞`
/// the value converges to [`upper_iteration_limit`].
pub fn upper_iteration(p: u32, k: f64, h: f64, c3: f64, c4: f64, eta: f64, norm_f: f64) -> f64 {
    assert!(p >= 1, "the bound needs at least one iteration step");
    assert!(
        c4 > 0.0 && c4 < 1.0,
        "contraction factor must lie in (0,1), got {c4}"
    );
    c3 * norm_f * (k * exp_partial_sum(eta * h, p) + c4.powi(p as i32))
}

/// `lim_{p→∞}` of [`upper_iteration`]: `c3·‖f‖·K·e^{ηh}`.
pub fn upper_iteration_limit(k: f64, h: f64, c3: f64, eta: f64, norm_f: f64) -> f64 {
    c3 * norm_f * k * (eta * h).exp()
}

/// Value of the `p`-th lower self-improvement bound
/// `η K Σ_{k=1}^{p} (η(h - h1))^{k-1}/(k-1)!` where `h1` is the shell
/// mass at the inner comparison radius.
pub fn lower_iteration(p: u32, k: f64, h: f64, h1: f64, eta: f64) -> f64 {
    assert!(p >= 1, "the bound needs at least one iteration step");
    assert!(h >= h1, "shell mass is nondecreasing: h = {h} < h1 = {h1}");
    eta * k * exp_partial_sum(eta * (h - h1), p)
}

/// `lim_{p→∞}` of [`lower_iteration`]: `η·K·e^{η(h - h1)}`.
pub fn lower_iteration_limit(k: f64, h: f64, h1: f64, eta: f64) -> f64 {
    eta * k * (eta * (h - h1)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn equal_rates_integrate_to_shell_volume() {
        let u = RateFunction::power(1.7);
        let r = 10.0_f64;
        for (d, ball_volume) in [(1, 2.0), (2, PI), (3, 4.0 * PI / 3.0)] {
            let (k, h) = kernel_and_shell_mass(&u, &u, 1.0, r, d).unwrap();
            assert_relative_eq!(k, 1.0, max_relative = 1e-14);
            let want = ball_volume * (r.powi(d as i32) - 1.0);
            assert_relative_eq!(h, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn unit_power_gap_gives_logarithmic_mass() {
        let u = RateFunction::power(2.0);
        let v = RateFunction::power(1.0);
        for r in [10.0_f64, 1.0e3, 1.0e6] {
            let (k, h) = kernel_and_shell_mass(&u, &v, 1.0, r, 1).unwrap();
            assert_relative_eq!(k, 1.0 / r, max_relative = 1e-13);
            assert_relative_eq!(h, 2.0 * r.ln(), max_relative = 1e-13);
        }
    }

    #[test]
    fn integrable_ratio_has_finite_total_mass() {
        // kernel r^{-1-alpha} / r^{-beta} with beta < alpha: total mass
        // 2/(alpha - beta) on the line
        let alpha = 1.2;
        let beta = 0.5;
        let u = RateFunction::power(1.0 + alpha);
        let v = RateFunction::power(beta);
        let total = 2.0 / (alpha - beta);
        let mut last = 0.0;
        for r in [1.0e2_f64, 1.0e6, 1.0e12] {
            let (_, h) = kernel_and_shell_mass(&u, &v, 1.0, r, 1).unwrap();
            let want = total * (1.0 - r.powf(beta - alpha));
            assert_relative_eq!(h, want, max_relative = 1e-12);
            assert!(h > last && h < total);
            last = h;
        }
    }

    #[test]
    fn quadrature_matches_log_antiderivatives() {
        // kernels s^{-d} (ln s)^{-b} over [R0, r] have elementary shell
        // masses for b = 2, 1, -1; the quadrature path must reproduce them
        let d = 2;
        let sphere = 2.0 * PI;
        let (r0, r) = (3.0_f64, 1.0e6_f64);
        let v = RateFunction::power(1.0);

        let u = RateFunction::power_log(3.0, 2.0);
        let (_, h) = kernel_and_shell_mass(&u, &v, r0, r, d).unwrap();
        assert_relative_eq!(
            h,
            sphere * (1.0 / r0.ln() - 1.0 / r.ln()),
            max_relative = 1e-11
        );

        let u = RateFunction::power_log(3.0, 1.0);
        let (_, h) = kernel_and_shell_mass(&u, &v, r0, r, d).unwrap();
        assert_relative_eq!(
            h,
            sphere * (r.ln().ln() - r0.ln().ln()),
            max_relative = 1e-11
        );

        let u = RateFunction::power_log(3.0, -1.0);
        let (_, h) = kernel_and_shell_mass(&u, &v, r0, r, d).unwrap();
        assert_relative_eq!(
            h,
            sphere * 0.5 * (r.ln().powi(2) - r0.ln().powi(2)),
            max_relative = 1e-11
        );
    }

    #[test]
    fn quadrature_handles_steep_inner_edge() {
        // kernel s^{-1} (ln s)^{-1/2} is steep near R0 = 1.05 but
        // integrable; on the line the shell mass is 2·[2 sqrt(ln s)]
        let u = RateFunction::power_log(2.0, 0.5).with_valid_from(1.05);
        let v = RateFunction::power(1.0);
        let (r0, r) = (1.05_f64, 1.0e4_f64);
        let (_, h) = kernel_and_shell_mass(&u, &v, r0, r, 1).unwrap();
        let want = 2.0 * 2.0 * (r.ln().sqrt() - r0.ln().sqrt());
        assert_relative_eq!(h, want, max_relative = 1e-9);
    }

    #[test]
    fn input_validation_rejects_bad_shells() {
        let u = RateFunction::power(1.0);
        assert!(kernel_and_shell_mass(&u, &u, 1.0, 2.0, 4).is_err());
        assert!(kernel_and_shell_mass(&u, &u, 0.5, 2.0, 1).is_err());
        assert!(kernel_and_shell_mass(&u, &u, 3.0, 2.0, 1).is_err());
        // log kernel with R0 below its validity radius
        let w = RateFunction::power_log(2.0, 1.0);
        assert!(kernel_and_shell_mass(&w, &u, 2.0, 10.0, 1).is_err());
        // r = R0 is a legal degenerate shell
        let (_, h) = kernel_and_shell_mass(&u, &u, 2.0, 2.0, 1).unwrap();
        assert_eq!(h, 0.0);
    }

    proptest! {
        // the closed power form and the quadrature fallback are two routes
        // to the same integral; a zero-log-exponent kernel forces the
        // quadrature path on identical values
        #[test]
        fn power_shell_closed_form_matches_quadrature(
            au in 0.2_f64..4.0,
            av in 0.2_f64..2.0,
            r0 in 1.2_f64..5.0,
            span in 0.5_f64..8.0,
            d in 1_usize..=3,
        ) {
            let r = r0 * 10.0_f64.powf(span);
            let exact = kernel_and_shell_mass(
                &RateFunction::power(au),
                &RateFunction::power(av),
                r0, r, d,
            ).unwrap().1;
            let quad = kernel_and_shell_mass(
                &RateFunction::power_log(au, 0.0).with_valid_from(1.1),
                &RateFunction::power(av),
                r0, r, d,
            ).unwrap().1;
            prop_assert!(
                (quad - exact).abs() <= 1e-8 * exact.abs().max(1e-300),
                "quad {quad} vs exact {exact}"
            );
        }
    }

    #[test]
    fn upper_iteration_first_step_is_exact() {
        let (k, h, c3, c4, eta, nf) = (0.3, 7.0, 1.4, 0.25, 0.9, 2.0);
        assert_relative_eq!(
            upper_iteration(1, k, h, c3, c4, eta, nf),
            c3 * nf * (k + c4),
            max_relative = 1e-15
        );
    }

    #[test]
    fn upper_iteration_converges_to_its_limit() {
        for &(k, h, c3, c4, eta, nf) in &[
            (1.0, 20.0, 1.0, 0.7, 1.0, 1.0),
            (1e-3, 4.0, 0.5, 0.05, 2.0, 1.0),
            (0.2, 13.0, 2.0, 0.5, 1.0, 0.7),
            (1.0, 0.05, 1.0, 0.7, 1.0, 1.0),
        ] {
            let limit = upper_iteration_limit(k, h, c3, eta, nf);
            for p in [80, 100, 200] {
                let got = upper_iteration(p, k, h, c3, c4, eta, nf);
                let rel = (got - limit).abs() / limit;
                assert!(rel < 1e-12, "p = {p}: relative gap {rel}");
            }
        }
    }

    #[test]
    fn upper_iteration_series_term_is_monotone() {
        let (k, h, c3, c4, eta, nf) = (0.8, 6.0, 1.0, 0.3, 1.5, 1.0);
        let series =
            |p: u32| upper_iteration(p, k, h, c3, c4, eta, nf) / (c3 * nf) - c4.powi(p as i32);
        let mut prev = series(1);
        // strictly increasing while increments stay above round-off, never
        // decreasing or past the limit afterwards
        for p in 2..30 {
            let next = series(p);
            assert!(next > prev, "series sum must grow with p");
            prev = next;
        }
        for p in 30..60 {
            let next = series(p);
            assert!(next >= prev);
            assert!(next <= k * (eta * h).exp() * (1.0 + 1e-12));
            prev = next;
        }
    }

    #[test]
    fn lower_iteration_base_cases_and_limit() {
        let (k, h, h1, eta) = (0.7, 9.0, 2.0, 1.1);
        // p = 1 collapses to η K, as does any p when h = h1
        assert_relative_eq!(lower_iteration(1, k, h, h1, eta), eta * k);
        for p in [1, 5, 50] {
            assert_relative_eq!(lower_iteration(p, k, h, h, eta), eta * k);
        }
        let limit = lower_iteration_limit(k, h, h1, eta);
        assert_relative_eq!(limit, eta * k * (eta * (h - h1)).exp());
        for p in [80, 120] {
            let rel = (lower_iteration(p, k, h, h1, eta) - limit).abs() / limit;
            assert!(rel < 1e-12, "p = {p}: relative gap {rel}");
        }
    }

    #[test]
    #[should_panic(expected = "at least one iteration")]
    fn iterations_require_a_step() {
        let _ = lower_iteration(0, 1.0, 2.0, 1.0, 1.0);
    }
}
