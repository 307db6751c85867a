//! Shared one-dimensional quadrature: Gauss–Legendre rules and panel
//! integration over explicit breakpoint lists.

/// Gauss–Legendre rule on the reference interval `[-1, 1]`.
///
/// Nodes are computed by Newton iteration on the Legendre recurrence, which
/// is accurate to machine precision for the orders used here (n ≤ 64).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre order must be at least 2");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over consecutive panels `[breaks[i], breaks[i+1]]`.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    breaks: &[f64],
    mut f: F,
) -> f64 {
    let mut acc = 0.0;
    for pair in breaks.windows(2) {
        acc += rule.integrate(pair[0], pair[1], &mut f);
    }
    acc
}

/// Uniform panel breakpoints over `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let panels = panels.max(1);
    (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect()
}

/// Breakpoints over `[a, b]` refined geometrically toward a feature at
/// `center` (interior or an endpoint) with half-width `width`: the feature
/// interval is covered by panels of width ≥ `width`, growing by factor 2
/// away from it.
pub fn feature_breaks(a: f64, b: f64, center: f64, width: f64, base_panels: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = uniform_breaks(a, b, base_panels);
    if width > 0.0 && center >= a && center <= b {
        let mut w = width;
        let mut lo = center - w;
        let mut hi = center + w;
        if center > a && center < b {
            pts.push(center);
        }
        // dyadically growing shells around the feature
        for _ in 0..40 {
            if lo > a {
                pts.push(lo);
            }
            if hi < b {
                pts.push(hi);
            }
            if lo <= a && hi >= b {
                break;
            }
            w *= 2.0;
            lo = center - w;
            hi = center + w;
        }
    }
    pts.sort_by(|p, q| p.partial_cmp(q).expect("finite breakpoints"));
    pts.dedup_by(|p, q| (*p - *q).abs() < 1e-300);
    // drop breakpoints that crowd each other closer than a tiny fraction of
    // the enclosing span (keeps panel counts bounded)
    let span = b - a;
    let mut out = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|&last: &f64| p - last > 1e-9 * span) {
            out.push(p);
        }
    }
    if let Some(last) = out.last_mut() {
        *last = b;
    }
    out
}
