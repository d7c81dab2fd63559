//! Small 1-D optimisation and normal-distribution helpers.

use statrs::function::erf::{erfc, erfc_inv};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximize `f` over `[a, b]`: dense grid of `points` nodes, then golden-section
/// refinement around the best node. Endpoints and grid nodes are always candidates.
pub(crate) fn grid_golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, points: usize) -> (f64, f64) {
    let points = points.max(3);
    let step = (b - a) / (points - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..points {
        let v = f(a + step * i as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = (a + step * (best_i + 1) as f64).min(b);
    let (x, v) = golden_max(f, lo, hi, 1e-12 * (1.0 + (b - a).abs()));
    if v >= best_v {
        (x, v)
    } else {
        (a + step * best_i as f64, best_v)
    }
}

/// Standard normal distribution function Φ(x) via erfc.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of the standard normal complementary distribution function, Q⁻¹(ε).
pub fn normal_quantile_upper(eps: f64) -> f64 {
    let x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * eps);
    if !x.is_finite() {
        return x;
    }
    // one Newton step on Q(x) = ε tightens the series approximation
    let q = 1.0 - normal_cdf(x);
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 0.0 {
        x + (q - eps) / pdf
    } else {
        x
    }
}

/// Shannon-style x·ln x with 0·ln 0 = 0.
#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Entropy in nats of a nonnegative vector (not required to be normalised).
pub(crate) fn entropy_nats(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlnx(x)).sum::<f64>()
}
