use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numeric::{grid_golden_max, normal_quantile_upper};
use crate::prob_core::Dist;
use crate::{Base, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateDirection {
    /// Intrinsic randomness / maximal coding rate: H − √(V/n)·Q⁻¹(ε).
    Source,
    /// Resolvability (minimal rate): H + √(V/n)·Q⁻¹(ε).
    Resolvability,
}

impl FromStr for RateDirection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(RateDirection::Source),
            "resolvability" => Ok(RateDirection::Resolvability),
            _ => Err(Error::InvalidParameter(format!("direction must be source or resolvability, got {s}"))),
        }
    }
}

/// Normal approximation H(P) ∓ √(V(P)/n)·Q⁻¹(ε), V the varentropy.
pub fn second_order_rate(p: &Dist, epsilon: f64, n: usize, direction: RateDirection, base: Base) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let info: Vec<(f64, f64)> = p.probs().iter().filter(|&&v| v > 0.0).map(|&v| (v, -v.ln())).collect();
    let h: f64 = info.iter().map(|(v, i)| v * i).sum();
    let var: f64 = info.iter().map(|(v, i)| v * (i - h).powi(2)).sum();
    let q = if epsilon == 0.5 { 0.0 } else { normal_quantile_upper(epsilon) };
    let shift = (var / n as f64).sqrt() * q;
    let rate = match direction {
        RateDirection::Source => h - shift,
        RateDirection::Resolvability => h + shift,
    };
    Ok(base.from_nats(rate))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MuEpsilon {
    pub value: f64,
    pub theta: f64,
    pub xi: f64,
    /// The infimum is approached on the open boundary of (ε, 1)² rather than attained.
    pub open_boundary: bool,
}

const GRID: usize = 500;

/// μ(ε) = inf {1 − (1−θ)(1−ξ) : θ, ξ ∈ (ε, 1),
/// 2(1−ρ_m)√(ξ(1−ξ)(θξ−ε)(θ(1−ξ)+ε)) ≤ ε}.
///
/// A negative radicand leaves the constraint undefined and is treated as
/// infeasible, except when ρ_m = 1 where the left side vanishes identically.
pub fn mu_epsilon(rho_m: f64, epsilon: f64) -> Result<MuEpsilon> {
    if !(0.0..=1.0).contains(&rho_m) {
        return Err(Error::InvalidParameter("rho_m must lie in [0, 1]".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
    }
    let eps = epsilon;
    let feasible = |theta: f64, xi: f64| -> bool {
        if rho_m == 1.0 {
            return true;
        }
        let rad = xi * (1.0 - xi) * (theta * xi - eps) * (theta * (1.0 - xi) + eps);
        rad >= 0.0 && 2.0 * (1.0 - rho_m) * rad.sqrt() <= eps
    };
    let obj = |theta: f64, xi: f64| 1.0 - (1.0 - theta) * (1.0 - xi);
    let node = |i: usize| eps + (1.0 - eps) * (i as f64 + 0.5) / GRID as f64;

    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..GRID {
        for k in 0..GRID {
            let (t, x) = (node(i), node(k));
            if feasible(t, x) {
                let v = obj(t, x);
                if best.is_none_or(|b| v < b.0) {
                    best = Some((v, t, x));
                }
            }
        }
    }
    let Some((_, _, xi0)) = best else {
        return Ok(MuEpsilon { value: 1.0, theta: 1.0, xi: 1.0, open_boundary: true });
    };

    // Refinement: the objective grows in θ, and for fixed ξ the feasible θ form an
    // interval (the left side grows with θ once the radicand is non-negative), so
    // only its left end θ_min(ξ) matters; then a 1-D search over ξ.
    let theta_min = |xi: f64| -> Option<f64> {
        let lo = if rho_m == 1.0 { eps } else { eps.max(eps / xi) };
        if lo >= 1.0 {
            return None;
        }
        if feasible(lo, xi) {
            return Some(lo);
        }
        let hi = 1.0 - 1e-15;
        if !feasible(hi, xi) {
            return None;
        }
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if feasible(m, xi) {
                b = m;
            } else {
                a = m;
            }
        }
        Some(b)
    };
    let neg = |xi: f64| theta_min(xi).map_or(f64::NEG_INFINITY, |t| -obj(t, xi));
    let step = (1.0 - eps) / GRID as f64;
    let (xi, nv) = grid_golden_max(&neg, (xi0 - 10.0 * step).max(eps), (xi0 + 10.0 * step).min(1.0), 81);
    let (xi, value) = if -nv <= best.unwrap().0 { (xi, -nv) } else { (xi0, best.unwrap().0) };
    let theta = theta_min(xi).unwrap_or(best.unwrap().1);
    let edge = 1e-6 * (1.0 - eps);
    let open_boundary = theta - eps <= edge || xi - eps <= edge || 1.0 - theta <= edge || 1.0 - xi <= edge;
    if open_boundary && rho_m == 1.0 {
        // the limit θ, ξ → ε
        return Ok(MuEpsilon { value: 1.0 - (1.0 - eps).powi(2), theta: eps, xi: eps, open_boundary });
    }
    Ok(MuEpsilon { value, theta, xi, open_boundary })
}
