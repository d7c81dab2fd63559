//! Distances, divergences and entropies.

use serde::Serialize;

use super::dist::{Dist, JointDist};
use crate::numeric::{entropy_nats, grid_golden_max, xlnx};
use crate::{Base, Result};

/// Total variation distance ½·Σ|P − Q|.
pub fn tv_distance(p: &Dist, q: &Dist) -> Result<f64> {
    p.same_alphabet(q)?;
    Ok(tv_vec(p.probs(), q.probs()))
}

pub(crate) fn tv_vec(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Relative entropy D(P‖Q); `+∞` when P puts mass where Q does not.
pub fn kl_divergence(p: &Dist, q: &Dist, base: Base) -> Result<f64> {
    p.same_alphabet(q)?;
    Ok(base.from_nats(kl_nats(p.probs(), q.probs())))
}

pub(crate) fn kl_nats(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d.max(0.0)
}

/// Shannon entropy of a distribution.
pub fn entropy(p: &Dist, base: Base) -> f64 {
    base.from_nats(entropy_nats(p.probs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct InformationMeasures {
    pub H_X: f64,
    pub H_Y: f64,
    pub H_XY: f64,
    pub H_Y_given_X: f64,
    pub H_X_given_Y: f64,
    pub I_XY: f64,
}

pub fn information_measures(j: &JointDist, base: Base) -> InformationMeasures {
    let hx = entropy_nats(j.row_marginal().probs());
    let hy = entropy_nats(j.col_marginal().probs());
    let hxy = -j.mass().iter().flatten().map(|&v| xlnx(v)).sum::<f64>();
    let b = |v: f64| base.from_nats(v);
    InformationMeasures {
        H_X: b(hx),
        H_Y: b(hy),
        H_XY: b(hxy),
        H_Y_given_X: b((hxy - hx).max(0.0)),
        H_X_given_Y: b((hxy - hy).max(0.0)),
        I_XY: b((hx + hy - hxy).max(0.0)),
    }
}

/// Rényi entropy of order `alpha ∈ [0, ∞]`.
pub fn renyi_entropy(p: &Dist, alpha: f64, base: Base) -> f64 {
    base.from_nats(renyi_nats(p.probs(), alpha))
}

pub(crate) fn renyi_nats(p: &[f64], alpha: f64) -> f64 {
    assert!(alpha >= 0.0, "Rényi order must be nonnegative");
    if alpha == 0.0 {
        (p.iter().filter(|&&x| x > 0.0).count() as f64).ln()
    } else if alpha == 1.0 {
        entropy_nats(p)
    } else if alpha.is_infinite() {
        -p.iter().copied().fold(0.0, f64::max).ln()
    } else {
        // factor out the largest mass so large orders do not underflow
        let m = p.iter().copied().fold(0.0, f64::max);
        let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| (x / m).powf(alpha)).sum();
        (alpha * m.ln() + s.ln()) / (1.0 - alpha)
    }
}

/// Arimoto–Rényi conditional entropy H_α(Y|X) of the column variable given the row variable.
pub fn arimoto_renyi_conditional(j: &JointDist, alpha: f64, base: Base) -> f64 {
    base.from_nats(arimoto_nats(j.mass(), alpha))
}

pub(crate) fn arimoto_nats(mass: &[Vec<f64>], alpha: f64) -> f64 {
    assert!(alpha >= 0.0, "Rényi order must be nonnegative");
    if alpha == 0.0 {
        mass.iter()
            .filter(|r| r.iter().any(|&v| v > 0.0))
            .map(|r| (r.iter().filter(|&&v| v > 0.0).count() as f64).ln())
            .fold(0.0, f64::max)
    } else if alpha == 1.0 {
        let hxy = -mass.iter().flatten().map(|&v| xlnx(v)).sum::<f64>();
        let hx = -mass.iter().map(|r| xlnx(r.iter().sum())).sum::<f64>();
        (hxy - hx).max(0.0)
    } else if alpha.is_infinite() {
        let g: f64 = mass.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).sum();
        (-g.ln()).max(0.0)
    } else {
        // Σ_x (Σ_y J(x,y)^α)^{1/α} = Σ_x P(x)·‖P(·|x)‖_α
        let s: f64 = mass
            .iter()
            .map(|r| {
                let m = r.iter().copied().fold(0.0, f64::max);
                if m <= 0.0 {
                    return 0.0;
                }
                let t: f64 = r.iter().filter(|&&v| v > 0.0).map(|&v| (v / m).powf(alpha)).sum();
                m * t.powf(1.0 / alpha)
            })
            .sum();
        (alpha / (1.0 - alpha) * s.ln()).max(0.0)
    }
}

/// Chernoff information max_λ −log Σ P^λ Q^{1−λ}; `+∞` for disjoint supports.
pub fn chernoff_information(p: &Dist, q: &Dist, base: Base) -> Result<f64> {
    p.same_alphabet(q)?;
    Ok(base.from_nats(chernoff_nats(p.probs(), q.probs()).0))
}

/// Chernoff information in nats and the maximizing λ.
pub(crate) fn chernoff_nats(p: &[f64], q: &[f64]) -> (f64, f64) {
    let common: Vec<(f64, f64)> = p
        .iter()
        .zip(q)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(&a, &b)| (a.ln(), b.ln()))
        .collect();
    if common.is_empty() {
        return (f64::INFINITY, 0.5);
    }
    if p == q {
        return (0.0, 0.5);
    }
    let f = |l: f64| -common.iter().map(|&(a, b)| (l * a + (1.0 - l) * b).exp()).sum::<f64>().ln();
    let (lam, v) = grid_golden_max(&f, 0.0, 1.0, 1001);
    (v.max(0.0), lam)
}

pub(crate) fn log_sum_exp<I: Iterator<Item = f64> + Clone>(it: I) -> f64 {
    let m = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + it.map(|v| (v - m).exp()).sum::<f64>().ln()
}
