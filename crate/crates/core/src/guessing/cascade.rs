//! Cascade coupling: a greedy approximation code f_n followed by the standard
//! maximal coupling of P_{f_n(X^n)} and P_Y^n.

use serde::Serialize;

use super::pushforward;
use super::search::greedy_assign;
use crate::prob_core::{power_vec, product_power, tv_vec, Dist};
use crate::{Base, Result, DEFAULT_ATOM_CAP};

#[derive(Debug, Clone, Serialize)]
pub struct CascadeReport {
    /// H_α(Y^n | X^n) of the constructed coupling.
    pub value: f64,
    /// |P_{f_n(X^n)} − P_Y^n| of the greedy code.
    pub tv: f64,
    /// For α ∈ (0,1): the bound obtained by replacing each off-diagonal
    /// conditional with the uniform one. It controls the averaged form
    /// (1−α)⁻¹ log Σ_z P_Z Σ_y P^α(y|z), which never exceeds `value`, so it is
    /// an upper bound on `value` only asymptotically.
    pub uniform_completion_bound: Option<f64>,
    /// The averaged form itself, for α ∈ (0,1).
    pub averaged: Option<f64>,
}

/// H_α(Y|Z) for Z ~ pz and the standard maximal coupling of (pz, py), in nats.
///
/// Y depends on X^n only through Z = f_n(X^n), so this is also H_α(Y^n|X^n).
/// Row z is diagonal min(pz, py)(z) plus c_z·e_Q(y) off the diagonal, with
/// c_z = (pz(z) − py(z))⁺/TV, so every row sum collapses to closed form.
pub(crate) fn cascade_conditional_nats(pz: &[f64], py: &[f64], alpha: f64) -> f64 {
    let tv = tv_vec(pz, py);
    let eq: Vec<f64> = pz.iter().zip(py).map(|(a, b)| (b - a).max(0.0)).collect();
    let eq_support = eq.iter().filter(|&&v| v > 0.0).count();
    let eq_max = eq.iter().copied().fold(0.0, f64::max);
    let rows = pz.iter().zip(py).filter(|(&z, _)| z > 0.0).map(|(&z, &y)| {
        let diag = z.min(y);
        let c = if tv > 0.0 { (z - y).max(0.0) / tv } else { 0.0 };
        (z, diag, c)
    });
    if alpha == 0.0 {
        rows.map(|(_, diag, c)| {
            let k = usize::from(diag > 0.0) + if c > 0.0 { eq_support } else { 0 };
            (k as f64).ln()
        })
        .fold(0.0, f64::max)
    } else if alpha == 1.0 {
        // Σ_z −Σ_y J ln(J / pz)
        let s_eq_ln: f64 = eq.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum();
        let h: f64 = rows
            .map(|(z, diag, c)| {
                let mut jlnj = if diag > 0.0 { diag * diag.ln() } else { 0.0 };
                if c > 0.0 {
                    jlnj += c * tv * c.ln() + c * s_eq_ln;
                }
                z * z.ln() - jlnj
            })
            .sum();
        h.max(0.0)
    } else if alpha.is_infinite() {
        let g: f64 = rows.map(|(_, diag, c)| diag.max(c * eq_max)).sum();
        (-g.ln()).max(0.0)
    } else {
        let s_eq: f64 = eq.iter().filter(|&&v| v > 0.0).map(|&v| v.powf(alpha)).sum();
        let s: f64 = rows
            .map(|(_, diag, c)| {
                let mut t = if diag > 0.0 { diag.powf(alpha) } else { 0.0 };
                if c > 0.0 {
                    t += c.powf(alpha) * s_eq;
                }
                t.powf(1.0 / alpha)
            })
            .sum();
        (alpha / (1.0 - alpha) * s.ln()).max(0.0)
    }
}

/// (1−α)⁻¹ log Σ_z P_Z(z) Σ_y P^α(y|z) for the same coupling, α ∈ (0,1), in nats.
pub(crate) fn cascade_averaged_nats(pz: &[f64], py: &[f64], alpha: f64) -> f64 {
    let tv = tv_vec(pz, py);
    let s_eq: f64 = pz.iter().zip(py).map(|(a, b)| (b - a).max(0.0)).filter(|&v| v > 0.0).map(|v| v.powf(alpha)).sum();
    let s: f64 = pz
        .iter()
        .zip(py)
        .filter(|(&z, _)| z > 0.0)
        .map(|(&z, &y)| {
            let diag = z.min(y);
            let c = if tv > 0.0 { (z - y).max(0.0) / tv } else { 0.0 };
            let mut t = if diag > 0.0 { diag.powf(alpha) } else { 0.0 };
            if c > 0.0 {
                t += c.powf(alpha) * s_eq;
            }
            t * z.powf(1.0 - alpha)
        })
        .sum();
    (s.ln() / (1.0 - alpha)).max(0.0)
}

pub fn renyi_cascade_coupling(px: &Dist, py: &Dist, n: usize, alpha: f64, base: Base) -> Result<CascadeReport> {
    if !(alpha >= 0.0) {
        return Err(crate::Error::InvalidParameter("alpha must be in [0, ∞]".into()));
    }
    product_power(px, n, DEFAULT_ATOM_CAP)?;
    product_power(py, n, DEFAULT_ATOM_CAP)?;
    let pxn = power_vec(px.probs(), n);
    let pyn = power_vec(py.probs(), n);
    let f = greedy_assign(&pxn, &pyn);
    let pz = pushforward(&pxn, &f, pyn.len());
    let value = cascade_conditional_nats(&pz, &pyn, alpha);
    let delta = tv_vec(&pz, &pyn);
    let uniform_completion_bound = (alpha > 0.0 && alpha < 1.0).then(|| {
        let p: f64 = pz.iter().zip(&pyn).filter(|(z, y)| y < z).map(|(_, y)| y).sum();
        let dp = delta + p;
        let ny = (py.len() as f64).powi(n as i32);
        let inner = 1.0 - dp + dp.powf(1.0 - alpha) * p.powf(alpha) + ny.powf(1.0 - alpha) * dp.powf(1.0 - alpha) * delta.powf(alpha);
        base.from_nats(inner.ln() / (1.0 - alpha))
    });
    let averaged = (alpha > 0.0 && alpha < 1.0).then(|| base.from_nats(cascade_averaged_nats(&pz, &pyn, alpha)));
    Ok(CascadeReport {
        value: base.from_nats(value),
        tv: delta,
        uniform_completion_bound,
        averaged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling_lp::maximal_coupling_mass;
    use crate::prob_core::arimoto_nats;
    use approx::assert_abs_diff_eq;

    fn d(v: &[f64]) -> Dist {
        Dist::from_probs(v.to_vec()).unwrap()
    }

    #[test]
    fn closed_form_matches_dense_joint() {
        let pz = [0.4, 0.05, 0.3, 0.25, 0.0];
        let py = [0.1, 0.3, 0.2, 0.25, 0.15];
        let m = maximal_coupling_mass(&pz, &py);
        for &a in &[0.0, 0.3, 1.0, 2.5, f64::INFINITY] {
            assert_abs_diff_eq!(cascade_conditional_nats(&pz, &py, a), arimoto_nats(&m, a), epsilon = 1e-12);
        }
    }

    #[test]
    fn examples() {
        let p = d(&[0.3, 0.7]);
        for &a in &[0.0, 0.5, 1.0, f64::INFINITY] {
            assert_eq!(renyi_cascade_coupling(&p, &p, 3, a, Base::Nats).unwrap().value, 0.0);
        }
        let px = d(&[0.5, 0.5]);
        let py = d(&[0.25, 0.75]);
        let r = renyi_cascade_coupling(&px, &py, 1, f64::INFINITY, Base::Nats).unwrap();
        assert_abs_diff_eq!(r.value, -(0.75f64).ln(), epsilon = 1e-12);
        let r = renyi_cascade_coupling(&px, &py, 1, 1.0, Base::Bits).unwrap();
        assert!(r.value >= 0.5 - 1e-12);
    }

    #[test]
    fn uniform_completion_dominates() {
        let px = d(&[0.5, 0.5]);
        let py = d(&[0.1, 0.9]);
        for n in 1..=8 {
            let r = renyi_cascade_coupling(&px, &py, n, 0.5, Base::Nats).unwrap();
            let pxn = power_vec(px.probs(), n);
            let pyn = power_vec(py.probs(), n);
            let pz = pushforward(&pxn, &greedy_assign(&pxn, &pyn), pyn.len());
            let avg = cascade_averaged_nats(&pz, &pyn, 0.5);
            assert!(avg <= r.uniform_completion_bound.unwrap() + 1e-12, "n={n} {r:?} {avg}");
            assert!(avg <= r.value + 1e-12, "n={n}");
        }
    }
}
