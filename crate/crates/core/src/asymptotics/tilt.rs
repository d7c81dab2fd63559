use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coupling_lp::{Coupling, CostMatrix};
use crate::numeric::grid_golden_max;
use crate::prob_core::{log_sum_exp, Dist};
use crate::{Base, Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct MinMaxKl {
    #[serde(with = "crate::serde_inf")]
    pub value: f64,
    /// The equalising (or boundary) member of the tilted family; absent for disjoint supports.
    pub argmin: Option<Dist>,
    pub lambda: Option<f64>,
}

/// Normalised tilt R_λ ∝ P^λ Q^{1−λ} on the common support, with log Z(λ).
fn tilted(p: &[f64], q: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let logs: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            if a > 0.0 && b > 0.0 {
                lambda * a.ln() + (1.0 - lambda) * b.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let log_z = log_sum_exp(logs.iter().copied());
    (logs.iter().map(|&l| (l - log_z).exp()).collect(), log_z)
}

/// min over R of max{D(R‖P), D(R‖Q)}.
///
/// The minimiser lies on the geometric mixture family; along it
/// D(R_λ‖P) − D(R_λ‖Q) = Σ R_λ ln(Q/P) is non-increasing in λ, and where it
/// vanishes both divergences equal −log Z(λ).
pub fn min_max_kl(p: &Dist, q: &Dist, base: Base) -> Result<MinMaxKl> {
    p.same_alphabet(q)?;
    let (pv, qv) = (p.probs(), q.probs());
    if !pv.iter().zip(qv).any(|(&a, &b)| a > 0.0 && b > 0.0) {
        return Ok(MinMaxKl { value: f64::INFINITY, argmin: None, lambda: None });
    }
    if pv == qv {
        return Ok(MinMaxKl { value: 0.0, argmin: Some(p.clone()), lambda: Some(0.5) });
    }
    let gap = |lambda: f64| {
        let (r, _) = tilted(pv, qv, lambda);
        r.iter()
            .zip(pv.iter().zip(qv))
            .filter(|(&ri, _)| ri > 0.0)
            .map(|(&ri, (&a, &b))| ri * (b.ln() - a.ln()))
            .sum::<f64>()
    };
    let lambda = if gap(1.0) >= 0.0 {
        1.0
    } else if gap(0.0) <= 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let (r, log_z) = tilted(pv, qv, lambda);
    Ok(MinMaxKl {
        value: base.from_nats((-log_z).max(0.0)),
        argmin: Some(Dist::from_parts_unchecked(p.alphabet().to_vec(), r)),
        lambda: Some(lambda),
    })
}

/// Which tail of the per-letter average distance the exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiltSide {
    /// ℙ{d̄ ≤ level} for level below the mean: sup_t −t·level − log E e^{−t d}.
    Upper,
    /// ℙ{d̄ ≥ level} for level above the mean: sup_t t·level − log E e^{t d}.
    Lower,
}

impl FromStr for TiltSide {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(TiltSide::Upper),
            "lower" => Ok(TiltSide::Lower),
            _ => Err(Error::InvalidParameter(format!("side must be upper or lower, got {s}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CramerReport {
    #[serde(with = "crate::serde_inf")]
    pub value: f64,
    /// Maximising tilt (the cap 50 when the supremum runs off to infinity).
    pub t: f64,
    /// The level is outside the range of d on the coupling's support.
    pub unbounded: bool,
}

pub const TILT_CAP: f64 = 50.0;

/// Legendre transform of the cumulant of d(X,Y) under the coupling, at `level`.
pub fn cramer_tilt_exponent(j: &Coupling, d: &CostMatrix, level: f64, side: TiltSide, base: Base) -> Result<CramerReport> {
    d.check_against(&j.src, &j.dst)?;
    if !level.is_finite() {
        return Err(Error::InvalidParameter("level must be finite".into()));
    }
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (row, crow) in j.mass().iter().zip(&d.costs) {
        for (&m, &c) in row.iter().zip(crow) {
            if m > 0.0 {
                atoms.push((m, c));
            }
        }
    }
    let sign = match side {
        TiltSide::Lower => 1.0,
        TiltSide::Upper => -1.0,
    };
    // Work with s = sign·d so both sides read sup_t t·(sign·level) − log E e^{t s}.
    let lvl = sign * level;
    let s_max = atoms.iter().map(|&(_, c)| sign * c).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * (1.0 + lvl.abs());
    if lvl > s_max + tol {
        return Ok(CramerReport { value: f64::INFINITY, t: TILT_CAP, unbounded: true });
    }
    if (lvl - s_max).abs() <= tol {
        // the supremum is the t → ∞ limit −log ℙ{s = max}
        let top: f64 = atoms.iter().filter(|&&(_, c)| (sign * c - s_max).abs() <= tol).map(|&(m, _)| m).sum();
        return Ok(CramerReport { value: base.from_nats((-top.ln()).max(0.0)), t: f64::INFINITY, unbounded: false });
    }
    // by Jensen the objective is ≤ 0 on t ≥ 0 unless the level lies beyond the mean
    let mean: f64 = atoms.iter().map(|&(m, c)| m * sign * c).sum();
    if lvl <= mean + tol {
        return Ok(CramerReport { value: 0.0, t: 0.0, unbounded: false });
    }
    let obj = |t: f64| t * lvl - log_sum_exp(atoms.iter().map(|&(m, c)| m.ln() + t * sign * c));
    let (t, v) = grid_golden_max(&obj, 0.0, TILT_CAP, 2001);
    let (t, v) = if v > 0.0 { (t, v) } else { (0.0, 0.0) };
    Ok(CramerReport { value: base.from_nats(v), t, unbounded: false })
}
