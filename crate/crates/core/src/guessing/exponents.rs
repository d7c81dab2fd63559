//! Exponent bounds for 𝒢(P_X^n, P_Y^n) and n-fold product scans.

use serde::Serialize;

use super::search::{exact_search, greedy_assign};
use super::pushforward;
use crate::numeric::{entropy_nats, grid_golden_max};
use crate::prob_core::{power_vec, product_power, renyi_nats, tv_vec, Dist};
use crate::{Base, Error, Result, DEFAULT_ATOM_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExponentCase {
    /// H(X) > H(Y): 1 − 𝒢 decays; the bound is on that decay rate.
    SourceRicher,
    /// H(X) < H(Y): 𝒢 decays; lower bound plus the log|𝒴| cap.
    TargetRicher,
    /// H(X) = H(Y): 𝒢(P_X^n, P_Y^n) ≥ 𝒢(P_X, P_Y)^n.
    Equal,
}

#[derive(Debug, Clone, Serialize)]
pub struct GuessExponentBounds {
    pub case: ExponentCase,
    pub lower_exponent: f64,
    pub upper_exponent: Option<f64>,
    /// Maximising t (first case) or ε (second case).
    pub argmax: Option<f64>,
}

const EQ_TOL: f64 = 1e-12;

pub fn guessing_exponent_bounds(px: &Dist, py: &Dist, base: Base) -> GuessExponentBounds {
    let hx = entropy_nats(px.probs());
    let hy = entropy_nats(py.probs());
    if hx > hy + EQ_TOL {
        let obj = |t: f64| t * (renyi_nats(px.probs(), 1.0 + t) - renyi_nats(py.probs(), 1.0 - t));
        let (t, v) = grid_golden_max(&obj, 0.0, 1.0, 1001);
        GuessExponentBounds {
            case: ExponentCase::SourceRicher,
            lower_exponent: base.from_nats(0.5 * v.max(0.0)),
            upper_exponent: None,
            argmax: Some(t),
        }
    } else if hx < hy - EQ_TOL {
        let mx = px.min_positive();
        let my = py.min_positive();
        let obj = |e: f64| {
            let d = e * e / 3.0;
            (d * mx).min(d * my).min((1.0 - e) * hy - (1.0 + e) * hx)
        };
        // 999 interior nodes of (0, 1), then golden refinement
        let (e, v) = grid_golden_max(&obj, 0.0, 1.0, 1001);
        GuessExponentBounds {
            case: ExponentCase::TargetRicher,
            lower_exponent: base.from_nats(v.max(0.0)),
            upper_exponent: Some(base.from_nats((py.len() as f64).ln())),
            argmax: Some(e),
        }
    } else {
        let g = match exact_search(px.probs(), py.probs(), DEFAULT_ATOM_CAP) {
            Ok((_, tv)) => 1.0 - tv,
            Err(_) => 1.0 - tv_vec(&pushforward(px.probs(), &greedy_assign(px.probs(), py.probs()), py.len()), py.probs()),
        };
        GuessExponentBounds {
            case: ExponentCase::Equal,
            lower_exponent: 0.0,
            upper_exponent: Some(base.from_nats(-g.ln())),
            argmax: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Greedy,
    /// Also run the exhaustive search where it fits under the cap.
    WithExact,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct ScanRow {
    pub n: usize,
    pub G_lower: f64,
    pub G_exact: Option<f64>,
    pub H_inf_c: f64,
    pub fano_Hc_upper: f64,
    /// Optimal (or greedy) f as an index array, kept for small n only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<usize>>,
}

/// Fano-type bound h(p_e) + p_e·n·log|𝒴| in nats.
pub(crate) fn fano_nats(pe: f64, n: usize, ny: usize) -> f64 {
    let pe = pe.clamp(0.0, 1.0);
    let h = -crate::numeric::xlnx(pe) - crate::numeric::xlnx(1.0 - pe);
    h + pe * n as f64 * (ny as f64).ln()
}

/// Greedy (and optionally exact) guessing probabilities of (P_X^n, P_Y^n).
pub fn guessing_product_scan(px: &Dist, py: &Dist, ns: &[usize], mode: ScanMode, base: Base) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        // validates the atom cap on both sides
        product_power(px, n, DEFAULT_ATOM_CAP)?;
        product_power(py, n, DEFAULT_ATOM_CAP)?;
        let pxn = power_vec(px.probs(), n);
        let pyn = power_vec(py.probs(), n);
        let f = greedy_assign(&pxn, &pyn);
        let g = 1.0 - tv_vec(&pushforward(&pxn, &f, pyn.len()), &pyn).clamp(0.0, 1.0);
        let exact = match mode {
            ScanMode::WithExact => exact_search(&pxn, &pyn, DEFAULT_ATOM_CAP).ok(),
            ScanMode::Greedy => None,
        };
        let g_exact = exact.as_ref().map(|(_, tv)| 1.0 - tv);
        let g_best = g_exact.unwrap_or(g).max(g);
        rows.push(ScanRow {
            n,
            G_lower: g,
            G_exact: g_exact,
            H_inf_c: base.from_nats(-g_best.ln()),
            fano_Hc_upper: base.from_nats(fano_nats(1.0 - g_best, n, py.len())),
            f: if pxn.len() <= 64 {
                Some(exact.map(|(f, _)| f).unwrap_or(f))
            } else {
                None
            },
        });
    }
    Ok(rows)
}
