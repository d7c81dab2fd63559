use serde::Serialize;

use super::{transport_vertices, Coupling};
use crate::numeric::entropy_nats;
use crate::prob_core::{arimoto_nats, Dist};
use crate::{Base, Error, Result};

use super::VERTEX_SUPPORT_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MinEntropyMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinEntropyReport {
    pub coupling: Coupling,
    /// min H(Y|X) over couplings.
    pub h_cond: f64,
    /// min H(XY) = H(P) + h_cond.
    pub h_joint: f64,
    /// max I(X;Y) = H(Q) − h_cond.
    pub i_max: f64,
}

/// Greedy joint: repeatedly match the largest remaining source and target masses.
pub(crate) fn greedy_min_entropy_mass(a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut mass = vec![vec![0.0; b.len()]; a.len()];
    let argmax = |v: &[f64]| {
        let mut best = 0;
        for (k, &x) in v.iter().enumerate() {
            if x > v[best] {
                best = k;
            }
        }
        best
    };
    for _ in 0..(a.len() + b.len()) {
        let i = argmax(&ra);
        let j = argmax(&rb);
        let x = ra[i].min(rb[j]);
        if x <= 1e-15 {
            break;
        }
        mass[i][j] += x;
        if ra[i] <= rb[j] {
            rb[j] -= x;
            ra[i] = 0.0;
        } else {
            ra[i] -= x;
            rb[j] = 0.0;
        }
    }
    mass
}

/// Minimum conditional entropy H(Y|X) over couplings of (P, Q).
pub fn min_conditional_entropy_coupling(p: &Dist, q: &Dist, mode: MinEntropyMode, base: Base) -> Result<MinEntropyReport> {
    let mass = match mode {
        MinEntropyMode::Greedy => greedy_min_entropy_mass(p.probs(), q.probs()),
        MinEntropyMode::Exact => {
            let s = p.support().len() + q.support().len();
            if s > VERTEX_SUPPORT_CAP {
                return Err(Error::too_large("|supp P| + |supp Q|", s as f64, VERTEX_SUPPORT_CAP as f64));
            }
            transport_vertices(p.probs(), q.probs())
                .into_iter()
                .map(|m| (arimoto_nats(&m, 1.0), m))
                .min_by(|x, y| x.0.total_cmp(&y.0))
                .map(|(_, m)| m)
                .expect("polytope is nonempty")
        }
    };
    let hc = arimoto_nats(&mass, 1.0);
    Ok(MinEntropyReport {
        coupling: Coupling::from_mass(p, q, mass),
        h_cond: base.from_nats(hc),
        h_joint: base.from_nats(entropy_nats(p.probs()) + hc),
        i_max: base.from_nats((entropy_nats(q.probs()) - hc).max(0.0)),
    })
}
