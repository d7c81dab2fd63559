//! The transportation-polytope engine: min-cost, maximal, excess-distance and
//! minimum-entropy couplings, plus vertex enumeration.

mod minent;
mod transport;
mod vertices;

use serde::{Deserialize, Serialize};

use crate::prob_core::{clean, Dist, JointDist};
use crate::{Error, Result};

pub use minent::{min_conditional_entropy_coupling, MinEntropyMode, MinEntropyReport};
pub use transport::{maximal_coupling, min_excess_distance_prob, transport_min_cost};
pub use vertices::{coupling_vertices, VERTEX_SUPPORT_CAP};

pub(crate) use transport::{maximal_coupling_mass, transport_simplex};
pub(crate) use vertices::transport_vertices;

/// Per-atom tolerance on coupling marginals.
pub const MARGINAL_TOL: f64 = 1e-8;

/// A joint law together with the two marginals it is pinned to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    pub joint: JointDist,
    pub src: Dist,
    pub dst: Dist,
}

impl Coupling {
    /// Validating constructor: the joint's marginals must match `src` and `dst`.
    pub fn new(joint: JointDist, src: Dist, dst: Dist) -> Result<Self> {
        let c = Coupling { joint, src, dst };
        if c.joint.nrows() != c.src.len() || c.joint.ncols() != c.dst.len() {
            return Err(Error::MismatchedAlphabets);
        }
        let err = c.marginal_error();
        if err > MARGINAL_TOL {
            return Err(Error::InvalidDistribution(format!("coupling marginals off by {err:e}")));
        }
        Ok(c)
    }

    pub(crate) fn from_mass(src: &Dist, dst: &Dist, mass: Vec<Vec<f64>>) -> Self {
        Coupling {
            joint: JointDist::from_parts_unchecked(src.alphabet().to_vec(), dst.alphabet().to_vec(), mass),
            src: src.clone(),
            dst: dst.clone(),
        }
    }

    /// Largest per-atom deviation of the joint's marginals from `src`/`dst`.
    pub fn marginal_error(&self) -> f64 {
        let r = self.joint.row_marginal();
        let c = self.joint.col_marginal();
        let e1 = r.probs().iter().zip(self.src.probs()).map(|(a, b)| (a - b).abs());
        let e2 = c.probs().iter().zip(self.dst.probs()).map(|(a, b)| (a - b).abs());
        e1.chain(e2).fold(0.0, f64::max)
    }

    pub fn mass(&self) -> &[Vec<f64>] {
        self.joint.mass()
    }

    /// Expected cost Σ π·c.
    pub fn expected_cost(&self, c: &CostMatrix) -> f64 {
        self.mass()
            .iter()
            .zip(&c.costs)
            .map(|(r, cr)| r.iter().zip(cr).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    /// ℙ{d(X,Y) > threshold} under the coupling.
    pub fn excess_probability(&self, c: &CostMatrix, threshold: f64) -> f64 {
        self.mass()
            .iter()
            .zip(&c.costs)
            .map(|(r, cr)| r.iter().zip(cr).filter(|(_, &d)| d > threshold).map(|(a, _)| a).sum::<f64>())
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }
}

/// A distance or cost d(x, y) between two labelled alphabets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCost")]
pub struct CostMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub costs: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawCost {
    rows: Vec<String>,
    cols: Vec<String>,
    costs: Vec<Vec<f64>>,
}

impl TryFrom<RawCost> for CostMatrix {
    type Error = Error;
    fn try_from(r: RawCost) -> Result<Self> {
        CostMatrix::new(r.rows, r.cols, r.costs)
    }
}

impl CostMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, costs: Vec<Vec<f64>>) -> Result<Self> {
        if costs.len() != rows.len() || costs.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::InvalidParameter("cost matrix shape does not match its alphabets".into()));
        }
        if costs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("cost entries must be finite".into()));
        }
        Ok(CostMatrix { rows, cols, costs })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: &[String], cols: &[String], mut f: F) -> Self {
        let costs = (0..rows.len()).map(|i| (0..cols.len()).map(|j| f(i, j)).collect()).collect();
        CostMatrix {
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            costs,
        }
    }

    /// 0/1 cost: 0 when the labels agree.
    pub fn hamming(rows: &[String], cols: &[String]) -> Self {
        CostMatrix::from_fn(rows, cols, |i, j| if rows[i] == cols[j] { 0.0 } else { 1.0 })
    }

    /// 0/1 cost on index equality, labelled by the given alphabets.
    pub fn index_mismatch(rows: &[String], cols: &[String]) -> Self {
        CostMatrix::from_fn(rows, cols, |i, j| if i == j { 0.0 } else { 1.0 })
    }

    /// Averaged per-letter cost (1/n)·Σ d(x_i, y_i) on the n-fold alphabets.
    pub fn product_average(&self, n: usize, atom_cap: usize) -> Result<Self> {
        let mut c = self.product_additive(n, atom_cap)?;
        c.costs.iter_mut().flatten().for_each(|v| *v /= n as f64);
        Ok(c)
    }

    /// Additive per-letter cost Σ d(x_i, y_i) on the n-fold alphabets.
    pub fn product_additive(&self, n: usize, atom_cap: usize) -> Result<Self> {
        let size = (self.rows.len() as f64).powi(n as i32) * (self.cols.len() as f64).powi(n as i32);
        if size > atom_cap as f64 {
            return Err(Error::too_large("product cost entries", size, atom_cap as f64));
        }
        let mut costs = self.costs.clone();
        for _ in 1..n {
            let mut next = Vec::new();
            for ra in &costs {
                for rb in &self.costs {
                    next.push(ra.iter().flat_map(|&a| rb.iter().map(move |&b| a + b)).collect::<Vec<f64>>());
                }
            }
            costs = next;
        }
        Ok(CostMatrix {
            rows: crate::prob_core::power_labels(&self.rows, n),
            cols: crate::prob_core::power_labels(&self.cols, n),
            costs,
        })
    }

    /// 0/1 cost 1{d > threshold}.
    pub fn exceedance(&self, threshold: f64) -> Self {
        let costs = self
            .costs
            .iter()
            .map(|r| r.iter().map(|&d| if d > threshold { 1.0 } else { 0.0 }).collect())
            .collect();
        CostMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            costs,
        }
    }

    pub(crate) fn check_against(&self, p: &Dist, q: &Dist) -> Result<()> {
        if self.rows.as_slice() != p.alphabet() || self.cols.as_slice() != q.alphabet() {
            return Err(Error::MismatchedAlphabets);
        }
        Ok(())
    }
}

pub(crate) fn clean_mass(mass: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    mass.into_iter().map(|r| r.into_iter().map(clean).collect()).collect()
}
