//! {P ≥ 0 : Σ_x P(x) W(·|x) = target, Σ P = 1} and its geometry.

use crate::linalg::{basic_feasible_solutions, nullspace, rank};
use crate::lp::{maximize, LpOutcome};
use crate::prob_core::Channel;

const FREE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct Polytope {
    /// Constraint rows over all inputs (output equations, then the ones row).
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// Inputs that are positive somewhere on the polytope.
    pub free: Vec<bool>,
    /// A point positive on every free input (average of per-input maximisers).
    pub interior: Vec<f64>,
}

impl Polytope {
    /// None when the target is not reachable through the channel.
    pub fn new(w: &Channel, target: &[f64]) -> Option<Self> {
        let nx = w.n_inputs();
        let mut a: Vec<Vec<f64>> = (0..w.n_outputs()).map(|y| (0..nx).map(|x| w.rows()[x][y]).collect()).collect();
        a.push(vec![1.0; nx]);
        let mut b = target.to_vec();
        b.push(1.0);
        let mut free = vec![false; nx];
        let mut interior = vec![0.0; nx];
        for x in 0..nx {
            let mut c = vec![0.0; nx];
            c[x] = 1.0;
            match maximize(&c, &a, &b) {
                LpOutcome::Optimal { x: sol, value } => {
                    free[x] = value > FREE_TOL;
                    interior.iter_mut().zip(&sol).for_each(|(i, s)| *i += s / nx as f64);
                }
                _ => return None,
            }
        }
        Some(Polytope { a, b, free, interior })
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.free.len()).filter(|&i| self.free[i]).collect()
    }

    fn restrict(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let f = self.free_indices();
        rows.iter().map(|r| f.iter().map(|&j| r[j]).collect()).collect()
    }

    /// Rank of the constraint system on the free inputs.
    pub fn rank(&self) -> usize {
        rank(&self.restrict(&self.a), 1e-10)
    }

    /// Directions spanning the polytope's affine hull, embedded in all inputs.
    pub fn directions(&self) -> Vec<Vec<f64>> {
        let f = self.free_indices();
        if f.is_empty() {
            return vec![];
        }
        nullspace(&self.restrict(&self.a), 1e-12)
            .into_iter()
            .map(|v| {
                let mut full = vec![0.0; self.free.len()];
                for (k, &j) in f.iter().enumerate() {
                    full[j] = v[k];
                }
                full
            })
            .collect()
    }

    pub fn is_unique(&self) -> bool {
        self.directions().is_empty()
    }

    /// Vertices, by basic-solution enumeration over the free inputs.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let f = self.free_indices();
        basic_feasible_solutions(&self.restrict(&self.a), &self.b, 1e-10)
            .into_iter()
            .filter(|v| self.residual_of_free(v) <= 1e-8)
            .map(|v| {
                let mut full = vec![0.0; self.free.len()];
                for (k, &j) in f.iter().enumerate() {
                    full[j] = v[k];
                }
                full
            })
            .collect()
    }

    fn residual_of_free(&self, v: &[f64]) -> f64 {
        self.restrict(&self.a)
            .iter()
            .zip(&self.b)
            .map(|(r, &bi)| (r.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max)
    }

    /// max over the polytope of g·P (the linear-minimisation oracle, negated).
    pub fn argmax_linear(&self, g: &[f64]) -> Option<Vec<f64>> {
        match maximize(g, &self.a, &self.b) {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}
