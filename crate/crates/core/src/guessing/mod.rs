//! Maximal guessing couplings.
//!
//! max over couplings of ℙ{Y = f(X)} (optimised jointly over f) equals
//! 1 − min_f |P_Y − P_{f(X)}|, so the coupling problem reduces to pushing P_X
//! forward onto P_Y as closely as possible in total variation.

mod cascade;
mod check;
mod exponents;
mod search;

use serde::Serialize;

use crate::coupling_lp::{maximal_coupling_mass, Coupling};
use crate::prob_core::{tv_vec, Dist, JointDist};
use crate::Base;

pub use cascade::{renyi_cascade_coupling, CascadeReport};
pub use check::{deterministic_coupling_check, AsymptoticBound, BoundKind, DeterministicCheck, EntropyComparison};
pub use exponents::{guessing_exponent_bounds, guessing_product_scan, ExponentCase, GuessExponentBounds, ScanMode, ScanRow};
pub use search::{best_function_exact, best_function_exact_with_cap, best_function_greedy};


/// Σ_x max_y J(x, y): the best achievable ℙ{Y = f(X)} under the joint.
pub fn guessing_probability(j: &JointDist) -> f64 {
    j.mass().iter().map(|r| r.iter().copied().fold(0.0, f64::max)).sum()
}

/// A total map from source symbols to target symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuessFunction {
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct GuessReport {
    pub G: f64,
    pub min_tv: f64,
    pub f: GuessFunction,
    /// P_X · P_{Y|f(X)}; omitted when |𝒳|·|𝒴| exceeds the atom cap.
    pub coupling: Option<Coupling>,
    /// −log G, in nats.
    pub H_inf_c: f64,
}

impl GuessReport {
    pub fn h_inf_c(&self, base: Base) -> f64 {
        base.from_nats(self.H_inf_c)
    }
}

pub(crate) fn pushforward(px: &[f64], f: &[usize], ny: usize) -> Vec<f64> {
    let mut out = vec![0.0; ny];
    for (&p, &y) in px.iter().zip(f) {
        out[y] += p;
    }
    out
}

/// Report for a fixed f; the coupling is P_X · P_{Y|f(X)} with P_{f(X),Y} the
/// standard maximal coupling.
pub(crate) fn report_for(px: &Dist, py: &Dist, f: Vec<usize>, atom_cap: usize) -> GuessReport {
    let pf = pushforward(px.probs(), &f, py.len());
    let tv = tv_vec(&pf, py.probs()).clamp(0.0, 1.0);
    let g = 1.0 - tv;
    let coupling = if (px.len() as f64) * (py.len() as f64) <= atom_cap as f64 {
        let m = maximal_coupling_mass(&pf, py.probs());
        let mass = px
            .probs()
            .iter()
            .zip(&f)
            .map(|(&p, &z)| {
                if pf[z] > 0.0 {
                    m[z].iter().map(|&v| p * v / pf[z]).collect()
                } else {
                    vec![0.0; py.len()]
                }
            })
            .collect();
        Some(Coupling::from_mass(px, py, mass))
    } else {
        None
    };
    GuessReport {
        G: g,
        min_tv: tv,
        f: GuessFunction { map: f },
        coupling,
        H_inf_c: -g.ln(),
    }
}
