use std::collections::BTreeMap;

use serde::Serialize;

use super::mutual_information_nats;
use super::polytope::Polytope;
use crate::numeric::entropy_nats;
use crate::prob_core::{channel_power, power_vec, Channel, Dist};
use crate::{Base, Error, Result, DEFAULT_ATOM_CAP};

/// Largest input alphabet for which polytope vertices are enumerated.
pub const FEASIBLE_VERTEX_CAP: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct FeasibleInputSet {
    pub channel: Channel,
    pub target: Dist,
    pub feasible: bool,
    pub unique: bool,
    /// Rank of the output-plus-normalisation system on the inputs that can be positive.
    pub rank: usize,
    /// Number of inputs that are positive somewhere on the set.
    pub free_inputs: usize,
    pub witness: Option<Dist>,
    pub vertices: Option<Vec<Dist>>,
}

pub(crate) fn check_target(w: &Channel, target: &Dist) -> Result<()> {
    if w.output() != target.alphabet() {
        return Err(Error::MismatchedAlphabets);
    }
    Ok(())
}

fn as_dist(w: &Channel, p: Vec<f64>) -> Dist {
    let p = p.into_iter().map(|v| if v.abs() < 1e-14 { 0.0 } else { v.max(0.0) }).collect();
    Dist::from_parts_unchecked(w.input().to_vec(), p)
}

/// The set of input laws inducing `target` through `w`.
pub fn feasible_input_set(w: &Channel, target: &Dist) -> Result<FeasibleInputSet> {
    check_target(w, target)?;
    let Some(poly) = Polytope::new(w, target.probs()) else {
        return Ok(FeasibleInputSet {
            channel: w.clone(),
            target: target.clone(),
            feasible: false,
            unique: false,
            rank: 0,
            free_inputs: 0,
            witness: None,
            vertices: None,
        });
    };
    let unique = poly.is_unique();
    let vertices = if unique {
        Some(vec![as_dist(w, poly.interior.clone())])
    } else {
        (w.n_inputs() <= FEASIBLE_VERTEX_CAP).then(|| poly.vertices().into_iter().map(|v| as_dist(w, v)).collect())
    };
    Ok(FeasibleInputSet {
        channel: w.clone(),
        target: target.clone(),
        feasible: true,
        unique,
        rank: poly.rank(),
        free_inputs: poly.free_indices().len(),
        witness: Some(as_dist(w, poly.interior.clone())),
        vertices,
    })
}

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct ExactResolvability {
    /// min H(P) over the feasible set.
    pub G_E_upper: f64,
    /// min I(X;Y) over the feasible set.
    pub G_TV_lower: f64,
    /// H of the unique feasible input, when there is one.
    pub fullrank_value: Option<f64>,
    /// n ↦ min (1/n) H(P_{Xⁿ}) over the blocklength-n feasible set.
    pub multiletter: BTreeMap<usize, f64>,
}

fn polytope_vertices(w: &Channel, target: &[f64]) -> Result<Vec<Vec<f64>>> {
    if w.n_inputs() > FEASIBLE_VERTEX_CAP {
        return Err(Error::too_large("inputs for vertex enumeration", w.n_inputs() as f64, FEASIBLE_VERTEX_CAP as f64));
    }
    let poly = Polytope::new(w, target).ok_or(Error::InfeasibleTarget)?;
    if poly.is_unique() {
        return Ok(vec![poly.interior]);
    }
    Ok(poly.vertices())
}

/// Exact resolvability rates. H and I(X;Y) are concave in the input law and I
/// is in fact affine on the feasible set (H(Y) is pinned), so both minima sit
/// at vertices.
pub fn exact_resolvability(w: &Channel, target: &Dist, base: Base) -> Result<ExactResolvability> {
    check_target(w, target)?;
    let verts = polytope_vertices(w, target.probs())?;
    let ge = verts.iter().map(|v| entropy_nats(v)).fold(f64::INFINITY, f64::min);
    let gtv = verts.iter().map(|v| mutual_information_nats(v, w.rows())).fold(f64::INFINITY, f64::min);
    let poly = Polytope::new(w, target.probs()).ok_or(Error::InfeasibleTarget)?;
    let fullrank_value = poly.is_unique().then(|| base.from_nats(entropy_nats(&poly.interior)));
    let mut multiletter = BTreeMap::new();
    multiletter.insert(1, base.from_nats(ge));
    if w.n_inputs() * w.n_inputs() <= FEASIBLE_VERTEX_CAP {
        let w2 = channel_power(w, 2, DEFAULT_ATOM_CAP)?;
        let t2 = power_vec(target.probs(), 2);
        let v2 = polytope_vertices(&w2, &t2)?;
        let m2 = v2.iter().map(|v| entropy_nats(v) / 2.0).fold(f64::INFINITY, f64::min);
        multiletter.insert(2, base.from_nats(m2));
    }
    Ok(ExactResolvability {
        G_E_upper: base.from_nats(ge),
        G_TV_lower: base.from_nats(gtv),
        fullrank_value,
        multiletter,
    })
}
