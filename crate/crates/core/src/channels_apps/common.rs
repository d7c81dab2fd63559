use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::mutual_information_nats;
use crate::linalg::rank;
use crate::numeric::entropy_nats;
use crate::prob_core::{Channel, Dist, JointDist, PROB_TOL};
use crate::{Base, Error, Result};

#[derive(Debug, Clone, Serialize)]
#[allow(non_snake_case)]
pub struct GkReport {
    pub C_GK: f64,
    /// Component of each X symbol in the support graph (None off the support).
    pub x_labels: Vec<Option<usize>>,
    pub y_labels: Vec<Option<usize>>,
    /// P_W of the common part W.
    pub component_mass: Vec<f64>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Gács–Körner common information: the common part is the connected-component
/// index of the bipartite graph joining x and y whenever J(x, y) > 0.
pub fn gk_common_information(j: &JointDist, base: Base) -> GkReport {
    let (nx, ny) = (j.nrows(), j.ncols());
    let mut parent: Vec<usize> = (0..nx + ny).collect();
    for x in 0..nx {
        for y in 0..ny {
            if j.get(x, y) > 0.0 {
                let (a, b) = (find(&mut parent, x), find(&mut parent, nx + y));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let px = j.row_marginal();
    let py = j.col_marginal();
    let mut ids: Vec<Option<usize>> = vec![None; nx + ny];
    let mut mass = Vec::new();
    let mut labels = vec![None; nx + ny];
    for node in 0..nx + ny {
        let m = if node < nx { px.probs()[node] } else { py.probs()[node - nx] };
        if m <= 0.0 {
            continue;
        }
        let root = find(&mut parent, node);
        let id = *ids[root].get_or_insert_with(|| {
            mass.push(0.0);
            mass.len() - 1
        });
        labels[node] = Some(id);
        if node < nx {
            mass[id] += m;
        }
    }
    GkReport {
        C_GK: base.from_nats(entropy_nats(&mass)),
        x_labels: labels[..nx].to_vec(),
        y_labels: labels[nx..].to_vec(),
        component_mass: mass,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    /// C(P_X) = C_GK(X;Y) under P_X·W.
    pub capacity: f64,
    /// I(X;Y), which caps the capacity.
    pub mutual_information: f64,
}

pub fn capacity_with_input_constraint(px: &Dist, w: &Channel, base: Base) -> Result<CapacityReport> {
    let j = w.joint(px)?;
    Ok(CapacityReport {
        capacity: gk_common_information(&j, base).C_GK,
        mutual_information: base.from_nats(mutual_information_nats(px.probs(), w.rows())),
    })
}

/// Second singular value of P(x,y)/√(P(x)P(y)) on the support.
pub(crate) fn maxcorr_mass(mass: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = mass.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..mass.first().map_or(0, |r| r.len())).map(|y| mass.iter().map(|r| r[y]).sum()).collect();
    let xs: Vec<usize> = (0..rows.len()).filter(|&i| rows[i] > 0.0).collect();
    let ys: Vec<usize> = (0..cols.len()).filter(|&i| cols[i] > 0.0).collect();
    if xs.len() < 2 || ys.len() < 2 {
        return 0.0;
    }
    let b = DMatrix::from_fn(xs.len(), ys.len(), |i, k| {
        let (x, y) = (xs[i], ys[k]);
        mass[x][y] / (rows[x] * cols[y]).sqrt()
    });
    let mut s: Vec<f64> = b.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.get(1).copied().unwrap_or(0.0).clamp(0.0, 1.0)
}

/// Hirschfeld–Gebelein–Rényi maximal correlation of a joint law.
pub fn maximal_correlation(j: &JointDist) -> f64 {
    maxcorr_mass(j.mass())
}

/// A joint law of (X, Y, W), stored as slices P(x, y, w) = slices[w][x][y].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConditional")]
pub struct ConditionalJoint {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub w: Vec<String>,
    pub slices: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawConditional {
    x: Vec<String>,
    y: Vec<String>,
    w: Vec<String>,
    slices: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawConditional> for ConditionalJoint {
    type Error = Error;
    fn try_from(r: RawConditional) -> Result<Self> {
        ConditionalJoint::new(r.x, r.y, r.w, r.slices)
    }
}

impl ConditionalJoint {
    pub fn new(x: Vec<String>, y: Vec<String>, w: Vec<String>, slices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if slices.len() != w.len() || slices.iter().any(|s| s.len() != x.len() || s.iter().any(|r| r.len() != y.len())) {
            return Err(Error::InvalidDistribution("slice shape does not match the alphabets".into()));
        }
        let flat = slices.iter().flatten().flatten();
        if flat.clone().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidDistribution("masses must be finite and non-negative".into()));
        }
        let total: f64 = flat.sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(ConditionalJoint { x, y, w, slices })
    }
}

/// ρ_m(X;Y|W) = max over w with P(w) > 0 of the maximal correlation of P_{XY|W=w}.
pub fn conditional_maximal_correlation(j: &ConditionalJoint) -> Result<f64> {
    let live: Vec<&Vec<Vec<f64>>> = j.slices.iter().filter(|s| s.iter().flatten().sum::<f64>() > 0.0).collect();
    if live.is_empty() {
        return Err(Error::EmptySlice);
    }
    Ok(live.into_iter().map(|s| maxcorr_mass(s)).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct SufficientStatistic {
    /// f(x): the group of each input; inputs with identical rows share a group.
    pub grouping: Vec<usize>,
    pub groups: usize,
    pub is_sufficient: bool,
    pub fullrank_after_grouping: bool,
}

/// Group inputs whose rows of `wz` agree (to 1e-10).
pub fn sufficient_statistic_detect(wz: &Channel) -> SufficientStatistic {
    let rows = wz.rows();
    let mut reps: Vec<usize> = Vec::new();
    let mut grouping = Vec::with_capacity(rows.len());
    for (x, r) in rows.iter().enumerate() {
        let g = reps
            .iter()
            .position(|&k| rows[k].iter().zip(r).all(|(a, b)| (a - b).abs() <= 1e-10))
            .unwrap_or_else(|| {
                reps.push(x);
                reps.len() - 1
            });
        grouping.push(g);
    }
    let grouped: Vec<Vec<f64>> = reps.iter().map(|&k| rows[k].clone()).collect();
    SufficientStatistic {
        groups: reps.len(),
        grouping,
        is_sufficient: true,
        fullrank_after_grouping: rank(&grouped, 1e-10) == reps.len(),
    }
}
