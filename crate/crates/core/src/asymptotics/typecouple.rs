use std::collections::HashMap;

use serde::Serialize;

use crate::coupling_lp::{Coupling, CostMatrix};
use crate::prob_core::{decode_index, enumerate_types, power_vec, product_power, Dist, TypeComposition};
use crate::{Error, Result, DEFAULT_ATOM_CAP};

#[derive(Debug, Clone, Serialize)]
pub struct TypeCouplingReport {
    pub coupling: Coupling,
    /// ℙ{(1/n)Σ d(x_i, y_i) > threshold} under the constructed coupling.
    pub excess: f64,
    /// Counts of the selected joint type, row-major over 𝒳 × 𝒴; absent when no
    /// joint n-type meets the threshold.
    pub joint_type: Option<Vec<u32>>,
    /// max{D(T_X‖P), D(T_Y‖Q)} at the selected type, in nats.
    pub type_objective: Option<f64>,
    /// Mass placed on the selected joint type class.
    pub allocated: f64,
    /// 1 − allocated: the guaranteed ceiling on `excess`.
    pub excess_bound: f64,
}

/// Sequence-level type bookkeeping for one side.
struct Classes {
    counts: Vec<Vec<u32>>,
    size: Vec<usize>,
    mass: Vec<f64>,
    members: Vec<Vec<usize>>,
}

impl Classes {
    fn build(p: &[f64], n: usize) -> Self {
        let k = p.len();
        let pn = power_vec(p, n);
        let mut ids: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut c = Classes { counts: vec![], size: vec![], mass: vec![], members: vec![] };
        for (i, &m) in pn.iter().enumerate() {
            let t = TypeComposition::of_sequence(&decode_index(i, k, n), k).counts;
            let id = *ids.entry(t.clone()).or_insert_with(|| {
                c.counts.push(t);
                c.size.push(0);
                c.mass.push(0.0);
                c.members.push(vec![]);
                c.counts.len() - 1
            });
            c.size[id] += 1;
            c.mass[id] += m;
            c.members[id].push(i);
        }
        c
    }

    fn id_of(&self, counts: &[u32]) -> Option<usize> {
        self.counts.iter().position(|c| c.as_slice() == counts)
    }
}

fn type_kl(counts: &[u32], n: usize, p: &[f64]) -> f64 {
    counts
        .iter()
        .zip(p)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &pi)| {
            let t = c as f64 / n as f64;
            if pi > 0.0 {
                t * (t / pi).ln()
            } else {
                f64::INFINITY
            }
        })
        .sum()
}

/// Greedy class-level coupling: repeatedly pair the largest remaining masses.
fn greedy_match(a: &[f64], b: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ia.sort_by(|&i, &j| a[j].total_cmp(&a[i]).then(i.cmp(&j)));
    ib.sort_by(|&i, &j| b[j].total_cmp(&b[i]).then(i.cmp(&j)));
    let (mut ra, mut rb) = (a.to_vec(), b.to_vec());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < ia.len() && j < ib.len() {
        let (x, y) = (ia[i], ib[j]);
        let m = ra[x].min(rb[y]);
        if m > 0.0 {
            out.push((x, y, m));
        }
        ra[x] -= m;
        rb[y] -= m;
        if ra[x] <= rb[y] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// The type-class coupling of (Pⁿ, Qⁿ) for the averaged distance: the class of
/// the joint n-type minimising max{D(T_X‖P), D(T_Y‖Q)} subject to E_T d ≤ threshold
/// receives min(Pⁿ(𝒯(T_X)), Qⁿ(𝒯(T_Y))), spread uniformly over its sequence pairs;
/// the leftover class masses are matched greedily and spread as products of uniforms.
pub fn type_coupling_excess(p: &Dist, q: &Dist, d: &CostMatrix, threshold: f64, n: usize) -> Result<TypeCouplingReport> {
    d.check_against(p, q)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let (kx, ky) = (p.len(), q.len());
    let pn = product_power(p, n, DEFAULT_ATOM_CAP)?;
    let qn = product_power(q, n, DEFAULT_ATOM_CAP)?;
    let cells = pn.len() as f64 * qn.len() as f64;
    if cells > DEFAULT_ATOM_CAP as f64 {
        return Err(Error::too_large("product coupling cells", cells, DEFAULT_ATOM_CAP as f64));
    }
    let tol = 1e-12 * (1.0 + threshold.abs());
    let avg_cost = |counts: &[u32]| -> f64 {
        counts.iter().enumerate().map(|(c, &m)| m as f64 * d.costs[c / ky][c % ky]).sum::<f64>() / n as f64
    };

    let mut star: Option<(Vec<u32>, f64)> = None;
    for t in enumerate_types(kx * ky, n)? {
        if avg_cost(&t.counts) > threshold + tol {
            continue;
        }
        let tx: Vec<u32> = (0..kx).map(|x| (0..ky).map(|y| t.counts[x * ky + y]).sum()).collect();
        let ty: Vec<u32> = (0..ky).map(|y| (0..kx).map(|x| t.counts[x * ky + y]).sum()).collect();
        let obj = type_kl(&tx, n, p.probs()).max(type_kl(&ty, n, q.probs()));
        if obj.is_finite() && star.as_ref().is_none_or(|(_, best)| obj < *best) {
            star = Some((t.counts, obj));
        }
    }

    let xs = Classes::build(p.probs(), n);
    let ys = Classes::build(q.probs(), n);
    let mut mass = vec![vec![0.0; qn.len()]; pn.len()];
    let mut rx = xs.mass.clone();
    let mut ry = ys.mass.clone();
    let mut allocated = 0.0;

    let seq_pair_counts = |xi: usize, yi: usize| -> Vec<u32> {
        let a = decode_index(xi, kx, n);
        let b = decode_index(yi, ky, n);
        let mut c = vec![0u32; kx * ky];
        for (u, v) in a.into_iter().zip(b) {
            c[u * ky + v] += 1;
        }
        c
    };

    if let Some((ref t, _)) = star {
        let tx: Vec<u32> = (0..kx).map(|x| (0..ky).map(|y| t[x * ky + y]).sum()).collect();
        let ty: Vec<u32> = (0..ky).map(|y| (0..kx).map(|x| t[x * ky + y]).sum()).collect();
        let (cx, cy) = (xs.id_of(&tx).expect("type occurs"), ys.id_of(&ty).expect("type occurs"));
        allocated = xs.mass[cx].min(ys.mass[cy]);
        let pairs: Vec<(usize, usize)> = xs.members[cx]
            .iter()
            .flat_map(|&xi| ys.members[cy].iter().map(move |&yi| (xi, yi)))
            .filter(|&(xi, yi)| seq_pair_counts(xi, yi) == *t)
            .collect();
        let share = allocated / pairs.len() as f64;
        for (xi, yi) in pairs {
            mass[xi][yi] += share;
        }
        rx[cx] = (rx[cx] - allocated).max(0.0);
        ry[cy] = (ry[cy] - allocated).max(0.0);
    }

    for (a, b, m) in greedy_match(&rx, &balance(&rx, &ry)) {
        let share = m / (xs.size[a] * ys.size[b]) as f64;
        for &xi in &xs.members[a] {
            for &yi in &ys.members[b] {
                mass[xi][yi] += share;
            }
        }
    }

    let mut excess = 0.0;
    for (xi, row) in mass.iter().enumerate() {
        for (yi, &m) in row.iter().enumerate() {
            if m > 0.0 && avg_cost(&seq_pair_counts(xi, yi)) > threshold + tol {
                excess += m;
            }
        }
    }
    let coupling = Coupling::from_mass(&pn, &qn, mass);
    Ok(TypeCouplingReport {
        coupling,
        excess: excess.clamp(0.0, 1.0),
        joint_type: star.as_ref().map(|(t, _)| t.clone()),
        type_objective: star.as_ref().map(|(_, v)| *v),
        allocated,
        excess_bound: 1.0 - allocated,
    })
}

/// Rescale the target residuals so both sides carry exactly the same total.
fn balance(rx: &[f64], ry: &[f64]) -> Vec<f64> {
    let (sx, sy): (f64, f64) = (rx.iter().sum(), ry.iter().sum());
    if sy > 0.0 {
        ry.iter().map(|v| v * sx / sy).collect()
    } else {
        ry.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling_lp::min_excess_distance_prob;
    use crate::prob_core::enumerate_types;
    use approx::assert_abs_diff_eq;

    fn d(v: &[f64]) -> Dist {
        Dist::from_probs(v.to_vec()).unwrap()
    }

    #[test]
    fn generous_threshold_means_no_excess() {
        let p = d(&[0.2, 0.5, 0.3]);
        let q = d(&[0.6, 0.4]);
        let c = CostMatrix::from_fn(p.alphabet(), q.alphabet(), |i, j| (i + 2 * j) as f64);
        for n in 1..=3 {
            let r = type_coupling_excess(&p, &q, &c, 4.0, n).unwrap();
            assert_eq!(r.excess, 0.0);
            assert!(r.coupling.marginal_error() < 1e-12);
        }
    }

    #[test]
    fn paper_pair_n2() {
        let p = d(&[0.5, 0.5]);
        let q = d(&[0.25, 0.75]);
        let ham = CostMatrix::hamming(p.alphabet(), q.alphabet());
        let r = type_coupling_excess(&p, &q, &ham, 0.5, 2).unwrap();
        assert!(r.coupling.marginal_error() < 1e-12);
        // T*_X = T*_Y = (1,1): P²-class 0.5, Q²-class 0.375
        assert_abs_diff_eq!(r.allocated, 0.375, epsilon = 1e-15);
        assert!(r.excess <= r.excess_bound + 1e-12);
        let pn = product_power(&p, 2, 64).unwrap();
        let qn = product_power(&q, 2, 64).unwrap();
        let (_, lp) = min_excess_distance_prob(&pn, &qn, &ham.product_average(2, 256).unwrap(), 0.5).unwrap();
        assert!(r.excess >= lp - 1e-12);
    }

    #[test]
    fn n1_is_a_valid_single_letter_coupling() {
        let p = d(&[0.2, 0.5, 0.3]);
        let q = d(&[0.1, 0.6, 0.3]);
        let c = CostMatrix::from_fn(p.alphabet(), q.alphabet(), |i, j| (i as f64 - j as f64).abs());
        for &thr in &[0.0, 0.5, 1.0] {
            let r = type_coupling_excess(&p, &q, &c, thr, 1).unwrap();
            let (_, lp) = min_excess_distance_prob(&p, &q, &c, thr).unwrap();
            assert!(r.coupling.marginal_error() < 1e-12);
            assert!(r.excess >= lp - 1e-12 && r.excess <= r.excess_bound + 1e-12);
        }
    }

    #[test]
    fn infeasible_threshold_allocates_nothing() {
        let p = d(&[0.5, 0.5]);
        let c = CostMatrix::from_fn(p.alphabet(), p.alphabet(), |_, _| 1.0);
        let r = type_coupling_excess(&p, &p, &c, 0.5, 3).unwrap();
        assert!(r.joint_type.is_none());
        assert_eq!(r.excess_bound, 1.0);
        assert_abs_diff_eq!(r.excess, 1.0, epsilon = 1e-12);
        assert!(r.coupling.marginal_error() < 1e-12);
        assert!(enumerate_types(4, 3).is_ok());
    }
}
