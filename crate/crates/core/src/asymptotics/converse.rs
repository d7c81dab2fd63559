use crate::coupling_lp::{transport_simplex, CostMatrix};
use crate::prob_core::Dist;
use crate::{Base, Result};

const ITERS: usize = 2000;
const POLISH_ITERS: usize = 1000;

/// Euclidean projection onto the probability simplex (sort-based).
fn project_simplex(z: &[f64]) -> Vec<f64> {
    let mut u = z.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    z.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Projection onto {simplex} ∩ {c·q ≤ thr}: q(μ) = Proj(z − μc) with μ ≥ 0
/// chosen by bisection so the cost constraint is tight when it binds.
fn project_feasible(z: &[f64], c: &[f64], thr: f64) -> Vec<f64> {
    let cost = |q: &[f64]| q.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
    let q0 = project_simplex(z);
    if cost(&q0) <= thr {
        return q0;
    }
    let shifted = |mu: f64| project_simplex(&z.iter().zip(c).map(|(a, b)| a - mu * b).collect::<Vec<_>>());
    let mut hi = 1.0;
    while cost(&shifted(hi)) > thr && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cost(&shifted(mid)) > thr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    shifted(hi)
}

struct Problem<'a> {
    cells: Vec<(usize, usize, f64)>,
    p: &'a [f64],
    q: &'a [f64],
}

impl Problem<'_> {
    fn marginals(&self, r: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut rx = vec![0.0; self.p.len()];
        let mut ry = vec![0.0; self.q.len()];
        for (&(x, y, _), &m) in self.cells.iter().zip(r) {
            rx[x] += m;
            ry[y] += m;
        }
        (rx, ry)
    }

    fn divs(&self, r: &[f64]) -> (f64, f64, Vec<f64>, Vec<f64>) {
        let (rx, ry) = self.marginals(r);
        let kl = |a: &[f64], b: &[f64]| a.iter().zip(b).filter(|(&u, _)| u > 0.0).map(|(&u, &v)| u * (u / v).ln()).sum::<f64>();
        (kl(&rx, self.p), kl(&ry, self.q), rx, ry)
    }

    fn value(&self, r: &[f64]) -> f64 {
        let (a, b, _, _) = self.divs(r);
        a.max(b)
    }

    /// A subgradient of max{D(R_X‖P), D(R_Y‖Q)}, centred on the simplex tangent space.
    fn subgradient(&self, r: &[f64]) -> Vec<f64> {
        let (a, b, rx, ry) = self.divs(r);
        let mut g: Vec<f64> = self
            .cells
            .iter()
            .map(|&(x, y, _)| {
                if a >= b {
                    (rx[x].max(1e-12) / self.p[x]).ln()
                } else {
                    (ry[y].max(1e-12) / self.q[y]).ln()
                }
            })
            .collect();
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        g.iter_mut().for_each(|v| *v -= mean);
        g
    }

    fn descend(&self, start: &[f64], c: &[f64], thr: f64, step0: f64, iters: usize) -> (Vec<f64>, f64) {
        let mut r = start.to_vec();
        let mut best = (r.clone(), self.value(&r));
        for k in 1..=iters {
            let g = self.subgradient(&r);
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-15 {
                break;
            }
            let step = step0 / (k as f64).sqrt();
            let z: Vec<f64> = r.iter().zip(&g).map(|(a, b)| a - step * b / norm).collect();
            r = project_feasible(&z, c, thr);
            let v = self.value(&r);
            if v < best.1 {
                best = (r.clone(), v);
            }
        }
        best
    }
}

/// min over joints R with E_R d ≤ threshold of max{D(R_X‖P), D(R_Y‖Q)}.
///
/// +∞ when no joint on supp P × supp Q meets the constraint; 0 when the
/// optimal transport cost of (P, Q) already does.
pub fn excess_exponent_converse(p: &Dist, q: &Dist, d: &CostMatrix, threshold: f64, base: Base) -> Result<f64> {
    d.check_against(p, q)?;
    let (pv, qv) = (p.probs(), q.probs());
    let tol = 1e-12 * (1.0 + threshold.abs());
    let mut cells = Vec::new();
    for (x, &px) in pv.iter().enumerate() {
        for (y, &qy) in qv.iter().enumerate() {
            if px > 0.0 && qy > 0.0 {
                cells.push((x, y, d.costs[x][y]));
            }
        }
    }
    let (imin, cmin) = cells
        .iter()
        .enumerate()
        .map(|(i, &(_, _, c))| (i, c))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("distributions have non-empty support");
    if cmin > threshold + tol {
        return Ok(f64::INFINITY);
    }
    let (mass, transport) = transport_simplex(pv, qv, &d.costs);
    if transport <= threshold + tol {
        return Ok(0.0);
    }
    let c: Vec<f64> = cells.iter().map(|&(_, _, c)| c).collect();
    // feasible start on the segment between the transport optimum and the cheapest cell
    let t = (transport - threshold) / (transport - cmin);
    let mut start: Vec<f64> = cells.iter().map(|&(x, y, _)| (1.0 - t) * mass[x][y]).collect();
    start[imin] += t;
    let start = project_feasible(&start, &c, threshold);
    let prob = Problem { cells, p: pv, q: qv };
    let (mut best, mut value) = prob.descend(&start, &c, threshold, 0.5, ITERS);
    for step in [0.05, 0.005, 0.0005] {
        let (r, v) = prob.descend(&best, &c, threshold, step, POLISH_ITERS);
        if v < value {
            best = r;
            value = v;
        }
    }
    Ok(base.from_nats(value.max(0.0)))
}
