//! Vertex enumeration of the transportation polytope C(P, Q).
//!
//! Every vertex has a forest support, so it can be built by repeatedly
//! saturating a cell: pick an active row i and column j, put min(a_i, b_j)
//! there, and retire whichever line ran out. Conversely each such sequence
//! ends at a vertex (each new edge attaches a line that never appears again,
//! so no cycle can close). Partial assignments already explored are skipped.

use std::collections::HashSet;

use super::Coupling;
use crate::prob_core::Dist;
use crate::{Error, Result};

/// Cap on |supp P| + |supp Q| for exhaustive enumeration.
pub const VERTEX_SUPPORT_CAP: usize = 12;

const ACTIVE: f64 = 1e-12;
const DEDUP: f64 = 1e-10;

/// All vertices of C(P, Q), each a valid coupling.
pub fn coupling_vertices(p: &Dist, q: &Dist) -> Result<Vec<Coupling>> {
    let sp = p.support().len();
    let sq = q.support().len();
    if sp + sq > VERTEX_SUPPORT_CAP {
        return Err(Error::too_large(
            "|supp P| + |supp Q|",
            (sp + sq) as f64,
            VERTEX_SUPPORT_CAP as f64,
        ));
    }
    Ok(transport_vertices(p.probs(), q.probs())
        .into_iter()
        .map(|m| Coupling::from_mass(p, q, m))
        .collect())
}

pub(crate) fn transport_vertices(a: &[f64], b: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let m = a.len();
    let n = b.len();
    let mut ctx = Ctx {
        n,
        seen: HashSet::new(),
        keys: HashSet::new(),
        out: Vec::new(),
        shape: (m, n),
    };
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut assign = Vec::new();
    ctx.rec(&mut ra, &mut rb, &mut assign);
    ctx.out
}

struct Ctx {
    n: usize,
    seen: HashSet<Vec<(usize, i64)>>,
    keys: HashSet<Vec<i64>>,
    out: Vec<Vec<Vec<f64>>>,
    shape: (usize, usize),
}

fn quantize(x: f64) -> i64 {
    (x / DEDUP).round() as i64
}

impl Ctx {
    fn rec(&mut self, ra: &mut [f64], rb: &mut [f64], assign: &mut Vec<(usize, f64)>) {
        let rows: Vec<usize> = (0..ra.len()).filter(|&i| ra[i] > ACTIVE).collect();
        let cols: Vec<usize> = (0..rb.len()).filter(|&j| rb[j] > ACTIVE).collect();
        if rows.is_empty() || cols.is_empty() {
            self.record(assign);
            return;
        }
        let mut key: Vec<(usize, i64)> = assign.iter().map(|&(c, v)| (c, quantize(v))).collect();
        key.sort_unstable();
        if !self.seen.insert(key) {
            return;
        }
        for &i in &rows {
            for &j in &cols {
                let (oa, ob) = (ra[i], rb[j]);
                let x = oa.min(ob);
                if oa <= ob {
                    ra[i] = 0.0;
                    rb[j] = ob - x;
                } else {
                    rb[j] = 0.0;
                    ra[i] = oa - x;
                }
                assign.push((i * self.n + j, x));
                self.rec(ra, rb, assign);
                assign.pop();
                ra[i] = oa;
                rb[j] = ob;
            }
        }
    }

    fn record(&mut self, assign: &[(usize, f64)]) {
        let (m, n) = self.shape;
        let mut mass = vec![vec![0.0; n]; m];
        for &(c, v) in assign {
            mass[c / n][c % n] += v;
        }
        let key: Vec<i64> = mass.iter().flatten().map(|&v| quantize(v)).collect();
        if self.keys.insert(key) {
            self.out.push(mass);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(v: &[f64]) -> Dist {
        Dist::from_probs(v.to_vec()).unwrap()
    }

    #[test]
    fn birkhoff_2x2() {
        let v = coupling_vertices(&d(&[0.5, 0.5]), &d(&[0.5, 0.5])).unwrap();
        assert_eq!(v.len(), 2);
        for c in &v {
            let m = c.mass();
            assert!(m[0][0] == 0.5 && m[1][1] == 0.5 || m[0][1] == 0.5 && m[1][0] == 0.5);
        }
    }

    #[test]
    fn one_parameter_family() {
        // joints [[t, 0.5−t],[0.25−t, 0.25+t]], t ∈ [0, 0.25]
        let v = coupling_vertices(&d(&[0.5, 0.5]), &d(&[0.25, 0.75])).unwrap();
        assert_eq!(v.len(), 2);
        let mut ts: Vec<f64> = v.iter().map(|c| c.mass()[0][0]).collect();
        ts.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ts[0], 0.0);
        assert_abs_diff_eq!(ts[1], 0.25);
    }

    #[test]
    fn two_by_three_vertex_count_bounded() {
        let v = coupling_vertices(&d(&[0.37, 0.63]), &d(&[0.2, 0.5, 0.3])).unwrap();
        assert!(!v.is_empty() && v.len() <= 12);
        for c in &v {
            assert!(c.marginal_error() < 1e-12);
            let nz = c.mass().iter().flatten().filter(|&&x| x > 0.0).count();
            assert!(nz <= 4);
        }
    }

    #[test]
    fn cap() {
        let p = Dist::uniform(7);
        assert!(coupling_vertices(&p, &p).is_err());
    }
}
