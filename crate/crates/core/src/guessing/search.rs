//! Exhaustive and greedy search over functions f: 𝒳 → 𝒴.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{report_for, GuessReport};
use crate::prob_core::Dist;
use crate::{Error, Result, DEFAULT_ATOM_CAP};

const TIE: f64 = 1e-12;

/// Minimise |P_Y − P_{f(X)}| over all f, depth-first in mixed-radix order.
/// Returns the lexicographically first optimal f and its distance.
pub(crate) fn exact_search(px: &[f64], py: &[f64], cap: usize) -> Result<(Vec<usize>, f64)> {
    let nx = px.len();
    let ny = py.len();
    let space = (ny as f64).powi(nx as i32);
    if space > cap as f64 {
        return Err(Error::too_large("function space |Y|^|X| (use the greedy search)", space, cap as f64));
    }
    // suffix sums of unassigned source mass
    let mut rest = vec![0.0; nx + 1];
    for x in (0..nx).rev() {
        rest[x] = rest[x + 1] + px[x];
    }
    let mut s = Search {
        px,
        py,
        rest,
        assigned: vec![0.0; ny],
        f: vec![0; nx],
        best: f64::INFINITY,
        best_f: vec![0; nx],
    };
    s.rec(0);
    Ok((s.best_f, s.best.clamp(0.0, 1.0)))
}

struct Search<'a> {
    px: &'a [f64],
    py: &'a [f64],
    rest: Vec<f64>,
    assigned: Vec<f64>,
    f: Vec<usize>,
    best: f64,
    best_f: Vec<usize>,
}

impl Search<'_> {
    /// TV can only grow through overshoot, and deficits can shrink by at most
    /// the mass not yet placed.
    fn lower_bound(&self, x: usize) -> f64 {
        let mut over = 0.0;
        let mut under = 0.0;
        for (a, q) in self.assigned.iter().zip(self.py) {
            let d = a - q;
            if d > 0.0 {
                over += d;
            } else {
                under -= d;
            }
        }
        over.max(under - self.rest[x])
    }

    fn rec(&mut self, x: usize) {
        if x == self.px.len() {
            let tv = self.lower_bound(x);
            if tv < self.best - TIE {
                self.best = tv;
                self.best_f.copy_from_slice(&self.f);
            }
            return;
        }
        for y in 0..self.py.len() {
            self.assigned[y] += self.px[x];
            self.f[x] = y;
            if self.lower_bound(x + 1) < self.best - TIE {
                self.rec(x + 1);
            }
            self.assigned[y] -= self.px[x];
        }
    }
}

/// Exhaustive maximal guessing coupling under the default cap 2^22 on |𝒴|^|𝒳|.
pub fn best_function_exact(px: &Dist, py: &Dist) -> Result<GuessReport> {
    best_function_exact_with_cap(px, py, DEFAULT_ATOM_CAP)
}

pub fn best_function_exact_with_cap(px: &Dist, py: &Dist, cap: usize) -> Result<GuessReport> {
    let (f, _) = exact_search(px.probs(), py.probs(), cap)?;
    Ok(report_for(px, py, f, DEFAULT_ATOM_CAP))
}

#[derive(PartialEq)]
struct Bin(f64, Reverse<usize>);

impl Eq for Bin {}

impl PartialOrd for Bin {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bin {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Greedy f: source atoms in descending mass (ties by index) each go to the
/// target with the largest remaining capacity P_Y(y) − assigned(y) (ties by
/// lowest index).
pub(crate) fn greedy_assign(px: &[f64], py: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..px.len()).collect();
    order.sort_by(|&a, &b| px[b].total_cmp(&px[a]).then(a.cmp(&b)));
    let mut heap: BinaryHeap<Bin> = py.iter().enumerate().map(|(y, &q)| Bin(q, Reverse(y))).collect();
    let mut f = vec![0; px.len()];
    for x in order {
        let Bin(cap, Reverse(y)) = heap.pop().expect("nonempty target alphabet");
        f[x] = y;
        heap.push(Bin(cap - px[x], Reverse(y)));
    }
    f
}

/// Greedy maximal guessing coupling; its `min_tv` upper-bounds the exact one.
pub fn best_function_greedy(px: &Dist, py: &Dist) -> Result<GuessReport> {
    if px.len() > DEFAULT_ATOM_CAP {
        return Err(Error::too_large("source atoms", px.len() as f64, DEFAULT_ATOM_CAP as f64));
    }
    let f = greedy_assign(px.probs(), py.probs());
    Ok(report_for(px, py, f, DEFAULT_ATOM_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guessing::guessing_probability;
    use approx::assert_abs_diff_eq;

    fn d(v: &[f64]) -> Dist {
        Dist::from_probs(v.to_vec()).unwrap()
    }

    fn brute(px: &[f64], py: &[f64]) -> f64 {
        let nx = px.len();
        let ny = py.len();
        let mut best = f64::INFINITY;
        for code in 0..ny.pow(nx as u32) {
            let f = crate::prob_core::decode_index(code, ny, nx);
            let pf = crate::guessing::pushforward(px, &f, ny);
            best = best.min(crate::prob_core::tv_vec(&pf, py));
        }
        best
    }

    #[test]
    fn exact_examples() {
        let r = best_function_exact(&d(&[0.25; 4]), &d(&[0.5, 0.25, 0.25])).unwrap();
        assert_abs_diff_eq!(r.min_tv, 0.0, epsilon = 1e-15);
        assert_eq!(r.G, 1.0);
        assert_eq!(r.f.map, vec![0, 0, 1, 2]);

        let r = best_function_exact(&d(&[0.5, 0.5]), &d(&[0.25, 0.75])).unwrap();
        assert_abs_diff_eq!(r.min_tv, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(r.G, 0.75, epsilon = 1e-15);
        assert_eq!(r.f.map, vec![0, 1]);
        let c = r.coupling.as_ref().unwrap();
        assert!(c.marginal_error() < 1e-15);
        assert_abs_diff_eq!(guessing_probability(&c.joint), r.G, epsilon = 1e-15);

        let p = d(&[0.1, 0.2, 0.3, 0.4]);
        let r = best_function_exact(&p, &p).unwrap();
        assert_eq!(r.f.map, vec![0, 1, 2, 3]);
        assert_eq!(r.G, 1.0);
    }

    #[test]
    fn exact_matches_unpruned_enumeration() {
        let px = [0.31, 0.07, 0.22, 0.15, 0.25];
        let py = [0.5, 0.2, 0.3];
        let (_, v) = exact_search(&px, &py, DEFAULT_ATOM_CAP).unwrap();
        assert_abs_diff_eq!(v, brute(&px, &py), epsilon = 1e-14);
    }

    #[test]
    fn greedy_examples() {
        let r = best_function_greedy(&d(&[0.5, 0.5]), &d(&[0.25, 0.75])).unwrap();
        assert_abs_diff_eq!(r.min_tv, 0.25, epsilon = 1e-15);
        let r = best_function_greedy(&d(&[0.125, 0.125, 0.25, 0.5]), &d(&[0.5, 0.5])).unwrap();
        assert_eq!(r.min_tv, 0.0);
    }

    #[test]
    fn cap_error() {
        let p = Dist::uniform(23);
        assert!(matches!(best_function_exact(&p, &d(&[0.5, 0.5])), Err(Error::TooLarge { .. })));
    }
}
