//! Transportation simplex: northwest-corner start, MODI potentials, Bland's rule.

use std::collections::VecDeque;

use super::{clean_mass, Coupling, CostMatrix};
use crate::prob_core::{tv_vec, Dist};
use crate::Result;

const ZERO: f64 = 1e-15;

/// Optimal transport plan between supplies `a` and demands `b` under `cost`.
/// Returns the plan (full m×n, zero rows/columns kept) and its cost.
pub(crate) fn transport_simplex(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
    let rows: Vec<usize> = (0..a.len()).filter(|&i| a[i] > ZERO).collect();
    let cols: Vec<usize> = (0..b.len()).filter(|&j| b[j] > ZERO).collect();
    let mut full = vec![vec![0.0; b.len()]; a.len()];
    if rows.is_empty() || cols.is_empty() {
        return (full, 0.0);
    }
    let sa: Vec<f64> = rows.iter().map(|&i| a[i]).collect();
    let sb: Vec<f64> = cols.iter().map(|&j| b[j]).collect();
    let sc: Vec<Vec<f64>> = rows.iter().map(|&i| cols.iter().map(|&j| cost[i][j]).collect()).collect();
    let x = solve_reduced(&sa, &sb, &sc);
    for (ri, &i) in rows.iter().enumerate() {
        for (cj, &j) in cols.iter().enumerate() {
            full[i][j] = x[ri][cj];
        }
    }
    let full = clean_mass(full);
    let value = full
        .iter()
        .zip(cost)
        .map(|(r, c)| r.iter().zip(c).map(|(x, c)| x * c).sum::<f64>())
        .sum();
    (full, value)
}

fn solve_reduced(a: &[f64], b: &[f64], c: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = a.len();
    let n = b.len();
    let mut x = vec![vec![0.0; n]; m];
    let mut basic = vec![vec![false; n]; m];

    // northwest corner; exactly m + n − 1 basic cells, zeros allowed
    let (mut ra, mut rb) = (a.to_vec(), b.to_vec());
    let (mut i, mut j) = (0, 0);
    loop {
        let v = ra[i].min(rb[j]).max(0.0);
        x[i][j] = v;
        basic[i][j] = true;
        ra[i] -= v;
        rb[j] -= v;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if (ra[i] <= rb[j] && i < m - 1) || j == n - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }

    let cmax = c.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    let rc_tol = 1e-12 * (1.0 + cmax);
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    for _ in 0..1_000_000 {
        potentials(&basic, c, &mut u, &mut v);
        // Bland: lowest-index improving cell enters
        let mut enter = None;
        'scan: for (i, row) in c.iter().enumerate() {
            for (j, &cij) in row.iter().enumerate() {
                if !basic[i][j] && cij - u[i] - v[j] < -rc_tol {
                    enter = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((ei, ej)) = enter else { break };
        let cycle = tree_path(&basic, ej, ei);
        // cycle[k] for odd positions from the entering cell carry the minus sign
        let mut leave: Option<(usize, usize)> = None;
        for (k, &(ci, cj)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                let better = match leave {
                    None => true,
                    Some((li, lj)) => {
                        x[ci][cj] < x[li][lj] || (x[ci][cj] == x[li][lj] && ci * n + cj < li * n + lj)
                    }
                };
                if better {
                    leave = Some((ci, cj));
                }
            }
        }
        let (li, lj) = leave.expect("cycle has a minus cell");
        let theta = x[li][lj];
        for (k, &(ci, cj)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                x[ci][cj] -= theta;
            } else {
                x[ci][cj] += theta;
            }
        }
        x[ei][ej] += theta;
        x[li][lj] = 0.0;
        basic[li][lj] = false;
        basic[ei][ej] = true;
    }
    x
}

/// Dual potentials with u₀ = 0, propagated along the basis tree.
fn potentials(basic: &[Vec<bool>], c: &[Vec<f64>], u: &mut [f64], v: &mut [f64]) {
    let m = u.len();
    let n = v.len();
    let mut su = vec![false; m];
    let mut sv = vec![false; n];
    let mut queue = VecDeque::new();
    u[0] = 0.0;
    su[0] = true;
    queue.push_back((true, 0));
    while let Some((is_row, k)) = queue.pop_front() {
        if is_row {
            for j in 0..n {
                if basic[k][j] && !sv[j] {
                    v[j] = c[k][j] - u[k];
                    sv[j] = true;
                    queue.push_back((false, j));
                }
            }
        } else {
            for i in 0..m {
                if basic[i][k] && !su[i] {
                    u[i] = c[i][k] - v[k];
                    su[i] = true;
                    queue.push_back((true, i));
                }
            }
        }
    }
}

/// Basic cells on the tree path from column `start_col` to row `end_row`,
/// in order; the first cell shares the entering cell's column.
fn tree_path(basic: &[Vec<bool>], start_col: usize, end_row: usize) -> Vec<(usize, usize)> {
    let m = basic.len();
    let n = basic[0].len();
    // nodes: rows 0..m, columns m..m+n
    let mut parent = vec![usize::MAX; m + n];
    let start = m + start_col;
    parent[start] = start;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == end_row {
            break;
        }
        if node < m {
            for j in 0..n {
                if basic[node][j] && parent[m + j] == usize::MAX {
                    parent[m + j] = node;
                    queue.push_back(m + j);
                }
            }
        } else {
            let j = node - m;
            for i in 0..m {
                if basic[i][j] && parent[i] == usize::MAX {
                    parent[i] = node;
                    queue.push_back(i);
                }
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = end_row;
    while node != start {
        let p = parent[node];
        let cell = if node < m { (node, p - m) } else { (p, node - m) };
        cells.push(cell);
        node = p;
    }
    cells.reverse();
    cells
}

/// Exact minimum-cost coupling and its value.
pub fn transport_min_cost(p: &Dist, q: &Dist, c: &CostMatrix) -> Result<(Coupling, f64)> {
    c.check_against(p, q)?;
    let (mass, value) = transport_simplex(p.probs(), q.probs(), &c.costs);
    Ok((Coupling::from_mass(p, q, mass), value))
}

/// Standard maximal coupling mass: diagonal min(P, Q) and proportional
/// completion of the residual excess.
pub(crate) fn maximal_coupling_mass(p: &[f64], q: &[f64]) -> Vec<Vec<f64>> {
    let k = p.len();
    let tv = tv_vec(p, q);
    let mut mass = vec![vec![0.0; k]; k];
    let ep: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - b).max(0.0)).collect();
    let eq: Vec<f64> = p.iter().zip(q).map(|(a, b)| (b - a).max(0.0)).collect();
    let sq: f64 = eq.iter().sum();
    for x in 0..k {
        mass[x][x] = p[x].min(q[x]);
        if tv > 0.0 && ep[x] > 0.0 {
            for y in 0..k {
                if eq[y] > 0.0 {
                    mass[x][y] += ep[x] * eq[y] / sq;
                }
            }
        }
    }
    mass
}

/// The standard maximal coupling and M = ℙ{X = Y} = 1 − |P − Q|.
pub fn maximal_coupling(p: &Dist, q: &Dist) -> Result<(Coupling, f64)> {
    p.same_alphabet(q)?;
    let mass = maximal_coupling_mass(p.probs(), q.probs());
    let m = 1.0 - tv_vec(p.probs(), q.probs());
    Ok((Coupling::from_mass(p, q, mass), m))
}

/// Coupling minimising ℙ{d(X,Y) > threshold}, and that minimum.
pub fn min_excess_distance_prob(p: &Dist, q: &Dist, d: &CostMatrix, threshold: f64) -> Result<(Coupling, f64)> {
    d.check_against(p, q)?;
    let c = d.exceedance(threshold);
    let (coupling, value) = transport_min_cost(p, q, &c)?;
    Ok((coupling, value.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling_lp::coupling_vertices;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(v: &[f64]) -> Dist {
        Dist::from_probs(v.to_vec()).unwrap()
    }

    fn random_dist(rng: &mut ChaCha8Rng, k: usize) -> Dist {
        let v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = v.iter().sum();
        Dist::from_probs(v.iter().map(|x| x / s).collect()).unwrap()
    }

    #[test]
    fn transport_examples() {
        let p = d(&[0.5, 0.5]);
        let q = d(&[0.25, 0.75]);
        let ham = CostMatrix::hamming(p.alphabet(), p.alphabet());
        let (c, v) = transport_min_cost(&p, &p, &ham).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(c.mass(), &[vec![0.5, 0.0], vec![0.0, 0.5]]);
        let (c, v) = transport_min_cost(&p, &q, &ham).unwrap();
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-15);
        assert!(c.marginal_error() < 1e-15);
    }

    #[test]
    fn transport_matches_vertex_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = random_dist(&mut rng, 3);
            let q = random_dist(&mut rng, 3);
            let c = CostMatrix::from_fn(p.alphabet(), q.alphabet(), |_, _| rng.random::<f64>() * 3.0);
            let (cp, v) = transport_min_cost(&p, &q, &c).unwrap();
            assert!(cp.marginal_error() < 1e-12);
            let best = coupling_vertices(&p, &q)
                .unwrap()
                .iter()
                .map(|vx| vx.expected_cost(&c))
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(v, best, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_marginals_terminate() {
        let p = d(&[0.25, 0.25, 0.25, 0.25]);
        let q = d(&[0.5, 0.25, 0.25]);
        let c = CostMatrix::from_fn(p.alphabet(), q.alphabet(), |i, j| ((i as f64) - (j as f64)).abs());
        let (cp, v) = transport_min_cost(&p, &q, &c).unwrap();
        assert!(cp.marginal_error() < 1e-14);
        assert_abs_diff_eq!(v, 0.75, epsilon = 1e-14);
        let best = coupling_vertices(&p, &q)
            .unwrap()
            .iter()
            .map(|vx| vx.expected_cost(&c))
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(v, best, epsilon = 1e-14);
    }

    #[test]
    fn maximal_examples() {
        let (c, m) = maximal_coupling(&d(&[0.5, 0.5]), &d(&[0.25, 0.75])).unwrap();
        assert_abs_diff_eq!(m, 0.75, epsilon = 1e-15);
        assert_eq!(c.mass(), &[vec![0.25, 0.25], vec![0.0, 0.5]]);
        let (c, m) = maximal_coupling(&d(&[0.3, 0.7]), &d(&[0.3, 0.7])).unwrap();
        assert_eq!(m, 1.0);
        assert_eq!(c.mass(), &[vec![0.3, 0.0], vec![0.0, 0.7]]);
        let (_, m) = maximal_coupling(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn excess_examples() {
        let p = d(&[0.5, 0.5]);
        let q = d(&[0.25, 0.75]);
        let ham = CostMatrix::hamming(p.alphabet(), q.alphabet());
        assert_eq!(min_excess_distance_prob(&p, &q, &ham, 1.0).unwrap().1, 0.0);
        assert_abs_diff_eq!(min_excess_distance_prob(&p, &q, &ham, 0.0).unwrap().1, 0.25, epsilon = 1e-15);
        let a = d(&[1.0, 0.0]);
        let b = d(&[0.0, 1.0]);
        assert_eq!(min_excess_distance_prob(&a, &b, &ham, 0.5).unwrap().1, 1.0);
    }
}
