//! Dense linear-algebra helpers over nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub(crate) fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(m, n, |i, j| rows[i][j])
}

pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    to_matrix(rows).svd(false, false).rank(tol)
}

/// Orthonormal basis of the null space of A (columns returned as vectors).
pub(crate) fn nullspace(rows: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let a = to_matrix(rows);
    let n = a.ncols();
    if n == 0 {
        return vec![];
    }
    let ata = a.transpose() * &a;
    let eig = SymmetricEigen::new(ata);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (0..n)
        .filter(|&k| eig.eigenvalues[k].abs() <= tol * scale)
        .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect()
}

/// Solve A x = b when A has full column rank and the system is consistent.
pub(crate) fn solve_full_column_rank(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    if svd.rank(tol) < a.ncols() {
        return None;
    }
    let x = svd.solve(b, tol).ok()?;
    let resid = (a * &x - b).amax();
    if resid > 1e-9 {
        return None;
    }
    Some(x)
}

/// All vertices (basic feasible solutions) of {x ≥ 0 : A x = b}, deduplicated
/// at `dedup_tol`. Enumerates column subsets of size rank(A).
pub(crate) fn basic_feasible_solutions(a_rows: &[Vec<f64>], b: &[f64], dedup_tol: f64) -> Vec<Vec<f64>> {
    let n = a_rows.first().map_or(0, |r| r.len());
    let a = to_matrix(a_rows);
    let bv = DVector::from_column_slice(b);
    let r = a.clone().svd(false, false).rank(1e-10);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |x: Vec<f64>| {
        if !out
            .iter()
            .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= dedup_tol))
        {
            out.push(x);
        }
    };
    if r == 0 {
        if bv.amax() <= 1e-12 {
            push(vec![0.0; n]);
        }
        return out;
    }
    for subset in combinations(n, r) {
        let sub = DMatrix::from_fn(a.nrows(), r, |i, k| a[(i, subset[k])]);
        if let Some(xs) = solve_full_column_rank(&sub, &bv, 1e-10) {
            if xs.iter().all(|&v| v >= -1e-10) {
                let mut x = vec![0.0; n];
                for (k, &j) in subset.iter().enumerate() {
                    x[j] = if xs[k].abs() < 1e-13 { 0.0 } else { xs[k].max(0.0) };
                }
                push(x);
            }
        }
    }
    out
}

/// All k-subsets of 0..n in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(12, 5).len(), 792);
    }

    #[test]
    fn simplex_vertices() {
        let v = basic_feasible_solutions(&[vec![1.0, 1.0, 1.0]], &[1.0], 1e-10);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn nullspace_of_duplicate_columns() {
        let ns = nullspace(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 1e-10);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][0] + ns[0][1]).abs() < 1e-12);
        assert_eq!(rank(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 1e-10), 2);
    }
}
