//! Sparse symmetric linear algebra: CSR matrices assembled from triplets
//! and a Jacobi-preconditioned conjugate gradient solver. Assembly and
//! iteration orders are fixed so repeated runs are bit-identical.

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build an `n x n` matrix from (row, col, value) triplets; duplicate
    /// positions are summed in their insertion order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<usize> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (i, j, v) = triplets[k];
            debug_assert!(i < n && j < n);
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col_idx[k] == i {
                    d[i] = self.values[k];
                }
            }
        }
        d
    }

    /// Extract the principal submatrix on `keep` (sorted, unique indices).
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut renumber = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            renumber[old] = new;
        }
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        for &old_i in keep {
            let new_i = renumber[old_i];
            for k in self.row_ptr[old_i]..self.row_ptr[old_i + 1] {
                let new_j = renumber[self.col_idx[k]];
                if new_j != usize::MAX {
                    triplets.push((new_i, new_j, self.values[k]));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), &triplets)
    }

    /// Largest absolute entry difference between the matrix and its
    /// transpose; exactly zero for symmetric assembly.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let vt = self.get(j, i);
                worst = worst.max((self.values[k] - vt).abs());
            }
        }
        worst
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        0.0
    }
}

/// Convergence record of a conjugate gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// definite systems. Returns the solution and a convergence report, or the
/// achieved report when the relative residual target is missed.
pub fn solve_spd(
    a: &CsrMatrix,
    b: &[f64],
    tol_rel: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, CgReport), CgReport> {
    let n = a.n();
    assert_eq!(b.len(), n);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            CgReport {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut best_rel = 1.0;
    for it in 0..max_iters {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            // Not positive definite along p; report failure.
            return Err(CgReport {
                iterations: it,
                relative_residual: best_rel,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = norm(&r) / b_norm;
        best_rel = best_rel.min(rel);
        if rel <= tol_rel {
            return Ok((
                x,
                CgReport {
                    iterations: it + 1,
                    relative_residual: rel,
                },
            ));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(CgReport {
        iterations: max_iters,
        relative_residual: best_rel,
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 1.0)]);
        let mut y = vec![0.0; 2];
        a.matvec(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![3.0, 1.0]);
    }

    #[test]
    fn cg_solves_laplacian() {
        let n = 50;
        let a = laplace_1d(n);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        a.matvec(&x_true, &mut b);
        let (x, rep) = solve_spd(&a, &b, 1e-12, 10 * n).unwrap();
        assert!(rep.relative_residual <= 1e-12);
        let err = x
            .iter()
            .zip(&x_true)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-9, "max error {err}");
    }

    #[test]
    fn submatrix_keeps_selected_block() {
        let a = laplace_1d(4);
        let s = a.submatrix(&[1, 2]);
        assert_eq!(s.n(), 2);
        let mut y = vec![0.0; 2];
        s.matvec(&[1.0, 0.0], &mut y);
        assert_eq!(y, vec![2.0, -1.0]);
    }

    #[test]
    fn symmetry_measure_is_zero_for_symmetric_input() {
        let a = laplace_1d(10);
        assert_eq!(a.max_asymmetry(), 0.0);
    }

    #[test]
    fn cg_reports_failure_on_indefinite_matrix() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(solve_spd(&a, &[0.0, 1.0], 1e-12, 100).is_err());
    }
}
