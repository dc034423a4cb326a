//! Sparse LU factorization with partial pivoting (left-looking
//! Gilbert-Peierls): each column is obtained by a sparse triangular solve
//! whose nonzero pattern comes from a depth-first search over the columns of
//! L computed so far.

use num_complex::Complex;
use num_traits::Zero;

use super::sparse::CsrMat;
use crate::scalar::{C, Scalar};
use crate::{Error, Result};

pub struct SparseLu<T> {
    n: usize,
    /// L columns, unit diagonal stored explicitly, original row indices.
    l_cols: Vec<Vec<(usize, C<T>)>>,
    /// U columns, entries (pivot_index, value), diagonal stored last.
    u_cols: Vec<Vec<(usize, C<T>)>>,
    /// Original row index chosen as pivot of each column.
    row_of: Vec<usize>,
}

/// Factor a square sparse matrix, `P·A = L·U`.
pub fn sparse_lu<T: Scalar>(a: &CsrMat<T>) -> Result<SparseLu<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument("sparse LU requires a square matrix".into()));
    }
    // Columns of A as rows of Aᵀ.
    let at = a.transpose();
    let scale = a.max_abs();
    let tiny = scale.max(T::one()) * T::epsilon() * T::from_usize(n).unwrap();

    const UNPIVOTED: usize = usize::MAX;
    let mut pinv = vec![UNPIVOTED; n];
    let mut row_of = vec![0usize; n];
    let mut l_cols: Vec<Vec<(usize, C<T>)>> = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<(usize, C<T>)>> = Vec::with_capacity(n);

    let mut x = vec![Complex::<T>::zero(); n];
    let mut marked = vec![false; n];
    let mut topo: Vec<usize> = Vec::with_capacity(n);
    // DFS stack of (node, position into the L column of that node's pivot).
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for j in 0..n {
        // Pattern of x = L \ A(:,j) by DFS from the pattern of A(:,j).
        topo.clear();
        for &r0 in at.row_indices(j) {
            if marked[r0] {
                continue;
            }
            stack.push((r0, 0));
            marked[r0] = true;
            while let Some(&mut (r, ref mut pos)) = stack.last_mut() {
                let k = pinv[r];
                let children: &[(usize, C<T>)] = if k == UNPIVOTED { &[] } else { &l_cols[k] };
                let mut descended = false;
                while *pos < children.len() {
                    let child = children[*pos].0;
                    *pos += 1;
                    if !marked[child] {
                        marked[child] = true;
                        stack.push((child, 0));
                        descended = true;
                        break;
                    }
                }
                if !descended {
                    stack.pop();
                    topo.push(r);
                }
            }
        }

        // Numeric sparse triangular solve in reverse postorder.
        for (&r, &v) in at.row_indices(j).iter().zip(at.row_data(j)) {
            x[r] = v;
        }
        for &r in topo.iter().rev() {
            let k = pinv[r];
            if k == UNPIVOTED {
                continue;
            }
            let xr = x[r];
            if xr.is_zero() {
                continue;
            }
            for &(row, l) in &l_cols[k] {
                if row != r {
                    x[row] -= l * xr;
                }
            }
        }

        // Partial pivot among rows not yet pivoted.
        let mut piv_row = UNPIVOTED;
        let mut best = T::zero();
        for &r in &topo {
            if pinv[r] == UNPIVOTED {
                let v = x[r].norm();
                if v >= best {
                    best = v;
                    piv_row = r;
                }
            }
        }
        if piv_row == UNPIVOTED || best <= tiny {
            for &r in &topo {
                x[r] = Complex::zero();
                marked[r] = false;
            }
            return Err(Error::Solver(format!(
                "sparse LU: singular at column {j} (pivot {:.3e})",
                best.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let ujj = x[piv_row];
        let inv = Complex::new(T::one(), T::zero()) / ujj;

        let mut lcol = vec![(piv_row, Complex::new(T::one(), T::zero()))];
        let mut ucol = Vec::new();
        for &r in &topo {
            if r == piv_row {
                // diagonal handled below
            } else if pinv[r] != UNPIVOTED {
                if !x[r].is_zero() {
                    ucol.push((pinv[r], x[r]));
                }
            } else if !x[r].is_zero() {
                lcol.push((r, x[r] * inv));
            }
            x[r] = Complex::zero();
            marked[r] = false;
        }
        ucol.push((j, ujj));
        pinv[piv_row] = j;
        row_of[j] = piv_row;
        l_cols.push(lcol);
        u_cols.push(ucol);
    }

    Ok(SparseLu { n, l_cols, u_cols, row_of })
}

impl<T: Scalar> SparseLu<T> {
    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(b.len(), self.n, "rhs length mismatch");
        let mut work = b.to_vec();
        let mut y = vec![Complex::<T>::zero(); self.n];
        for k in 0..self.n {
            let rk = self.row_of[k];
            let yk = work[rk];
            y[k] = yk;
            if yk.is_zero() {
                continue;
            }
            for &(r, l) in &self.l_cols[k] {
                if r != rk {
                    work[r] -= l * yk;
                }
            }
        }
        for j in (0..self.n).rev() {
            let &(dj, ujj) = self.u_cols[j].last().expect("diagonal stored last");
            debug_assert_eq!(dj, j);
            let zj = y[j] / ujj;
            y[j] = zj;
            if zj.is_zero() {
                continue;
            }
            for &(k, u) in &self.u_cols[j][..self.u_cols[j].len() - 1] {
                y[k] -= u * zj;
            }
        }
        y
    }

    /// Stored entries in L plus U; fill-in diagnostic.
    pub fn nnz(&self) -> usize {
        self.l_cols.iter().map(Vec::len).sum::<usize>()
            + self.u_cols.iter().map(Vec::len).sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::lu_factor;
    use crate::scalar::c;

    fn rand_sparse(n: usize, density: f64, seed: &mut u64) -> CsrMat<f64> {
        let rnd = |seed: &mut u64| {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 33) as f64) / (u32::MAX as f64)
        };
        let mut trips = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if rnd(seed) < density {
                    trips.push((i, j, c(rnd(seed) - 0.5, rnd(seed) - 0.5)));
                }
            }
            // keep it comfortably nonsingular
            trips.push((i, i, c(3.0 + rnd(seed), rnd(seed) - 0.5)));
        }
        CsrMat::from_triplets(n, n, &trips)
    }

    #[test]
    fn matches_dense_lu() {
        let mut seed = 0x5107u64;
        for n in [10usize, 60, 150] {
            let a = rand_sparse(n, 0.05, &mut seed);
            let b: Vec<_> = (0..n).map(|k| c((k % 7) as f64 - 3.0, (k % 5) as f64)).collect();
            let xs = sparse_lu(&a).unwrap().solve(&b);
            let xd = lu_factor(a.to_dense()).unwrap().solve(&b);
            for (u, v) in xs.iter().zip(&xd) {
                assert!((u - v).norm() < 1e-9, "n={n}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn residual_small() {
        let mut seed = 0xd00du64;
        let n = 200;
        let a = rand_sparse(n, 0.03, &mut seed);
        let b: Vec<_> = (0..n).map(|k| c(1.0 / (k + 1) as f64, 0.5)).collect();
        let x = sparse_lu(&a).unwrap().solve(&b);
        let r = a.matvec(&x);
        let res: f64 = r.iter().zip(&b).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn tridiagonal_and_permuted() {
        // Tridiagonal system.
        let n = 50;
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, i, c(2.0, 0.3)));
            if i > 0 {
                trips.push((i, i - 1, c(-1.0, 0.0)));
                trips.push((i - 1, i, c(-1.0, 0.1)));
            }
        }
        let a = CsrMat::from_triplets(n, n, &trips);
        let b = vec![c(1.0, -1.0); n];
        let x = sparse_lu(&a).unwrap().solve(&b);
        let r = a.matvec(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }

        // Permutation matrix: forces pivoting off the diagonal everywhere.
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, (i + 7) % n, c(1.0, 0.0)));
        }
        let p = CsrMat::from_triplets(n, n, &trips);
        let x = sparse_lu(&p).unwrap().solve(&b);
        let r = p.matvec(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn reports_singular() {
        // Rank-deficient: two identical rows.
        let a = CsrMat::from_triplets(
            3,
            3,
            &[
                (0, 0, c(1.0, 0.0)),
                (0, 1, c(2.0, 0.0)),
                (1, 0, c(1.0, 0.0)),
                (1, 1, c(2.0, 0.0)),
                (2, 2, c(1.0, 0.0)),
            ],
        );
        assert!(matches!(sparse_lu(&a), Err(Error::Solver(_))));
    }

    #[test]
    fn zero_column_is_singular() {
        let a = CsrMat::from_triplets(3, 3, &[(0, 0, c(1.0, 0.0)), (1, 1, c(1.0, 0.0))]);
        assert!(sparse_lu(&a).is_err());
    }
}
