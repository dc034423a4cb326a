//! Dense complex matrices, row-major storage.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{cr, C, Scalar};
use crate::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![Complex::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    /// Build from a flat row-major slice of `(re, im)` pairs; test helper.
    pub fn from_rows(nrows: usize, ncols: usize, entries: &[C<T>]) -> Self {
        assert_eq!(entries.len(), nrows * ncols, "entry count mismatch");
        Self { nrows, ncols, data: entries.to_vec() }
    }

    pub fn diagonal(diag: &[C<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[i * self.ncols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [C<T>] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.ncols;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * n);
        head[lo * n..lo * n + n].swap_with_slice(&mut tail[..n]);
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        let data = self.data.iter().map(|z| z.conj()).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let data = self.data.iter().map(|&z| z * s).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }

    /// Matrix product `self * rhs` (ikj loop order, cache friendly).
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "inner dimension mismatch");
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            let arow = self.row(i);
            let orow = &mut out.data[i * rhs.ncols..(i + 1) * rhs.ncols];
            for (k, &aik) in arow.iter().enumerate() {
                if aik.is_zero() {
                    continue;
                }
                let brow = rhs.row(k);
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    /// `self * x` for a column vector `x`.
    pub fn matvec(&self, x: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.ncols, x.len(), "vector length mismatch");
        let mut y = vec![Complex::zero(); self.nrows];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex::zero();
            for (&a, &b) in self.row(i).iter().zip(x) {
                acc += a * b;
            }
            *yi = acc;
        }
        y
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (ra, ca, rb, cb) = (self.nrows, self.ncols, rhs.nrows, rhs.ncols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        for ia in 0..ra {
            for ja in 0..ca {
                let a = self.get(ia, ja);
                if a.is_zero() {
                    continue;
                }
                for ib in 0..rb {
                    let dst =
                        &mut out.data[(ia * rb + ib) * ca * cb + ja * cb..(ia * rb + ib) * ca * cb + ja * cb + cb];
                    for (d, &b) in dst.iter_mut().zip(rhs.row(ib)) {
                        *d = a * b;
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        debug_assert!(self.is_square());
        (0..self.nrows).map(|i| self.get(i, i)).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest entrywise deviation from the adjoint, `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.nrows {
            for j in i..self.ncols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `(A + A†)/2`, exactly Hermitian output.
    pub fn hermitize(&self) -> Self {
        debug_assert!(self.is_square());
        let half = cr(real_half::<T>());
        let mut out = Self::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(i, j, (self.get(i, j) + self.get(j, i).conj()) * half);
            }
        }
        out
    }

    /// Column-stack the matrix into a vector: `vec(A)[i + j*nrows] = A[i,j]`.
    pub fn vectorize(&self) -> Vec<C<T>> {
        let mut v = Vec::with_capacity(self.nrows * self.ncols);
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                v.push(self.get(i, j));
            }
        }
        v
    }

    /// Inverse of [`CMat::vectorize`] for a square `n × n` target.
    pub fn from_vectorized(n: usize, v: &[C<T>]) -> Self {
        assert_eq!(v.len(), n * n, "vector length mismatch");
        Self::from_fn(n, n, |i, j| v[i + j * n])
    }
}

fn real_half<T: Scalar>() -> T {
    T::one() / (T::one() + T::one())
}

impl<T: Scalar> std::fmt::Debug for CMat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{}", self.nrows, self.ncols)?;
        for i in 0..self.nrows.min(12) {
            for j in 0..self.ncols.min(12) {
                let z = self.get(i, j);
                write!(f, " {:+.3e}{:+.3e}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// LU factorization with partial pivoting, `P·A = L·U`.
pub struct DenseLu<T> {
    lu: CMat<T>,
    perm: Vec<usize>,
}

/// Factor a square matrix. Fails with [`Error::Solver`] on a (numerically)
/// singular pivot.
pub fn lu_factor<T: Scalar>(a: CMat<T>) -> Result<DenseLu<T>> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::InvalidArgument("LU requires a square matrix".into()));
    }
    let scale = a.max_abs();
    let tiny = scale.max(T::one()) * T::epsilon() * crate::scalar::real::<T>(n as f64);
    let mut lu = a;
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        // Partial pivot: largest |entry| in column k at or below the diagonal.
        let mut piv = k;
        let mut best = lu.get(k, k).norm_sqr();
        for i in k + 1..n {
            let v = lu.get(i, k).norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best.sqrt() <= tiny {
            return Err(Error::Solver(format!(
                "singular matrix: pivot {:.3e} at step {k} (n = {n})",
                best.sqrt().to_f64().unwrap_or(f64::NAN)
            )));
        }
        if piv != k {
            lu.swap_rows(piv, k);
            perm.swap(piv, k);
        }

        let inv_pivot: C<T> = Complex::new(T::one(), T::zero()) / lu.get(k, k);
        let ncols = lu.ncols;
        let (above, below) = lu.data.split_at_mut((k + 1) * ncols);
        let pivot_row = &above[k * ncols + k + 1..k * ncols + ncols];
        for row in below.chunks_exact_mut(ncols) {
            let m = row[k] * inv_pivot;
            row[k] = m;
            if m.is_zero() {
                continue;
            }
            for (r, &p) in row[k + 1..].iter_mut().zip(pivot_row) {
                *r -= m * p;
            }
        }
    }
    Ok(DenseLu { lu, perm })
}

impl<T: Scalar> DenseLu<T> {
    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n, "rhs length mismatch");
        // Apply the row permutation, then forward/back substitution.
        let mut y: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = y[i];
            for (j, &l) in self.lu.row(i)[..i].iter().enumerate() {
                acc -= l * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for (j, &u) in self.lu.row(i)[i + 1..].iter().enumerate() {
                acc -= u * y[i + 1 + j];
            }
            y[i] = acc / self.lu.get(i, i);
        }
        y
    }
}

/// Rank estimate by Gaussian elimination with complete pivoting.
///
/// Counts pivots larger than `rel_tol` times the first pivot. Used to
/// distinguish a degenerate steady-state kernel from a merely ill-conditioned
/// solve; intended for small systems.
pub fn rank_complete_pivot<T: Scalar>(a: &CMat<T>, rel_tol: T) -> usize {
    let mut m = a.clone();
    let n = m.nrows().min(m.ncols());
    let mut rank = 0;
    let mut threshold = T::zero();
    for k in 0..n {
        let mut best = T::zero();
        let (mut pi, mut pj) = (k, k);
        for i in k..m.nrows() {
            for j in k..m.ncols() {
                let v = m.get(i, j).norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if k == 0 {
            threshold = best * rel_tol;
        }
        if best <= threshold || best.is_zero() {
            break;
        }
        rank += 1;
        m.swap_rows(k, pi);
        for i in 0..m.nrows() {
            let tmp = m.get(i, k);
            m.set(i, k, m.get(i, pj));
            m.set(i, pj, tmp);
        }
        let inv: C<T> = Complex::new(T::one(), T::zero()) / m.get(k, k);
        for i in k + 1..m.nrows() {
            let f: C<T> = m.get(i, k) * inv;
            if f.is_zero() {
                continue;
            }
            for j in k..m.ncols() {
                let v = m.get(i, j) - f * m.get(k, j);
                m.set(i, j, v);
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = CMat<f64>;

    fn cx(re: f64, im: f64) -> C<f64> {
        c(re, im)
    }

    #[test]
    fn matmul_identity() {
        let a = M::from_fn(3, 3, |i, j| cx((i * 3 + j) as f64, (i + j) as f64));
        let id = M::identity(3);
        assert_eq!(a.matmul(&id).as_slice(), a.as_slice());
        assert_eq!(id.matmul(&a).as_slice(), a.as_slice());
    }

    #[test]
    fn adjoint_involution() {
        let a = M::from_fn(2, 3, |i, j| cx(i as f64, j as f64 + 1.0));
        let aa = a.adjoint().adjoint();
        assert_eq!(aa.as_slice(), a.as_slice());
    }

    #[test]
    fn kron_identities() {
        let a = M::identity(2).kron(&M::identity(3));
        assert_eq!(a.as_slice(), M::identity(6).as_slice());
    }

    #[test]
    fn vectorize_roundtrip() {
        let a = M::from_fn(3, 3, |i, j| cx(i as f64, j as f64));
        let v = a.vectorize();
        // Column stacking: entry (i, j) lands at i + j*n.
        assert_eq!(v[1], a.get(1, 0));
        assert_eq!(v[3], a.get(0, 1));
        let b = M::from_vectorized(3, &v);
        assert_eq!(b.as_slice(), a.as_slice());
    }

    #[test]
    fn lu_solves_small_system() {
        let a = M::from_rows(
            2,
            2,
            &[cx(2.0, 0.0), cx(1.0, 1.0), cx(0.0, -1.0), cx(3.0, 0.0)],
        );
        let x_true = vec![cx(1.0, 0.5), cx(-2.0, 1.0)];
        let b = a.matvec(&x_true);
        let x = lu_factor(a).unwrap().solve(&b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-12);
        }
    }

    #[test]
    fn lu_reports_singular() {
        let a = M::from_rows(
            2,
            2,
            &[cx(1.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0), cx(4.0, 0.0)],
        );
        assert!(matches!(lu_factor(a), Err(Error::Solver(_))));
    }

    #[test]
    fn lu_random_residual() {
        // Deterministic pseudo-random fill; residual must be at machine level.
        let n = 40;
        let mut seed = 0x12345u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let a = M::from_fn(n, n, |_, _| cx(rnd(), rnd()));
        let x_true: Vec<_> = (0..n).map(|_| cx(rnd(), rnd())).collect();
        let b = a.matvec(&x_true);
        let x = lu_factor(a.clone()).unwrap().solve(&b);
        let rb = a.matvec(&x);
        let err: f64 = rb.iter().zip(&b).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10, "residual {err}");
    }

    #[test]
    fn rank_detects_deficiency() {
        let a = M::from_rows(
            3,
            3,
            &[
                cx(1.0, 0.0),
                cx(2.0, 0.0),
                cx(3.0, 0.0),
                cx(2.0, 0.0),
                cx(4.0, 0.0),
                cx(6.0, 0.0),
                cx(0.0, 0.0),
                cx(0.0, 0.0),
                cx(1.0, 0.0),
            ],
        );
        assert_eq!(rank_complete_pivot(&a, 1e-12), 2);
        assert_eq!(rank_complete_pivot(&M::zeros(3, 3), 1e-12), 0);
        assert_eq!(rank_complete_pivot(&M::identity(3), 1e-12), 3);
    }

    #[test]
    fn hermitize_is_hermitian() {
        let a = M::from_fn(4, 4, |i, j| cx(i as f64 - 0.3, j as f64 + 0.1));
        let h = a.hermitize();
        assert!(h.hermiticity_defect() == 0.0 || h.hermiticity_defect() < 1e-15);
    }
}
