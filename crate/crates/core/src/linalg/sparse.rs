//! Compressed sparse row matrices over complex scalars.
//!
//! Rows are stored with strictly increasing column indices and no explicit
//! zeros, so structural comparisons and merges are straightforward.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::{C, Scalar};
use super::dense::CMat;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMat<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CsrMat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![Complex::new(T::one(), T::zero()); n],
        }
    }

    /// Build from coordinate triplets; duplicates are summed, zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, C<T>)]) -> Self {
        let mut sorted: Vec<&(usize, usize, C<T>)> = triplets.iter().collect();
        sorted.sort_by_key(|(i, j, _)| (*i, *j));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut data: Vec<C<T>> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for &&(i, j, v) in &sorted {
            assert!(i < nrows && j < ncols, "triplet out of bounds");
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        let mut m = Self { nrows, ncols, indptr, indices, data };
        m.prune();
        m
    }

    pub fn from_dense(dense: &CMat<T>) -> Self {
        let mut indptr = Vec::with_capacity(dense.nrows() + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for i in 0..dense.nrows() {
            for (j, &v) in dense.row(i).iter().enumerate() {
                if !v.is_zero() {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { nrows: dense.nrows(), ncols: dense.ncols(), indptr, indices, data }
    }

    pub fn to_dense(&self) -> CMat<T> {
        let mut out = CMat::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (&j, &v) in self.row_indices(i).iter().zip(self.row_data(i)) {
                out.set(i, j, v);
            }
        }
        out
    }

    /// Drop stored entries that are exactly zero.
    fn prune(&mut self) {
        if self.data.iter().all(|v| !v.is_zero()) {
            return;
        }
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.nrows {
            for (&j, &v) in self.row_indices(i).iter().zip(self.row_data(i)) {
                if !v.is_zero() {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.data = data;
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn row_indices(&self, i: usize) -> &[usize] {
        &self.indices[self.indptr[i]..self.indptr[i + 1]]
    }

    #[inline]
    pub fn row_data(&self, i: usize) -> &[C<T>] {
        &self.data[self.indptr[i]..self.indptr[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        match self.row_indices(i).binary_search(&j) {
            Ok(pos) => self.data[self.indptr[i] + pos],
            Err(_) => Complex::zero(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    /// Entrywise sum; shapes must match.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shape mismatch");
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.nnz() + rhs.nnz());
        let mut data = Vec::with_capacity(self.nnz() + rhs.nnz());
        for i in 0..self.nrows {
            let (ai, ad) = (self.row_indices(i), self.row_data(i));
            let (bi, bd) = (rhs.row_indices(i), rhs.row_data(i));
            let (mut p, mut q) = (0usize, 0usize);
            while p < ai.len() || q < bi.len() {
                let (col, val) = if q >= bi.len() || (p < ai.len() && ai[p] < bi[q]) {
                    let out = (ai[p], ad[p]);
                    p += 1;
                    out
                } else if p >= ai.len() || bi[q] < ai[p] {
                    let out = (bi[q], bd[q]);
                    q += 1;
                    out
                } else {
                    let out = (ai[p], ad[p] + bd[q]);
                    p += 1;
                    q += 1;
                    out
                };
                if !val.is_zero() {
                    indices.push(col);
                    data.push(val);
                }
            }
            indptr[i + 1] = indices.len();
        }
        Self { nrows: self.nrows, ncols: self.ncols, indptr, indices, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(Complex::new(-T::one(), T::zero())))
    }

    /// Sparse-sparse product using a row accumulator.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "inner dimension mismatch");
        let n = rhs.ncols;
        let mut acc: Vec<C<T>> = vec![Complex::zero(); n];
        let mut touched: Vec<usize> = Vec::new();
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for i in 0..self.nrows {
            for (&k, &a) in self.row_indices(i).iter().zip(self.row_data(i)) {
                for (&j, &b) in rhs.row_indices(k).iter().zip(rhs.row_data(k)) {
                    if acc[j].is_zero() {
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if !acc[j].is_zero() {
                    indices.push(j);
                    data.push(acc[j]);
                }
                acc[j] = Complex::zero();
            }
            touched.clear();
            indptr[i + 1] = indices.len();
        }
        Self { nrows: self.nrows, ncols: rhs.ncols, indptr, indices, data }
    }

    /// Sparse × dense product.
    pub fn matmul_dense(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.ncols, rhs.nrows(), "inner dimension mismatch");
        let mut out = CMat::zeros(self.nrows, rhs.ncols());
        for i in 0..self.nrows {
            for (&k, &a) in self.row_indices(i).iter().zip(self.row_data(i)) {
                let brow = rhs.row(k);
                let orow = out.row_mut(i);
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `y = self · x`.
    pub fn matvec_into(&self, x: &[C<T>], y: &mut [C<T>]) {
        assert_eq!(x.len(), self.ncols, "vector length mismatch");
        assert_eq!(y.len(), self.nrows, "output length mismatch");
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex::zero();
            for (&j, &v) in self.row_indices(i).iter().zip(self.row_data(i)) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut y = vec![Complex::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        self.transposed(false)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transposed(true)
    }

    fn transposed(&self, conj: bool) -> Self {
        let mut indptr = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            indptr[j + 1] += 1;
        }
        for j in 0..self.ncols {
            indptr[j + 1] += indptr[j];
        }
        let mut cursor = indptr.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut data = vec![Complex::<T>::zero(); self.nnz()];
        for i in 0..self.nrows {
            for (&j, &v) in self.row_indices(i).iter().zip(self.row_data(i)) {
                let p = cursor[j];
                indices[p] = i;
                data[p] = if conj { v.conj() } else { v };
                cursor[j] += 1;
            }
        }
        Self { nrows: self.ncols, ncols: self.nrows, indptr, indices, data }
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let nrows = self.nrows * rhs.nrows;
        let ncols = self.ncols * rhs.ncols;
        let nnz = self.nnz() * rhs.nnz();
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(nnz);
        let mut data = Vec::with_capacity(nnz);
        indptr.push(0);
        for ia in 0..self.nrows {
            for ib in 0..rhs.nrows {
                for (&ja, &va) in self.row_indices(ia).iter().zip(self.row_data(ia)) {
                    for (&jb, &vb) in rhs.row_indices(ib).iter().zip(rhs.row_data(ib)) {
                        indices.push(ja * rhs.ncols + jb);
                        data.push(va * vb);
                    }
                }
                indptr.push(indices.len());
            }
        }
        Self { nrows, ncols, indptr, indices, data }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Iterate stored entries as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C<T>)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            self.row_indices(i).iter().zip(self.row_data(i)).map(move |(&j, &v)| (i, j, v))
        })
    }
}
