//! Truncated Hilbert spaces: excitation-capped basis enumeration, elementary
//! ladder operators, and tensor-product embeddings.
//!
//! Two representations of the same physics coexist:
//!
//! - the **full tensor product** of the atom with every mode at a fixed
//!   per-mode photon cutoff, used by the master-equation pipeline;
//! - the **excitation-capped list** of basis states with total excitation
//!   (atom level + photons) bounded by `max_excitation`, used by the
//!   weak-drive amplitude pipeline.
//!
//! Basis order is canonical and fixed: ascending total excitation, then atom
//! level, then lexicographically ascending mode occupations. Tensor factors
//! are ordered `[atom, mode 1, …, mode n]` with the first factor varying
//! slowest, so matrices are bit-comparable across runs.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::{CMat, CsrMat};
use crate::scalar::{cr, C, Scalar};
use crate::{Error, Result};

/// Operators on spaces larger than this are stored sparse.
pub const SPARSE_THRESHOLD: usize = 32;

/// One basis ket: atom level plus per-mode photon occupations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub atom_level: usize,
    pub occupations: Vec<usize>,
}

impl BasisState {
    pub fn new(atom_level: usize, occupations: Vec<usize>) -> Self {
        Self { atom_level, occupations }
    }

    /// Total excitation number: atom level plus total photon count.
    pub fn excitation(&self) -> usize {
        self.atom_level + self.occupations.iter().sum::<usize>()
    }

    /// Ket label, e.g. `|g,010⟩`; atom levels map to g, e, f, then digits.
    pub fn ket(&self) -> String {
        let atom = match self.atom_level {
            0 => "g".to_string(),
            1 => "e".to_string(),
            2 => "f".to_string(),
            n => n.to_string(),
        };
        if self.occupations.is_empty() {
            return format!("|{atom}⟩");
        }
        let occ: String = if self.occupations.iter().all(|&n| n <= 9) {
            self.occupations.iter().map(|n| n.to_string()).collect()
        } else {
            self.occupations.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
        };
        format!("|{atom},{occ}⟩")
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ket())
    }
}

/// Shape of the truncated Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpec {
    /// Number of atomic levels (≥ 2 for a physical atom; enumeration allows 1).
    pub n_levels: usize,
    /// Number of cavity modes.
    pub n_modes: usize,
    /// Maximum photons per mode in the full tensor representation.
    pub fock_cutoff: usize,
    /// Total-excitation cap of the capped representation.
    pub max_excitation: usize,
}

impl HilbertSpec {
    pub fn new(n_levels: usize, n_modes: usize, fock_cutoff: usize, max_excitation: usize) -> Self {
        Self { n_levels, n_modes, fock_cutoff, max_excitation }
    }

    /// Subsystem dimensions `[n_levels, cutoff+1, …, cutoff+1]`.
    pub fn subsystem_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(1 + self.n_modes);
        dims.push(self.n_levels);
        dims.extend(std::iter::repeat(self.fock_cutoff + 1).take(self.n_modes));
        dims
    }

    /// Full tensor dimension: `n_levels · (cutoff+1)^n_modes`.
    pub fn full_dim(&self) -> usize {
        self.n_levels * (self.fock_cutoff + 1).pow(self.n_modes as u32)
    }

    /// Dimension of the excitation-capped representation.
    pub fn capped_dim(&self) -> usize {
        enumerate_basis(self.n_levels, self.n_modes, self.max_excitation).len()
    }

    /// Tensor slot of the atom.
    pub fn atom_slot(&self) -> usize {
        0
    }

    /// Tensor slot of mode `i` (1-based).
    pub fn mode_slot(&self, mode: usize) -> usize {
        debug_assert!(mode >= 1 && mode <= self.n_modes);
        mode
    }

    /// Index of a basis state in the full tensor ordering.
    pub fn tensor_index(&self, state: &BasisState) -> usize {
        debug_assert_eq!(state.occupations.len(), self.n_modes);
        let mut idx = state.atom_level;
        for &n in &state.occupations {
            idx = idx * (self.fock_cutoff + 1) + n;
        }
        idx
    }
}

/// Enumerate every basis state with total excitation at most `max_excitation`.
///
/// Output order: ascending excitation, then atom level, then lexicographic
/// occupations. Degenerate inputs are fine: zero modes yields the atom-only
/// list, `n_levels = 1` pins the atom to its ground level. One atom only;
/// extending to several atoms would have to choose between distinguishable
/// and symmetrized labeling, which nothing downstream needs yet.
pub fn enumerate_basis(n_levels: usize, n_modes: usize, max_excitation: usize) -> Vec<BasisState> {
    let mut states = Vec::new();
    for exc in 0..=max_excitation {
        for atom in 0..n_levels.min(exc + 1) {
            let photons = exc - atom;
            compositions(photons, n_modes, &mut |occ| {
                states.push(BasisState::new(atom, occ.to_vec()));
            });
        }
    }
    states
}

/// Visit, in lexicographic order, every way to place `total` photons in
/// `slots` modes.
fn compositions(total: usize, slots: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(prefix: &mut Vec<usize>, remaining: usize, slots_left: usize, visit: &mut impl FnMut(&[usize])) {
        if slots_left == 0 {
            if remaining == 0 {
                visit(prefix);
            }
            return;
        }
        if slots_left == 1 {
            prefix.push(remaining);
            visit(prefix);
            prefix.pop();
            return;
        }
        for head in 0..=remaining {
            prefix.push(head);
            rec(prefix, remaining - head, slots_left - 1, visit);
            prefix.pop();
        }
    }
    let mut prefix = Vec::with_capacity(slots);
    rec(&mut prefix, total, slots, visit);
}

/// Complex matrix over an ordered list of subsystem dimensions.
///
/// Storage is dense up to [`SPARSE_THRESHOLD`] and compressed-sparse-row
/// above; both expose identical semantics.
#[derive(Clone, Debug)]
pub struct Operator<T: Scalar> {
    dims: Vec<usize>,
    data: OpData<T>,
}

#[derive(Clone, Debug)]
enum OpData<T: Scalar> {
    Dense(CMat<T>),
    Sparse(CsrMat<T>),
}

impl<T: Scalar> Operator<T> {
    pub fn from_dense(dims: Vec<usize>, mat: CMat<T>) -> Self {
        let n: usize = dims.iter().product();
        assert_eq!(mat.nrows(), n, "matrix size does not match dims");
        assert!(mat.is_square(), "operators are square");
        if n > SPARSE_THRESHOLD {
            Self { dims, data: OpData::Sparse(CsrMat::from_dense(&mat)) }
        } else {
            Self { dims, data: OpData::Dense(mat) }
        }
    }

    pub fn from_sparse(dims: Vec<usize>, mat: CsrMat<T>) -> Self {
        let n: usize = dims.iter().product();
        assert_eq!(mat.nrows(), n, "matrix size does not match dims");
        assert_eq!(mat.ncols(), n, "operators are square");
        if n > SPARSE_THRESHOLD {
            Self { dims, data: OpData::Sparse(mat) }
        } else {
            Self { dims, data: OpData::Dense(mat.to_dense()) }
        }
    }

    pub fn identity_on(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        if n > SPARSE_THRESHOLD {
            Self { dims, data: OpData::Sparse(CsrMat::identity(n)) }
        } else {
            Self { dims, data: OpData::Dense(CMat::identity(n)) }
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::identity_on(vec![dim])
    }

    pub fn zeros_like(&self) -> Self {
        let n = self.dim();
        if self.is_sparse() {
            Self { dims: self.dims.clone(), data: OpData::Sparse(CsrMat::zeros(n, n)) }
        } else {
            Self { dims: self.dims.clone(), data: OpData::Dense(CMat::zeros(n, n)) }
        }
    }

    /// Ordered subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.data, OpData::Sparse(_))
    }

    pub fn nnz(&self) -> usize {
        match &self.data {
            OpData::Dense(m) => m.as_slice().iter().filter(|z| !z.is_zero()).count(),
            OpData::Sparse(m) => m.nnz(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        match &self.data {
            OpData::Dense(m) => m.get(i, j),
            OpData::Sparse(m) => m.get(i, j),
        }
    }

    pub fn to_cmat(&self) -> CMat<T> {
        match &self.data {
            OpData::Dense(m) => m.clone(),
            OpData::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_csr(&self) -> CsrMat<T> {
        match &self.data {
            OpData::Dense(m) => CsrMat::from_dense(m),
            OpData::Sparse(m) => m.clone(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let data = match &self.data {
            OpData::Dense(m) => OpData::Dense(m.adjoint()),
            OpData::Sparse(m) => OpData::Sparse(m.adjoint()),
        };
        Self { dims: self.dims.clone(), data }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let data = match &self.data {
            OpData::Dense(m) => OpData::Dense(m.scale(s)),
            OpData::Sparse(m) => OpData::Sparse(m.scale(s)),
        };
        Self { dims: self.dims.clone(), data }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    fn check_same_space(&self, rhs: &Self) -> Result<()> {
        if self.dims != rhs.dims {
            return Err(Error::InvalidArgument(format!(
                "operators act on different spaces: dims {:?} vs {:?}",
                self.dims, rhs.dims
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_space(rhs)?;
        let data = match (&self.data, &rhs.data) {
            (OpData::Dense(a), OpData::Dense(b)) => OpData::Dense(a.add(b)),
            (OpData::Sparse(a), OpData::Sparse(b)) => OpData::Sparse(a.add(b)),
            (OpData::Dense(a), OpData::Sparse(b)) => OpData::Dense(a.add(&b.to_dense())),
            (OpData::Sparse(a), OpData::Dense(b)) => OpData::Dense(a.to_dense().add(b)),
        };
        Ok(Self { dims: self.dims.clone(), data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_space(rhs)?;
        let data = match (&self.data, &rhs.data) {
            (OpData::Dense(a), OpData::Dense(b)) => OpData::Dense(a.matmul(b)),
            (OpData::Sparse(a), OpData::Sparse(b)) => OpData::Sparse(a.matmul(b)),
            (OpData::Dense(a), OpData::Sparse(b)) => OpData::Dense(a.matmul(&b.to_dense())),
            (OpData::Sparse(a), OpData::Dense(b)) => OpData::Dense(a.matmul_dense(b)),
        };
        Ok(Self { dims: self.dims.clone(), data })
    }

    pub fn matvec(&self, x: &[C<T>]) -> Vec<C<T>> {
        match &self.data {
            OpData::Dense(m) => m.matvec(x),
            OpData::Sparse(m) => m.matvec(x),
        }
    }

    /// `A · ρ` with dense `ρ`.
    pub fn apply_left(&self, rho: &CMat<T>) -> CMat<T> {
        match &self.data {
            OpData::Dense(m) => m.matmul(rho),
            OpData::Sparse(m) => m.matmul_dense(rho),
        }
    }

    /// `ρ · A` with dense `ρ`.
    pub fn apply_right(&self, rho: &CMat<T>) -> CMat<T> {
        match &self.data {
            OpData::Dense(m) => rho.matmul(m),
            OpData::Sparse(m) => {
                // ρ·A = (A† ρ†)†
                m.adjoint().matmul_dense(&rho.adjoint()).adjoint()
            }
        }
    }

    /// `Tr(A · ρ)` for dense `ρ`.
    pub fn trace_product(&self, rho: &CMat<T>) -> C<T> {
        assert_eq!(self.dim(), rho.nrows(), "dimension mismatch");
        let mut acc = Complex::zero();
        match &self.data {
            OpData::Dense(m) => {
                for i in 0..m.nrows() {
                    for (j, &a) in m.row(i).iter().enumerate() {
                        acc += a * rho.get(j, i);
                    }
                }
            }
            OpData::Sparse(m) => {
                for (i, j, a) in m.iter() {
                    acc += a * rho.get(j, i);
                }
            }
        }
        acc
    }

    pub fn max_abs(&self) -> T {
        match &self.data {
            OpData::Dense(m) => m.max_abs(),
            OpData::Sparse(m) => m.max_abs(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        match &self.data {
            OpData::Dense(m) => m.frobenius_norm(),
            OpData::Sparse(m) => m.frobenius_norm(),
        }
    }

    /// `max |A - A†|` over entries.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.sub(&self.adjoint()).expect("same space");
        d.max_abs()
    }
}

/// Truncated bosonic annihilation operator: √n on the (n-1, n) superdiagonal.
pub fn annihilation<T: Scalar>(dim: usize) -> Result<Operator<T>> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "annihilation operator needs dim >= 2, got {dim}"
        )));
    }
    let mut m = CMat::zeros(dim, dim);
    for n in 1..dim {
        m.set(n - 1, n, cr(T::from_usize(n).unwrap().sqrt()));
    }
    Ok(Operator::from_dense(vec![dim], m))
}

/// Two-level atomic lowering operator σ = |g⟩⟨e| in the (g, e) ordering.
pub fn atom_lowering<T: Scalar>() -> Operator<T> {
    let mut m = CMat::zeros(2, 2);
    m.set(0, 1, cr(T::one()));
    Operator::from_dense(vec![2], m)
}

/// Kronecker product of the factors in order; `dims` concatenate.
pub fn tensor<T: Scalar>(factors: &[Operator<T>]) -> Result<Operator<T>> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("tensor product of an empty list".into()));
    }
    let dims: Vec<usize> = factors.iter().flat_map(|f| f.dims().iter().copied()).collect();
    let total: usize = dims.iter().product();
    if total > SPARSE_THRESHOLD {
        let mut acc = factors[0].to_csr();
        for f in &factors[1..] {
            acc = acc.kron(&f.to_csr());
        }
        Ok(Operator::from_sparse(dims, acc))
    } else {
        let mut acc = factors[0].to_cmat();
        for f in &factors[1..] {
            acc = acc.kron(&f.to_cmat());
        }
        Ok(Operator::from_dense(dims, acc))
    }
}

/// Place `op` on subsystem `slot` of `spec`, identity elsewhere.
pub fn embed<T: Scalar>(op: &Operator<T>, slot: usize, spec: &HilbertSpec) -> Result<Operator<T>> {
    let dims = spec.subsystem_dims();
    if slot >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "slot {slot} out of range for {} subsystems",
            dims.len()
        )));
    }
    if op.dim() != dims[slot] {
        return Err(Error::InvalidArgument(format!(
            "operator dimension {} does not match subsystem {} dimension {}",
            op.dim(),
            slot,
            dims[slot]
        )));
    }
    let factors: Vec<Operator<T>> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| if k == slot { op.clone() } else { Operator::identity(d) })
        .collect();
    tensor(&factors)
}
