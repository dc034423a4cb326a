//! Weak-drive oracle pipeline: steady-state probability amplitudes of the
//! excitation-capped ansatz under the non-Hermitian Hamiltonian, and the
//! closed-form single-mode g²(0).
//!
//! The non-Hermitian Hamiltonian carries the loss terms −iγ/2 σ†σ and
//! −iκ/2 a_i†²a_i² (two-photon loss hits only doubly occupied single modes).
//! Steady-state amplitudes follow the weak-drive hierarchy: with the ground
//! amplitude pinned at one, each excitation sector is solved sourced only by
//! the sector below it, dropping the drive couplings that feed excitation
//! back down. This makes one-excitation amplitudes exactly linear in ε and
//! two-excitation amplitudes exactly quadratic.

use std::collections::HashMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::fockspace::{enumerate_basis, BasisState};
use crate::linalg::{lu_factor, CMat};
use crate::model::{DissipationScheme, SystemConfig};
use crate::scalar::{c, cr, C, Scalar};
use crate::{Error, Result};

/// Steady-state amplitudes over the excitation-capped basis.
#[derive(Clone, Debug)]
pub struct AmplitudeSolution<T: Scalar> {
    basis: Vec<BasisState>,
    amplitudes: Vec<C<T>>,
    /// Powers of ε carried by each amplitude (its excitation number).
    drive_order: Vec<usize>,
    n_modes: usize,
}

impl<T: Scalar> AmplitudeSolution<T> {
    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn drive_order(&self) -> &[usize] {
        &self.drive_order
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitude(&self, state: &BasisState) -> Option<C<T>> {
        self.basis.iter().position(|s| s == state).map(|i| self.amplitudes[i])
    }
}

/// Closed-form single-mode g²(0) with Δ' = Δ_eg − iγ/2:
///
/// ```text
///            |(g² − Δ'Δc)(Δ'² + Δ'Δc + g²)|²
/// g²(0) = ─────────────────────────────────────────
///          (|Δ'|²)² |g² − (Δ' + Δc)(Δc − iκ/2)|²
/// ```
pub fn analytic_g2_single<T: Scalar>(delta_eg: T, delta_c: T, g: T, gamma: T, kappa: T) -> Result<T> {
    let half = T::one() / (T::one() + T::one());
    let dp = c(delta_eg, -gamma * half); // Δ'
    if dp.norm() == T::zero() {
        return Err(Error::InvalidArgument(
            "analytic g2 undefined at gamma = 0, delta_eg = 0".into(),
        ));
    }
    let g2 = cr(g * g);
    let dc = cr(delta_c);
    let num = ((g2 - dp * dc) * (dp * dp + dp * dc + g2)).norm_sqr();
    let dp2 = dp.norm_sqr();
    let loss = dc - c(T::zero(), kappa * half);
    let den = dp2 * dp2 * (g2 - (dp + dc) * loss).norm_sqr();
    Ok(num / den)
}

/// Non-Hermitian Hamiltonian on the excitation-capped basis, as a dense
/// matrix over the canonical enumeration. Exposed for direct inspection.
pub fn capped_hamiltonian<T: Scalar>(
    cfg: &SystemConfig<T>,
) -> Result<(Vec<BasisState>, CMat<T>)> {
    let gs = cfg.couplings()?;
    capped_hamiltonian_with_couplings(cfg, &gs)
}

/// Same, with the per-mode couplings supplied explicitly instead of derived
/// from `k1x` (mode-decoupling cross-checks overwrite individual g_i).
pub fn capped_hamiltonian_with_couplings<T: Scalar>(
    cfg: &SystemConfig<T>,
    couplings: &[T],
) -> Result<(Vec<BasisState>, CMat<T>)> {
    cfg.validate()?;
    if couplings.len() != cfg.n_modes {
        return Err(Error::InvalidArgument(format!(
            "{} couplings for {} modes",
            couplings.len(),
            cfg.n_modes
        )));
    }
    let cap = crate::model::DEFAULT_MAX_EXCITATION;
    let basis = enumerate_basis(2, cfg.n_modes, cap);
    let index: HashMap<&BasisState, usize> =
        basis.iter().enumerate().map(|(i, s)| (s, i)).collect();

    let delta_eg = cfg.delta_eg();
    let delta_cs = cfg.delta_cs();
    let gs = couplings.to_vec();
    let half = T::one() / (T::one() + T::one());
    let datom = c(delta_eg, -cfg.gamma * half); // Δ'_eg

    let n = basis.len();
    let mut h = CMat::zeros(n, n);
    for (col, s) in basis.iter().enumerate() {
        // Diagonal: detunings and loss.
        let mut diag = Complex::new(T::zero(), T::zero());
        if s.atom_level == 1 {
            diag += datom;
        }
        for (m, &occ) in s.occupations.iter().enumerate() {
            let nocc = T::from_usize(occ).unwrap();
            diag += cr(delta_cs[m] * nocc);
            match cfg.dissipation {
                DissipationScheme::TwoPhoton => {
                    // ⟨a†²a²⟩ = n(n−1) photon pairs in the mode.
                    let pairs = nocc * (nocc - T::one());
                    diag += c(T::zero(), -cfg.kappa * half * pairs);
                }
                DissipationScheme::SinglePhoton => {
                    diag += c(T::zero(), -cfg.kappa * half * nocc);
                }
            }
        }
        let v = h.get(col, col) + diag;
        h.set(col, col, v);

        let mut push = |t: BasisState, amp: C<T>| {
            if let Some(&row) = index.get(&t) {
                let v = h.get(row, col) + amp;
                h.set(row, col, v);
            }
        };

        for m in 0..cfg.n_modes {
            let occ = s.occupations[m];
            let sqrt_n = T::from_usize(occ).unwrap().sqrt();
            let sqrt_np1 = T::from_usize(occ + 1).unwrap().sqrt();
            // g_i σ†a_i
            if s.atom_level == 0 && occ >= 1 {
                let mut t = s.clone();
                t.atom_level = 1;
                t.occupations[m] -= 1;
                push(t, cr(gs[m] * sqrt_n));
            }
            // g_i σ a_i†
            if s.atom_level == 1 {
                let mut t = s.clone();
                t.atom_level = 0;
                t.occupations[m] += 1;
                push(t, cr(gs[m] * sqrt_np1));
            }
            // ε a_i†
            {
                let mut t = s.clone();
                t.occupations[m] += 1;
                push(t, cr(cfg.epsilon * sqrt_np1));
            }
            // ε a_i
            if occ >= 1 {
                let mut t = s.clone();
                t.occupations[m] -= 1;
                push(t, cr(cfg.epsilon * sqrt_n));
            }
        }
    }
    Ok((basis, h))
}

/// Weak-drive steady-state amplitudes for any mode count: the ground
/// amplitude is one; each excitation sector solves its block of
/// 0 = H_kk C_k + H_{k,k−1} C_{k−1}.
pub fn weak_drive_amplitudes<T: Scalar>(cfg: &SystemConfig<T>) -> Result<AmplitudeSolution<T>> {
    let gs = cfg.couplings()?;
    weak_drive_amplitudes_with_couplings(cfg, &gs)
}

/// [`weak_drive_amplitudes`] with explicit per-mode couplings.
pub fn weak_drive_amplitudes_with_couplings<T: Scalar>(
    cfg: &SystemConfig<T>,
    couplings: &[T],
) -> Result<AmplitudeSolution<T>> {
    let (basis, h) = capped_hamiltonian_with_couplings(cfg, couplings)?;
    let n = basis.len();
    let cap = basis.iter().map(BasisState::excitation).max().unwrap_or(0);

    let sectors: Vec<Vec<usize>> = (0..=cap)
        .map(|k| (0..n).filter(|&i| basis[i].excitation() == k).collect())
        .collect();
    if sectors[0].len() != 1 {
        return Err(Error::InvalidArgument("expected a unique zero-excitation state".into()));
    }

    let mut amplitudes = vec![Complex::<T>::zero(); n];
    amplitudes[sectors[0][0]] = Complex::new(T::one(), T::zero());

    for k in 1..=cap {
        let rows = &sectors[k];
        let below = &sectors[k - 1];
        let m = rows.len();
        let block = CMat::from_fn(m, m, |i, j| h.get(rows[i], rows[j]));
        let mut rhs = vec![Complex::<T>::zero(); m];
        for (i, &ri) in rows.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &bj in below {
                acc += h.get(ri, bj) * amplitudes[bj];
            }
            rhs[i] = -acc;
        }
        let lu = lu_factor(block).map_err(|e| {
            Error::Solver(format!(
                "weak-drive sector {k} solve failed for the given configuration: {e}"
            ))
        })?;
        let sol = lu.solve(&rhs);
        for (i, &ri) in rows.iter().enumerate() {
            amplitudes[ri] = sol[i];
        }
    }

    let drive_order = basis.iter().map(BasisState::excitation).collect();
    Ok(AmplitudeSolution { basis, amplitudes, drive_order, n_modes: cfg.n_modes })
}

/// Single-mode amplitude solve (five amplitudes, cap two).
pub fn amplitude_steady_single<T: Scalar>(cfg: &SystemConfig<T>) -> Result<AmplitudeSolution<T>> {
    if cfg.n_modes != 1 {
        return Err(Error::Config(format!(
            "amplitude_steady_single needs n_modes = 1, got {}",
            cfg.n_modes
        )));
    }
    weak_drive_amplitudes(cfg)
}

/// Multimode amplitude solve (fourteen amplitudes for three modes, cap two).
pub fn amplitude_steady_multimode<T: Scalar>(
    cfg: &SystemConfig<T>,
) -> Result<AmplitudeSolution<T>> {
    weak_drive_amplitudes(cfg)
}
