//! Physical model construction: Hamiltonians, collapse operators, multimode
//! coupling strengths, the composite field operator, and the optimal
//! blockade-condition curves.
//!
//! All rates and frequencies are in units of the atomic decay rate γ (ħ = 1),
//! in the frame rotating at the drive frequency. Mode frequencies form a
//! harmonic ladder ω_i = i·ω_1 with wavenumber phases φ_i = i·k₁x.

pub mod config;


use crate::fockspace::{annihilation, atom_lowering, embed, HilbertSpec, Operator};
use crate::scalar::{cr, real, C, Scalar};
use crate::{Error, Result};

/// Per-mode photon cutoff of the master-equation tensor representation.
pub const DEFAULT_FOCK_CUTOFF: usize = 2;
/// Total-excitation cap of the weak-drive amplitude representation.
pub const DEFAULT_MAX_EXCITATION: usize = 2;

/// How the rotating-frame detunings are specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrequencySpec<T> {
    /// Single-mode form: atom-drive and cavity-drive detunings.
    Detunings { delta_eg: T, delta_c: T },
    /// Multimode form: absolute atom, fundamental-mode, and drive frequencies.
    Absolute { omega_eg: T, omega_c1: T, omega_d: T },
}

/// Dissipation channel attached to each cavity mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DissipationScheme {
    /// Two-photon loss, collapse operator √κ a².
    #[default]
    TwoPhoton,
    /// Ordinary one-photon leakage, collapse operator √κ a.
    SinglePhoton,
}

impl DissipationScheme {
    pub fn name(&self) -> &'static str {
        match self {
            DissipationScheme::TwoPhoton => "two_photon",
            DissipationScheme::SinglePhoton => "single_photon",
        }
    }
}

impl std::str::FromStr for DissipationScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_photon" => Ok(DissipationScheme::TwoPhoton),
            "single_photon" => Ok(DissipationScheme::SinglePhoton),
            other => Err(Error::Config(format!(
                "unknown dissipation scheme `{other}` (expected two_photon or single_photon)"
            ))),
        }
    }
}

/// All physical parameters of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig<T> {
    pub n_modes: usize,
    /// Atomic decay rate; the global scale, 1 by convention.
    pub gamma: T,
    /// Per-mode dissipation rate.
    pub kappa: T,
    /// Atom coupling to the fundamental mode.
    pub g1: T,
    /// Dipole-approximation phase of the fundamental mode, radians.
    pub k1x: T,
    /// Coherent drive strength.
    pub epsilon: T,
    pub frequencies: FrequencySpec<T>,
    pub dissipation: DissipationScheme,
}

impl<T: Scalar> SystemConfig<T> {
    /// Single-mode defaults: κ = γ = 1, g = 10γ, ε = 10⁻³γ at the
    /// conventional-blockade point (Δ_eg, Δ_c) = (10, 10)γ.
    pub fn single_mode_default() -> Self {
        Self {
            n_modes: 1,
            gamma: T::one(),
            kappa: T::one(),
            g1: real(10.0),
            k1x: T::FRAC_PI_4(),
            epsilon: real(1e-3),
            frequencies: FrequencySpec::Detunings { delta_eg: real(10.0), delta_c: real(10.0) },
            dissipation: DissipationScheme::TwoPhoton,
        }
    }

    /// Trimode defaults: κ = γ = 1, g₀ = 10γ (so g₁ = g₀ sin k₁x), k₁x = π/4,
    /// ω_d = 100γ, ε = 10⁻³γ at the fundamental-mode blockade point
    /// (ω_eg, ω_c1) = (108.5, 108.5)γ.
    pub fn trimode_default() -> Self {
        let k1x = T::FRAC_PI_4();
        Self {
            n_modes: 3,
            gamma: T::one(),
            kappa: T::one(),
            g1: real::<T>(10.0) * snapped_sin(k1x),
            k1x,
            epsilon: real(1e-3),
            frequencies: FrequencySpec::Absolute {
                omega_eg: real(108.5),
                omega_c1: real(108.5),
                omega_d: real(100.0),
            },
            dissipation: DissipationScheme::TwoPhoton,
        }
    }

    /// Tensor-product space used by the master-equation pipeline.
    pub fn hilbert_spec(&self) -> HilbertSpec {
        HilbertSpec::new(2, self.n_modes, DEFAULT_FOCK_CUTOFF, DEFAULT_MAX_EXCITATION)
    }

    /// Check invariants shared by every operation.
    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 1 {
            return Err(Error::Config("n_modes must be at least 1".into()));
        }
        if !(self.gamma > T::zero()) {
            return Err(Error::Config("gamma must be positive".into()));
        }
        if self.kappa < T::zero() {
            return Err(Error::Config("kappa must be nonnegative".into()));
        }
        if self.epsilon < T::zero() {
            return Err(Error::Config("epsilon must be nonnegative".into()));
        }
        if snapped_sin(self.k1x) == T::zero() {
            return Err(Error::Config(
                "sin(k1x) = 0: coupling normalization is undefined".into(),
            ));
        }
        match self.frequencies {
            FrequencySpec::Detunings { .. } => {
                if self.n_modes > 1 {
                    return Err(Error::Config(
                        "multimode systems need absolute frequencies (omega_eg, omega_c1, omega_d)"
                            .into(),
                    ));
                }
            }
            FrequencySpec::Absolute { omega_c1, .. } => {
                if !(omega_c1 > T::zero()) {
                    return Err(Error::Config("omega_c1 must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Atom-drive detuning Δ_eg = ω_eg − ω_d.
    pub fn delta_eg(&self) -> T {
        match self.frequencies {
            FrequencySpec::Detunings { delta_eg, .. } => delta_eg,
            FrequencySpec::Absolute { omega_eg, omega_d, .. } => omega_eg - omega_d,
        }
    }

    /// Mode-drive detunings Δ_ci = ω_i − ω_d with ω_i = i·ω_c1.
    pub fn delta_cs(&self) -> Vec<T> {
        match self.frequencies {
            FrequencySpec::Detunings { delta_c, .. } => vec![delta_c; self.n_modes],
            FrequencySpec::Absolute { omega_c1, omega_d, .. } => (1..=self.n_modes)
                .map(|i| T::from_usize(i).unwrap() * omega_c1 - omega_d)
                .collect(),
        }
    }

    /// Mode frequencies ω_i = i·ω_c1 when absolute frequencies are known.
    pub fn mode_frequencies(&self) -> Option<Vec<T>> {
        match self.frequencies {
            FrequencySpec::Detunings { .. } => None,
            FrequencySpec::Absolute { omega_c1, .. } => {
                Some((1..=self.n_modes).map(|i| T::from_usize(i).unwrap() * omega_c1).collect())
            }
        }
    }

    /// Per-mode coupling strengths derived from `g1` and `k1x`.
    pub fn couplings(&self) -> Result<Vec<T>> {
        coupling_strengths(self.g1, self.k1x, self.n_modes)
    }
}

/// `sin(x)` with arguments within rounding distance of a multiple of π
/// treated as exact nodes, so mode decouplings like k₁x = π/3 give exactly
/// zero coupling.
pub fn snapped_sin<T: Scalar>(x: T) -> T {
    let z = x / T::PI();
    let snap = T::epsilon().powf(real(0.75)) * T::one().max(z.abs());
    if (z - z.round()).abs() < snap {
        T::zero()
    } else {
        x.sin()
    }
}

/// Coupling of the atom to mode i relative to the fundamental:
/// g_i = √i · sin(i·k₁x)/sin(k₁x) · g₁ for i ≥ 2, and g_1 = g1.
pub fn coupling_strengths<T: Scalar>(g1: T, k1x: T, n_modes: usize) -> Result<Vec<T>> {
    let s1 = snapped_sin(k1x);
    if s1 == T::zero() {
        return Err(Error::InvalidArgument(
            "sin(k1x) = 0: coupling strengths are undefined".into(),
        ));
    }
    Ok((1..=n_modes)
        .map(|i| {
            if i == 1 {
                g1
            } else {
                let fi = T::from_usize(i).unwrap();
                fi.sqrt() * snapped_sin(fi * k1x) / s1 * g1
            }
        })
        .collect())
}

/// Optimal conventional-blockade cavity detuning, Δ_c = g²/Δ_eg.
pub fn cpb_detuning<T: Scalar>(delta_eg: T, g: T) -> Result<T> {
    if delta_eg == T::zero() {
        return Err(Error::InvalidArgument("cpb condition undefined at delta_eg = 0".into()));
    }
    Ok(g * g / delta_eg)
}

/// Optimal unconventional-blockade cavity detuning, Δ_c = −g²/Δ_eg − Δ_eg.
pub fn ucpb_detuning<T: Scalar>(delta_eg: T, g: T) -> Result<T> {
    if delta_eg == T::zero() {
        return Err(Error::InvalidArgument("ucpb condition undefined at delta_eg = 0".into()));
    }
    Ok(-g * g / delta_eg - delta_eg)
}

/// The Hermitian Hamiltonian, collapse operators, and detection-field
/// operator of a configuration, all on the tensor-product space.
#[derive(Clone, Debug)]
pub struct ModelOperators<T: Scalar> {
    pub hamiltonian: Operator<T>,
    pub collapse_ops: Vec<Operator<T>>,
    pub field_op: Operator<T>,
}

/// Atom lowering operator embedded on the full space.
pub fn embedded_sigma<T: Scalar>(spec: &HilbertSpec) -> Operator<T> {
    embed(&atom_lowering(), spec.atom_slot(), spec).expect("atom slot always valid")
}

/// Mode annihilation operator embedded on the full space (`mode` is 1-based).
pub fn embedded_mode<T: Scalar>(spec: &HilbertSpec, mode: usize) -> Result<Operator<T>> {
    embed(&annihilation(spec.fock_cutoff + 1)?, spec.mode_slot(mode), spec)
}

/// Rotating-frame Hermitian Hamiltonian
/// H = Δ_eg σ†σ + Σ_i [Δ_ci a_i†a_i + g_i(σ†a_i + σa_i†) + ε(a_i† + a_i)].
fn build_hamiltonian<T: Scalar>(cfg: &SystemConfig<T>, spec: &HilbertSpec) -> Result<Operator<T>> {
    cfg.validate()?;
    let delta_eg = cfg.delta_eg();
    let delta_cs = cfg.delta_cs();
    let gs = cfg.couplings()?;

    let sigma = embedded_sigma::<T>(spec);
    let mut h = sigma.adjoint().matmul(&sigma)?.scale_re(delta_eg);
    for mode in 1..=cfg.n_modes {
        let a = embedded_mode::<T>(spec, mode)?;
        let adag = a.adjoint();
        h = h.add(&adag.matmul(&a)?.scale_re(delta_cs[mode - 1]))?;
        let swap = sigma.adjoint().matmul(&a)?;
        h = h.add(&swap.add(&swap.adjoint())?.scale_re(gs[mode - 1]))?;
        h = h.add(&adag.add(&a)?.scale_re(cfg.epsilon))?;
    }
    Ok(h)
}

/// Single-mode Hamiltonian on the 2 × (cutoff+1) space.
pub fn single_mode_hamiltonian<T: Scalar>(cfg: &SystemConfig<T>) -> Result<Operator<T>> {
    if cfg.n_modes != 1 {
        return Err(Error::Config(format!(
            "single_mode_hamiltonian needs n_modes = 1, got {}",
            cfg.n_modes
        )));
    }
    build_hamiltonian(cfg, &cfg.hilbert_spec())
}

/// Multimode Hamiltonian; also valid at n_modes = 1, where it coincides with
/// [`single_mode_hamiltonian`].
pub fn multimode_hamiltonian<T: Scalar>(cfg: &SystemConfig<T>) -> Result<Operator<T>> {
    build_hamiltonian(cfg, &cfg.hilbert_spec())
}

/// Collapse operators: √γ σ plus, per mode, √κ a_i² (two-photon scheme) or
/// √κ a_i (one-photon scheme). Each operator carries its √rate.
pub fn collapse_ops<T: Scalar>(cfg: &SystemConfig<T>) -> Result<Vec<Operator<T>>> {
    cfg.validate()?;
    let spec = cfg.hilbert_spec();
    let mut ops = vec![embedded_sigma::<T>(&spec).scale_re(cfg.gamma.sqrt())];
    if cfg.kappa > T::zero() {
        for mode in 1..=cfg.n_modes {
            let a = embedded_mode::<T>(&spec, mode)?;
            let op = match cfg.dissipation {
                DissipationScheme::TwoPhoton => a.matmul(&a)?,
                DissipationScheme::SinglePhoton => a,
            };
            ops.push(op.scale_re(cfg.kappa.sqrt()));
        }
    }
    Ok(ops)
}

/// Detection-field coefficients f_j = √ω_j sin(j·k₁x), one per mode, with
/// the common physical prefactor dropped (it cancels in every g² ratio).
/// Configurations without absolute frequencies (single-mode detuning form)
/// get the trivial coefficient 1.
pub fn field_coefficients<T: Scalar>(cfg: &SystemConfig<T>) -> Result<Vec<C<T>>> {
    cfg.validate()?;
    match cfg.mode_frequencies() {
        None => Ok(vec![cr(T::one()); cfg.n_modes]),
        Some(freqs) => Ok(freqs
            .iter()
            .enumerate()
            .map(|(idx, &w)| {
                let j = T::from_usize(idx + 1).unwrap();
                cr(w.sqrt() * snapped_sin(j * cfg.k1x))
            })
            .collect()),
    }
}

/// Positive-frequency field operator E⁺ ∝ Σ_j √ω_j sin(j·k₁x) a_j on the
/// tensor space; a scaled annihilation operator in the single-mode case.
pub fn field_operator<T: Scalar>(cfg: &SystemConfig<T>) -> Result<Operator<T>> {
    let spec = cfg.hilbert_spec();
    let coeffs = field_coefficients(cfg)?;
    let mut op: Option<Operator<T>> = None;
    for (idx, &f) in coeffs.iter().enumerate() {
        let term = embedded_mode::<T>(&spec, idx + 1)?.scale(f);
        op = Some(match op {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    Ok(op.expect("n_modes >= 1"))
}

/// Bundle Hamiltonian, collapse operators, and field operator.
pub fn model_operators<T: Scalar>(cfg: &SystemConfig<T>) -> Result<ModelOperators<T>> {
    Ok(ModelOperators {
        hamiltonian: multimode_hamiltonian(cfg)?,
        collapse_ops: collapse_ops(cfg)?,
        field_op: field_operator(cfg)?,
    })
}
