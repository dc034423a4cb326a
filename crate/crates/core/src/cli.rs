//! Sweep, table, and trace runners behind the command-line surface.
//!
//! Grid points are independent tasks executed on a bounded worker pool
//! (rayon); results are assembled in canonical order — pipeline blocks in
//! `master`, `oracle` order, then axis 0 outer, axis 1 inner — so parallel
//! and serial runs produce byte-identical CSV bodies.

use rayon::prelude::*;

use crate::correlate::{g2_tau, g2_zero, g2_zero_from_amplitudes, CorrelationTrace, TraceMeta};
use crate::fockspace::enumerate_basis;
use crate::lindblad::{liouvillian, steady_state};
use crate::model::config::config_hash;
use crate::model::{
    field_coefficients, model_operators, FrequencySpec, SystemConfig,
};
use crate::scalar::{real, Scalar};
use crate::weakdrive::weak_drive_amplitudes;
use crate::{Error, Result};

/// Default drive strength for zero-delay sweeps.
pub const SWEEP_EPSILON: f64 = 1e-3;
/// Default drive strength for single-mode delay traces.
pub const TRACE_EPSILON_SINGLE: f64 = 0.00172;
/// Default drive strength for multimode delay traces.
pub const TRACE_EPSILON_MULTI: f64 = 0.0025;

/// Which pipeline(s) a sweep evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Master,
    Oracle,
    Both,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Master => "master",
            Pipeline::Oracle => "oracle",
            Pipeline::Both => "both",
        }
    }

    fn members(&self) -> Vec<PipelineKind> {
        match self {
            Pipeline::Master => vec![PipelineKind::Master],
            Pipeline::Oracle => vec![PipelineKind::Oracle],
            Pipeline::Both => vec![PipelineKind::Master, PipelineKind::Oracle],
        }
    }
}

impl std::str::FromStr for Pipeline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "master" => Ok(Pipeline::Master),
            "oracle" => Ok(Pipeline::Oracle),
            "both" => Ok(Pipeline::Both),
            other => Err(Error::Config(format!(
                "unknown pipeline `{other}` (expected master, oracle, or both)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PipelineKind {
    Master,
    Oracle,
}

impl PipelineKind {
    fn name(&self) -> &'static str {
        match self {
            PipelineKind::Master => "master",
            PipelineKind::Oracle => "oracle",
        }
    }
}

/// One sweep axis: `count` evenly spaced values from `start` to `stop`.
#[derive(Clone, Debug)]
pub struct AxisSpec<T> {
    pub name: String,
    pub start: T,
    pub stop: T,
    pub count: usize,
}

impl<T: Scalar> AxisSpec<T> {
    pub fn values(&self) -> Vec<T> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = T::from_usize(self.count - 1).unwrap();
        (0..self.count)
            .map(|k| self.start + (self.stop - self.start) * T::from_usize(k).unwrap() / n)
            .collect()
    }
}

/// A full sweep request.
#[derive(Clone, Debug)]
pub struct SweepSpec<T> {
    pub base: SystemConfig<T>,
    pub axes: Vec<AxisSpec<T>>,
    pub pipeline: Pipeline,
    /// Run points on the worker pool; serial runs are byte-identical.
    pub parallel: bool,
    /// Extra `# `-prefixed header lines (optional timestamps live here).
    pub extra_header: Vec<String>,
}

/// One output row of a sweep.
#[derive(Clone, Debug)]
pub struct SweepRow<T> {
    pub x: T,
    pub y: Option<T>,
    pub g2: Option<T>,
    pub log10_g2: Option<T>,
    pub pipeline: &'static str,
    pub status: String,
}

/// Completed sweep: metadata plus one row per (pipeline, grid point).
#[derive(Clone, Debug)]
pub struct SweepResult<T> {
    pub header: Vec<String>,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Scalar> SweepResult<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str("x,y,g2,log10_g2,pipeline,status\n");
        let fmt = |v: &Option<T>| v.map(|x| format!("{x}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.x,
                fmt(&r.y),
                fmt(&r.g2),
                fmt(&r.log10_g2),
                r.pipeline,
                r.status
            ));
        }
        out
    }
}

/// Set a sweepable parameter by name. Detuning names need the detuning
/// frequency form; omega names need the absolute form.
pub fn set_param<T: Scalar>(cfg: &mut SystemConfig<T>, name: &str, value: T) -> Result<()> {
    match name {
        "epsilon" => cfg.epsilon = value,
        "kappa" => cfg.kappa = value,
        "gamma" => cfg.gamma = value,
        "g1" => cfg.g1 = value,
        "k1x" => cfg.k1x = value,
        "delta_eg" | "delta_c" => match &mut cfg.frequencies {
            FrequencySpec::Detunings { delta_eg, delta_c } => {
                if name == "delta_eg" {
                    *delta_eg = value;
                } else {
                    *delta_c = value;
                }
            }
            FrequencySpec::Absolute { .. } => {
                return Err(Error::Config(format!(
                    "cannot sweep `{name}`: configuration uses absolute frequencies"
                )))
            }
        },
        "omega_eg" | "omega_c1" | "omega_d" => match &mut cfg.frequencies {
            FrequencySpec::Absolute { omega_eg, omega_c1, omega_d } => match name {
                "omega_eg" => *omega_eg = value,
                "omega_c1" => *omega_c1 = value,
                _ => *omega_d = value,
            },
            FrequencySpec::Detunings { .. } => {
                return Err(Error::Config(format!(
                    "cannot sweep `{name}`: configuration uses detunings"
                )))
            }
        },
        other => {
            return Err(Error::Config(format!("unknown sweep parameter `{other}`")));
        }
    }
    Ok(())
}

/// g²(0) of a configuration through the master-equation pipeline.
pub fn master_g2_zero<T: Scalar>(cfg: &SystemConfig<T>) -> Result<T> {
    let ops = model_operators(cfg)?;
    let l = liouvillian(&ops.hamiltonian, &ops.collapse_ops)?;
    let rho = steady_state(&l)?;
    g2_zero(&rho, &ops.field_op)
}

/// g²(0) of a configuration through the weak-drive amplitude pipeline.
pub fn oracle_g2_zero<T: Scalar>(cfg: &SystemConfig<T>) -> Result<T> {
    let amps = weak_drive_amplitudes(cfg)?;
    let coeffs = field_coefficients(cfg)?;
    g2_zero_from_amplitudes(&amps, &coeffs)
}

fn evaluate_point<T: Scalar>(cfg: &SystemConfig<T>, kind: PipelineKind) -> (Option<T>, String) {
    let value = match kind {
        PipelineKind::Master => master_g2_zero(cfg),
        PipelineKind::Oracle => oracle_g2_zero(cfg),
    };
    match value {
        Ok(v) => (Some(v), "ok".to_string()),
        Err(e) => (None, format!("failed: {}", first_line(&e.to_string()))),
    }
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("").replace(',', ";")
}

/// Run a zero-delay sweep over one or two axes.
pub fn run_g2zero_sweep<T: Scalar>(spec: &SweepSpec<T>) -> Result<SweepResult<T>> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(Error::Config(format!(
            "sweeps take one or two axes, got {}",
            spec.axes.len()
        )));
    }
    for axis in &spec.axes {
        if axis.count < 1 {
            return Err(Error::Config(format!("axis `{}` has zero points", axis.name)));
        }
        if axis.count > 1 && !(axis.start < axis.stop) {
            return Err(Error::Config(format!(
                "axis `{}`: start must be below stop for multi-point axes",
                axis.name
            )));
        }
        // Axis names must exist for the base configuration.
        let mut probe = spec.base.clone();
        set_param(&mut probe, &axis.name, axis.start)?;
    }

    let xs = spec.axes[0].values();
    let ys = spec.axes.get(1).map(|a| a.values());
    let points: Vec<(T, Option<T>)> = match &ys {
        None => xs.iter().map(|&x| (x, None)).collect(),
        Some(ys) => {
            let mut pts = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in ys {
                    pts.push((x, Some(y)));
                }
            }
            pts
        }
    };

    let mut header = vec![
        format!("config_hash: {}", config_hash(&spec.base)),
        format!("pipeline: {}", spec.pipeline.name()),
        format!("epsilon: {}", spec.base.epsilon),
        format!("scheme: {}", spec.base.dissipation.name()),
    ];
    let axes_desc: Vec<String> = spec
        .axes
        .iter()
        .map(|a| format!("{}[{}:{};{}]", a.name, a.start, a.stop, a.count))
        .collect();
    header.push(format!("axes: {}", axes_desc.join(" ")));
    header.extend(spec.extra_header.iter().cloned());

    let mut rows = Vec::new();
    for kind in spec.pipeline.members() {
        let eval = |&(x, y): &(T, Option<T>)| -> SweepRow<T> {
            let mut cfg = spec.base.clone();
            let mut status_pre = None;
            if let Err(e) = set_param(&mut cfg, &spec.axes[0].name, x) {
                status_pre = Some(e.to_string());
            }
            if let (Some(yv), Some(axis)) = (y, spec.axes.get(1)) {
                if let Err(e) = set_param(&mut cfg, &axis.name, yv) {
                    status_pre = Some(e.to_string());
                }
            }
            let (g2, status) = match status_pre {
                Some(msg) => (None, format!("failed: {}", first_line(&msg))),
                None => evaluate_point(&cfg, kind),
            };
            let (g2, log10_g2, status) = match g2 {
                Some(v) if v > T::zero() => (Some(v), Some(v.log10()), status),
                Some(v) => (Some(v), None, "nonpositive".to_string()),
                None => (None, None, status),
            };
            SweepRow { x, y, g2, log10_g2, pipeline: kind.name(), status }
        };
        let block: Vec<SweepRow<T>> = if spec.parallel {
            points.par_iter().map(eval).collect()
        } else {
            points.iter().map(eval).collect()
        };
        rows.extend(block);
    }
    Ok(SweepResult { header, rows })
}

/// Compute a g²(τ) trace on the master-equation pipeline with metadata.
pub fn run_g2tau<T: Scalar>(cfg: &SystemConfig<T>, tau_grid: &[T]) -> Result<CorrelationTrace<T>> {
    let ops = model_operators(cfg)?;
    let l = liouvillian(&ops.hamiltonian, &ops.collapse_ops)?;
    let rho = steady_state(&l)?;
    let mut trace = g2_tau(&l, &rho, &ops.field_op, tau_grid).map_err(|e| match e {
        Error::Integration { tau, message } => Error::Integration {
            tau,
            message: format!("g2 trace propagation failed: {message}"),
        },
        other => other,
    })?;
    trace.meta = TraceMeta {
        config_hash: config_hash(cfg),
        pipeline: "master".into(),
        epsilon: format!("{}", cfg.epsilon),
        scheme: cfg.dissipation.name().into(),
    };
    Ok(trace)
}

/// Which reported tables to recompute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableSelect {
    SingleMode,
    Trimode,
    All,
}

/// Recompute the reported g²(0) tables: analytic and amplitude-oracle
/// columns next to the master equation at each drive strength, with relative
/// differences. Rows that fail are reported inline and the run continues.
pub fn run_tables<T: Scalar>(select: TableSelect, epsilons: &[T]) -> Result<String> {
    let mut out = String::new();
    if matches!(select, TableSelect::SingleMode | TableSelect::All) {
        out.push_str(&single_mode_table(epsilons)?);
    }
    if matches!(select, TableSelect::Trimode | TableSelect::All) {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&trimode_table(epsilons)?);
    }
    Ok(out)
}

fn single_mode_table<T: Scalar>(epsilons: &[T]) -> Result<String> {
    let pairs: [(f64, f64); 6] =
        [(10.0, 10.0), (100.0, 1.0), (10.0, -20.0), (50.0, -52.0), (50.0, 50.0), (50.0, 0.0)];
    let mut out = String::new();
    out.push_str("single-mode g2(0): (delta_eg, delta_c) in units of gamma\n");
    out.push_str(&format!(
        "{:>8} {:>8} {:>10} {:>12} {:>12} {:>12} {:>10}  {}\n",
        "delta_eg", "delta_c", "epsilon", "analytic", "oracle", "master", "rel_diff", "note"
    ));
    for (deg, dc) in pairs {
        let mut cfg = SystemConfig::<T>::single_mode_default();
        cfg.frequencies =
            FrequencySpec::Detunings { delta_eg: real(deg), delta_c: real(dc) };
        let analytic = crate::weakdrive::analytic_g2_single(
            real::<T>(deg),
            real::<T>(dc),
            cfg.g1,
            cfg.gamma,
            cfg.kappa,
        )?;
        let oracle = match oracle_g2_zero(&cfg) {
            Ok(v) => format!("{v:.6e}"),
            Err(e) => format!("failed: {}", first_line(&e.to_string())),
        };
        for &eps in epsilons {
            let mut cfg_eps = cfg.clone();
            cfg_eps.epsilon = eps;
            let (master, rel, note) = match master_g2_zero(&cfg_eps) {
                Ok(v) => {
                    let rel = (v - analytic).abs() / analytic;
                    let warn = if eps <= real(1e-3) && dc.abs() > 20.0 {
                        "ill-conditioned regime: large cavity detuning at weakest drive"
                    } else {
                        ""
                    };
                    (format!("{v:.6e}"), format!("{:.2}%", rel * real::<T>(100.0)), warn)
                }
                Err(e) => (format!("failed: {}", first_line(&e.to_string())), "-".into(), ""),
            };
            out.push_str(&format!(
                "{:>8} {:>8} {:>10} {:>12} {:>12} {:>12} {:>10}  {}\n",
                deg,
                dc,
                format!("{eps}"),
                format!("{analytic:.6e}"),
                oracle.clone(),
                master,
                rel,
                note
            ));
        }
    }
    Ok(out)
}

fn trimode_table<T: Scalar>(epsilons: &[T]) -> Result<String> {
    let pairs: [(f64, f64); 4] = [(108.5, 108.5), (90.0, 23.0), (112.5, 58.5), (50.0, 100.0)];
    let mut out = String::new();
    out.push_str("trimode g2(0): (omega_eg, omega_c1) in units of gamma, omega_d = 100\n");
    out.push_str(&format!(
        "{:>9} {:>9} {:>10} {:>12} {:>12} {:>10}\n",
        "omega_eg", "omega_c1", "epsilon", "oracle", "master", "rel_diff"
    ));
    for (weg, wc1) in pairs {
        let mut cfg = SystemConfig::<T>::trimode_default();
        cfg.frequencies = FrequencySpec::Absolute {
            omega_eg: real(weg),
            omega_c1: real(wc1),
            omega_d: real(100.0),
        };
        let oracle = oracle_g2_zero(&cfg)?;
        for &eps in epsilons {
            let mut cfg_eps = cfg.clone();
            cfg_eps.epsilon = eps;
            let (master, rel) = match master_g2_zero(&cfg_eps) {
                Ok(v) => (
                    format!("{v:.6e}"),
                    format!("{:.2}%", (v - oracle).abs() / oracle * real::<T>(100.0)),
                ),
                Err(e) => (format!("failed: {}", first_line(&e.to_string())), "-".into()),
            };
            out.push_str(&format!(
                "{:>9} {:>9} {:>10} {:>12} {:>12} {:>10}\n",
                weg,
                wc1,
                format!("{eps}"),
                format!("{oracle:.6e}"),
                master,
                rel
            ));
        }
    }
    Ok(out)
}

/// Basis listing in ket notation, one state per line.
pub fn print_basis(n_levels: usize, n_modes: usize, max_excitation: usize) -> String {
    let states = enumerate_basis(n_levels, n_modes, max_excitation);
    let mut out = String::with_capacity(states.len() * 12);
    for s in &states {
        out.push_str(&s.ket());
        out.push('\n');
    }
    out
}

/// The resolved-configuration echo every run prints before computing.
pub fn echo_config<T: Scalar>(cfg: &SystemConfig<T>) -> String {
    crate::model::config::resolved_summary(cfg)
}
