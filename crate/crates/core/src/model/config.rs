//! Plain-text configuration files.
//!
//! `key = value` lines under `[system]`, `[drive]`, and `[dissipation]`
//! sections; `#` starts a comment. Every key is optional and falls back to
//! the defaults of [`SystemConfig::single_mode_default`] (or the trimode
//! defaults once `n_modes > 1`). Frequencies are given either as detunings
//! (`delta_eg`, `delta_c`; single mode only) or as absolute frequencies
//! (`omega_eg`, `omega_c1`, `omega_d`); mixing the two forms is an error.
//! The coupling may be set directly (`g1`) or through the base interaction
//! strength (`g0`, resolved as g₁ = g₀ sin k₁x).

use std::collections::BTreeMap;

use super::{
    coupling_strengths, field_coefficients, snapped_sin, FrequencySpec,
    SystemConfig,
};
use crate::scalar::{real, Scalar};
use crate::{Error, Result};

const KEYS_SYSTEM: &[&str] = &[
    "n_modes", "gamma", "g1", "g0", "k1x", "delta_eg", "delta_c", "omega_eg", "omega_c1",
    "omega_d",
];
const KEYS_DRIVE: &[&str] = &["epsilon"];
const KEYS_DISSIPATION: &[&str] = &["scheme", "kappa"];

/// Parse a configuration file body into a resolved [`SystemConfig`].
pub fn parse_config<T: Scalar>(text: &str) -> Result<SystemConfig<T>> {
    build_config(&parse_entries(text)?)
}

/// Parse a configuration file body into its raw key → value entries,
/// validating sections and key names.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut entries: BTreeMap<String, String> = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            if !["system", "drive", "dissipation"].contains(&section.as_str()) {
                return Err(Error::Config(format!(
                    "line {}: unknown section [{section}]",
                    lineno + 1
                )));
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let allowed = match section.as_str() {
            "system" => KEYS_SYSTEM,
            "drive" => KEYS_DRIVE,
            "dissipation" => KEYS_DISSIPATION,
            _ => {
                return Err(Error::Config(format!(
                    "line {}: key `{key}` outside any section",
                    lineno + 1
                )))
            }
        };
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "line {}: unknown key `{key}` in section [{section}]",
                lineno + 1
            )));
        }
        if entries.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(entries)
}

/// All key names accepted by configuration files and `--set` overrides.
pub fn known_keys() -> impl Iterator<Item = &'static str> {
    KEYS_SYSTEM.iter().chain(KEYS_DRIVE).chain(KEYS_DISSIPATION).copied()
}

/// Resolve a flat key → value map (config file entries or CLI overrides).
pub fn build_config<T: Scalar>(entries: &BTreeMap<String, String>) -> Result<SystemConfig<T>> {
    let get_num = |key: &str| -> Result<Option<T>> {
        match entries.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(|v| Some(real::<T>(v)))
                .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{s}` as a number"))),
        }
    };

    let n_modes = match entries.get("n_modes") {
        None => 1usize,
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("n_modes: cannot parse `{s}`")))?,
    };

    let mut cfg: SystemConfig<T> = if n_modes > 1 {
        SystemConfig::trimode_default()
    } else {
        SystemConfig::single_mode_default()
    };
    cfg.n_modes = n_modes;

    if let Some(v) = get_num("gamma")? {
        cfg.gamma = v;
    }
    if let Some(v) = get_num("kappa")? {
        cfg.kappa = v;
    }
    if let Some(v) = get_num("k1x")? {
        cfg.k1x = v;
    }
    if let Some(v) = get_num("epsilon")? {
        cfg.epsilon = v;
    }
    match (get_num("g1")?, get_num("g0")?) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("give either g1 or g0, not both".into()));
        }
        (Some(g1), None) => cfg.g1 = g1,
        (None, Some(g0)) => cfg.g1 = g0 * snapped_sin(cfg.k1x),
        (None, None) => {
            if n_modes > 1 {
                // trimode default is already g0·sin(k1x) with g0 = 10, but the
                // default k1x may have been overridden above
                cfg.g1 = real::<T>(10.0) * snapped_sin(cfg.k1x);
            }
        }
    }

    let deltas = (get_num("delta_eg")?, get_num("delta_c")?);
    let omegas = (get_num("omega_eg")?, get_num("omega_c1")?, get_num("omega_d")?);
    let has_delta = deltas.0.is_some() || deltas.1.is_some();
    let has_omega = omegas.0.is_some() || omegas.1.is_some() || omegas.2.is_some();
    match (has_delta, has_omega) {
        (true, true) => {
            return Err(Error::Config(
                "mixing detunings (delta_*) with absolute frequencies (omega_*)".into(),
            ))
        }
        (true, false) => {
            let (Some(delta_eg), Some(delta_c)) = deltas else {
                return Err(Error::Config(
                    "detuning form needs both delta_eg and delta_c".into(),
                ));
            };
            cfg.frequencies = FrequencySpec::Detunings { delta_eg, delta_c };
        }
        (false, true) => {
            let (Some(omega_eg), Some(omega_c1), Some(omega_d)) = omegas else {
                return Err(Error::Config(
                    "absolute form needs omega_eg, omega_c1, and omega_d".into(),
                ));
            };
            cfg.frequencies = FrequencySpec::Absolute { omega_eg, omega_c1, omega_d };
        }
        (false, false) => {}
    }

    if let Some(s) = entries.get("scheme") {
        cfg.dissipation = s.parse()?;
    }

    cfg.validate()?;
    Ok(cfg)
}

/// Canonical round-trippable rendering of a configuration.
pub fn render_config<T: Scalar>(cfg: &SystemConfig<T>) -> String {
    let mut out = String::new();
    out.push_str("[system]\n");
    out.push_str(&format!("n_modes = {}\n", cfg.n_modes));
    out.push_str(&format!("gamma = {}\n", cfg.gamma));
    out.push_str(&format!("g1 = {}\n", cfg.g1));
    out.push_str(&format!("k1x = {}\n", cfg.k1x));
    match cfg.frequencies {
        FrequencySpec::Detunings { delta_eg, delta_c } => {
            out.push_str(&format!("delta_eg = {delta_eg}\n"));
            out.push_str(&format!("delta_c = {delta_c}\n"));
        }
        FrequencySpec::Absolute { omega_eg, omega_c1, omega_d } => {
            out.push_str(&format!("omega_eg = {omega_eg}\n"));
            out.push_str(&format!("omega_c1 = {omega_c1}\n"));
            out.push_str(&format!("omega_d = {omega_d}\n"));
        }
    }
    out.push_str("[drive]\n");
    out.push_str(&format!("epsilon = {}\n", cfg.epsilon));
    out.push_str("[dissipation]\n");
    out.push_str(&format!("scheme = {}\n", cfg.dissipation.name()));
    out.push_str(&format!("kappa = {}\n", cfg.kappa));
    out
}

/// FNV-1a hash of the canonical rendering; stable across runs and platforms.
pub fn config_hash<T: Scalar>(cfg: &SystemConfig<T>) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in render_config(cfg).as_bytes() {
        h ^= *byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Human-readable resolved configuration: the canonical rendering plus the
/// derived quantities every run echoes before computing.
pub fn resolved_summary<T: Scalar>(cfg: &SystemConfig<T>) -> String {
    let mut out = render_config(cfg);
    let fmt_list = |xs: &[T]| -> String {
        xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
    };
    out.push_str(&format!("# derived: delta_eg = {}\n", cfg.delta_eg()));
    out.push_str(&format!("# derived: delta_c = [{}]\n", fmt_list(&cfg.delta_cs())));
    if let Ok(gs) = coupling_strengths(cfg.g1, cfg.k1x, cfg.n_modes) {
        out.push_str(&format!("# derived: g = [{}]\n", fmt_list(&gs)));
    }
    if let Ok(fs) = field_coefficients(cfg) {
        let reals: Vec<T> = fs.iter().map(|f| f.re).collect();
        out.push_str(&format!("# derived: field_coeffs = [{}]\n", fmt_list(&reals)));
    }
    out.push_str(&format!("# config_hash: {}\n", config_hash(cfg)));
    out
}
