//! Command-line interface: basis listings, zero-delay sweeps, delay traces,
//! table reproduction, and configuration validation.
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver/numeric error,
//! 3 I/O error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockade::cli::{
    print_basis, run_g2tau, run_g2zero_sweep, AxisSpec, Pipeline, SweepSpec, TableSelect,
    SWEEP_EPSILON, TRACE_EPSILON_MULTI, TRACE_EPSILON_SINGLE,
};
use blockade::correlate::tau_grid;
use blockade::model::config::{build_config, known_keys, parse_entries, resolved_summary};
use blockade::model::SystemConfig;
use blockade::{Error, Result};

#[derive(Parser)]
#[command(
    name = "blockade",
    about = "Photon statistics of driven cavity QED systems with two-photon dissipation",
    version
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (key = value under [system]/[drive]/[dissipation])
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. --set epsilon=0.005 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    /// Worker threads for sweeps (0 = number of cores)
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the excitation-capped basis, one ket per line
    Basis {
        /// Atomic level count
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Cavity mode count
        #[arg(long, default_value_t = 3)]
        modes: usize,
        /// Total excitation cap
        #[arg(long = "max-excitation", default_value_t = 2)]
        max_excitation: usize,
    },
    /// Parse, validate, and echo the resolved configuration
    ValidateConfig,
    /// Sweep g2(0) over one or two parameter axes, writing a CSV grid
    SweepG2zero {
        /// Axis as name=start:stop:count (repeat for a second axis)
        #[arg(long = "axis", value_name = "NAME=START:STOP:COUNT", required = true)]
        axes: Vec<String>,
        /// Pipeline: master, oracle, or both
        #[arg(long, default_value = "oracle")]
        pipeline: String,
        /// Output CSV path
        #[arg(long)]
        output: PathBuf,
        /// Drive strength override for the sweep
        #[arg(long)]
        epsilon: Option<f64>,
        /// Compute points serially instead of on the worker pool
        #[arg(long)]
        serial: bool,
        /// Stamp the CSV header with the generation time
        #[arg(long)]
        timestamp: bool,
    },
    /// Compute a g2(tau) trace on the master-equation pipeline
    G2tau {
        /// Output CSV path
        #[arg(long)]
        output: PathBuf,
        /// Largest delay, in units of 1/gamma
        #[arg(long = "tau-max", default_value_t = 20.0)]
        tau_max: f64,
        /// Delay step, in units of 1/gamma
        #[arg(long = "tau-step", default_value_t = 0.01)]
        tau_step: f64,
        /// Drive strength override for the trace
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Recompute the reported g2(0) tables (the trimode table solves a
    /// 2916x2916 system per point and takes minutes)
    Tables {
        /// Which table: single, trimode, or all
        #[arg(long, default_value = "all")]
        table: String,
        /// Comma-separated drive strengths
        #[arg(long, default_value = "0.001,0.005,0.01")]
        epsilons: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Configuration assembled from file plus overrides, remembering which keys
/// were given explicitly (per-command drive-strength defaults depend on it).
struct Resolved {
    cfg: SystemConfig<f64>,
    epsilon_explicit: bool,
}

fn load_config(common: &Common) -> Result<Resolved> {
    let mut entries: BTreeMap<String, String> = match &common.config {
        Some(path) => parse_entries(&fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    for set in &common.sets {
        let Some((key, value)) = set.split_once('=') else {
            return Err(Error::Config(format!("--set needs KEY=VALUE, got `{set}`")));
        };
        let key = key.trim();
        if !known_keys().any(|k| k == key) {
            return Err(Error::Config(format!("--set: unknown key `{key}`")));
        }
        entries.insert(key.to_string(), value.trim().to_string());
    }
    let epsilon_explicit = entries.contains_key("epsilon");
    Ok(Resolved { cfg: build_config(&entries)?, epsilon_explicit })
}

fn parse_axis(spec: &str) -> Result<AxisSpec<f64>> {
    let err = || {
        Error::Config(format!("axis must be NAME=START:STOP:COUNT, got `{spec}`"))
    };
    let (name, rest) = spec.split_once('=').ok_or_else(err)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(err());
    }
    let start: f64 = parts[0].parse().map_err(|_| err())?;
    let stop: f64 = parts[1].parse().map_err(|_| err())?;
    let count: usize = parts[2].parse().map_err(|_| err())?;
    Ok(AxisSpec { name: name.trim().to_string(), start, stop, count })
}

fn run(cli: Cli) -> Result<()> {
    if cli.common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }

    match cli.command {
        Command::Basis { levels, modes, max_excitation } => {
            if levels < 1 {
                return Err(Error::Config("levels must be at least 1".into()));
            }
            print!("{}", print_basis(levels, modes, max_excitation));
            Ok(())
        }
        Command::ValidateConfig => {
            let resolved = load_config(&cli.common)?;
            print!("{}", resolved_summary(&resolved.cfg));
            Ok(())
        }
        Command::SweepG2zero { axes, pipeline, output, epsilon, serial, timestamp } => {
            let mut resolved = load_config(&cli.common)?;
            if let Some(e) = epsilon {
                resolved.cfg.epsilon = e;
            } else if !resolved.epsilon_explicit {
                resolved.cfg.epsilon = SWEEP_EPSILON;
            }
            print!("{}", resolved_summary(&resolved.cfg));
            let axes = axes.iter().map(|a| parse_axis(a)).collect::<Result<Vec<_>>>()?;
            let mut extra_header = Vec::new();
            if timestamp {
                let now = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                extra_header.push(format!("generated_at: {now}"));
            }
            let spec = SweepSpec {
                base: resolved.cfg,
                axes,
                pipeline: pipeline.parse::<Pipeline>()?,
                parallel: !serial,
                extra_header,
            };
            // Open the output before computing so path problems surface
            // ahead of a long sweep.
            let mut file = fs::File::create(&output)?;
            let result = run_g2zero_sweep(&spec)?;
            file.write_all(result.to_csv().as_bytes())?;
            eprintln!("wrote {} rows to {}", result.rows.len(), output.display());
            Ok(())
        }
        Command::G2tau { output, tau_max, tau_step, epsilon } => {
            let mut resolved = load_config(&cli.common)?;
            if let Some(e) = epsilon {
                resolved.cfg.epsilon = e;
            } else if !resolved.epsilon_explicit {
                resolved.cfg.epsilon = if resolved.cfg.n_modes > 1 {
                    TRACE_EPSILON_MULTI
                } else {
                    TRACE_EPSILON_SINGLE
                };
            }
            if !(tau_max > 0.0) || !(tau_step > 0.0) || tau_step > tau_max {
                return Err(Error::Config("need 0 < tau-step <= tau-max".into()));
            }
            print!("{}", resolved_summary(&resolved.cfg));
            let mut file = fs::File::create(&output)?;
            let grid = tau_grid(tau_max, tau_step);
            let trace = run_g2tau(&resolved.cfg, &grid)?;
            file.write_all(trace.to_csv().as_bytes())?;
            eprintln!("wrote {} samples to {}", trace.values.len(), output.display());
            Ok(())
        }
        Command::Tables { table, epsilons } => {
            let select = match table.as_str() {
                "single" => TableSelect::SingleMode,
                "trimode" => TableSelect::Trimode,
                "all" => TableSelect::All,
                other => {
                    return Err(Error::Config(format!(
                        "unknown table `{other}` (expected single, trimode, or all)"
                    )))
                }
            };
            let eps: Vec<f64> = epsilons
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::Config(format!("cannot parse epsilon `{s}` in --epsilons"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let report = blockade::cli::run_tables(select, &eps)?;
            print!("{report}");
            Ok(())
        }
    }
}
