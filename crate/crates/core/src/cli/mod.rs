//! `spintomo` command-line interface.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 unparseable input or usage error,
//! 3 invariant violation, 4 record/model fingerprint mismatch, 5 incomplete
//! measurement design.

mod config;

pub use config::{
    DriftBlock, Experiment, ExperimentConfig, JumpPreset, NoiseBlock, PhiSpec, SamplingBlock, StateSpec,
    WaveformBlock, CONFIG_VERSION,
};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::design::{completeness_report, optimize_waveform, DesignOptions, Objective};
use crate::dynamics::heisenberg_history;
use crate::error::{Error, Result};
use crate::estimator::{estimate_prefix_curve, estimate_with_nuisance, EstimateResult, NuisanceParam, NuisanceSearch};
use crate::measurement::{synthesize_record, MeasurementRecord};
use crate::metrics;
use crate::sweep::{run_trials, Summary};
use crate::wigner::{wigner_function, DEFAULT_N_PHI, DEFAULT_N_THETA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_FINGERPRINT: i32 = 4;
pub const EXIT_INCOMPLETE: i32 = 5;

/// Exit code reported for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::UnsupportedVersion { .. } => EXIT_PARSE,
        Error::FingerprintMismatch { .. } => EXIT_FINGERPRINT,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVARIANT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "spintomo", version, about = "Spin-F state estimation from continuous weak measurement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a measurement record from a config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct the initial state from a record.
    Estimate {
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the fidelity of prefix reconstructions to this CSV.
        #[arg(long, value_name = "CSV")]
        prefix_curve: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        stride: usize,
        /// Nuisance parameters as `name=lower:upper`, comma separated or repeated.
        #[arg(long, value_delimiter = ',')]
        nuisance: Vec<String>,
        #[arg(long, default_value_t = 200)]
        nuisance_budget: usize,
    },
    /// Fidelity statistics over many noise seeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the Wigner function of a config's state or an estimate.
    Wigner {
        /// Config (TOML) or estimate (JSON).
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_N_THETA)]
        n_theta: usize,
        #[arg(long, default_value_t = DEFAULT_N_PHI)]
        n_phi: usize,
    },
    /// Optimize the field-angle schedule and write an updated config.
    Design {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MinSingularValue)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 0.0)]
        robustness: f64,
    },
    /// Report whether a config's waveform is informationally complete.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ObjectiveArg {
    MinSingularValue,
    InverseTraceCovariance,
    InverseCondition,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MinSingularValue => Objective::MinSingularValue,
            ObjectiveArg::InverseTraceCovariance => Objective::InverseTraceCovariance,
            ObjectiveArg::InverseCondition => Objective::InverseCondition,
        }
    }
}

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_PARSE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Simulate { config, out: path } => cmd_simulate(&config, &path, out),
        Command::Estimate {
            record,
            config,
            out: path,
            prefix_curve,
            stride,
            nuisance,
            nuisance_budget,
        } => parse_nuisance(&nuisance, nuisance_budget).and_then(|search| {
            cmd_estimate(&record, &config, &path, prefix_curve.as_deref(), stride, &search, out)
        }),
        Command::Sweep { config, trials, out: path } => cmd_sweep(&config, trials, &path, out),
        Command::Wigner {
            input,
            out: path,
            n_theta,
            n_phi,
        } => cmd_wigner(&input, &path, n_theta, n_phi, out),
        Command::Design {
            config,
            budget,
            out: path,
            seed,
            objective,
            robustness,
        } => {
            let options = DesignOptions {
                objective: objective.into(),
                robustness_weight: robustness,
                ..Default::default()
            };
            cmd_design(&config, budget, &path, seed, &options, out)
        }
        Command::Check { config } => cmd_check(&config, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "spintomo: {e}");
            exit_code(&e)
        }
    }
}

fn parse_nuisance(specs: &[String], budget: usize) -> Result<NuisanceSearch> {
    let params = specs
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| NuisanceParam::parse(s.trim()))
        .collect::<Result<_>>()?;
    Ok(NuisanceSearch { params, budget })
}

fn io_context(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_context(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_context(path, e))
}

fn load(path: &Path) -> Result<Experiment> {
    ExperimentConfig::parse(&read_text(path)?)?.build()
}

/// Simulates the configured state under the (possibly drifted) waveform. The
/// record carries the nominal waveform's fingerprint.
pub fn cmd_simulate(config_path: &Path, out_record: &Path, out: &mut dyn Write) -> Result<i32> {
    let exp = load(config_path)?;
    let (_, rho) = exp
        .state
        .as_ref()
        .ok_or_else(|| Error::Validation("simulate needs a [state] block".into()))?;
    let o = exp.sys.measured_observable();
    let nominal = heisenberg_history(&exp.sys, &exp.waveform, &exp.plan, &o)?;
    let truth = match &exp.config.drift {
        Some(_) => heisenberg_history(&exp.sys, &exp.true_waveform(), &exp.plan, &o)?,
        None => nominal.clone(),
    };
    let n = &exp.config.noise;
    let mut record = synthesize_record(rho, &truth, n.sigma, n.seed, n.n_averaged)?;
    record.waveform_fingerprint = nominal.fingerprint().to_string();
    let clean = truth.expectations(rho.matrix())?;
    let rms = (clean.iter().map(|v| v * v).sum::<f64>() / clean.len() as f64).sqrt();
    write_text(out_record, &record.to_json()?)?;
    writeln!(out, "fingerprint: {}", record.waveform_fingerprint)?;
    writeln!(out, "samples: {}", record.len())?;
    writeln!(out, "noiseless_rms: {rms:.9e}")?;
    Ok(EXIT_OK)
}

pub fn cmd_estimate(
    record_path: &Path,
    config_path: &Path,
    out_estimate: &Path,
    prefix_curve: Option<&Path>,
    stride: usize,
    nuisance: &NuisanceSearch,
    out: &mut dyn Write,
) -> Result<i32> {
    let exp = load(config_path)?;
    let record = MeasurementRecord::from_json(&read_text(record_path)?)?;
    let result = estimate_with_nuisance(&record, &exp.sys, &exp.waveform, &exp.plan, nuisance)?;
    write_text(out_estimate, &result.to_json())?;
    writeln!(out, "rank: {}", result.rank)?;
    writeln!(out, "residual_norm: {:.9e}", result.residual_norm)?;
    if let Some(n) = &result.nuisance {
        for (name, v) in &n.values {
            writeln!(out, "{name}: {v:.9}")?;
        }
    }
    if let Some((_, rho)) = &exp.state {
        let f = metrics::fidelity(rho.matrix(), result.rho_ml.matrix())?;
        writeln!(out, "fidelity: {f:.9}")?;
    }
    if let Some(path) = prefix_curve {
        match &exp.state {
            Some((_, rho)) => {
                let history = heisenberg_history(&exp.sys, &exp.waveform, &exp.plan, &exp.sys.measured_observable())?;
                let curve = estimate_prefix_curve(&record, &history, rho, &exp.sys, &exp.true_waveform(), &exp.plan, stride)?;
                let mut csv = String::from("samples,time,fidelity,max_eigenvalue\n");
                for p in &curve {
                    let _ = writeln!(csv, "{},{:.16e},{:.16e},{:.16e}", p.samples, p.time, p.fidelity, p.max_eigenvalue);
                }
                write_text(path, &csv)?;
                writeln!(out, "prefix_points: {}", curve.len())?;
            }
            None => writeln!(out, "prefix curve skipped: config has no [state] block")?,
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_sweep(config_path: &Path, n_trials: usize, out_csv: &Path, out: &mut dyn Write) -> Result<i32> {
    let exp = load(config_path)?;
    if exp.states.is_empty() {
        return Err(Error::Validation("sweep needs a [state] block or [[states]] entries".into()));
    }
    let history = heisenberg_history(&exp.sys, &exp.waveform, &exp.plan, &exp.sys.measured_observable())?;
    let n = &exp.config.noise;
    let trials = run_trials(&history, &exp.states, n.sigma, n.n_averaged, n.seed, n_trials)?;
    let mut csv = String::from("trial,state,seed,fidelity\n");
    for t in &trials {
        let _ = writeln!(csv, "{},{},{},{:.16e}", t.trial, t.state, t.seed, t.fidelity);
    }
    write_text(out_csv, &csv)?;
    let fidelities: Vec<f64> = trials.iter().map(|t| t.fidelity).collect();
    match Summary::of(&fidelities) {
        Some(s) => writeln!(
            out,
            "rows: {}\nmean: {:.6}\nmedian: {:.6}\niqr: {:.6}",
            s.count,
            s.mean,
            s.median,
            s.iqr()
        )?,
        None => writeln!(out, "rows: 0")?,
    }
    Ok(EXIT_OK)
}

/// Accepts an estimate JSON (uses `rho_ml`) or a config TOML (uses `[state]`).
pub fn cmd_wigner(input: &Path, out_csv: &Path, n_theta: usize, n_phi: usize, out: &mut dyn Write) -> Result<i32> {
    let text = read_text(input)?;
    let (sys, rho) = if text.trim_start().starts_with('{') {
        let est = EstimateResult::from_json(&text)?;
        (crate::spin::SpinSystem::new(est.spin)?, est.rho_ml)
    } else {
        let exp = ExperimentConfig::parse(&text)?.build()?;
        let (_, rho) = exp
            .state
            .ok_or_else(|| Error::Validation("config has no [state] block".into()))?;
        (exp.sys, rho)
    };
    let grid = wigner_function(&rho, &sys, n_theta, n_phi)?;
    write_text(out_csv, &grid.to_csv())?;
    writeln!(out, "grid: {n_theta}x{n_phi}")?;
    writeln!(out, "integral: {:.12}", grid.integral())?;
    writeln!(out, "min: {:.9e}", grid.values.min())?;
    writeln!(out, "max: {:.9e}", grid.values.max())?;
    Ok(EXIT_OK)
}

pub fn cmd_design(
    config_path: &Path,
    budget: usize,
    out_config: &Path,
    seed: u64,
    options: &DesignOptions,
    out: &mut dyn Write,
) -> Result<i32> {
    let exp = load(config_path)?;
    let outcome = optimize_waveform(&exp.sys, &exp.waveform, &exp.plan, budget, seed, options)?;
    let mut config = exp.config;
    config.waveform.phi = PhiSpec::List(outcome.waveform.phi.clone());
    write_text(out_config, &config.to_toml())?;
    writeln!(out, "template_objective: {:.9e}", outcome.template_objective)?;
    writeln!(out, "objective: {:.9e}", outcome.objective)?;
    writeln!(out, "evaluations: {}", outcome.evaluations)?;
    Ok(EXIT_OK)
}

pub fn cmd_check(config_path: &Path, out: &mut dyn Write) -> Result<i32> {
    let exp = load(config_path)?;
    let history = heisenberg_history(&exp.sys, &exp.waveform, &exp.plan, &exp.sys.measured_observable())?;
    let r = completeness_report(&history)?;
    writeln!(out, "rank: {}/{}", r.rank, r.required)?;
    writeln!(out, "traceless: {}", r.traceless)?;
    let sv: Vec<String> = r.singular_values.iter().map(|s| format!("{s:.6e}")).collect();
    writeln!(out, "singular_values: {}", sv.join(" "))?;
    writeln!(out, "complete: {}", r.complete)?;
    Ok(if r.complete { EXIT_OK } else { EXIT_INCOMPLETE })
}

