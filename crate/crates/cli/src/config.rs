//! Run configuration: command-line arguments, validation and the normalized form embedded in
//! every artifact.

use std::path::PathBuf;

use bls_core::sampling::TruncationPolicy;
use bls_core::LatticeSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_WALK_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SampleExact,
    SampleApprox,
    SampleFock,
    DiagnoseLeakage,
    DiagnoseWalk,
    DiagnoseBounds,
    KernelsSelftest,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SampleExact => "sample-exact",
            Mode::SampleApprox => "sample-approx",
            Mode::SampleFock => "sample-fock",
            Mode::DiagnoseLeakage => "diagnose-leakage",
            Mode::DiagnoseWalk => "diagnose-walk",
            Mode::DiagnoseBounds => "diagnose-bounds",
            Mode::KernelsSelftest => "kernels-selftest",
        }
    }

    pub fn is_sampling(self) -> bool {
        matches!(self, Mode::SampleExact | Mode::SampleApprox | Mode::SampleFock)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceType {
    Squeezed,
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Pnr,
    Threshold,
}

/// Sampling and diagnostics for random beam-splitter circuits on lattices of modes.
///
/// Exit codes: 0 success, 1 runtime failure (I/O, failed self-test), 2 invalid configuration,
/// 3 oracle or kernel size cap exceeded, 4 numerical conditioning failure.
#[derive(Debug, Parser)]
#[command(name = "bls", version, args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(flatten)]
    pub args: RunArgs,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(hide = true)]
    Kernels {
        #[command(subcommand)]
        action: KernelsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum KernelsAction {
    /// Run the hafnian/permanent oracle-equivalence suite.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Lattice dimension d.
    #[arg(long = "dim")]
    pub dim: Option<usize>,
    /// Number of sources N (one per sublattice).
    #[arg(long = "sources")]
    pub sources: Option<usize>,
    /// Sublattice edge length L.
    #[arg(long = "sublattice-edge")]
    pub edge: Option<usize>,
    /// Circuit depth D (number of brickwork layers).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Squeezing parameter r of every source.
    #[arg(long = "squeezing", allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long = "source-type", value_enum)]
    pub source_type: Option<SourceType>,
    #[arg(long, value_enum)]
    pub detector: Option<Detector>,
    /// Truncation target: neglected photon-number tail probability.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Samples to draw, circuits to average over (leakage) or walk trials.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Prefactor k in M = k N^γ (default 1).
    #[arg(long = "scale-prefactor")]
    pub k: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Validate and print the normalized configuration without running.
    #[arg(long)]
    pub check: bool,
}

/// Fully resolved configuration, echoed into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub d: usize,
    #[serde(rename = "N")]
    pub n_sources: usize,
    #[serde(rename = "L")]
    pub edge: usize,
    #[serde(rename = "D")]
    pub depth: usize,
    pub r: Option<f64>,
    pub source_type: SourceType,
    pub detector: Detector,
    pub epsilon: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(rename = "M")]
    pub modes: usize,
    pub k: f64,
    pub gamma: Option<f64>,
    /// Photon budget of the truncation policy (squeezed sources only).
    pub n_total_max: Option<usize>,
    #[serde(skip)]
    pub layout: Option<LatticeSpec>,
    #[serde(skip)]
    pub policy: Option<TruncationPolicy>,
}

fn required<T: Copy>(v: Option<T>, flag: &str, errors: &mut Vec<String>) -> Option<T> {
    if v.is_none() {
        errors.push(format!("--{flag} is required"));
    }
    v
}

/// Resolves defaults and derived quantities, listing every violation on failure.
pub fn validate(args: &RunArgs) -> Result<RunConfig, Vec<String>> {
    let mut errors = Vec::new();
    let Some(mode) = args.mode else {
        return Err(vec!["--mode is required".into()]);
    };
    if mode == Mode::KernelsSelftest {
        return Ok(selftest_config(args.seed, args.out.clone(), args.threads));
    }

    let d = required(args.dim, "dim", &mut errors);
    let n = required(args.sources, "sources", &mut errors);
    let edge = required(args.edge, "sublattice-edge", &mut errors);
    let depth = required(args.depth, "depth", &mut errors);

    let source_type = args.source_type.unwrap_or(match mode {
        Mode::SampleFock => SourceType::Fock,
        _ => SourceType::Squeezed,
    });
    let detector = args.detector.unwrap_or(Detector::Pnr);
    if source_type == SourceType::Fock && args.r.is_some() {
        errors.push("squeezing incompatible with fock".into());
    }
    if detector == Detector::Threshold && source_type != SourceType::Squeezed {
        errors.push("threshold detection requires squeezed sources".into());
    }
    match (mode, source_type) {
        (Mode::SampleExact | Mode::SampleApprox, SourceType::Fock) => {
            errors.push(format!("{} requires squeezed sources", mode.name()))
        }
        (Mode::SampleFock, SourceType::Squeezed) => errors.push("sample-fock requires fock sources".into()),
        _ => {}
    }
    let needs_r = matches!(mode, Mode::SampleExact | Mode::SampleApprox | Mode::DiagnoseBounds);
    if needs_r && source_type == SourceType::Squeezed && args.r.is_none() {
        errors.push("--squeezing is required for squeezed sources".into());
    }
    if let Some(r) = args.r {
        if !(r.is_finite() && r >= 0.0) {
            errors.push(format!("squeezing must be finite and non-negative, got {r}"));
        }
    }
    let epsilon = args.epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        errors.push(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if mode.is_sampling() && args.seed.is_none() {
        errors.push("--seed is required for sampling modes".into());
    }
    if args.out.is_none() {
        errors.push(format!("--out is required for {}", mode.name()));
    }
    if args.threads == Some(0) {
        errors.push("--threads must be positive".into());
    }
    let n_samples = args.samples.unwrap_or(match mode {
        Mode::DiagnoseWalk => DEFAULT_WALK_TRIALS,
        Mode::DiagnoseLeakage | Mode::DiagnoseBounds => 1,
        _ => DEFAULT_SAMPLES,
    });
    if n_samples == 0 {
        errors.push("--samples must be positive".into());
    }
    if mode == Mode::DiagnoseWalk && n_samples < bls_core::diagnostics::MIN_TRIALS {
        errors.push(format!("diagnose-walk needs at least {} trials", bls_core::diagnostics::MIN_TRIALS));
    }

    let mut layout = None;
    if let (Some(d), Some(n), Some(edge)) = (d, n, edge) {
        match LatticeSpec::new(d, n, edge, edge / 2) {
            Ok(mut l) => {
                if let Some(k) = args.k {
                    if let Err(e) = l.set_scale_prefactor(k) {
                        errors.push(e.to_string());
                    }
                }
                if mode == Mode::DiagnoseWalk {
                    let side = (l.modes as f64).powf(1.0 / d as f64).round() as usize;
                    if side.checked_pow(d as u32) != Some(l.modes) {
                        errors.push(format!(
                            "diagnose-walk needs a cubic lattice, but M = {} is not an integer power of d = {d}",
                            l.modes
                        ));
                    }
                }
                layout = Some(l);
            }
            Err(e) => errors.push(e.to_string()),
        }
    }

    let r = if source_type == SourceType::Squeezed { args.r } else { None };
    let mut policy = None;
    if let (Some(n), Some(r), SourceType::Squeezed) = (n, r, source_type) {
        if r.is_finite() && r >= 0.0 && epsilon > 0.0 && epsilon < 1.0 && n > 0 {
            policy = TruncationPolicy::certified(n, r, epsilon).ok();
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let layout = layout.expect("lattice built when there are no errors");
    Ok(RunConfig {
        mode,
        d: layout.dim,
        n_sources: layout.n_sources,
        edge: layout.edge,
        depth: depth.unwrap_or(0),
        r,
        source_type,
        detector,
        epsilon,
        n_samples,
        seed: args.seed.unwrap_or(0),
        threads: args.threads,
        out: args.out.clone(),
        modes: layout.modes,
        k: layout.k,
        gamma: layout.gamma,
        n_total_max: policy.map(|p| p.n_total_max),
        layout: Some(layout),
        policy,
    })
}

pub fn selftest_config(seed: Option<u64>, out: Option<PathBuf>, threads: Option<usize>) -> RunConfig {
    RunConfig {
        mode: Mode::KernelsSelftest,
        d: 0,
        n_sources: 0,
        edge: 0,
        depth: 0,
        r: None,
        source_type: SourceType::Squeezed,
        detector: Detector::Pnr,
        epsilon: DEFAULT_EPSILON,
        n_samples: 0,
        seed: seed.unwrap_or(0),
        threads,
        out,
        modes: 0,
        k: 1.0,
        gamma: None,
        n_total_max: None,
        layout: None,
        policy: None,
    }
}
