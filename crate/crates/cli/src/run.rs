//! Executes a validated configuration and writes its artifact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bls_core::circuit::{accumulate_unitary, sample_random_circuit, Circuit};
use bls_core::diagnostics::{
    circuit_leakage, enumerate_distinguishable_distribution, enumerate_fock_distribution, fock_error_bound,
    markov_tail, random_walk_profile, theorem_bound_report, tvd, CheckSummary,
};
use bls_core::rng::{sample_stream, substream, CompensatedSum, CIRCUIT_STREAM};
use bls_core::sampling::{threshold_coarse_grain, ApproxSampler, ExactSampler, FockSampler, SampleRecord, SamplerKind};
use bls_core::selftest::run_selftest;
use bls_core::LatticeSpec;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Detector, Mode, RunConfig, SourceType};

/// Samples generated in parallel before being written in order.
const WRITE_CHUNK: usize = 4096;

#[derive(Debug)]
pub enum CliError {
    Invalid(Vec<String>),
    Core(bls_core::Error),
    Io(std::io::Error),
    Failed(String),
}

impl From<bls_core::Error> for CliError {
    fn from(e: bls_core::Error) -> Self {
        match e {
            bls_core::Error::Io(io) => CliError::Io(io),
            bls_core::Error::InvalidParameter(msg) => CliError::Invalid(vec![msg]),
            e => CliError::Core(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failed(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failed(format!("json: {e}"))
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Core(e) if e.is_scale_error() => 3,
            CliError::Core(e) if e.is_numerical_error() => 4,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid(_) => "invalid_config",
            CliError::Core(e) if e.is_scale_error() => "size_exceeded",
            CliError::Core(e) if e.is_numerical_error() => "numerical",
            CliError::Core(_) => "runtime",
            CliError::Io(_) => "io",
            CliError::Failed(_) => "failed",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (message, details) = match self {
            CliError::Invalid(list) => (format!("{} configuration error(s)", list.len()), list.clone()),
            CliError::Core(e) => (e.to_string(), Vec::new()),
            CliError::Io(e) => (e.to_string(), Vec::new()),
            CliError::Failed(m) => (m.clone(), Vec::new()),
        };
        json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": message, "details": details } })
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Runs the configured mode and returns the one-line summary (without timing).
pub fn run(cfg: &RunConfig) -> CliResult<String> {
    match cfg.mode {
        Mode::SampleExact | Mode::SampleApprox | Mode::SampleFock => sample(cfg),
        Mode::DiagnoseLeakage => diagnose_leakage(cfg),
        Mode::DiagnoseWalk => diagnose_walk(cfg),
        Mode::DiagnoseBounds => diagnose_bounds(cfg),
        Mode::KernelsSelftest => selftest(cfg),
    }
}

fn layout(cfg: &RunConfig) -> &LatticeSpec {
    cfg.layout.as_ref().expect("validated configuration carries its lattice")
}

fn out_path(cfg: &RunConfig) -> &Path {
    cfg.out.as_deref().expect("validated configuration carries an output path")
}

fn circuit(cfg: &RunConfig, stream: u64) -> Circuit {
    let mut c = sample_random_circuit(layout(cfg), cfg.depth, &mut substream(cfg.seed, stream));
    c.seed = Some(cfg.seed);
    c
}

enum Sampler {
    Exact(ExactSampler),
    Approx(ApproxSampler),
    Fock(FockSampler),
}

fn sample(cfg: &RunConfig) -> CliResult<String> {
    let c = circuit(cfg, CIRCUIT_STREAM);
    let (sampler, kind) = match cfg.mode {
        Mode::SampleExact => {
            let policy = cfg.policy.expect("squeezed configuration carries a policy");
            (Sampler::Exact(ExactSampler::new(&c, cfg.r.unwrap_or(0.0), policy)?), SamplerKind::Exact)
        }
        Mode::SampleApprox => {
            let policy = cfg.policy.expect("squeezed configuration carries a policy");
            (Sampler::Approx(ApproxSampler::new(&c, layout(cfg), cfg.r.unwrap_or(0.0), policy)?), SamplerKind::Approx)
        }
        _ => {
            let u = accumulate_unitary(&c)?.u;
            (Sampler::Fock(FockSampler::new(&u, layout(cfg))?), SamplerKind::Distinguishable)
        }
    };
    let draw = |id: u64| -> CliResult<SampleRecord> {
        let stream = sample_stream(id);
        let mut rng = substream(cfg.seed, stream);
        let counts = match &sampler {
            Sampler::Exact(s) => s.sample(&mut rng)?,
            Sampler::Approx(s) => s.sample(&mut rng)?,
            Sampler::Fock(s) => s.sample(&mut rng),
        };
        let (counts, clicks) = match cfg.detector {
            Detector::Pnr => (Some(counts), None),
            Detector::Threshold => (None, Some(threshold_coarse_grain(&counts))),
        };
        Ok(SampleRecord { sample_id: id, counts, clicks, sampler: kind, seed: cfg.seed, stream })
    };

    let path = out_path(cfg);
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &json!({ "config": cfg }))?;
    w.write_all(b"\n")?;
    let n = cfg.n_samples as u64;
    let mut photons = 0usize;
    for start in (0..n).step_by(WRITE_CHUNK) {
        let end = (start + WRITE_CHUNK as u64).min(n);
        let records = (start..end).into_par_iter().map(draw).collect::<CliResult<Vec<_>>>()?;
        for rec in &records {
            photons += rec.counts.as_ref().map_or(0, |c| c.iter().sum());
            serde_json::to_writer(&mut w, rec)?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    log::info!("{} samples written to {}", n, path.display());
    let mean = match cfg.detector {
        Detector::Pnr => format!(", mean photons {:.4}", photons as f64 / n as f64),
        Detector::Threshold => String::new(),
    };
    Ok(format!("{}: wrote {n} samples to {} (M={}{mean})", cfg.mode.name(), path.display(), cfg.modes))
}

fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

/// CSV report with a leading `# config:` comment line.
fn write_csv<R: Serialize>(cfg: &RunConfig, rows: &[R]) -> CliResult<()> {
    let mut f = BufWriter::new(File::create(out_path(cfg))?);
    writeln!(f, "# config: {}", serde_json::to_string(cfg)?)?;
    let mut w = csv::Writer::from_writer(f);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(cfg: &RunConfig, checks: &[CheckSummary]) -> CliResult<PathBuf> {
    let path = summary_path(out_path(cfg));
    let mut f = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut f, &json!({ "config": cfg, "checks": checks }))?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(path)
}

fn params(cfg: &RunConfig) -> serde_json::Value {
    json!({
        "d": cfg.d, "N": cfg.n_sources, "L": cfg.edge, "D": cfg.depth, "M": cfg.modes,
        "k": cfg.k, "gamma": cfg.gamma, "r": cfg.r, "samples": cfg.n_samples, "seed": cfg.seed,
    })
}

fn pass_count(checks: &[CheckSummary]) -> String {
    format!("{}/{} checks passed", checks.iter().filter(|c| c.pass).count(), checks.len())
}

#[derive(Serialize)]
struct LeakageRow {
    circuit: usize,
    source: usize,
    source_mode: usize,
    eta: f64,
    bound: f64,
}

fn diagnose_leakage(cfg: &RunConfig) -> CliResult<String> {
    let lay = layout(cfg);
    let reports = (0..cfg.n_samples)
        .into_par_iter()
        .map(|i| circuit_leakage(&circuit(cfg, CIRCUIT_STREAM + i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<LeakageRow> = reports
        .iter()
        .enumerate()
        .flat_map(|(i, rep)| {
            rep.per_source_eta.iter().enumerate().map(move |(a, &eta)| LeakageRow {
                circuit: i,
                source: a,
                source_mode: lay.sources[a],
                eta,
                bound: rep.bound,
            })
        })
        .collect();
    write_csv(cfg, &rows)?;

    let etas: Vec<f64> = reports.iter().map(|r| r.eta_max).collect();
    let n = etas.len() as f64;
    let mean = etas.iter().copied().collect::<CompensatedSum>().value() / n;
    let stderr = if etas.len() > 1 {
        (etas.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let bound = reports[0].bound;
    let mut checks = vec![CheckSummary {
        check: "leakage_mean".into(),
        instance_params: params(cfg),
        measured: mean,
        bound,
        pass: mean <= bound + 3.0 * stderr,
    }];
    if bound > 0.0 && etas.len() > 1 {
        for frac in [0.5, 0.1, 0.01] {
            let m = markov_tail(&etas, frac * bound);
            let mut p = params(cfg);
            p["threshold"] = json!(m.threshold);
            checks.push(CheckSummary {
                check: "leakage_markov_tail".into(),
                instance_params: p,
                measured: m.fraction,
                bound: m.markov_bound,
                pass: m.fraction <= m.markov_bound + 3.0 * m.fraction_stderr,
            });
        }
    }
    let summary = write_summary(cfg, &checks)?;
    Ok(format!(
        "diagnose-leakage: {} circuit(s), mean η_max {mean:.4e} vs bound {bound:.4e}; {}; report {} and {}",
        reports.len(),
        pass_count(&checks),
        out_path(cfg).display(),
        summary.display()
    ))
}

#[derive(Serialize)]
struct WalkRow {
    site: usize,
    mean: f64,
    stderr: f64,
    theory: f64,
    z: Option<f64>,
}

fn diagnose_walk(cfg: &RunConfig) -> CliResult<String> {
    let prof = random_walk_profile(cfg.d, cfg.modes, cfg.depth, cfg.n_samples, cfg.seed)?;
    let rows: Vec<WalkRow> = (0..prof.mean.len())
        .map(|j| WalkRow {
            site: j,
            mean: prof.mean[j],
            stderr: prof.stderr[j],
            theory: prof.theory[j],
            z: (prof.stderr[j] > 0.0).then(|| (prof.mean[j] - prof.theory[j]) / prof.stderr[j]),
        })
        .collect();
    write_csv(cfg, &rows)?;
    let outliers = prof.outliers(3.0);
    let mut p = params(cfg);
    p["source"] = json!(prof.source);
    p["outlier_sites"] = json!(outliers);
    let checks = vec![CheckSummary {
        check: "random_walk_profile_3sigma".into(),
        instance_params: p,
        measured: outliers.len() as f64,
        bound: 0.0,
        pass: outliers.is_empty(),
    }];
    let summary = write_summary(cfg, &checks)?;
    Ok(format!(
        "diagnose-walk: {} trials over {} sites, {} outlier(s) at 3σ; report {} and {}",
        prof.trials,
        prof.mean.len(),
        outliers.len(),
        out_path(cfg).display(),
        summary.display()
    ))
}

#[derive(Serialize)]
struct BoundRow {
    quantity: &'static str,
    value: Option<f64>,
}

fn diagnose_bounds(cfg: &RunConfig) -> CliResult<String> {
    let lay = layout(cfg);
    let c = circuit(cfg, CIRCUIT_STREAM);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let row = |q, v| BoundRow { quantity: q, value: Some(v) };

    if cfg.source_type == SourceType::Squeezed {
        let r = cfg.r.unwrap_or(0.0);
        let rep = theorem_bound_report(&c, lay, r, cfg.policy.as_ref())?;
        rows.extend([
            row("eta_max", rep.eta_max),
            row("x_norm", rep.x_norm),
            row("x_norm_bound", rep.x_norm_bound),
            row("infidelity", rep.infidelity),
            row("infidelity_bound", rep.infidelity_bound),
            row("small_x", if rep.small_x { 1.0 } else { 0.0 }),
            row("tvd_bound", rep.tvd_bound),
        ]);
        let t = rep.true_tvd;
        rows.extend([
            BoundRow { quantity: "true_tvd_truncated", value: t.map(|t| t.truncated) },
            BoundRow { quantity: "true_tvd_lower", value: t.map(|t| t.lower) },
            BoundRow { quantity: "true_tvd_upper", value: t.map(|t| t.upper) },
        ]);
        checks.push(CheckSummary::upper("covariance_error_vs_leakage", params(cfg), rep.x_norm, rep.x_norm_bound));
        if rep.small_x {
            checks.push(CheckSummary::upper("infidelity", params(cfg), rep.infidelity, rep.infidelity_bound));
            if let Some(t) = t {
                checks.push(CheckSummary::upper("gaussian_tvd_upper", params(cfg), t.upper, rep.tvd_bound));
            }
        }
    }

    let u = accumulate_unitary(&c)?.u;
    let fb = fock_error_bound(&u, lay)?;
    rows.extend([
        row("fock_c_max", fb.c_max),
        row("fock_exact_sum_bound", fb.exact_sum_bound),
        BoundRow { quantity: "fock_overlap_permanent_bound", value: fb.overlap_permanent_bound },
        row("fock_surrogate_c", fb.surrogate_c),
        row("fock_surrogate_bound", fb.surrogate_bound),
    ]);
    let fock_tvd = match (enumerate_fock_distribution(&u, lay), enumerate_distinguishable_distribution(&u, lay)) {
        (Ok(a), Ok(b)) => Some(tvd(&a, &b)?),
        (Err(e), _) | (_, Err(e)) if e.is_scale_error() => None,
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    };
    rows.push(BoundRow { quantity: "fock_true_tvd", value: fock_tvd });
    if let Some(t) = fock_tvd {
        checks.push(CheckSummary::upper("fock_tvd", params(cfg), t, fb.exact_sum_bound));
    }

    write_csv(cfg, &rows)?;
    let summary = write_summary(cfg, &checks)?;
    Ok(format!(
        "diagnose-bounds: {}; report {} and {}",
        pass_count(&checks),
        out_path(cfg).display(),
        summary.display()
    ))
}

fn selftest(cfg: &RunConfig) -> CliResult<String> {
    let report = run_selftest(cfg.seed)?;
    let doc = json!({ "config": cfg, "report": report });
    match &cfg.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut f, &doc)?;
            f.write_all(b"\n")?;
            f.flush()?;
        }
        None => println!("{}", serde_json::to_string_pretty(&doc)?),
    }
    let mut lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {} ({} cases, max error {:.3e}, tolerance {:.1e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.cases,
                c.max_error,
                c.tolerance
            )
        })
        .collect();
    let passed = report.checks.iter().filter(|c| c.pass).count();
    lines.push(format!("kernels-selftest: {passed}/{} checks passed", report.checks.len()));
    let text = lines.join("\n");
    if report.pass {
        Ok(text)
    } else {
        println!("{text}");
        Err(CliError::Failed(format!("{} kernel check(s) failed", report.checks.len() - passed)))
    }
}
