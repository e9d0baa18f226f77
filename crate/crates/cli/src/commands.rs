use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use toyworld_core::checks::{run_suite, CheckOutcome, SuiteOptions};
use toyworld_core::experiment::{compare_modes, run_experiment, ExperimentMode, ExperimentResult, ModeComparison};
use toyworld_core::par::Execution;

use crate::artifacts::{write_experiment, write_file, write_json, SpectrumJson, SummaryJson, SCHEMA_VERSION};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Runs every (mode, N) of `cfg` across the worker pool. Results come back
/// in (mode, N) order whatever the scheduling.
pub fn run_all(cfg: &ExperimentConfig, exec: Execution) -> CliResult<Vec<ExperimentResult>> {
    let specs = cfg.specs();
    Ok(exec.try_map(&specs, |s| run_experiment(s, Execution::Sequential))?)
}

#[derive(Debug, Serialize)]
struct MergedSummary<'a> {
    schema_version: u32,
    experiments: &'a [SummaryJson],
}

fn write_all(cfg: &ExperimentConfig, results: &[ExperimentResult]) -> CliResult<Vec<SummaryJson>> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    let mut summaries = Vec::with_capacity(results.len());
    for res in results {
        write_experiment(&cfg.out, res, cfg.format, cfg.plot)?;
        summaries.push(SummaryJson::new(res));
    }
    write_json(
        &cfg.out.join("summary.json"),
        &MergedSummary {
            schema_version: SCHEMA_VERSION,
            experiments: &summaries,
        },
    )?;
    Ok(summaries)
}

pub fn run(cfg: &ExperimentConfig, exec: Execution) -> CliResult<Vec<SummaryJson>> {
    let results = run_all(cfg, exec)?;
    write_all(cfg, &results)
}

/// Per-state comparison of complex against real amplitudes at one `N`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PerStateOrdering {
    pub state: String,
    pub quantum: f64,
    pub real: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CutoffReport {
    pub cutoff: usize,
    pub means: ModeComparison,
    pub margin_over_real: f64,
    pub margin_over_superposition: f64,
    pub per_state: Vec<PerStateOrdering>,
    /// Every alive initial state lives longer under complex amplitudes.
    pub quantum_outlives_real: bool,
    /// Mean over matched states exceeds the superposition mode, by a
    /// smaller margin than over real amplitudes.
    pub quantum_outlives_superposition: bool,
    pub ordering: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PaperReport {
    pub schema_version: u32,
    pub half_bare_mass_sq: f64,
    pub dimension: u32,
    pub cutoffs: Vec<CutoffReport>,
    pub all_hold: bool,
}

fn ordering_string(m: &ModeComparison) -> String {
    let mut named = [
        ("quantum", m.quantum),
        ("superposition", m.superposition),
        ("real", m.real),
    ];
    named.sort_by(|a, b| b.1.total_cmp(&a.1));
    named.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(" > ")
}

pub fn compare_at(
    cutoff: usize,
    quantum: &ExperimentResult,
    real: &ExperimentResult,
    superposition: &ExperimentResult,
) -> CliResult<CutoffReport> {
    let means = compare_modes(quantum, real, superposition)?;
    let per_state: Vec<PerStateOrdering> = quantum
        .tables
        .iter()
        .map(|t| {
            let r = real.expectancy_of(&t.initial_state).unwrap_or(f64::NAN);
            PerStateOrdering {
                state: t.initial_state.to_string(),
                quantum: t.expectancy,
                real: r,
                holds: t.expectancy > r,
            }
        })
        .collect();
    let quantum_outlives_real = !per_state.is_empty() && per_state.iter().all(|s| s.holds);
    Ok(CutoffReport {
        cutoff,
        margin_over_real: means.margin_over_real(),
        margin_over_superposition: means.margin_over_superposition(),
        quantum_outlives_real,
        quantum_outlives_superposition: means.quantum_outlives_superposition(),
        ordering: ordering_string(&means),
        means,
        per_state,
    })
}

pub fn paper_report(cfg: &ExperimentConfig, results: &[ExperimentResult]) -> CliResult<PaperReport> {
    let find = |mode: ExperimentMode, n: usize| {
        results
            .iter()
            .find(|r| r.spec.mode == mode && r.spec.cutoff == n)
            .ok_or_else(|| CliError::BadArgs(format!("missing {mode} N={n}")))
    };
    let mut cutoffs: Vec<usize> = results.iter().map(|r| r.spec.cutoff).collect();
    cutoffs.sort_unstable();
    cutoffs.dedup();
    let reports = cutoffs
        .iter()
        .map(|&n| {
            compare_at(
                n,
                find(ExperimentMode::Quantum1, n)?,
                find(ExperimentMode::RealQuantum1, n)?,
                find(ExperimentMode::Quantum1Sp, n)?,
            )
        })
        .collect::<CliResult<Vec<_>>>()?;
    let all_hold = reports
        .iter()
        .all(|r| r.quantum_outlives_real && r.quantum_outlives_superposition);
    Ok(PaperReport {
        schema_version: SCHEMA_VERSION,
        half_bare_mass_sq: cfg.half_bare_mass_sq,
        dimension: cfg.dimension,
        cutoffs: reports,
        all_hold,
    })
}

pub fn report_text(report: &PaperReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mode comparison at a2m2/2 = {}, D = {}",
        report.half_bare_mass_sq, report.dimension
    );
    for c in &report.cutoffs {
        let _ = writeln!(s, "N = {}: {}", c.cutoff, c.ordering);
        let _ = writeln!(
            s,
            "  mean <s>: quantum {:.6}  superposition {:.6}  real {:.6}",
            c.means.quantum, c.means.superposition, c.means.real
        );
        let _ = writeln!(
            s,
            "  margin over real {:.4}  over superposition {:.4}",
            c.margin_over_real, c.margin_over_superposition
        );
        let _ = writeln!(
            s,
            "  quantum outlives real at every state: {}",
            verdict(c.quantum_outlives_real)
        );
        let _ = writeln!(
            s,
            "  quantum outlives superposition by a smaller margin: {}",
            verdict(c.quantum_outlives_superposition)
        );
    }
    let _ = writeln!(s, "overall: {}", verdict(report.all_hold));
    s
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Full three-mode sweep plus the comparison report. Fails with an
/// assertion error when either ordering claim does not hold.
pub fn reproduce_paper(cfg: &ExperimentConfig, exec: Execution) -> CliResult<PaperReport> {
    let mut cfg = cfg.clone();
    cfg.modes = ExperimentMode::ALL.to_vec();
    let results = run_all(&cfg, exec)?;
    write_all(&cfg, &results)?;
    let report = paper_report(&cfg, &results)?;
    write_json(&cfg.out.join("report.json"), &report)?;
    write_file(&cfg.out.join("report.txt"), &report_text(&report))?;
    if !report.all_hold {
        return Err(CliError::Assertion(format!(
            "ordering claims do not hold; see {}",
            cfg.out.join("report.txt").display()
        )));
    }
    Ok(report)
}

pub fn verify_text(outcomes: &[CheckOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        let _ = writeln!(
            s,
            "{} {}  tolerance {:.1e}  observed {:.3e}",
            verdict(o.passed),
            o.name,
            o.tolerance,
            o.observed
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let _ = writeln!(s, "{} checks, {} failed", outcomes.len(), failed);
    s
}

pub fn verify(eta_perturbation: f64, exec: Execution, out: Option<&Path>) -> CliResult<(Vec<CheckOutcome>, String)> {
    let outcomes = run_suite(SuiteOptions {
        eta_perturbation,
        exec,
    });
    let text = verify_text(&outcomes);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        write_json(&dir.join("verify.json"), &outcomes)?;
    }
    Ok((outcomes, text))
}

pub fn spectra(cfg: &ExperimentConfig) -> CliResult<Vec<SpectrumJson>> {
    cfg.specs()
        .iter()
        .map(|spec| {
            // life tables are not needed; a horizon of 1 keeps this cheap
            let mut quick = *spec;
            quick.horizon = 1;
            Ok(SpectrumJson::new(&run_experiment(&quick, Execution::Sequential)?))
        })
        .collect()
}
