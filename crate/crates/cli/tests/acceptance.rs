//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! PASS/FAIL lines always print; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toyworld_core::amplitudes::{eta, ModeSpec};
use toyworld_core::checks::{run_suite, SuiteOptions};
use toyworld_core::experiment::{compare_modes, run_experiment, ExperimentMode, ExperimentSpec};
use toyworld_core::halfline::build_m;
use toyworld_core::lifetable::{life_tables, reduce};
use toyworld_core::linalg::{eigen_decompose, C64};
use toyworld_core::par::Execution;
use toyworld_core::transition::{StateLabel, TransitionMatrix};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

const CUTOFFS: [usize; 3] = [5, 9, 13];
const REFERENCE_SPECTRUM: [f64; 5] = [2.14224, 1.17831, 0.292563, 0.032359, 0.00132099];

fn experiment(mode: ExperimentMode, n: usize) -> toyworld_core::experiment::ExperimentResult {
    run_experiment(&ExperimentSpec::new(mode, n), Execution::default()).expect("experiment runs")
}

fn spectrum_reproduction() -> Verdict {
    let start = Instant::now();
    let m = build_m(ModeSpec::QUANTUM1, -0.9, 5).expect("M builds");
    let values = eigen_decompose(&m).expect("eigenvalues").values;
    let worst = values
        .iter()
        .zip(REFERENCE_SPECTRUM)
        .map(|(got, r)| {
            let want = C64::new(r, r);
            (got - want).norm() / want.norm()
        })
        .fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    Verdict::new(
        values.len() == 5 && worst < 1e-3 && elapsed < 1.0,
        format!("max relative error {worst:.2e} vs (1+i)-scaled reference, tolerance 1e-3, {elapsed:.3}s"),
    )
}

fn parameter_reproduction() -> Verdict {
    let q = eta(ModeSpec::QUANTUM1, 0.1, 1);
    let r = eta(ModeSpec::REAL_QUANTUM1, 0.1, 1);
    Verdict::new(q == -0.9 && r == 1.1, format!("eta = {q:?} and {r:?}, expected -0.9 and 1.1 exactly"))
}

fn mode_ordering_one() -> Verdict {
    let start = Instant::now();
    let mut worst: Option<(usize, String, f64, f64)> = None;
    let mut count = 0;
    let mut all = true;
    for n in CUTOFFS {
        let q = experiment(ExperimentMode::Quantum1, n);
        let r = experiment(ExperimentMode::RealQuantum1, n);
        for t in &q.tables {
            let real = r.expectancy_of(&t.initial_state).unwrap_or(f64::NAN);
            count += 1;
            let ratio = t.expectancy / real;
            if !(t.expectancy > real) {
                all = false;
            }
            if worst.as_ref().map_or(true, |w| ratio < w.2 / w.3) {
                worst = Some((n, t.initial_state.to_string(), t.expectancy, real));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let (n, state, q, r) = worst.unwrap_or_default();
    Verdict::new(
        all && count > 0 && elapsed < 5.0,
        format!("{count} initial states; tightest N={n} {state}: quantum {q:.4} vs real {r:.4}; {elapsed:.2}s"),
    )
}

fn mode_ordering_two() -> Verdict {
    let mut all = true;
    let mut parts = Vec::new();
    for n in CUTOFFS {
        let c = compare_modes(
            &experiment(ExperimentMode::Quantum1, n),
            &experiment(ExperimentMode::RealQuantum1, n),
            &experiment(ExperimentMode::Quantum1Sp, n),
        )
        .expect("comparable");
        all &= c.quantum_outlives_superposition();
        parts.push(format!(
            "N={n} margins {:.6} (superposition) < {:.6} (real)",
            c.margin_over_superposition(),
            c.margin_over_real()
        ));
    }
    Verdict::new(all, parts.join("; "))
}

fn peakedness() -> Verdict {
    let p = experiment(ExperimentMode::Quantum1, 5).transition;
    let argmax = p.column_argmax();
    let bad: Vec<String> = argmax
        .iter()
        .enumerate()
        .filter(|(m, a)| m != *a)
        .map(|(m, &a)| {
            format!(
                "column {} peaks at {} ({:.4} vs {:.4} on the diagonal)",
                p.states()[m],
                p.states()[a],
                p.get(a, m),
                p.get(m, m)
            )
        })
        .collect();
    let detail = if bad.is_empty() {
        "argmax_n p(n|m) = m in every column".to_string()
    } else {
        bad.join("; ")
    };
    Verdict::new(bad.is_empty(), detail)
}

fn decay() -> Verdict {
    let p = experiment(ExperimentMode::RealQuantum1, 5).transition;
    let mut all = true;
    let mut parts = Vec::new();
    for m in 1..p.dim() {
        let col = p.column(m);
        let below: f64 = col[..m].iter().sum();
        // fold from +0.0; an empty f64 sum is -0.0
        let above = col[m + 1..].iter().fold(0.0, |a, b| a + b);
        all &= below > above;
        parts.push(format!("{} {below:.3}/{above:.3}", p.states()[m]));
    }
    Verdict::new(all, format!("mass below/above per column: {}", parts.join(", ")))
}

fn oracle_suite() -> Verdict {
    let start = Instant::now();
    let outcomes = run_suite(SuiteOptions::default());
    let elapsed = start.elapsed().as_secs_f64();
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    let worst = outcomes
        .iter()
        .map(|o| o.observed / o.tolerance)
        .fold(0.0, f64::max);
    let detail = if failed.is_empty() {
        format!("{} checks, worst observed/tolerance {worst:.2e}, {elapsed:.1}s", outcomes.len())
    } else {
        format!("failed: {}", failed.join("; "))
    };
    Verdict::new(failed.is_empty() && elapsed < 60.0, detail)
}

/// Column-stochastic matrix over `alive + 1` states whose last state is an
/// absorbing death state.
fn random_chain(rng: &mut ChaCha8Rng) -> TransitionMatrix {
    let alive = rng.gen_range(1..=12);
    let dim = alive + 1;
    let mut p = vec![0.0; dim * dim];
    for c in 0..alive {
        let raw: Vec<f64> = (0..alive).map(|_| rng.gen::<f64>().powi(2)).collect();
        let total: f64 = raw.iter().sum();
        let keep = if rng.gen_bool(0.2) { rng.gen_range(0.99..0.999) } else { rng.gen_range(0.0..0.95) };
        for (r, x) in raw.iter().enumerate() {
            p[r * dim + c] = if total > 0.0 { keep * x / total } else { 0.0 };
        }
        let used: f64 = (0..alive).map(|r| p[r * dim + c]).sum();
        p[alive * dim + c] = 1.0 - used;
    }
    p[alive * dim + alive] = 1.0;
    let states = (1..=dim).map(StateLabel::Basis).collect();
    TransitionMatrix::new(states, p).expect("stochastic by construction")
}

fn markov_invariants() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_gap: f64 = 0.0;
    let mut worst_age: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..500 {
        let p = random_chain(&mut rng);
        let death = [StateLabel::Basis(p.dim())];
        let chain = reduce(&p, &death).expect("reduces");
        let n = chain.alive.len();
        if (0..n).any(|c| (0..n).map(|r| chain.matrix[(r, c)].re).sum::<f64>() > 1.0 + 1e-12) {
            violations += 1;
        }
        for t in life_tables(&p, &death, 100_000, Execution::Sequential).expect("finite") {
            if t.survival.windows(2).any(|w| w[1] > w[0] + 1e-15) {
                violations += 1;
            }
            let partial: f64 = t.survival.iter().sum();
            worst_gap = worst_gap.max((partial - t.expectancy).abs() / t.expectancy.max(1.0));
            let tail = t.survival.last().copied().unwrap_or(0.0) - t.age_dist.last().copied().unwrap_or(0.0);
            let aged: f64 = t.age_dist.iter().sum();
            worst_age = worst_age.max((aged - (1.0 - tail)).abs());
        }
    }
    Verdict::new(
        violations == 0 && worst_gap < 1e-6 && worst_age < 1e-9,
        format!(
            "500 matrices, {violations} violations, worst |<s> - sum q| {worst_gap:.2e} (tol 1e-6), worst |sum p_age - (1 - q_end)| {worst_age:.2e}"
        ),
    )
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).expect("readable").map(|e| e.expect("entry")) {
            let path = entry.path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).expect("inside root").to_path_buf();
                out.insert(rel, fs::read(&path).expect("readable"));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_toyworld");
    let dirs = [tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir")];
    let mut codes = Vec::new();
    for d in &dirs {
        let status = Command::new(bin)
            .args(["reproduce-paper", "--out"])
            .arg(d.path())
            .output()
            .expect("binary runs")
            .status;
        codes.push(status.code());
    }
    let a = tree(dirs[0].path());
    let b = tree(dirs[1].path());
    let differing = a.iter().filter(|(k, v)| b.get(*k) != Some(v)).count() + b.keys().filter(|k| !a.contains_key(*k)).count();
    Verdict::new(
        !a.is_empty() && differing == 0 && codes.iter().all(|c| *c == Some(0)),
        format!("{} files per run, {differing} differ, exit codes {codes:?}", a.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("AC1 spectrum reproduction", spectrum_reproduction),
        ("AC2 parameter reproduction", parameter_reproduction),
        ("AC3 quantum outlives real at every initial state", mode_ordering_one),
        ("AC4 quantum outlives superposition by a smaller margin", mode_ordering_two),
        ("AC5 peakedness around n = m", peakedness),
        ("AC6 decay to lower particle numbers", decay),
        ("AC7 oracle suite", oracle_suite),
        ("AC8 Markov invariants", markov_invariants),
        ("AC9 determinism of reproduce-paper", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        if !v.passed {
            failed += 1;
        }
        println!("{} {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
