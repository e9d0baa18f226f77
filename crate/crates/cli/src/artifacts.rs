//! File formats. Every writer is a pure function of its input so repeated
//! runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toyworld_core::experiment::{ExperimentMode, ExperimentResult};
use toyworld_core::linalg::C64;
use toyworld_core::transition::TransitionMatrix;

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// 12 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn experiment_dir(mode: ExperimentMode, cutoff: usize) -> String {
    format!("{mode}_N{cutoff}")
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, &text)
}

pub fn transition_csv(res: &ExperimentResult) -> String {
    let p = &res.transition;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# p(next|prev) mode={} N={} eta={}; column = previous state, row = next state",
        res.spec.mode,
        res.spec.cutoff,
        res.params.eta()
    );
    s.push_str("next\\prev");
    for label in p.states() {
        let _ = write!(s, ",{label}");
    }
    s.push('\n');
    for (r, label) in p.states().iter().enumerate() {
        s.push_str(&label.to_string());
        for &x in p.row(r) {
            s.push(',');
            s.push_str(&num(x));
        }
        s.push('\n');
    }
    s
}

pub fn lifetable_csv(res: &ExperimentResult) -> String {
    let mut s = String::from("# life expectancy per initial state; steps = length of the recorded survival curve\n");
    s.push_str("initial_state,expectancy,steps,survival_at_horizon\n");
    for t in &res.tables {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            t.initial_state,
            num(t.expectancy),
            t.survival.len(),
            num(*t.survival.last().unwrap_or(&0.0))
        );
    }
    s
}

/// Long format: one row per (initial state, step).
pub fn survival_csv(res: &ExperimentResult) -> String {
    let mut s = String::from("initial_state,s,q,p_age\n");
    for t in &res.tables {
        for (i, (q, pa)) in t.survival.iter().zip(&t.age_dist).enumerate() {
            let _ = writeln!(s, "{},{},{},{}", t.initial_state, i + 1, num(*q), num(*pa));
        }
    }
    s
}

#[derive(Debug, Serialize)]
pub struct TransitionJson {
    pub mode: ExperimentMode,
    pub cutoff: usize,
    pub eta: f64,
    pub states: Vec<String>,
    /// `p[next][prev]`
    pub p: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct LifeTableJson {
    pub initial_state: String,
    pub expectancy: f64,
    pub survival: Vec<f64>,
    pub age_dist: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumJson {
    pub schema_version: u32,
    pub mode: ExperimentMode,
    pub cutoff: usize,
    /// Size of `M`; larger than `cutoff` for the superposition mode.
    pub matrix_dim: usize,
    pub eta: f64,
    pub lambda_max: [f64; 2],
    pub eigenvalues: Vec<[f64; 2]>,
    pub u: Vec<[f64; 2]>,
}

impl SpectrumJson {
    pub fn new(res: &ExperimentResult) -> Self {
        let h = &res.half_line;
        Self {
            schema_version: SCHEMA_VERSION,
            mode: res.spec.mode,
            cutoff: res.spec.cutoff,
            matrix_dim: h.cutoff(),
            eta: res.params.eta(),
            lambda_max: pair(h.renorm_eigenvalue),
            eigenvalues: h.full_spectrum.iter().copied().map(pair).collect(),
            u: h.u.iter().copied().map(pair).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StateExpectancy {
    pub state: String,
    pub expectancy: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SummaryJson {
    pub schema_version: u32,
    pub mode: ExperimentMode,
    pub cutoff: usize,
    pub half_bare_mass_sq: f64,
    pub dimension: u32,
    pub eta: f64,
    pub horizon: usize,
    pub states: Vec<String>,
    pub death_states: Vec<String>,
    pub life_expectancy: Vec<StateExpectancy>,
    pub mean_expectancy: f64,
}

impl SummaryJson {
    pub fn new(res: &ExperimentResult) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mode: res.spec.mode,
            cutoff: res.spec.cutoff,
            half_bare_mass_sq: res.spec.half_bare_mass_sq,
            dimension: res.spec.dimension,
            eta: res.params.eta(),
            horizon: res.spec.horizon,
            states: res.transition.states().iter().map(ToString::to_string).collect(),
            death_states: res.death_states.iter().map(ToString::to_string).collect(),
            life_expectancy: res
                .tables
                .iter()
                .map(|t| StateExpectancy {
                    state: t.initial_state.to_string(),
                    expectancy: t.expectancy,
                })
                .collect(),
            mean_expectancy: res.mean_expectancy(),
        }
    }
}

const CELL: usize = 32;
const MARGIN: usize = 64;

fn grey(p: f64) -> u8 {
    // p = 0 is white, p = 1 is black
    (255.0 * (1.0 - p.clamp(0.0, 1.0))).round() as u8
}

/// Monochrome heatmap, linear in `p`. Columns are previous states.
pub fn heatmap_svg(p: &TransitionMatrix, title: &str) -> String {
    let n = p.dim();
    let side = MARGIN + n * CELL + 8;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}" font-family="monospace" font-size="9">"#
    );
    let _ = writeln!(s, r#"<title>{title}</title>"#);
    let _ = writeln!(s, r#"<rect width="{side}" height="{side}" fill="white"/>"#);
    for (i, label) in p.states().iter().enumerate() {
        let c = MARGIN + i * CELL + CELL / 2;
        let _ = writeln!(s, r#"<text x="{c}" y="{}" text-anchor="middle">{label}</text>"#, MARGIN - 6);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#, MARGIN - 6, c + 3);
    }
    for r in 0..n {
        for c in 0..n {
            let v = p.get(r, c);
            let g = grey(v);
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="rgb({g},{g},{g})"><title>{:.6}</title></rect>"#,
                MARGIN + c * CELL,
                MARGIN + r * CELL,
                v
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Writes one experiment's directory and returns its path.
pub fn write_experiment(root: &Path, res: &ExperimentResult, format: Format, plot: bool) -> CliResult<PathBuf> {
    let dir = root.join(experiment_dir(res.spec.mode, res.spec.cutoff));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    match format {
        Format::Csv => {
            write_file(&dir.join("transition.csv"), &transition_csv(res))?;
            write_file(&dir.join("lifetable.csv"), &lifetable_csv(res))?;
            write_file(&dir.join("survival.csv"), &survival_csv(res))?;
        }
        Format::Json => {
            let p = &res.transition;
            write_json(
                &dir.join("transition.json"),
                &TransitionJson {
                    mode: res.spec.mode,
                    cutoff: res.spec.cutoff,
                    eta: res.params.eta(),
                    states: p.states().iter().map(ToString::to_string).collect(),
                    p: (0..p.dim()).map(|r| p.row(r).to_vec()).collect(),
                },
            )?;
            let tables: Vec<LifeTableJson> = res
                .tables
                .iter()
                .map(|t| LifeTableJson {
                    initial_state: t.initial_state.to_string(),
                    expectancy: t.expectancy,
                    survival: t.survival.clone(),
                    age_dist: t.age_dist.clone(),
                })
                .collect();
            write_json(&dir.join("lifetable.json"), &tables)?;
        }
    }
    write_json(&dir.join("spectrum.json"), &SpectrumJson::new(res))?;
    write_json(&dir.join("summary.json"), &SummaryJson::new(res))?;
    if plot {
        let title = format!("p(next|prev) {} N={}", res.spec.mode, res.spec.cutoff);
        write_file(&dir.join("heatmap.svg"), &heatmap_svg(&res.transition, &title))?;
    }
    Ok(dir)
}
