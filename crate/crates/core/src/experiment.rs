//! One experiment = one mode of experience at one cutoff: the half-line
//! vector, the transition matrix over the mode's condition set and a life
//! table per alive initial state. [`compare_modes`] lines the three modes up
//! at a common cutoff.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amplitudes::{LatticeParams, ModeSpec};
use crate::error::{Error, Result};
use crate::halfline::{half_line, HalfLineVector};
use crate::lifetable::{life_tables, LifeTable, DEFAULT_HORIZON};
use crate::par::Execution;
use crate::transition::{
    basis_transition_matrix, extended_cutoff, superposition_death_states, superposition_transition_matrix,
    StateLabel, TransitionMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentMode {
    #[serde(rename = "quantum1")]
    Quantum1,
    #[serde(rename = "realquantum1")]
    RealQuantum1,
    /// Complex amplitudes over macroscopic superpositions.
    #[serde(rename = "quantum1-sp")]
    Quantum1Sp,
}

impl ExperimentMode {
    pub const ALL: [ExperimentMode; 3] = [
        ExperimentMode::Quantum1,
        ExperimentMode::RealQuantum1,
        ExperimentMode::Quantum1Sp,
    ];

    pub fn spec(self) -> ModeSpec {
        match self {
            ExperimentMode::Quantum1 | ExperimentMode::Quantum1Sp => ModeSpec::QUANTUM1,
            ExperimentMode::RealQuantum1 => ModeSpec::REAL_QUANTUM1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentMode::Quantum1 => "quantum1",
            ExperimentMode::RealQuantum1 => "realquantum1",
            ExperimentMode::Quantum1Sp => "quantum1-sp",
        }
    }
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "quantum1" => Ok(ExperimentMode::Quantum1),
            "realquantum1" => Ok(ExperimentMode::RealQuantum1),
            "quantum1-sp" => Ok(ExperimentMode::Quantum1Sp),
            other => Err(format!("unknown mode '{other}' (expected quantum1, realquantum1 or quantum1-sp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub mode: ExperimentMode,
    pub cutoff: usize,
    pub half_bare_mass_sq: f64,
    pub dimension: u32,
    pub horizon: usize,
    /// Death level for the basis modes (1 = vacuum). The superposition mode
    /// always uses its uncovered levels.
    pub death_level: usize,
}

impl ExperimentSpec {
    pub fn new(mode: ExperimentMode, cutoff: usize) -> Self {
        Self {
            mode,
            cutoff,
            half_bare_mass_sq: 0.1,
            dimension: 1,
            horizon: DEFAULT_HORIZON,
            death_level: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub params: LatticeParams,
    pub half_line: HalfLineVector,
    pub transition: TransitionMatrix,
    pub death_states: Vec<StateLabel>,
    pub tables: Vec<LifeTable>,
}

impl ExperimentResult {
    pub fn mean_expectancy(&self) -> f64 {
        mean(self.tables.iter().map(|t| t.expectancy))
    }

    pub fn expectancy_of(&self, state: &StateLabel) -> Option<f64> {
        self.tables.iter().find(|t| &t.initial_state == state).map(|t| t.expectancy)
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<ExperimentResult> {
    let mode = spec.mode.spec();
    let params = LatticeParams::new(mode, spec.half_bare_mass_sq, spec.dimension)?;
    let (half_line, transition, death_states) = match spec.mode {
        ExperimentMode::Quantum1 | ExperimentMode::RealQuantum1 => {
            if spec.death_level == 0 || spec.death_level > spec.cutoff {
                return Err(Error::InvalidStates(format!(
                    "death level {} outside 1..={}",
                    spec.death_level, spec.cutoff
                )));
            }
            let u = half_line(mode, params.eta(), spec.cutoff)?;
            let p = basis_transition_matrix(&u, mode, &params)?;
            (u, p, vec![StateLabel::Basis(spec.death_level)])
        }
        ExperimentMode::Quantum1Sp => {
            let u = half_line(mode, params.eta(), extended_cutoff(spec.cutoff.max(2)))?;
            let p = superposition_transition_matrix(&u, mode, &params, spec.cutoff)?;
            (u, p, superposition_death_states(spec.cutoff))
        }
    };
    let tables = life_tables(&transition, &death_states, spec.horizon, exec)?;
    Ok(ExperimentResult {
        spec: *spec,
        params,
        half_line,
        transition,
        death_states,
        tables,
    })
}

/// Mean life expectancies of the three modes over matched initial states.
///
/// Matched states are levels `2..N-1`: basis level `k` for the basis modes,
/// both superpositions `k ± (k + N - 1)` for the superposition mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeComparison {
    pub cutoff: usize,
    pub quantum: f64,
    pub real: f64,
    pub superposition: f64,
}

impl ModeComparison {
    pub fn margin_over_real(&self) -> f64 {
        (self.quantum - self.real) / self.quantum
    }

    pub fn margin_over_superposition(&self) -> f64 {
        (self.quantum - self.superposition) / self.quantum
    }

    /// Complex amplitudes outlive real amplitudes.
    pub fn quantum_outlives_real(&self) -> bool {
        self.quantum > self.real
    }

    /// Complex amplitudes without superposition outlive those with it, by a
    /// smaller margin than over real amplitudes.
    pub fn quantum_outlives_superposition(&self) -> bool {
        self.quantum > self.superposition && self.margin_over_superposition() < self.margin_over_real()
    }
}

pub fn compare_modes(
    quantum: &ExperimentResult,
    real: &ExperimentResult,
    superposition: &ExperimentResult,
) -> Result<ModeComparison> {
    let n = quantum.spec.cutoff;
    if real.spec.cutoff != n || superposition.spec.cutoff != n {
        return Err(Error::InvalidStates("experiments use different cutoffs".into()));
    }
    let matched: Vec<usize> = (2..n).collect();
    let basis_mean = |r: &ExperimentResult| -> Result<f64> {
        let values = matched
            .iter()
            .map(|&k| {
                r.expectancy_of(&StateLabel::Basis(k))
                    .ok_or_else(|| Error::InvalidStates(format!("no life table for level {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(mean(values.into_iter()))
    };
    let sp_mean = mean(
        superposition
            .tables
            .iter()
            .filter(|t| matches!(t.initial_state, StateLabel::Superposed { low, .. } if matched.contains(&low)))
            .map(|t| t.expectancy),
    );
    Ok(ModeComparison {
        cutoff: n,
        quantum: basis_mean(quantum)?,
        real: basis_mean(real)?,
        superposition: sp_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_names_round_trip() {
        for m in ExperimentMode::ALL {
            assert_eq!(m.name().parse::<ExperimentMode>().unwrap(), m);
        }
        assert!("quantum2".parse::<ExperimentMode>().is_err());
    }

    #[test]
    fn bad_death_level() {
        let mut spec = ExperimentSpec::new(ExperimentMode::Quantum1, 5);
        spec.death_level = 6;
        assert!(matches!(
            run_experiment(&spec, Execution::Sequential),
            Err(Error::InvalidStates(_))
        ));
    }

    #[test]
    fn superposition_shape() {
        let spec = ExperimentSpec::new(ExperimentMode::Quantum1Sp, 5);
        let res = run_experiment(&spec, Execution::Sequential).unwrap();
        assert_eq!(res.half_line.cutoff(), 8);
        assert_eq!(res.transition.dim(), 2 * 3 + 2);
        assert_eq!(res.tables.len(), 2 * 3);
    }
}
