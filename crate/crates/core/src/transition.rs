//! Transition probabilities between sequential candidate experiences.
//!
//! The amplitude for seeing `n` particles on an edge right after `m` on the
//! adjacent edge is `A(n|m) = U_n E_n V_{m+n} E_m U_m`, and
//! `p(n|m) = |A(n|m)|² / Σ_n' |A(n'|m)|²` over the mode's condition set.
//! Matrices are column-stochastic: column = previous state, row = next state.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{edge_amplitude, vertex_amplitude, LatticeParams, ModeSpec};
use crate::error::{Error, Result};
use crate::halfline::{level_of, particle_number, HalfLineVector};

/// Column sums must match 1 to this accuracy.
pub const COLUMN_SUM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A condition on one edge: a definite level, or the equal-weight
/// superposition `(δ_low ± δ_high)/√2` of two levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateLabel {
    Basis(usize),
    Superposed { low: usize, high: usize, sign: Sign },
}

impl StateLabel {
    pub fn superposed(low: usize, high: usize, sign: Sign) -> Result<Self> {
        if low == 0 || low >= high {
            return Err(Error::InvalidStates(format!(
                "superposition needs 1 <= low < high, got {low}, {high}"
            )));
        }
        Ok(StateLabel::Superposed { low, high, sign })
    }

    /// `(level, coefficient)` pairs.
    pub fn components(&self) -> Vec<(usize, f64)> {
        match *self {
            StateLabel::Basis(k) => vec![(k, 1.0)],
            StateLabel::Superposed { low, high, sign } => {
                vec![(low, FRAC_1_SQRT_2), (high, sign.value() * FRAC_1_SQRT_2)]
            }
        }
    }

    pub fn max_level(&self) -> usize {
        match *self {
            StateLabel::Basis(k) => k,
            StateLabel::Superposed { high, .. } => high,
        }
    }
}

/// `n=<particles>` for basis states, `<low>+<high>` / `<low>-<high>` (levels)
/// for superpositions.
impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StateLabel::Basis(k) => write!(f, "n={}", particle_number(k)),
            StateLabel::Superposed { low, high, sign } => {
                let s = if sign == Sign::Plus { '+' } else { '-' };
                write!(f, "{low}{s}{high}")
            }
        }
    }
}

/// Column-stochastic matrix `p[next][prev]` over a labelled state set.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    states: Vec<StateLabel>,
    p: Vec<f64>,
    pub mode: Option<ModeSpec>,
    pub params: Option<LatticeParams>,
}

impl TransitionMatrix {
    /// Wraps row-major probabilities after checking stochasticity.
    pub fn new(states: Vec<StateLabel>, p: Vec<f64>) -> Result<Self> {
        let m = Self {
            states,
            p,
            mode: None,
            params: None,
        };
        m.validate()?;
        Ok(m)
    }

    fn with_model(mut self, mode: ModeSpec, params: LatticeParams) -> Self {
        self.mode = Some(mode);
        self.params = Some(params);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if n == 0 {
            return Err(Error::InvalidStates("empty state set".into()));
        }
        if self.p.len() != n * n {
            return Err(Error::InvalidStates(format!(
                "{} states but {} probabilities",
                n,
                self.p.len()
            )));
        }
        for (i, a) in self.states.iter().enumerate() {
            if self.states[..i].contains(a) {
                return Err(Error::InvalidStates(format!("duplicate state {a}")));
            }
        }
        if let Some(bad) = self.p.iter().position(|&x| !(x.is_finite() && (0.0..=1.0).contains(&x))) {
            return Err(Error::InvalidDistribution(format!(
                "entry ({}, {}) = {} is not a probability",
                bad / n,
                bad % n,
                self.p[bad]
            )));
        }
        for (col, sum) in self.column_sums().into_iter().enumerate() {
            if (sum - 1.0).abs() > COLUMN_SUM_TOLERANCE {
                return Err(Error::InvalidDistribution(format!("column {col} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateLabel] {
        &self.states
    }

    /// `p(next | prev)` by positions in [`states`](Self::states).
    pub fn get(&self, next: usize, prev: usize) -> f64 {
        self.p[next * self.dim() + prev]
    }

    pub fn column(&self, prev: usize) -> Vec<f64> {
        (0..self.dim()).map(|r| self.get(r, prev)).collect()
    }

    pub fn row(&self, next: usize) -> &[f64] {
        let n = self.dim();
        &self.p[next * n..(next + 1) * n]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|c| self.column(c).iter().sum()).collect()
    }

    pub fn index_of(&self, state: &StateLabel) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    /// Row index of the largest entry in each column (first on ties).
    pub fn column_argmax(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|c| {
                let col = self.column(c);
                let mut best = 0;
                for (r, &x) in col.iter().enumerate() {
                    if x > col[best] {
                        best = r;
                    }
                }
                best
            })
            .collect()
    }
}

/// `A(n|m) = U_n E_n V_{m+n} E_m U_m` for even particle numbers `m`, `n`.
pub fn basis_amplitude(u: &HalfLineVector, mode: ModeSpec, eta: f64, m: u32, n: u32) -> Result<C64> {
    debug_assert!(m % 2 == 0 && n % 2 == 0, "odd occupation reached the pipeline");
    let um = u.level(level_of(m)?)?;
    let un = u.level(level_of(n)?)?;
    let v = vertex_amplitude(mode, eta, m + n)?;
    Ok(un * edge_amplitude(mode, n) * v * edge_amplitude(mode, m) * um)
}

/// Amplitude between two (possibly superposed) conditions, expanded
/// bilinearly over their components.
pub fn state_amplitude(
    u: &HalfLineVector,
    mode: ModeSpec,
    eta: f64,
    next: &StateLabel,
    prev: &StateLabel,
) -> Result<C64> {
    let mut total = C64::new(0.0, 0.0);
    for (a, ca) in prev.components() {
        for (b, cb) in next.components() {
            total += ca * cb * basis_amplitude(u, mode, eta, particle_number(a), particle_number(b))?;
        }
    }
    Ok(total)
}

fn normalize_columns(states: Vec<StateLabel>, weights: Vec<f64>) -> Result<TransitionMatrix> {
    let n = states.len();
    let mut p = weights;
    for col in 0..n {
        let sum: f64 = (0..n).map(|r| p[r * n + col]).sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::ZeroColumn { column: col });
        }
        for r in 0..n {
            p[r * n + col] /= sum;
        }
    }
    TransitionMatrix::new(states, p)
}

/// `p(n|m) ∝ |U_n E_n V_{m+n}|²` over every level of `u`.
pub fn basis_transition_matrix(u: &HalfLineVector, mode: ModeSpec, params: &LatticeParams) -> Result<TransitionMatrix> {
    let n = u.cutoff();
    let eta = params.eta();
    let mut weights = vec![0.0; n * n];
    for prev in 0..n {
        let m = 2 * prev as u32;
        for next in 0..n {
            let k = 2 * next as u32;
            let a = u.u[next] * edge_amplitude(mode, k) * vertex_amplitude(mode, eta, m + k)?;
            weights[next * n + prev] = a.norm_sqr();
        }
    }
    let states = (1..=n).map(StateLabel::Basis).collect();
    Ok(normalize_columns(states, weights)?.with_model(mode, *params))
}

/// Condition set of the macroscopic-superposition mode with cutoff `n`:
/// the vacuum, the pairs `(k ± (k + n - 1))` for `k = 2..n-1`, and level `n`.
///
/// Together these span levels `1..=2n-2`, so they form a complete
/// orthonormal set at the extended cutoff.
pub fn superposition_states(n: usize) -> Result<Vec<StateLabel>> {
    if n < 3 {
        return Err(Error::InvalidCutoff { min: 3, got: n });
    }
    let mut states = vec![StateLabel::Basis(1)];
    for low in 2..n {
        for sign in [Sign::Plus, Sign::Minus] {
            states.push(StateLabel::superposed(low, low + n - 1, sign)?);
        }
    }
    states.push(StateLabel::Basis(n));
    Ok(states)
}

/// Levels not covered by any superposition pair; reaching one ends the
/// being's superposed experience.
pub fn superposition_death_states(n: usize) -> Vec<StateLabel> {
    vec![StateLabel::Basis(1), StateLabel::Basis(n)]
}

/// Extended cutoff needed by [`superposition_transition_matrix`].
pub fn extended_cutoff(n: usize) -> usize {
    2 * n - 2
}

/// Transition matrix of the macroscopic-superposition mode. `u_ext` must
/// cover levels up to `2n - 2`.
pub fn superposition_transition_matrix(
    u_ext: &HalfLineVector,
    mode: ModeSpec,
    params: &LatticeParams,
    n: usize,
) -> Result<TransitionMatrix> {
    let states = superposition_states(n)?;
    let needed = extended_cutoff(n);
    if u_ext.cutoff() < needed {
        return Err(Error::Range {
            level: needed,
            cutoff: u_ext.cutoff(),
        });
    }
    let eta = params.eta();
    let dim = states.len();
    let mut weights = vec![0.0; dim * dim];
    for (c, prev) in states.iter().enumerate() {
        for (r, next) in states.iter().enumerate() {
            weights[r * dim + c] = state_amplitude(u_ext, mode, eta, next, prev)?.norm_sqr();
        }
    }
    Ok(normalize_columns(states, weights)?.with_model(mode, *params))
}

/// `p(d|c) = δ(d, perm[c])` over `perm.len()` basis states.
pub fn deterministic_mode_matrix(perm: &[usize]) -> Result<TransitionMatrix> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &target in perm {
        if target >= n || seen[target] {
            return Err(Error::InvalidStates(format!("{perm:?} is not a permutation")));
        }
        seen[target] = true;
    }
    let mut p = vec![0.0; n * n];
    for (c, &r) in perm.iter().enumerate() {
        p[r * n + c] = 1.0;
    }
    TransitionMatrix::new((1..=n).map(StateLabel::Basis).collect(), p)
}

/// `p(d|c) = p(d)`: every column equals `dist`.
pub fn ephemeral_mode_matrix(dist: &[f64]) -> Result<TransitionMatrix> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if dist.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("{dist:?} has negative entries")));
    }
    let sum: f64 = dist.iter().sum();
    if (sum - 1.0).abs() > COLUMN_SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("sums to {sum}")));
    }
    let mut p = vec![0.0; n * n];
    for (r, &x) in dist.iter().enumerate() {
        for c in 0..n {
            p[r * n + c] = x;
        }
    }
    TransitionMatrix::new((1..=n).map(StateLabel::Basis).collect(), p)
}
