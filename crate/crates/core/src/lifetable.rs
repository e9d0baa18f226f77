//! Absorbing-chain analysis of a transition matrix.
//!
//! Dropping the rows and columns of the death states from `p(d|c)` leaves the
//! substochastic matrix `T` over alive states; whatever probability leaks
//! out of a column is the probability of dying on that step. Starting from
//! `v`, the being is alive at step `s` with probability `q(s) = ‖T^{s-1} v‖₁`
//! and lives `⟨s⟩ = Σ_s q(s) = ‖(I - T)^{-1} v‖₁` steps on average.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigen_decompose, solve_linear, ComplexMatrix, LinalgError};
use crate::par::Execution;
use crate::transition::{StateLabel, TransitionMatrix};

/// Survival curves stop once `q` drops below this.
pub const SURVIVAL_FLOOR: f64 = 1e-10;
pub const DEFAULT_HORIZON: usize = 10_000;
/// `⟨s⟩` is only finite when the spectral radius of `T` is below `1 - this`.
pub const SPECTRAL_MARGIN: f64 = 1e-9;
const NEGATIVE_CLIP: f64 = 1e-12;

/// Transition probabilities restricted to the alive states.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedChain {
    pub alive: Vec<StateLabel>,
    /// Real-valued, stored complex so it can go straight into `linalg`.
    pub matrix: ComplexMatrix,
}

impl ReducedChain {
    /// Point mass on the `i`-th alive state.
    pub fn point_mass(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.alive.len()];
        v[i] = 1.0;
        v
    }
}

pub fn reduce(p: &TransitionMatrix, death_states: &[StateLabel]) -> Result<ReducedChain> {
    if let Some(missing) = death_states.iter().find(|d| p.index_of(d).is_none()) {
        return Err(Error::InvalidStates(format!("death state {missing} is not in the state set")));
    }
    let keep: Vec<usize> = (0..p.dim())
        .filter(|&i| !death_states.contains(&p.states()[i]))
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyAlive);
    }
    let matrix = ComplexMatrix::from_fn(keep.len(), |r, c| C64::new(p.get(keep[r], keep[c]), 0.0))?;
    Ok(ReducedChain {
        alive: keep.iter().map(|&i| p.states()[i]).collect(),
        matrix,
    })
}

/// `q(s) = ‖T^{s-1} v‖₁` for `s = 1..=horizon`.
pub fn survival_curve(t: &ComplexMatrix, v: &[f64], horizon: usize) -> Vec<f64> {
    survival_until(t, v, horizon, 0.0)
}

/// Like [`survival_curve`] but stops after the first `q(s) < floor`.
pub fn survival_until(t: &ComplexMatrix, v: &[f64], horizon: usize, floor: f64) -> Vec<f64> {
    debug_assert!(v.iter().all(|&x| x >= 0.0), "initial vector must be non-negative");
    let mut q = Vec::with_capacity(horizon.min(4096));
    let mut state = v.to_vec();
    for _ in 0..horizon {
        let alive: f64 = state.iter().map(|x| x.abs()).sum();
        q.push(alive);
        if alive < floor {
            break;
        }
        state = t.mul_real_vec(&state);
    }
    q
}

/// `⟨s⟩ = ‖(I - T)^{-1} v‖₁`.
pub fn life_expectancy(t: &ComplexMatrix, v: &[f64]) -> Result<f64> {
    let radius = eigen_decompose(t)?.spectral_radius();
    if radius > 1.0 - SPECTRAL_MARGIN {
        return Err(Error::ImmortalChain {
            spectral_radius: radius,
        });
    }
    let n = t.dim();
    let i_minus_t = ComplexMatrix::from_fn(n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        C64::new(id, 0.0) - t[(r, c)]
    })?;
    let rhs: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
    let x = solve_linear(&i_minus_t, &rhs).map_err(|e| match e {
        LinalgError::SingularMatrix { .. } => Error::ImmortalChain {
            spectral_radius: radius,
        },
        other => other.into(),
    })?;
    Ok(x.iter().map(|z| if z.re < -NEGATIVE_CLIP { z.re.abs() } else { z.re.max(0.0) }).sum())
}

/// Survival curve, age distribution and life expectancy for one initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifeTable {
    pub initial_state: StateLabel,
    /// `q(1), q(2), …`
    pub survival: Vec<f64>,
    /// `p_age(s) = q(s) - q(s+1)`, same length as `survival`.
    pub age_dist: Vec<f64>,
    pub expectancy: f64,
}

impl LifeTable {
    /// Runs the chain until `horizon` steps or until `q` drops below
    /// [`SURVIVAL_FLOOR`], whichever comes first.
    pub fn compute(chain: &ReducedChain, initial: usize, horizon: usize) -> Result<Self> {
        let v = chain.point_mass(initial);
        let expectancy = life_expectancy(&chain.matrix, &v)?;
        let mut survival = Vec::new();
        let mut state = v;
        let mut alive: f64 = state.iter().sum();
        while survival.len() < horizon {
            survival.push(alive);
            state = chain.matrix.mul_real_vec(&state);
            let next: f64 = state.iter().map(|x| x.abs()).sum();
            if alive < SURVIVAL_FLOOR {
                alive = next;
                break;
            }
            alive = next;
        }
        // `alive` now holds q(len + 1)
        let age_dist = survival
            .iter()
            .zip(survival.iter().skip(1).chain(std::iter::once(&alive)))
            .map(|(a, b)| (a - b).max(0.0))
            .collect();
        Ok(Self {
            initial_state: chain.alive[initial],
            survival,
            age_dist,
            expectancy,
        })
    }
}

/// One life table per alive initial state, in state order.
pub fn life_tables(
    p: &TransitionMatrix,
    death_states: &[StateLabel],
    horizon: usize,
    exec: Execution,
) -> Result<Vec<LifeTable>> {
    let chain = reduce(p, death_states)?;
    let initial: Vec<usize> = (0..chain.alive.len()).collect();
    exec.try_map(&initial, |&i| LifeTable::compute(&chain, i, horizon))
}
