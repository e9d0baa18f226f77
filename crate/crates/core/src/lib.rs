//! Lattice scalar-field toy universe in the particle representation.
//!
//! The crate computes, for a being whose experiences are particle numbers on
//! successive lattice edges, the transition probabilities between
//! experiences and the resulting life expectancy, under three rules:
//! complex amplitudes ([`ModeKind::Quantum1`]), real amplitudes
//! ([`ModeKind::RealQuantum1`]) and complex amplitudes over macroscopic
//! superpositions of distant particle numbers.
//!
//! ```
//! use toyworld_core::prelude::*;
//!
//! let mode = ModeSpec::QUANTUM1;
//! let params = LatticeParams::new(mode, 0.1, 1).unwrap();
//! let u = half_line(mode, params.eta(), 5).unwrap();
//! let p = basis_transition_matrix(&u, mode, &params).unwrap();
//! let tables = life_tables(&p, &[StateLabel::Basis(1)], 1000, Execution::default()).unwrap();
//! assert!(tables.iter().all(|t| t.expectancy > 1.0));
//! ```

pub mod amplitudes;
pub mod checks;
pub mod error;
pub mod experiment;
pub mod halfline;
pub mod lifetable;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod transition;

pub use amplitudes::{LatticeParams, ModeKind, ModeSpec, Potential};
pub use error::{Error, Result};

pub mod prelude {
    pub use crate::amplitudes::{edge_amplitude, eta, vertex_amplitude, LatticeParams, ModeKind, ModeSpec, Potential};
    pub use crate::error::{Error, Result};
    pub use crate::halfline::{build_m, half_line, solve_u, HalfLineVector};
    pub use crate::lifetable::{life_expectancy, life_tables, reduce, survival_curve, LifeTable, ReducedChain};
    pub use crate::linalg::{eigen_decompose, solve_linear, ComplexMatrix, EigenResult, C64};
    pub use crate::par::Execution;
    pub use crate::transition::{
        basis_transition_matrix, superposition_transition_matrix, Sign, StateLabel, TransitionMatrix,
    };
}
