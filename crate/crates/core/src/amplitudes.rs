//! Edge and vertex weights of the particle (worldline) representation of a
//! free real scalar field on a one-dimensional lattice.
//!
//! Expanding the kinetic coupling `exp(c φ_x φ_y)` edge by edge turns the
//! field integral into a sum over integer edge occupations. Each edge with
//! `n` segments contributes `E(n)`; each vertex crossed by `n` segments
//! contributes `V(n) = 2 ∫_0^∞ r^n e^{-iηr²} dr` (or the real exponent
//! analogue), which for the free theory is a Γ function at a half integer.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which amplitude rule governs the toy universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeKind {
    /// Complex amplitudes from `e^{iS}`.
    Quantum1,
    /// Real amplitudes from `e^{-S}`.
    RealQuantum1,
}

/// Lattice potential. Only the free theory is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Potential {
    #[default]
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeSpec {
    pub kind: ModeKind,
    pub potential: Potential,
}

impl ModeSpec {
    pub const QUANTUM1: ModeSpec = ModeSpec {
        kind: ModeKind::Quantum1,
        potential: Potential::Free,
    };
    pub const REAL_QUANTUM1: ModeSpec = ModeSpec {
        kind: ModeKind::RealQuantum1,
        potential: Potential::Free,
    };

    pub fn is_complex(&self) -> bool {
        self.kind == ModeKind::Quantum1
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmplitudeError {
    #[error("vertex integral diverges for {kind:?} with eta = {eta}")]
    Domain { kind: ModeKind, eta: f64 },
    #[error("invalid lattice parameters: {0}")]
    Parameters(String),
}

/// Bare lattice inputs together with the derived renormalized mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    /// `a² m² / 2`, dimensionless.
    pub half_bare_mass_sq: f64,
    pub dimension: u32,
    eta: f64,
}

impl LatticeParams {
    pub fn new(mode: ModeSpec, half_bare_mass_sq: f64, dimension: u32) -> Result<Self, AmplitudeError> {
        if !(half_bare_mass_sq.is_finite() && half_bare_mass_sq >= 0.0) {
            return Err(AmplitudeError::Parameters(format!(
                "a^2 m^2 / 2 must be finite and non-negative, got {half_bare_mass_sq}"
            )));
        }
        if dimension == 0 {
            return Err(AmplitudeError::Parameters("dimension must be positive".into()));
        }
        Ok(Self {
            half_bare_mass_sq,
            dimension,
            eta: eta(mode, half_bare_mass_sq, dimension),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Renormalized mass parameter: `a²m²/2 + D - 2` for the complex mode,
/// `a²m²/2 + D` for the real mode.
pub fn eta(mode: ModeSpec, half_bare_mass_sq: f64, dimension: u32) -> f64 {
    let d = f64::from(dimension);
    match mode.kind {
        // integer part first so 0.1 + 1 - 2 comes out as exactly -0.9
        ModeKind::Quantum1 => half_bare_mass_sq + (d - 2.0),
        ModeKind::RealQuantum1 => half_bare_mass_sq + d,
    }
}

/// Factorials above this are handled in log space.
const LOG_SPACE_ABOVE: u32 = 150;

/// `ln n!`
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// `Γ(k/2)` for positive integer `k`, by exact recurrence from `Γ(1/2) = √π`
/// and `Γ(1) = 1`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "Γ(0) is undefined");
    let (mut value, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = f64::from(k) / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// `ln Γ(k/2)` by the same recurrence, summed in log space.
pub fn ln_gamma_half(k: u32) -> f64 {
    assert!(k > 0, "Γ(0) is undefined");
    let (mut value, mut x) = if k % 2 == 0 { (0.0, 1.0) } else { (0.5 * PI.ln(), 0.5) };
    let target = f64::from(k) / 2.0;
    while x < target {
        value += f64::ln(x);
        x += 1.0;
    }
    value
}

/// `e^{iπ q/4}` with `q` reduced exactly modulo 8.
fn eighth_root_of_unity(q: i64) -> C64 {
    let r = q.rem_euclid(8);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match r {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(s, s),
        2 => C64::new(0.0, 1.0),
        3 => C64::new(-s, s),
        4 => C64::new(-1.0, 0.0),
        5 => C64::new(-s, -s),
        6 => C64::new(0.0, -1.0),
        _ => C64::new(s, -s),
    }
}

/// Weight of an edge carried by `n` particle segments: `(-i)^n / n!` or `1/n!`.
pub fn edge_amplitude(mode: ModeSpec, n: u32) -> C64 {
    let magnitude = if n > LOG_SPACE_ABOVE {
        (-ln_factorial(n)).exp()
    } else {
        1.0 / (2..=n).map(f64::from).product::<f64>()
    };
    match mode.kind {
        // (-i)^n = e^{-iπ n/2}
        ModeKind::Quantum1 => eighth_root_of_unity(-2 * i64::from(n)) * magnitude,
        ModeKind::RealQuantum1 => C64::new(magnitude, 0.0),
    }
}

/// Weight of a vertex crossed by `n` segments in the free theory.
///
/// Complex mode: `(iη)^{-(1+n)/2} Γ((1+n)/2)` on the principal branch.
/// Real mode: `η^{-(1+n)/2} Γ((1+n)/2)`, which needs `η > 0`.
pub fn vertex_amplitude(mode: ModeSpec, eta: f64, n: u32) -> Result<C64, AmplitudeError> {
    let valid = match mode.kind {
        ModeKind::Quantum1 => eta != 0.0 && eta.is_finite(),
        ModeKind::RealQuantum1 => eta > 0.0 && eta.is_finite(),
    };
    if !valid {
        return Err(AmplitudeError::Domain { kind: mode.kind, eta });
    }
    let exponent = (1.0 + f64::from(n)) / 2.0;
    let magnitude = if n > LOG_SPACE_ABOVE {
        (ln_gamma_half(n + 1) - exponent * eta.abs().ln()).exp()
    } else {
        gamma_half(n + 1) * eta.abs().powf(-exponent)
    };
    match mode.kind {
        ModeKind::RealQuantum1 => Ok(C64::new(magnitude, 0.0)),
        ModeKind::Quantum1 => {
            // arg(iη) = ±π/2, so the phase is e^{∓iπ(1+n)/4}.
            let quarter_turns = i64::from(n) + 1;
            let phase = if eta > 0.0 {
                eighth_root_of_unity(-quarter_turns)
            } else {
                eighth_root_of_unity(quarter_turns)
            };
            Ok(phase * magnitude)
        }
    }
}

/// Phase angle of the complex-mode vertex amplitude, for reference.
pub fn vertex_phase(eta: f64, n: u32) -> f64 {
    let turns = (f64::from(n) + 1.0) * FRAC_PI_4;
    if eta > 0.0 {
        -turns
    } else {
        turns
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const Q: ModeSpec = ModeSpec::QUANTUM1;
    const R: ModeSpec = ModeSpec::REAL_QUANTUM1;

    #[test]
    fn eta_values() {
        assert_eq!(eta(Q, 0.1, 1), -0.9);
        assert_eq!(eta(R, 0.1, 1), 1.1);
        assert_eq!(eta(Q, 0.0, 2), 0.0);
        let p = LatticeParams::new(Q, 0.1, 1).unwrap();
        assert_eq!(p.eta(), eta(Q, 0.1, 1));
    }

    #[test]
    fn lattice_params_validation() {
        assert!(LatticeParams::new(Q, -0.1, 1).is_err());
        assert!(LatticeParams::new(Q, 0.1, 0).is_err());
        assert!(LatticeParams::new(Q, f64::NAN, 1).is_err());
    }

    #[test]
    fn edge_values() {
        assert_eq!(edge_amplitude(Q, 0), C64::new(1.0, 0.0));
        assert_relative_eq!(edge_amplitude(Q, 2).re, -0.5);
        assert_relative_eq!(edge_amplitude(Q, 2).im, 0.0);
        assert_relative_eq!(edge_amplitude(Q, 1).im, -1.0);
        assert_relative_eq!(edge_amplitude(R, 3).re, 1.0 / 6.0);
    }

    #[test]
    fn edge_large_n_is_log_space() {
        let e = edge_amplitude(R, 170);
        assert!(e.re > 0.0 && e.re < 1e-300);
        assert_eq!(edge_amplitude(R, 400).re, 0.0);
        assert_relative_eq!(
            edge_amplitude(R, 151).re,
            edge_amplitude(R, 150).re / 151.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gamma_half_integers() {
        assert_relative_eq!(gamma_half(1), PI.sqrt());
        assert_relative_eq!(gamma_half(2), 1.0);
        assert_relative_eq!(gamma_half(3), PI.sqrt() / 2.0);
        assert_relative_eq!(gamma_half(5), 0.75 * PI.sqrt());
        assert_relative_eq!(gamma_half(10), 24.0);
        assert_relative_eq!(ln_gamma_half(41), gamma_half(41).ln(), max_relative = 1e-13);
    }

    #[test]
    fn vertex_real_values() {
        let v0 = vertex_amplitude(R, 1.1, 0).unwrap();
        assert_relative_eq!(v0.re, (PI / 1.1).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(v0.re, 1.6899684380, epsilon = 1e-9);
        let v2 = vertex_amplitude(R, 1.1, 2).unwrap();
        assert_relative_eq!(v2.re, 0.5 * PI.sqrt() * 1.1f64.powf(-1.5), max_relative = 1e-14);
    }

    #[test]
    fn vertex_quantum_principal_branch() {
        // (-0.9 i)^{-1/2} with arg(-0.9 i) = -π/2 gives phase +π/4.
        let v = vertex_amplitude(Q, -0.9, 0).unwrap();
        let expected = C64::new(0.0, -0.9).powf(-0.5) * PI.sqrt();
        assert_relative_eq!(v.re, expected.re, max_relative = 1e-13);
        assert_relative_eq!(v.im, expected.im, max_relative = 1e-13);
        for n in [0u32, 2, 4, 7, 12, 30] {
            for eta in [-0.9, 0.7] {
                let v = vertex_amplitude(Q, eta, n).unwrap();
                let z = C64::new(0.0, eta).powf(-(1.0 + n as f64) / 2.0) * gamma_half(n + 1);
                assert_relative_eq!(v.re, z.re, epsilon = 1e-12 * z.norm());
                assert_relative_eq!(v.im, z.im, epsilon = 1e-12 * z.norm());
                assert_relative_eq!(v.arg(), C64::from_polar(1.0, vertex_phase(eta, n)).arg(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn vertex_domain_errors() {
        assert!(matches!(
            vertex_amplitude(R, 0.0, 0),
            Err(AmplitudeError::Domain { kind: ModeKind::RealQuantum1, .. })
        ));
        assert!(vertex_amplitude(R, -1.0, 2).is_err());
        assert!(vertex_amplitude(Q, 0.0, 2).is_err());
        assert!(vertex_amplitude(Q, -0.9, 2).is_ok());
    }

    #[test]
    fn vertex_large_n_is_finite() {
        let v = vertex_amplitude(R, 1.1, 200).unwrap();
        assert!(v.re.is_finite() && v.re > 0.0);
        let a = vertex_amplitude(R, 1.1, 151).unwrap().re;
        let b = vertex_amplitude(R, 1.1, 149).unwrap().re;
        // Γ(x+1) = x Γ(x) with x = 75
        assert_relative_eq!(a / b, 75.0 / 1.1, max_relative = 1e-10);
    }
}
