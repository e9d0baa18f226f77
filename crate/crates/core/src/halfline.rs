//! Half-line amplitude sums.
//!
//! `U_m` sums the amplitudes of every extended configuration on a
//! semi-infinite chain whose boundary vertex sees `m` more segments than its
//! single edge. Gluing one more edge and vertex onto the chain gives the
//! fixed-point relation `U_m = Σ_n U_n E_n V_{m+n}`, i.e. `u = M u` with
//! `M_ij = V_{2i+2j-4} E_{2j-2}` over the retained even levels. `M` has no
//! unit eigenvalue, so it is renormalized by its largest-modulus eigenvalue
//! and `u` is the corresponding eigenvector.
//!
//! Levels are 1-based: level `k` holds particle number `2k - 2`.

use num_complex::Complex64 as C64;

use crate::amplitudes::{edge_amplitude, vertex_amplitude, ModeSpec};
use crate::error::{Error, Result};
use crate::linalg::{eigen_decompose, ComplexMatrix};

/// Relative gap below which the two leading eigenvalues count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Particle number on level `k` (1-based).
pub fn particle_number(level: usize) -> u32 {
    assert!(level >= 1, "levels are 1-based");
    2 * (level as u32 - 1)
}

/// Level holding an even particle number.
pub fn level_of(particle_number: u32) -> Result<usize> {
    if particle_number % 2 != 0 {
        return Err(Error::OddOccupation(particle_number));
    }
    Ok(particle_number as usize / 2 + 1)
}

/// The dominant eigenvector of `M` together with the spectrum it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineVector {
    /// Entry `k - 1` is `U_{2k-2}`.
    pub u: Vec<C64>,
    /// The eigenvalue divided out of `M`.
    pub renorm_eigenvalue: C64,
    /// All eigenvalues of `M`, largest modulus first.
    pub full_spectrum: Vec<C64>,
}

impl HalfLineVector {
    pub fn cutoff(&self) -> usize {
        self.u.len()
    }

    /// `U` on level `k` (1-based).
    pub fn level(&self, k: usize) -> Result<C64> {
        if k == 0 || k > self.u.len() {
            return Err(Error::Range {
                level: k,
                cutoff: self.u.len(),
            });
        }
        Ok(self.u[k - 1])
    }

    /// `U_n` for an even particle number `n`.
    pub fn at(&self, particle_number: u32) -> Result<C64> {
        self.level(level_of(particle_number)?)
    }

    /// Same vector multiplied by `c`; the spectrum is unchanged.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            u: self.u.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }
}

/// `M_ij = V_{2i+2j-4} E_{2j-2}` for 1-based `i, j ≤ cutoff`.
pub fn build_m(mode: ModeSpec, eta: f64, cutoff: usize) -> Result<ComplexMatrix> {
    if cutoff < 2 {
        return Err(Error::InvalidCutoff { min: 2, got: cutoff });
    }
    let vertex: Vec<C64> = (0..2 * cutoff - 1)
        .map(|k| vertex_amplitude(mode, eta, 2 * k as u32))
        .collect::<std::result::Result<_, _>>()?;
    let edge: Vec<C64> = (0..cutoff).map(|j| edge_amplitude(mode, 2 * j as u32)).collect();
    // zero-based: M[i][j] = V_{2(i+j)} E_{2j}
    Ok(ComplexMatrix::from_fn(cutoff, |i, j| vertex[i + j] * edge[j])?)
}

/// Dominant eigenvector of `M`, which is the fixed point of `M / λ_max`.
pub fn solve_u(m: &ComplexMatrix) -> Result<HalfLineVector> {
    let eig = eigen_decompose(m)?;
    if eig.len() > 1 {
        let largest = eig.values[0].norm();
        let second = eig.values[1].norm();
        if largest - second < DEGENERACY_TOLERANCE * largest {
            return Err(Error::DegenerateDominant { largest, second });
        }
    }
    Ok(HalfLineVector {
        u: eig.vectors[0].clone(),
        renorm_eigenvalue: eig.values[0],
        full_spectrum: eig.values,
    })
}

/// `build_m` followed by `solve_u`.
pub fn half_line(mode: ModeSpec, eta: f64, cutoff: usize) -> Result<HalfLineVector> {
    solve_u(&build_m(mode, eta, cutoff)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use approx::assert_relative_eq;

    const Q: ModeSpec = ModeSpec::QUANTUM1;
    const R: ModeSpec = ModeSpec::REAL_QUANTUM1;

    #[test]
    fn level_indexing() {
        assert_eq!(particle_number(1), 0);
        assert_eq!(particle_number(4), 6);
        assert_eq!(level_of(6).unwrap(), 4);
        assert_eq!(level_of(3).unwrap_err(), Error::OddOccupation(3));
    }

    #[test]
    fn real_corner_entry() {
        let m = build_m(R, 1.1, 2).unwrap();
        assert_relative_eq!(m[(0, 0)].re, (std::f64::consts::PI / 1.1).sqrt(), max_relative = 1e-14);
        assert_eq!(m[(0, 0)].im, 0.0);
    }

    #[test]
    fn real_entries_positive() {
        for n in 2..=13 {
            let m = build_m(R, 1.1, n).unwrap();
            assert!(m.as_slice().iter().all(|z| z.im == 0.0 && z.re > 0.0), "N = {n}");
        }
    }

    #[test]
    fn cutoff_too_small() {
        assert_eq!(build_m(Q, -0.9, 1).unwrap_err(), Error::InvalidCutoff { min: 2, got: 1 });
    }

    #[test]
    fn domain_error_propagates() {
        assert!(matches!(build_m(R, -0.9, 3), Err(Error::Amplitude(_))));
    }

    #[test]
    fn diagonal_dominant() {
        let m = ComplexMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let h = solve_u(&m).unwrap();
        assert_relative_eq!(h.renorm_eigenvalue.re, 2.0, epsilon = 1e-14);
        assert_relative_eq!(h.u[0].re, 1.0, epsilon = 1e-14);
        assert!(h.u[1].norm() < 1e-14);
    }

    #[test]
    fn identity_is_degenerate() {
        let err = solve_u(&ComplexMatrix::identity(3)).unwrap_err();
        assert!(matches!(err, Error::DegenerateDominant { .. }));
    }

    #[test]
    fn fixed_point_holds() {
        for (mode, eta) in [(Q, -0.9), (R, 1.1)] {
            for n in [5, 9, 13] {
                let m = build_m(mode, eta, n).unwrap();
                let h = solve_u(&m).unwrap();
                let mu = m.mul_vec(&h.u);
                let diff: Vec<C64> = mu
                    .iter()
                    .zip(&h.u)
                    .map(|(a, b)| a / h.renorm_eigenvalue - b)
                    .collect();
                assert!(norm2(&diff) <= 1e-8, "{mode:?} N={n}: {}", norm2(&diff));
                assert_relative_eq!(norm2(&h.u), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn level_range() {
        let h = half_line(R, 1.1, 3).unwrap();
        assert!(h.level(3).is_ok());
        assert_eq!(h.level(4).unwrap_err(), Error::Range { level: 4, cutoff: 3 });
        assert!(h.level(0).is_err());
        assert_eq!(h.at(4).unwrap(), h.u[2]);
    }
}
