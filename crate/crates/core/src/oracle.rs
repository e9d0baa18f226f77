//! Brute-force routes to the quantities the analytic pipeline takes
//! shortcuts for. Nothing here calls into `halfline`, `transition` or the
//! eigen solver, so agreement between the two sides means something.
//!
//! * vertex integrals by composite Simpson quadrature (rotated contour for
//!   the oscillatory complex mode) instead of the Γ closed form;
//! * the dominant eigenvector by power iteration instead of QR;
//! * transition amplitudes by contracting a finite chain edge by edge
//!   instead of solving the fixed point;
//! * the real-mode partition function of a short open chain by integrating
//!   over field values directly instead of summing particle configurations.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::amplitudes::{edge_amplitude, vertex_amplitude, ModeKind, ModeSpec};
use crate::error::{Error, Result};
use crate::linalg::{norm2, normalize_phase, ComplexMatrix};
use crate::par::Execution;

/// Step-doubling pairs must agree to this relative accuracy.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Integrands are cut off where they fall below this.
const TAIL_BOUND: f64 = 1e-12;

/// Even lattice potential `V(φ)` for the real-mode field integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldPotential {
    Free,
    /// `λ φ⁴`
    Quartic(f64),
}

impl FieldPotential {
    fn eval(self, phi: f64) -> f64 {
        match self {
            FieldPotential::Free => 0.0,
            FieldPotential::Quartic(lambda) => lambda * phi.powi(4),
        }
    }
}

/// Composite Simpson rule with `steps` (rounded up to even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let steps = steps.max(2) + steps % 2;
    let h = (b - a) / steps as f64;
    let mut sum = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Upper limit `R` past the integrand's peak with `R^n e^{-a R²} < TAIL_BOUND`.
fn gaussian_tail_cutoff(a: f64, n: u32) -> f64 {
    let peak = (f64::from(n) / (2.0 * a)).sqrt();
    let mut r = peak.max(1.0);
    let log_bound = TAIL_BOUND.ln();
    while f64::from(n) * r.ln() - a * r * r > log_bound {
        r += 0.25;
    }
    r
}

/// `2 ∫_0^∞ r^n e^{-a r² - V(r)} dr` for `a > 0`, with a step-doubling check.
pub fn quad_gaussian_moment(a: f64, potential: FieldPotential, n: u32, steps: usize) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::ToleranceNotMet {
            check: format!("Gaussian moment needs a positive exponent, got {a}"),
            tolerance: 0.0,
            observed: a,
        });
    }
    let upper = gaussian_tail_cutoff(a, n);
    let integrand = |r: f64| 2.0 * r.powi(n as i32) * (-a * r * r - potential.eval(r)).exp();
    let fine = simpson(integrand, 0.0, upper, steps);
    let coarse = simpson(integrand, 0.0, upper, steps / 2);
    let gap = relative_gap(fine, coarse);
    if gap > QUADRATURE_TOLERANCE {
        return Err(Error::ToleranceNotMet {
            check: format!("Simpson step doubling for n = {n}"),
            tolerance: QUADRATURE_TOLERANCE,
            observed: gap,
        });
    }
    Ok(fine)
}

/// Vertex amplitude by quadrature.
///
/// Real mode integrates `2∫ r^n e^{-ηr²}` directly. The complex mode
/// rotates the contour to `r = e^{iσπ/4} s` with `σ = -sign(η)`, which turns
/// `e^{-iηr²}` into the decaying `e^{-|η|s²}` and leaves the Jacobian phase
/// `e^{iσπ(n+1)/4}` in front.
pub fn quad_vertex_amplitude(mode: ModeSpec, eta: f64, n: u32, steps: usize) -> Result<C64> {
    match mode.kind {
        ModeKind::RealQuantum1 => {
            if !(eta > 0.0) {
                return Err(crate::amplitudes::AmplitudeError::Domain { kind: mode.kind, eta }.into());
            }
            Ok(C64::new(quad_gaussian_moment(eta, FieldPotential::Free, n, steps)?, 0.0))
        }
        ModeKind::Quantum1 => {
            if eta == 0.0 {
                return Err(crate::amplitudes::AmplitudeError::Domain { kind: mode.kind, eta }.into());
            }
            let sigma = -eta.signum();
            let radial = quad_gaussian_moment(eta.abs(), FieldPotential::Free, n, steps)?;
            Ok(C64::from_polar(radial, sigma * PI * (f64::from(n) + 1.0) / 4.0))
        }
    }
}

/// Result of [`power_iteration_u`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerIteration {
    /// Unit vector, phase fixed like `linalg` eigenvectors.
    pub u: Vec<C64>,
    /// Rayleigh quotient `u^H M u`.
    pub eigenvalue: C64,
    pub iterations: usize,
}

/// Two seeds must land on the same vector to this accuracy.
pub const SEED_AGREEMENT: f64 = 1e-6;

fn iterate_from(m: &ComplexMatrix, seed: Vec<C64>, max_iter: usize, tol: f64) -> Result<(Vec<C64>, usize)> {
    let mut x = seed;
    normalize_phase(&mut x);
    for it in 1..=max_iter {
        let mut next = m.mul_vec(&x);
        if norm2(&next) == 0.0 {
            return Err(Error::NoConvergence { iterations: it });
        }
        normalize_phase(&mut next);
        let diff: Vec<C64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        x = next;
        if norm2(&diff) < tol {
            return Ok((x, it));
        }
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

/// Dominant eigenvector of `m` by power iteration from the uniform positive
/// seed. A second run from a ramp seed must agree, otherwise the dominant
/// eigenvalue is taken to be degenerate and [`Error::NoConvergence`] is
/// returned.
pub fn power_iteration_u(m: &ComplexMatrix, max_iter: usize, tol: f64) -> Result<PowerIteration> {
    let n = m.dim();
    let uniform = vec![C64::new(1.0, 0.0); n];
    let ramp: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64, 0.5 * i as f64)).collect();
    let (u, iterations) = iterate_from(m, uniform, max_iter, tol)?;
    let (check, _) = iterate_from(m, ramp, max_iter, tol)?;
    let gap: Vec<C64> = u.iter().zip(&check).map(|(a, b)| a - b).collect();
    if norm2(&gap) > SEED_AGREEMENT.max(10.0 * tol) {
        return Err(Error::NoConvergence { iterations: max_iter });
    }
    let mu = m.mul_vec(&u);
    let eigenvalue = u.iter().zip(&mu).map(|(a, b)| a.conj() * b).sum();
    Ok(PowerIteration { u, eigenvalue, iterations })
}

/// Half-line sums of a chain of `length` vertices hanging off an edge,
/// indexed by level (`k - 1` ↔ particle number `2k - 2`). The outermost
/// edge is free, so `length = 0` gives all ones.
pub fn finite_half_line(mode: ModeSpec, eta: f64, length: usize, cutoff: usize) -> Result<Vec<C64>> {
    let vertex: Vec<C64> = (0..2 * cutoff.max(1) - 1)
        .map(|k| vertex_amplitude(mode, eta, 2 * k as u32))
        .collect::<std::result::Result<_, _>>()?;
    let edge: Vec<C64> = (0..cutoff).map(|k| edge_amplitude(mode, 2 * k as u32)).collect();
    let mut h = vec![C64::new(1.0, 0.0); cutoff];
    for _ in 0..length {
        // the new vertex sees `a` segments on the inner edge and `b` outside
        h = (0..cutoff)
            .map(|a| (0..cutoff).map(|b| vertex[a + b] * edge[b] * h[b]).sum())
            .collect();
    }
    Ok(h)
}

/// Exact amplitude of `m` then `n` particles on two adjacent edges of a
/// chain with `length` further vertices on each side, occupations capped at
/// `2(cutoff - 1)`.
pub fn finite_chain_amplitude(mode: ModeSpec, eta: f64, length: usize, cutoff: usize, m: u32, n: u32) -> Result<C64> {
    let h = finite_half_line(mode, eta, length, cutoff)?;
    let level = |x: u32| -> Result<usize> {
        if x % 2 != 0 {
            return Err(Error::OddOccupation(x));
        }
        let k = x as usize / 2;
        if k >= cutoff {
            return Err(Error::Range { level: k + 1, cutoff });
        }
        Ok(k)
    };
    let (km, kn) = (level(m)?, level(n)?);
    Ok(h[kn] * edge_amplitude(mode, n) * vertex_amplitude(mode, eta, m + n)? * edge_amplitude(mode, m) * h[km])
}

/// Row-major `p(n|m)` from finite-chain amplitudes.
pub fn finite_chain_probabilities(mode: ModeSpec, eta: f64, length: usize, cutoff: usize) -> Result<Vec<f64>> {
    let mut p = vec![0.0; cutoff * cutoff];
    for col in 0..cutoff {
        for row in 0..cutoff {
            let a = finite_chain_amplitude(mode, eta, length, cutoff, 2 * col as u32, 2 * row as u32)?;
            p[row * cutoff + col] = a.norm_sqr();
        }
        let total: f64 = (0..cutoff).map(|r| p[r * cutoff + col]).sum();
        if !(total > 0.0) {
            return Err(Error::ZeroColumn { column: col });
        }
        for r in 0..cutoff {
            p[r * cutoff + col] /= total;
        }
    }
    Ok(p)
}

/// `Z = ∫ Πdφ exp(Σ_edges φ_x φ_{x+1} - Σ_x (η φ_x² + V(φ_x)))` for an open
/// chain of `n_vertices`, by Simpson quadrature on `[-field_cutoff,
/// field_cutoff]` per site, contracted site by site.
pub fn direct_field_z(
    eta: f64,
    potential: FieldPotential,
    n_vertices: usize,
    field_cutoff: f64,
    steps: usize,
    exec: Execution,
) -> Result<f64> {
    let fine = field_z_on_grid(eta, potential, n_vertices, field_cutoff, steps, exec);
    let coarse = field_z_on_grid(eta, potential, n_vertices, field_cutoff, steps / 2, exec);
    let gap = relative_gap(fine, coarse);
    if !fine.is_finite() || gap > QUADRATURE_TOLERANCE {
        return Err(Error::ToleranceNotMet {
            check: format!("field integral step doubling, {n_vertices} vertices"),
            tolerance: QUADRATURE_TOLERANCE,
            observed: gap,
        });
    }
    Ok(fine)
}

fn field_z_on_grid(
    eta: f64,
    potential: FieldPotential,
    n_vertices: usize,
    field_cutoff: f64,
    steps: usize,
    exec: Execution,
) -> f64 {
    assert!(n_vertices >= 1, "need at least one vertex");
    let steps = steps.max(2) + steps % 2;
    let h = 2.0 * field_cutoff / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| -field_cutoff + h * i as f64).collect();
    let simpson_weight: Vec<f64> = (0..=steps)
        .map(|i| {
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    // half of each site's own exponent sits on either side of an edge kernel
    let half_site: Vec<f64> = grid
        .iter()
        .map(|&phi| -0.5 * (eta * phi * phi + potential.eval(phi)))
        .collect();

    let mut a: Vec<f64> = (0..=steps).map(|i| simpson_weight[i] * half_site[i].exp()).collect();
    let indices: Vec<usize> = (0..=steps).collect();
    for _ in 1..n_vertices {
        a = exec.map(&indices, |&j| {
            let inner: f64 = (0..=steps)
                .map(|i| a[i] * (grid[i] * grid[j] + half_site[i] + half_site[j]).exp())
                .sum();
            simpson_weight[j] * inner
        });
    }
    a.iter().zip(&half_site).map(|(x, s)| x * s.exp()).sum()
}

/// Real-mode partition function of the same open chain as a sum over even
/// edge occupations, `Σ Π_e 1/n_e! Π_v V(n_v)`, raising the occupation cap
/// until the relative increment drops below `1e-8`.
pub fn particle_sum_z(eta: f64, potential: FieldPotential, n_vertices: usize, steps: usize) -> Result<f64> {
    assert!(n_vertices >= 1, "need at least one vertex");
    let real = ModeSpec::REAL_QUANTUM1;
    let vertex_weight = |n: u32| -> Result<f64> {
        match potential {
            FieldPotential::Free => Ok(vertex_amplitude(real, eta, n)?.re),
            FieldPotential::Quartic(_) => quad_gaussian_moment(eta, potential, n, steps),
        }
    };
    let contract = |max_pairs: usize| -> Result<f64> {
        let vertex: Vec<f64> = (0..=4 * max_pairs)
            .step_by(2)
            .map(|k| vertex_weight(k as u32))
            .collect::<Result<_>>()?;
        // vertex[k] = V(2k)
        if n_vertices == 1 {
            return Ok(vertex[0]);
        }
        let edge: Vec<f64> = (0..=max_pairs).map(|k| edge_amplitude(real, 2 * k as u32).re).collect();
        let mut w: Vec<f64> = (0..=max_pairs).map(|k| vertex[k] * edge[k]).collect();
        for _ in 2..n_vertices {
            w = (0..=max_pairs)
                .map(|out| (0..=max_pairs).map(|inn| w[inn] * vertex[inn + out]).sum::<f64>() * edge[out])
                .collect();
        }
        Ok((0..=max_pairs).map(|k| w[k] * vertex[k]).sum())
    };
    let mut pairs = 8;
    let mut previous = contract(pairs)?;
    loop {
        pairs *= 2;
        let current = contract(pairs)?;
        if relative_gap(current, previous) < 1e-8 {
            return Ok(current);
        }
        if pairs > 512 {
            return Err(Error::ToleranceNotMet {
                check: "particle sum occupation cutoff".into(),
                tolerance: 1e-8,
                observed: relative_gap(current, previous),
            });
        }
        previous = current;
    }
}
