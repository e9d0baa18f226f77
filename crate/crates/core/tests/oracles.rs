//! Closed forms and fixed points against their brute-force counterparts.

use approx::assert_relative_eq;
use toyworld_core::amplitudes::{edge_amplitude, vertex_amplitude, LatticeParams, ModeSpec};
use toyworld_core::checks::{eigenvector_check, field_ratio_check, finite_chain_check, reference_modes, vertex_check};
use toyworld_core::halfline::{build_m, half_line};
use toyworld_core::oracle::{direct_field_z, finite_chain_amplitude, power_iteration_u, FieldPotential};
use toyworld_core::par::Execution;
use toyworld_core::Error;

const Q: ModeSpec = ModeSpec::QUANTUM1;
const R: ModeSpec = ModeSpec::REAL_QUANTUM1;

#[test]
fn vertex_quadrature_both_modes() {
    for (mode, eta) in reference_modes() {
        assert!(vertex_check(mode, eta, 24, 0.0, Execution::default()).unwrap() < 1e-6);
    }
}

#[test]
fn eigenvector_agrees_with_power_iteration() {
    for (mode, eta) in reference_modes() {
        for n in [5, 9, 13] {
            assert!(eigenvector_check(mode, eta, n).unwrap() < 1e-6, "{mode:?} N={n}");
        }
    }
}

#[test]
fn power_iteration_refuses_degenerate_matrices() {
    let m = toyworld_core::linalg::ComplexMatrix::identity(3);
    assert!(matches!(power_iteration_u(&m, 200, 1e-12), Err(Error::NoConvergence { .. })));
}

#[test]
fn finite_chain_converges_to_fixed_point() {
    let params = LatticeParams::new(R, 0.1, 1).unwrap();
    let coarse = finite_chain_check(R, &params, 3, 2).unwrap();
    let fine = finite_chain_check(R, &params, 3, 30).unwrap();
    assert!(fine < 1e-3);
    assert!(fine <= coarse);
}

#[test]
fn empty_finite_chain_is_a_single_vertex() {
    for mode in [Q, R] {
        let eta = if mode == Q { -0.9 } else { 1.1 };
        let got = finite_chain_amplitude(mode, eta, 0, 4, 2, 4).unwrap();
        let want = edge_amplitude(mode, 4) * vertex_amplitude(mode, eta, 6).unwrap() * edge_amplitude(mode, 2);
        assert_relative_eq!((got - want).norm(), 0.0, epsilon = 1e-14 * want.norm());
    }
}

#[test]
fn finite_chain_ratio_approaches_eigenvalue_squared() {
    // one more vertex on each side multiplies the amplitude by λ_max twice
    let eta = 1.1;
    let lambda = half_line(R, eta, 4).unwrap().renorm_eigenvalue;
    let ratio = |l: usize| {
        finite_chain_amplitude(R, eta, l + 1, 4, 0, 0).unwrap() / finite_chain_amplitude(R, eta, l, 4, 0, 0).unwrap()
    };
    let target = lambda * lambda;
    let early = (ratio(2) - target).norm();
    let late = (ratio(25) - target).norm();
    assert!(late < 1e-8 * target.norm(), "{late}");
    assert!(late < early);
}

#[test]
fn power_iteration_matches_an_explicit_case() {
    let m = build_m(R, 1.1, 3).unwrap();
    let p = power_iteration_u(&m, 500, 1e-13).unwrap();
    let mv = m.mul_vec(&p.u);
    for (a, b) in mv.iter().zip(&p.u) {
        assert_relative_eq!((a - p.eigenvalue * b).norm(), 0.0, epsilon = 1e-10);
    }
    assert!(p.u.iter().all(|z| z.re > 0.0 && z.im.abs() < 1e-14));
}

#[test]
fn single_vertex_field_integral() {
    let z = direct_field_z(1.1, FieldPotential::Free, 1, 10.0, 800, Execution::Sequential).unwrap();
    assert_relative_eq!(z, (std::f64::consts::PI / 1.1).sqrt(), max_relative = 1e-8);
}

#[test]
fn field_integral_ratio_tests() {
    for n in 1..=3 {
        assert!(field_ratio_check(1.1, 1.5, FieldPotential::Free, n, Execution::default()).unwrap() < 1e-4);
    }
    assert!(field_ratio_check(1.5, 1.1, FieldPotential::Quartic(0.1), 2, Execution::default()).unwrap() < 1e-4);
}

#[test]
fn field_integral_is_the_same_in_both_execution_modes() {
    let a = direct_field_z(1.3, FieldPotential::Free, 3, 8.0, 200, Execution::Sequential).unwrap();
    let b = direct_field_z(1.3, FieldPotential::Free, 3, 8.0, 200, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn finite_chain_reproduces_the_complex_matrix() {
    let params = LatticeParams::new(Q, 0.1, 1).unwrap();
    assert!(finite_chain_check(Q, &params, 5, 60).unwrap() < 1e-3);
}
