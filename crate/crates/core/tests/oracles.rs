//! Closed-form and cross-solver checks on small products.

use std::f64::consts::TAU;

use warped_steklov::direct_oracle::{compare_with_assembler, revolution_steklov, RevolutionGrid};
use warped_steklov::experiments::sweep::{run_sweep, SweepParams};
use warped_steklov::warped_assembler::{
    first_eigenvalues, lower_bound_c, sigma1_construction, steklov_spectrum_warped,
};
use warped_steklov::{
    BaseGeometry, ClosedSpectrum, EndCondition, MeshSpec, MetricMode, Warp, WarpedMetricSpec,
};

fn flat_cylinder(length: f64, right: EndCondition) -> WarpedMetricSpec {
    WarpedMetricSpec::new(
        1,
        1,
        Warp::Constant(1.0),
        BaseGeometry::interval(length, EndCondition::Steklov, right),
        ClosedSpectrum::circle(TAU, 8).unwrap(),
        MetricMode::PlainWarp,
    )
    .unwrap()
}

/// Steklov eigenvalues of `[0, L] × S¹(P)` from separation of variables,
/// enumerated independently of the library.
fn cylinder_closed_form(length: f64, period: f64, count: usize) -> Vec<f64> {
    let mut v = vec![0.0, 2.0 / length];
    for j in 1..count {
        let s = TAU * j as f64 / period;
        let a = s * (s * length / 2.0).tanh();
        let b = s / (s * length / 2.0).tanh();
        v.extend([a, a, b, b]);
    }
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

#[test]
fn assembled_cylinder_matches_separation_for_twenty_values() {
    let v = first_eigenvalues(&flat_cylinder(2.0, EndCondition::Steklov), 20, &MeshSpec::new(800)).unwrap();
    let reference = cylinder_closed_form(2.0, TAU, 20);
    for (a, b) in v.iter().zip(&reference) {
        assert!((a - b).abs() <= 1e-3 * b.max(1e-3), "{a} vs {b}");
    }
}

#[test]
fn grid_cylinder_matches_closed_form() {
    let grid = RevolutionGrid::new(
        256,
        64,
        2.0,
        TAU,
        Warp::Constant(1.0),
        EndCondition::Steklov,
        EndCondition::Steklov,
    )
    .unwrap();
    let v = revolution_steklov(&grid, 8).unwrap();
    let reference = cylinder_closed_form(2.0, TAU, 8);
    assert!(v[0].abs() < 1e-9);
    for (a, b) in v.iter().zip(&reference).skip(1) {
        assert!((a - b).abs() / b < 2e-3, "{a} vs {b}");
    }
}

#[test]
fn grid_and_assembler_agree_on_cylinder() {
    let grid = RevolutionGrid::new(
        128,
        64,
        2.0,
        TAU,
        Warp::Constant(1.0),
        EndCondition::Steklov,
        EndCondition::Steklov,
    )
    .unwrap();
    let r = compare_with_assembler(&grid, 2.0, 5e-3).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.oracle_count, 8);
}

#[test]
fn grid_and_assembler_agree_on_bump() {
    let grid = RevolutionGrid::new(
        128,
        64,
        1.0,
        TAU,
        Warp::function(|t| 1.0 + t * (1.0 - t)),
        EndCondition::Steklov,
        EndCondition::Steklov,
    )
    .unwrap();
    let r = compare_with_assembler(&grid, 3.0, 1e-2).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.converged);
}

#[test]
fn mixed_union_matches_closed_form() {
    let s = steklov_spectrum_warped(&flat_cylinder(1.0, EndCondition::Neumann), 2.0, &MeshSpec::new(400)).unwrap();
    // j tanh(j) for j = 1, 2, each twice
    let t1 = 1f64.tanh();
    let t2 = 2.0 * 2f64.tanh();
    let values = s.values();
    assert_eq!(values.len(), 5);
    assert!(values[0].abs() < 1e-10);
    for (v, r) in values[1..].iter().zip([t1, t1, t2, t2]) {
        assert!((v - r).abs() < 1e-4 * r, "{v} vs {r}");
    }
}

#[test]
fn sigma1_is_reproducible_and_positive() {
    let mut p = SweepParams::default_3d();
    p.epsilons = vec![0.1];
    let spec = p.metric_for(0.1).unwrap();
    let a = sigma1_construction(&spec, &p.mesh).unwrap();
    let b = sigma1_construction(&spec, &p.mesh).unwrap();
    assert!(a.value > 0.0);
    assert!((a.value - b.value).abs() <= 1e-8);
}

#[test]
fn default_sweep_stays_above_loose_envelope() {
    let rows = run_sweep(&SweepParams::default_3d()).unwrap();
    for r in &rows {
        assert!(r.sigma1 >= 0.1 * r.lower_bound_c, "{r:?}");
        assert_eq!(r.lower_bound_c, lower_bound_c(r.epsilon, 0.75, 2, 1, 1.0).unwrap());
    }
    assert!(rows.windows(2).all(|w| w[1].sigma1 > w[0].sigma1));
}

#[test]
fn fiber_rescaling_raises_branches() {
    // shrinking the fiber scales λ by c², so each branch can only go up
    let base = flat_cylinder(1.0, EndCondition::Steklov);
    let mut small = base.clone();
    small.fiber = ClosedSpectrum::circle(TAU / 2.0, 8).unwrap();
    let mesh = MeshSpec::new(400);
    let a = first_eigenvalues(&base, 10, &mesh).unwrap();
    let b = first_eigenvalues(&small, 10, &mesh).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(y >= &(x - 1e-12), "{x} > {y}");
    }
}
