//! The acceptance suite: ten numbered checks against closed forms, the grid
//! oracle and structural properties, each reported as pass/fail with detail.

use std::f64::consts::{E, TAU};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kokarev::kokarev_sweep;
use super::quasi_iso::{quasi_iso_check, random_pair};
use super::sweep::{run_sweep, SweepParams};
use super::volume::normalize_volume;
use crate::direct_oracle::{compare_with_assembler, relative_deviation, RevolutionGrid};
use crate::spectra_closed::ClosedSpectrum;
use crate::sturm_dtn::{self, BaseGeometry, EndCondition, MeshSpec};
use crate::warp_profile::{build_profile, volume_element_ratio, MetricMode, Warp, WarpedMetricSpec};
use crate::warped_assembler::{auxiliary_coefficients, base_mesh, first_eigenvalues};
use crate::Result;

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub type Check = fn(u64) -> Result<(bool, String)>;

/// `(id, name, check)` for every criterion, in order.
pub fn criteria() -> Vec<(usize, &'static str, Check)> {
    vec![
        (1, "cylinder closed form", cylinder_closed_form as Check),
        (2, "oracle agreement", oracle_agreement),
        (3, "mixed closed form", mixed_closed_form),
        (4, "lambda monotonicity", lambda_monotonicity),
        (5, "volume element", volume_element),
        (6, "sigma1 growth", sigma1_growth),
        (7, "surface bound", surface_bound),
        (8, "quasi-isometry", quasi_isometry),
        (9, "volume normalization", volume_normalization),
        (10, "convergence order", convergence_order),
    ]
}

pub fn run_one(id: usize, name: &'static str, check: Check, seed: u64) -> CriterionOutcome {
    let start = Instant::now();
    let (passed, detail) = match check(seed) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    criteria()
        .into_iter()
        .map(|(id, name, check)| run_one(id, name, check, seed))
        .collect()
}

fn cylinder(length: f64, right: EndCondition) -> Result<WarpedMetricSpec> {
    WarpedMetricSpec::new(
        1,
        1,
        Warp::Constant(1.0),
        BaseGeometry::interval(length, EndCondition::Steklov, right),
        ClosedSpectrum::circle(TAU, 8)?,
        MetricMode::PlainWarp,
    )
}

/// First nine Steklov eigenvalues of `[0, 2] × S¹(2π)`.
pub fn cylinder_reference() -> Vec<f64> {
    let (t1, c1, t2, c2) = (1f64.tanh(), 1.0 / 1f64.tanh(), 2f64.tanh(), 1.0 / 2f64.tanh());
    vec![0.0, t1, t1, 1.0, c1, c1, 2.0 * t2, 2.0 * t2, 2.0 * c2]
}

/// First six mixed eigenvalues of `[0, 1] × S¹(2π)`, Steklov at `t = 0`.
pub fn mixed_reference() -> Vec<f64> {
    let t = |j: f64| j * j.tanh();
    vec![0.0, t(1.0), t(1.0), t(2.0), t(2.0), t(3.0)]
}

fn max_deviation(values: &[f64], reference: &[f64]) -> f64 {
    values
        .iter()
        .zip(reference)
        .map(|(a, b)| relative_deviation(*a, *b))
        .fold(0.0, f64::max)
}

fn closed_form_error(spec: &WarpedMetricSpec, reference: &[f64], elements: usize) -> Result<f64> {
    let v = first_eigenvalues(spec, reference.len(), &MeshSpec::new(elements))?;
    Ok(max_deviation(&v, reference))
}

fn cylinder_closed_form(_: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let err = closed_form_error(&cylinder(2.0, EndCondition::Steklov)?, &cylinder_reference(), 400)?;
    let secs = start.elapsed().as_secs_f64();
    Ok((
        err <= 1e-3 && secs < 5.0,
        format!("max rel error {err:.3e} (tol 1e-3) in {secs:.3}s (limit 5s)"),
    ))
}

fn oracle_agreement(_: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let warp = Warp::function(|t| 1.0 + t * (1.0 - t));
    let grid = RevolutionGrid::new(
        128,
        128,
        1.0,
        TAU,
        warp.clone(),
        EndCondition::Steklov,
        EndCondition::Steklov,
    )?;
    // place `top` in the gap after the 15th eigenvalue
    let spec = grid.metric_spec(TAU)?;
    let sixteen = first_eigenvalues(&spec, 16, &MeshSpec::new(800))?;
    let above: f64 = sixteen[15];
    let top = if relative_deviation(above, sixteen[14]) > 1e-6 {
        0.5 * (sixteen[14] + above)
    } else {
        // the 15th value is a multiple one; include the whole cluster
        above * (1.0 + 1e-3)
    };
    let report = compare_with_assembler(&grid, top, 1e-2)?;
    let first15 = report
        .pairs
        .iter()
        .take(15)
        .map(|&(a, b)| relative_deviation(a, b))
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    let passed = report.pairs.len() >= 15
        && first15 <= 1e-2
        && report.oracle_count == report.assembler_count
        && secs < 60.0;
    Ok((
        passed,
        format!(
            "first 15 max rel dev {first15:.3e} (tol 1e-2); counts <= {top:.4}: oracle {} assembler {}; halved grid count stable: {}; {secs:.2}s (limit 60s)",
            report.oracle_count, report.assembler_count, report.converged
        ),
    ))
}

fn mixed_closed_form(_: u64) -> Result<(bool, String)> {
    let err = closed_form_error(&cylinder(1.0, EndCondition::Neumann)?, &mixed_reference(), 400)?;
    Ok((err <= 1e-3, format!("max rel error {err:.3e} (tol 1e-3)")))
}

/// σ₀ of the λ-branch: smallest eigenvalue of the μ = 0 mode.
fn sigma0(spec: &WarpedMetricSpec, lambda: f64, mesh: &MeshSpec) -> Result<f64> {
    let coeffs = auxiliary_coefficients(spec);
    let mesh = base_mesh(spec, mesh)?;
    Ok(sturm_dtn::dtn_eigenvalues(&coeffs.mode_problem(&spec.base, &mesh, 0.0, lambda))?[0])
}

fn lambda_monotonicity(_: u64) -> Result<(bool, String)> {
    let circle = ClosedSpectrum::circle(TAU, 8)?;
    let collar = BaseGeometry::collar(circle.clone(), 1.0, EndCondition::Steklov, EndCondition::Steklov);
    let specs = [
        WarpedMetricSpec::volume_preserving_construction(
            2,
            1,
            build_profile(0.05, 0.75, 1.0, true)?,
            collar.clone(),
            circle.clone(),
        )?,
        WarpedMetricSpec::new(
            1,
            1,
            Warp::function(|t| 1.0 + t * (1.0 - t)),
            BaseGeometry::interval(1.0, EndCondition::Steklov, EndCondition::Steklov),
            circle.clone(),
            MetricMode::PlainWarp,
        )?,
        WarpedMetricSpec::new(
            2,
            3,
            Warp::function(|t| (0.5 * (3.0 * t).sin()).exp()),
            BaseGeometry::collar(circle.clone(), 1.0, EndCondition::Steklov, EndCondition::Neumann),
            circle,
            MetricMode::PlainWarp,
        )?,
    ];
    let lambdas = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0];
    let mesh = MeshSpec::new(1000);
    let mut worst = 0.0f64;
    for spec in &specs {
        let s: Vec<f64> = lambdas
            .iter()
            .map(|&l| sigma0(spec, l, &mesh))
            .collect::<Result<_>>()?;
        for w in s.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
    }
    Ok((
        worst <= 1e-9,
        format!("largest decrease {worst:.3e} over 3 profiles x 6 lambdas (tol 1e-9)"),
    ))
}

fn volume_element(_: u64) -> Result<(bool, String)> {
    let params = SweepParams::default_3d();
    let mut worst = 0.0f64;
    let mut plateau_exact = true;
    for &eps in &params.epsilons {
        let spec = params.metric_for(eps)?;
        let l = spec.base.collar_length;
        for i in 0..1000 {
            let t = l * i as f64 / 999.0;
            worst = worst.max((volume_element_ratio(&spec, t)? - 1.0).abs());
        }
        for i in 0..=200 {
            let t = 0.5 * eps * i as f64 / 200.0;
            plateau_exact &= spec.warp.h(t) == 1.0;
        }
    }
    Ok((
        worst <= 1e-12 && plateau_exact,
        format!("max |ratio - 1| = {worst:.3e} (tol 1e-12); h == 1 on [0, eps/2]: {plateau_exact}"),
    ))
}

fn sigma1_growth(_: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let rows = run_sweep(&SweepParams::default_3d())?;
    let increasing = rows.windows(2).all(|w| w[1].sigma1 > w[0].sigma1);
    let ratio = rows.last().unwrap().sigma1 / rows[0].sigma1;
    let secs = start.elapsed().as_secs_f64();
    let values: Vec<String> = rows.iter().map(|r| format!("{:.5}", r.sigma1)).collect();
    Ok((
        increasing && ratio >= 2.0 && secs < 600.0,
        format!(
            "sigma1 = [{}]; strictly increasing: {increasing}; ratio {ratio:.4} (need >= 2); {secs:.2}s",
            values.join(", ")
        ),
    ))
}

fn surface_bound(_: u64) -> Result<(bool, String)> {
    let rows = kokarev_sweep(&SweepParams::default_2d(), 0)?;
    let passed = rows.iter().all(|(_, r)| r.passed);
    let (max_product, bound) = rows
        .iter()
        .map(|(_, r)| (r.product, r.bound))
        .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), b.1));
    Ok((
        passed,
        format!("max sigma1 * L = {max_product:.5} <= 8 pi = {bound:.5} over {} rows", rows.len()),
    ))
}

fn quasi_isometry(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let template = cylinder(1.0, EndCondition::Steklov)?;
    let mesh = MeshSpec::new(400);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b) = random_pair(&mut rng, &template, 0.4)?;
        let r = quasi_iso_check(&a, &b, 2, 5, &mesh)?;
        if !r.passed {
            failures += 1;
        }
        for &(_, _, ratio) in &r.ratios {
            // log of the ratio in units of log of the bound
            worst = worst.max(ratio.ln().abs() / r.bound.ln().max(f64::MIN_POSITIVE));
        }
    }
    Ok((
        failures == 0,
        format!("20 pairs (seed {seed}), {failures} failures; max |ln ratio| / ln C^5 = {worst:.3}"),
    ))
}

fn volume_normalization(_: u64) -> Result<(bool, String)> {
    // φ ≡ 1 with unit volume: the volume at c is e^{c d / 2}, so c = 2 ln(target) / d.
    let n = 16;
    let mut closed_err = 0.0f64;
    for target in [E, E * E] {
        let r = normalize_volume(&vec![1.0; n], &vec![1.0 / n as f64; n], &vec![1.0; n], 2, target)?;
        closed_err = closed_err.max((r.c - target.ln()).abs());
    }

    // φ vanishes on [0, 0.3]; base density 1 + x; midpoint rule on [0, 1]
    let m = 400;
    let x: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
    let phi: Vec<f64> = x.iter().map(|&x| (x - 0.3).max(0.0).powi(2)).collect();
    let integrand: Vec<f64> = x.iter().map(|&x| 1.0 + x).collect();
    let weights = vec![1.0 / m as f64; m];
    let sampled = normalize_volume(&integrand, &weights, &phi, 4, 2.0)?;
    Ok((
        closed_err <= 1e-10 && sampled.residual <= 1e-10,
        format!(
            "phi = 1, d = 2: max |c - ln(target)| = {closed_err:.2e} for targets e (c = 1) and e^2 (c = 2); \
             sampled instance c = {:.6}, residual {:.2e}",
            sampled.c, sampled.residual
        ),
    ))
}

fn convergence_order(_: u64) -> Result<(bool, String)> {
    let mut ratios = Vec::new();
    for (spec, reference) in [
        (cylinder(2.0, EndCondition::Steklov)?, cylinder_reference()),
        (cylinder(1.0, EndCondition::Neumann)?, mixed_reference()),
    ] {
        let coarse = closed_form_error(&spec, &reference, 100)?;
        let fine = closed_form_error(&spec, &reference, 200)?;
        ratios.push(coarse / fine);
    }
    Ok((
        ratios.iter().all(|r| *r >= 3.0),
        format!(
            "error ratio on halving: cylinder {:.3}, mixed {:.3} (need >= 3)",
            ratios[0], ratios[1]
        ),
    ))
}
