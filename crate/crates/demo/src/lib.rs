//! Browser bindings for three interactive views: the warp profile, the σ₁
//! sweep and the spectrum of a surface of revolution.
//!
//! The plain functions return `Result<_, String>` so they can be tested
//! natively; the `#[wasm_bindgen]` wrappers turn errors into JS exceptions.

use std::f64::consts::TAU;

use wasm_bindgen::prelude::*;
use warped_steklov::experiments::SweepParams;
use warped_steklov::warp_profile::build_profile;
use warped_steklov::warped_assembler::first_eigenvalues;
use warped_steklov::{
    BaseGeometry, ClosedSpectrum, EndCondition, MeshSpec, MetricMode, Warp, WarpedMetricSpec,
};

const MAX_SAMPLES: usize = 20_000;

/// `[t₀, ln h(t₀), t₁, ln h(t₁), …]` for the plateau profile on `[0, 1]`.
pub fn profile_points(epsilon: f64, delta: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must lie in 2..={MAX_SAMPLES}"));
    }
    let p = build_profile(epsilon, delta, 1.0, true).map_err(|e| e.to_string())?;
    Ok((0..samples)
        .flat_map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            [t, p.ln_h(t)]
        })
        .collect())
}

/// σ₁ of the volume-preserving construction for each ε (descending).
pub fn sigma1_values(epsilons: &[f64], delta: f64, n: usize, k: usize) -> Result<Vec<f64>, String> {
    let mut params = if n == 1 && k == 1 {
        SweepParams::default_2d()
    } else {
        SweepParams::default_3d()
    };
    params.n = n;
    params.k = k;
    params.delta = delta;
    params.epsilons = epsilons.to_vec();
    params.timing = false;
    params.mesh = MeshSpec {
        elements: 1000,
        min_per_transition: 32,
    };
    let rows = warped_steklov::experiments::run_sweep(&params).map_err(|e| e.to_string())?;
    Ok(rows.iter().map(|r| r.sigma1).collect())
}

/// First `count` Steklov eigenvalues of `[0, length] × S¹(2π)` with
/// `h(t) = 1 + bump · t(length − t)`.
pub fn surface_eigenvalues(length: f64, bump: f64, count: usize) -> Result<Vec<f64>, String> {
    if count == 0 || count > 200 {
        return Err("count must lie in 1..=200".into());
    }
    if !(bump > -4.0 / (length * length)) {
        return Err("bump too negative: h must stay positive".into());
    }
    let spec = WarpedMetricSpec::new(
        1,
        1,
        Warp::function(move |t| 1.0 + bump * t * (length - t)),
        BaseGeometry::interval(length, EndCondition::Steklov, EndCondition::Steklov),
        ClosedSpectrum::circle(TAU, 16).map_err(|e| e.to_string())?,
        MetricMode::PlainWarp,
    )
    .map_err(|e| e.to_string())?;
    first_eigenvalues(&spec, count, &MeshSpec::new(400)).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn profile_curve(epsilon: f64, delta: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    profile_points(epsilon, delta, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep_sigma1(epsilons: Vec<f64>, delta: f64, n: usize, k: usize) -> Result<Vec<f64>, JsError> {
    sigma1_values(&epsilons, delta, n, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn surface_spectrum(length: f64, bump: f64, count: usize) -> Result<Vec<f64>, JsError> {
    surface_eigenvalues(length, bump, count).map_err(|e| JsError::new(&e))
}
