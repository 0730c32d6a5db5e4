//! Eigenvalue ratios of quasi-isometric metrics: if `g₁/C ≤ g₂ ≤ C g₁` then
//! `σ_k(g₁)/σ_k(g₂)` lies in `[C^{-(2m+1)}, C^{2m+1}]`.

use std::fmt::Write as _;

use rand::Rng;

use crate::spectrum::fmt_float;
use crate::sturm_dtn::MeshSpec;
use crate::warp_profile::{Warp, WarpedMetricSpec};
use crate::warped_assembler::first_eigenvalues;
use crate::{Error, Result};

const RATIO_SAMPLES: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiIsoReport {
    pub c: f64,
    pub bound: f64,
    /// `(σ_k(g₁), σ_k(g₂), ratio)` for `k = 1..=k_max`.
    pub ratios: Vec<(f64, f64, f64)>,
    pub passed: bool,
}

fn same_product(a: &WarpedMetricSpec, b: &WarpedMetricSpec) -> Result<()> {
    let same = a.n == b.n
        && a.k == b.k
        && a.base.collar_length == b.base.collar_length
        && a.base.left == b.base.left
        && a.base.right == b.base.right
        && a.base.cross_section == b.base.cross_section
        && a.fiber == b.fiber;
    if same {
        Ok(())
    } else {
        Err(Error::Domain("the two metrics live on different products".into()))
    }
}

/// Largest pointwise ratio (either direction) of the base and fiber metric
/// coefficients, sampled on the collar.
pub fn quasi_isometry_ratio(a: &WarpedMetricSpec, b: &WarpedMetricSpec) -> f64 {
    let l = a.base.collar_length;
    let mut ts: Vec<f64> = (0..RATIO_SAMPLES)
        .map(|i| l * i as f64 / (RATIO_SAMPLES - 1) as f64)
        .collect();
    for (s, e) in a.warp.transitions().into_iter().chain(b.warp.transitions()) {
        ts.extend([s, e]);
    }
    ts.iter()
        .map(|&t| {
            let (a0, a1) = a.metric_coefficients(t);
            let (b0, b1) = b.metric_coefficients(t);
            [a0 / b0, b0 / a0, a1 / b1, b1 / a1]
                .into_iter()
                .fold(1.0, f64::max)
        })
        .fold(1.0, f64::max)
}

/// Checks the ratio bound with `C` computed from the two metrics.
pub fn quasi_iso_check(
    a: &WarpedMetricSpec,
    b: &WarpedMetricSpec,
    m: usize,
    k_max: usize,
    mesh: &MeshSpec,
) -> Result<QuasiIsoReport> {
    same_product(a, b)?;
    quasi_iso_check_with_ratio(a, b, quasi_isometry_ratio(a, b), m, k_max, mesh)
}

/// Checks the ratio bound for a caller-supplied `C`.
pub fn quasi_iso_check_with_ratio(
    a: &WarpedMetricSpec,
    b: &WarpedMetricSpec,
    c: f64,
    m: usize,
    k_max: usize,
    mesh: &MeshSpec,
) -> Result<QuasiIsoReport> {
    same_product(a, b)?;
    if !(c >= 1.0) || m == 0 || k_max == 0 {
        return Err(Error::Domain(format!(
            "need C >= 1, m >= 1 and k_max >= 1, got C = {c}, m = {m}, k_max = {k_max}"
        )));
    }
    let bound = c.powi(2 * m as i32 + 1);
    let sa = first_eigenvalues(a, k_max + 1, mesh)?;
    let sb = first_eigenvalues(b, k_max + 1, mesh)?;
    let ratios: Vec<(f64, f64, f64)> = (1..=k_max)
        .filter(|&k| sb[k] > 0.0)
        .map(|k| (sa[k], sb[k], sa[k] / sb[k]))
        .collect();
    // discretization noise when the two metrics coincide
    let slack = 1.0 + 1e-9;
    let passed = ratios
        .iter()
        .all(|&(_, _, r)| r <= bound * slack && r * bound * slack >= 1.0);
    Ok(QuasiIsoReport {
        c,
        bound,
        ratios,
        passed,
    })
}

/// `h(t) = exp(b + Σ_{j=1..3} a_j sin(jπt/ℓ))` with coefficients uniform in
/// `[-amplitude, amplitude]`.
pub fn random_warp<R: Rng>(rng: &mut R, length: f64, amplitude: f64) -> Warp {
    let b: f64 = rng.gen_range(-amplitude..=amplitude);
    let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-amplitude..=amplitude));
    Warp::function(move |t| {
        let x = std::f64::consts::PI * t / length;
        (b + a[0] * x.sin() + a[1] * (2.0 * x).sin() + a[2] * (3.0 * x).sin()).exp()
    })
}

/// Two metrics on the product of `template` with independent random warps.
pub fn random_pair<R: Rng>(
    rng: &mut R,
    template: &WarpedMetricSpec,
    amplitude: f64,
) -> Result<(WarpedMetricSpec, WarpedMetricSpec)> {
    let l = template.base.collar_length;
    let make = |rng: &mut R| {
        WarpedMetricSpec::new(
            template.n,
            template.k,
            random_warp(rng, l, amplitude),
            template.base.clone(),
            template.fiber.clone(),
            template.mode,
        )
    };
    let a = make(rng)?;
    let b = make(rng)?;
    Ok((a, b))
}

pub const QUASI_ISO_HEADER: &str = "pair,k,sigma_a,sigma_b,ratio,c,bound,passed";

pub fn quasi_iso_csv(reports: &[QuasiIsoReport]) -> String {
    let mut out = format!("{QUASI_ISO_HEADER}\n");
    for (i, r) in reports.iter().enumerate() {
        for (k, (a, b, ratio)) in r.ratios.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{},{},{}",
                k + 1,
                fmt_float(*a),
                fmt_float(*b),
                fmt_float(*ratio),
                fmt_float(r.c),
                fmt_float(r.bound),
                r.passed
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra_closed::ClosedSpectrum;
    use crate::sturm_dtn::{BaseGeometry, EndCondition};
    use crate::warp_profile::MetricMode;
    use std::f64::consts::TAU;

    fn surface(warp: Warp) -> WarpedMetricSpec {
        WarpedMetricSpec::new(
            1,
            1,
            warp,
            BaseGeometry::interval(1.0, EndCondition::Steklov, EndCondition::Steklov),
            ClosedSpectrum::circle(TAU, 4).unwrap(),
            MetricMode::PlainWarp,
        )
        .unwrap()
    }

    #[test]
    fn identical_metrics() {
        let a = surface(Warp::function(|t| 1.0 + t * (1.0 - t)));
        let r = quasi_iso_check(&a, &a.clone(), 2, 5, &MeshSpec::new(200)).unwrap();
        assert_eq!(r.c, 1.0);
        assert!(r.passed);
        assert!(r.ratios.iter().all(|x| (x.2 - 1.0).abs() < 1e-12));
    }

    #[test]
    fn scaled_warp() {
        let a = surface(Warp::function(|t| 1.0 + t * (1.0 - t)));
        let b = surface(Warp::function(|t| 1.1 * (1.0 + t * (1.0 - t))));
        let mesh = MeshSpec::new(200);
        let r = quasi_iso_check(&a, &b, 2, 5, &mesh).unwrap();
        assert!((r.c - 1.21).abs() < 1e-12);
        assert!(r.passed, "{r:?}");
        let wrong = quasi_iso_check_with_ratio(&a, &b, 1.0, 2, 5, &mesh).unwrap();
        assert!(!wrong.passed);
    }
}
