//! ε-sweeps of σ₁ for the volume-preserving construction.

use std::fmt::Write as _;
use std::time::Instant;

use crate::spectra_closed::ClosedSpectrum;
use crate::spectrum::fmt_float;
use crate::sturm_dtn::{BaseGeometry, EndCondition, MeshSpec};
use crate::warp_profile::{build_profile, Warp, WarpedMetricSpec};
use crate::warped_assembler::{lower_bound_c, sigma1_construction, Sigma1Branch};
use crate::{par, Error, Result};

pub const SWEEP_HEADER: &str = "epsilon,sigma1,active_branch,lower_bound_C,mesh_size,runtime_ms";

#[derive(Debug, Clone)]
pub struct SweepParams {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    /// Descending.
    pub epsilons: Vec<f64>,
    pub base: BaseGeometry,
    pub fiber: ClosedSpectrum,
    pub mesh: MeshSpec,
    /// Plateaus at both ends of the collar instead of only at `t = 0`.
    pub symmetric: bool,
    /// Replace the profile by `h ≡ 1` (δ is then irrelevant).
    pub unwarped: bool,
    /// Record wall-clock time per row; when off, `runtime_ms` is written as 0
    /// so that repeated runs produce identical files.
    pub timing: bool,
}

impl SweepParams {
    /// `n = 2`, `k = 1`, `δ = 0.75`, `B = S¹(2π) × [0, 1]` with both ends
    /// Steklov, `F = S¹(2π)`, `ε = 0.1, 0.05, 0.025, 0.0125`.
    pub fn default_3d() -> Self {
        let circle = ClosedSpectrum::circle(std::f64::consts::TAU, 8).expect("valid circle");
        Self {
            n: 2,
            k: 1,
            delta: 0.75,
            epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            base: BaseGeometry::collar(circle.clone(), 1.0, EndCondition::Steklov, EndCondition::Steklov),
            fiber: circle,
            mesh: MeshSpec {
                elements: 4000,
                min_per_transition: 64,
            },
            symmetric: true,
            unwarped: false,
            timing: true,
        }
    }

    /// The surface analogue: `n = k = 1`, `B = [0, 1]`, `F = S¹(2π)`.
    pub fn default_2d() -> Self {
        Self {
            n: 1,
            k: 1,
            base: BaseGeometry::interval(1.0, EndCondition::Steklov, EndCondition::Steklov),
            ..Self::default_3d()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::Domain(format!(
                "dimensions must be positive, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        self.base.validate()?;
        if self.epsilons.is_empty() {
            return Err(Error::Domain("epsilon list is empty".into()));
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Domain("epsilon list must be strictly descending".into()));
        }
        if self.unwarped {
            return Ok(());
        }
        let ratio = self.k as f64 / self.n as f64;
        if self.n > self.k && !(self.delta > ratio) {
            return Err(Error::Hypothesis(format!(
                "delta = {} must exceed k/n = {ratio}",
                self.delta
            )));
        }
        for &eps in &self.epsilons {
            build_profile(eps, self.delta, self.base.collar_length, self.symmetric)?;
        }
        Ok(())
    }

    /// The metric used for one row.
    pub fn metric_for(&self, epsilon: f64) -> Result<WarpedMetricSpec> {
        if self.unwarped {
            return WarpedMetricSpec::new(
                self.n,
                self.k,
                Warp::Constant(1.0),
                self.base.clone(),
                self.fiber.clone(),
                crate::warp_profile::MetricMode::VolumePreserving,
            );
        }
        let profile = build_profile(epsilon, self.delta, self.base.collar_length, self.symmetric)?;
        WarpedMetricSpec::volume_preserving_construction(
            self.n,
            self.k,
            profile,
            self.base.clone(),
            self.fiber.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub sigma1: f64,
    pub active_branch: Sigma1Branch,
    /// NaN where the bound is not defined (`n ≤ k`).
    pub lower_bound_c: f64,
    pub mesh_size: usize,
    pub runtime_ms: u64,
}

/// One row per ε, in input order. Rows are computed in parallel.
pub fn run_sweep(params: &SweepParams) -> Result<Vec<SweepRow>> {
    params.validate()?;
    let lambda1 = params
        .fiber
        .first_nonzero()
        .ok_or_else(|| Error::Domain("fiber spectrum has no nonzero eigenvalue".into()))?
        .value;
    let rows = par::map(&params.epsilons, |&eps| -> Result<SweepRow> {
        let start = Instant::now();
        let spec = params.metric_for(eps)?;
        let s = sigma1_construction(&spec, &params.mesh)?;
        let bound = if params.n > params.k {
            lower_bound_c(eps, params.delta, params.n, params.k, lambda1)?
        } else {
            f64::NAN
        };
        Ok(SweepRow {
            epsilon: eps,
            sigma1: s.value,
            active_branch: s.branch,
            lower_bound_c: bound,
            mesh_size: s.mesh_size,
            runtime_ms: if params.timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            },
        })
    });
    rows.into_iter()
        .zip(&params.epsilons)
        .map(|(r, eps)| r.map_err(|e| Error::Domain(format!("sweep failed at epsilon = {eps}: {e}"))))
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_float(r.epsilon),
            fmt_float(r.sigma1),
            r.active_branch.as_str(),
            fmt_float(r.lower_bound_c),
            r.mesh_size,
            r.runtime_ms
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        let mut p = SweepParams::default_3d();
        p.epsilons = vec![0.2];
        assert!(matches!(p.validate(), Err(Error::Hypothesis(_))));
        let mut p = SweepParams::default_3d();
        p.epsilons = vec![0.05, 0.1];
        assert!(p.validate().is_err());
        let mut p = SweepParams::default_3d();
        p.delta = 0.5;
        assert!(matches!(p.validate(), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn unwarped_row_is_the_product_value() {
        let mut p = SweepParams::default_3d();
        p.epsilons = vec![0.1];
        p.unwarped = true;
        let rows = run_sweep(&p).unwrap();
        // flat product: min{2/ℓ, tanh(ℓ/2)} with ℓ = 1
        assert!((rows[0].sigma1 - 0.5f64.tanh()).abs() < 1e-4, "{rows:?}");
    }

    #[test]
    fn csv_is_reproducible_without_timing() {
        let mut p = SweepParams::default_3d();
        p.epsilons = vec![0.1, 0.05];
        p.timing = false;
        let a = sweep_csv(&run_sweep(&p).unwrap());
        let b = sweep_csv(&run_sweep(&p).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(SWEEP_HEADER));
        assert_eq!(a.lines().count(), 3);
    }
}
