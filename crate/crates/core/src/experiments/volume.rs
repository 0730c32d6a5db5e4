//! Conformal volume normalization: find `c` with `∫ e^{c d φ / 2} dV = target`.

use crate::{Error, Result};

/// Largest `|c|` searched for a bracket.
pub const MAX_ABS_C: f64 = 1e3;
/// Relative residual required of the returned `c`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub c: f64,
    pub volume: f64,
    pub residual: f64,
}

fn volume(c: f64, dv: &[f64], phi: &[f64], d: f64) -> f64 {
    dv.iter()
        .zip(phi)
        .map(|(v, p)| v * (0.5 * c * d * p).exp())
        .sum()
}

/// Solves for `c` by bracketing and bisection. `integrand[i] · weights[i]`
/// is the volume of sample `i`.
///
/// The volume is non-decreasing in `c` and tends to the volume of `{φ = 0}`
/// as `c → −∞`, so targets at or below that volume are infeasible.
pub fn normalize_volume(
    integrand: &[f64],
    weights: &[f64],
    phi: &[f64],
    dimension: usize,
    target: f64,
) -> Result<Normalization> {
    let n = phi.len();
    if integrand.len() != n || weights.len() != n || n == 0 {
        return Err(Error::Domain(format!(
            "sample arrays must be non-empty and of equal length, got {}, {}, {n}",
            integrand.len(),
            weights.len()
        )));
    }
    if integrand.iter().chain(weights).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("integrand and weights must be positive".into()));
    }
    if phi.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::Domain("phi must be non-negative".into()));
    }
    if dimension == 0 || !(target > 0.0) || !target.is_finite() {
        return Err(Error::Domain(format!(
            "dimension and target must be positive, got {dimension}, {target}"
        )));
    }
    let dv: Vec<f64> = integrand.iter().zip(weights).map(|(a, b)| a * b).collect();
    let d = dimension as f64;
    let zero_region: f64 = dv.iter().zip(phi).filter(|(_, p)| **p == 0.0).map(|(v, _)| v).sum();
    let total: f64 = dv.iter().sum();

    if zero_region == total {
        // φ ≡ 0: the volume does not depend on c.
        let residual = (total - target).abs() / target;
        if residual <= RESIDUAL_TOL {
            return Ok(Normalization { c: 0.0, volume: total, residual });
        }
        return Err(Error::Infeasible(format!(
            "phi vanishes everywhere; the volume is {total} for every c, target {target}"
        )));
    }
    if target <= zero_region {
        return Err(Error::Infeasible(format!(
            "target {target} is at or below the volume {zero_region} of the region where phi = 0"
        )));
    }

    let f = |c: f64| volume(c, &dv, phi, d) - target;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f(lo) > 0.0 {
        lo *= 2.0;
        if lo < -MAX_ABS_C {
            return Err(Error::NoConvergence { sweeps: 0, residual: f(-MAX_ABS_C) / target });
        }
    }
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > MAX_ABS_C {
            return Err(Error::NoConvergence { sweeps: 0, residual: f(MAX_ABS_C) / target });
        }
    }
    let mut iterations = 0;
    while iterations < 400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let c = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    let v = volume(c, &dv, phi, d);
    let residual = (v - target).abs() / target;
    if residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence { sweeps: iterations, residual });
    }
    Ok(Normalization { c, volume: v, residual })
}
