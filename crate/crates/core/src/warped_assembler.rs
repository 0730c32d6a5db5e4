//! Steklov spectrum of `B ×_h F` as the union, over fiber eigenvalues λ, of
//! the DtN spectra of `L_h + λ h⁻²` on the base.

use std::sync::Arc;

use crate::spectrum::{Source, SpectrumWithProvenance};
use crate::sturm_dtn::{self, Coefficients, EndCondition, Mesh, MeshSpec};
use crate::warp_profile::{MetricMode, WarpedMetricSpec};
use crate::{par, Error, Result};

/// Weight, fiber term and boundary weights of the reduced base problem.
pub fn auxiliary_coefficients(spec: &WarpedMetricSpec) -> Coefficients {
    let (a, b, c) = (
        spec.weight_exponent(),
        spec.fiber_exponent(),
        spec.boundary_exponent(),
    );
    let w1 = spec.warp.clone();
    let w2 = spec.warp.clone();
    let l = spec.base.collar_length;
    Coefficients {
        weight: Arc::new(move |t| w1.pow(t, a)),
        fiber: Arc::new(move |t| w2.pow(t, b)),
        left_weight: spec.warp.pow(0.0, c),
        right_weight: spec.warp.pow(l, c),
        transitions: spec.warp.transitions(),
    }
}

/// Mesh of the base collar graded around the warp transitions.
pub fn base_mesh(spec: &WarpedMetricSpec, mesh: &MeshSpec) -> Result<Mesh> {
    Mesh::graded(spec.base.collar_length, mesh, &spec.warp.transitions())
}

/// All Steklov (or mixed Steklov-Neumann) eigenvalues `≤ top` of the warped
/// product, with multiplicity and provenance.
///
/// Fiber eigenvalues are consumed in ascending order and the scan stops at
/// the first λ whose branch has nothing `≤ top`; σ₀ of a branch is
/// non-decreasing in λ, so nothing later can contribute.
pub fn steklov_spectrum_warped(
    spec: &WarpedMetricSpec,
    top: f64,
    mesh_spec: &MeshSpec,
) -> Result<SpectrumWithProvenance> {
    if !(top > 0.0) || !top.is_finite() {
        return Err(Error::Domain(format!("top must be positive, got {top}")));
    }
    let coeffs = auxiliary_coefficients(spec);
    let mesh = base_mesh(spec, mesh_spec)?;
    let chunk = par::threads().max(2);
    let mut fiber = spec.fiber.clone();
    let mut sources: Vec<Source> = Vec::new();
    let mut start = 0;
    loop {
        let end = start + chunk;
        if end > fiber.len() && !fiber.is_exhaustive() {
            if let Ok(g) = fiber.grown(end.max(2 * fiber.len())) {
                fiber = g;
            }
        }
        let avail = end.min(fiber.len());
        if start >= avail {
            if fiber.is_exhaustive() {
                break;
            }
            return Err(Error::Incomplete(format!(
                "fiber spectrum exhausted after {} levels (last λ = {}) with eigenvalues still <= {top}",
                fiber.len(),
                fiber.last_value()
            )));
        }
        let levels: Vec<_> = fiber.entries()[start..avail].to_vec();
        let branches = par::map(&levels, |level| {
            sturm_dtn::mode_sources(
                &spec.base,
                &coeffs,
                &mesh,
                level.value,
                level.multiplicity,
                top,
            )
        });
        let mut done = false;
        for branch in branches {
            let branch = branch?;
            if branch.is_empty() {
                done = true;
                break;
            }
            sources.extend(branch);
        }
        if done {
            break;
        }
        start = avail;
    }
    Ok(SpectrumWithProvenance::from_sources(sources))
}

/// The first `count` eigenvalues (with multiplicity), found by doubling `top`
/// until more than `count` are available.
pub fn first_eigenvalues(
    spec: &WarpedMetricSpec,
    count: usize,
    mesh_spec: &MeshSpec,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut top = 1.0;
    for _ in 0..60 {
        let s = steklov_spectrum_warped(spec, top, mesh_spec)?;
        if s.total_multiplicity() > count {
            let mut v = s.values();
            v.truncate(count);
            return Ok(v);
        }
        top *= 2.0;
    }
    Err(Error::Incomplete(format!(
        "fewer than {count} eigenvalues below {top}"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sigma1Branch {
    /// First nonzero eigenvalue of the λ = 0 problem.
    Base,
    /// Smallest eigenvalue of the λ = λ₁(F) problem.
    Fiber,
}

impl Sigma1Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sigma1Branch::Base => "base",
            Sigma1Branch::Fiber => "fiber",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigma1 {
    pub value: f64,
    pub branch: Sigma1Branch,
    pub base_value: f64,
    pub fiber_value: f64,
    /// Elements in the base mesh.
    pub mesh_size: usize,
}

/// σ₁ of the volume-preserving construction as the smaller of the two
/// candidates; ties go to the base branch.
///
/// Only the μ = 0 and μ = μ₁ cross-section modes are solved: the branch
/// eigenvalues are non-decreasing in μ, so no other mode can be smaller.
pub fn sigma1_construction(spec: &WarpedMetricSpec, mesh_spec: &MeshSpec) -> Result<Sigma1> {
    if spec.mode != MetricMode::VolumePreserving {
        return Err(Error::Unsupported(
            "sigma1 of the construction needs a volume-preserving metric".into(),
        ));
    }
    spec.base.validate()?;
    let lambda1 = spec
        .fiber
        .first_nonzero()
        .ok_or_else(|| Error::Domain("fiber spectrum has no nonzero eigenvalue".into()))?
        .value;
    let coeffs = auxiliary_coefficients(spec);
    let mesh = base_mesh(spec, mesh_spec)?;
    let solve = |mu: f64, lambda: f64| {
        sturm_dtn::dtn_eigenvalues(&coeffs.mode_problem(&spec.base, &mesh, mu, lambda))
    };

    let mut candidates = solve(0.0, 0.0)?;
    if let Some(mu1) = spec.base.cross_section.first_nonzero() {
        candidates.push(solve(mu1.value, 0.0)?[0]);
    }
    candidates.sort_by(f64::total_cmp);
    let base_value = *candidates.get(1).ok_or_else(|| {
        Error::Domain("the base problem has a single eigenvalue; σ₁ is undefined".into())
    })?;
    let fiber_value = solve(0.0, lambda1)?[0];
    let (value, branch) = if base_value <= fiber_value {
        (base_value, Sigma1Branch::Base)
    } else {
        (fiber_value, Sigma1Branch::Fiber)
    };
    Ok(Sigma1 {
        value,
        branch,
        base_value,
        fiber_value,
        mesh_size: mesh.elements(),
    })
}

/// `min{ε^{δ−1}/8, λ₁ ε^{1−δn/k}/4}`, defined for `n > k ≥ 1` and `k/n < δ < 1`.
pub fn lower_bound_c(epsilon: f64, delta: f64, n: usize, k: usize, lambda1: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if k == 0 || n <= k {
        return Err(Error::Hypothesis(format!(
            "the bound needs n > k >= 1, got n = {n}, k = {k}"
        )));
    }
    let ratio = k as f64 / n as f64;
    if !(delta > ratio && delta < 1.0) {
        return Err(Error::Hypothesis(format!(
            "delta = {delta} must satisfy k/n = {ratio} < delta < 1"
        )));
    }
    let first = epsilon.powf(delta - 1.0) / 8.0;
    let second = lambda1 * epsilon.powf(1.0 - delta / ratio) / 4.0;
    Ok(first.min(second))
}

/// Total volume of the Steklov boundary of a surface `[0, ℓ] ×_h S¹`.
pub fn steklov_boundary_length(spec: &WarpedMetricSpec) -> Result<f64> {
    use crate::spectra_closed::SpectrumKind;
    let SpectrumKind::Circle { length } = *spec.fiber.kind() else {
        return Err(Error::Unsupported("boundary length needs a circle fiber".into()));
    };
    if spec.n != 1 || spec.k != 1 || spec.base.cross_section.component_count() != 1 {
        return Err(Error::Unsupported(
            "boundary length is only computed for surfaces over an interval".into(),
        ));
    }
    let l = spec.base.collar_length;
    let mut total = 0.0;
    for (end, t) in [(spec.base.left, 0.0), (spec.base.right, l)] {
        if end == EndCondition::Steklov {
            total += spec.warp.h(t) * length;
        }
    }
    Ok(total)
}
