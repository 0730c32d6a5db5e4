//! Brute-force Steklov spectrum of the surface `[0, L] × S¹` with metric
//! `dt² + h(t)² dθ²`, computed on a tensor grid without separating variables.
//!
//! The discrete energy is the conservative finite-difference form of
//! `∫∫ (h u_t² + h⁻¹ u_θ²) dt dθ`:
//!
//! ```text
//!   axial edge (i, i+1):   (h_i + h_{i+1})/2 · Δθ / Δt_i
//!   angular edge (j, j+1): V_i / (h_i Δθ)          V_i = dual length of node i
//!   boundary mass:         h(end) Δθ
//! ```
//!
//! The interior unknowns are numbered row by row in `t`, so the interior
//! block is banded with bandwidth `n_θ`.

use crate::eigencore::{self, PartitionedSystem, SymBand, SymMatrix};
use crate::spectra_closed::ClosedSpectrum;
use crate::sturm_dtn::{BaseGeometry, EndCondition, Mesh, MeshSpec, MIN_TRANSITION_ELEMENTS};
use crate::warp_profile::{MetricMode, Warp, WarpedMetricSpec};
use crate::warped_assembler;
use crate::{Error, Result};

pub const MIN_AXIAL_NODES: usize = 32;
pub const MIN_FIBER_NODES: usize = 16;

#[derive(Debug, Clone)]
pub struct RevolutionGrid {
    /// Requested axial node count; graded meshes around warp transitions may add nodes.
    pub n_t: usize,
    pub n_theta: usize,
    pub length: f64,
    pub fiber_length: f64,
    pub warp: Warp,
    pub left: EndCondition,
    pub right: EndCondition,
}

impl RevolutionGrid {
    pub fn new(
        n_t: usize,
        n_theta: usize,
        length: f64,
        fiber_length: f64,
        warp: Warp,
        left: EndCondition,
        right: EndCondition,
    ) -> Result<Self> {
        let g = Self {
            n_t,
            n_theta,
            length,
            fiber_length,
            warp,
            left,
            right,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.n_t < MIN_AXIAL_NODES {
            return Err(Error::Domain(format!(
                "n_t = {} is below the minimum {MIN_AXIAL_NODES}",
                self.n_t
            )));
        }
        if self.n_theta < MIN_FIBER_NODES || self.n_theta % 2 != 0 {
            return Err(Error::Domain(format!(
                "n_theta must be even and at least {MIN_FIBER_NODES}, got {}",
                self.n_theta
            )));
        }
        for (name, v) in [("length", self.length), ("fiber_length", self.fiber_length)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.left != EndCondition::Steklov && self.right != EndCondition::Steklov {
            return Err(Error::Domain("at least one boundary circle must be Steklov".into()));
        }
        self.warp.validate(self.length, 257)
    }

    /// Same geometry with both node counts halved (kept even).
    pub fn coarsened(&self) -> Self {
        Self {
            n_t: (self.n_t / 2).max(MIN_AXIAL_NODES),
            n_theta: ((self.n_theta / 2).max(MIN_FIBER_NODES) + 1) & !1,
            ..self.clone()
        }
    }

    pub fn axial_nodes(&self) -> Result<Vec<f64>> {
        let spec = MeshSpec {
            elements: self.n_t - 1,
            min_per_transition: MIN_TRANSITION_ELEMENTS,
        };
        Ok(Mesh::graded(self.length, &spec, &self.warp.transitions())?
            .nodes()
            .to_vec())
    }

    /// The equivalent warped-product description `[0, L] ×_h S¹`.
    pub fn metric_spec(&self, fiber_length: f64) -> Result<WarpedMetricSpec> {
        WarpedMetricSpec::new(
            1,
            1,
            self.warp.clone(),
            BaseGeometry::interval(self.length, self.left, self.right),
            ClosedSpectrum::circle(fiber_length, 16)?,
            MetricMode::PlainWarp,
        )
    }
}

/// Interior/boundary split of the grid energy.
pub fn assemble_grid(grid: &RevolutionGrid) -> Result<PartitionedSystem> {
    grid.validate()?;
    let t = grid.axial_nodes()?;
    let nt = t.len();
    let m = grid.n_theta;
    let dtheta = grid.fiber_length / m as f64;
    let h: Vec<f64> = t.iter().map(|&x| grid.warp.h(x)).collect();

    let left_boundary = grid.left == EndCondition::Steklov;
    let right_boundary = grid.right == EndCondition::Steklov;
    let first_row = usize::from(left_boundary);
    let last_row = if right_boundary { nt - 2 } else { nt - 1 };
    let interior_rows = last_row + 1 - first_row;

    // Boundary slots: left circle first, then right circle.
    let boundary_rows: Vec<usize> = [(left_boundary, 0), (right_boundary, nt - 1)]
        .iter()
        .filter(|(b, _)| *b)
        .map(|&(_, r)| r)
        .collect();
    let slot = |i: usize, j: usize| -> std::result::Result<usize, usize> {
        match boundary_rows.iter().position(|&r| r == i) {
            Some(k) => Ok(k * m + j),
            None => Err((i - first_row) * m + j),
        }
    };

    let nb = boundary_rows.len() * m;
    let mut interior = SymBand::zeros(interior_rows * m, m);
    let mut a_bb = SymMatrix::zeros(nb);
    let mut coupling = vec![Vec::new(); nb];
    // Edge (p, q) with conductance c contributes c (u_p - u_q)².
    let mut add_edge = |p: (usize, usize), q: (usize, usize), c: f64| {
        let (sp, sq) = (slot(p.0, p.1), slot(q.0, q.1));
        for s in [sp, sq] {
            match s {
                Err(a) => interior.add(a, a, c),
                Ok(a) => a_bb.add(a, a, c),
            }
        }
        match (sp, sq) {
            (Err(a), Err(b)) => interior.add(a.max(b), a.min(b), -c),
            (Ok(a), Ok(b)) => a_bb.add(a, b, -c),
            (Ok(b), Err(r)) | (Err(r), Ok(b)) => coupling[b].push((r, -c)),
        }
    };

    for i in 0..nt {
        let dual = 0.5
            * (if i > 0 { t[i] - t[i - 1] } else { 0.0 }
                + if i + 1 < nt { t[i + 1] - t[i] } else { 0.0 });
        let angular = dual / (h[i] * dtheta);
        for j in 0..m {
            add_edge((i, j), (i, (j + 1) % m), angular);
            if i + 1 < nt {
                let axial = 0.5 * (h[i] + h[i + 1]) * dtheta / (t[i + 1] - t[i]);
                add_edge((i, j), (i + 1, j), axial);
            }
        }
    }

    let boundary_mass = boundary_rows
        .iter()
        .flat_map(|&r| std::iter::repeat_n(h[r] * dtheta, m))
        .collect();
    Ok(PartitionedSystem {
        interior,
        coupling,
        boundary: a_bb,
        boundary_mass,
    })
}

/// The mass-normalized discrete DtN matrix of the grid.
pub fn revolution_dtn_matrix(grid: &RevolutionGrid) -> Result<SymMatrix> {
    eigencore::dtn_matrix(&assemble_grid(grid)?)
}

/// All discrete Steklov eigenvalues, ascending.
pub fn revolution_spectrum(grid: &RevolutionGrid) -> Result<Vec<f64>> {
    Ok(eigencore::sym_eigenvalues(&revolution_dtn_matrix(grid)?)?
        .into_iter()
        .map(|v| v.max(0.0))
        .collect())
}

/// The first `count` discrete Steklov eigenvalues, ascending.
pub fn revolution_steklov(grid: &RevolutionGrid, count: usize) -> Result<Vec<f64>> {
    grid.validate()?;
    let circles = [grid.left, grid.right]
        .iter()
        .filter(|e| **e == EndCondition::Steklov)
        .count();
    let available = circles * grid.n_theta;
    if count == 0 || count > available {
        return Err(Error::Domain(format!(
            "count must lie in 1..={available} (boundary nodes), got {count}"
        )));
    }
    let mut v = revolution_spectrum(grid)?;
    v.truncate(count);
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub top: f64,
    pub tolerance: f64,
    /// `(oracle, assembler)` pairs of sorted eigenvalues ≤ top.
    pub pairs: Vec<(f64, f64)>,
    pub oracle_count: usize,
    pub assembler_count: usize,
    pub max_relative_deviation: f64,
    /// The first value present on one side only, if the counts differ.
    pub first_unmatched: Option<f64>,
    /// Whether the oracle count ≤ top is unchanged on the halved grid.
    pub converged: bool,
    pub passed: bool,
}

/// Relative deviation with values below 1e-8 treated as zero.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-8 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Pairs two sorted lists of eigenvalues ≤ top.
pub fn compare_lists(oracle: &[f64], assembled: &[f64], top: f64, tolerance: f64) -> ComparisonReport {
    let o: Vec<f64> = oracle.iter().copied().filter(|v| *v <= top).collect();
    let a: Vec<f64> = assembled.iter().copied().filter(|v| *v <= top).collect();
    let pairs: Vec<(f64, f64)> = o.iter().copied().zip(a.iter().copied()).collect();
    let max_relative_deviation = pairs
        .iter()
        .map(|&(x, y)| relative_deviation(x, y))
        .fold(0.0, f64::max);
    let first_unmatched = match o.len().cmp(&a.len()) {
        std::cmp::Ordering::Less => Some(a[o.len()]),
        std::cmp::Ordering::Greater => Some(o[a.len()]),
        std::cmp::Ordering::Equal => None,
    };
    ComparisonReport {
        top,
        tolerance,
        oracle_count: o.len(),
        assembler_count: a.len(),
        passed: first_unmatched.is_none() && max_relative_deviation <= tolerance,
        pairs,
        max_relative_deviation,
        first_unmatched,
        converged: true,
    }
}

/// Runs the grid oracle and the separated solver on the same surface.
pub fn compare_with_assembler(grid: &RevolutionGrid, top: f64, tolerance: f64) -> Result<ComparisonReport> {
    compare_with_fiber(grid, grid.fiber_length, top, tolerance)
}

/// Like [`compare_with_assembler`], but the separated side uses a circle
/// fiber of `assembler_fiber_length`.
pub fn compare_with_fiber(
    grid: &RevolutionGrid,
    assembler_fiber_length: f64,
    top: f64,
    tolerance: f64,
) -> Result<ComparisonReport> {
    if !(top > 0.0) {
        return Err(Error::Domain(format!("top must be positive, got {top}")));
    }
    let oracle = revolution_spectrum(grid)?;
    let coarse = revolution_spectrum(&grid.coarsened())?;
    let spec = grid.metric_spec(assembler_fiber_length)?;
    let mesh = MeshSpec {
        elements: (4 * grid.n_t).max(400),
        min_per_transition: 4 * MIN_TRANSITION_ELEMENTS,
    };
    let assembled = warped_assembler::steklov_spectrum_warped(&spec, top, &mesh)?.values();
    let mut report = compare_lists(&oracle, &assembled, top, tolerance);
    let coarse_count = coarse.iter().filter(|v| **v <= top).count();
    report.converged = coarse_count == report.oracle_count;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn cylinder(n_t: usize, n_theta: usize, length: f64, right: EndCondition) -> RevolutionGrid {
        RevolutionGrid::new(
            n_t,
            n_theta,
            length,
            TAU,
            Warp::Constant(1.0),
            EndCondition::Steklov,
            right,
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        let bad = |n_t, n_theta| {
            RevolutionGrid::new(n_t, n_theta, 1.0, TAU, Warp::Constant(1.0), EndCondition::Steklov, EndCondition::Steklov)
        };
        assert!(bad(16, 32).is_err());
        assert!(bad(64, 17).is_err());
        assert!(bad(64, 8).is_err());
        let g = cylinder(32, 16, 1.0, EndCondition::Steklov);
        assert!(revolution_steklov(&g, 33).is_err());
    }

    #[test]
    fn interior_block_is_banded_and_symmetric() {
        let sys = assemble_grid(&cylinder(40, 16, 1.0, EndCondition::Steklov)).unwrap();
        assert_eq!(sys.interior.bandwidth(), 16);
        assert_eq!(sys.interior_len(), 38 * 16);
        assert_eq!(sys.boundary_len(), 32);
        let d = sys.interior.to_dense();
        for i in 0..d.order() {
            for j in 0..d.order() {
                assert!((d.get(i, j) - d.get(j, i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixed_cylinder() {
        let v = revolution_steklov(&cylinder(128, 64, 1.0, EndCondition::Neumann), 3).unwrap();
        let t = 1f64.tanh();
        assert!(v[0].abs() < 1e-9);
        assert!((v[1] - t).abs() / t < 2e-3, "{v:?}");
        assert!((v[2] - t).abs() / t < 2e-3, "{v:?}");
    }

    #[test]
    fn constant_warp_rescales_fiber() {
        // dt² + c² dθ² on a 2π fiber is the flat cylinder with fiber length 2πc.
        let c = 1.5;
        let g = RevolutionGrid::new(
            128,
            64,
            2.0,
            TAU,
            Warp::Constant(c),
            EndCondition::Steklov,
            EndCondition::Steklov,
        )
        .unwrap();
        let v = revolution_steklov(&g, 3).unwrap();
        let s = 1.0 / c;
        let expect = s * (s * 1.0).tanh();
        assert!((v[1] - expect).abs() / expect < 2e-3, "{v:?} vs {expect}");
    }

    #[test]
    fn rotation_leaves_dtn_unchanged() {
        let g = RevolutionGrid::new(
            40,
            16,
            1.0,
            TAU,
            Warp::function(|t| 1.0 + t * (1.0 - t)),
            EndCondition::Steklov,
            EndCondition::Steklov,
        )
        .unwrap();
        let d = revolution_dtn_matrix(&g).unwrap();
        let m = 16;
        let rot = |i: usize| (i / m) * m + (i % m + 1) % m;
        for i in 0..d.order() {
            for j in 0..d.order() {
                assert!((d.get(rot(i), rot(j)) - d.get(i, j)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mismatched_fiber_fails() {
        let g = cylinder(64, 32, 2.0, EndCondition::Steklov);
        let r = compare_with_fiber(&g, TAU / 2.0, 2.0, 5e-3).unwrap();
        assert!(!r.passed);
        assert!(r.first_unmatched.is_some() || r.max_relative_deviation > 5e-3);
    }
}
