//! Weighted 1D Dirichlet-to-Neumann problems on a collar base.
//!
//! After separating the cross-section mode `μ` and the fiber eigenvalue `λ`,
//! the auxiliary problem `(L_h + λ h⁻²) f = 0` on `Σ × [0, ℓ]` reduces to
//!
//! ```text
//!   -(w a')' + q a = 0   on [0, ℓ],     q = μ w + λ (fiber coefficient)
//! ```
//!
//! with `w a'` balanced against `σ · (boundary weight) · a` at Steklov ends
//! and `a' = 0` at Neumann ends. Discretization: piecewise-linear elements,
//! midpoint rule for `w`, trapezoidal (lumped) rule for `q`.

use serde::{Deserialize, Serialize};

use crate::eigencore::{self, PartitionedSystem, SymBand, SymMatrix};
use crate::spectra_closed::ClosedSpectrum;
use crate::spectrum::{Source, SpectrumWithProvenance};
use crate::warp_profile::CoefficientFn;
use crate::{par, Error, Result};

/// Fewest elements accepted for a 1D problem.
pub const MIN_ELEMENTS: usize = 16;
/// Fewest elements accepted inside each warp transition interval.
pub const MIN_TRANSITION_ELEMENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndCondition {
    Steklov,
    Neumann,
}

/// Boundary condition of a single 1D problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Steklov { boundary_weight: f64 },
    Neumann,
}

impl Endpoint {
    pub fn is_steklov(&self) -> bool {
        matches!(self, Endpoint::Steklov { .. })
    }
}

/// The collar `Σ × [0, ℓ]` with a known cross-section spectrum and a
/// boundary condition at each end.
#[derive(Debug, Clone)]
pub struct BaseGeometry {
    pub cross_section: ClosedSpectrum,
    pub collar_length: f64,
    pub left: EndCondition,
    pub right: EndCondition,
}

impl BaseGeometry {
    pub fn collar(
        cross_section: ClosedSpectrum,
        collar_length: f64,
        left: EndCondition,
        right: EndCondition,
    ) -> Self {
        Self {
            cross_section,
            collar_length,
            left,
            right,
        }
    }

    /// The interval `[0, ℓ]`: a collar over a point.
    pub fn interval(length: f64, left: EndCondition, right: EndCondition) -> Self {
        Self::collar(ClosedSpectrum::point(), length, left, right)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.collar_length > 0.0) || !self.collar_length.is_finite() {
            return Err(Error::Domain(format!(
                "collar length must be positive, got {}",
                self.collar_length
            )));
        }
        if self.left != EndCondition::Steklov && self.right != EndCondition::Steklov {
            return Err(Error::Domain(
                "at least one end of the collar must carry the Steklov condition".into(),
            ));
        }
        Ok(())
    }

    /// Number of connected components of the Steklov boundary.
    pub fn steklov_components(&self) -> usize {
        let ends = [self.left, self.right]
            .iter()
            .filter(|e| **e == EndCondition::Steklov)
            .count();
        ends * self.cross_section.component_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    /// Target element count over the whole collar.
    pub elements: usize,
    /// Minimum elements per segment between warp breakpoints.
    #[serde(default = "default_min_per_transition")]
    pub min_per_transition: usize,
}

fn default_min_per_transition() -> usize {
    16
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            elements: 400,
            min_per_transition: default_min_per_transition(),
        }
    }
}

impl MeshSpec {
    pub fn new(elements: usize) -> Self {
        Self {
            elements,
            ..Self::default()
        }
    }

    /// Same grading, twice the elements.
    pub fn refined(&self) -> Self {
        Self {
            elements: 2 * self.elements,
            min_per_transition: 2 * self.min_per_transition,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
}

impl Mesh {
    pub fn uniform(length: f64, elements: usize) -> Result<Self> {
        if !(length > 0.0) || elements == 0 {
            return Err(Error::Domain(format!(
                "uniform mesh needs positive length and elements, got {length}, {elements}"
            )));
        }
        Ok(Self {
            nodes: (0..=elements)
                .map(|i| length * i as f64 / elements as f64)
                .collect(),
        })
    }

    /// Piecewise-uniform mesh whose segments are delimited by the endpoints
    /// of `transitions`. Every segment gets its share of `spec.elements` by
    /// length, but never fewer than `spec.min_per_transition`.
    pub fn graded(length: f64, spec: &MeshSpec, transitions: &[(f64, f64)]) -> Result<Self> {
        if spec.elements < MIN_ELEMENTS {
            return Err(Error::Domain(format!(
                "mesh needs at least {MIN_ELEMENTS} elements, got {}",
                spec.elements
            )));
        }
        if transitions.is_empty() {
            return Self::uniform(length, spec.elements);
        }
        if spec.min_per_transition < MIN_TRANSITION_ELEMENTS {
            return Err(Error::Domain(format!(
                "at least {MIN_TRANSITION_ELEMENTS} elements per transition required, got {}",
                spec.min_per_transition
            )));
        }
        let mut breaks = vec![0.0, length];
        for &(a, b) in transitions {
            for x in [a, b] {
                if x > 0.0 && x < length {
                    breaks.push(x);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * length);
        let mut nodes = vec![0.0];
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let share = (spec.elements as f64 * (b - a) / length).round() as usize;
            let count = share.max(spec.min_per_transition);
            for i in 1..=count {
                nodes.push(if i == count {
                    b
                } else {
                    a + (b - a) * i as f64 / count as f64
                });
            }
        }
        Ok(Self { nodes })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(Error::Domain("mesh nodes must start at 0 and have two or more nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("mesh nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn length(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Elements whose midpoint lies in `[a, b]`.
    pub fn elements_within(&self, a: f64, b: f64) -> usize {
        self.nodes
            .windows(2)
            .filter(|w| {
                let m = 0.5 * (w[0] + w[1]);
                m >= a && m <= b
            })
            .count()
    }
}

/// `-(w a')' + q a = 0` on a meshed interval with Steklov/Neumann ends.
#[derive(Clone)]
pub struct SturmProblem {
    pub mesh: Mesh,
    pub weight: CoefficientFn,
    pub potential: CoefficientFn,
    pub left: Endpoint,
    pub right: Endpoint,
    /// Intervals that must hold at least [`MIN_TRANSITION_ELEMENTS`] elements.
    pub transitions: Vec<(f64, f64)>,
}

impl std::fmt::Debug for SturmProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SturmProblem")
            .field("elements", &self.mesh.elements())
            .field("length", &self.mesh.length())
            .field("left", &self.left)
            .field("right", &self.right)
            .field("transitions", &self.transitions)
            .finish()
    }
}

impl SturmProblem {
    pub fn new(
        mesh: Mesh,
        weight: impl Fn(f64) -> f64 + Send + Sync + 'static,
        potential: impl Fn(f64) -> f64 + Send + Sync + 'static,
        left: Endpoint,
        right: Endpoint,
    ) -> Self {
        Self {
            mesh,
            weight: std::sync::Arc::new(weight),
            potential: std::sync::Arc::new(potential),
            left,
            right,
            transitions: Vec::new(),
        }
    }

    pub fn with_transitions(mut self, transitions: Vec<(f64, f64)>) -> Self {
        self.transitions = transitions;
        self
    }

    pub fn length(&self) -> f64 {
        self.mesh.length()
    }

    fn validate(&self) -> Result<()> {
        if self.mesh.elements() < MIN_ELEMENTS {
            return Err(Error::Domain(format!(
                "mesh has {} elements, at least {MIN_ELEMENTS} required",
                self.mesh.elements()
            )));
        }
        if !self.left.is_steklov() && !self.right.is_steklov() {
            return Err(Error::Domain("at least one endpoint must be Steklov".into()));
        }
        for end in [self.left, self.right] {
            if let Endpoint::Steklov { boundary_weight } = end {
                if !(boundary_weight > 0.0) || !boundary_weight.is_finite() {
                    return Err(Error::Domain(format!(
                        "Steklov boundary weight must be positive, got {boundary_weight}"
                    )));
                }
            }
        }
        for &(a, b) in &self.transitions {
            let elements = self.mesh.elements_within(a, b);
            if elements < MIN_TRANSITION_ELEMENTS {
                return Err(Error::Resolution {
                    start: a,
                    end: b,
                    elements,
                    required: MIN_TRANSITION_ELEMENTS,
                });
            }
        }
        Ok(())
    }

    /// Element stiffness `w(mid)/Δ` per element and lumped nodal `∫ q φ_i`.
    fn element_data(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let nodes = self.mesh.nodes();
        let mut stiffness = Vec::with_capacity(nodes.len() - 1);
        let mut lumped = vec![0.0; nodes.len()];
        for (e, w) in nodes.windows(2).enumerate() {
            let d = w[1] - w[0];
            let mid = 0.5 * (w[0] + w[1]);
            let wm = (self.weight)(mid);
            if !(wm > 0.0) || !wm.is_finite() {
                return Err(Error::Domain(format!("weight w({mid}) = {wm} is not positive")));
            }
            stiffness.push(wm / d);
            lumped[e] += 0.5 * d;
            lumped[e + 1] += 0.5 * d;
        }
        for (x, m) in nodes.iter().zip(lumped.iter_mut()) {
            let q = (self.potential)(*x);
            if !(q >= 0.0) || !q.is_finite() {
                return Err(Error::Domain(format!("potential q({x}) = {q} is negative or not finite")));
            }
            *m *= q;
        }
        Ok((stiffness, lumped))
    }

    /// Boundary nodes in order (left first) with their Steklov weights.
    fn boundary_nodes(&self) -> Vec<(usize, f64)> {
        let last = self.mesh.elements();
        let mut out = Vec::new();
        if let Endpoint::Steklov { boundary_weight } = self.left {
            out.push((0, boundary_weight));
        }
        if let Endpoint::Steklov { boundary_weight } = self.right {
            out.push((last, boundary_weight));
        }
        out
    }

    /// Discrete energy `∫ (w f'² + q f²)` of nodal values `f`.
    pub fn energy(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.mesh.nodes().len() {
            return Err(Error::Domain(format!(
                "{} samples for {} mesh nodes",
                f.len(),
                self.mesh.nodes().len()
            )));
        }
        let (k, m) = self.element_data()?;
        let grad: f64 = k
            .iter()
            .enumerate()
            .map(|(e, ke)| ke * (f[e + 1] - f[e]).powi(2))
            .sum();
        let pot: f64 = m.iter().zip(f).map(|(mi, fi)| mi * fi * fi).sum();
        Ok(grad + pot)
    }
}

/// Stiffness plus lumped potential, split into interior and Steklov nodes.
/// Neumann ends stay interior (natural condition).
pub fn assemble(p: &SturmProblem) -> Result<PartitionedSystem> {
    p.validate()?;
    let (k, m) = p.element_data()?;
    let n_nodes = p.mesh.nodes().len();
    let boundary = p.boundary_nodes();

    // node -> Ok(boundary slot) | Err(interior index)
    let mut slot: Vec<std::result::Result<usize, usize>> = Vec::with_capacity(n_nodes);
    let mut next_interior = 0;
    for node in 0..n_nodes {
        match boundary.iter().position(|&(b, _)| b == node) {
            Some(s) => slot.push(Ok(s)),
            None => {
                slot.push(Err(next_interior));
                next_interior += 1;
            }
        }
    }

    let nb = boundary.len();
    let mut interior = SymBand::zeros(next_interior, 1);
    let mut a_bb = SymMatrix::zeros(nb);
    let mut coupling = vec![Vec::new(); nb];
    let mut add = |i: usize, j: usize, v: f64| match (slot[i], slot[j]) {
        (Err(a), Err(b)) => interior.add(a, b, v),
        (Ok(a), Ok(b)) => a_bb.add(a, b, v),
        (Ok(b), Err(r)) | (Err(r), Ok(b)) => coupling[b].push((r, v)),
    };
    for (e, ke) in k.iter().enumerate() {
        add(e, e, *ke);
        add(e + 1, e + 1, *ke);
        add(e + 1, e, -ke);
    }
    for (i, mi) in m.iter().enumerate() {
        add(i, i, *mi);
    }
    Ok(PartitionedSystem {
        interior,
        coupling,
        boundary: a_bb,
        boundary_mass: boundary.iter().map(|&(_, w)| w).collect(),
    })
}

/// One DtN eigenpair: the eigenvalue and the boundary trace of its eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMode {
    pub value: f64,
    /// Values at the Steklov nodes (left first), normalized in the boundary mass.
    pub boundary: Vec<f64>,
}

pub fn dtn_modes(p: &SturmProblem) -> Result<Vec<DtnMode>> {
    let sys = assemble(p)?;
    let d = eigencore::dtn_matrix(&sys)?;
    Ok(eigencore::sym_eig(&d)?
        .into_iter()
        .map(|pair| DtnMode {
            value: pair.value.max(0.0),
            boundary: pair
                .vector
                .iter()
                .zip(&sys.boundary_mass)
                .map(|(v, m)| v / m.sqrt())
                .collect(),
        })
        .collect())
}

/// The one (single Steklov end) or two (two Steklov ends) DtN eigenvalues, ascending.
pub fn dtn_eigenvalues(p: &SturmProblem) -> Result<Vec<f64>> {
    let sys = assemble(p)?;
    let d = eigencore::dtn_matrix(&sys)?;
    Ok(eigencore::sym_eigenvalues(&d)?
        .into_iter()
        .map(|v| v.max(0.0))
        .collect())
}

/// Nodal values of the discrete solution with the given Steklov traces.
pub fn extend(p: &SturmProblem, boundary: &[f64]) -> Result<Vec<f64>> {
    let sys = assemble(p)?;
    let interior = sys.harmonic_extension(boundary)?;
    let last = p.mesh.elements();
    let mut b = boundary.iter();
    let mut i = interior.iter();
    Ok((0..=last)
        .map(|node| {
            let on_boundary = (node == 0 && p.left.is_steklov()) || (node == last && p.right.is_steklov());
            if on_boundary {
                *b.next().unwrap()
            } else {
                *i.next().unwrap()
            }
        })
        .collect())
}

/// `∫ (w f'² + q f²) / Σ_Steklov weight f²` for nodal values `f`.
pub fn rayleigh_quotient(p: &SturmProblem, samples: &[f64]) -> Result<f64> {
    p.validate()?;
    let numerator = p.energy(samples)?;
    let denominator: f64 = p
        .boundary_nodes()
        .iter()
        .map(|&(node, w)| w * samples[node] * samples[node])
        .sum();
    if !(denominator > 0.0) {
        return Err(Error::UndefinedQuotient);
    }
    Ok(numerator / denominator)
}

/// Coefficient recipes shared by every mode of one auxiliary operator:
/// `q = μ · weight + λ · fiber`.
#[derive(Clone)]
pub struct Coefficients {
    pub weight: CoefficientFn,
    pub fiber: CoefficientFn,
    pub left_weight: f64,
    pub right_weight: f64,
    pub transitions: Vec<(f64, f64)>,
}

impl Coefficients {
    /// `w ≡ 1`, fiber term `≡ 1`, unit boundary weights: the flat product.
    pub fn unit() -> Self {
        Self {
            weight: std::sync::Arc::new(|_| 1.0),
            fiber: std::sync::Arc::new(|_| 1.0),
            left_weight: 1.0,
            right_weight: 1.0,
            transitions: Vec::new(),
        }
    }

    pub fn mode_problem(&self, geom: &BaseGeometry, mesh: &Mesh, mu: f64, lambda: f64) -> SturmProblem {
        let endpoint = |c: EndCondition, w: f64| match c {
            EndCondition::Steklov => Endpoint::Steklov { boundary_weight: w },
            EndCondition::Neumann => Endpoint::Neumann,
        };
        let weight = self.weight.clone();
        let fiber = self.fiber.clone();
        let w2 = weight.clone();
        let potential: CoefficientFn = if lambda == 0.0 {
            std::sync::Arc::new(move |t| mu * w2(t))
        } else if mu == 0.0 {
            std::sync::Arc::new(move |t| lambda * fiber(t))
        } else {
            std::sync::Arc::new(move |t| mu * w2(t) + lambda * fiber(t))
        };
        SturmProblem {
            mesh: mesh.clone(),
            weight,
            potential,
            left: endpoint(geom.left, self.left_weight),
            right: endpoint(geom.right, self.right_weight),
            transitions: self.transitions.clone(),
        }
    }
}

/// Mixed Steklov-Neumann spectrum `≤ top` of `L + λ h⁻²` on the collar, as
/// the union over cross-section modes `μ_j`.
///
/// Modes are consumed in ascending `μ`; the scan stops at the first mode
/// whose smallest eigenvalue exceeds `top`, which is complete because every
/// mode eigenvalue is non-decreasing in `μ`.
pub fn base_dtn_spectrum(
    geom: &BaseGeometry,
    coeffs: &Coefficients,
    mesh: &Mesh,
    lambda_fiber: f64,
    top: f64,
) -> Result<SpectrumWithProvenance> {
    Ok(SpectrumWithProvenance::from_sources(mode_sources(
        geom,
        coeffs,
        mesh,
        lambda_fiber,
        1,
        top,
    )?))
}

pub(crate) fn mode_sources(
    geom: &BaseGeometry,
    coeffs: &Coefficients,
    mesh: &Mesh,
    lambda_fiber: f64,
    fiber_multiplicity: usize,
    top: f64,
) -> Result<Vec<Source>> {
    if !(top > 0.0) {
        return Err(Error::Domain(format!("top must be positive, got {top}")));
    }
    if !(lambda_fiber >= 0.0) {
        return Err(Error::Domain(format!("fiber eigenvalue must be non-negative, got {lambda_fiber}")));
    }
    geom.validate()?;
    let chunk = par::threads().max(2);
    let mut cs = geom.cross_section.clone();
    let mut out = Vec::new();
    let mut start = 0;
    loop {
        let end = start + chunk;
        if end > cs.len() && !cs.is_exhaustive() {
            if let Ok(g) = cs.grown(end.max(2 * cs.len())) {
                cs = g;
            }
        }
        let avail = end.min(cs.len());
        if start >= avail {
            if cs.is_exhaustive() {
                return Ok(out);
            }
            return Err(Error::Incomplete(format!(
                "cross-section spectrum exhausted after {} modes (last μ = {}) with eigenvalues still <= {top}",
                cs.len(),
                cs.last_value()
            )));
        }
        let idx: Vec<usize> = (start..avail).collect();
        let levels = cs.entries();
        let solved = par::map(&idx, |&i| {
            let mode = levels[i];
            let p = coeffs.mode_problem(geom, mesh, mode.value, lambda_fiber);
            dtn_eigenvalues(&p).map(|v| (mode, v))
        });
        for r in solved {
            let (mode, values) = r?;
            if values[0] > top {
                return Ok(out);
            }
            for (branch, &value) in values.iter().enumerate().filter(|(_, v)| **v <= top) {
                out.push(Source {
                    value,
                    lambda_fiber,
                    fiber_multiplicity,
                    mu_mode: mode.value,
                    cross_section_multiplicity: mode.multiplicity,
                    branch,
                });
            }
        }
        start = avail;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn steklov() -> Endpoint {
        Endpoint::Steklov { boundary_weight: 1.0 }
    }

    fn problem(len: f64, n: usize, w: f64, q: f64, right: Endpoint) -> SturmProblem {
        SturmProblem::new(
            Mesh::uniform(len, n).unwrap(),
            move |_| w,
            move |_| q,
            steklov(),
            right,
        )
    }

    #[test]
    fn assembly_blocks() {
        let p = problem(1.0, 100, 1.0, 0.0, steklov());
        let sys = assemble(&p).unwrap();
        assert_eq!(sys.boundary_len(), 2);
        assert_eq!(sys.interior_len(), 99);
        // row sums of the full stiffness vanish
        let d = sys.interior.to_dense();
        for i in 0..99 {
            let mut s: f64 = (0..99).map(|j| d.get(i, j)).sum();
            for col in &sys.coupling {
                s += col.iter().filter(|(r, _)| *r == i).map(|(_, v)| v).sum::<f64>();
            }
            assert!(s.abs() < 1e-9, "row {i}: {s}");
        }
        for (b, col) in sys.coupling.iter().enumerate() {
            let s: f64 = (0..2).map(|j| sys.boundary.get(b, j)).sum::<f64>()
                + col.iter().map(|(_, v)| v).sum::<f64>();
            assert!(s.abs() < 1e-9);
        }
    }

    #[test]
    fn weight_scales_stiffness() {
        let a = assemble(&problem(1.0, 20, 1.0, 0.0, steklov())).unwrap();
        let b = assemble(&problem(1.0, 20, 2.0, 0.0, steklov())).unwrap();
        for i in 0..19 {
            for j in 0..19 {
                assert!((b.interior.get(i, j) - 2.0 * a.interior.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lumped_mass_sums_to_length() {
        let p = problem(1.0, 37, 1.0, 1.0, steklov());
        let ones = vec![1.0; 38];
        // energy of a constant is ∫ q = L
        assert!((p.energy(&ones).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_eigenvalues() {
        let ev = dtn_eigenvalues(&problem(1.0, 200, 1.0, 0.0, steklov())).unwrap();
        assert!(ev[0].abs() < 1e-10 && (ev[1] - 2.0).abs() < 1e-4);

        let ev = dtn_eigenvalues(&problem(2.0, 200, 1.0, 1.0, steklov())).unwrap();
        assert!((ev[0] - 1f64.tanh()).abs() < 1e-4, "{ev:?}");
        assert!((ev[1] - 1.0 / 1f64.tanh()).abs() < 1e-4, "{ev:?}");

        let ev = dtn_eigenvalues(&problem(1.0, 200, 1.0, 1.0, Endpoint::Neumann)).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - 1f64.tanh()).abs() < 1e-4);
    }

    #[test]
    fn coarse_transition_is_rejected() {
        let p = problem(1.0, 20, 1.0, 0.0, steklov()).with_transitions(vec![(0.05, 0.1)]);
        match assemble(&p) {
            Err(Error::Resolution { start, end, .. }) => {
                assert_eq!((start, end), (0.05, 0.1));
            }
            other => panic!("expected resolution error, got {other:?}"),
        }
        assert!(assemble(&problem(1.0, 10, 1.0, 0.0, steklov())).is_err());
    }

    #[test]
    fn needs_a_steklov_end() {
        let p = SturmProblem::new(
            Mesh::uniform(1.0, 20).unwrap(),
            |_| 1.0,
            |_| 1.0,
            Endpoint::Neumann,
            Endpoint::Neumann,
        );
        assert!(assemble(&p).is_err());
    }

    #[test]
    fn rayleigh_examples() {
        let p = problem(1.0, 50, 1.0, 0.0, steklov());
        assert_eq!(rayleigh_quotient(&p, &vec![1.0; 51]).unwrap(), 0.0);
        let mut zero_on_boundary = vec![1.0; 51];
        zero_on_boundary[0] = 0.0;
        zero_on_boundary[50] = 0.0;
        assert!(matches!(
            rayleigh_quotient(&p, &zero_on_boundary),
            Err(Error::UndefinedQuotient)
        ));

        let p = problem(2.0, 100, 1.0, 1.0, steklov());
        let modes = dtn_modes(&p).unwrap();
        let f = extend(&p, &modes[0].boundary).unwrap();
        let r = rayleigh_quotient(&p, &f).unwrap();
        assert!((r - modes[0].value).abs() < 1e-9);
    }

    #[test]
    fn graded_mesh_resolves_transitions() {
        let spec = MeshSpec {
            elements: 100,
            min_per_transition: 8,
        };
        let tr = vec![(0.005, 0.01), (0.02, 0.03)];
        let m = Mesh::graded(1.0, &spec, &tr).unwrap();
        for (a, b) in tr {
            assert!(m.elements_within(a, b) >= 8);
        }
        assert!(m.nodes().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*m.nodes().last().unwrap(), 1.0);
    }

    #[test]
    fn base_spectrum_of_flat_collar() {
        let geom = BaseGeometry::collar(
            ClosedSpectrum::circle(TAU, 3).unwrap(),
            2.0,
            EndCondition::Steklov,
            EndCondition::Steklov,
        );
        let mesh = Mesh::uniform(2.0, 400).unwrap();
        let s = base_dtn_spectrum(&geom, &Coefficients::unit(), &mesh, 0.0, 1.5).unwrap();
        let expect = [
            (0.0, 1),
            (1f64.tanh(), 2),
            (1.0, 1),
            (1.0 / 1f64.tanh(), 2),
        ];
        assert_eq!(s.entries().len(), 4);
        for (e, (v, m)) in s.entries().iter().zip(expect) {
            assert!((e.value - v).abs() < 1e-4, "{} vs {v}", e.value);
            assert_eq!(e.multiplicity, m);
        }

        let only_zero = base_dtn_spectrum(&geom, &Coefficients::unit(), &mesh, 0.0, 0.5).unwrap();
        assert_eq!(only_zero.values(), vec![only_zero.entries()[0].value]);

        // λ = 1 with h ≡ 1 on the μ = 0 mode gives the q ≡ 1 closed form
        let s = base_dtn_spectrum(&geom, &Coefficients::unit(), &mesh, 1.0, 1.35).unwrap();
        let mu0: Vec<f64> = s
            .sources()
            .filter(|x| x.mu_mode == 0.0)
            .map(|x| x.value)
            .collect();
        assert_eq!(mu0.len(), 2);
        assert!((mu0[0] - 1f64.tanh()).abs() < 1e-4);
        assert!((mu0[1] - 1.0 / 1f64.tanh()).abs() < 1e-4);
    }

    #[test]
    fn explicit_cross_section_can_run_out() {
        let geom = BaseGeometry::collar(
            ClosedSpectrum::explicit(&[(0.0, 1), (1.0, 2)]).unwrap(),
            2.0,
            EndCondition::Steklov,
            EndCondition::Steklov,
        );
        let mesh = Mesh::uniform(2.0, 100).unwrap();
        let r = base_dtn_spectrum(&geom, &Coefficients::unit(), &mesh, 0.0, 50.0);
        assert!(matches!(r, Err(Error::Incomplete(_))));
    }
}
