//! Exact Laplace spectra of the closed manifolds used as fibers `F` and as
//! boundary cross-sections `Σ`.
//!
//! Spectra are stored as distinct values with multiplicities, ascending.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance used to merge torus lattice values when the squared
/// side lengths are not commensurable.
const TORUS_MERGE_RTOL: f64 = 1e-12;

/// One distinct eigenvalue and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumKind {
    /// Zero-dimensional closed manifold; the cross-section of an interval base.
    Point,
    Circle { length: f64 },
    FlatTorus { l1: f64, l2: f64 },
    /// User-supplied list; nothing is known beyond its last entry.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSpectrum {
    kind: SpectrumKind,
    entries: Vec<Level>,
}

impl ClosedSpectrum {
    pub fn point() -> Self {
        Self {
            kind: SpectrumKind::Point,
            entries: vec![Level {
                value: 0.0,
                multiplicity: 1,
            }],
        }
    }

    /// First `count` distinct eigenvalues `(2πj/length)²` of a circle.
    pub fn circle(length: f64, count: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!(
                "circle length must be positive, got {length}"
            )));
        }
        if count == 0 {
            return Err(Error::Domain("spectrum count must be at least 1".into()));
        }
        let entries = (0..count)
            .map(|j| Level {
                value: (TAU * j as f64 / length).powi(2),
                multiplicity: if j == 0 { 1 } else { 2 },
            })
            .collect();
        Ok(Self {
            kind: SpectrumKind::Circle { length },
            entries,
        })
    }

    /// First `count` distinct eigenvalues `(2πa/l1)² + (2πb/l2)²` of the flat
    /// torus `R²/(l1 Z × l2 Z)`.
    pub fn flat_torus(l1: f64, l2: f64, count: usize) -> Result<Self> {
        for (name, l) in [("l1", l1), ("l2", l2)] {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::Domain(format!(
                    "torus side {name} must be positive, got {l}"
                )));
            }
        }
        if count == 0 {
            return Err(Error::Domain("spectrum count must be at least 1".into()));
        }
        let ratio = rational_approximation((l2 / l1).powi(2));
        let scale = (TAU / l1.min(l2)).powi(2);
        let mut bound = scale * count as f64;
        loop {
            let levels = torus_levels(l1, l2, bound, ratio);
            if levels.len() >= count {
                return Ok(Self {
                    kind: SpectrumKind::FlatTorus { l1, l2 },
                    entries: levels.into_iter().take(count).collect(),
                });
            }
            bound *= 2.0;
        }
    }

    /// A spectrum given as `(value, multiplicity)` pairs. Values must be
    /// strictly increasing and start at 0.
    pub fn explicit(levels: &[(f64, usize)]) -> Result<Self> {
        let entries: Vec<Level> = levels
            .iter()
            .map(|&(value, multiplicity)| Level {
                value,
                multiplicity,
            })
            .collect();
        let Some(first) = entries.first() else {
            return Err(Error::Domain("explicit spectrum is empty".into()));
        };
        if first.value != 0.0 {
            return Err(Error::Domain(format!(
                "closed-manifold spectrum must start at 0, got {}",
                first.value
            )));
        }
        for pair in entries.windows(2) {
            if !(pair[1].value > pair[0].value) {
                return Err(Error::Domain(format!(
                    "explicit spectrum values must be strictly increasing ({} then {})",
                    pair[0].value, pair[1].value
                )));
            }
        }
        if let Some(bad) = entries.iter().find(|l| l.multiplicity == 0 || !l.value.is_finite()) {
            return Err(Error::Domain(format!("invalid spectrum entry {bad:?}")));
        }
        Ok(Self {
            kind: SpectrumKind::Explicit,
            entries,
        })
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    pub fn entries(&self) -> &[Level] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when the stored entries are the whole spectrum.
    pub fn is_exhaustive(&self) -> bool {
        matches!(self.kind, SpectrumKind::Point)
    }

    /// Multiplicity of the eigenvalue 0, i.e. the number of components.
    pub fn component_count(&self) -> usize {
        self.entries[0].multiplicity
    }

    /// First non-zero eigenvalue, if the stored entries reach it.
    pub fn first_nonzero(&self) -> Option<Level> {
        self.entries.iter().copied().find(|l| l.value > 0.0)
    }

    /// Largest stored eigenvalue.
    pub fn last_value(&self) -> f64 {
        self.entries.last().map_or(0.0, |l| l.value)
    }

    /// All entries with value `<= bound`. Fails when eigenvalues `<= bound`
    /// could lie beyond the stored entries.
    pub fn truncate_below(&self, bound: f64) -> Result<Self> {
        if !(bound >= 0.0) {
            return Err(Error::Domain(format!(
                "truncation bound must be non-negative, got {bound}"
            )));
        }
        if !self.is_exhaustive() && bound > self.last_value() {
            return Err(Error::Incomplete(format!(
                "{} stored eigenvalues end at {}, cannot certify all values <= {bound}",
                self.len(),
                self.last_value()
            )));
        }
        Ok(Self {
            kind: self.kind.clone(),
            entries: self
                .entries
                .iter()
                .copied()
                .take_while(|l| l.value <= bound)
                .collect(),
        })
    }

    /// Regenerates an analytic spectrum with at least `count` entries.
    /// Explicit spectra cannot grow.
    pub fn grown(&self, count: usize) -> Result<Self> {
        if count <= self.len() || self.is_exhaustive() {
            return Ok(self.clone());
        }
        match self.kind {
            SpectrumKind::Circle { length } => Self::circle(length, count),
            SpectrumKind::FlatTorus { l1, l2 } => Self::flat_torus(l1, l2, count),
            SpectrumKind::Point => Ok(self.clone()),
            SpectrumKind::Explicit => Err(Error::Incomplete(format!(
                "explicit spectrum has {} entries, {count} needed",
                self.len()
            ))),
        }
    }

    /// Multiplies every eigenvalue by `factor`, as for a homothety of the
    /// metric by `1/factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::Domain(format!("scale factor must be positive, got {factor}")));
        }
        let kind = match self.kind {
            SpectrumKind::Circle { length } => SpectrumKind::Circle {
                length: length / factor.sqrt(),
            },
            SpectrumKind::FlatTorus { l1, l2 } => SpectrumKind::FlatTorus {
                l1: l1 / factor.sqrt(),
                l2: l2 / factor.sqrt(),
            },
            ref other => other.clone(),
        };
        Ok(Self {
            kind,
            entries: self
                .entries
                .iter()
                .map(|l| Level {
                    value: l.value * factor,
                    multiplicity: l.multiplicity,
                })
                .collect(),
        })
    }
}

pub fn circle_spectrum(length: f64, count: usize) -> Result<ClosedSpectrum> {
    ClosedSpectrum::circle(length, count)
}

pub fn flat_torus_spectrum(l1: f64, l2: f64, count: usize) -> Result<ClosedSpectrum> {
    ClosedSpectrum::flat_torus(l1, l2, count)
}

pub fn truncate_below(spec: &ClosedSpectrum, bound: f64) -> Result<ClosedSpectrum> {
    spec.truncate_below(bound)
}

/// `x ≈ p/q` with `q <= 10⁴` and relative error below `1e-12`.
fn rational_approximation(x: f64) -> Option<(u64, u64)> {
    const MAX_DEN: u64 = 10_000;
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            return None;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DEN {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64 / k1 as f64) - x).abs() <= 1e-12 * x.abs() {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Distinct lattice values `<= bound`, each with its summed multiplicity.
fn torus_levels(l1: f64, l2: f64, bound: f64, ratio: Option<(u64, u64)>) -> Vec<Level> {
    let amax = (l1 * bound.sqrt() / TAU).floor() as u64;
    let bmax = (l2 * bound.sqrt() / TAU).floor() as u64;
    // (a², b², value, multiplicity) over a, b >= 0; sign choices give the multiplicity.
    let mut points = Vec::new();
    for a in 0..=amax {
        for b in 0..=bmax {
            let value = (TAU * a as f64 / l1).powi(2) + (TAU * b as f64 / l2).powi(2);
            if value <= bound {
                let mult = if a > 0 { 2 } else { 1 } * if b > 0 { 2 } else { 1 };
                points.push((a * a, b * b, value, mult));
            }
        }
    }
    match ratio {
        // (l2/l1)² = p/q: value ∝ a² + b² q/p, so a²p + b²q is an exact key.
        Some((p, q)) => {
            let mut groups: BTreeMap<u128, Level> = BTreeMap::new();
            for (a2, b2, value, mult) in points {
                let key = a2 as u128 * p as u128 + b2 as u128 * q as u128;
                groups
                    .entry(key)
                    .and_modify(|l| l.multiplicity += mult)
                    .or_insert(Level {
                        value,
                        multiplicity: mult,
                    });
            }
            groups.into_values().collect()
        }
        None => {
            points.sort_by(|x, y| x.2.total_cmp(&y.2));
            let mut levels: Vec<Level> = Vec::new();
            for (_, _, value, mult) in points {
                match levels.last_mut() {
                    Some(last) if (value - last.value).abs() <= TORUS_MERGE_RTOL * value.abs() => {
                        last.multiplicity += mult
                    }
                    _ => levels.push(Level {
                        value,
                        multiplicity: mult,
                    }),
                }
            }
            levels
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &ClosedSpectrum) -> Vec<(f64, usize)> {
        s.entries().iter().map(|l| (l.value, l.multiplicity)).collect()
    }

    fn assert_levels(s: &ClosedSpectrum, expected: &[(f64, usize)]) {
        let got = pairs(s);
        assert_eq!(got.len(), expected.len(), "{got:?} vs {expected:?}");
        for ((v, m), (ev, em)) in got.iter().zip(expected) {
            assert!((v - ev).abs() <= 1e-12 * ev.max(1.0), "{got:?} vs {expected:?}");
            assert_eq!(m, em);
        }
    }

    #[test]
    fn circle_examples() {
        assert_levels(&ClosedSpectrum::circle(TAU, 3).unwrap(), &[(0.0, 1), (1.0, 2), (4.0, 2)]);
        assert_levels(&ClosedSpectrum::circle(TAU, 1).unwrap(), &[(0.0, 1)]);
        assert_levels(
            &ClosedSpectrum::circle(std::f64::consts::PI, 2).unwrap(),
            &[(0.0, 1), (4.0, 2)],
        );
    }

    #[test]
    fn circle_rejects_bad_length() {
        assert!(matches!(ClosedSpectrum::circle(0.0, 3), Err(Error::Domain(_))));
        assert!(matches!(ClosedSpectrum::circle(-1.0, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn torus_examples() {
        assert_levels(
            &ClosedSpectrum::flat_torus(TAU, TAU, 3).unwrap(),
            &[(0.0, 1), (1.0, 4), (2.0, 4)],
        );
        assert_levels(&ClosedSpectrum::flat_torus(TAU, TAU, 1).unwrap(), &[(0.0, 1)]);
        assert_levels(
            &ClosedSpectrum::flat_torus(TAU, 2.0 * TAU, 2).unwrap(),
            &[(0.0, 1), (0.25, 2)],
        );
        assert!(ClosedSpectrum::flat_torus(TAU, 0.0, 2).is_err());
    }

    #[test]
    fn square_torus_value_five_has_multiplicity_eight() {
        // a² + b² = 5: (±1, ±2), (±2, ±1)
        let t = ClosedSpectrum::flat_torus(TAU, TAU, 5).unwrap();
        assert_levels(&t, &[(0.0, 1), (1.0, 4), (2.0, 4), (4.0, 4), (5.0, 8)]);
    }

    #[test]
    fn incommensurable_torus_keeps_values_apart() {
        let t = ClosedSpectrum::flat_torus(TAU, TAU * 2f64.sqrt().sqrt(), 6).unwrap();
        for pair in t.entries().windows(2) {
            assert!(pair[1].value > pair[0].value * (1.0 + 1e-9));
        }
    }

    #[test]
    fn truncation() {
        let c = ClosedSpectrum::circle(TAU, 3).unwrap();
        assert_levels(&c.truncate_below(2.0).unwrap(), &[(0.0, 1), (1.0, 2)]);
        assert_levels(&c.truncate_below(0.0).unwrap(), &[(0.0, 1)]);
        assert!(matches!(c.truncate_below(100.0), Err(Error::Incomplete(_))));
        assert_levels(&ClosedSpectrum::point().truncate_below(100.0).unwrap(), &[(0.0, 1)]);
    }

    #[test]
    fn explicit_validation() {
        assert!(ClosedSpectrum::explicit(&[(0.0, 1), (2.0, 3)]).is_ok());
        assert!(ClosedSpectrum::explicit(&[(1.0, 1)]).is_err());
        assert!(ClosedSpectrum::explicit(&[(0.0, 1), (2.0, 1), (2.0, 1)]).is_err());
        assert!(ClosedSpectrum::explicit(&[(0.0, 0)]).is_err());
        let e = ClosedSpectrum::explicit(&[(0.0, 2), (3.0, 1)]).unwrap();
        assert_eq!(e.component_count(), 2);
        assert!(matches!(e.grown(5), Err(Error::Incomplete(_))));
        assert!(matches!(e.truncate_below(4.0), Err(Error::Incomplete(_))));
    }

    #[test]
    fn growth_extends_analytic_spectra() {
        let c = ClosedSpectrum::circle(TAU, 2).unwrap().grown(6).unwrap();
        assert_eq!(c.len(), 6);
        assert!((c.last_value() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn rational_detection() {
        assert_eq!(rational_approximation(4.0), Some((4, 1)));
        assert_eq!(rational_approximation(0.25), Some((1, 4)));
        assert_eq!(rational_approximation(2.0f64.sqrt()), None);
    }
}
