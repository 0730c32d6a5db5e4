//! Radial warping functions and the warped metrics built from them.
//!
//! A [`WarpProfile`] is the plateau family `h_{ε,δ}` on a collar `[0, ℓ]`:
//!
//! ```text
//!   h = 1      on [0, ε/2]
//!   h = ε^δ    on [ε, 2ε]
//!   h = ε^-2   on [3ε, ℓ]        (or [3ε, ℓ-3ε] when symmetric)
//! ```
//!
//! with quintic smoothstep transitions of `ln h` in between, which makes `h`
//! C² with monotone `ln h` on every transition.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::spectra_closed::ClosedSpectrum;
use crate::sturm_dtn::BaseGeometry;
use crate::{Error, Result};

pub type CoefficientFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Serialized form of a profile, as it appears in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRecord {
    pub epsilon: f64,
    pub delta: f64,
    pub collar_length: f64,
    #[serde(default)]
    pub symmetric: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRecord", into = "ProfileRecord")]
pub struct WarpProfile {
    epsilon: f64,
    delta: f64,
    collar_length: f64,
    symmetric: bool,
    mid: f64,
    far: f64,
    ln_mid: f64,
    ln_far: f64,
}

impl TryFrom<ProfileRecord> for WarpProfile {
    type Error = Error;

    fn try_from(r: ProfileRecord) -> Result<Self> {
        build_profile(r.epsilon, r.delta, r.collar_length, r.symmetric)
    }
}

impl From<WarpProfile> for ProfileRecord {
    fn from(p: WarpProfile) -> Self {
        ProfileRecord {
            epsilon: p.epsilon,
            delta: p.delta,
            collar_length: p.collar_length,
            symmetric: p.symmetric,
        }
    }
}

/// Builds the plateau profile. Requires `0 < ε < ℓ/6` and `0 < δ < 1`.
pub fn build_profile(
    epsilon: f64,
    delta: f64,
    collar_length: f64,
    symmetric: bool,
) -> Result<WarpProfile> {
    if !(collar_length > 0.0) || !collar_length.is_finite() {
        return Err(Error::Domain(format!(
            "collar length must be positive, got {collar_length}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(6.0 * epsilon < collar_length) {
        return Err(Error::Hypothesis(format!(
            "epsilon = {epsilon} must satisfy epsilon < collar_length/6 = {}",
            collar_length / 6.0
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let mid = epsilon.powf(delta);
    let far = epsilon.powi(-2);
    Ok(WarpProfile {
        epsilon,
        delta,
        collar_length,
        symmetric,
        mid,
        far,
        ln_mid: delta * epsilon.ln(),
        ln_far: -2.0 * epsilon.ln(),
    })
}

/// `x³(10 - 15x + 6x²)`: monotone on [0, 1], first and second derivatives
/// vanish at both ends.
fn smoothstep5(x: f64) -> f64 {
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

enum Segment {
    Near,
    DownRamp(f64),
    Mid,
    UpRamp(f64),
    Far,
}

impl WarpProfile {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn collar_length(&self) -> f64 {
        self.collar_length
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn near_value(&self) -> f64 {
        1.0
    }

    pub fn mid_value(&self) -> f64 {
        self.mid
    }

    pub fn far_value(&self) -> f64 {
        self.far
    }

    fn segment(&self, t: f64) -> Segment {
        let e = self.epsilon;
        let u = if self.symmetric {
            t.min(self.collar_length - t)
        } else {
            t
        };
        if u <= 0.5 * e {
            Segment::Near
        } else if u < e {
            Segment::DownRamp((u - 0.5 * e) / (0.5 * e))
        } else if u <= 2.0 * e {
            Segment::Mid
        } else if u < 3.0 * e {
            Segment::UpRamp((u - 2.0 * e) / e)
        } else {
            Segment::Far
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.collar_length {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t = {t} outside the collar [0, {}]",
                self.collar_length
            )))
        }
    }

    /// `ln h(t)` without domain checks; `t` is clamped to the collar.
    pub fn ln_h(&self, t: f64) -> f64 {
        match self.segment(t.clamp(0.0, self.collar_length)) {
            Segment::Near => 0.0,
            Segment::DownRamp(x) => self.ln_mid * smoothstep5(x),
            Segment::Mid => self.ln_mid,
            Segment::UpRamp(x) => self.ln_mid + (self.ln_far - self.ln_mid) * smoothstep5(x),
            Segment::Far => self.ln_far,
        }
    }

    /// `h(t)`; plateau values are returned exactly.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match self.segment(t) {
            Segment::Near => 1.0,
            Segment::Mid => self.mid,
            Segment::Far => self.far,
            _ => self.ln_h(t).exp(),
        })
    }

    /// `h(t)^p`, evaluated as `exp(p ln h)`.
    pub fn eval_power(&self, t: f64, p: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok((p * self.ln_h(t)).exp())
    }

    /// Transition intervals `[ε/2, ε]` and `[2ε, 3ε]`, mirrored about `ℓ/2`
    /// for symmetric profiles.
    pub fn transitions(&self) -> Vec<(f64, f64)> {
        let e = self.epsilon;
        let mut out = vec![(0.5 * e, e), (2.0 * e, 3.0 * e)];
        if self.symmetric {
            let l = self.collar_length;
            out.push((l - 3.0 * e, l - 2.0 * e));
            out.push((l - e, l - 0.5 * e));
        }
        out
    }
}

/// A warping function `h(t)` on the collar.
#[derive(Clone)]
pub enum Warp {
    /// `h = p^power` for a plateau profile `p`.
    Profile { profile: WarpProfile, power: f64 },
    Constant(f64),
    /// Any positive function of `t`.
    Function(CoefficientFn),
}

impl fmt::Debug for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warp::Profile { profile, power } => f
                .debug_struct("Profile")
                .field("profile", profile)
                .field("power", power)
                .finish(),
            Warp::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Warp::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl Warp {
    pub fn profile(profile: WarpProfile) -> Self {
        Warp::Profile {
            profile,
            power: 1.0,
        }
    }

    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Warp::Function(Arc::new(f))
    }

    pub fn ln_h(&self, t: f64) -> f64 {
        match self {
            Warp::Profile { profile, power } => {
                let l = profile.ln_h(t);
                if l == 0.0 {
                    0.0
                } else {
                    power * l
                }
            }
            Warp::Constant(c) => c.ln(),
            Warp::Function(f) => f(t).ln(),
        }
    }

    pub fn h(&self, t: f64) -> f64 {
        match self {
            Warp::Constant(c) => *c,
            Warp::Function(f) => f(t),
            Warp::Profile { .. } => self.ln_h(t).exp(),
        }
    }

    /// `h(t)^p` in log space.
    pub fn pow(&self, t: f64, p: f64) -> f64 {
        (p * self.ln_h(t)).exp()
    }

    pub fn transitions(&self) -> Vec<(f64, f64)> {
        match self {
            Warp::Profile { profile, .. } => profile.transitions(),
            _ => Vec::new(),
        }
    }

    /// Samples `h` on `samples` points of `[0, length]` and checks positivity.
    pub fn validate(&self, length: f64, samples: usize) -> Result<()> {
        if let Warp::Profile { profile, power } = self {
            if (profile.collar_length - length).abs() > 1e-12 * length {
                return Err(Error::Domain(format!(
                    "profile collar length {} differs from base length {length}",
                    profile.collar_length
                )));
            }
            if !(power.is_finite() && *power > 0.0) {
                return Err(Error::Domain(format!("profile power must be positive, got {power}")));
            }
        }
        let n = samples.max(2);
        for i in 0..n {
            let t = length * i as f64 / (n - 1) as f64;
            let h = self.h(t);
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Domain(format!("warping function h({t}) = {h} is not positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricMode {
    /// `g_B + h² g_F`.
    PlainWarp,
    /// `h^{-2k/n} g_B + h² g_F`, whose volume element is that of `g_B + g_F`.
    VolumePreserving,
}

/// The metric on `M = B × F` defined by a warp, a base collar and a fiber.
#[derive(Debug, Clone)]
pub struct WarpedMetricSpec {
    pub n: usize,
    pub k: usize,
    pub warp: Warp,
    pub base: BaseGeometry,
    pub fiber: ClosedSpectrum,
    pub mode: MetricMode,
}

impl WarpedMetricSpec {
    pub fn new(
        n: usize,
        k: usize,
        warp: Warp,
        base: BaseGeometry,
        fiber: ClosedSpectrum,
        mode: MetricMode,
    ) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Domain(format!(
                "base and fiber dimensions must be positive, got n = {n}, k = {k}"
            )));
        }
        base.validate()?;
        warp.validate(base.collar_length, 257)?;
        Ok(Self {
            n,
            k,
            warp,
            base,
            fiber,
            mode,
        })
    }

    /// The volume-preserving metric built from a plateau profile `p`: the
    /// base weight `h^{2k/n}` equals `p`, so `h = p^{n/(2k)}`.
    pub fn volume_preserving_construction(
        n: usize,
        k: usize,
        profile: WarpProfile,
        base: BaseGeometry,
        fiber: ClosedSpectrum,
    ) -> Result<Self> {
        let power = n as f64 / (2.0 * k as f64);
        Self::new(
            n,
            k,
            Warp::Profile { profile, power },
            base,
            fiber,
            MetricMode::VolumePreserving,
        )
    }

    /// Total dimension `n + k` of `M`.
    pub fn dimension(&self) -> usize {
        self.n + self.k
    }

    /// Exponent `a` with base gradient weight `w = h^a`.
    pub fn weight_exponent(&self) -> f64 {
        match self.mode {
            MetricMode::PlainWarp => self.k as f64,
            MetricMode::VolumePreserving => 2.0 * self.k as f64 / self.n as f64,
        }
    }

    /// Exponent `b` with fiber term `λ h^b` in the reduced energy.
    pub fn fiber_exponent(&self) -> f64 {
        match self.mode {
            MetricMode::PlainWarp => self.k as f64 - 2.0,
            MetricMode::VolumePreserving => -2.0,
        }
    }

    /// Exponent `c` with boundary density `h^c` on `∂B × F`.
    pub fn boundary_exponent(&self) -> f64 {
        match self.mode {
            MetricMode::PlainWarp => self.k as f64,
            MetricMode::VolumePreserving => self.k as f64 / self.n as f64,
        }
    }

    /// `(base, fiber)` coefficients of the metric at `t`: `g = a(t) g_B + b(t) g_F`.
    pub fn metric_coefficients(&self, t: f64) -> (f64, f64) {
        let fiber = self.warp.pow(t, 2.0);
        match self.mode {
            MetricMode::PlainWarp => (1.0, fiber),
            MetricMode::VolumePreserving => {
                (self.warp.pow(t, -2.0 * self.k as f64 / self.n as f64), fiber)
            }
        }
    }
}

/// Ratio of the warped volume density to the product density at `t`.
pub fn volume_element_ratio(spec: &WarpedMetricSpec, t: f64) -> Result<f64> {
    if spec.mode != MetricMode::VolumePreserving {
        return Err(Error::Unsupported(
            "volume element ratio is only defined for volume-preserving metrics".into(),
        ));
    }
    let l = spec.base.collar_length;
    if !(t >= 0.0 && t <= l) {
        return Err(Error::Domain(format!("t = {t} outside the collar [0, {l}]")));
    }
    let (n, k) = (spec.n as f64, spec.k as f64);
    let h = spec.warp.h(t);
    // sqrt(det) of each block: (h^{-2k/n})^{n/2} for g_B, (h²)^{k/2} for g_F.
    let base_density = h.powf(-2.0 * k / n).powf(n / 2.0);
    let fiber_density = (h * h).powf(k / 2.0);
    Ok(base_density * fiber_density)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sturm_dtn::EndCondition;
    use std::f64::consts::TAU;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn plateau_values() {
        let p = build_profile(0.1, 0.75, 1.0, false).unwrap();
        assert_eq!(p.eval(0.0).unwrap(), 1.0);
        assert_eq!(p.eval(0.04).unwrap(), 1.0);
        assert!(rel(p.eval(0.15).unwrap(), 0.177_827_941_003_892_3) < 1e-12);
        assert_eq!(p.eval(0.15).unwrap(), p.mid_value());
        assert!(rel(p.eval(0.5).unwrap(), 100.0) < 1e-14);
        assert_eq!(p.eval(1.0).unwrap(), p.far_value());
    }

    #[test]
    fn eval_power_examples() {
        let p = build_profile(0.1, 0.75, 1.0, false).unwrap();
        let v = p.eval_power(0.15, 2.0 / 3.0).unwrap();
        assert!(rel(v, 0.1f64.sqrt()) < 1e-12);
        assert_eq!(p.eval_power(0.02, -3.7).unwrap(), 1.0);
        assert!(rel(p.eval_power(0.5, -2.0).unwrap(), 1e-4) < 1e-12);
    }

    #[test]
    fn constructor_errors() {
        assert!(matches!(build_profile(0.2, 0.75, 1.0, false), Err(Error::Hypothesis(_))));
        assert!(matches!(
            build_profile(1.0 / 6.0, 0.75, 1.0, false),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(build_profile(0.1, 1.0, 1.0, false), Err(Error::Domain(_))));
        assert!(matches!(build_profile(0.1, 0.0, 1.0, false), Err(Error::Domain(_))));
        assert!(matches!(build_profile(0.1, 0.5, -1.0, false), Err(Error::Domain(_))));
        // ℓ < 1 is not required.
        assert!(build_profile(0.5, 0.5, 4.0, true).is_ok());
    }

    #[test]
    fn eval_outside_collar() {
        let p = build_profile(0.1, 0.75, 1.0, false).unwrap();
        assert!(p.eval(-1e-9).is_err());
        assert!(p.eval(1.0 + 1e-9).is_err());
        assert!(p.eval_power(2.0, 1.0).is_err());
    }

    #[test]
    fn symmetric_profile_mirrors() {
        let p = build_profile(0.05, 0.75, 1.0, true).unwrap();
        for i in 0..=400 {
            let t = i as f64 / 400.0;
            // 1 - (1 - t) need not round back to t
            assert!(rel(p.eval(t).unwrap(), p.eval(1.0 - t).unwrap()) < 1e-12, "t = {t}");
        }
        assert_eq!(p.eval(1.0).unwrap(), 1.0);
        assert_eq!(p.eval(0.5).unwrap(), p.far_value());
    }

    #[test]
    fn transitions_are_monotone_in_log() {
        let p = build_profile(0.08, 0.6, 1.0, false).unwrap();
        let mut prev = p.ln_h(0.04);
        for i in 1..=200 {
            let t = 0.04 + 0.04 * i as f64 / 200.0;
            let cur = p.ln_h(t);
            assert!(cur <= prev + 1e-15);
            prev = cur;
        }
        let mut prev = p.ln_h(0.16);
        for i in 1..=200 {
            let t = 0.16 + 0.08 * i as f64 / 200.0;
            let cur = p.ln_h(t);
            assert!(cur >= prev - 1e-15);
            prev = cur;
        }
    }

    #[test]
    fn profile_record_roundtrip_validates() {
        let p = build_profile(0.1, 0.75, 1.0, true).unwrap();
        let text = toml::to_string(&p).unwrap();
        assert!(text.contains("epsilon"));
        let back: WarpProfile = toml::from_str(&text).unwrap();
        assert_eq!(back, p);
        let bad = "epsilon = 0.3\ndelta = 0.5\ncollar_length = 1.0\n";
        assert!(toml::from_str::<WarpProfile>(bad).is_err());
    }

    fn collar(l: f64) -> BaseGeometry {
        BaseGeometry::collar(
            ClosedSpectrum::circle(TAU, 4).unwrap(),
            l,
            EndCondition::Steklov,
            EndCondition::Steklov,
        )
    }

    #[test]
    fn volume_ratio_is_one() {
        let p = build_profile(0.1, 0.75, 1.0, true).unwrap();
        for (n, k) in [(2, 1), (3, 1), (3, 2), (5, 2)] {
            let spec = WarpedMetricSpec::volume_preserving_construction(
                n,
                k,
                p,
                collar(1.0),
                ClosedSpectrum::circle(TAU, 3).unwrap(),
            )
            .unwrap();
            for i in 0..=1000 {
                let t = i as f64 / 1000.0;
                let r = volume_element_ratio(&spec, t).unwrap();
                assert!((r - 1.0).abs() <= 1e-12, "n={n} k={k} t={t} r={r}");
            }
            assert_eq!(volume_element_ratio(&spec, 0.02).unwrap(), 1.0);
        }
        let plain = WarpedMetricSpec::new(
            2,
            1,
            Warp::profile(p),
            collar(1.0),
            ClosedSpectrum::circle(TAU, 3).unwrap(),
            MetricMode::PlainWarp,
        )
        .unwrap();
        assert!(matches!(volume_element_ratio(&plain, 0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn construction_weight_is_the_profile() {
        // base weight h^{2k/n} is the plateau profile itself for every (n, k)
        let p = build_profile(0.1, 0.75, 1.0, true).unwrap();
        let spec = WarpedMetricSpec::volume_preserving_construction(
            3,
            1,
            p,
            collar(1.0),
            ClosedSpectrum::circle(TAU, 3).unwrap(),
        )
        .unwrap();
        for t in [0.03, 0.07, 0.15, 0.25, 0.5] {
            let w = spec.warp.pow(t, spec.weight_exponent());
            assert!(rel(w, p.eval(t).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn warp_validation() {
        let p = build_profile(0.1, 0.75, 1.0, false).unwrap();
        assert!(Warp::profile(p).validate(2.0, 10).is_err());
        assert!(Warp::Constant(-1.0).validate(1.0, 10).is_err());
        assert!(Warp::function(|t| 1.0 + t * (1.0 - t)).validate(1.0, 10).is_ok());
    }
}
