//! TOML experiment configs. Every section is validated, with the offending
//! field path in the error, before any solve starts.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::sweep::SweepParams;
use crate::direct_oracle::RevolutionGrid;
use crate::spectra_closed::{ClosedSpectrum, SpectrumKind};
use crate::sturm_dtn::{BaseGeometry, EndCondition, MeshSpec};
use crate::warp_profile::{build_profile, MetricMode, Warp, WarpedMetricSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Spectrum,
    Oracle,
    Sweep,
    Verify,
    Kokarev,
    QuasiIso,
    NormalizeVolume,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Kokarev => "kokarev",
            ExperimentKind::QuasiIso => "quasi_iso",
            ExperimentKind::NormalizeVolume => "normalize_volume",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub metric: Option<MetricConfig>,
    pub mesh: Option<MeshSpec>,
    pub spectrum: Option<SpectrumConfig>,
    pub oracle: Option<OracleConfig>,
    pub sweep: Option<SweepConfig>,
    pub kokarev: Option<KokarevConfig>,
    pub quasi_iso: Option<QuasiIsoConfig>,
    pub normalize_volume: Option<VolumeConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSource {
    Point,
    Circle { length: f64 },
    FlatTorus { l1: f64, l2: f64 },
    Explicit { levels: Vec<(f64, usize)> },
}

impl SpectrumSource {
    pub fn build(&self, field: &str) -> Result<ClosedSpectrum, ConfigError> {
        match self {
            SpectrumSource::Point => Ok(ClosedSpectrum::point()),
            SpectrumSource::Circle { length } => ClosedSpectrum::circle(*length, 16),
            SpectrumSource::FlatTorus { l1, l2 } => ClosedSpectrum::flat_torus(*l1, *l2, 32),
            SpectrumSource::Explicit { levels } => ClosedSpectrum::explicit(levels),
        }
        .map_err(|e| invalid(field, e))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WarpConfig {
    #[default]
    Unit,
    Constant {
        value: f64,
    },
    /// The plateau profile on the collar.
    Profile {
        epsilon: f64,
        delta: f64,
        symmetric: Option<bool>,
    },
    /// `h(t) = Σ c_i tⁱ`.
    Polynomial {
        coefficients: Vec<f64>,
    },
}

fn steklov() -> EndCondition {
    EndCondition::Steklov
}

fn volume_preserving() -> MetricMode {
    MetricMode::VolumePreserving
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub n: usize,
    pub k: usize,
    #[serde(default = "volume_preserving")]
    pub mode: MetricMode,
    pub collar_length: f64,
    #[serde(default = "steklov")]
    pub left: EndCondition,
    #[serde(default = "steklov")]
    pub right: EndCondition,
    #[serde(default = "point_source")]
    pub cross_section: SpectrumSource,
    pub fiber: SpectrumSource,
    #[serde(default)]
    pub warp: WarpConfig,
}

fn point_source() -> SpectrumSource {
    SpectrumSource::Point
}

impl MetricConfig {
    pub fn base(&self) -> Result<BaseGeometry, ConfigError> {
        let base = BaseGeometry::collar(
            self.cross_section.build("metric.cross_section")?,
            self.collar_length,
            self.left,
            self.right,
        );
        base.validate().map_err(|e| invalid("metric.collar_length", e))?;
        Ok(base)
    }

    fn both_steklov(&self) -> bool {
        self.left == EndCondition::Steklov && self.right == EndCondition::Steklov
    }

    pub fn warp(&self) -> Result<Warp, ConfigError> {
        Ok(match &self.warp {
            WarpConfig::Unit => Warp::Constant(1.0),
            WarpConfig::Constant { value } => {
                if !(*value > 0.0) {
                    return Err(invalid("metric.warp.value", format!("must be positive, got {value}")));
                }
                Warp::Constant(*value)
            }
            WarpConfig::Profile {
                epsilon,
                delta,
                symmetric,
            } => {
                let p = build_profile(
                    *epsilon,
                    *delta,
                    self.collar_length,
                    symmetric.unwrap_or(self.both_steklov()),
                )
                .map_err(|e| invalid("metric.warp", e))?;
                match self.mode {
                    MetricMode::PlainWarp => Warp::profile(p),
                    MetricMode::VolumePreserving => Warp::Profile {
                        profile: p,
                        power: self.n as f64 / (2.0 * self.k as f64),
                    },
                }
            }
            WarpConfig::Polynomial { coefficients } => {
                if coefficients.is_empty() {
                    return Err(invalid("metric.warp.coefficients", "must not be empty"));
                }
                let c = coefficients.clone();
                Warp::function(move |t| c.iter().rev().fold(0.0, |acc, a| acc * t + a))
            }
        })
    }

    pub fn build(&self) -> Result<WarpedMetricSpec, ConfigError> {
        if self.n == 0 {
            return Err(invalid("metric.n", "must be positive"));
        }
        if self.k == 0 {
            return Err(invalid("metric.k", "must be positive"));
        }
        WarpedMetricSpec::new(
            self.n,
            self.k,
            self.warp()?,
            self.base()?,
            self.fiber.build("metric.fiber")?,
            self.mode,
        )
        .map_err(|e| invalid("metric.warp", e))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub top: Option<f64>,
    pub count: Option<usize>,
}

fn default_tolerance() -> f64 {
    1e-2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub n_t: usize,
    pub n_theta: usize,
    pub top: Option<f64>,
    pub count: Option<usize>,
    /// Also compare against the separated solver up to `top`.
    #[serde(default)]
    pub compare: bool,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub delta: Option<f64>,
    pub symmetric: Option<bool>,
    #[serde(default)]
    pub unwarped: bool,
    #[serde(default = "yes")]
    pub timing: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KokarevConfig {
    pub sigma1: Option<f64>,
    pub boundary_length: Option<f64>,
    #[serde(default)]
    pub genus: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiIsoConfig {
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    pub m: Option<usize>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_pairs() -> usize {
    20
}

fn default_k_max() -> usize {
    5
}

fn default_amplitude() -> f64 {
    0.4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeConfig {
    pub phi: Vec<f64>,
    pub weights: Vec<f64>,
    /// Base volume density at each sample; 1 when omitted.
    pub integrand: Option<Vec<f64>>,
    pub dimension: usize,
    pub target: f64,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn metric(&self) -> Result<&MetricConfig, ConfigError> {
        self.metric.as_ref().ok_or_else(|| invalid("metric", "section is required"))
    }

    pub fn mesh_or(&self, default: MeshSpec) -> MeshSpec {
        self.mesh.unwrap_or(default)
    }

    /// Checks everything the selected experiment will need.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(mesh) = &self.mesh {
            if mesh.elements < crate::sturm_dtn::MIN_ELEMENTS {
                return Err(invalid("mesh.elements", format!(
                    "must be at least {}", crate::sturm_dtn::MIN_ELEMENTS
                )));
            }
            if mesh.min_per_transition < crate::sturm_dtn::MIN_TRANSITION_ELEMENTS {
                return Err(invalid("mesh.min_per_transition", format!(
                    "must be at least {}", crate::sturm_dtn::MIN_TRANSITION_ELEMENTS
                )));
            }
        }
        match self.kind {
            ExperimentKind::Verify => Ok(()),
            ExperimentKind::Spectrum => {
                self.metric()?.build()?;
                if let Some(s) = &self.spectrum {
                    if let Some(top) = s.top {
                        if !(top > 0.0) {
                            return Err(invalid("spectrum.top", "must be positive"));
                        }
                    }
                }
                Ok(())
            }
            ExperimentKind::Oracle => self.oracle_grid().map(|_| ()),
            ExperimentKind::Sweep => self.sweep_params().map(|_| ()),
            ExperimentKind::Kokarev => {
                let k = self.kokarev.clone().unwrap_or_default();
                match (k.sigma1, k.boundary_length) {
                    (Some(_), Some(_)) => Ok(()),
                    (None, None) => {
                        let p = self.sweep_params()?;
                        if p.n != 1 || p.k != 1 {
                            return Err(invalid("metric.n", "the surface bound needs n = k = 1"));
                        }
                        Ok(())
                    }
                    (Some(_), None) => Err(invalid("kokarev.boundary_length", "required with sigma1")),
                    (None, Some(_)) => Err(invalid("kokarev.sigma1", "required with boundary_length")),
                }
            }
            ExperimentKind::QuasiIso => {
                let q = self.quasi_iso()?;
                if q.pairs == 0 || q.k_max == 0 {
                    return Err(invalid("quasi_iso", "pairs and k_max must be positive"));
                }
                if !(q.amplitude > 0.0) {
                    return Err(invalid("quasi_iso.amplitude", "must be positive"));
                }
                self.metric()?.build()?;
                Ok(())
            }
            ExperimentKind::NormalizeVolume => {
                let v = self
                    .normalize_volume
                    .as_ref()
                    .ok_or_else(|| invalid("normalize_volume", "section is required"))?;
                if v.weights.len() != v.phi.len() {
                    return Err(invalid("normalize_volume.weights", "length differs from phi"));
                }
                if let Some(i) = &v.integrand {
                    if i.len() != v.phi.len() {
                        return Err(invalid("normalize_volume.integrand", "length differs from phi"));
                    }
                }
                if v.dimension == 0 {
                    return Err(invalid("normalize_volume.dimension", "must be positive"));
                }
                if !(v.target > 0.0) {
                    return Err(invalid("normalize_volume.target", "must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn quasi_iso(&self) -> Result<QuasiIsoConfig, ConfigError> {
        Ok(self.quasi_iso.clone().unwrap_or(QuasiIsoConfig {
            pairs: default_pairs(),
            m: None,
            k_max: default_k_max(),
            amplitude: default_amplitude(),
        }))
    }

    pub fn sweep_params(&self) -> Result<SweepParams, ConfigError> {
        let metric = self.metric()?;
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| invalid("sweep", "section is required"))?;
        if metric.mode != MetricMode::VolumePreserving {
            return Err(invalid("metric.mode", "sweeps use the volume-preserving construction"));
        }
        let delta = match sweep.delta {
            Some(d) => d,
            None if sweep.unwarped => f64::NAN,
            None => return Err(invalid("sweep.delta", "missing field `delta`")),
        };
        let params = SweepParams {
            n: metric.n,
            k: metric.k,
            delta,
            epsilons: sweep.epsilons.clone(),
            base: metric.base()?,
            fiber: metric.fiber.build("metric.fiber")?,
            mesh: self.mesh_or(SweepParams::default_3d().mesh),
            symmetric: sweep.symmetric.unwrap_or(metric.both_steklov()),
            unwarped: sweep.unwarped,
            timing: sweep.timing,
        };
        params.validate().map_err(|e| {
            let field = if e.to_string().contains("delta") {
                "sweep.delta"
            } else {
                "sweep.epsilons"
            };
            invalid(field, e)
        })?;
        Ok(params)
    }

    pub fn oracle_grid(&self) -> Result<RevolutionGrid, ConfigError> {
        let metric = self.metric()?;
        let oracle = self
            .oracle
            .as_ref()
            .ok_or_else(|| invalid("oracle", "section is required"))?;
        if metric.n != 1 || metric.k != 1 || metric.mode != MetricMode::PlainWarp {
            return Err(invalid(
                "metric",
                "the grid solver handles surfaces: n = k = 1 with mode = \"plain_warp\"",
            ));
        }
        if !matches!(metric.cross_section, SpectrumSource::Point) {
            return Err(invalid("metric.cross_section", "the grid solver needs an interval base"));
        }
        let fiber = metric.fiber.build("metric.fiber")?;
        let SpectrumKind::Circle { length } = *fiber.kind() else {
            return Err(invalid("metric.fiber", "the grid solver needs a circle fiber"));
        };
        if oracle.compare && oracle.top.is_none() {
            return Err(invalid("oracle.top", "required when compare = true"));
        }
        RevolutionGrid::new(
            oracle.n_t,
            oracle.n_theta,
            metric.collar_length,
            length,
            metric.warp()?,
            metric.left,
            metric.right,
        )
        .map_err(|e| invalid("oracle", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
kind = "sweep"

[metric]
n = 2
k = 1
collar_length = 1.0
cross_section = { kind = "circle", length = 6.283185307179586 }
fiber = { kind = "circle", length = 6.283185307179586 }

[sweep]
epsilons = [0.1, 0.05]
delta = 0.75
"#;

    #[test]
    fn parses_sweep() {
        let cfg = ExperimentConfig::parse(SWEEP).unwrap();
        let p = cfg.sweep_params().unwrap();
        assert_eq!(p.epsilons, vec![0.1, 0.05]);
        assert!(p.symmetric);
    }

    #[test]
    fn missing_delta_is_named() {
        let text = SWEEP.replace("delta = 0.75\n", "");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("delta"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = SWEEP.replace("delta = 0.75", "delta = 0.75\nbogus = 1");
        assert!(ExperimentConfig::parse(&text).is_err());
        let text = SWEEP.replace("kind = \"circle\", length", "kind = \"circle\", radius = 1, length");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn epsilon_too_large() {
        let text = SWEEP.replace("[0.1, 0.05]", "[0.2]");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().starts_with("sweep.epsilons"), "{err}");
    }

    #[test]
    fn polynomial_warp() {
        let text = r#"
kind = "spectrum"
[metric]
n = 1
k = 1
mode = "plain_warp"
collar_length = 1.0
fiber = { kind = "circle", length = 6.283185307179586 }
warp = { kind = "polynomial", coefficients = [1.0, 1.0, -1.0] }
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        let spec = cfg.metric().unwrap().build().unwrap();
        assert!((spec.warp.h(0.5) - 1.25).abs() < 1e-15);
    }
}
