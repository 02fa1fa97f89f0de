//! Run configuration files. TOML or JSON, picked by file extension.

use std::collections::BTreeMap;
use std::path::Path;

use escloak_core::design::{Bounds, DesignProblem, Interval, ModeWeights};
use escloak_core::farfield::IncidentWave;
use escloak_core::medium::{default_radii, validate_stack, LayerStack, Material};
use escloak_core::scattering::EscPair;
use escloak_core::ModeKind;
use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_ORDER: usize = 2;
pub const DEFAULT_SEEDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

impl From<MaterialConfig> for Material {
    fn from(m: MaterialConfig) -> Self {
        Material { lambda: m.lambda, mu: m.mu, rho: m.rho }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub lambda: Option<[f64; 2]>,
    pub mu: Option<[f64; 2]>,
    pub rho: Option<[f64; 2]>,
}

/// Either one incident kind (`"L"`, `"M"`, `"N"`) or a table of pair
/// labels such as `LL = 1.0`; pairs left out of a table weigh zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsConfig {
    Incident(String),
    Table(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IncidentKindConfig {
    Pressure,
    Shear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentConfig {
    pub kind: IncidentKindConfig,
    #[serde(default = "default_direction")]
    pub direction: [f64; 3],
    pub polarization: Option<[f64; 3]>,
}

fn default_direction() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl Default for IncidentConfig {
    fn default() -> Self {
        Self { kind: IncidentKindConfig::Pressure, direction: default_direction(), polarization: None }
    }
}

/// Every field a run may use. Stack commands read `radii`, `background`
/// and `layers`; `optimize` also reads the design fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub radii: Option<Vec<f64>>,
    pub background: Option<MaterialConfig>,
    #[serde(default)]
    pub layers: Vec<MaterialConfig>,
    pub omega: Option<f64>,
    #[serde(alias = "T")]
    pub order: Option<usize>,
    pub layer_count: Option<usize>,
    pub bounds: Option<BoundsConfig>,
    pub seeds: Option<usize>,
    pub seed: Option<u64>,
    pub mode_weights: Option<WeightsConfig>,
    pub max_iters: Option<usize>,
    pub incident: Option<IncidentConfig>,
    pub eps: Option<f64>,
}

pub fn parse_config(text: &str, json: bool) -> Result<RunConfig, CliError> {
    if json {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    } else {
        toml::from_str(text).map_err(|e: toml::de::Error| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            match line {
                Some(l) => CliError::Config(format!("{} (line {l})", e.message())),
                None => CliError::Config(e.message().to_string()),
            }
        })
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let json = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => true,
        Some(e) if e.eq_ignore_ascii_case("toml") => false,
        _ => return Err(CliError::config("--config", format!("{} must end in .toml or .json", path.display()))),
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, json)
}

fn interval(field: &str, v: Option<[f64; 2]>) -> Result<Interval, CliError> {
    let [lo, hi] = v.unwrap_or([0.05, 3.0]);
    if lo.is_finite() && hi.is_finite() && lo <= hi {
        Ok(Interval { lo, hi })
    } else {
        Err(CliError::config(&format!("bounds.{field}"), format!("[{lo}, {hi}] is not an interval")))
    }
}

fn unit(field: &str, v: [f64; 3]) -> Result<[f64; 3], CliError> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n.is_finite() && n > 0.0 {
        Ok(v.map(|x| x / n))
    } else {
        Err(CliError::config(field, "must be a nonzero finite vector"))
    }
}

impl RunConfig {
    pub fn background(&self) -> Result<Material, CliError> {
        self.background.map(Material::from).ok_or_else(|| CliError::config("background", "missing field"))
    }

    pub fn stack(&self) -> Result<LayerStack, CliError> {
        let bg = self.background()?;
        let layers: Vec<Material> = self.layers.iter().copied().map(Material::from).collect();
        let radii = self.radii.clone().unwrap_or_else(|| default_radii(layers.len()));
        let v = validate_stack(&radii, bg, &layers).map_err(|e| CliError::Config(e.to_string()))?;
        for w in &v.warnings {
            warn!("layers[{}] does not contrast with the background in a uniform direction", w.layer - 1);
        }
        Ok(v.stack)
    }

    pub fn bounds(&self) -> Result<Bounds, CliError> {
        let b = self.bounds.clone().unwrap_or_default();
        Ok(Bounds { lambda: interval("lambda", b.lambda)?, mu: interval("mu", b.mu)?, rho: interval("rho", b.rho)? })
    }

    pub fn mode_weights(&self) -> Result<ModeWeights, CliError> {
        match &self.mode_weights {
            None => Ok(ModeWeights::default()),
            Some(WeightsConfig::Incident(s)) => {
                let mut chars = s.chars();
                match (chars.next().and_then(ModeKind::from_char), chars.next()) {
                    (Some(k), None) => Ok(ModeWeights::incident(k)),
                    _ => Err(CliError::config("mode_weights", format!("expected \"L\", \"M\" or \"N\", got {s:?}"))),
                }
            }
            Some(WeightsConfig::Table(t)) => {
                let mut w = ModeWeights::zeros();
                for (k, v) in t {
                    let pair = EscPair::parse(k)
                        .ok_or_else(|| CliError::config(&format!("mode_weights.{k}"), "unknown pair label"))?;
                    w.set(pair, *v);
                }
                Ok(w)
            }
        }
    }

    /// Layer count for design runs: from `radii`, then `layers`, then
    /// `layer_count`, defaulting to one.
    pub fn design_layer_count(&self) -> usize {
        if let Some(r) = &self.radii {
            return r.len().saturating_sub(1);
        }
        if !self.layers.is_empty() {
            return self.layers.len();
        }
        self.layer_count.unwrap_or(1)
    }

    pub fn design_problem(&self, omega: f64, order: usize) -> Result<DesignProblem, CliError> {
        let count = self.design_layer_count();
        if count == 0 {
            return Err(CliError::config("layer_count", "design needs at least one layer"));
        }
        let radii = self.radii.clone().unwrap_or_else(|| default_radii(count));
        Ok(DesignProblem::new(radii, self.background()?, omega, order, self.bounds()?, self.mode_weights()?)?)
    }

    pub fn incident_wave(&self) -> Result<IncidentWave, CliError> {
        let inc = self.incident.clone().unwrap_or_default();
        let d = unit("incident.direction", inc.direction)?;
        Ok(match inc.kind {
            IncidentKindConfig::Pressure => IncidentWave::pressure(d)?,
            IncidentKindConfig::Shear => {
                let q = inc.polarization.ok_or_else(|| CliError::config("incident.polarization", "missing field"))?;
                IncidentWave::shear(d, unit("incident.polarization", q)?)
                    .map_err(|e| CliError::config("incident.polarization", e))?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_LAYER: &str = r#"
omega = 1.0
T = 2
[background]
lambda = 1.0
mu = 1.0
rho = 1.0
[[layers]]
lambda = 2.9
mu = 0.7
rho = 0.9
"#;

    #[test]
    fn toml_and_json_agree() {
        let a = parse_config(ONE_LAYER, false).unwrap();
        let json = r#"{"omega":1.0,"T":2,"background":{"lambda":1,"mu":1,"rho":1},"layers":[{"lambda":2.9,"mu":0.7,"rho":0.9}]}"#;
        let b = parse_config(json, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stack().unwrap().radii(), &[2.0, 1.0]);
    }

    #[test]
    fn unknown_and_missing_fields_are_named() {
        let e = parse_config("colour = 3", false).unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
        let e = parse_config("[background]\nlambda = 1\nrho = 1", false).unwrap_err().to_string();
        assert!(e.contains("mu"), "{e}");
    }

    #[test]
    fn increasing_radii_rejected() {
        let mut c = parse_config(ONE_LAYER, false).unwrap();
        c.radii = Some(vec![1.0, 2.0]);
        let e = c.stack().unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("radii must be strictly decreasing"));
    }

    #[test]
    fn weights_forms() {
        let mut c = RunConfig { mode_weights: Some(WeightsConfig::Incident("N".into())), ..Default::default() };
        assert_eq!(c.mode_weights().unwrap(), ModeWeights::incident(ModeKind::N));
        c.mode_weights = Some(WeightsConfig::Table([("MM".to_string(), 2.0)].into_iter().collect()));
        let w = c.mode_weights().unwrap();
        assert_eq!(w.get(EscPair::MM), 2.0);
        assert_eq!(w.get(EscPair::LL), 0.0);
        c.mode_weights = Some(WeightsConfig::Table([("QQ".to_string(), 2.0)].into_iter().collect()));
        assert!(c.mode_weights().unwrap_err().to_string().contains("mode_weights.QQ"));
    }

    #[test]
    fn shear_needs_polarization() {
        let c = RunConfig {
            incident: Some(IncidentConfig { kind: IncidentKindConfig::Shear, direction: [0.0, 0.0, 2.0], polarization: None }),
            ..Default::default()
        };
        assert!(c.incident_wave().unwrap_err().to_string().contains("incident.polarization"));
    }
}
