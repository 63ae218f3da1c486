use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::instances;
use crate::stabilizer::{StabilizeConfig, ADDITIVITY_TOLERANCE, DEFAULT_TOLERANCE, MAX_DEPTH};
use crate::value::{Interval, Value};

use super::noise::NoiseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Cone,
    Normed,
    Both,
}

impl Engine {
    pub fn runs_cone(self) -> bool {
        matches!(self, Engine::Cone | Engine::Both)
    }

    pub fn runs_normed(self) -> bool {
        matches!(self, Engine::Normed | Engine::Both)
    }
}

/// Additive base map `R₊^k → target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseMap {
    /// `x ↦ c·Σxᵢ` in every target coordinate (degenerate `[c, c]` for intervals).
    Coefficient(f64),
    /// `x ↦ Mx`, one row per target coordinate.
    Matrix(Vec<Vec<f64>>),
    /// `x ↦ Σ xᵢ·[loᵢ, hiᵢ]`.
    Interval(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GridSpec {
    pub count: usize,
    pub spacing: f64,
    #[serde(default = "one")]
    pub dimension: usize,
}

fn one() -> usize {
    1
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            count: 9,
            spacing: 0.25,
            dimension: 1,
        }
    }
}

fn default_v_scale() -> f64 {
    1.0
}

fn default_depth() -> u32 {
    MAX_DEPTH
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_additivity_tolerance() -> f64 {
    ADDITIVITY_TOLERANCE
}

fn default_r() -> f64 {
    crate::normed::DEFAULT_R
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance_name: String,
    pub base_map: BaseMap,
    #[serde(default)]
    pub noise: NoiseSpec,
    /// Scale of the neighborhood `v`; also the residual bound `ε` of the
    /// normed engine.
    #[serde(default = "default_v_scale")]
    pub v_scale: f64,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Run every point to `depth` instead of stopping at `tolerance`.
    #[serde(default)]
    pub fixed_depth: bool,
    #[serde(default = "default_additivity_tolerance")]
    pub additivity_tolerance: f64,
    #[serde(default)]
    pub domain: GridSpec,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default = "default_r")]
    pub r: f64,
    /// Replaces `f(0)` (extended-real targets only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_at_zero: Option<ExtReal>,
}

impl ExperimentConfig {
    /// Defaults with the given instance and base coefficient.
    pub fn new(instance_name: impl Into<String>, base_map: BaseMap) -> Self {
        ExperimentConfig {
            instance_name: instance_name.into(),
            base_map,
            noise: NoiseSpec::default(),
            v_scale: default_v_scale(),
            depth: default_depth(),
            tolerance: default_tolerance(),
            fixed_depth: false,
            additivity_tolerance: default_additivity_tolerance(),
            domain: GridSpec::default(),
            engine: Engine::default(),
            r: default_r(),
            f_at_zero: None,
        }
    }

    /// Reads TOML or JSON, chosen by extension (`.json` is JSON, anything
    /// else TOML).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn stabilize_config(&self) -> StabilizeConfig {
        StabilizeConfig {
            depth: self.depth,
            tolerance: (!self.fixed_depth).then_some(self.tolerance),
            additivity_tolerance: self.additivity_tolerance,
        }
    }

    /// Checks everything that does not need the engine.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let target = instances::from_name(&self.instance_name).map_err(|e| match e {
            Error::UnknownInstance(name) => Error::InvalidConfig(format!("unknown instance `{name}`")),
            other => other,
        })?;
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return bad(format!("depth must be in 1..={MAX_DEPTH}, got {}", self.depth));
        }
        for (name, x) in [
            ("v-scale", self.v_scale),
            ("tolerance", self.tolerance),
            ("additivity-tolerance", self.additivity_tolerance),
        ] {
            if !(x > 0.0) || !x.is_finite() {
                return bad(format!("{name} must be positive and finite, got {x}"));
            }
        }
        if !(self.r > 1.0) || !self.r.is_finite() {
            return bad(format!("r must exceed 1, got {}", self.r));
        }
        self.noise.validate()?;
        let grid = &self.domain;
        if grid.count == 0 || grid.dimension == 0 || !(grid.spacing > 0.0) || !grid.spacing.is_finite() {
            return bad(format!("domain grid needs positive count, dimension and spacing, got {grid:?}"));
        }
        self.target_dim(&target)?;
        if let Some(f0) = self.f_at_zero {
            if target.element(Value::Ext(f0)).is_err() {
                return bad(format!("f-at-zero = {f0} is not a value of `{}`", target.name()));
            }
        }
        if self.engine.runs_normed() && !target.is_vector_space() {
            return bad(format!("the normed engine needs a vector-space target, `{}` is not", target.name()));
        }
        Ok(())
    }

    /// Target dimension implied by the base map, checked against the instance.
    fn target_dim(&self, target: &crate::cone::ConeInstance) -> Result<usize> {
        use crate::cone::CarrierKind;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let k = self.domain.dimension;
        let instance_dim = match target.kind() {
            CarrierKind::Vector => target.zero().value().as_vector().map_or(1, |v| v.coords.len()),
            _ => 1,
        };
        match (&self.base_map, target.kind()) {
            (BaseMap::Coefficient(c), kind) => {
                if !c.is_finite() {
                    return bad(format!("coefficient must be finite, got {c}"));
                }
                if kind == CarrierKind::NonnegativeExtendedReal && *c < 0.0 {
                    return bad(format!("nonnegative target needs a nonnegative coefficient, got {c}"));
                }
            }
            (BaseMap::Matrix(rows), kind) => {
                if kind == CarrierKind::Interval {
                    return bad("interval targets take `coefficient` or `interval` base maps".into());
                }
                if rows.len() != instance_dim || rows.iter().any(|r| r.len() != k) {
                    return bad(format!("matrix must be {instance_dim}x{k}"));
                }
                if rows.iter().flatten().any(|c| !c.is_finite()) {
                    return bad("matrix entries must be finite".into());
                }
                if kind == CarrierKind::NonnegativeExtendedReal && rows.iter().flatten().any(|&c| c < 0.0) {
                    return bad("nonnegative target needs nonnegative matrix entries".into());
                }
            }
            (BaseMap::Interval(coeffs), kind) => {
                if kind != CarrierKind::Interval {
                    return bad("`interval` base maps need the `intervals` instance".into());
                }
                if coeffs.len() != k {
                    return bad(format!("interval base needs {k} coefficients"));
                }
                if coeffs.iter().any(|&[lo, hi]| Interval::new(lo, hi).is_none()) {
                    return bad("interval coefficients need finite lo <= hi".into());
                }
            }
        }
        Ok(instance_dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::noise::NoiseKind;

    #[test]
    fn toml_and_json_spellings_agree() {
        let toml = r#"
            instance-name = "ext-reals"
            base-map = { coefficient = 3.0 }
            v-scale = 1.0
            depth = 24
            fixed-depth = true
            noise = { kind = "bounded-hash", magnitude = 0.25, seed = 7 }
            domain = { count = 5, spacing = 0.5 }
        "#;
        let json = r#"{
            "instance-name": "ext-reals",
            "base-map": {"coefficient": 3.0},
            "v-scale": 1.0,
            "depth": 24,
            "fixed-depth": true,
            "noise": {"kind": "bounded-hash", "magnitude": 0.25, "seed": 7},
            "domain": {"count": 5, "spacing": 0.5}
        }"#;
        let a = ExperimentConfig::from_toml(toml).unwrap();
        let b = ExperimentConfig::from_json(json).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.noise.kind, NoiseKind::BoundedHash);
        assert_eq!(a.domain.dimension, 1);
        assert!(a.validate().is_ok());
        assert_eq!(a.stabilize_config().tolerance, None);
    }

    #[test]
    fn infinite_f_at_zero_parses() {
        let cfg = ExperimentConfig::from_json(
            r#"{"instance-name": "ext-reals", "base-map": {"coefficient": 1.0}, "f-at-zero": "+inf"}"#,
        )
        .unwrap();
        assert_eq!(cfg.f_at_zero, Some(ExtReal::PosInf));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = ExperimentConfig::new("ext-reals", BaseMap::Coefficient(3.0));
        let cases = [
            ExperimentConfig {
                depth: 41,
                ..base.clone()
            },
            ExperimentConfig {
                v_scale: 0.0,
                ..base.clone()
            },
            ExperimentConfig {
                instance_name: "reals".into(),
                ..base.clone()
            },
            ExperimentConfig {
                engine: Engine::Normed,
                ..base.clone()
            },
            ExperimentConfig {
                base_map: BaseMap::Matrix(vec![vec![1.0, 2.0]]),
                ..base.clone()
            },
            ExperimentConfig {
                instance_name: "ext-reals-nonneg".into(),
                base_map: BaseMap::Coefficient(-1.0),
                ..base.clone()
            },
            ExperimentConfig {
                instance_name: "vector-uc:2:sup".into(),
                f_at_zero: Some(ExtReal::Finite(1.0)),
                ..base.clone()
            },
        ];
        for cfg in cases {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
        assert!(ExperimentConfig::from_toml("instance-name = 3").is_err());
        assert!(ExperimentConfig::from_json(r#"{"instance-name": "ext-reals", "base-map": {"coefficient": 1}, "typo": 1}"#).is_err());
    }
}
