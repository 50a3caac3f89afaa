//! Experiment configuration, read from TOML.

use std::fmt;
use std::path::{Path, PathBuf};

use krqr_core::ensembles::{gaussian_support, QuadratureScheme, QuadratureSpec};
use krqr_core::params::{recommended_half_width, SimParams, TWO_PI};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    PlaneWave,
    AntiResonance,
    Ratchet,
    NarrowGaussian,
    NarrowSquare,
    BroadGaussian,
    Reconstruction,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::PlaneWave => "plane_wave",
            Scenario::AntiResonance => "anti_resonance",
            Scenario::Ratchet => "ratchet",
            Scenario::NarrowGaussian => "narrow_gaussian",
            Scenario::NarrowSquare => "narrow_square",
            Scenario::BroadGaussian => "broad_gaussian",
            Scenario::Reconstruction => "reconstruction",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Numeric,
    Analytic,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Numeric => "numeric",
            Engine::Analytic => "analytic",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceChoice {
    Coherent,
    Incoherent,
}

impl From<CoherenceChoice> for krqr_core::Coherence {
    fn from(c: CoherenceChoice) -> Self {
        match c {
            CoherenceChoice::Coherent => krqr_core::Coherence::Coherent,
            CoherenceChoice::Incoherent => krqr_core::Coherence::Incoherent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeChoice {
    Midpoint,
    GaussLegendre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    /// Kick strength `K`.
    pub k: f64,
    /// Defaults to `2 pi ell` when `ell` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<u32>,
    pub n_kicks: usize,
    /// Defaults to a width sized for ballistic growth over `n_kicks`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder_half_width: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub n_beta: usize,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
}

fn default_scheme() -> SchemeChoice {
    SchemeChoice::Midpoint
}

impl QuadratureConfig {
    pub fn spec(&self) -> QuadratureSpec {
        let scheme = match self.scheme {
            SchemeChoice::Midpoint => QuadratureScheme::Midpoint,
            SchemeChoice::GaussLegendre => QuadratureScheme::GaussLegendre,
        };
        QuadratureSpec { n_beta: self.n_beta, scheme, support: self.support.map(|[lo, hi]| (lo, hi)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: ParamsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    pub engines: Vec<Engine>,
    pub output_path: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("scenario {scenario} requires field `{field}`")]
    MissingField { scenario: Scenario, field: &'static str },
    #[error("{0}")]
    Invalid(String),
    #[error("invalid parameters: {0}")]
    Params(#[from] krqr_core::Error),
}

/// A validated configuration with its numeric settings resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub params: SimParams,
    /// Present for scenarios built from a quasimomentum distribution.
    pub quadrature: Option<QuadratureSpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_owned(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn require<T: Copy>(&self, value: Option<T>, field: &'static str) -> Result<T, ConfigError> {
        value.ok_or(ConfigError::MissingField { scenario: self.scenario, field })
    }

    fn require_odd_ell(&self) -> Result<(), ConfigError> {
        match self.params.ell {
            Some(ell) if ell % 2 == 1 => Ok(()),
            Some(ell) => Err(ConfigError::Invalid(format!("scenario {} needs odd ell, got {ell}", self.scenario))),
            None => Err(ConfigError::MissingField { scenario: self.scenario, field: "params.ell" }),
        }
    }

    /// Initial rung spread used to size the default ladder.
    fn spread(&self) -> usize {
        let n0 = self.n0.unwrap_or(0).unsigned_abs() as usize;
        match self.scenario {
            Scenario::PlaneWave | Scenario::AntiResonance => n0,
            Scenario::Ratchet => n0 + 1,
            Scenario::NarrowGaussian | Scenario::BroadGaussian => (9.0 * self.sigma.unwrap_or(0.0)).ceil() as usize + 1,
            Scenario::NarrowSquare | Scenario::Reconstruction => 1,
        }
    }

    /// Checks every scenario requirement and resolves defaults.
    pub fn validate(&self) -> Result<Resolved, ConfigError> {
        match self.scenario {
            Scenario::PlaneWave => {
                self.require(self.beta0, "beta0")?;
            }
            Scenario::AntiResonance => {
                self.require(self.beta0, "beta0")?;
                self.require_odd_ell()?;
            }
            Scenario::Ratchet => {
                self.require(self.phi, "phi")?;
            }
            Scenario::NarrowGaussian => {
                self.require(self.sigma, "sigma")?;
            }
            Scenario::BroadGaussian => {
                self.require(self.sigma, "sigma")?;
                self.require(self.coherence, "coherence")?;
            }
            Scenario::NarrowSquare => {
                self.require(self.delta, "delta")?;
            }
            Scenario::Reconstruction => {
                self.require(self.delta, "delta")?;
                self.require_odd_ell()?;
            }
        }
        if let Some(beta0) = self.beta0 {
            if !(-0.5..0.5).contains(&beta0) {
                return Err(ConfigError::Invalid(format!("beta0 = {beta0} is outside [-1/2, 1/2)")));
            }
        }
        if self.engines.is_empty() {
            return Err(ConfigError::Invalid("engines must name at least one engine".into()));
        }
        let mut engines = self.engines.clone();
        engines.sort();
        engines.dedup();
        if engines.len() != self.engines.len() {
            return Err(ConfigError::Invalid("engines lists an engine twice".into()));
        }
        if self.engines.contains(&Engine::Analytic) && self.params.ell.is_none() {
            return Err(ConfigError::Invalid("the analytic engine needs params.ell (kbar = 2 pi ell)".into()));
        }
        if self.output_path.trim().is_empty() {
            return Err(ConfigError::Invalid("output_path is empty".into()));
        }

        let p = &self.params;
        let kbar = match (p.kbar, p.ell) {
            (Some(kbar), _) => kbar,
            (None, Some(ell)) => TWO_PI * ell as f64,
            (None, None) => return Err(ConfigError::MissingField { scenario: self.scenario, field: "params.kbar" }),
        };
        let ladder = p.ladder_half_width.unwrap_or_else(|| recommended_half_width(p.k, kbar, p.n_kicks, self.spread()));
        let params =
            SimParams { k: p.k, kbar, ell: p.ell, n_kicks: p.n_kicks, ladder_half_width: ladder }.validate()?;

        let quadrature = match self.scenario {
            Scenario::NarrowGaussian | Scenario::BroadGaussian => {
                let sigma = self.sigma.unwrap_or(0.0);
                if !(sigma > 0.0) {
                    return Err(ConfigError::Invalid(format!("sigma must be positive, got {sigma}")));
                }
                let (lo, hi) = gaussian_support(sigma);
                Some(self.quadrature.as_ref().map_or(QuadratureSpec::default_for(p.n_kicks, hi - lo), |q| q.spec()))
            }
            Scenario::NarrowSquare | Scenario::Reconstruction => {
                let delta = self.delta.unwrap_or(0.0);
                if !(delta > 0.0 && delta <= 1.0) {
                    return Err(ConfigError::Invalid(format!("delta must lie in (0, 1], got {delta}")));
                }
                Some(self.quadrature.as_ref().map_or(QuadratureSpec::default_for(p.n_kicks, delta), |q| q.spec()))
            }
            _ => None,
        };
        if let Some(q) = &quadrature {
            q.validate()?;
        }
        Ok(Resolved { params, quadrature })
    }
}
