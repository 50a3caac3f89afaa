//! Named parameter sets, keyed to the figures they reproduce.

use std::f64::consts::PI;
use std::path::PathBuf;

use krqr_core::analytic::{csbw_map, filter_approx, filter_function};
use krqr_core::params::{SimParams, TWO_PI};

use crate::config::{CoherenceChoice, ConfigError, Engine, ExperimentConfig, ParamsConfig, Scenario};
use crate::export::{create, csv_path, csv_writer, format_float, ExportError};

pub const PRESET_NAMES: [&str; 11] = [
    "fig1a",
    "fig1b",
    "fig2",
    "fig3a",
    "fig3b",
    "fig4",
    "plane-wave",
    "anti-resonance",
    "ratchet",
    "broad",
    "reconstruction",
];

/// Command-line overrides of a preset's defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub k: Option<f64>,
    pub kbar: Option<f64>,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    pub phi: Option<f64>,
    pub kicks: Option<usize>,
    pub out: Option<String>,
}

/// Comb trajectories of a zero-momentum plane wave cut into slices.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismSpec {
    pub params: SimParams,
    pub slices: usize,
    pub output_path: String,
}

/// Samples of the grating filter and its central-lobe approximation,
/// alongside the Gaussian and square distributions it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub ell: u32,
    pub times: Vec<usize>,
    pub sigma: f64,
    pub delta: f64,
    pub beta_max: f64,
    pub points: usize,
    pub output_path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Experiment(ExperimentConfig),
    Mechanism(MechanismSpec),
    Filter(FilterSpec),
}

/// `ell` when `kbar` is a whole multiple of `2 pi`.
pub fn resonance_order(kbar: f64) -> Option<u32> {
    let r = kbar / TWO_PI;
    let ell = r.round();
    (ell >= 1.0 && (r - ell).abs() <= 1e-12 * r).then_some(ell as u32)
}

fn resolve_ell(default: u32, o: &Overrides) -> (f64, Option<u32>) {
    match o.kbar {
        Some(kbar) => (kbar, resonance_order(kbar)),
        None => (TWO_PI * default as f64, Some(default)),
    }
}

fn experiment(name: &str, scenario: Scenario, ell: u32, kicks: usize, o: &Overrides) -> ExperimentConfig {
    let (kbar, ell) = resolve_ell(ell, o);
    let engines = if ell.is_some() { vec![Engine::Numeric, Engine::Analytic] } else { vec![Engine::Numeric] };
    ExperimentConfig {
        scenario,
        params: ParamsConfig {
            k: o.k.unwrap_or(10.0),
            kbar: Some(kbar),
            ell,
            n_kicks: o.kicks.unwrap_or(kicks),
            ladder_half_width: None,
        },
        n0: None,
        beta0: None,
        phi: o.phi,
        sigma: None,
        delta: None,
        coherence: None,
        quadrature: None,
        engines,
        output_path: o.out.clone().unwrap_or_else(|| format!("results/{name}")),
    }
}

pub fn preset(name: &str, o: &Overrides) -> Result<Preset, ConfigError> {
    let exp = |scenario, ell, kicks| experiment(name, scenario, ell, kicks, o);
    let cfg = match name {
        "fig1a" | "fig1b" => {
            let (kbar, ell) = resolve_ell(if name == "fig1a" { 2 } else { 1 }, o);
            let ell = ell.ok_or_else(|| ConfigError::Invalid(format!("{name} needs kbar = 2 pi ell")))?;
            let params = SimParams {
                k: o.k.unwrap_or(10.0),
                kbar,
                ell: Some(ell),
                n_kicks: o.kicks.unwrap_or(4),
                ladder_half_width: 1,
            };
            return Ok(Preset::Mechanism(MechanismSpec {
                params,
                slices: 8,
                output_path: o.out.clone().unwrap_or_else(|| format!("results/{name}")),
            }));
        }
        "fig4" => {
            let (_, ell) = resolve_ell(2, o);
            let ell = ell.ok_or_else(|| ConfigError::Invalid("fig4 needs kbar = 2 pi ell".into()))?;
            return Ok(Preset::Filter(FilterSpec {
                ell,
                times: o.kicks.map_or(vec![8, 60], |t| vec![t]),
                sigma: o.sigma.unwrap_or(0.0115),
                delta: o.delta.unwrap_or(0.04),
                beta_max: 0.1,
                points: 801,
                output_path: o.out.clone().unwrap_or_else(|| "results/fig4".into()),
            }));
        }
        "fig2" => ExperimentConfig { sigma: Some(o.sigma.unwrap_or(0.0115)), ..exp(Scenario::NarrowGaussian, 2, 200) },
        "fig3a" => ExperimentConfig { sigma: Some(o.sigma.unwrap_or(0.0115)), ..exp(Scenario::NarrowGaussian, 1, 200) },
        "fig3b" => ExperimentConfig { sigma: Some(o.sigma.unwrap_or(0.00577)), ..exp(Scenario::NarrowGaussian, 1, 200) },
        "plane-wave" => ExperimentConfig { beta0: Some(0.0), ..exp(Scenario::PlaneWave, 2, 20) },
        "anti-resonance" => ExperimentConfig { beta0: Some(0.0), ..exp(Scenario::AntiResonance, 1, 50) },
        "ratchet" => ExperimentConfig { phi: Some(o.phi.unwrap_or(0.0)), ..exp(Scenario::Ratchet, 2, 30) },
        "broad" => ExperimentConfig {
            sigma: Some(o.sigma.unwrap_or(5.0)),
            coherence: Some(CoherenceChoice::Coherent),
            ..exp(Scenario::BroadGaussian, 1, 50)
        },
        "reconstruction" => ExperimentConfig { delta: Some(o.delta.unwrap_or(0.02)), ..exp(Scenario::Reconstruction, 1, 200) },
        _ => {
            return Err(ConfigError::Invalid(format!(
                "unknown scenario `{name}`; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset::Experiment(cfg))
}

/// Rows `slice,t,xi,transfer,momentum`: `xi` is where kick `t` lands and
/// `transfer` the momentum it delivers.
pub fn write_mechanism_csv(spec: &MechanismSpec) -> Result<PathBuf, ExportError> {
    let path = csv_path(&spec.output_path);
    let csv_err = |source| ExportError::Csv { path: path.clone(), source };
    let mut out = csv_writer(create(&path)?);
    out.write_record(["slice", "t", "xi", "transfer", "momentum"]).map_err(csv_err)?;
    for slice in 0..spec.slices {
        let xi0 = -PI + TWO_PI * (slice as f64 + 0.5) / spec.slices as f64;
        let mut prev = 0.0;
        for t in 0..=spec.params.n_kicks {
            let s = csbw_map(xi0, 0.0, 0.0, &spec.params, t).expect("mechanism presets are resonant");
            let row = [slice.to_string(), t.to_string(), format_float(s.xi), format_float(s.p - prev), format_float(s.p)];
            out.write_record(row).map_err(csv_err)?;
            prev = s.p;
        }
    }
    out.flush().map_err(|source| ExportError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Rows `t,beta,filter,approx,gaussian,square`; `approx` is empty outside
/// the central lobe.
pub fn write_filter_csv(spec: &FilterSpec) -> Result<PathBuf, ExportError> {
    let path = csv_path(&spec.output_path);
    let csv_err = |source| ExportError::Csv { path: path.clone(), source };
    let mut out = csv_writer(create(&path)?);
    out.write_record(["t", "beta", "filter", "approx", "gaussian", "square"]).map_err(csv_err)?;
    let norm = 1.0 / ((TWO_PI).sqrt() * spec.sigma);
    for &t in &spec.times {
        for i in 0..spec.points {
            let beta = -spec.beta_max + 2.0 * spec.beta_max * i as f64 / (spec.points - 1) as f64;
            let approx = filter_approx(beta, t).map(format_float).unwrap_or_default();
            let gaussian = norm * (-beta * beta / (2.0 * spec.sigma * spec.sigma)).exp();
            let square = if beta.abs() <= 0.5 * spec.delta { 1.0 / spec.delta } else { 0.0 };
            let row = [
                t.to_string(),
                format_float(beta),
                format_float(filter_function(beta, t, spec.ell)),
                approx,
                format_float(gaussian),
                format_float(square),
            ];
            out.write_record(row).map_err(csv_err)?;
        }
    }
    out.flush().map_err(|source| ExportError::Io { path: path.clone(), source })?;
    Ok(path)
}
