//! Builds the initial ensemble of a configuration, runs the engines and
//! collects everything into a [`ResultBundle`].

use krqr_core::analytic::{
    damping_time, full_width_half_max, normalize_density, reconstruct_distribution, reconstruction_grid,
};
use krqr_core::ensembles::{make_bragg_superposition, make_gaussian, make_plane_wave, make_square};
use krqr_core::observables::fit_rate;
use krqr_core::{Coherence, Ensemble, ObservableSeries};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, Engine, ExperimentConfig, Resolved, Scenario};
use crate::engine::{run_analytic, run_numeric};
use crate::export::{write_bundle, ExportError};

/// Points on the quasimomentum grid of a reconstruction.
pub const RECONSTRUCTION_POINTS: usize = 4001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSeries {
    pub engine: Engine,
    pub t: Vec<usize>,
    pub mean_p: Vec<f64>,
    pub mean_e: Vec<f64>,
    /// Numeric engine only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaked: Option<f64>,
}

impl EngineSeries {
    pub fn observables(&self) -> ObservableSeries {
        ObservableSeries { t: self.t.clone(), mean_p: self.mean_p.clone(), mean_e: self.mean_e.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub engine: Engine,
    pub window: [usize; 2],
    pub power: u32,
    pub coefficient: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub engine: Engine,
    pub beta: Vec<f64>,
    /// Normalized over `beta`.
    pub density: Vec<f64>,
    pub full_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub config: ExperimentConfig,
    pub series: Vec<EngineSeries>,
    pub fits: Vec<FitRecord>,
    pub reconstruction: Option<Reconstruction>,
    /// `max_t |E_numeric - E_analytic| / max(|E_analytic|, K^2/4)` when
    /// both engines ran.
    pub engine_deviation: Option<f64>,
}

impl ResultBundle {
    pub fn engine(&self, engine: Engine) -> Option<&EngineSeries> {
        self.series.iter().find(|s| s.engine == engine)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{scenario}, {engine} engine: {source}")]
    Engine { scenario: Scenario, engine: Engine, source: krqr_core::Error },
    #[error("{scenario}: cannot build initial state: {source}")]
    Initial { scenario: Scenario, source: krqr_core::Error },
    #[error(transparent)]
    Export(#[from] ExportError),
}

impl RunError {
    /// 1 for configuration problems, 2 for failures while running or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Initial { .. } => 1,
            RunError::Engine { .. } | RunError::Export(_) => 2,
        }
    }
}

pub fn build_ensemble(config: &ExperimentConfig, resolved: &Resolved) -> krqr_core::Result<Ensemble> {
    let p = &resolved.params;
    let n0 = config.n0.unwrap_or(0);
    let quad = resolved.quadrature.as_ref();
    match config.scenario {
        Scenario::PlaneWave | Scenario::AntiResonance => make_plane_wave(n0, config.beta0.unwrap_or(0.0), p),
        Scenario::Ratchet => make_bragg_superposition(config.phi.unwrap_or(0.0), n0, p),
        Scenario::NarrowGaussian | Scenario::BroadGaussian => make_gaussian(
            config.sigma.unwrap_or(0.0),
            config.coherence.map_or(Coherence::Coherent, Into::into),
            config.phi.unwrap_or(0.0),
            quad.expect("distribution scenarios carry a quadrature"),
            p,
        ),
        Scenario::NarrowSquare | Scenario::Reconstruction => {
            make_square(config.delta.unwrap_or(0.0), quad.expect("distribution scenarios carry a quadrature"), p)
        }
    }
}

/// Width used for the damping time: the square width, or the square width
/// with the same kinetic energy for a Gaussian.
fn equivalent_width(config: &ExperimentConfig) -> Option<f64> {
    match config.scenario {
        Scenario::NarrowSquare => config.delta,
        Scenario::NarrowGaussian => config.sigma.map(|s| s * 12f64.sqrt()),
        _ => None,
    }
}

/// Fit windows `(t_min, t_max, power)` the scenario defines.
pub fn fit_windows(config: &ExperimentConfig, resolved: &Resolved) -> Vec<(usize, usize, u32)> {
    let n = resolved.params.n_kicks;
    match config.scenario {
        Scenario::BroadGaussian => vec![(1, n, 1)],
        Scenario::NarrowGaussian | Scenario::NarrowSquare => {
            let (Some(ell), Some(width)) = (resolved.params.ell, equivalent_width(config)) else {
                return Vec::new();
            };
            if ell % 2 != 0 {
                return Vec::new();
            }
            let tau = damping_time(ell, width);
            let ballistic_end = ((tau / 2.0).floor() as usize).min(10);
            let diffusive = ((2.0 * tau).ceil() as usize, ((4.0 * tau).floor() as usize).min(n));
            vec![(1, ballistic_end.min(n), 2), (diffusive.0, diffusive.1, 1)]
        }
        _ => Vec::new(),
    }
}

fn engine_deviation(numeric: &EngineSeries, analytic: &EngineSeries, k: f64) -> f64 {
    let floor = 0.25 * k * k;
    numeric
        .mean_e
        .iter()
        .zip(&analytic.mean_e)
        .map(|(n, a)| (n - a).abs() / a.abs().max(floor))
        .fold(0.0, f64::max)
}

/// Runs every requested engine without writing anything.
pub fn run(config: &ExperimentConfig) -> Result<ResultBundle, RunError> {
    let resolved = config.validate()?;
    let scenario = config.scenario;
    let ensemble =
        build_ensemble(config, &resolved).map_err(|source| RunError::Initial { scenario, source })?;
    let p = &resolved.params;

    let mut series = Vec::with_capacity(config.engines.len());
    let mut engines = config.engines.clone();
    engines.sort();
    for engine in engines {
        let fail = |source| RunError::Engine { scenario, engine, source };
        let s = match engine {
            Engine::Numeric => {
                let run = run_numeric(&ensemble, p).map_err(fail)?;
                EngineSeries {
                    engine,
                    t: run.series.t,
                    mean_p: run.series.mean_p,
                    mean_e: run.series.mean_e,
                    norm_drift: Some(run.norm_drift),
                    leaked: Some(run.leaked),
                }
            }
            Engine::Analytic => {
                let run = run_analytic(&ensemble, p).map_err(fail)?;
                EngineSeries { engine, t: run.t, mean_p: run.mean_p, mean_e: run.mean_e, norm_drift: None, leaked: None }
            }
        };
        series.push(s);
    }

    let mut fits = Vec::new();
    for s in &series {
        let obs = s.observables();
        for &(lo, hi, power) in &fit_windows(config, &resolved) {
            if let Ok(fit) = fit_rate(&obs, lo, hi, power) {
                fits.push(FitRecord {
                    engine: s.engine,
                    window: [lo, hi],
                    power,
                    coefficient: fit.coefficient,
                    residual: fit.residual,
                });
            }
        }
    }

    let reconstruction = if scenario == Scenario::Reconstruction {
        let source = &series[0];
        let beta = reconstruction_grid(RECONSTRUCTION_POINTS);
        let raw = reconstruct_distribution(&source.observables(), p.k, &beta)
            .map_err(|e| RunError::Engine { scenario, engine: source.engine, source: e })?;
        let density = normalize_density(&beta, &raw);
        let full_width = full_width_half_max(&beta, &density);
        Some(Reconstruction { engine: source.engine, beta, density, full_width })
    } else {
        None
    };

    let engine_deviation = match (
        series.iter().find(|s| s.engine == Engine::Numeric),
        series.iter().find(|s| s.engine == Engine::Analytic),
    ) {
        (Some(n), Some(a)) => Some(engine_deviation(n, a, p.k)),
        _ => None,
    };

    Ok(ResultBundle { config: config.clone(), series, fits, reconstruction, engine_deviation })
}

/// [`run`], then writes the bundle next to `config.output_path`.
pub fn execute(config: &ExperimentConfig) -> Result<ResultBundle, RunError> {
    let bundle = run(config)?;
    write_bundle(&bundle)?;
    Ok(bundle)
}
