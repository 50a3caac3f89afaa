//! Numeric and analytic engines over whole ensembles.

use std::sync::OnceLock;

use krqr_core::analytic::averaged_series;
use krqr_core::ensembles::{csbw_weights, xi_grid, DEFAULT_XI_POINTS};
use krqr_core::observables::reduce_traces;
use krqr_core::propagator::{trace_fiber, KickPlan};
use krqr_core::{Ensemble, FiberTrace, ObservableSeries, SimParams};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::backend::RustFftBackend;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "KRQR_THREADS";

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericRun {
    pub series: ObservableSeries,
    /// Largest norm drift over all fibers.
    pub norm_drift: f64,
    /// Largest probability lost off the ladder by any fiber.
    pub leaked: f64,
}

/// Propagates every fiber of `ensemble` in parallel and reduces the
/// per-fiber moments in fiber order, so the result is independent of the
/// worker count.
pub fn run_numeric(ensemble: &Ensemble, params: &SimParams) -> krqr_core::Result<NumericRun> {
    let params = params.validate()?;
    let plan = KickPlan::with_transform(&params, RustFftBackend::new);
    let pure = ensemble.pure_components();
    let traces: Vec<FiberTrace> = pool().install(|| {
        pure.fibers().par_iter().map(|wf| trace_fiber(&wf.fiber, &params, &plan)).collect::<Result<_, _>>()
    })?;
    let weights: Vec<f64> = pure.fibers().iter().map(|wf| wf.weight).collect();
    Ok(NumericRun {
        series: reduce_traces(&weights, &traces),
        norm_drift: traces.iter().map(|t| t.norm_drift).fold(0.0, f64::max),
        leaked: traces.iter().map(|t| t.leaked).fold(0.0, f64::max),
    })
}

/// Points on the `xi` grid needed for the CSBW moments to be exact: the
/// weights are trigonometric polynomials of degree up to the populated
/// rung span, and the moments multiply them by `e^{2 i xi}`.
pub fn xi_points_for(ensemble: &Ensemble) -> usize {
    let span = ensemble
        .fibers()
        .iter()
        .map(|wf| {
            let mut populated = wf.fiber.rungs().filter(|(_, a)| a.norm_sqr() > 0.0).map(|(n, _)| n);
            let first = populated.next().unwrap_or(0);
            let last = populated.last().unwrap_or(first);
            (last - first) as usize
        })
        .max()
        .unwrap_or(0);
    DEFAULT_XI_POINTS.max((2 * span + 4).next_power_of_two())
}

/// CSBW-map prediction for the same ensemble.
pub fn run_analytic(ensemble: &Ensemble, params: &SimParams) -> krqr_core::Result<ObservableSeries> {
    let params = params.validate()?;
    let dist = csbw_weights(ensemble, &xi_grid(xi_points_for(ensemble)), &params)?;
    averaged_series(&dist, &params, params.n_kicks)
}
