//! Momentum-diagonal expectation values.
//!
//! Distinct quasimomenta never interfere in these sums, so coherence only
//! matters through the initial amplitudes.

use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::propagator::FiberTrace;
use crate::state::{Ensemble, Fiber, ObservableSeries};

/// `(<P>, <P^2>/2)` of one fiber with `P = kbar (n + beta)`.
pub fn fiber_moments(fiber: &Fiber, kbar: f64) -> (f64, f64) {
    let beta = fiber.beta();
    let (mut p, mut e) = (0.0, 0.0);
    for (n, a) in fiber.rungs() {
        let w = a.norm_sqr();
        let mom = kbar * (n as f64 + beta);
        p += w * mom;
        e += w * mom * mom;
    }
    (p, 0.5 * e)
}

fn ensemble_moments(ensemble: &Ensemble, kbar: f64) -> (f64, f64) {
    ensemble.fibers().iter().fold((0.0, 0.0), |(p, e), wf| {
        let (fp, fe) = fiber_moments(&wf.fiber, kbar);
        (p + wf.weight * fp, e + wf.weight * fe)
    })
}

pub fn mean_momentum(ensemble: &Ensemble, params: &SimParams) -> f64 {
    ensemble_moments(ensemble, params.kbar).0
}

pub fn mean_energy(ensemble: &Ensemble, params: &SimParams) -> f64 {
    ensemble_moments(ensemble, params.kbar).1
}

pub fn series_from_snapshots(snapshots: &[Ensemble], params: &SimParams) -> ObservableSeries {
    let mut series = ObservableSeries::with_capacity(snapshots.len());
    for (t, snap) in snapshots.iter().enumerate() {
        let (p, e) = ensemble_moments(snap, params.kbar);
        series.push(t, p, e);
    }
    series
}

/// Weighted sum of per-fiber traces, accumulated in fiber order so the
/// result does not depend on how the traces were produced.
pub fn reduce_traces(weights: &[f64], traces: &[FiberTrace]) -> ObservableSeries {
    assert_eq!(weights.len(), traces.len());
    let len = traces.first().map_or(0, |tr| tr.momentum.len());
    let mut p = alloc::vec![0.0; len];
    let mut e = p.clone();
    for (w, tr) in weights.iter().zip(traces) {
        for t in 0..len {
            p[t] += w * tr.momentum[t];
            e[t] += w * tr.energy[t];
        }
    }
    ObservableSeries { t: (0..len).collect(), mean_p: p, mean_e: e }
}

/// Least-squares fit of `mean_e(t) - mean_e(0) = c t^power` over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub t_min: usize,
    pub t_max: usize,
    pub power: u32,
    pub coefficient: f64,
    /// RMS of the residuals divided by the RMS of the fitted data.
    pub residual: f64,
}

pub fn fit_rate(series: &ObservableSeries, t_min: usize, t_max: usize, power: u32) -> Result<RateFit> {
    if !(power == 1 || power == 2) {
        return Err(Error::InvalidParameter { name: "power", value: power as f64 });
    }
    if series.is_empty() || t_min >= t_max || t_max > *series.t.last().unwrap() {
        return Err(Error::WindowTooSmall { points: 0 });
    }
    let e0 = series.mean_e[0];
    let window: Vec<(f64, f64)> = series
        .t
        .iter()
        .zip(&series.mean_e)
        .filter(|(&t, _)| (t_min..=t_max).contains(&t))
        .map(|(&t, &e)| ((t as f64).powi(power as i32), e - e0))
        .collect();
    if window.len() < 4 {
        return Err(Error::WindowTooSmall { points: window.len() });
    }
    let sxy: f64 = window.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = window.iter().map(|(x, _)| x * x).sum();
    let coefficient = sxy / sxx;
    let ss_res: f64 = window.iter().map(|(x, y)| (y - coefficient * x).powi(2)).sum();
    let ss_tot: f64 = window.iter().map(|(_, y)| y * y).sum();
    let residual = if ss_tot > 0.0 { (ss_res / ss_tot).sqrt() } else { 0.0 };
    Ok(RateFit { t_min, t_max, power, coefficient, residual })
}
