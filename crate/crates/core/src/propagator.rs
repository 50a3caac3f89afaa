//! One-period Floquet evolution `U = exp(-i K cos X / kbar) exp(-i P^2 / 2 kbar)`
//! of quasimomentum fibers.
//!
//! Free flight is diagonal on the momentum ladder. The kick is diagonal on
//! the unit cell, so it is applied spectrally: ladder amplitudes are moved to
//! a position grid `X_j = -pi + 2 pi j / M`, multiplied by the kick phase and
//! moved back, after which rungs outside `[-N, N]` are discarded.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Radix2Fft, SpectralTransform};
use crate::observables::fiber_moments;
use crate::params::{wrap_position, SimParams, TWO_PI};
use crate::state::{Ensemble, Fiber, WeightedFiber};

/// Largest fraction of the norm a single truncation may discard.
pub const LEAK_THRESHOLD: f64 = 1e-9;

/// Precomputed kick factor `exp(-i K cos X_j / kbar)` on the position grid.
#[derive(Debug, Clone)]
pub struct KickPlan<B = Radix2Fft> {
    half_width: usize,
    phase_table: Vec<Complex64>,
    transform: B,
}

impl KickPlan<Radix2Fft> {
    pub fn new(params: &SimParams) -> Self {
        Self::with_transform(params, Radix2Fft::new)
    }
}

impl<B: SpectralTransform> KickPlan<B> {
    /// Builds a plan using the transform returned by `make(grid_size)`.
    pub fn with_transform(params: &SimParams, make: impl FnOnce(usize) -> B) -> Self {
        let m = grid_size_for(params.ladder_half_width);
        let strength = params.k / params.kbar;
        let phase_table = (0..m)
            .map(|j| {
                let x = -PI + TWO_PI * j as f64 / m as f64;
                Complex64::cis(-strength * x.cos())
            })
            .collect();
        let transform = make(m);
        assert_eq!(transform.len(), m, "transform length must match the kick grid");
        KickPlan { half_width: params.ladder_half_width, phase_table, transform }
    }

    pub fn grid_size(&self) -> usize {
        self.phase_table.len()
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn phase_table(&self) -> &[Complex64] {
        &self.phase_table
    }

    /// Applies the kick in place and returns the norm discarded by
    /// truncating back to the ladder.
    pub fn apply(&self, amps: &mut [Complex64], scratch: &mut Vec<Complex64>) -> f64 {
        let m = self.grid_size();
        let h = self.half_width as i64;
        debug_assert_eq!(amps.len(), 2 * self.half_width + 1);
        scratch.clear();
        scratch.resize(m, Complex64::new(0.0, 0.0));
        // X_j starts at -pi, which puts a factor (-1)^n on every harmonic
        for (i, &a) in amps.iter().enumerate() {
            let n = i as i64 - h;
            scratch[n.rem_euclid(m as i64) as usize] = if n & 1 == 0 { a } else { -a };
        }
        self.transform.inverse(scratch);
        for (s, p) in scratch.iter_mut().zip(&self.phase_table) {
            *s *= p;
        }
        self.transform.forward(scratch);
        let inv_m = 1.0 / m as f64;
        for (i, a) in amps.iter_mut().enumerate() {
            let n = i as i64 - h;
            let c = scratch[n.rem_euclid(m as i64) as usize] * inv_m;
            *a = if n & 1 == 0 { c } else { -c };
        }
        let discarded = &scratch[self.half_width + 1..m - self.half_width];
        discarded.iter().map(|c| c.norm_sqr()).sum::<f64>() * inv_m * inv_m
    }
}

/// Smallest power of two not below `4 (N + 1)`.
pub fn grid_size_for(half_width: usize) -> usize {
    (4 * (half_width + 1)).next_power_of_two()
}

/// Free-flight phase `exp(-i kbar (n + beta)^2 / 2)` for rung `n`.
///
/// With `ell` set the resonance is taken as exact: `pi ell n^2` reduces to a
/// sign because `n^2` and `n` share parity.
pub fn free_phase(n: i64, beta: f64, params: &SimParams) -> Complex64 {
    match params.ell {
        Some(ell) => {
            let sign = if (ell as i64 * n) & 1 == 0 { 1.0 } else { -1.0 };
            let theta = PI * ell as f64 * beta * (2.0 * n as f64 + beta);
            Complex64::cis(-theta) * sign
        }
        None => {
            let p = n as f64 + beta;
            Complex64::cis(-(0.5 * params.kbar * p * p) % TWO_PI)
        }
    }
}

pub fn free_phases(beta: f64, params: &SimParams) -> Vec<Complex64> {
    let h = params.ladder_half_width as i64;
    (-h..=h).map(|n| free_phase(n, beta, params)).collect()
}

/// Free propagation over one period.
pub fn free_step(fiber: &Fiber, params: &SimParams) -> Fiber {
    let mut out = fiber.clone();
    let beta = fiber.beta();
    for ((n, _), a) in fiber.rungs().zip(out.amps_mut()) {
        *a *= free_phase(n, beta, params);
    }
    out
}

/// One instantaneous kick.
pub fn kick_step<B: SpectralTransform>(fiber: &Fiber, plan: &KickPlan<B>) -> Result<Fiber> {
    let mut out = fiber.clone();
    let leaked = plan.apply(out.amps_mut(), &mut Vec::new());
    if leaked > LEAK_THRESHOLD {
        return Err(Error::LadderLeak { kick: 1, leaked });
    }
    Ok(out)
}

/// Advances one fiber period by period, reusing its free-phase table.
pub struct FiberPropagator<'a, B> {
    plan: &'a KickPlan<B>,
    free: Vec<Complex64>,
    scratch: Vec<Complex64>,
    kicks: usize,
    leaked: f64,
}

impl<'a, B: SpectralTransform> FiberPropagator<'a, B> {
    pub fn new(beta: f64, params: &SimParams, plan: &'a KickPlan<B>) -> Self {
        FiberPropagator {
            plan,
            free: free_phases(beta, params),
            scratch: Vec::with_capacity(plan.grid_size()),
            kicks: 0,
            leaked: 0.0,
        }
    }

    /// Free flight followed by a kick.
    pub fn step(&mut self, fiber: &mut Fiber) -> Result<()> {
        let amps = fiber.amps_mut();
        for (a, p) in amps.iter_mut().zip(&self.free) {
            *a *= p;
        }
        let leaked = self.plan.apply(amps, &mut self.scratch);
        self.kicks += 1;
        self.leaked += leaked;
        if leaked > LEAK_THRESHOLD {
            return Err(Error::LadderLeak { kick: self.kicks, leaked });
        }
        Ok(())
    }

    /// Total norm discarded so far.
    pub fn leaked(&self) -> f64 {
        self.leaked
    }
}

/// Evolves every fiber for `params.n_kicks` periods and returns the
/// snapshots after each kick, starting with the initial state.
///
/// Incoherent ensembles are first split into pure components, so the
/// snapshots list one fiber per populated rung.
pub fn evolve(ensemble: &Ensemble, params: &SimParams) -> Result<Vec<Ensemble>> {
    evolve_with(ensemble, params, &KickPlan::new(params))
}

pub fn evolve_with<B: SpectralTransform>(
    ensemble: &Ensemble,
    params: &SimParams,
    plan: &KickPlan<B>,
) -> Result<Vec<Ensemble>> {
    let start = ensemble.pure_components();
    let coherence = start.coherence();
    let mut current: Vec<WeightedFiber> = start.fibers().to_vec();
    let mut steppers: Vec<_> =
        current.iter().map(|wf| FiberPropagator::new(wf.fiber.beta(), params, plan)).collect();
    let mut snapshots = Vec::with_capacity(params.n_kicks + 1);
    snapshots.push(start);
    for _ in 0..params.n_kicks {
        for (wf, stepper) in current.iter_mut().zip(&mut steppers) {
            stepper.step(&mut wf.fiber)?;
        }
        snapshots.push(Ensemble::from_parts(current.clone(), coherence));
    }
    Ok(snapshots)
}

/// Momentum moments of one fiber after each kick.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberTrace {
    /// `<P>` for `t = 0 ..= n_kicks`.
    pub momentum: Vec<f64>,
    /// `<P^2>/2` for `t = 0 ..= n_kicks`.
    pub energy: Vec<f64>,
    /// Largest `|norm(t) - norm(0)|`.
    pub norm_drift: f64,
    pub leaked: f64,
}

/// Propagates a single fiber, recording only its moments.
pub fn trace_fiber<B: SpectralTransform>(fiber: &Fiber, params: &SimParams, plan: &KickPlan<B>) -> Result<FiberTrace> {
    let mut fiber = fiber.clone();
    let mut stepper = FiberPropagator::new(fiber.beta(), params, plan);
    let mut momentum = Vec::with_capacity(params.n_kicks + 1);
    let mut energy = Vec::with_capacity(params.n_kicks + 1);
    let norm0 = fiber.norm_sqr();
    let mut norm_drift: f64 = 0.0;
    let (p, e) = fiber_moments(&fiber, params.kbar);
    momentum.push(p);
    energy.push(e);
    for _ in 0..params.n_kicks {
        stepper.step(&mut fiber)?;
        let (p, e) = fiber_moments(&fiber, params.kbar);
        momentum.push(p);
        energy.push(e);
        norm_drift = norm_drift.max((fiber.norm_sqr() - norm0).abs());
    }
    Ok(FiberTrace { momentum, energy, norm_drift, leaked: stepper.leaked() })
}

/// Comb translation and global phase of the resonant recursion
/// `psi(X, t) = e^{-i K cos X / kbar} e^{i kbar beta (beta + 1) / 2} psi(X - v_beta, t - 1)`.
///
/// Returns the comb center `wrap(xi + v_beta t)` and the phase accumulated
/// over `t` periods.
pub fn recursion_step_csbw(xi: f64, beta: f64, params: &SimParams, t: usize) -> Result<(f64, Complex64)> {
    let ell = params.ell.ok_or(Error::NotResonant)?;
    let shift = TWO_PI * resonant_velocity_turns(ell, beta) * t as f64;
    let phase = Complex64::cis(params.kbar * beta * (beta + 1.0) / 2.0 * t as f64);
    Ok((wrap_position(xi + shift), phase))
}

/// `v_beta / 2 pi = ell (beta + 1/2)` reduced to `[-1/2, 1/2)`.
pub(crate) fn resonant_velocity_turns(ell: u32, beta: f64) -> f64 {
    let turns = ell as f64 * (beta + 0.5);
    turns - (turns + 0.5).floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::observables::fiber_moments;

    fn params(kbar_ell: u32, n_kicks: usize) -> SimParams {
        SimParams::resonant(10.0, kbar_ell, n_kicks)
    }

    #[test]
    fn resonance_free_flight_is_identity() {
        let p = params(2, 4);
        let h = p.ladder_half_width as i64;
        for n in -h..=h {
            assert_eq!(free_phase(n, 0.0, &p), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn antiresonance_free_flight_alternates() {
        let p = params(1, 4);
        assert_eq!(free_phase(3, 0.0, &p), Complex64::new(-1.0, 0.0));
        assert_eq!(free_phase(-2, 0.0, &p), Complex64::new(1.0, 0.0));
        let generic = SimParams { ell: None, ..p };
        assert!((free_phase(3, 0.0, &generic) + 1.0).norm() < 1e-12);
    }

    #[test]
    fn quarter_quasimomentum_phase() {
        let p = params(1, 4);
        let want = Complex64::cis(-PI / 16.0);
        assert!((free_phase(0, 0.25, &p) - want).norm() < 1e-15);
        let generic = SimParams { ell: None, ..p };
        assert!((free_phase(0, 0.25, &generic) - want).norm() < 1e-15);
    }

    #[test]
    fn plan_geometry() {
        let p = SimParams { ladder_half_width: 64, ..params(1, 4) };
        let plan = KickPlan::new(&p);
        assert_eq!(plan.grid_size(), 512);
        assert!(plan.grid_size() >= 2 * (2 * 64 + 1));
        assert!(plan.phase_table().iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn zero_kick_is_identity() {
        let p = SimParams { k: 0.0, ..params(1, 4) };
        let f = Fiber::new(0.1, (0..p.ladder_len()).map(|i| Complex64::new(i as f64, 1.0)).collect()).unwrap();
        let out = kick_step(&f, &KickPlan::new(&p)).unwrap();
        for (a, b) in f.amps().iter().zip(out.amps()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn short_ladder_leaks() {
        let p = SimParams { k: 200.0, ladder_half_width: 4, ..params(1, 1) };
        let f = Fiber::plane_wave(0, 0.0, 4).unwrap();
        assert!(matches!(kick_step(&f, &KickPlan::new(&p)), Err(Error::LadderLeak { kick: 1, .. })));
    }

    #[test]
    fn evolve_keeps_quasimomentum_and_counts_snapshots() {
        let p = params(1, 6);
        let f = Fiber::plane_wave(0, 0.123, p.ladder_half_width).unwrap();
        let snaps = evolve(&Ensemble::single(f), &p).unwrap();
        assert_eq!(snaps.len(), 7);
        assert!(snaps.iter().all(|s| s.fibers()[0].fiber.beta().to_bits() == 0.123f64.to_bits()));
        let none = evolve(&snaps[0], &SimParams { n_kicks: 0, ..p }).unwrap();
        assert_eq!(none, vec![snaps[0].clone()]);
    }

    #[test]
    fn antiresonance_returns_after_two_kicks() {
        let p = params(1, 2);
        let f = Fiber::plane_wave(0, 0.0, p.ladder_half_width).unwrap();
        let tr = trace_fiber(&f, &p, &KickPlan::new(&p)).unwrap();
        assert!((tr.energy[1] - 25.0).abs() < 1e-10);
        assert!(tr.energy[2].abs() < 1e-10);
    }

    #[test]
    fn resonance_is_ballistic() {
        let p = params(2, 5);
        let f = Fiber::plane_wave(0, 0.0, p.ladder_half_width).unwrap();
        let tr = trace_fiber(&f, &p, &KickPlan::new(&p)).unwrap();
        assert!((tr.energy[5] - 625.0).abs() < 625.0 * 1e-8);
        assert!(tr.norm_drift < 1e-13);
    }

    #[test]
    fn comb_translation_examples() {
        let (xi, _) = recursion_step_csbw(0.0, 0.0, &params(2, 1), 1).unwrap();
        assert_eq!(xi, 0.0);
        let (xi, _) = recursion_step_csbw(0.0, 0.0, &params(1, 1), 1).unwrap();
        assert_eq!(xi, -PI);
        let (xi, phase) = recursion_step_csbw(1.0, 0.25, &params(1, 1), 2).unwrap();
        assert!((xi - wrap_position(1.0 + 3.0 * PI)).abs() < 1e-14);
        assert!((phase - Complex64::cis(TWO_PI * 0.25 * 1.25)).norm() < 1e-14);
        let off = SimParams { ell: None, ..params(1, 1) };
        assert_eq!(recursion_step_csbw(0.0, 0.0, &off, 1), Err(Error::NotResonant));
    }

    #[test]
    fn free_step_preserves_moments() {
        let p = params(1, 1);
        let f = Fiber::new(0.2, (0..p.ladder_len()).map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.3)).collect())
            .unwrap();
        let g = free_step(&f, &p);
        let (p0, e0) = fiber_moments(&f, p.kbar);
        let (p1, e1) = fiber_moments(&g, p.kbar);
        assert!((p0 - p1).abs() < 1e-13 && (e0 - e1).abs() < 1e-12);
    }
}
