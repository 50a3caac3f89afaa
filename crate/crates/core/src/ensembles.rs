//! Initial conditions and their decomposition into comb-shaped Bloch waves.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::observables::{mean_energy, mean_momentum};
use crate::params::{SimParams, TWO_PI};
use crate::state::{ladder_index, Coherence, CsbwDistribution, Ensemble, Fiber, WeightedFiber};

/// Default number of points on the `xi` grid.
pub const DEFAULT_XI_POINTS: usize = 256;

/// Below this width a Gaussian collapses to a single plane wave.
pub const DELTA_LIMIT_SIGMA: f64 = 1e-9;

/// Gaussian rungs are kept for `|n + beta| <= GAUSSIAN_CUTOFF * sigma`.
const GAUSSIAN_CUTOFF: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadratureScheme {
    Midpoint,
    GaussLegendre,
}

/// Discretization of the quasimomentum integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub n_beta: usize,
    pub scheme: QuadratureScheme,
    /// Integration interval inside `[-1/2, 1/2]`; `None` lets the
    /// distribution choose its own support.
    pub support: Option<(f64, f64)>,
}

impl QuadratureSpec {
    pub fn midpoint(n_beta: usize) -> Self {
        QuadratureSpec { n_beta, scheme: QuadratureScheme::Midpoint, support: None }
    }

    pub fn gauss_legendre(n_beta: usize) -> Self {
        QuadratureSpec { n_beta, scheme: QuadratureScheme::GaussLegendre, support: None }
    }

    /// Midpoint rule fine enough to resolve the filter function, whose
    /// oscillations in `beta` shrink like `1 / (ell t)`.
    pub fn default_for(n_kicks: usize, support_width: f64) -> Self {
        let n = (8.0 * n_kicks as f64 * support_width).ceil() as usize;
        Self::midpoint(n.max(512))
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_beta < 8 {
            return Err(Error::InvalidQuadrature("n_beta must be at least 8"));
        }
        if let Some((lo, hi)) = self.support {
            if !(hi > lo) {
                return Err(Error::InvalidQuadrature("support must have positive width"));
            }
            if lo < -0.5 || hi > 0.5 {
                return Err(Error::InvalidQuadrature("support must lie in the first Brillouin zone"));
            }
        }
        Ok(())
    }

    /// Nodes and weights on `[lo, hi]`; weights sum to `hi - lo`.
    pub fn nodes(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let width = hi - lo;
        match self.scheme {
            QuadratureScheme::Midpoint => {
                let h = width / self.n_beta as f64;
                (0..self.n_beta).map(|k| (lo + (k as f64 + 0.5) * h, h)).collect()
            }
            QuadratureScheme::GaussLegendre => gauss_legendre(self.n_beta)
                .into_iter()
                .map(|(x, w)| (lo + 0.5 * width * (x + 1.0), 0.5 * width * w))
                .collect(),
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

/// Uniform grid `xi_j = -pi + 2 pi j / n`.
pub fn xi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| -PI + TWO_PI * j as f64 / n as f64).collect()
}

/// Plane wave `P = (n0 + beta0) kbar` as a single fiber of weight one.
pub fn make_plane_wave(n0: i64, beta0: f64, params: &SimParams) -> Result<Ensemble> {
    Ok(Ensemble::single(Fiber::plane_wave(n0, beta0, params.ladder_half_width)?))
}

/// Bragg-split state `(|n kbar> - i e^{i phi} |(n-1) kbar>) / sqrt 2` at `beta = 0`.
pub fn make_bragg_superposition(phi: f64, n: i64, params: &SimParams) -> Result<Ensemble> {
    let h = params.ladder_half_width;
    let upper = ladder_index(n, h).ok_or(Error::OutOfLadder { n, half_width: h })?;
    let lower = ladder_index(n - 1, h).ok_or(Error::OutOfLadder { n: n - 1, half_width: h })?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * h + 1];
    let s = core::f64::consts::FRAC_1_SQRT_2;
    amps[upper] = Complex64::new(s, 0.0);
    amps[lower] = -Complex64::i() * Complex64::cis(phi) * s;
    Ok(Ensemble::single(Fiber::new(0.0, amps)?))
}

/// Default quasimomentum support of a Gaussian of width `sigma`.
pub fn gaussian_support(sigma: f64) -> (f64, f64) {
    let w = 8.0 * sigma;
    if w < 0.5 {
        (-w, w)
    } else {
        (-0.5, 0.5)
    }
}

/// Gaussian momentum distribution of r.m.s. width `sigma` (in units of
/// `kbar`) centred on zero momentum.
///
/// Each quadrature node carries one fiber with amplitudes
/// `exp(-(n + beta)^2 / 4 sigma^2)`, times `exp(-i (n + beta) phi)` when
/// coherent. Narrow distributions therefore reduce to `delta_{n,0}` fibers.
pub fn make_gaussian(
    sigma: f64,
    coherence: Coherence,
    phi: f64,
    quad: &QuadratureSpec,
    params: &SimParams,
) -> Result<Ensemble> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter { name: "sigma", value: sigma });
    }
    if sigma <= DELTA_LIMIT_SIGMA {
        return make_plane_wave(0, 0.0, params);
    }
    quad.validate()?;
    let (lo, hi) = quad.support.unwrap_or_else(|| gaussian_support(sigma));
    let h = params.ladder_half_width;
    let cut = GAUSSIAN_CUTOFF * sigma;
    let mut fibers = Vec::with_capacity(quad.n_beta);
    for (beta, w) in quad.nodes(lo, hi) {
        let mut n_lo = (-beta - cut).ceil() as i64;
        let mut n_hi = (-beta + cut).floor() as i64;
        if n_lo > n_hi {
            n_lo = (-beta).round() as i64;
            n_hi = n_lo;
        }
        for n in [n_lo, n_hi] {
            if ladder_index(n, h).is_none() {
                return Err(Error::OutOfLadder { n, half_width: h });
            }
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * h + 1];
        let mut mass = 0.0;
        for n in n_lo..=n_hi {
            let p = n as f64 + beta;
            let mag = (-p * p / (4.0 * sigma * sigma)).exp();
            let a = match coherence {
                Coherence::Coherent => Complex64::cis(-p * phi) * mag,
                Coherence::Incoherent => Complex64::new(mag, 0.0),
            };
            mass += mag * mag;
            amps[(n + h as i64) as usize] = a;
        }
        if mass > 0.0 {
            fibers.push(WeightedFiber { weight: w * mass, fiber: Fiber::new(beta, amps)? });
        }
    }
    normalized(fibers, coherence)
}

/// Square distribution of width `delta`: uniform on `|beta| <= delta / 2`
/// with every fiber in `n = 0`. The support is always taken from `delta`.
///
/// It carries the same mean kinetic energy as a Gaussian of width
/// [`square_to_gaussian_width`]`(delta)`.
pub fn make_square(delta: f64, quad: &QuadratureSpec, params: &SimParams) -> Result<Ensemble> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    QuadratureSpec { support: None, ..*quad }.validate()?;
    let fibers = quad
        .nodes(-0.5 * delta, 0.5 * delta)
        .into_iter()
        .map(|(beta, w)| Ok(WeightedFiber { weight: w / delta, fiber: Fiber::plane_wave(0, beta, params.ladder_half_width)? }))
        .collect::<Result<Vec<_>>>()?;
    normalized(fibers, Coherence::Coherent)
}

pub fn square_to_gaussian_width(delta: f64) -> f64 {
    delta / 12f64.sqrt()
}

fn normalized(mut fibers: Vec<WeightedFiber>, coherence: Coherence) -> Result<Ensemble> {
    let total: f64 = fibers.iter().map(|wf| wf.weight).sum();
    if !(total > 0.0) {
        return Err(Error::InvalidQuadrature("distribution has no weight on the support"));
    }
    fibers.iter_mut().for_each(|wf| wf.weight /= total);
    Ensemble::new(fibers, coherence)
}

/// CSBW weights `pi(beta, xi)` of an ensemble on a uniform periodic `xi` grid.
///
/// Coherent fibers give `|psi_beta(xi)|^2` with
/// `psi_beta(xi) = sum_n e^{i (n + beta) xi} psi(n) / sqrt(2 pi)`; incoherent
/// fibers give the flat `sum_n |psi(n)|^2 / 2 pi`.
pub fn csbw_weights(ensemble: &Ensemble, xi: &[f64], params: &SimParams) -> Result<CsbwDistribution> {
    check_periodic_grid(xi)?;
    let m = xi.len();
    let norm = 1.0 / TWO_PI;
    let mut weights = Vec::with_capacity(ensemble.len() * m);
    let mut momentum_density = Vec::with_capacity(ensemble.len() * m);
    let mut beta_grid = Vec::with_capacity(ensemble.len());
    for wf in ensemble.fibers() {
        let beta = wf.fiber.beta();
        beta_grid.push(beta);
        let rungs: Vec<(f64, Complex64)> = wf
            .fiber
            .rungs()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(n, a)| (params.kbar * (n as f64 + beta), a))
            .collect();
        match ensemble.coherence() {
            Coherence::Coherent => {
                let n0 = -(wf.fiber.half_width() as i64);
                let ns: Vec<i64> = wf
                    .fiber
                    .amps()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm_sqr() > 0.0)
                    .map(|(i, _)| n0 + i as i64)
                    .collect();
                for &x in xi {
                    let mut psi = Complex64::new(0.0, 0.0);
                    let mut ppsi = Complex64::new(0.0, 0.0);
                    for (&n, &(mom, a)) in ns.iter().zip(&rungs) {
                        let term = a * Complex64::cis(n as f64 * x);
                        psi += term;
                        ppsi += term * mom;
                    }
                    weights.push(wf.weight * norm * psi.norm_sqr());
                    momentum_density.push(wf.weight * norm * (psi.conj() * ppsi).re);
                }
            }
            Coherence::Incoherent => {
                let pop: f64 = rungs.iter().map(|(_, a)| a.norm_sqr()).sum();
                let cur: f64 = rungs.iter().map(|(mom, a)| mom * a.norm_sqr()).sum();
                weights.extend(core::iter::repeat_n(wf.weight * norm * pop, m));
                momentum_density.extend(core::iter::repeat_n(wf.weight * norm * cur, m));
            }
        }
    }
    let mut dist = CsbwDistribution {
        beta_grid,
        xi_grid: xi.to_vec(),
        weights,
        momentum_density,
        initial_momentum: mean_momentum(ensemble, params),
        initial_energy: mean_energy(ensemble, params),
    };
    let total = dist.total();
    dist.weights.iter_mut().for_each(|w| *w /= total);
    dist.momentum_density.iter_mut().for_each(|w| *w /= total);
    Ok(dist)
}

fn check_periodic_grid(xi: &[f64]) -> Result<()> {
    if xi.len() < 4 {
        return Err(Error::InvalidGrid("xi grid needs at least 4 points"));
    }
    let step = TWO_PI / xi.len() as f64;
    if !(-PI..PI).contains(&xi[0]) {
        return Err(Error::InvalidGrid("xi grid must start inside [-pi, pi)"));
    }
    let uniform = xi.windows(2).all(|w| ((w[1] - w[0]) - step).abs() < 1e-12);
    if !uniform || xi[xi.len() - 1] >= PI {
        return Err(Error::InvalidGrid("xi grid must be uniform over one period"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SimParams {
        SimParams::resonant(10.0, 1, 10)
    }

    #[test]
    fn midpoint_nodes_are_uniform() {
        let q = QuadratureSpec::midpoint(8);
        let nodes = q.nodes(-0.02, 0.02);
        assert!((nodes[0].0 + 0.0175).abs() < 1e-15);
        assert!((nodes.iter().map(|n| n.1).sum::<f64>() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let q = QuadratureSpec::gauss_legendre(8);
        let nodes = q.nodes(-0.5, 0.5);
        let integral: f64 = nodes.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((integral - 2.0 * 0.5f64.powi(15) / 15.0).abs() < 1e-15);
        assert!((nodes.iter().map(|n| n.1).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_validation() {
        assert!(QuadratureSpec::midpoint(4).validate().is_err());
        assert!(QuadratureSpec::midpoint(8).with_support(0.1, 0.1).validate().is_err());
        assert!(QuadratureSpec::midpoint(8).with_support(-0.6, 0.1).validate().is_err());
        assert_eq!(QuadratureSpec::default_for(200, 0.04).n_beta, 512);
        assert_eq!(QuadratureSpec::default_for(200, 1.0).n_beta, 1600);
    }

    #[test]
    fn plane_wave_constructor() {
        let p = params();
        let e = make_plane_wave(0, 0.6, &p).unwrap();
        let f = &e.fibers()[0].fiber;
        assert_eq!(f.amp(1), Complex64::new(1.0, 0.0));
        assert!((f.beta() + 0.4).abs() < 1e-15);
        let n = p.ladder_half_width as i64 + 1;
        assert!(matches!(make_plane_wave(n, 0.0, &p), Err(Error::OutOfLadder { .. })));
    }

    #[test]
    fn bragg_amplitudes() {
        let p = params();
        let e = make_bragg_superposition(0.3, 2, &p).unwrap();
        let f = &e.fibers()[0].fiber;
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!((f.amp(2) - s).norm() < 1e-15);
        assert!((f.amp(1) + Complex64::i() * Complex64::cis(0.3) * s).norm() < 1e-15);
        let h = p.ladder_half_width as i64;
        assert!(make_bragg_superposition(0.0, -h, &p).is_err());
    }

    #[test]
    fn narrow_gaussian_is_single_rung() {
        let p = params();
        let e = make_gaussian(0.0115, Coherence::Coherent, 0.0, &QuadratureSpec::midpoint(64), &p).unwrap();
        assert_eq!(e.len(), 64);
        for wf in e.fibers() {
            assert!((wf.fiber.amp(0).norm() - 1.0).abs() < 1e-15);
        }
        let total: f64 = e.fibers().iter().map(|wf| wf.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vanishing_width_is_plane_wave() {
        let p = params();
        let e = make_gaussian(1e-12, Coherence::Coherent, 0.0, &QuadratureSpec::midpoint(64), &p).unwrap();
        assert_eq!(e, make_plane_wave(0, 0.0, &p).unwrap());
        assert!(make_gaussian(0.0, Coherence::Coherent, 0.0, &QuadratureSpec::midpoint(64), &p).is_err());
    }

    #[test]
    fn square_rejects_bad_width() {
        let p = params();
        let q = QuadratureSpec::midpoint(16);
        assert!(make_square(0.0, &q, &p).is_err());
        assert!(make_square(1.5, &q, &p).is_err());
        let e = make_square(0.04, &q, &p).unwrap();
        assert!(e.fibers().iter().all(|wf| wf.fiber.beta().abs() <= 0.02 && (wf.weight - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn matched_widths() {
        assert!((square_to_gaussian_width(0.04) - 0.0115).abs() < 1e-4);
        assert!((square_to_gaussian_width(0.03) - 0.00866).abs() < 1e-5);
        assert!((square_to_gaussian_width(0.02) - 0.00577).abs() < 1e-5);
    }

    #[test]
    fn grid_checks() {
        let p = params();
        let e = make_plane_wave(0, 0.0, &p).unwrap();
        assert!(csbw_weights(&e, &[0.0, 0.1, 0.2, 0.3], &p).is_err());
        assert!(csbw_weights(&e, &xi_grid(16), &p).is_ok());
    }

    #[test]
    fn plane_wave_weights_are_flat() {
        let p = params();
        let d = csbw_weights(&make_plane_wave(0, 0.1, &p).unwrap(), &xi_grid(64), &p).unwrap();
        assert!(d.weights.iter().all(|w| (w - 1.0 / TWO_PI).abs() < 1e-12));
        assert!((d.total() - 1.0).abs() < 1e-12);
    }
}
