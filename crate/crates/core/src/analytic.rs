//! Closed-form predictions at simple resonance `kbar = 2 pi ell`.
//!
//! At resonance free flight translates each comb-shaped Bloch wave (CSBW)
//! rigidly by `v_beta = kbar (beta + 1/2)`, so a comb centred at `xi`
//! collects `K sin(xi + v_beta s)` from kick `s`. Every result here follows
//! from that map and an average over the initial CSBW weights.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{fold_quasimomentum, wrap_position, SimParams, TWO_PI};
use crate::propagator::resonant_velocity_turns;
use crate::state::{CsbwDistribution, ObservableSeries};

/// Below this `|sin(v/2)|` the comb sum is evaluated in its degenerate,
/// linear-in-`t` form.
const DEGENERATE_SIN: f64 = 1e-9;

fn ell_of(params: &SimParams) -> Result<u32> {
    params.ell.ok_or(Error::NotResonant)
}

/// `sin(pi q t) / sin(pi q)`, the amplitude of the comb sum for a
/// per-kick advance of `q` turns.
fn dirichlet(turns: f64, t: usize) -> f64 {
    let d = (PI * turns).sin();
    if d.abs() < DEGENERATE_SIN {
        t as f64
    } else {
        (PI * turns * t as f64).sin() / d
    }
}

/// `sum_{s=1..t} sin(xi + 2 pi q s)`.
fn comb_sum(xi: f64, turns: f64, t: usize) -> f64 {
    dirichlet(turns, t) * (xi + PI * turns * (t as f64 + 1.0)).sin()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// State of one comb after `t` kicks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsbwState {
    /// Comb centre, wrapped into `[-pi, pi)`.
    pub xi: f64,
    pub beta: f64,
    /// Momentum `P(t)`.
    pub p: f64,
    /// Energy gained since `t = 0`, `(P(t)^2 - P(0)^2) / 2`.
    pub e: f64,
}

pub fn csbw_map(xi0: f64, beta: f64, p0: f64, params: &SimParams, t: usize) -> Result<CsbwState> {
    let ell = ell_of(params)?;
    let turns = resonant_velocity_turns(ell, beta);
    let p = p0 + params.k * comb_sum(xi0, turns, t);
    Ok(CsbwState {
        xi: wrap_position(xi0 + TWO_PI * turns * t as f64),
        beta,
        p,
        e: 0.5 * (p * p - p0 * p0),
    })
}

/// Mean kinetic energy of a plane wave `P = (n0 + beta0) kbar` after `t` kicks.
pub fn plane_wave_energy(t: usize, n0: i64, beta0: f64, params: &SimParams) -> Result<f64> {
    let ell = ell_of(params)?;
    let d = dirichlet(resonant_velocity_turns(ell, fold_quasimomentum(beta0).1), t);
    let p0 = params.kbar * (n0 as f64 + beta0);
    Ok(0.5 * p0 * p0 + 0.25 * params.k * params.k * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatchetMomentum {
    pub momentum: f64,
    /// False at anti-resonance (odd `ell`), where successive kicks cancel
    /// and no current builds up.
    pub transport: bool,
}

/// Mean momentum of the Bragg-split state after `t` kicks.
///
/// For even `ell` this is the directed current `-kbar/2 - (K t / 2) cos phi`;
/// for odd `ell` the momentum oscillates without drifting.
pub fn ratchet_momentum(t: usize, phi: f64, params: &SimParams) -> Result<RatchetMomentum> {
    let ell = ell_of(params)?;
    let base = -0.5 * params.kbar;
    if ell % 2 == 0 {
        return Ok(RatchetMomentum { momentum: base - 0.5 * params.k * t as f64 * phi.cos(), transport: true });
    }
    // weights (1 - sin(xi - phi)) / 2 pi averaged against the comb sum
    let turns = resonant_velocity_turns(ell, 0.0);
    let theta = PI * turns * (t as f64 + 1.0);
    let drift = -0.5 * params.k * dirichlet(turns, t) * (theta + phi).cos();
    Ok(RatchetMomentum { momentum: base + drift, transport: false })
}

/// Grating filter `sin^2(pi ell (beta + 1/2) t) / sin^2(pi ell (beta + 1/2))`.
pub fn filter_function(beta: f64, t: usize, ell: u32) -> f64 {
    let d = dirichlet(resonant_velocity_turns(ell, beta), t);
    d * d
}

/// Central-lobe approximation `t^2 cos^2(pi beta t)`, valid for `|beta| t <= 1`.
pub fn filter_approx(beta: f64, t: usize) -> Result<f64> {
    let tf = t as f64;
    let x = beta.abs() * tf;
    if x > 1.0 {
        return Err(Error::OutOfLobe { value: x });
    }
    Ok(tf * tf * (PI * beta * tf).cos().powi(2))
}

/// Mean energy of a narrow square distribution around a ballistic
/// quasimomentum (even `ell`): quadratic growth with a shrinking rate up to
/// `t = 1/delta`, then diffusion at rate `K^2 / 8 delta`.
pub fn narrow_resonant_energy(t: usize, delta: f64, e0: f64, params: &SimParams) -> Result<f64> {
    let ell = ell_of(params)?;
    if ell % 2 != 0 {
        return Err(Error::ResonanceParity { ell, expected: "even" });
    }
    let k2 = params.k * params.k;
    let tf = t as f64;
    if tf * delta <= 1.0 {
        Ok(e0 + k2 * tf * tf / 8.0 * (1.0 + sinc(PI * delta * tf)))
    } else {
        Ok(e0 + k2 * tf / (8.0 * delta))
    }
}

/// Damped anti-resonant oscillation of a narrow square distribution (odd
/// `ell`), relaxing to `e0 + K^2 / 8`.
pub fn narrow_antiresonant_energy(t: usize, delta: f64, e0: f64, params: &SimParams) -> Result<f64> {
    let ell = ell_of(params)?;
    if ell % 2 != 1 {
        return Err(Error::ResonanceParity { ell, expected: "odd" });
    }
    let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
    Ok(e0 + params.k * params.k / 8.0 * (1.0 - sign * sinc(PI * delta * t as f64)))
}

/// Kicks after which a distribution of width `delta` has smeared the
/// resonant behaviour: `2 / (ell delta)`.
pub fn damping_time(ell: u32, delta: f64) -> f64 {
    2.0 / (ell as f64 * delta)
}

/// Mean energy of a distribution much wider than the Brillouin zone.
pub fn broad_diffusion_energy(t: usize, k: f64, e0: f64) -> f64 {
    e0 + 0.25 * k * k * t as f64
}

/// Recovers the initial quasimomentum distribution from an anti-resonant
/// energy series by summing its cosine series,
/// `sum_{s=1..t} (4/K^2) (E(0) - E(s)) cos(2 pi s (beta + 1/2))`.
///
/// The result is unnormalized and lacks the constant Fourier term; see
/// [`normalize_density`].
pub fn reconstruct_distribution(series: &ObservableSeries, k: f64, beta_grid: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 3 {
        return Err(Error::SeriesTooShort { len: series.len() });
    }
    let e0 = series.mean_e[0];
    let scale = 4.0 / (k * k);
    let coeffs: Vec<f64> = series.mean_e[1..]
        .iter()
        .enumerate()
        .map(|(i, e)| {
            // cos(2 pi s (beta + 1/2)) = (-1)^s cos(2 pi s beta)
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * scale * (e0 - e)
        })
        .collect();
    Ok(beta_grid
        .iter()
        .map(|&beta| {
            coeffs.iter().enumerate().map(|(i, c)| c * (TWO_PI * (i + 1) as f64 * beta).cos()).sum()
        })
        .collect())
}

/// Half-width of [`reconstruction_grid`]. The truncated cosine series
/// carries a Dirichlet kernel of height about `t/4` centred on the ballistic
/// quasimomentum at the zone edge; staying this far inside keeps its side
/// lobes well below the recovered peak of a narrow distribution.
pub const RECONSTRUCTION_HALF_WIDTH: f64 = 0.45;

/// Uniform grid of `points` quasimomenta on
/// `[-RECONSTRUCTION_HALF_WIDTH, RECONSTRUCTION_HALF_WIDTH]`.
pub fn reconstruction_grid(points: usize) -> Vec<f64> {
    let step = 2.0 * RECONSTRUCTION_HALF_WIDTH / (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| -RECONSTRUCTION_HALF_WIDTH + step * i as f64).collect()
}

/// L2 distance between a normalized reconstruction and the square
/// distribution of width `delta`.
pub fn square_l2_error(beta_grid: &[f64], density: &[f64], delta: f64) -> f64 {
    let sq: Vec<f64> = beta_grid
        .iter()
        .zip(density)
        .map(|(b, d)| {
            let target = if b.abs() <= 0.5 * delta { 1.0 / delta } else { 0.0 };
            (d - target) * (d - target)
        })
        .collect();
    trapezoid(beta_grid, &sq).sqrt()
}

/// Clips negative values and scales to unit trapezoidal integral.
pub fn normalize_density(beta_grid: &[f64], values: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let area = trapezoid(beta_grid, &clipped);
    if area > 0.0 {
        clipped.iter().map(|v| v / area).collect()
    } else {
        clipped
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Width of the region around the maximum where `y >= max / 2`, with
/// linearly interpolated edges.
pub fn full_width_half_max(x: &[f64], y: &[f64]) -> f64 {
    let (peak, &ymax) = y.iter().enumerate().fold((0, &f64::MIN), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let half = 0.5 * ymax;
    let mut left = peak;
    while left > 0 && y[left - 1] >= half {
        left -= 1;
    }
    let mut right = peak;
    while right + 1 < y.len() && y[right + 1] >= half {
        right += 1;
    }
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let lo = if left > 0 { cross(left - 1, left) } else { x[0] };
    let hi = if right + 1 < y.len() { cross(right, right + 1) } else { x[x.len() - 1] };
    hi - lo
}

/// Per-quasimomentum Fourier moments of the CSBW weights, from which the
/// averages at any `t` follow in closed form.
struct RowMoments {
    turns: f64,
    /// `int pi e^{i xi}`
    first: Complex64,
    /// `int pi P(0) e^{i xi}`
    current: Complex64,
    /// `int pi`
    mass: f64,
    /// `int pi e^{2 i xi}`
    second: Complex64,
}

fn row_moments(dist: &CsbwDistribution, ell: u32) -> Vec<RowMoments> {
    let dxi = dist.dxi();
    let phases: Vec<(Complex64, Complex64)> =
        dist.xi_grid.iter().map(|&x| (Complex64::cis(x), Complex64::cis(2.0 * x))).collect();
    (0..dist.n_beta())
        .map(|k| {
            let mut m = RowMoments {
                turns: resonant_velocity_turns(ell, dist.beta_grid[k]),
                first: Complex64::new(0.0, 0.0),
                current: Complex64::new(0.0, 0.0),
                mass: 0.0,
                second: Complex64::new(0.0, 0.0),
            };
            for ((&w, &j), &(e1, e2)) in dist.row(k).iter().zip(dist.momentum_row(k)).zip(&phases) {
                m.first += e1 * w;
                m.current += e1 * j;
                m.mass += w;
                m.second += e2 * w;
            }
            m.first *= dxi;
            m.current *= dxi;
            m.mass *= dxi;
            m.second *= dxi;
            m
        })
        .collect()
}

fn averages_at(moments: &[RowMoments], dist: &CsbwDistribution, k: f64, t: usize) -> (f64, f64) {
    let (mut dp, mut de) = (0.0, 0.0);
    for m in moments {
        let d = dirichlet(m.turns, t);
        let rot = Complex64::cis(PI * m.turns * (t as f64 + 1.0));
        dp += k * d * (rot * m.first).im;
        de += k * d * (rot * m.current).im + 0.25 * k * k * d * d * (m.mass - (rot * rot * m.second).re);
    }
    (dist.initial_momentum + dp, dist.initial_energy + de)
}

/// Mean momentum and energy after `t` kicks, averaging the CSBW map over
/// the weights `pi(beta, xi)` by quadrature on the `(beta, xi)` grid.
///
/// The energy gain of a comb is `P(0) K S + K^2 S^2 / 2` with `S` the comb
/// sum, so the local initial momentum enters through
/// [`CsbwDistribution::momentum_density`].
pub fn averaged_observables(dist: &CsbwDistribution, params: &SimParams, t: usize) -> Result<(f64, f64)> {
    let ell = ell_of(params)?;
    Ok(averages_at(&row_moments(dist, ell), dist, params.k, t))
}

/// [`averaged_observables`] for `t = 0 ..= n_kicks`.
pub fn averaged_series(dist: &CsbwDistribution, params: &SimParams, n_kicks: usize) -> Result<ObservableSeries> {
    let ell = ell_of(params)?;
    let moments = row_moments(dist, ell);
    let mut series = ObservableSeries::with_capacity(n_kicks + 1);
    for t in 0..=n_kicks {
        let (p, e) = averages_at(&moments, dist, params.k, t);
        series.push(t, p, e);
    }
    Ok(series)
}
