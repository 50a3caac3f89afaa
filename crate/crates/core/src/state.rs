//! Quantum states on the momentum ladder and the containers built from them.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::fold_quasimomentum;

/// Tolerance on the total quadrature weight of an ensemble.
pub const WEIGHT_TOLERANCE: f64 = 1e-10;

/// One quasimomentum fiber: amplitudes `psi_beta(n)` for `n` in `[-N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    beta: f64,
    half_width: usize,
    amps: Vec<Complex64>,
}

impl Fiber {
    /// Builds a fiber from ladder amplitudes ordered `n = -N ..= N`.
    /// The amplitudes are normalized; `beta` must already lie in `[-1/2, 1/2)`.
    pub fn new(beta: f64, amps: Vec<Complex64>) -> Result<Self> {
        if !(-0.5..0.5).contains(&beta) {
            return Err(Error::InvalidParameter { name: "beta", value: beta });
        }
        if amps.len() % 2 == 0 {
            return Err(Error::InvalidGrid("ladder length must be odd"));
        }
        let half_width = amps.len() / 2;
        let mut fiber = Fiber { beta, half_width, amps };
        let norm = fiber.norm_sqr();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter { name: "norm", value: norm });
        }
        fiber.scale(1.0 / norm.sqrt());
        Ok(fiber)
    }

    /// A single momentum eigenstate `P = (n + beta) kbar`. Quasimomenta
    /// outside the first Brillouin zone are folded into `n`.
    pub fn plane_wave(n: i64, beta: f64, half_width: usize) -> Result<Self> {
        let (shift, beta) = fold_quasimomentum(beta);
        let n = n + shift;
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * half_width + 1];
        let idx = ladder_index(n, half_width).ok_or(Error::OutOfLadder { n, half_width })?;
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Fiber { beta, half_width, amps })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Amplitude of rung `n`; zero outside the ladder.
    pub fn amp(&self, n: i64) -> Complex64 {
        ladder_index(n, self.half_width).map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    /// Iterates `(n, amplitude)` over the ladder.
    pub fn rungs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n0 = -(self.half_width as i64);
        self.amps.iter().enumerate().map(move |(i, &a)| (n0 + i as i64, a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by the same phase factor.
    pub fn with_global_phase(mut self, theta: f64) -> Self {
        let rot = Complex64::cis(theta);
        self.amps.iter_mut().for_each(|a| *a *= rot);
        self
    }

    fn scale(&mut self, s: f64) {
        self.amps.iter_mut().for_each(|a| *a *= s);
    }
}

/// Position of rung `n` in a ladder of the given half-width.
pub fn ladder_index(n: i64, half_width: usize) -> Option<usize> {
    let h = half_width as i64;
    (-h..=h).contains(&n).then(|| (n + h) as usize)
}

/// Whether distinct rungs (and fibers) carry meaningful relative phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coherence {
    /// A pure state: a superposition over the whole ensemble.
    Coherent,
    /// A statistical mixture. Each fiber stands for the diagonal mixture of
    /// its rungs; only `|amplitude|^2` is physical.
    Incoherent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFiber {
    pub weight: f64,
    pub fiber: Fiber,
}

/// Quadrature-weighted collection of fibers sharing one ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    fibers: Vec<WeightedFiber>,
    coherence: Coherence,
}

impl Ensemble {
    pub fn new(fibers: Vec<WeightedFiber>, coherence: Coherence) -> Result<Self> {
        let first = fibers.first().ok_or(Error::InvalidQuadrature("ensemble has no fibers"))?;
        let half_width = first.fiber.half_width();
        let mut total = 0.0;
        for wf in &fibers {
            if !(wf.weight >= 0.0) {
                return Err(Error::InvalidParameter { name: "weight", value: wf.weight });
            }
            if wf.fiber.half_width() != half_width {
                return Err(Error::LadderMismatch(half_width, wf.fiber.half_width()));
            }
            total += wf.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidParameter { name: "total weight", value: total });
        }
        Ok(Ensemble { fibers, coherence })
    }

    /// Weight-one ensemble holding a single fiber.
    pub fn single(fiber: Fiber) -> Self {
        Ensemble { fibers: vec![WeightedFiber { weight: 1.0, fiber }], coherence: Coherence::Coherent }
    }

    pub fn fibers(&self) -> &[WeightedFiber] {
        &self.fibers
    }

    pub fn coherence(&self) -> Coherence {
        self.coherence
    }

    pub fn half_width(&self) -> usize {
        self.fibers[0].fiber.half_width()
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    /// The same state written as fibers that may each be evolved as a pure
    /// state. Coherent ensembles are returned as-is; incoherent fibers are
    /// split into one plane-wave fiber per populated rung.
    pub fn pure_components(&self) -> Ensemble {
        match self.coherence {
            Coherence::Coherent => self.clone(),
            Coherence::Incoherent => {
                let mut fibers = Vec::new();
                for wf in &self.fibers {
                    let beta = wf.fiber.beta();
                    for (n, a) in wf.fiber.rungs() {
                        let p = a.norm_sqr();
                        if p > 0.0 {
                            let fiber = Fiber::plane_wave(n, beta, wf.fiber.half_width())
                                .expect("rung lies on the ladder");
                            fibers.push(WeightedFiber { weight: wf.weight * p, fiber });
                        }
                    }
                }
                Ensemble { fibers, coherence: Coherence::Incoherent }
            }
        }
    }

    pub(crate) fn from_parts(fibers: Vec<WeightedFiber>, coherence: Coherence) -> Self {
        Ensemble { fibers, coherence }
    }
}

/// Per-kick mean momentum and mean kinetic energy.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSeries {
    pub t: Vec<usize>,
    pub mean_p: Vec<f64>,
    pub mean_e: Vec<f64>,
}

impl ObservableSeries {
    pub fn with_capacity(n: usize) -> Self {
        ObservableSeries { t: Vec::with_capacity(n), mean_p: Vec::with_capacity(n), mean_e: Vec::with_capacity(n) }
    }

    pub fn push(&mut self, t: usize, p: f64, e: f64) {
        self.t.push(t);
        self.mean_p.push(p);
        self.mean_e.push(e);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `mean_e[t] - mean_e[0]`.
    pub fn energy_gain(&self, t: usize) -> f64 {
        self.mean_e[t] - self.mean_e[0]
    }
}

/// Weights `pi(beta, xi)` of the comb-shaped Bloch waves making up a state.
///
/// Row `k` belongs to quasimomentum `beta_grid[k]` and already includes that
/// node's quadrature weight, so `sum_k sum_j weights[k][j] * dxi = 1`.
/// `momentum_density` carries `pi(beta, xi) * P_{beta,xi}(0)`, the local
/// initial momentum that enters the energy cross term.
#[derive(Debug, Clone, PartialEq)]
pub struct CsbwDistribution {
    pub beta_grid: Vec<f64>,
    pub xi_grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub momentum_density: Vec<f64>,
    pub initial_momentum: f64,
    pub initial_energy: f64,
}

impl CsbwDistribution {
    pub fn n_beta(&self) -> usize {
        self.beta_grid.len()
    }

    pub fn n_xi(&self) -> usize {
        self.xi_grid.len()
    }

    pub fn dxi(&self) -> f64 {
        crate::params::TWO_PI / self.n_xi() as f64
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let m = self.n_xi();
        &self.weights[k * m..(k + 1) * m]
    }

    pub fn momentum_row(&self, k: usize) -> &[f64] {
        let m = self.n_xi();
        &self.momentum_density[k * m..(k + 1) * m]
    }

    pub fn weight(&self, k: usize, j: usize) -> f64 {
        self.weights[k * self.n_xi() + j]
    }

    /// Double quadrature of the weights over `(beta, xi)`.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.dxi()
    }
}
