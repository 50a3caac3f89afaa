//! Kicked-rotor dynamics at and near quantum resonance.
//!
//! Numeric evolution of momentum ladders by split-step FFT, closed-form
//! predictions from the comb-shaped Bloch wave map, and the ensembles and
//! observables connecting the two. The crate is `no_std` and only needs
//! `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod ensembles;
pub mod error;
pub mod fft;
pub mod observables;
pub mod params;
pub mod propagator;
pub mod state;

pub use error::{Error, Result};
pub use fft::{Radix2Fft, SpectralTransform};
pub use params::SimParams;
pub use propagator::{evolve, trace_fiber, FiberTrace, KickPlan};
pub use state::{Coherence, CsbwDistribution, Ensemble, Fiber, ObservableSeries, WeightedFiber};
