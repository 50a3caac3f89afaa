//! `rustfft` behind the core's [`SpectralTransform`] trait.

use std::cell::RefCell;
use std::sync::Arc;

use krqr_core::SpectralTransform;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

#[derive(Clone)]
pub struct RustFftBackend {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl RustFftBackend {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        RustFftBackend { forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }
}

fn process(fft: &dyn Fft<f64>, data: &mut [Complex64]) {
    SCRATCH.with(|s| {
        let mut scratch = s.borrow_mut();
        let need = fft.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::new(0.0, 0.0));
        }
        fft.process_with_scratch(data, &mut scratch[..need]);
    });
}

impl SpectralTransform for RustFftBackend {
    fn len(&self) -> usize {
        self.forward.len()
    }

    fn forward(&self, data: &mut [Complex64]) {
        process(self.forward.as_ref(), data);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        process(self.inverse.as_ref(), data);
    }
}
