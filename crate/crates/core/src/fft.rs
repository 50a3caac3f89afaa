//! Unnormalized discrete Fourier transforms on power-of-two grids.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Backend used by the kick operator to move between the momentum ladder
/// and the position grid.
///
/// `forward` computes `X_k = sum_j x_j exp(-2 pi i j k / M)` and `inverse`
/// the same sum with `+i`; neither applies a `1/M` factor.
pub trait SpectralTransform {
    fn len(&self) -> usize;
    fn forward(&self, data: &mut [Complex64]);
    fn inverse(&self, data: &mut [Complex64]);
}

/// Iterative decimation-in-time radix-2 transform.
#[derive(Debug, Clone)]
pub struct Radix2Fft {
    len: usize,
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<u32>,
}

impl Radix2Fft {
    /// # Panics
    /// If `len` is not a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "radix-2 transform needs a power-of-two length");
        let twiddles = (0..len / 2).map(|k| Complex64::cis(-2.0 * PI * k as f64 / len as f64)).collect();
        let bits = len.trailing_zeros();
        let bit_reverse = (0..len as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        Radix2Fft { len, twiddles, bit_reverse }
    }

    fn transform(&self, data: &mut [Complex64], conj: bool) {
        assert_eq!(data.len(), self.len);
        for (i, &j) in self.bit_reverse.iter().enumerate() {
            let j = j as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= self.len {
            let half = size / 2;
            let stride = self.len / size;
            for chunk in data.chunks_exact_mut(size) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let w = self.twiddles[k * stride];
                    let w = if conj { w.conj() } else { w };
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            size *= 2;
        }
    }
}

impl SpectralTransform for Radix2Fft {
    fn len(&self) -> usize {
        self.len
    }

    fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }
}
