//! Forward discrete Fourier transforms of power-of-two length.
//!
//! The circulant sampler only needs an unnormalized forward transform
//! `X_k = sum_j x_j exp(-2 pi i j k / N)`. [`Radix2`] is a plain iterative
//! Cooley–Tukey implementation that works without `std`; callers with a
//! faster engine can implement [`Dft`] for it.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

pub use num_complex::Complex64;

/// An in-place forward DFT of a fixed length.
pub trait Dft: Send + Sync {
    fn len(&self) -> usize;

    /// Transform `buf` in place. `buf.len()` must equal `self.len()`.
    fn forward(&self, buf: &mut [Complex64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Iterative radix-2 decimation-in-time FFT.
pub struct Radix2 {
    len: usize,
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<u32>,
}

impl fmt::Debug for Radix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Radix2").field("len", &self.len).finish()
    }
}

impl Radix2 {
    /// Plan a transform of length `len`, which must be a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        let bits = len.trailing_zeros();
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        let bit_reverse = (0..len as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        Self {
            len,
            twiddles,
            bit_reverse,
        }
    }
}

impl Dft for Radix2 {
    fn len(&self) -> usize {
        self.len
    }

    fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        for (i, &j) in self.bit_reverse.iter().enumerate() {
            let j = j as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for start in (0..self.len).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, &v)| {
                    let angle = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc + v * Complex64::new(libm::cos(angle), libm::sin(angle))
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for bits in 0..7 {
            let n = 1usize << bits;
            let x: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new(libm::sin(j as f64 * 0.7), 0.3 * j as f64 - 1.0))
                .collect();
            let mut y = x.clone();
            Radix2::new(n).forward(&mut y);
            for (a, b) in y.iter().zip(naive_dft(&x)) {
                assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
            }
        }
    }
}
