//! [`Dft`] backed by `rustfft`, which is several times faster than the
//! portable radix-2 transform for the lengths used in experiments.

use std::fmt;
use std::sync::Arc;

use fbmvar_core::fbm::CirculantSampler;
use fbmvar_core::fft::{Complex64, Dft};
use fbmvar_core::Hurst;
use rustfft::{Fft, FftPlanner};

pub struct RustFft {
    fft: Arc<dyn Fft<f64>>,
}

impl RustFft {
    pub fn new(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        Self { fft }
    }
}

impl fmt::Debug for RustFft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RustFft").field("len", &self.fft.len()).finish()
    }
}

impl Dft for RustFft {
    fn len(&self) -> usize {
        self.fft.len()
    }

    fn forward(&self, buf: &mut [Complex64]) {
        self.fft.process(buf);
    }
}

/// A circulant sampler planned with [`RustFft`].
pub fn circulant_sampler(h: f64, level: u32) -> fbmvar_core::Result<CirculantSampler> {
    let hurst = Hurst::new(h)?;
    if level == 0 || level > fbmvar_core::fbm::MAX_CIRCULANT_LEVEL {
        // Let the core report the size error before planning a huge transform.
        return CirculantSampler::new(hurst, level);
    }
    CirculantSampler::with_dft(hurst, level, Box::new(RustFft::new(1 << (level + 1))))
}
