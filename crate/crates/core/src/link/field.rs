//! Complex baseband envelope carried through the link.

use num_complex::Complex64;

/// Optical field sampled at the simulation rate. `|sample|^2` is the
/// instantaneous optical power in watts.
#[derive(Debug, Clone)]
pub struct OpticalField {
    pub samples: Vec<Complex64>,
    /// Simulation sample rate in Hz (symbol rate × sps).
    pub sample_rate_hz: f64,
    /// Samples per symbol on the fine grid.
    pub sps: usize,
}

impl OpticalField {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_symbols(&self) -> usize {
        self.samples.len() / self.sps
    }

    /// Instantaneous power |E|^2 per sample, in watts.
    pub fn power(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    /// Mean power in watts.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Total energy (sum of |E|^2 · dt).
    pub fn energy(&self) -> f64 {
        let dt = 1.0 / self.sample_rate_hz;
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * dt
    }

    /// Scale so the mean power equals `target_w`.
    pub fn normalize_mean_power(&mut self, target_w: f64) {
        let p = self.mean_power();
        if p > 0.0 {
            let k = (target_w / p).sqrt();
            for s in &mut self.samples {
                *s *= k;
            }
        }
    }
}
