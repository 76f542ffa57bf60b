//! Control imperfections: uniform amplitude error and additive white
//! Gaussian noise on the sampled fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::device::DriveSpec;
use crate::error::{Error, Result};
use crate::path::FieldSamples;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Systematic error rate ε: drives scale by `1 + ε`.
    pub epsilon: f64,
    /// Signal-to-noise ratio in dB; `None` disables AWGN.
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            snr_db: None,
            seed: 0,
        }
    }
}

/// `Ω̃₂ₖ → (1 + ε) Ω̃₂ₖ`.
pub fn with_systematic_error(spec: &DriveSpec, epsilon: f64) -> DriveSpec {
    let mut out = spec.clone();
    out.amplitude_scale *= 1.0 + epsilon;
    out
}

/// Adds zero-mean Gaussian noise to both channels.
///
/// Each channel gets noise power `⟨Ω²⟩·10^(−R/10)`, where `⟨Ω²⟩` is that
/// channel's mean-square over all samples. Sample `i` draws its two normals
/// from ChaCha8 stream `i` of `seed`, so the output depends only on
/// `(samples, snr_db, seed)`. An infinite SNR returns the input unchanged.
pub fn with_awgn(samples: &FieldSamples, snr_db: f64, seed: u64) -> Result<FieldSamples> {
    if samples.is_empty() {
        return Err(Error::invalid("cannot add noise to an empty sample set"));
    }
    if samples.omega_x.len() != samples.len() || samples.omega_y.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            expected: samples.len(),
            found: samples.omega_x.len().min(samples.omega_y.len()),
        });
    }
    if !samples.is_uniform() {
        return Err(Error::invalid("AWGN requires a uniform sample grid"));
    }
    if snr_db.is_nan() {
        return Err(Error::invalid("SNR is NaN"));
    }
    if snr_db == f64::INFINITY {
        return Ok(samples.clone());
    }
    let ratio = 10f64.powf(-snr_db / 10.0);
    let power = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    let sx = (power(&samples.omega_x) * ratio).sqrt();
    let sy = (power(&samples.omega_y) * ratio).sqrt();
    let mut out = samples.clone();
    for i in 0..samples.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let nx: f64 = StandardNormal.sample(&mut rng);
        let ny: f64 = StandardNormal.sample(&mut rng);
        out.omega_x[i] += sx * nx;
        out.omega_y[i] += sy * ny;
    }
    Ok(out)
}
