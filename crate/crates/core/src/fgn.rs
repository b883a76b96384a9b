//! Exact fractional Gaussian noise by circulant (Davies–Harte) embedding.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::SeedKey;

/// Eigenvalues above this negative threshold are clipped to zero.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidHurst(h))
    }
}

/// Autocovariance of unit-step fGn at integer lag `k`:
/// `0.5 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, lag: u64) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(autocov(hurst, lag as f64))
}

fn autocov(h: f64, k: f64) -> f64 {
    let e = 2.0 * h;
    0.5 * ((k + 1.0).abs().powf(e) - 2.0 * k.abs().powf(e) + (k - 1.0).abs().powf(e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgnSpec {
    pub hurst: f64,
    pub length: usize,
    pub seed: u64,
}

/// Precomputed embedding for a fixed `(H, n)`; sampling is then one FFT per path.
#[derive(Clone)]
pub struct FgnGenerator {
    hurst: f64,
    length: usize,
    /// `sqrt(lambda_k / m)` for each circulant eigenvalue.
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnGenerator")
            .field("hurst", &self.hurst)
            .field("length", &self.length)
            .field("embedding", &self.scale.len())
            .finish()
    }
}

impl FgnGenerator {
    pub fn new(hurst: f64, length: usize) -> Result<Self> {
        check_hurst(hurst)?;
        if length == 0 {
            return Err(Error::param("fGn length must be at least 1"));
        }
        let m = (2 * (length - 1)).max(2).next_power_of_two();
        let half = m / 2;
        let mut row: Vec<Complex64> = (0..m)
            .map(|j| {
                let lag = if j <= half { j } else { m - j };
                Complex64::new(autocov(hurst, lag as f64), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOLERANCE {
            return Err(Error::Embedding(min));
        }
        let scale = row
            .iter()
            .map(|c| (c.re.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(FgnGenerator {
            hurst,
            length,
            scale,
            fft,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    /// Draws one path of `length` unit-variance increments.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf: Vec<Complex64> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.iter().take(self.length).map(|c| c.re).collect()
    }
}

/// Samples fGn for the given spec; deterministic in `(H, n, seed)`.
pub fn sample_fgn(spec: &FgnSpec) -> Result<Vec<f64>> {
    let generator = FgnGenerator::new(spec.hurst, spec.length)?;
    Ok(generator.sample(&mut SeedKey::new(spec.seed).rng()))
}

/// Cumulative sum of increments; the implicit starting value B(0) = 0 is not included.
pub fn fbm_from_fgn(increments: &[f64]) -> Result<Vec<f64>> {
    if increments.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(increments
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect())
}
