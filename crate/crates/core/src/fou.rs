//! Fractional Ornstein–Uhlenbeck base component.
//!
//! `dX = -alpha1 X dt + sigma dB^H`, simulated by Euler–Maruyama on a
//! caller-supplied fGn path. The noise enters additively, so the scheme is
//! exact in the noise term; only the drift is discretized.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fgn::check_hurst;
use crate::numeric::integrate_relative;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FouParams {
    pub alpha1: f64,
    pub sigma: f64,
    pub hurst: f64,
    pub x0: f64,
}

impl FouParams {
    pub fn new(alpha1: f64, sigma: f64, hurst: f64, x0: f64) -> Result<Self> {
        let p = FouParams {
            alpha1,
            sigma,
            hurst,
            x0,
        };
        p.validate()?;
        Ok(p)
    }

    /// `sigma = 0` is accepted so the deterministic limit can be evaluated.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 > 0.0 && self.alpha1.is_finite()) {
            return Err(Error::param(format!("alpha1 must be positive, got {}", self.alpha1)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::param(format!("sigma must be non-negative, got {}", self.sigma)));
        }
        if !self.x0.is_finite() {
            return Err(Error::param("x0 must be finite"));
        }
        check_hurst(self.hurst)
    }
}

/// Euler–Maruyama path `X[k+1] = X[k] - alpha1 X[k] dt + sigma dt^H fgn[k]`.
///
/// `fgn` must hold `n_days / dt` unit-variance increments. Returns
/// `fgn.len() + 1` values starting at `x0`.
pub fn simulate_fou(params: &FouParams, n_days: usize, dt: f64, fgn: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    if !(dt > 0.0) {
        return Err(Error::param(format!("dt must be positive, got {dt}")));
    }
    let decay = params.alpha1 * dt;
    if decay >= 1.0 {
        return Err(Error::UnstableStep(decay));
    }
    let steps = (n_days as f64 / dt).round() as usize;
    if steps != fgn.len() {
        return Err(Error::param(format!(
            "expected {steps} increments for {n_days} days at dt = {dt}, got {}",
            fgn.len()
        )));
    }
    let noise_scale = params.sigma * dt.powf(params.hurst);
    let mut path = Vec::with_capacity(steps + 1);
    let mut x = params.x0;
    path.push(x);
    for &z in fgn {
        x = x - decay * x + noise_scale * z;
        path.push(x);
    }
    Ok(path)
}

/// Marginal variance `H sigma^2 int_0^t s^{2H-1} (e^{-a s} + e^{-a(2t-s)}) ds`.
///
/// The substitution `u = s^{2H}` removes the endpoint singularity, leaving
/// `sigma^2 / 2 int_0^{t^{2H}} (e^{-a s(u)} + e^{-a(2t - s(u))}) du`.
pub fn fou_variance(params: &FouParams, t: f64) -> Result<f64> {
    params.validate()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = params.alpha1;
    let inv = 1.0 / (2.0 * params.hurst);
    let integrand = |u: f64| {
        let s = u.powf(inv);
        (-a * s).exp() + (-a * (2.0 * t - s)).exp()
    };
    let upper = t.powf(2.0 * params.hurst);
    let pieces = ((a * t).ceil() as usize).clamp(4, 256);
    let integral = integrate_relative(&integrand, 0.0, upper, 1e-10, pieces);
    Ok(0.5 * params.sigma * params.sigma * integral)
}

/// `alpha1^{-2H} H sigma^2 Gamma(2H)`, the large-time limit of [`fou_variance`].
pub fn fou_stationary_variance(params: &FouParams) -> f64 {
    let h = params.hurst;
    params.alpha1.powf(-2.0 * h) * h * params.sigma * params.sigma * gamma(2.0 * h)
}
