//! Generalized Extreme Value law for spike magnitudes.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Shapes with `|xi|` below this go through the Gumbel branch.
pub const GUMBEL_THRESHOLD: f64 = 1e-8;
/// Upper bound on `|xi|` admitted by the fit.
pub const MAX_SHAPE: f64 = 5.0;
pub const MIN_FIT_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl GevParams {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        if !(sigma > 0.0) || !mu.is_finite() || !xi.is_finite() || !sigma.is_finite() {
            return Err(Error::param(format!("invalid GEV parameters ({mu}, {sigma}, {xi})")));
        }
        Ok(GevParams { mu, sigma, xi })
    }

    fn is_gumbel(&self) -> bool {
        self.xi.abs() < GUMBEL_THRESHOLD
    }

    /// `t(x)`; `None` outside the support.
    fn t(&self, x: f64) -> Option<f64> {
        let z = (x - self.mu) / self.sigma;
        if self.is_gumbel() {
            Some((-z).exp())
        } else {
            let base = 1.0 + self.xi * z;
            (base > 0.0).then(|| base.powf(-1.0 / self.xi))
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match self.t(x) {
            Some(t) if t.is_finite() => t.powf(self.xi + 1.0) * (-t).exp() / self.sigma,
            _ => 0.0,
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        match self.t(x) {
            Some(t) if t > 0.0 && t.is_finite() => (self.xi + 1.0) * t.ln() - t - self.sigma.ln(),
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.t(x) {
            Some(t) => (-t).exp(),
            // Outside the support: below the lower end for xi > 0, above the upper end for xi < 0.
            None => {
                if self.xi > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidProbability(u));
        }
        let y = -u.ln();
        Ok(if self.is_gumbel() {
            self.mu - self.sigma * y.ln()
        } else {
            self.mu + self.sigma * (y.powf(-self.xi) - 1.0) / self.xi
        })
    }

    /// `mu + sigma ((ln 2)^{-xi} - 1) / xi`, with the Gumbel limit at `xi = 0`.
    pub fn median(&self) -> f64 {
        let l2 = std::f64::consts::LN_2;
        if self.is_gumbel() {
            self.mu - self.sigma * l2.ln()
        } else {
            self.mu + self.sigma * (l2.powf(-self.xi) - 1.0) / self.xi
        }
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                return self.quantile(u).expect("u in (0, 1)");
            }
        }
    }

    /// Lower (xi > 0) or upper (xi < 0) support endpoint, if finite.
    pub fn support_bound(&self) -> Option<f64> {
        (!self.is_gumbel()).then(|| self.mu - self.sigma / self.xi)
    }

    pub fn log_likelihood(&self, samples: &[f64]) -> f64 {
        samples.iter().map(|&x| self.log_density(x)).sum()
    }
}

pub fn gev_density(p: &GevParams, x: f64) -> f64 {
    p.density(x)
}

pub fn gev_quantile(p: &GevParams, u: f64) -> Result<f64> {
    p.quantile(u)
}

pub fn gev_median(p: &GevParams) -> f64 {
    p.median()
}

/// Probability-weighted-moment estimate (Hosking, Wallis & Wood).
pub fn pwm_initial(samples: &[f64]) -> GevParams {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut b0 = 0.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let i = i as f64;
        b0 += v;
        b1 += v * i / (n - 1.0);
        b2 += v * i * (i - 1.0) / ((n - 1.0) * (n - 2.0));
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;
    let c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - 2f64.ln() / 3f64.ln();
    let k = 7.8590 * c + 2.9554 * c * c;
    let l2 = 2.0 * b1 - b0;
    if !k.is_finite() || k.abs() < 1e-6 {
        let sigma = l2 / 2f64.ln();
        return GevParams {
            mu: b0 - 0.577_215_664_901_532_9 * sigma,
            sigma,
            xi: 0.0,
        };
    }
    // Hosking's k is -xi; keep the initial shape inside the admitted window.
    let k = k.clamp(-0.95 * MAX_SHAPE, 0.95);
    let g = gamma(1.0 + k);
    let sigma = l2 * k / (g * (1.0 - 2f64.powf(-k)));
    let mu = b0 - sigma * (1.0 - g) / k;
    GevParams { mu, sigma, xi: -k }
}

/// Maximum-likelihood GEV fit: PWM start, simplex over `(mu, ln sigma, xi)`.
pub fn gev_fit_mle(samples: &[f64]) -> Result<GevParams> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::insufficient(MIN_FIT_SAMPLES, samples.len()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("non-finite sample"));
    }
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max - min <= 1e-12 * (1.0 + max.abs()) {
        return Err(Error::Fit {
            reason: "samples are constant; the scale collapses to zero".into(),
            best: None,
        });
    }

    let start = feasible_start(samples);
    let start_ll = start.log_likelihood(samples);
    let objective = |v: &[f64]| {
        if v[2].abs() >= MAX_SHAPE {
            return f64::INFINITY;
        }
        let p = GevParams {
            mu: v[0],
            sigma: v[1].exp(),
            xi: v[2],
        };
        -p.log_likelihood(samples)
    };
    let opts = NelderMeadOptions {
        max_iter: 20_000,
        ..Default::default()
    };
    let mut x0 = vec![start.mu, start.sigma.ln(), start.xi];
    let mut best = nelder_mead(objective, &x0, opts);
    // Restart from the optimum so a collapsed simplex cannot stall early.
    for _ in 0..3 {
        x0 = best.x.clone();
        let again = nelder_mead(objective, &x0, opts);
        let improved = again.value < best.value - 1e-10 * (1.0 + best.value.abs());
        if again.value <= best.value {
            best = again;
        }
        if !improved {
            break;
        }
    }
    let fitted = GevParams {
        mu: best.x[0],
        sigma: best.x[1].exp(),
        xi: best.x[2],
    };
    if !best.converged || !best.value.is_finite() || !(fitted.sigma > 0.0) {
        return Err(Error::Fit {
            reason: format!("simplex did not converge after {} iterations", best.iterations),
            best: Some(vec![fitted.mu, fitted.sigma, fitted.xi]),
        });
    }
    debug_assert!(-best.value >= start_ll - 1e-9);
    Ok(fitted)
}

/// PWM estimate pulled toward the Gumbel case until every sample lies in the support.
fn feasible_start(samples: &[f64]) -> GevParams {
    let mut p = pwm_initial(samples);
    if !(p.sigma > 0.0 && p.sigma.is_finite()) {
        let sd = crate::numeric::std_dev(samples);
        p = GevParams {
            mu: crate::numeric::mean(samples) - 0.45 * sd,
            sigma: 0.78 * sd,
            xi: 0.0,
        };
    }
    for _ in 0..40 {
        if p.log_likelihood(samples).is_finite() {
            return p;
        }
        p.xi *= 0.5;
    }
    p.xi = 0.0;
    p
}
