//! Marked Hawkes process with exponential kernel `gamma e^{-beta t}` and the
//! mean-reverting jump component driven by it.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gev::GevParams;
use crate::optim::{bfgs, BfgsOptions};
use crate::rng::SeedKey;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HawkesParams {
    pub lambda0: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl HawkesParams {
    pub fn new(lambda0: f64, gamma: f64, beta: f64) -> Result<Self> {
        let p = HawkesParams { lambda0, gamma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(Error::param(format!("lambda must be positive, got {}", self.lambda0)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::param(format!(
                "gamma and beta must be non-negative, got ({}, {})",
                self.gamma, self.beta
            )));
        }
        if self.gamma > 0.0 && self.gamma >= self.beta {
            return Err(Error::NonStationary {
                gamma: self.gamma,
                beta: self.beta,
            });
        }
        Ok(())
    }

    /// Long-run event rate `lambda / (1 - gamma / beta)`.
    pub fn stationary_rate(&self) -> f64 {
        if self.gamma == 0.0 {
            self.lambda0
        } else {
            self.lambda0 / (1.0 - self.gamma / self.beta)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStream {
    times: Vec<f64>,
    marks: Vec<f64>,
    horizon: f64,
}

impl EventStream {
    /// Times must be strictly increasing in `(0, horizon]`. Marks may carry
    /// either sign because detected price drops are jumps too.
    pub fn new(times: Vec<f64>, marks: Vec<f64>, horizon: f64) -> Result<Self> {
        if times.len() != marks.len() {
            return Err(Error::param(format!(
                "{} event times but {} marks",
                times.len(),
                marks.len()
            )));
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::param(format!("horizon must be non-negative, got {horizon}")));
        }
        let mut prev = 0.0;
        for (i, &t) in times.iter().enumerate() {
            if !(t > prev || (i == 0 && t > 0.0)) || t > horizon {
                return Err(Error::param(format!("event time {t} out of order or outside (0, {horizon}]")));
            }
            prev = t;
        }
        if marks.iter().any(|m| !m.is_finite()) {
            return Err(Error::param("event marks must be finite"));
        }
        Ok(EventStream { times, marks, horizon })
    }

    pub fn empty(horizon: f64) -> Self {
        EventStream {
            times: Vec::new(),
            marks: Vec::new(),
            horizon,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "time,mark")?;
        for (t, z) in self.times.iter().zip(&self.marks) {
            writeln!(out, "{t},{z}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump2Params {
    pub alpha2: f64,
    pub hawkes: HawkesParams,
    pub mark_dist: GevParams,
}

impl Jump2Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha2 > 0.0 && self.alpha2.is_finite()) {
            return Err(Error::param(format!("alpha2 must be positive, got {}", self.alpha2)));
        }
        self.hawkes.validate()
    }
}

/// Left-continuous intensity: events at exactly `t` do not count yet.
pub fn intensity_at(p: &HawkesParams, events: &EventStream, t: f64) -> f64 {
    if p.gamma == 0.0 {
        return p.lambda0;
    }
    let excitation: f64 = events
        .times
        .iter()
        .take_while(|&&ti| ti < t)
        .map(|&ti| (-p.beta * (t - ti)).exp())
        .sum();
    p.lambda0 + p.gamma * excitation
}

/// Thinning simulation on `(0, horizon]` with i.i.d. GEV marks.
pub fn simulate_hawkes(p: &HawkesParams, mark_dist: &GevParams, horizon: f64, seed: u64) -> Result<EventStream> {
    simulate_hawkes_rng(p, mark_dist, horizon, None, &mut SeedKey::new(seed).rng())
}

/// Ogata thinning. Between events the intensity only decays, so the value just
/// after the last accepted point bounds it until the next candidate.
///
/// `initial_intensity` switches on the transient `(lambda* - lambda) e^{-beta t}` term.
pub fn simulate_hawkes_rng<R: Rng + ?Sized>(
    p: &HawkesParams,
    mark_dist: &GevParams,
    horizon: f64,
    initial_intensity: Option<f64>,
    rng: &mut R,
) -> Result<EventStream> {
    p.validate()?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!("horizon must be non-negative, got {horizon}")));
    }
    let transient0 = initial_intensity.map_or(0.0, |l| (l - p.lambda0).max(0.0));
    let mut times = Vec::new();
    let mut marks = Vec::new();
    let mut t = 0.0;
    // Sum of e^{-beta (t - T_i)} over accepted events.
    let mut excitation = 0.0;
    loop {
        let transient = transient0 * (-p.beta * t).exp();
        let bound = p.lambda0 + transient + p.gamma * excitation;
        let wait = Exp::new(bound).expect("positive rate").sample(rng);
        let decay = (-p.beta * wait).exp();
        t += wait;
        if t > horizon {
            break;
        }
        excitation *= decay;
        let current = p.lambda0 + transient * decay + p.gamma * excitation;
        let u: f64 = rng.random();
        if u * bound <= current {
            excitation += 1.0;
            times.push(t);
            marks.push(mark_dist.sample(rng));
        }
    }
    Ok(EventStream { times, marks, horizon })
}

/// Per-event recursion state.
struct Recursion {
    a: f64,
    b: f64,
    c: f64,
}

fn recursions(times: &[f64], beta: f64) -> Vec<Recursion> {
    let mut out = Vec::with_capacity(times.len());
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for (j, &t) in times.iter().enumerate() {
        if j > 0 {
            let dt = t - times[j - 1];
            let e = (-beta * dt).exp();
            let one_a = 1.0 + a;
            let nc = e * (dt * dt * one_a + 2.0 * dt * b + c);
            let nb = e * (dt * one_a + b);
            a = e * one_a;
            b = nb;
            c = nc;
        }
        out.push(Recursion { a, b, c });
    }
    out
}

fn check_events(events: &EventStream) -> Result<()> {
    if events.is_empty() {
        Err(Error::insufficient(1, 0))
    } else {
        Ok(())
    }
}

/// Log-likelihood on `(0, T_n]` in O(n).
pub fn hawkes_loglik(p: &HawkesParams, events: &EventStream) -> Result<f64> {
    check_events(events)?;
    let times = &events.times;
    let tn = *times.last().expect("non-empty");
    let rec = recursions(times, p.beta);
    let mut ll = -p.lambda0 * tn;
    for (r, &tj) in rec.iter().zip(times) {
        let d = tn - tj;
        ll += compensator_term(p.gamma, p.beta, d);
        let dens = p.lambda0 + p.gamma * r.a;
        if !(dens > 0.0) {
            return Err(Error::Domain(format!("intensity {dens} at event {tj} is not positive")));
        }
        ll += dens.ln();
    }
    Ok(ll)
}

/// `(gamma / beta) (e^{-beta d} - 1)`, with limit `-gamma d` as `beta -> 0`.
fn compensator_term(gamma: f64, beta: f64, d: f64) -> f64 {
    if gamma == 0.0 {
        0.0
    } else if beta == 0.0 {
        -gamma * d
    } else {
        gamma / beta * (-beta * d).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoglikDerivatives {
    /// Order `(lambda, gamma, beta)`.
    pub gradient: [f64; 3],
    pub hessian: [[f64; 3]; 3],
}

/// Analytic gradient and Hessian with respect to `(lambda, gamma, beta)`.
/// Requires `beta > 0`.
pub fn hawkes_loglik_derivatives(p: &HawkesParams, events: &EventStream) -> Result<LoglikDerivatives> {
    check_events(events)?;
    if !(p.beta > 0.0) {
        return Err(Error::Domain("derivatives need beta > 0".into()));
    }
    let (lam, gam, beta) = (p.lambda0, p.gamma, p.beta);
    let times = &events.times;
    let tn = *times.last().expect("non-empty");
    let rec = recursions(times, beta);
    let (b2, b3) = (beta * beta, beta * beta * beta);

    let mut g = [-tn, 0.0, 0.0];
    let mut h = [[0.0; 3]; 3];
    for (r, &tj) in rec.iter().zip(times) {
        let d = tn - tj;
        let e = (-beta * d).exp();
        let em1 = (-beta * d).exp_m1();
        let dens = lam + gam * r.a;
        if !(dens > 0.0) {
            return Err(Error::Domain(format!("intensity {dens} at event {tj} is not positive")));
        }
        let inv = 1.0 / dens;
        let inv2 = inv * inv;
        // d/dbeta of (e^{-beta d} - 1) / beta, and its second derivative.
        let k1 = -(d * e / beta + em1 / b2);
        let k2 = d * d * e / beta + 2.0 * d * e / b2 + 2.0 * em1 / b3;

        g[0] += inv;
        g[1] += em1 / beta + r.a * inv;
        g[2] += gam * k1 - gam * r.b * inv;

        h[0][0] -= inv2;
        h[0][1] -= r.a * inv2;
        h[0][2] += gam * r.b * inv2;
        h[1][1] -= r.a * r.a * inv2;
        h[1][2] += k1 + gam * r.a * r.b * inv2 - r.b * inv;
        let gb = gam * r.b * inv;
        h[2][2] += gam * k2 + gam * r.c * inv - gb * gb;
    }
    h[1][0] = h[0][1];
    h[2][0] = h[0][2];
    h[2][1] = h[1][2];
    Ok(LoglikDerivatives {
        gradient: g,
        hessian: h,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct HawkesFitOptions {
    /// Upper bound on the decay rate searched by the optimizer (1/day).
    pub beta_max: f64,
    pub bfgs: BfgsOptions,
}

impl Default for HawkesFitOptions {
    fn default() -> Self {
        HawkesFitOptions {
            beta_max: 1.0,
            bfgs: BfgsOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HawkesFit {
    pub params: HawkesParams,
    pub loglik: f64,
    pub converged: bool,
    /// Analytic Hessian at the optimum; `None` when `gamma = 0`.
    pub hessian: Option<[[f64; 3]; 3]>,
    pub starts: usize,
}

pub const MIN_FIT_EVENTS: usize = 3;

/// Maximum-likelihood fit with the default options.
pub fn hawkes_fit_mle(events: &EventStream) -> Result<HawkesParams> {
    hawkes_fit_mle_with(events, &HawkesFitOptions::default()).map(|f| f.params)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates: `lambda = e^{t0}`, `beta = beta_max s(t2)`,
/// `gamma = beta s(t1)`, so `0 <= gamma < beta < beta_max` always holds.
fn decode(theta: &[f64], beta_max: f64) -> HawkesParams {
    let beta = beta_max * sigmoid(theta[2]);
    HawkesParams {
        lambda0: theta[0].exp(),
        gamma: beta * sigmoid(theta[1]),
        beta,
    }
}

/// Multi-start quasi-Newton fit over the bounded parameterization.
pub fn hawkes_fit_mle_with(events: &EventStream, opts: &HawkesFitOptions) -> Result<HawkesFit> {
    let n = events.len();
    if n < MIN_FIT_EVENTS {
        return Err(Error::insufficient(MIN_FIT_EVENTS, n));
    }
    let tn = *events.times.last().expect("non-empty");
    let bmax = opts.beta_max;
    let objective = |theta: &[f64]| -> (f64, Vec<f64>) {
        let p = decode(theta, bmax);
        if !(p.beta > 0.0) || !(p.lambda0 > 0.0) {
            return (f64::INFINITY, vec![0.0; 3]);
        }
        let (Ok(ll), Ok(der)) = (hawkes_loglik(&p, events), hawkes_loglik_derivatives(&p, events)) else {
            return (f64::INFINITY, vec![0.0; 3]);
        };
        let s1 = sigmoid(theta[1]);
        let s2 = sigmoid(theta[2]);
        let [gl, gg, gb] = der.gradient;
        let dbeta = p.beta * (1.0 - s2);
        let grad = vec![
            -gl * p.lambda0,
            -gg * p.beta * s1 * (1.0 - s1),
            -(gb + gg * s1) * dbeta,
        ];
        (-ll, grad)
    };

    let lambda_start = n as f64 / tn;
    let poisson = HawkesParams {
        lambda0: lambda_start,
        gamma: 0.0,
        beta: (lambda_start).min(0.5 * bmax),
    };
    let poisson_ll = hawkes_loglik(&poisson, events)?;

    let mut best: Option<(crate::optim::Minimum, usize)> = None;
    let mut any_converged = false;
    let mut starts = 0;
    // gamma0 = lambda0 / 2 and beta0 = 2 gamma0, then the same ratio at faster decays.
    for scale in [1.0, 5.0, 25.0] {
        let beta0 = (lambda_start * scale).min(0.9 * bmax);
        let theta0 = [lambda_start.ln(), logit(0.5), logit(beta0 / bmax)];
        let m = bfgs(objective, &theta0, opts.bfgs);
        starts += 1;
        if !m.value.is_finite() {
            continue;
        }
        any_converged |= m.converged;
        let better = match &best {
            None => true,
            Some((b, _)) => m.value < b.value || (m.converged && !b.converged && m.value <= b.value + 1e-9),
        };
        if better {
            best = Some((m, starts));
        }
    }

    let Some((best, _)) = best else {
        return Err(Error::Fit {
            reason: "likelihood was not finite at any start".into(),
            best: None,
        });
    };
    let params = decode(&best.x, bmax);
    let loglik = -best.value;
    if !any_converged {
        return Err(Error::Fit {
            reason: format!("quasi-Newton search did not converge in {} iterations", best.iterations),
            best: Some(vec![params.lambda0, params.gamma, params.beta]),
        });
    }
    if loglik < poisson_ll {
        return Ok(HawkesFit {
            params: poisson,
            loglik: poisson_ll,
            converged: true,
            hessian: None,
            starts,
        });
    }
    let hessian = (params.gamma > 0.0)
        .then(|| hawkes_loglik_derivatives(&params, events).ok().map(|d| d.hessian))
        .flatten();
    Ok(HawkesFit {
        params,
        loglik,
        converged: best.converged,
        hessian,
        starts,
    })
}

/// Daily samples `X2(0..=n_days)` of the piecewise-exact solution started at 0.
pub fn simulate_x2(p: &Jump2Params, events: &EventStream, n_days: usize) -> Result<Vec<f64>> {
    simulate_x2_from(p.alpha2, events, n_days, 0.0)
}

/// Exponential decay at rate `alpha2` between events and a jump of `Z_i` at `T_i`.
/// An event exactly on a sampling day is included in that day's value.
pub fn simulate_x2_from(alpha2: f64, events: &EventStream, n_days: usize, x0: f64) -> Result<Vec<f64>> {
    if !(alpha2 > 0.0) {
        return Err(Error::param(format!("alpha2 must be positive, got {alpha2}")));
    }
    if events.horizon < n_days as f64 {
        return Err(Error::param(format!(
            "event horizon {} is shorter than {n_days} days",
            events.horizon
        )));
    }
    let step = (-alpha2).exp();
    let mut path = Vec::with_capacity(n_days + 1);
    let mut x = x0;
    path.push(x);
    let mut next = 0;
    for day in 1..=n_days {
        let t = day as f64;
        x *= step;
        while next < events.len() && events.times[next] <= t {
            x += events.marks[next] * (-alpha2 * (t - events.times[next])).exp();
            next += 1;
        }
        path.push(x);
    }
    Ok(path)
}
