//! Splits a price series into weekly seasonality, jumps, a long-term trend and
//! the residual base signal.

pub mod wavelet;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hawkes::{simulate_x2_from, EventStream};
use crate::numeric::{mean, median, std_dev};
use crate::series::{moving_average, PriceSeries, HOLIDAY_LABEL};

pub const MIN_SPIKE_LEN: usize = 60;
pub const MIN_DECOMPOSE_LEN: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PipelineOrder {
    /// Remove spikes, then extract the trend (the default).
    JumpsFirst,
    /// Extract the trend from the spiky series first. Kept for comparison only.
    TrendFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub level: usize,
    pub theta: f64,
    /// Days appended by median reversion before the wavelet pass.
    pub extension: usize,
    pub threshold: f64,
    pub ma_window: usize,
    pub iterate_spikes: bool,
    pub order: PipelineOrder,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            level: 8,
            theta: 0.985,
            extension: 30,
            threshold: 2.5,
            ma_window: 30,
            iterate_spikes: false,
            order: PipelineOrder::JumpsFirst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeeklyProfile {
    /// Mean price per label 1..=8 (index 0 is label 1).
    pub label_means: [f64; 8],
    pub mean_price: f64,
    /// Labels absent from the window; their mean falls back to the overall mean.
    pub missing_labels: Vec<u8>,
    /// `Y_D(t)` for every day of the series.
    pub y_d: Vec<f64>,
}

impl WeeklyProfile {
    /// Seasonal deviation `Y_D - mean` for a calendar label.
    pub fn deviation(&self, label: u8) -> f64 {
        self.label_means[label as usize - 1] - self.mean_price
    }
}

pub fn weekly_profile(series: &PriceSeries) -> WeeklyProfile {
    let values = series.values();
    let mean_price = mean(values);
    let mut sums = [0.0; 8];
    let mut counts = [0usize; 8];
    for (&v, &l) in values.iter().zip(series.labels()) {
        sums[l as usize - 1] += v;
        counts[l as usize - 1] += 1;
    }
    let mut label_means = [mean_price; 8];
    let mut missing_labels = Vec::new();
    for j in 0..8 {
        if counts[j] > 0 {
            label_means[j] = sums[j] / counts[j] as f64;
        } else {
            missing_labels.push(j as u8 + 1);
        }
    }
    if !missing_labels.is_empty() {
        log::debug!("labels {missing_labels:?} absent from window; using the overall mean");
    }
    let y_d = series.labels().iter().map(|&l| label_means[l as usize - 1]).collect();
    WeeklyProfile {
        label_means,
        mean_price,
        missing_labels,
        y_d,
    }
}

/// `Y_w = Y - (Y_D - mean)`.
pub fn deseasonalize_weekly(series: &PriceSeries) -> Vec<f64> {
    let profile = weekly_profile(series);
    deseasonalize_with(series.values(), &profile)
}

fn deseasonalize_with(values: &[f64], profile: &WeeklyProfile) -> Vec<f64> {
    values
        .iter()
        .zip(&profile.y_d)
        .map(|(y, yd)| y - (yd - profile.mean_price))
        .collect()
}

/// `log` of the largest consecutive ratio `y(j-1) / y(j)`, on a copy shifted so its minimum is 1
/// when the series is not strictly positive.
pub fn estimate_alpha2(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::insufficient(2, values.len()));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = if min <= 0.0 { min - 1.0 } else { 0.0 };
    let best = values
        .windows(2)
        .map(|w| (w[0] - shift) / (w[1] - shift))
        .fold(f64::NEG_INFINITY, f64::max);
    if !(best > 1.0) {
        return Err(Error::DegenerateInput(
            "no decreasing step; the jump reversion rate is not identifiable".into(),
        ));
    }
    Ok(best.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeDetection {
    pub alpha2_hat: f64,
    pub events: EventStream,
    pub sigma_tilde: f64,
}

/// `(1 - alpha2) y(t) + alpha2 MA(t)`.
fn modified_series(y: &[f64], alpha2: f64, window: usize) -> Result<Vec<f64>> {
    let ma = moving_average(y, window)?;
    Ok(y.iter().zip(&ma).map(|(v, m)| (1.0 - alpha2) * v + alpha2 * m).collect())
}

/// Increments `y(t) - modified(t - 1)` for `t >= 1`.
fn modified_increments(y: &[f64], modified: &[f64]) -> Vec<f64> {
    (1..y.len()).map(|t| y[t] - modified[t - 1]).collect()
}

pub fn detect_spikes(y_w: &[f64], cfg: &FilterConfig) -> Result<SpikeDetection> {
    if y_w.len() < MIN_SPIKE_LEN {
        return Err(Error::insufficient(MIN_SPIKE_LEN, y_w.len()));
    }
    let alpha2 = estimate_alpha2(y_w)?;
    let modified = modified_series(y_w, alpha2, cfg.ma_window)?;
    let inc = modified_increments(y_w, &modified);
    let sigma_tilde = std_dev(&inc);
    if !(sigma_tilde > 0.0) {
        return Err(Error::DegenerateInput("modified increments have zero spread".into()));
    }
    let horizon = (y_w.len() - 1) as f64;
    let (times, marks) = flag(&inc, cfg.threshold * sigma_tilde);
    let mut events = EventStream::new(times, marks, horizon)?;

    if cfg.iterate_spikes {
        for _ in 0..20 {
            let y_j = reconstruct_jump_series(&events, alpha2, y_w.len())?;
            let rest: Vec<f64> = y_w.iter().zip(&y_j).map(|(a, b)| a - b).collect();
            let modified = modified_series(&rest, alpha2, cfg.ma_window)?;
            let inc = modified_increments(&rest, &modified);
            let (times, marks) = flag(&inc, cfg.threshold * sigma_tilde);
            if times.is_empty() {
                break;
            }
            events = merge(&events, &times, &marks)?;
        }
    }
    Ok(SpikeDetection {
        alpha2_hat: alpha2,
        events,
        sigma_tilde,
    })
}

fn flag(inc: &[f64], bound: f64) -> (Vec<f64>, Vec<f64>) {
    inc.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > bound)
        .map(|(i, &v)| ((i + 1) as f64, v))
        .unzip()
}

/// Union of two event sets on the daily grid; marks on a shared day add up.
fn merge(events: &EventStream, times: &[f64], marks: &[f64]) -> Result<EventStream> {
    let mut all: Vec<(f64, f64)> = events
        .times()
        .iter()
        .copied()
        .zip(events.marks().iter().copied())
        .chain(times.iter().copied().zip(marks.iter().copied()))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut t_out: Vec<f64> = Vec::with_capacity(all.len());
    let mut z_out: Vec<f64> = Vec::with_capacity(all.len());
    for (t, z) in all {
        if t_out.last() == Some(&t) {
            *z_out.last_mut().expect("paired") += z;
        } else {
            t_out.push(t);
            z_out.push(z);
        }
    }
    EventStream::new(t_out, z_out, events.horizon())
}

/// `Y_J(t) = sum_{tau_j <= t} mu_j e^{-alpha2 (t - tau_j)}` for `t = 0..n_days`.
pub fn reconstruct_jump_series(events: &EventStream, alpha2: f64, n_days: usize) -> Result<Vec<f64>> {
    if n_days == 0 {
        return Ok(Vec::new());
    }
    simulate_x2_from(alpha2, events, n_days - 1, 0.0)
}

/// Median-reversion prolongation `m + (y(T) - m) theta^j`, `j = 1..=horizon`.
pub fn median_reversion(y_s: &[f64], horizon: usize, theta: f64) -> Result<Vec<f64>> {
    if y_s.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param(format!("theta must lie in (0, 1), got {theta}")));
    }
    let m = median(y_s);
    let last = *y_s.last().expect("non-empty");
    Ok((1..=horizon).map(|j| m + (last - m) * theta.powi(j as i32)).collect())
}

pub fn wavelet_trend(y_s: &[f64], level: usize) -> Result<Vec<f64>> {
    wavelet::approximation(y_s, level)
}

/// Trend over the window followed by `horizon` prolonged days.
pub fn extend_trend(y_s: &[f64], horizon: usize, theta: f64, level: usize) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(Error::param("extension horizon must be at least 1"));
    }
    let mut extended = y_s.to_vec();
    extended.extend(median_reversion(y_s, horizon, theta)?);
    wavelet_trend(&extended, level)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    /// Weekly seasonal deviation `Y_D - mean` per day.
    pub f_s: Vec<f64>,
    pub f_l: Vec<f64>,
    /// Trend continued past the window end, `extension` days long.
    pub f_l_extension: Vec<f64>,
    pub y_w: Vec<f64>,
    pub y_j: Vec<f64>,
    pub y_s: Vec<f64>,
    pub y_f: Vec<f64>,
    pub alpha2_hat: f64,
    pub jump_events: EventStream,
    pub mean_price: f64,
    pub sigma_tilde: f64,
    pub profile: WeeklyProfile,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.y_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_f.is_empty()
    }

    /// Largest absolute violation of `Y = y_f + f_l + y_j + f_s`.
    pub fn reconstruction_error(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(t, y)| (y - (self.y_f[t] + self.f_l[t] + self.y_j[t] + self.f_s[t])).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `t,y,f_s,f_l,y_j,y_f`.
    pub fn write_csv<W: Write>(&self, values: &[f64], mut out: W) -> Result<()> {
        writeln!(out, "t,y,f_s,f_l,y_j,y_f")?;
        for (t, y) in values.iter().enumerate() {
            writeln!(
                out,
                "{t},{y},{},{},{},{}",
                self.f_s[t], self.f_l[t], self.y_j[t], self.y_f[t]
            )?;
        }
        Ok(())
    }
}

/// Jump reversion reported when a window is too flat to estimate it.
pub const QUIET_ALPHA2: f64 = 0.5;

/// Spike detection that reads a degenerate (flat or never-decreasing) series
/// as one without spikes.
fn detect_or_quiet(y: &[f64], cfg: &FilterConfig) -> Result<SpikeDetection> {
    match detect_spikes(y, cfg) {
        Err(Error::DegenerateInput(reason)) => {
            log::warn!("spike detection skipped: {reason}");
            Ok(SpikeDetection {
                alpha2_hat: QUIET_ALPHA2,
                events: EventStream::empty((y.len() - 1) as f64),
                sigma_tilde: 0.0,
            })
        }
        other => other,
    }
}

pub fn decompose(series: &PriceSeries, cfg: &FilterConfig) -> Result<Decomposition> {
    let n = series.len();
    if n < MIN_DECOMPOSE_LEN {
        return Err(Error::insufficient(MIN_DECOMPOSE_LEN, n));
    }
    let profile = weekly_profile(series);
    let y_w = deseasonalize_with(series.values(), &profile);
    let f_s: Vec<f64> = profile.y_d.iter().map(|yd| yd - profile.mean_price).collect();

    let (spikes, y_j, trend_full) = match cfg.order {
        PipelineOrder::JumpsFirst => {
            let spikes = detect_or_quiet(&y_w, cfg)?;
            let y_j = reconstruct_jump_series(&spikes.events, spikes.alpha2_hat, n)?;
            let y_s: Vec<f64> = y_w.iter().zip(&y_j).map(|(a, b)| a - b).collect();
            let trend = extend_trend(&y_s, cfg.extension, cfg.theta, cfg.level)?;
            (spikes, y_j, trend)
        }
        PipelineOrder::TrendFirst => {
            let trend = extend_trend(&y_w, cfg.extension, cfg.theta, cfg.level)?;
            let detrended: Vec<f64> = y_w
                .iter()
                .zip(&trend)
                .map(|(a, b)| a - b + profile.mean_price)
                .collect();
            let spikes = detect_or_quiet(&detrended, cfg)?;
            let y_j = reconstruct_jump_series(&spikes.events, spikes.alpha2_hat, n)?;
            (spikes, y_j, trend)
        }
    };
    let y_s: Vec<f64> = y_w.iter().zip(&y_j).map(|(a, b)| a - b).collect();
    let f_l = trend_full[..n].to_vec();
    let f_l_extension = trend_full[n..].to_vec();
    let y_f: Vec<f64> = y_s.iter().zip(&f_l).map(|(a, b)| a - b).collect();
    Ok(Decomposition {
        f_s,
        f_l,
        f_l_extension,
        y_w,
        y_j,
        y_s,
        y_f,
        alpha2_hat: spikes.alpha2_hat,
        jump_events: spikes.events,
        mean_price: profile.mean_price,
        sigma_tilde: spikes.sigma_tilde,
        profile,
    })
}

/// Label used for a date that is a holiday.
pub const fn holiday_label() -> u8 {
    HOLIDAY_LABEL
}
