//! Rolling-window calibration and Monte-Carlo distributional forecasts.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fgn::FgnGenerator;
use crate::filter::{decompose, Decomposition, FilterConfig};
use crate::fou::FouParams;
use crate::fracest::estimate_all;
use crate::gev::{gev_fit_mle, GevParams, MIN_FIT_SAMPLES};
use crate::hawkes::{hawkes_fit_mle_with, simulate_hawkes_rng, HawkesFitOptions, HawkesParams, Jump2Params};
use crate::numeric::quantile_sorted;
use crate::rng::SeedKey;
use crate::series::PriceSeries;

pub const MAX_HORIZON: usize = 30;
pub const QUANTILE_COUNT: usize = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Fbm,
    Sbm,
    Naive,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Fbm, Variant::Sbm, Variant::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Fbm => "fbm",
            Variant::Sbm => "sbm",
            Variant::Naive => "naive",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fbm" => Ok(Variant::Fbm),
            "sbm" => Ok(Variant::Sbm),
            "naive" => Ok(Variant::Naive),
            other => Err(Error::param(format!("unknown variant '{other}'"))),
        }
    }
}

/// Which calibration stages fell back to earlier or default values.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CalibrationFlags {
    pub fou_fallback: bool,
    pub hawkes_fallback: bool,
    pub gev_fallback: bool,
    pub hurst_clamped: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    pub fou: FouParams,
    pub jump: Jump2Params,
    pub window_id: usize,
    pub flags: CalibrationFlags,
}

/// Values used in the simulation study; also the last-resort fallback.
pub fn default_params() -> ModelParams {
    ModelParams {
        fou: FouParams {
            alpha1: 0.1,
            sigma: 6.0,
            hurst: 0.5,
            x0: 0.0,
        },
        jump: Jump2Params {
            alpha2: 0.5,
            hawkes: HawkesParams {
                lambda0: 0.01,
                gamma: 0.0,
                beta: 0.0,
            },
            mark_dist: GevParams {
                mu: 18.0,
                sigma: 2.0,
                xi: 0.7,
            },
        },
        window_id: 0,
        flags: CalibrationFlags::default(),
    }
}

/// Fits every component on one decomposed window. Stage failures never
/// abort: the stage keeps `previous` (or the defaults) and is flagged.
pub fn calibrate_window(
    decomp: &Decomposition,
    pinned_hurst: Option<f64>,
    previous: Option<&ModelParams>,
    window_id: usize,
) -> ModelParams {
    let base = previous.cloned().unwrap_or_else(default_params);
    let mut flags = CalibrationFlags::default();

    let fou = match estimate_all(&decomp.y_f, pinned_hurst) {
        Ok(est) => {
            flags.hurst_clamped = est.hurst_clamped;
            FouParams {
                alpha1: est.alpha1_hat,
                sigma: est.sigma_hat,
                hurst: est.hurst_hat,
                x0: 0.0,
            }
        }
        Err(e) => {
            flags.fou_fallback = true;
            flags.notes.push(format!("fOU estimation failed: {e}"));
            fallback_fou(&base, pinned_hurst)
        }
    };

    let events = &decomp.jump_events;
    let hawkes = match hawkes_fit_mle_with(events, &HawkesFitOptions::default()) {
        Ok(fit) => fit.params,
        Err(e) => {
            flags.hawkes_fallback = true;
            flags.notes.push(format!("Hawkes fit failed: {e}"));
            base.jump.hawkes
        }
    };

    let mark_dist = if events.len() < MIN_FIT_SAMPLES {
        flags.gev_fallback = true;
        flags.notes.push(format!("{} marks, GEV keeps previous values", events.len()));
        base.jump.mark_dist
    } else {
        match gev_fit_mle(events.marks()) {
            Ok(p) => p,
            Err(e) => {
                flags.gev_fallback = true;
                flags.notes.push(format!("GEV fit failed: {e}"));
                base.jump.mark_dist
            }
        }
    };

    ModelParams {
        fou,
        jump: Jump2Params {
            alpha2: decomp.alpha2_hat,
            hawkes,
            mark_dist,
        },
        window_id,
        flags,
    }
}

fn fallback_fou(base: &ModelParams, pinned_hurst: Option<f64>) -> FouParams {
    FouParams {
        hurst: pinned_hurst.unwrap_or(base.fou.hurst),
        ..base.fou
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastDistribution {
    pub origin_date: NaiveDate,
    pub horizon: usize,
    /// Quantiles at 1%, 2%, ..., 99%.
    pub quantiles: Vec<f64>,
    pub n_paths: usize,
}

impl ForecastDistribution {
    fn from_samples(origin_date: NaiveDate, horizon: usize, mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        let quantiles = (1..=QUANTILE_COUNT)
            .map(|q| quantile_sorted(&samples, q as f64 / 100.0))
            .collect();
        ForecastDistribution {
            origin_date,
            horizon,
            quantiles,
            n_paths: samples.len(),
        }
    }

    /// Quantile at level `q` percent, `1..=99`.
    pub fn quantile(&self, q: usize) -> f64 {
        self.quantiles[q - 1]
    }

    /// Central interval with the given coverage: 0.5 -> (q25, q75), 0.9 -> (q5, q95), 0.98 -> (q1, q99).
    pub fn interval(&self, coverage: f64) -> Result<(f64, f64)> {
        interval_from_quantiles(&self.quantiles, coverage)
    }
}

pub fn interval_from_quantiles(quantiles: &[f64], coverage: f64) -> Result<(f64, f64)> {
    let tail = (1.0 - coverage) / 2.0 * 100.0;
    let lo = tail.round() as usize;
    if !(coverage > 0.0 && coverage < 1.0) || lo == 0 || (tail - lo as f64).abs() > 1e-9 || quantiles.len() != QUANTILE_COUNT {
        return Err(Error::InvalidProbability(coverage));
    }
    Ok((quantiles[lo - 1], quantiles[QUANTILE_COUNT - lo]))
}

fn check_horizon(h: usize) -> Result<()> {
    if (1..=MAX_HORIZON).contains(&h) {
        Ok(())
    } else {
        Err(Error::param(format!("horizon must lie in 1..={MAX_HORIZON}, got {h}")))
    }
}

/// Simulates `n_paths` prices `h` days past the window end. The base path
/// starts from `y_f(T)` and steps as `x <- e^{-a1} x + sigma dW_H`; the jump
/// part decays `y_j(T)` and adds fresh Hawkes events with the stationary
/// intensity form (no transient term).
pub fn forecast_distribution(
    params: &ModelParams,
    decomp: &Decomposition,
    target_label: u8,
    origin_date: NaiveDate,
    h: usize,
    n_paths: usize,
    key: SeedKey,
) -> Result<ForecastDistribution> {
    check_horizon(h)?;
    if n_paths == 0 {
        return Err(Error::param("n_paths must be positive"));
    }
    let Some(&trend) = decomp.f_l_extension.get(h - 1) else {
        return Err(Error::param(format!(
            "trend extension covers {} days, horizon {h} requested",
            decomp.f_l_extension.len()
        )));
    };
    let fou = params.fou;
    fou.validate()?;
    let decay1 = (-fou.alpha1).exp();
    let jump = params.jump;
    jump.validate()?;
    let level = decomp.profile.deviation(target_label) + trend;
    let y_f0 = *decomp.y_f.last().ok_or(Error::EmptyInput)?;
    let y_j0 = *decomp.y_j.last().ok_or(Error::EmptyInput)?;
    let jump_carry = y_j0 * (-jump.alpha2 * h as f64).exp();
    let generator = FgnGenerator::new(fou.hurst, h)?;
    let mut rng = key.rng();

    let mut samples = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let noise = generator.sample(&mut rng);
        let mut x1 = y_f0;
        for z in &noise {
            x1 = decay1 * x1 + fou.sigma * z;
        }
        let events = simulate_hawkes_rng(&jump.hawkes, &jump.mark_dist, h as f64, None, &mut rng)?;
        let fresh: f64 = events
            .times()
            .iter()
            .zip(events.marks())
            .map(|(t, z)| z * (-jump.alpha2 * (h as f64 - t)).exp())
            .sum();
        samples.push(level + x1 + jump_carry + fresh);
    }
    Ok(ForecastDistribution::from_samples(origin_date, h, samples))
}

/// Weekly profile of the target day plus a bootstrap draw of the window residuals `Y - Y_D`.
pub fn naive_forecast(
    window: &PriceSeries,
    target_label: u8,
    h: usize,
    n_paths: usize,
    key: SeedKey,
) -> Result<ForecastDistribution> {
    check_horizon(h)?;
    if n_paths == 0 {
        return Err(Error::param("n_paths must be positive"));
    }
    let profile = crate::filter::weekly_profile(window);
    let residuals: Vec<f64> = window.values().iter().zip(&profile.y_d).map(|(y, d)| y - d).collect();
    let centre = profile.label_means[target_label as usize - 1];
    let mut rng = key.rng();
    let samples = (0..n_paths)
        .map(|_| centre + residuals[rng.random_range(0..residuals.len())])
        .collect();
    let origin = window.date_at(window.len() - 1);
    Ok(ForecastDistribution::from_samples(origin, h, samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub window_length: usize,
    pub horizons: Vec<usize>,
    pub n_paths: usize,
    pub variants: Vec<Variant>,
    pub seed: u64,
    pub filter: FilterConfig,
    /// Pins the Hurst exponent of the fBm variant (the sBm variant always uses 1/2).
    pub pin_hurst: Option<f64>,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            window_length: 730,
            horizons: (1..=MAX_HORIZON).collect(),
            n_paths: 1000,
            variants: Variant::ALL.to_vec(),
            seed: 0,
            filter: FilterConfig::default(),
            pin_hurst: None,
        }
    }
}

impl BacktestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_length < crate::filter::MIN_DECOMPOSE_LEN {
            return Err(Error::param(format!(
                "window length must be at least {}, got {}",
                crate::filter::MIN_DECOMPOSE_LEN,
                self.window_length
            )));
        }
        if self.horizons.is_empty() {
            return Err(Error::param("no forecast horizons requested"));
        }
        for &h in &self.horizons {
            check_horizon(h)?;
        }
        if self.variants.is_empty() {
            return Err(Error::param("no model variants requested"));
        }
        if self.n_paths == 0 {
            return Err(Error::param("n_paths must be positive"));
        }
        if self.filter.extension < self.horizons.iter().copied().max().unwrap_or(1) {
            return Err(Error::param("trend extension shorter than the longest horizon"));
        }
        Ok(())
    }

    fn pinned(&self, variant: Variant) -> Option<f64> {
        match variant {
            Variant::Sbm => Some(0.5),
            _ => self.pin_hurst,
        }
    }
}

/// Origins (index of the last in-window day) for horizon `h`:
/// `W - 1 + k h` for `k < floor((N - W) / h)`, so every target lies in the series.
pub fn forecast_origins(n: usize, window: usize, h: usize) -> Vec<usize> {
    if n < window || h == 0 {
        return Vec::new();
    }
    let count = (n - window) / h;
    (0..count).map(|k| window - 1 + k * h).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub origin: NaiveDate,
    pub origin_index: usize,
    pub target: NaiveDate,
    pub horizon: usize,
    pub variant: Variant,
    pub quantiles: Vec<f64>,
    pub realized: f64,
}

impl ForecastRecord {
    pub fn interval(&self, coverage: f64) -> Result<(f64, f64)> {
        interval_from_quantiles(&self.quantiles, coverage)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRecord {
    pub origin: NaiveDate,
    pub origin_index: usize,
    pub variant: Variant,
    pub params: Option<ModelParams>,
    pub jump_count: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Backtest {
    pub records: Vec<ForecastRecord>,
    pub calibrations: Vec<CalibrationRecord>,
}

struct OriginFit {
    index: usize,
    decomp: std::result::Result<Decomposition, String>,
    /// One entry per model variant, in `model_variants` order.
    params: Vec<Option<ModelParams>>,
}

/// Deterministic rolling backtest. Each distinct origin is decomposed and
/// calibrated once; forecasts for all horizons and variants reuse it.
pub fn rolling_backtest(series: &PriceSeries, config: &BacktestConfig) -> Result<Backtest> {
    config.validate()?;
    let n = series.len();
    let w = config.window_length;
    let max_h = config.horizons.iter().copied().max().expect("validated");
    if n < w + max_h {
        return Err(Error::insufficient(w + max_h, n));
    }
    let mut origins: Vec<usize> = config
        .horizons
        .iter()
        .flat_map(|&h| forecast_origins(n, w, h))
        .collect();
    origins.sort_unstable();
    origins.dedup();

    let model_variants: Vec<Variant> = config
        .variants
        .iter()
        .copied()
        .filter(|v| *v != Variant::Naive)
        .collect();

    let mut fits: Vec<OriginFit> = origins
        .par_iter()
        .map(|&t| {
            let window = series.slice(t + 1 - w, t + 1);
            let decomp = window
                .and_then(|win| decompose(&win, &config.filter))
                .map_err(|e| e.to_string());
            let params = model_variants
                .iter()
                .map(|&v| {
                    decomp
                        .as_ref()
                        .ok()
                        .map(|d| calibrate_window(d, config.pinned(v), None, t))
                })
                .collect();
            OriginFit { index: t, decomp, params }
        })
        .collect();

    // Sequential pass: stages that fell back take the previous origin's values.
    for (vi, _) in model_variants.iter().enumerate() {
        let mut previous: Option<ModelParams> = None;
        for fit in fits.iter_mut() {
            if let Some(p) = fit.params[vi].as_mut() {
                if let Some(prev) = &previous {
                    if p.flags.fou_fallback {
                        p.fou = FouParams {
                            hurst: p.fou.hurst,
                            ..prev.fou
                        };
                    }
                    if p.flags.hawkes_fallback {
                        p.jump.hawkes = prev.jump.hawkes;
                    }
                    if p.flags.gev_fallback {
                        p.jump.mark_dist = prev.jump.mark_dist;
                    }
                }
                previous = Some(p.clone());
            }
        }
    }

    let mut calibrations = Vec::new();
    for fit in &fits {
        for (vi, &v) in model_variants.iter().enumerate() {
            calibrations.push(CalibrationRecord {
                origin: series.date_at(fit.index),
                origin_index: fit.index,
                variant: v,
                params: fit.params[vi].clone(),
                jump_count: fit.decomp.as_ref().map_or(0, |d| d.jump_events.len()),
                error: fit.decomp.as_ref().err().cloned(),
            });
        }
    }

    let position = |t: usize| origins.binary_search(&t).expect("origin registered");
    let mut tasks: Vec<(usize, usize, Variant)> = Vec::new();
    for &h in &config.horizons {
        for t in forecast_origins(n, w, h) {
            for &v in &config.variants {
                tasks.push((h, t, v));
            }
        }
    }
    let root = SeedKey::new(config.seed);
    let results: Vec<Result<Option<ForecastRecord>>> = tasks
        .par_iter()
        .map(|&(h, t, v)| {
            let fit = &fits[position(t)];
            let target = t + h;
            let key = root.descend(&[t as u64, h as u64]);
            let label = series.labels()[target];
            let origin_date = series.date_at(t);
            let dist = match v {
                Variant::Naive => {
                    let window = series.slice(t + 1 - w, t + 1)?;
                    naive_forecast(&window, label, h, config.n_paths, key)?
                }
                _ => {
                    let vi = model_variants.iter().position(|m| *m == v).expect("model variant");
                    let (Ok(decomp), Some(params)) = (&fit.decomp, &fit.params[vi]) else {
                        log::warn!("origin {origin_date}: no decomposition, {v} forecast skipped");
                        return Ok(None);
                    };
                    forecast_distribution(params, decomp, label, origin_date, h, config.n_paths, key)?
                }
            };
            Ok(Some(ForecastRecord {
                origin: origin_date,
                origin_index: t,
                target: series.date_at(target),
                horizon: h,
                variant: v,
                quantiles: dist.quantiles,
                realized: series.values()[target],
            }))
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        if let Some(rec) = r? {
            records.push(rec);
        }
    }
    records.sort_by(|a, b| {
        (a.variant, a.horizon, a.origin_index).cmp(&(b.variant, b.horizon, b.origin_index))
    });
    Ok(Backtest { records, calibrations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hawkes::EventStream;
    use crate::series::HolidayCalendar;

    fn day0() -> NaiveDate {
        NaiveDate::from_ymd_opt(2011, 1, 3).unwrap()
    }

    fn noisy_series(n: usize, seed: u64) -> PriceSeries {
        use rand_distr::{Distribution, Normal};
        let mut rng = SeedKey::new(seed).rng();
        let normal = Normal::new(0.0, 4.0).unwrap();
        let values = (0..n)
            .map(|i| 60.0 + 5.0 * ((i % 7) as f64 / 6.0) + normal.sample(&mut rng))
            .collect();
        PriceSeries::new(day0(), values, &HolidayCalendar::italian()).unwrap()
    }

    #[test]
    fn origin_counting() {
        assert_eq!(forecast_origins(760, 730, 30), vec![729]);
        assert_eq!(forecast_origins(790, 730, 30), vec![729, 759]);
        assert_eq!(forecast_origins(1826, 730, 7).len(), (1826 - 730) / 7);
        assert!(forecast_origins(750, 730, 30).is_empty());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("FBM".parse::<Variant>().unwrap(), Variant::Fbm);
        assert_eq!(" naive".parse::<Variant>().unwrap(), Variant::Naive);
        assert!("gbm".parse::<Variant>().is_err());
        assert_eq!(serde_json::to_string(&Variant::Sbm).unwrap(), "\"sbm\"");
    }

    #[test]
    fn interval_mapping() {
        let q: Vec<f64> = (1..=99).map(f64::from).collect();
        assert_eq!(interval_from_quantiles(&q, 0.5).unwrap(), (25.0, 75.0));
        assert_eq!(interval_from_quantiles(&q, 0.9).unwrap(), (5.0, 95.0));
        assert_eq!(interval_from_quantiles(&q, 0.98).unwrap(), (1.0, 99.0));
        assert!(interval_from_quantiles(&q, 0.995).is_err());
    }

    fn flat_decomp(n: usize) -> (PriceSeries, Decomposition) {
        let s = noisy_series(n, 4);
        let d = decompose(&s, &FilterConfig::default()).unwrap();
        (s, d)
    }

    #[test]
    fn deterministic_limit() {
        let (s, mut d) = flat_decomp(400);
        d.y_j.iter_mut().for_each(|v| *v = 0.0);
        let mut p = default_params();
        p.fou.sigma = 0.0;
        p.jump.hawkes = HawkesParams::new(1e-12, 0.0, 0.0).unwrap();
        let label = s.labels()[100];
        let f = forecast_distribution(&p, &d, label, day0(), 1, 50, SeedKey::new(1)).unwrap();
        let expected = d.profile.deviation(label) + d.f_l_extension[0] + (-0.1f64).exp() * d.y_f.last().unwrap();
        for q in &f.quantiles {
            assert!((q - expected).abs() < 1e-9, "{q} vs {expected}");
        }
    }

    #[test]
    fn quantiles_nondecreasing_and_seeded() {
        let (s, d) = flat_decomp(400);
        let p = calibrate_window(&d, None, None, 0);
        let label = s.labels()[3];
        let a = forecast_distribution(&p, &d, label, day0(), 10, 500, SeedKey::new(3)).unwrap();
        assert!(a.quantiles.windows(2).all(|w| w[0] <= w[1]));
        let b = forecast_distribution(&p, &d, label, day0(), 10, 500, SeedKey::new(3)).unwrap();
        assert_eq!(a, b);
        assert!(forecast_distribution(&p, &d, label, day0(), 31, 10, SeedKey::new(3)).is_err());
        let (lo, hi) = a.interval(0.9).unwrap();
        assert_eq!((lo, hi), (a.quantile(5), a.quantile(95)));
    }

    #[test]
    fn sbm_calibration_pins_hurst_and_zero_jumps_fall_back() {
        let (_, mut d) = flat_decomp(400);
        let p = calibrate_window(&d, Some(0.5), None, 7);
        assert_eq!(p.fou.hurst, 0.5);
        assert_eq!(p.window_id, 7);
        d.jump_events = EventStream::empty(d.jump_events.horizon());
        let p = calibrate_window(&d, None, None, 0);
        assert!(p.flags.hawkes_fallback && p.flags.gev_fallback);
        assert!(!p.flags.fou_fallback);
        assert_eq!(p.jump.hawkes, default_params().jump.hawkes);
    }

    #[test]
    fn naive_examples() {
        // Series equal to its own weekly profile: the forecast is a point mass.
        let values: Vec<f64> = (0..730).map(|i| 40.0 + (i % 7) as f64).collect();
        let s = PriceSeries::new(day0(), values, &HolidayCalendar::empty()).unwrap();
        let f = naive_forecast(&s, 3, 5, 200, SeedKey::new(1)).unwrap();
        assert!(f.quantiles.iter().all(|&q| (q - 42.0).abs() < 1e-12));

        let s = noisy_series(730, 9);
        let profile = crate::filter::weekly_profile(&s);
        let f = naive_forecast(&s, 2, 5, 20_000, SeedKey::new(2)).unwrap();
        assert!((f.quantile(50) - profile.label_means[1]).abs() < 0.3);
        let resid: Vec<f64> = s.values().iter().zip(&profile.y_d).map(|(y, d)| y - d).collect();
        // Compare on the probability scale: the residual tail is sparse.
        let cdf = |x: f64| resid.iter().filter(|&&r| r <= x - profile.label_means[1]).count() as f64 / resid.len() as f64;
        let (lo, hi) = f.interval(0.9).unwrap();
        assert!((cdf(lo) - 0.05).abs() < 0.01, "{}", cdf(lo));
        assert!((cdf(hi) - 0.95).abs() < 0.01, "{}", cdf(hi));
    }

    #[test]
    fn small_backtest_counts_and_determinism() {
        let s = noisy_series(790, 12);
        let cfg = BacktestConfig {
            horizons: vec![30],
            n_paths: 100,
            seed: 5,
            ..Default::default()
        };
        let bt = rolling_backtest(&s, &cfg).unwrap();
        for v in Variant::ALL {
            assert_eq!(bt.records.iter().filter(|r| r.variant == v).count(), 2);
        }
        assert_eq!(bt, rolling_backtest(&s, &cfg).unwrap());
        let short = noisy_series(759, 12);
        assert!(matches!(rolling_backtest(&short, &cfg), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn pinned_fbm_matches_sbm() {
        let s = noisy_series(745, 13);
        let cfg = BacktestConfig {
            horizons: vec![1, 5, 15],
            n_paths: 64,
            variants: vec![Variant::Fbm, Variant::Sbm],
            pin_hurst: Some(0.5),
            seed: 77,
            ..Default::default()
        };
        let bt = rolling_backtest(&s, &cfg).unwrap();
        let pick = |v: Variant| -> Vec<(usize, usize, Vec<f64>)> {
            bt.records
                .iter()
                .filter(|r| r.variant == v)
                .map(|r| (r.horizon, r.origin_index, r.quantiles.clone()))
                .collect()
        };
        assert!(!pick(Variant::Fbm).is_empty());
        assert_eq!(pick(Variant::Fbm), pick(Variant::Sbm));
    }
}
