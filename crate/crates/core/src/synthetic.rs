//! Ground-truth price series assembled from known components, for tests and demos.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::fgn::FgnGenerator;
use crate::forecast::ModelParams;
use crate::fou::simulate_fou;
use crate::hawkes::{simulate_hawkes_rng, simulate_x2, EventStream};
use crate::rng::SeedKey;
use crate::series::{HolidayCalendar, PriceSeries};

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub start: NaiveDate,
    pub n_days: usize,
    pub params: ModelParams,
    /// Price level per day label 1..=8.
    pub weekly: [f64; 8],
    pub trend_amplitude: f64,
    pub trend_period: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(start: NaiveDate, n_days: usize, params: ModelParams, seed: u64) -> Self {
        SyntheticSpec {
            start,
            n_days,
            params,
            weekly: [52.0, 54.0, 54.0, 53.0, 51.0, 44.0, 38.0, 36.0],
            trend_amplitude: 8.0,
            trend_period: 1200.0,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSeries {
    pub series: PriceSeries,
    pub seasonal: Vec<f64>,
    pub trend: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub events: EventStream,
}

/// Daily samples of `X1`, `X2` for `n_days` days plus the underlying events.
pub fn simulate_components(params: &ModelParams, n_days: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>, EventStream)> {
    if n_days == 0 {
        return Err(Error::param("at least one day is required"));
    }
    let key = SeedKey::new(seed);
    let steps = n_days - 1;
    let z = if steps == 0 {
        Vec::new()
    } else {
        FgnGenerator::new(params.fou.hurst, steps)?.sample(&mut key.child(0).rng())
    };
    let x1 = simulate_fou(&params.fou, steps, 1.0, &z)?;
    let jump = &params.jump;
    jump.validate()?;
    let events = simulate_hawkes_rng(&jump.hawkes, &jump.mark_dist, steps as f64, None, &mut key.child(1).rng())?;
    let x2 = simulate_x2(jump, &events, steps)?;
    Ok((x1, x2, events))
}

/// `Y = weekly[label] + trend + X1 + X2` with the trend a slow sine.
pub fn generate(spec: &SyntheticSpec, calendar: &HolidayCalendar) -> Result<SyntheticSeries> {
    let n = spec.n_days;
    let (x1, x2, events) = simulate_components(&spec.params, n, spec.seed)?;
    let labelled = PriceSeries::new(spec.start, vec![0.0; n], calendar)?;
    let seasonal: Vec<f64> = labelled.labels().iter().map(|&l| spec.weekly[l as usize - 1]).collect();
    let trend: Vec<f64> = (0..n)
        .map(|t| spec.trend_amplitude * (2.0 * std::f64::consts::PI * t as f64 / spec.trend_period).sin())
        .collect();
    let values = (0..n).map(|t| seasonal[t] + trend[t] + x1[t] + x2[t]).collect();
    Ok(SyntheticSeries {
        series: PriceSeries::new(spec.start, values, calendar)?,
        seasonal,
        trend,
        x1,
        x2,
        events,
    })
}
