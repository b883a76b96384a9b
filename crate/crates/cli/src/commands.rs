use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde_json::json;

use spotfou::filter::{decompose, FilterConfig, PipelineOrder};
use spotfou::forecast::{
    default_params, rolling_backtest, Backtest, BacktestConfig, CalibrationRecord, ForecastRecord, ModelParams, Variant,
};
use spotfou::fou::FouParams;
use spotfou::gev::GevParams;
use spotfou::hawkes::{intensity_at, HawkesParams, Jump2Params};
use spotfou::metrics::{aggregate_report, EvaluationReport};
use spotfou::series::{load_csv, HolidayCalendar, PriceSeries};
use spotfou::synthetic::simulate_components;

use crate::config::{parse_horizons, RunFile};
use crate::error::{kind, CliError};
use crate::{BacktestArgs, DecomposeArgs, EvaluateArgs, FilterArgs, SimulateArgs};

pub struct Common {
    pub run: RunFile,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Common {
    fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        fs::create_dir_all(&self.output_dir)?;
        let path = self.output_dir.join(name);
        info!("writing {}", path.display());
        Ok(BufWriter::new(File::create(path)?))
    }

    fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut out = self.create(name)?;
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }
}

fn input_path(flag: Option<PathBuf>, run: &RunFile) -> Result<PathBuf, CliError> {
    run.pick(flag, "input")?
        .ok_or_else(|| CliError::Param("--input is required".into()))
}

fn load_series(flag: Option<PathBuf>, holidays: Option<PathBuf>, run: &RunFile) -> Result<PriceSeries, CliError> {
    let path = input_path(flag, run)?;
    let calendar = match run.pick(holidays, "holidays")? {
        Some(p) => HolidayCalendar::load(&p)?,
        None => HolidayCalendar::italian(),
    };
    load_csv(&path, &calendar).map_err(|e| CliError::Data(format!("{}: {}: {e}", path.display(), kind(&e))))
}

fn model_params(args: &SimulateArgs, run: &RunFile) -> Result<ModelParams, CliError> {
    let d = default_params();
    let fou = FouParams::new(
        run.pick_or(args.alpha1, "alpha1", d.fou.alpha1)?,
        run.pick_or(args.sigma, "sigma", d.fou.sigma)?,
        run.pick_or(args.hurst, "h", d.fou.hurst)?,
        run.pick_or(args.x0, "x0", 0.0)?,
    )?;
    let hawkes = HawkesParams::new(
        run.pick_or(args.lambda, "lambda", d.jump.hawkes.lambda0)?,
        run.pick_or(args.gamma, "gamma", d.jump.hawkes.gamma)?,
        run.pick_or(args.beta, "beta", d.jump.hawkes.beta)?,
    )?;
    let mark_dist = GevParams::new(
        run.pick_or(args.mu, "mu", d.jump.mark_dist.mu)?,
        run.pick_or(args.gev_sigma, "gev-sigma", d.jump.mark_dist.sigma)?,
        run.pick_or(args.xi, "xi", d.jump.mark_dist.xi)?,
    )?;
    let jump = Jump2Params {
        alpha2: run.pick_or(args.alpha2, "alpha2", d.jump.alpha2)?,
        hawkes,
        mark_dist,
    };
    jump.validate()?;
    Ok(ModelParams { fou, jump, ..d })
}

pub fn simulate(args: SimulateArgs, c: &Common) -> Result<(), CliError> {
    let params = model_params(&args, &c.run)?;
    let days: usize = c.run.pick_or(args.days, "days", 730)?;
    if days == 0 {
        return Err(CliError::Param("--days must be positive".into()));
    }
    let (x1, x2, events) = simulate_components(&params, days, c.seed)?;
    let hawkes = params.jump.hawkes;

    let mut out = c.create("simulation.csv")?;
    writeln!(out, "t,x1,x2,x,intensity")?;
    for t in 0..days {
        let lambda = intensity_at(&hawkes, &events, t as f64);
        writeln!(out, "{t},{},{},{},{lambda}", x1[t], x2[t], x1[t] + x2[t])?;
    }
    out.flush()?;
    let mut ev = c.create("events.csv")?;
    events.write_csv(&mut ev)?;
    ev.flush()?;
    c.write_json(
        "simulation.json",
        &json!({ "params": params, "days": days, "seed": c.seed, "events": events.len() }),
    )?;
    info!("simulated {days} days with {} jumps", events.len());
    Ok(())
}

fn filter_config(args: &FilterArgs, run: &RunFile) -> Result<FilterConfig, CliError> {
    let d = FilterConfig::default();
    let order = match run.pick(args.order.clone(), "order")?.as_deref() {
        None | Some("jumps-first") => PipelineOrder::JumpsFirst,
        Some("trend-first") => PipelineOrder::TrendFirst,
        Some(other) => {
            return Err(CliError::Param(format!(
                "order must be jumps-first or trend-first, got '{other}'"
            )))
        }
    };
    let cfg = FilterConfig {
        level: run.pick_or(args.level, "level", d.level)?,
        theta: run.pick_or(args.theta, "theta", d.theta)?,
        extension: run.pick_or(args.extension, "extension", d.extension)?,
        threshold: run.pick_or(args.threshold, "threshold", d.threshold)?,
        ma_window: run.pick_or(args.ma_window, "ma-window", d.ma_window)?,
        iterate_spikes: run.pick_or(args.iterate_spikes, "iterate-spikes", d.iterate_spikes)?,
        order,
    };
    if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(CliError::Param(format!("theta must lie in (0, 1), got {}", cfg.theta)));
    }
    if !(cfg.threshold > 0.0) || cfg.ma_window == 0 || cfg.level == 0 || cfg.extension == 0 {
        return Err(CliError::Param("threshold, ma-window, level and extension must be positive".into()));
    }
    Ok(cfg)
}

pub fn decompose_cmd(args: DecomposeArgs, c: &Common) -> Result<(), CliError> {
    let cfg = filter_config(&args.filter, &c.run)?;
    let series = load_series(args.input, args.holidays, &c.run)?;
    let d = decompose(&series, &cfg).map_err(CliError::data)?;

    let mut out = c.create("decomposition.csv")?;
    d.write_csv(series.values(), &mut out)?;
    out.flush()?;
    let mut out = c.create("jumps.csv")?;
    d.jump_events.write_csv(&mut out)?;
    out.flush()?;
    let mut out = c.create("trend_extension.csv")?;
    writeln!(out, "h,date,f_l")?;
    let last = series.date_at(series.len() - 1);
    for (i, v) in d.f_l_extension.iter().enumerate() {
        writeln!(out, "{},{},{v}", i + 1, last + chrono::Days::new(i as u64 + 1))?;
    }
    out.flush()?;
    c.write_json(
        "decomposition.json",
        &json!({
            "alpha2_hat": d.alpha2_hat,
            "jump_count": d.jump_events.len(),
            "sigma_tilde": d.sigma_tilde,
            "mean_price": d.mean_price,
            "days": series.len(),
            "start_date": series.start_date(),
            "missing_labels": d.profile.missing_labels,
            "reconstruction_error": d.reconstruction_error(series.values()),
        }),
    )?;
    info!("{} jumps, alpha2 = {:.4}", d.jump_events.len(), d.alpha2_hat);
    Ok(())
}

fn parse_variants(text: &str) -> Result<Vec<Variant>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: Variant = part.parse()?;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(CliError::Param("no variants given".into()));
    }
    Ok(out)
}

fn write_reports(report: &EvaluationReport, c: &Common) -> Result<(), CliError> {
    c.write_json("report.json", report)?;
    let mut out = c.create("report.csv")?;
    report.write_csv(&mut out)?;
    out.flush()?;
    let mut out = c.create("report_by_horizon.csv")?;
    report.write_horizon_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn write_calibrations(records: &[CalibrationRecord], out: &mut impl Write) -> Result<(), CliError> {
    writeln!(
        out,
        "origin,variant,hurst,sigma,alpha1,alpha2,lambda,gamma,beta,gev_mu,gev_sigma,gev_xi,jumps,fallback,error"
    )?;
    for r in records {
        match &r.params {
            Some(p) => {
                let f = &p.flags;
                let mut stages = Vec::new();
                if f.fou_fallback {
                    stages.push("fou");
                }
                if f.hawkes_fallback {
                    stages.push("hawkes");
                }
                if f.gev_fallback {
                    stages.push("gev");
                }
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                    r.origin,
                    r.variant,
                    p.fou.hurst,
                    p.fou.sigma,
                    p.fou.alpha1,
                    p.jump.alpha2,
                    p.jump.hawkes.lambda0,
                    p.jump.hawkes.gamma,
                    p.jump.hawkes.beta,
                    p.jump.mark_dist.mu,
                    p.jump.mark_dist.sigma,
                    p.jump.mark_dist.xi,
                    r.jump_count,
                    stages.join("+")
                )?;
            }
            None => writeln!(
                out,
                "{},{},,,,,,,,,,,{},,\"{}\"",
                r.origin,
                r.variant,
                r.jump_count,
                r.error.as_deref().unwrap_or("").replace('"', "'")
            )?,
        }
    }
    Ok(())
}

/// Counts of the branching ratio `gamma / beta` in 20 bins over `[0, 1)`.
fn write_ratio_histogram(records: &[CalibrationRecord], out: &mut impl Write) -> Result<(), CliError> {
    const BINS: usize = 20;
    writeln!(out, "variant,bin_lo,bin_hi,count")?;
    let mut variants: Vec<Variant> = records.iter().map(|r| r.variant).collect();
    variants.dedup();
    for v in variants {
        let mut counts = [0usize; BINS];
        for p in records.iter().filter(|r| r.variant == v).filter_map(|r| r.params.as_ref()) {
            let h = p.jump.hawkes;
            let ratio = if h.beta > 0.0 { h.gamma / h.beta } else { 0.0 };
            counts[((ratio * BINS as f64) as usize).min(BINS - 1)] += 1;
        }
        for (i, n) in counts.iter().enumerate() {
            writeln!(out, "{v},{},{},{n}", i as f64 / BINS as f64, (i + 1) as f64 / BINS as f64)?;
        }
    }
    Ok(())
}

pub fn backtest(args: BacktestArgs, c: &Common) -> Result<(), CliError> {
    let d = BacktestConfig::default();
    let horizons = match c.run.pick(args.horizons, "horizons")? {
        Some(h) => parse_horizons(&h)?,
        None => d.horizons.clone(),
    };
    let variants = match c.run.pick(args.variant, "variant")? {
        Some(v) => parse_variants(&v)?,
        None => d.variants.clone(),
    };
    let cfg = BacktestConfig {
        window_length: c.run.pick_or(args.window, "window", d.window_length)?,
        horizons,
        n_paths: c.run.pick_or(args.paths, "paths", d.n_paths)?,
        variants,
        seed: c.seed,
        filter: filter_config(&args.filter, &c.run)?,
        pin_hurst: c.run.pick(args.pin_hurst, "pin-hurst")?,
    };
    cfg.validate()?;
    if let Some(h) = cfg.pin_hurst {
        FouParams::new(0.1, 1.0, h, 0.0)?;
    }
    let series = load_series(args.input, args.holidays, &c.run)?;
    let Backtest { records, calibrations } = rolling_backtest(&series, &cfg).map_err(|e| match e {
        spotfou::Error::InvalidParameter(_) => CliError::from(e),
        other => CliError::data(other),
    })?;
    for r in &calibrations {
        if let Some(p) = &r.params {
            for note in &p.flags.notes {
                warn!("{} {}: {note}", r.origin, r.variant);
            }
        }
        if let Some(e) = &r.error {
            warn!("{} {}: window skipped: {e}", r.origin, r.variant);
        }
    }
    c.write_json("forecasts.json", &records)?;
    c.write_json("backtest_config.json", &cfg)?;
    let mut out = c.create("calibrations.csv")?;
    write_calibrations(&calibrations, &mut out)?;
    out.flush()?;
    let mut out = c.create("gamma_beta_ratio.csv")?;
    write_ratio_histogram(&calibrations, &mut out)?;
    out.flush()?;
    let report = aggregate_report(&records)?;
    write_reports(&report, c)?;
    info!("{} forecasts scored", records.len());
    Ok(())
}

pub fn evaluate(args: EvaluateArgs, c: &Common) -> Result<(), CliError> {
    let path = input_path(args.input, &c.run)?;
    let records: Vec<ForecastRecord> = read_records(&path)?;
    let report = aggregate_report(&records).map_err(CliError::data)?;
    write_reports(&report, c)
}

fn read_records(path: &Path) -> Result<Vec<ForecastRecord>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
