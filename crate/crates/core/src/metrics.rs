//! Interval and quantile scores for backtest output.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{ForecastRecord, Variant, QUANTILE_COUNT};

pub const COVERAGES: [f64; 3] = [0.5, 0.9, 0.98];

/// Winkler penalty numerator, divided by the miscoverage `1 - c`.
pub const WINKLER_PENALTY_SCALE: f64 = 2.0;

pub fn winkler_penalty(coverage: f64) -> f64 {
    WINKLER_PENALTY_SCALE / (1.0 - coverage)
}

fn check_interval(lower: f64, upper: f64) -> Result<()> {
    if lower.is_finite() && upper.is_finite() && lower <= upper {
        Ok(())
    } else {
        Err(Error::InvalidInterval { lower, upper })
    }
}

fn check_coverage(coverage: f64) -> Result<()> {
    if coverage > 0.0 && coverage < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(coverage))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub level: f64,
    /// Fraction of realized values inside their interval.
    pub rate: f64,
    /// `rate - level`.
    pub error: f64,
    pub abs_error: f64,
}

/// Fraction of realized values inside `[L, U]`, with its error against `level`.
pub fn unconditional_coverage(intervals: &[(f64, f64)], realized: &[f64], level: f64) -> Result<Coverage> {
    if intervals.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_coverage(level)?;
    if intervals.len() != realized.len() {
        return Err(Error::param("interval and realization counts differ"));
    }
    let mut hits = 0usize;
    for (&(l, u), &y) in intervals.iter().zip(realized) {
        check_interval(l, u)?;
        if l <= y && y <= u {
            hits += 1;
        }
    }
    let rate = hits as f64 / intervals.len() as f64;
    Ok(Coverage {
        level,
        rate,
        error: rate - level,
        abs_error: (rate - level).abs(),
    })
}

pub fn winkler_score(lower: f64, upper: f64, realized: f64, coverage: f64) -> Result<f64> {
    check_interval(lower, upper)?;
    check_coverage(coverage)?;
    let width = upper - lower;
    Ok(if realized < lower {
        width + winkler_penalty(coverage) * (lower - realized)
    } else if realized > upper {
        width + winkler_penalty(coverage) * (realized - upper)
    } else {
        width
    })
}

/// Pinball loss of a single quantile forecast at level `q`.
pub fn pinball_loss(quantile: f64, realized: f64, q: f64) -> Result<f64> {
    check_coverage(q)?;
    Ok(if realized < quantile {
        (1.0 - q) * (quantile - realized)
    } else {
        q * (realized - quantile)
    })
}

/// Pinball loss averaged over the 99 percentile levels.
pub fn pinball_score(quantiles: &[f64], realized: f64) -> Result<f64> {
    if quantiles.len() != QUANTILE_COUNT {
        return Err(Error::param(format!(
            "expected {QUANTILE_COUNT} quantiles, got {}",
            quantiles.len()
        )));
    }
    let mut total = 0.0;
    for (i, &qv) in quantiles.iter().enumerate() {
        total += pinball_loss(qv, realized, (i + 1) as f64 / 100.0)?;
    }
    Ok(total / QUANTILE_COUNT as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonScore {
    pub variant: Variant,
    pub horizon: usize,
    pub forecasts: usize,
    /// One entry per level in `COVERAGES`.
    pub coverage: Vec<Coverage>,
    pub ws50: f64,
    pub ws90: f64,
    pub plf: f64,
}

/// Horizon averages of every `HorizonScore` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub forecasts: usize,
    pub coverage: Vec<Coverage>,
    pub ws50: f64,
    pub ws90: f64,
    pub plf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_horizon: Vec<HorizonScore>,
    pub summary: Vec<VariantSummary>,
}

fn score_group(variant: Variant, horizon: usize, recs: &[&ForecastRecord]) -> Result<HorizonScore> {
    let realized: Vec<f64> = recs.iter().map(|r| r.realized).collect();
    let bounds_at = |c: f64| recs.iter().map(|r| r.interval(c)).collect::<Result<Vec<_>>>();
    let mut coverage = Vec::with_capacity(COVERAGES.len());
    for c in COVERAGES {
        coverage.push(unconditional_coverage(&bounds_at(c)?, &realized, c)?);
    }
    let mean_winkler = |c: f64| -> Result<f64> {
        let mut total = 0.0;
        for (&(l, u), &y) in bounds_at(c)?.iter().zip(&realized) {
            total += winkler_score(l, u, y, c)?;
        }
        Ok(total / recs.len() as f64)
    };
    let mut plf = 0.0;
    for r in recs {
        plf += pinball_score(&r.quantiles, r.realized)?;
    }
    Ok(HorizonScore {
        variant,
        horizon,
        forecasts: recs.len(),
        coverage,
        ws50: mean_winkler(0.5)?,
        ws90: mean_winkler(0.9)?,
        plf: plf / recs.len() as f64,
    })
}

/// Scores every (variant, horizon) group and averages over horizons.
pub fn aggregate_report(records: &[ForecastRecord]) -> Result<EvaluationReport> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut groups: BTreeMap<(Variant, usize), Vec<&ForecastRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.variant, r.horizon)).or_default().push(r);
    }
    let per_horizon = groups
        .into_iter()
        .map(|((v, h), recs)| score_group(v, h, &recs))
        .collect::<Result<Vec<_>>>()?;

    let mut summary = Vec::new();
    for variant in Variant::ALL {
        let rows: Vec<&HorizonScore> = per_horizon.iter().filter(|s| s.variant == variant).collect();
        if rows.is_empty() {
            continue;
        }
        let k = rows.len() as f64;
        let avg = |f: &dyn Fn(&HorizonScore) -> f64| rows.iter().map(|s| f(s)).sum::<f64>() / k;
        let coverage = COVERAGES
            .iter()
            .enumerate()
            .map(|(ci, &level)| Coverage {
                level,
                rate: avg(&|s| s.coverage[ci].rate),
                error: avg(&|s| s.coverage[ci].error),
                abs_error: avg(&|s| s.coverage[ci].abs_error),
            })
            .collect();
        summary.push(VariantSummary {
            variant,
            forecasts: rows.iter().map(|s| s.forecasts).sum(),
            coverage,
            ws50: avg(&|s| s.ws50),
            ws90: avg(&|s| s.ws90),
            plf: avg(&|s| s.plf),
        });
    }
    Ok(EvaluationReport { per_horizon, summary })
}

fn level_tag(level: f64) -> String {
    format!("{}", (level * 100.0).round() as u32)
}

impl EvaluationReport {
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// Horizon-averaged table: one row per score, one column per variant.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "metric")?;
        for s in &self.summary {
            write!(out, ",{}", s.variant)?;
        }
        writeln!(out)?;
        let mut row = |name: String, f: &dyn Fn(&VariantSummary) -> f64| -> Result<()> {
            write!(out, "{name}")?;
            for s in &self.summary {
                write!(out, ",{}", f(s))?;
            }
            writeln!(out)?;
            Ok(())
        };
        for (ci, &level) in COVERAGES.iter().enumerate() {
            let tag = level_tag(level);
            row(format!("UC{tag}"), &|s| s.coverage[ci].rate)?;
            row(format!("UC{tag}_error"), &|s| s.coverage[ci].error)?;
            row(format!("UC{tag}_abs_error"), &|s| s.coverage[ci].abs_error)?;
        }
        row("WS50".into(), &|s| s.ws50)?;
        row("WS90".into(), &|s| s.ws90)?;
        row("PLF".into(), &|s| s.plf)?;
        Ok(())
    }

    /// Per-horizon curves, one row per (variant, horizon).
    pub fn write_horizon_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "variant,horizon,forecasts")?;
        for level in COVERAGES {
            write!(out, ",uc{}", level_tag(level))?;
        }
        writeln!(out, ",ws50,ws90,plf")?;
        for s in &self.per_horizon {
            write!(out, "{},{},{}", s.variant, s.horizon, s.forecasts)?;
            for c in &s.coverage {
                write!(out, ",{}", c.rate)?;
            }
            writeln!(out, ",{},{},{}", s.ws50, s.ws90, s.plf)?;
        }
        Ok(())
    }

    pub fn summary_for(&self, variant: Variant) -> Option<&VariantSummary> {
        self.summary.iter().find(|s| s.variant == variant)
    }
}
