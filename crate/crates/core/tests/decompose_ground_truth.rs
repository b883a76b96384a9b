//! Decomposition of synthetic prices whose components are known.

use chrono::NaiveDate;
use spotfou::filter::{decompose, FilterConfig, PipelineOrder};
use spotfou::forecast::default_params;
use spotfou::gev::GevParams;
use spotfou::hawkes::HawkesParams;
use spotfou::series::HolidayCalendar;
use spotfou::synthetic::{generate, SyntheticSpec};

const SEEDS: u64 = 20;

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Mean correlation of (f_s, f_l, y_j, y_f) with their truths over `SEEDS` four-year series.
fn recovery(hawkes: HawkesParams, marks: GevParams, sigma: f64, order: PipelineOrder) -> [f64; 4] {
    let mut params = default_params();
    params.fou.sigma = sigma;
    params.jump.hawkes = hawkes;
    params.jump.mark_dist = marks;
    let cfg = FilterConfig { order, ..FilterConfig::default() };
    let mut mean = [0.0; 4];
    for seed in 0..SEEDS {
        let mut spec = SyntheticSpec::new(NaiveDate::from_ymd_opt(2010, 1, 1).unwrap(), 1460, params.clone(), seed);
        spec.trend_amplitude = 15.0;
        // Realistic price level: the reversion estimator needs prices well clear of zero.
        for w in spec.weekly.iter_mut() {
            *w += 25.0;
        }
        let s = generate(&spec, &HolidayCalendar::italian()).unwrap();
        let d = decompose(&s.series, &cfg).unwrap();
        let c = [
            corr(&d.f_s, &s.seasonal),
            corr(&d.f_l, &s.trend),
            corr(&d.y_j, &s.x2),
            corr(&d.y_f, &s.x1),
        ];
        for (m, v) in mean.iter_mut().zip(c) {
            *m += v / SEEDS as f64;
        }
    }
    mean
}

#[test]
fn components_match_their_truths() {
    let mean = recovery(
        HawkesParams::new(0.02, 0.0, 0.0).unwrap(),
        GevParams::new(60.0, 2.0, 0.2).unwrap(),
        6.0,
        PipelineOrder::JumpsFirst,
    );
    for (name, c) in ["f_s", "f_l", "y_j", "y_f"].iter().zip(mean) {
        assert!(c > 0.9, "{name}: mean correlation {c:.3}");
    }
}

#[test]
fn trend_first_degrades_trend_and_base() {
    let hawkes = HawkesParams::new(0.02, 0.05, 0.08).unwrap();
    let marks = GevParams::new(40.0, 2.0, 0.2).unwrap();
    let jumps_first = recovery(hawkes, marks, 4.0, PipelineOrder::JumpsFirst);
    let trend_first = recovery(hawkes, marks, 4.0, PipelineOrder::TrendFirst);
    assert!(
        trend_first[1] < jumps_first[1] - 0.01,
        "f_l: {:.3} vs {:.3}",
        trend_first[1],
        jumps_first[1]
    );
    assert!(
        trend_first[3] < jumps_first[3] - 0.01,
        "y_f: {:.3} vs {:.3}",
        trend_first[3],
        jumps_first[3]
    );
}
