//! Daily price series, calendar labelling and CSV ingestion.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate};

use crate::error::{Error, Result};

/// Label assigned to public holidays, regardless of weekday.
pub const HOLIDAY_LABEL: u8 = 8;

/// Holiday set used to assign the eighth day label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolidayCalendar {
    fixed: BTreeSet<(u32, u32)>,
    easter_monday: bool,
    extra: BTreeSet<NaiveDate>,
}

impl Default for HolidayCalendar {
    fn default() -> Self {
        Self::italian()
    }
}

impl HolidayCalendar {
    /// Italian national holidays: ten fixed dates plus Easter Monday.
    pub fn italian() -> Self {
        let fixed = [
            (1, 1),
            (1, 6),
            (4, 25),
            (5, 1),
            (6, 2),
            (8, 15),
            (11, 1),
            (12, 8),
            (12, 25),
            (12, 26),
        ]
        .into_iter()
        .collect();
        HolidayCalendar {
            fixed,
            easter_monday: true,
            extra: BTreeSet::new(),
        }
    }

    /// A calendar with no holidays at all.
    pub fn empty() -> Self {
        HolidayCalendar {
            fixed: BTreeSet::new(),
            easter_monday: false,
            extra: BTreeSet::new(),
        }
    }

    /// Calendar consisting of exactly the given dates.
    pub fn from_dates<I: IntoIterator<Item = NaiveDate>>(dates: I) -> Self {
        HolidayCalendar {
            extra: dates.into_iter().collect(),
            ..Self::empty()
        }
    }

    pub fn with_extra<I: IntoIterator<Item = NaiveDate>>(mut self, dates: I) -> Self {
        self.extra.extend(dates);
        self
    }

    /// Reads one ISO date per line; blank lines and `#` comments are ignored.
    /// The resulting calendar replaces the built-in set.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut dates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let d = NaiveDate::parse_from_str(line, "%Y-%m-%d").map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("bad date {line:?}: {e}"),
            })?;
            dates.push(d);
        }
        Ok(Self::from_dates(dates))
    }

    pub fn is_holiday(&self, date: NaiveDate) -> bool {
        if self.fixed.contains(&(date.month(), date.day())) || self.extra.contains(&date) {
            return true;
        }
        self.easter_monday && easter_sunday(date.year()).succ_opt() == Some(date)
    }
}

/// Gregorian Easter Sunday by Gauss's computus.
pub fn easter_sunday(year: i32) -> NaiveDate {
    let a = year.rem_euclid(19);
    let b = year.rem_euclid(4);
    let c = year.rem_euclid(7);
    let k = year.div_euclid(100);
    let p = (13 + 8 * k).div_euclid(25);
    let q = k.div_euclid(4);
    let m = (15 - p + k - q).rem_euclid(30);
    let n = (4 + k - q).rem_euclid(7);
    let d = (19 * a + m).rem_euclid(30);
    let e = (2 * b + 4 * c + 6 * d + n).rem_euclid(7);
    let march_day = 22 + d + e;
    let (month, mut day) = if march_day <= 31 {
        (3, march_day)
    } else {
        (4, d + e - 9)
    };
    if month == 4 {
        if d == 29 && e == 6 {
            day = 19;
        } else if d == 28 && e == 6 && (11 * m + 11).rem_euclid(30) < 19 {
            day = 18;
        }
    }
    NaiveDate::from_ymd_opt(year, month as u32, day as u32).expect("computus yields a valid date")
}

/// 1..7 for Monday..Sunday, 8 for holidays.
pub fn day_label(date: NaiveDate, calendar: &HolidayCalendar) -> u8 {
    if calendar.is_holiday(date) {
        HOLIDAY_LABEL
    } else {
        date.weekday().number_from_monday() as u8
    }
}

/// Trailing moving average with a shrinking window over the first `window - 1` points.
pub fn moving_average(values: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidWindow);
    }
    // Direct window sums: O(n w) with small w, and no running-sum drift.
    let out = (0..values.len())
        .map(|t| {
            let lo = (t + 1).saturating_sub(window);
            values[lo..=t].iter().sum::<f64>() / (t + 1 - lo) as f64
        })
        .collect();
    Ok(out)
}

/// A gap-free daily price series with calendar labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    start_date: NaiveDate,
    values: Vec<f64>,
    labels: Vec<u8>,
}

impl PriceSeries {
    pub fn new(start_date: NaiveDate, values: Vec<f64>, calendar: &HolidayCalendar) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.len() < 2 {
            return Err(Error::insufficient(2, values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite price at index {i}")));
        }
        let labels = (0..values.len())
            .map(|i| day_label(start_date + Days::new(i as u64), calendar))
            .collect();
        Ok(PriceSeries {
            start_date,
            values,
            labels,
        })
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + Days::new(index as u64)
    }

    /// Sub-series `[start, end)`, relabelled with the same labels.
    pub fn slice(&self, start: usize, end: usize) -> Result<PriceSeries> {
        if end > self.len() || start >= end {
            return Err(Error::param(format!(
                "slice {start}..{end} out of range for length {}",
                self.len()
            )));
        }
        if end - start < 2 {
            return Err(Error::insufficient(2, end - start));
        }
        Ok(PriceSeries {
            start_date: self.date_at(start),
            values: self.values[start..end].to_vec(),
            labels: self.labels[start..end].to_vec(),
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "date,price")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", self.date_at(i).format("%Y-%m-%d"), v)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Parses a `date,price` CSV. Rows may appear in any order but must cover
/// every day between the first and last date exactly once.
pub fn read_csv<R: Read>(input: R, calendar: &HolidayCalendar) -> Result<PriceSeries> {
    let reader = BufReader::new(input);
    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    let mut header_seen = false;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim().trim_start_matches('\u{feff}');
        if line.is_empty() {
            continue;
        }
        if !header_seen {
            header_seen = true;
            let cols: Vec<_> = line.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
            if cols != ["date", "price"] {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header `date,price`, found {line:?}"),
                });
            }
            continue;
        }
        let mut parts = line.split(',');
        let (Some(d), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected two columns".into(),
            });
        };
        let date = NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad date {d:?}: {e}"),
        })?;
        let price: f64 = p.trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad price {p:?}: {e}"),
        })?;
        if !price.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: "price is not finite".into(),
            });
        }
        rows.push((date, price, line_no));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        let (prev, _, _) = w[0];
        let (next, _, line) = w[1];
        if next == prev {
            return Err(Error::Parse {
                line,
                message: format!("duplicate date {next}"),
            });
        }
        let expected = prev.succ_opt().expect("date overflow");
        if next != expected {
            return Err(Error::Gap(expected));
        }
    }
    let start = rows[0].0;
    PriceSeries::new(start, rows.into_iter().map(|r| r.1).collect(), calendar)
}

pub fn load_csv(path: impl AsRef<Path>, calendar: &HolidayCalendar) -> Result<PriceSeries> {
    read_csv(fs::File::open(path)?, calendar)
}
