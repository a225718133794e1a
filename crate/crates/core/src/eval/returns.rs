//! Daily returns and the correlation of absolute daily stock returns (CAVDSR).

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;

use super::{pearson, EvalError};

/// Minimum number of common trading days for CAVDSR.
pub const MIN_OVERLAP: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub firm_id: String,
    /// Date of each return (the later of the two closes).
    pub dates: Vec<NaiveDate>,
    pub returns: Vec<f64>,
}

/// Simple returns `p_t / p_{t-1} - 1` over consecutive rows. Dates must be
/// strictly increasing.
pub fn daily_returns(firm_id: &str, prices: &[(NaiveDate, f64)]) -> Result<ReturnSeries, EvalError> {
    if prices.len() < 2 {
        return Err(EvalError::TooShort(firm_id.to_string()));
    }
    if let Some((d, p)) = prices.iter().find(|(_, p)| !(*p > 0.0 && p.is_finite())) {
        return Err(EvalError::NonPositivePrice {
            firm: firm_id.to_string(),
            date: *d,
            price: *p,
        });
    }
    if let Some(w) = prices.windows(2).find(|w| w[1].0 <= w[0].0) {
        return Err(EvalError::UnorderedDates {
            firm: firm_id.to_string(),
            date: w[1].0,
        });
    }
    Ok(ReturnSeries {
        firm_id: firm_id.to_string(),
        dates: prices[1..].iter().map(|(d, _)| *d).collect(),
        returns: prices.windows(2).map(|w| w[1].1 / w[0].1 - 1.0).collect(),
    })
}

/// Pearson correlation of `|r_a|` and `|r_b|` over the dates both series
/// share.
pub fn cavdsr(a: &ReturnSeries, b: &ReturnSeries) -> Result<f64, EvalError> {
    let (mut i, mut j) = (0, 0);
    let (mut xa, mut xb) = (Vec::new(), Vec::new());
    while i < a.dates.len() && j < b.dates.len() {
        match a.dates[i].cmp(&b.dates[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                xa.push(a.returns[i].abs());
                xb.push(b.returns[j].abs());
                i += 1;
                j += 1;
            }
        }
    }
    if xa.len() < MIN_OVERLAP {
        return Err(EvalError::InsufficientOverlap {
            firm_a: a.firm_id.clone(),
            firm_b: b.firm_id.clone(),
            common: xa.len(),
        });
    }
    pearson(&xa, &xb)
}

#[derive(Debug, serde::Deserialize)]
struct PriceRow {
    date: NaiveDate,
    close: f64,
}

/// Reads a `date,close` price file (ISO dates, header required).
pub fn read_prices(path: &Path) -> Result<Vec<(NaiveDate, f64)>, EvalError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| EvalError::csv(path, e))?;
    let headers = r.headers().map_err(|e| EvalError::csv(path, e))?;
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["date", "close"] {
        return Err(EvalError::Format {
            path: path.display().to_string(),
            message: "expected header `date,close`".into(),
        });
    }
    r.deserialize::<PriceRow>()
        .map(|row| row.map(|p| (p.date, p.close)).map_err(|e| EvalError::csv(path, e)))
        .collect()
}

/// Loads `<dir>/<FIRM>.csv` for every price file in `dir`.
pub fn load_return_dir(dir: &Path) -> Result<BTreeMap<String, ReturnSeries>, EvalError> {
    let entries = std::fs::read_dir(dir).map_err(|e| EvalError::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| EvalError::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let Some(firm) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let series = daily_returns(firm, &read_prices(&path)?)?;
        out.insert(firm.to_string(), series);
    }
    Ok(out)
}
