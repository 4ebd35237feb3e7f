//! Daily price series, derived features, class labels and train-only scaling.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::DecisionTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub close: f64,
    #[serde(default)]
    pub open: Option<f64>,
    #[serde(default)]
    pub high: Option<f64>,
    #[serde(default)]
    pub low: Option<f64>,
    #[serde(default)]
    pub volume: Option<f64>,
}

/// Dates strictly increasing, closes positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    bars: Vec<PriceBar>,
}

impl PriceSeries {
    pub fn new(bars: Vec<PriceBar>) -> Result<Self> {
        for (i, b) in bars.iter().enumerate() {
            if !(b.close > 0.0 && b.close.is_finite()) {
                return Err(Error::PriceSeries(format!("close on {} is {}", b.date, b.close)));
            }
            if i > 0 && bars[i - 1].date >= b.date {
                return Err(Error::PriceSeries(format!(
                    "dates not strictly increasing at {} after {}",
                    b.date,
                    bars[i - 1].date
                )));
            }
        }
        Ok(Self { bars })
    }

    /// Closes only, dated consecutively from 2000-01-01.
    pub fn from_closes(closes: &[f64]) -> Result<Self> {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        Self::new(
            closes
                .iter()
                .zip(start.iter_days())
                .map(|(&close, date)| PriceBar {
                    date,
                    close,
                    open: None,
                    high: None,
                    low: None,
                    volume: None,
                })
                .collect(),
        )
    }

    /// CSV with header `date,close[,open,high,low,volume]`, ISO-8601 dates.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let bars = rdr.deserialize().collect::<std::result::Result<Vec<PriceBar>, _>>()?;
        Self::new(bars)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }
}

pub const FEATURE_NAMES: [&str; 3] = ["ret_k", "sma_ratio", "volatility"];

/// Unscaled features per day `t` with `k ≤ t < len − h`:
/// the k-day return, close over its k-day simple moving average, and the
/// population standard deviation of the last k daily returns. The class is
/// the rank-quantile bucket (1..=l) of the forward h-day return.
pub fn derive_features(series: &PriceSeries, k: usize, h: usize, l: usize) -> Result<DecisionTable> {
    if k == 0 || h == 0 || l < 2 {
        return Err(Error::Parameter(format!("need k ≥ 1, h ≥ 1, l ≥ 2 (got {k}, {h}, {l})")));
    }
    let c = series.closes();
    if c.len() <= k + h {
        return Err(Error::InsufficientHistory {
            available: c.len(),
            needed: k + h,
        });
    }
    let mut rows = Vec::new();
    let mut forward = Vec::new();
    for t in k..c.len() - h {
        let ret = c[t] / c[t - k] - 1.0;
        let sma = c[t + 1 - k..=t].iter().sum::<f64>() / k as f64;
        let daily: Vec<f64> = (t + 1 - k..=t).map(|s| c[s] / c[s - 1] - 1.0).collect();
        let mean = daily.iter().sum::<f64>() / k as f64;
        let vol = (daily.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / k as f64).sqrt();
        rows.push(vec![ret, c[t] / sma, vol]);
        forward.push(c[t + h] / c[t] - 1.0);
    }
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        if rows.iter().all(|r| r[j] == rows[0][j]) {
            log::warn!("derived feature `{name}` is constant over the series");
        }
    }
    let labels = quantile_labels(&forward, l);
    DecisionTable::from_rows(FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), rows, labels)
}

/// Rank-based quantile buckets `1..=l`; ties broken by position.
pub fn quantile_labels(values: &[f64], l: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut labels = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        labels[i] = rank * l / n + 1;
    }
    labels
}

/// Per-feature min-max scaling fitted on one table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::EmptyTable("cannot fit a scaler".into()))?;
        let mut min = first.clone();
        let mut max = first.clone();
        for r in rows {
            if r.len() != min.len() {
                return Err(Error::Dimension {
                    expected: min.len(),
                    actual: r.len(),
                });
            }
            for (j, &v) in r.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    /// Maps the fitted range onto `[0, 1]`; constant features map to 0.
    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| {
                let span = self.max[j] - self.min[j];
                if span > 0.0 {
                    (v - self.min[j]) / span
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn transform_table(&self, table: &DecisionTable) -> Result<DecisionTable> {
        let values = table
            .dense_rows()
            .iter()
            .map(|r| self.transform(r).into_iter().map(Some).collect())
            .collect();
        table.with_values(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_features() {
        let s = PriceSeries::from_closes(&[10.0; 20]).unwrap();
        let t = derive_features(&s, 5, 1, 2).unwrap();
        for r in t.dense_rows() {
            assert_eq!(r, vec![0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn compound_growth_return() {
        let closes: Vec<f64> = (0..30).map(|i| 100.0 * 1.01f64.powi(i)).collect();
        let t = derive_features(&PriceSeries::from_closes(&closes).unwrap(), 5, 1, 3).unwrap();
        assert!((t.value(0, 0).unwrap() - (1.01f64.powi(5) - 1.0)).abs() < 1e-12);
        assert!(t.value(0, 2).unwrap() < 1e-12);
    }

    #[test]
    fn quantile_buckets_are_balanced() {
        let v: Vec<f64> = (0..97).map(|i| ((i * 37) % 101) as f64).collect();
        let labels = quantile_labels(&v, 6);
        let mut counts = [0usize; 6];
        for &l in &labels {
            counts[l - 1] += 1;
        }
        let ideal = 97.0 / 6.0;
        assert!(counts.iter().all(|&c| (c as f64 - ideal).abs() <= 1.0));
    }

    #[test]
    fn validation() {
        assert!(PriceSeries::from_closes(&[1.0, -1.0]).is_err());
        let csv = "date,close\n2020-01-02,5\n2020-01-01,6\n";
        assert!(matches!(PriceSeries::read_csv(csv.as_bytes()), Err(Error::PriceSeries(_))));
        let csv = "date,close,volume\n2020-01-01,5,100\n2020-01-02,6,\n";
        assert_eq!(PriceSeries::read_csv(csv.as_bytes()).unwrap().len(), 2);
        let short = PriceSeries::from_closes(&[1.0; 6]).unwrap();
        assert!(matches!(derive_features(&short, 5, 1, 2), Err(Error::InsufficientHistory { .. })));
    }

    #[test]
    fn scaler_uses_fit_rows_only() {
        let s = MinMaxScaler::fit(&[vec![0.0, 5.0], vec![2.0, 5.0]]).unwrap();
        assert_eq!(s.transform(&[1.0, 5.0]), vec![0.5, 0.0]);
        assert_eq!(s.transform(&[4.0, 9.0]), vec![2.0, 0.0]);
    }
}
