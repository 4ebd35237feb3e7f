//! Fuzzy front end: π-function input encoding into low/medium/high
//! memberships and distance-based fuzzy class-membership targets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::literal::Term;
use crate::table::DecisionTable;

/// Centre and radius of one π-function, in feature units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiParams {
    #[serde(rename = "c")]
    pub center: f64,
    #[serde(rename = "lambda")]
    pub radius: f64,
}

impl PiParams {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::Parameter(format!(
                "π-function needs a finite centre and positive radius (c={center}, λ={radius})"
            )));
        }
        Ok(Self { center, radius })
    }
}

/// π membership: 1 at the centre, 0.5 at half the radius, 0 from the radius on.
pub fn pi_membership(x: f64, p: PiParams) -> f64 {
    let d = (x - p.center).abs();
    let r = p.radius;
    if d >= r {
        0.0
    } else if d >= r / 2.0 {
        let t = 1.0 - d / r;
        2.0 * t * t
    } else {
        let t = d / r;
        1.0 - 2.0 * t * t
    }
}

/// The low/medium/high π-functions of one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureTerms {
    #[serde(rename = "L")]
    pub low: PiParams,
    #[serde(rename = "M")]
    pub medium: PiParams,
    #[serde(rename = "H")]
    pub high: PiParams,
}

impl FeatureTerms {
    pub fn get(&self, term: Term) -> PiParams {
        match term {
            Term::Low => self.low,
            Term::Medium => self.medium,
            Term::High => self.high,
        }
    }

    pub fn get_mut(&mut self, term: Term) -> &mut PiParams {
        match term {
            Term::Low => &mut self.low,
            Term::Medium => &mut self.medium,
            Term::High => &mut self.high,
        }
    }
}

/// Input fuzzification parameters for `n` features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FuzzyEncoding {
    features: Vec<FeatureTerms>,
}

impl FuzzyEncoding {
    pub fn new(features: Vec<FeatureTerms>) -> Result<Self> {
        for (j, f) in features.iter().enumerate() {
            for t in Term::ALL {
                let p = f.get(t);
                PiParams::new(p.center, p.radius)
                    .map_err(|e| Error::Parameter(format!("feature {}: {e}", j + 1)))?;
            }
            if !(f.low.center <= f.medium.center && f.medium.center <= f.high.center) {
                return Err(Error::Parameter(format!(
                    "feature {}: term centres must be ordered L <= M <= H",
                    j + 1
                )));
            }
        }
        Ok(Self { features })
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[FeatureTerms] {
        &self.features
    }

    /// Map an `n`-feature pattern to `[L_1, M_1, H_1, L_2, ...]`.
    pub fn fuzzify(&self, pattern: &[f64]) -> Result<Vec<f64>> {
        if pattern.len() != self.features.len() {
            return Err(Error::Dimension {
                expected: self.features.len(),
                actual: pattern.len(),
            });
        }
        Ok(pattern
            .iter()
            .zip(&self.features)
            .flat_map(|(&x, f)| Term::ALL.map(|t| pi_membership(x, f.get(t))))
            .collect())
    }

    pub fn fuzzify_all(&self, patterns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        patterns.iter().map(|p| self.fuzzify(p)).collect()
    }
}

/// Linear-interpolation percentile of sorted data, `q` in [0, 1].
pub(crate) fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Initial encoding from training data: quartile centres, radii chosen so
/// neighbouring terms cross at membership 0.5.
///
/// With gaps `g1 = c_M - c_L` and `g2 = c_H - c_M`, the medium radius is
/// `min(g1, g2)` and the outer radii are `2 g1 - λ_M` and `2 g2 - λ_M`, so
/// both crossings sit exactly at half radius of each term.
pub fn init_encoding(train: &DecisionTable) -> Result<FuzzyEncoding> {
    if train.object_count() == 0 {
        return Err(Error::EmptyTable("training table".into()));
    }
    let mut features = Vec::with_capacity(train.attribute_count());
    for a in 0..train.attribute_count() {
        let mut col = train.column(a);
        col.sort_by(f64::total_cmp);
        let (min, max) = (col[0], col[col.len() - 1]);
        let range = max - min;
        if !(range > 0.0) {
            return Err(Error::DegenerateFeature(train.attributes()[a].clone()));
        }
        let mut c = [percentile(&col, 0.25), percentile(&col, 0.5), percentile(&col, 0.75)];
        let tiny = 1e-9 * range;
        if c[1] - c[0] <= tiny || c[2] - c[1] <= tiny {
            // Heavily tied data: fall back to evenly spaced centres.
            c = [min + 0.25 * range, min + 0.5 * range, min + 0.75 * range];
        }
        let (g1, g2) = (c[1] - c[0], c[2] - c[1]);
        let mid = g1.min(g2);
        features.push(FeatureTerms {
            low: PiParams::new(c[0], 2.0 * g1 - mid)?,
            medium: PiParams::new(c[1], mid)?,
            high: PiParams::new(c[2], 2.0 * g2 - mid)?,
        });
    }
    FuzzyEncoding::new(features)
}

/// Per-class mean and spread of the exact (unfuzzified) training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStatistics {
    /// `means[k][j]`: mean of feature `j` in class `k + 1`.
    pub means: Vec<Vec<f64>>,
    /// Standard deviations, strictly positive.
    pub spreads: Vec<Vec<f64>>,
}

impl ClassStatistics {
    /// Population mean/standard deviation per class. A zero spread is replaced
    /// by 1e-6 of the feature's global range.
    pub fn from_table(train: &DecisionTable, classes: usize) -> Result<Self> {
        let n = train.attribute_count();
        let rows = train.dense_rows();
        let by_class = train.objects_by_class();
        let global_range: Vec<f64> = (0..n)
            .map(|j| {
                let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                });
                hi - lo
            })
            .collect();
        let mut means = Vec::with_capacity(classes);
        let mut spreads = Vec::with_capacity(classes);
        for k in 1..=classes {
            let members = by_class.get(&k).ok_or(Error::EmptyClass(k))?;
            let count = members.len() as f64;
            let mean: Vec<f64> = (0..n)
                .map(|j| members.iter().map(|&o| rows[o][j]).sum::<f64>() / count)
                .collect();
            let spread: Vec<f64> = (0..n)
                .map(|j| {
                    let var = members
                        .iter()
                        .map(|&o| (rows[o][j] - mean[j]).powi(2))
                        .sum::<f64>()
                        / count;
                    let sd = var.sqrt();
                    if sd > 0.0 {
                        sd
                    } else {
                        let floor = 1e-6 * global_range[j];
                        if floor > 0.0 {
                            floor
                        } else {
                            1e-6
                        }
                    }
                })
                .collect();
            means.push(mean);
            spreads.push(spread);
        }
        Ok(Self { means, spreads })
    }

    pub fn class_count(&self) -> usize {
        self.means.len()
    }

    /// Weighted distance of `pattern` from class `k` (0-based).
    pub fn weighted_distance(&self, pattern: &[f64], k: usize) -> f64 {
        pattern
            .iter()
            .zip(&self.means[k])
            .zip(&self.spreads[k])
            .map(|((x, o), v)| ((x - o) / v).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Denominational and exponential fuzzy generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzyGenerators {
    pub f_d: f64,
    pub f_e: f64,
}

impl FuzzyGenerators {
    pub fn new(f_d: f64, f_e: f64) -> Result<Self> {
        if !(f_d > 0.0 && f_e > 0.0) {
            return Err(Error::Parameter(format!(
                "fuzzy generators must be positive (f_d={f_d}, f_e={f_e})"
            )));
        }
        Ok(Self { f_d, f_e })
    }

    /// `f_d` = mean distance of each training pattern from its own class,
    /// `f_e` = 1.
    pub fn initial(train: &DecisionTable, stats: &ClassStatistics) -> Self {
        let rows = train.dense_rows();
        let total: f64 = rows
            .iter()
            .zip(train.decisions())
            .map(|(r, &d)| stats.weighted_distance(r, d - 1))
            .sum();
        let mean = total / rows.len().max(1) as f64;
        let f_d = if mean.is_finite() && mean > 0.0 { mean } else { 1.0 };
        Self { f_d, f_e: 1.0 }
    }
}

/// Membership of `pattern` in every class: `1 / (1 + (z_k / f_d)^f_e)`.
pub fn class_membership(
    pattern: &[f64],
    stats: &ClassStatistics,
    generators: FuzzyGenerators,
) -> Result<Vec<f64>> {
    let n = stats.means.first().map_or(0, Vec::len);
    if pattern.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: pattern.len(),
        });
    }
    Ok((0..stats.class_count())
        .map(|k| {
            let z = stats.weighted_distance(pattern, k);
            1.0 / (1.0 + (z / generators.f_d).powf(generators.f_e))
        })
        .collect())
}

/// Input encoding plus output generators, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyModel {
    pub features: FuzzyEncoding,
    pub generators: FuzzyGenerators,
}
