//! Classification and rule-base quality measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{ExtractedRule, RuleBase};
use crate::network::ModularNetwork;

/// `counts[i][j]`: patterns of actual class `i + 1` predicted as `j + 1`.
/// Patterns no rule fired on are kept apart in `no_fire`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
    pub no_fire: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            counts: vec![vec![0; classes]; classes],
            no_fire: vec![0; classes],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let l = counts.len();
        if let Some(row) = counts.iter().find(|r| r.len() != l) {
            return Err(Error::Dimension {
                expected: l,
                actual: row.len(),
            });
        }
        Ok(Self {
            counts,
            no_fire: vec![0; l],
        })
    }

    /// Tally `(actual, predicted)` label pairs; `None` predictions go to
    /// the no-fire counter. Labels are 1-based.
    pub fn tally(classes: usize, pairs: impl IntoIterator<Item = (usize, Option<usize>)>) -> Result<Self> {
        let mut m = Self::new(classes);
        for (actual, predicted) in pairs {
            let bad = |k: usize| k == 0 || k > classes;
            if bad(actual) || predicted.is_some_and(bad) {
                return Err(Error::Parameter(format!(
                    "label outside 1..={classes}: actual {actual}, predicted {predicted:?}"
                )));
            }
            match predicted {
                Some(p) => m.counts[actual - 1][p - 1] += 1,
                None => m.no_fire[actual - 1] += 1,
            }
        }
        Ok(m)
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn column_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }
}

/// Percent correct per class (absent for empty rows) and overall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub overall: Option<f64>,
    pub per_class: Vec<Option<f64>>,
}

pub fn accuracy(m: &ConfusionMatrix) -> Accuracy {
    let l = m.classes();
    let per_class = (0..l)
        .map(|i| {
            let n = m.row_sum(i);
            (n > 0).then(|| 100.0 * m.counts[i][i] as f64 / n as f64)
        })
        .collect();
    let total = m.total();
    let diag: u64 = (0..l).map(|i| m.counts[i][i]).sum();
    Accuracy {
        overall: (total > 0).then(|| 100.0 * diag as f64 / total as f64),
        per_class,
    }
}

/// `n_ii / column sum` per class; absent for empty columns.
pub fn users_accuracy(m: &ConfusionMatrix) -> Vec<Option<f64>> {
    (0..m.classes())
        .map(|j| {
            let col = m.column_sum(j);
            (col > 0).then(|| m.counts[j][j] as f64 / col as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kappa {
    pub overall: Option<f64>,
    pub per_class: Vec<Option<f64>>,
}

/// Chance-corrected agreement. `K_i = (n·n_ii − n_i·n'_i)/(n·n_i − n_i·n'_i)`
/// with row sums `n_i` and column sums `n'_i`; the overall value pools the
/// numerators and denominators of the defined classes.
pub fn kappa(m: &ConfusionMatrix) -> Kappa {
    let n = m.total() as f64;
    let mut num_sum = 0.0;
    let mut den_sum = 0.0;
    let per_class = (0..m.classes())
        .map(|i| {
            let ni = m.row_sum(i) as f64;
            let nc = m.column_sum(i) as f64;
            let num = n * m.counts[i][i] as f64 - ni * nc;
            let den = n * ni - ni * nc;
            (den != 0.0).then(|| {
                num_sum += num;
                den_sum += den;
                num / den
            })
        })
        .collect();
    Kappa {
        overall: (den_sum != 0.0).then(|| num_sum / den_sum),
        per_class,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionIndex {
    pub value: f64,
    /// All off-diagonal cells are zero, which forces the maximal value.
    pub degenerate: bool,
}

/// Number of off-diagonal cells at or above the off-diagonal mean, divided
/// by the class count.
pub fn confusion_index(m: &ConfusionMatrix) -> Result<ConfusionIndex> {
    let l = m.classes();
    if l < 2 {
        return Err(Error::Parameter("confusion index needs at least two classes".into()));
    }
    let off: Vec<u64> = (0..l)
        .flat_map(|i| (0..l).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m.counts[i][j])
        .collect();
    let mean = off.iter().sum::<u64>() as f64 / off.len() as f64;
    let count = off.iter().filter(|&&v| v as f64 >= mean).count();
    let degenerate = off.iter().all(|&v| v == 0);
    if degenerate {
        log::info!("confusion index is degenerate: no off-diagonal confusion");
    }
    Ok(ConfusionIndex {
        value: count as f64 / l as f64,
        degenerate,
    })
}

/// Percent of patterns on which no rule fires.
pub fn uncovered(rules: &[ExtractedRule], patterns: &[Vec<f64>], crispness: f64) -> Result<f64> {
    if patterns.is_empty() {
        return Err(Error::EmptyTable("no test patterns".into()));
    }
    let misses = patterns
        .iter()
        .filter(|x| !rules.iter().any(|r| r.fires(x, crispness)))
        .count();
    Ok(100.0 * misses as f64 / patterns.len() as f64)
}

/// Percent of patterns on which the rule base and the network's arg-max
/// agree. A pattern no rule fires on agrees only when no network output
/// exceeds 1/2.
pub fn fidelity(net: &ModularNetwork, rules: &RuleBase, patterns: &[Vec<f64>], crispness: f64) -> Result<f64> {
    if patterns.is_empty() {
        return Err(Error::EmptyTable("no test patterns".into()));
    }
    let mut agree = 0usize;
    for x in patterns {
        let out = net.forward(x)?;
        let ok = match rules.infer(x, crispness) {
            Some(class) => out.winner() == class,
            None => out.is_unclassifiable(),
        };
        agree += ok as usize;
    }
    Ok(100.0 * agree as f64 / patterns.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certainty {
    pub mean: Option<f64>,
    pub min: Option<f64>,
}

pub fn certainty(rules: &[ExtractedRule]) -> Certainty {
    if rules.is_empty() {
        return Certainty { mean: None, min: None };
    }
    Certainty {
        mean: Some(rules.iter().map(|r| r.cf).sum::<f64>() / rules.len() as f64),
        min: Some(rules.iter().map(|r| r.cf).fold(f64::INFINITY, f64::min)),
    }
}

/// Mean-difference statistic for two samples with unequal variances.
pub fn behrens_fisher(mean1: f64, sd1: f64, n1: usize, mean2: f64, sd2: f64, n2: usize) -> Result<f64> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::Parameter(format!("sample sizes must be at least 2, got {n1} and {n2}")));
    }
    if sd1 < 0.0 || sd2 < 0.0 {
        return Err(Error::Parameter("standard deviations must be non-negative".into()));
    }
    let var = sd1 * sd1 / n1 as f64 + sd2 * sd2 / n2 as f64;
    if var == 0.0 {
        return Err(Error::UndefinedStatistic("both standard deviations are zero".into()));
    }
    Ok((mean1 - mean2) / var.sqrt())
}

/// Network accuracy on the training and test splits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkAccuracy {
    pub train: f64,
    pub test: f64,
}

/// Contents of `metrics.json`. Rule-based figures are measured on the test
/// split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    pub accuracy: Option<f64>,
    pub accuracy_per_class: Vec<Option<f64>>,
    pub users_accuracy: Vec<Option<f64>>,
    pub kappa: Kappa,
    pub uncovered: f64,
    pub rules: usize,
    pub cpu_sec: Option<f64>,
    pub conf: ConfusionIndex,
    pub fidelity: f64,
    pub certainty: Certainty,
    pub network_accuracy: NetworkAccuracy,
    pub present_links: usize,
    pub confusion: ConfusionMatrix,
}

/// Inputs for [`MetricsReport::evaluate`].
#[derive(Debug, Clone, Copy)]
pub struct Evaluation<'a> {
    pub model: &'a str,
    pub network: &'a ModularNetwork,
    pub rules: &'a RuleBase,
    pub train: (&'a [Vec<f64>], &'a [usize]),
    pub test: (&'a [Vec<f64>], &'a [usize]),
    pub crispness: f64,
    pub classes: usize,
    pub cpu_sec: Option<f64>,
}

fn network_accuracy(net: &ModularNetwork, xs: &[Vec<f64>], ys: &[usize]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyTable("no patterns".into()));
    }
    let compiled = net.compile();
    let classes = net.output_classes();
    let hits = xs
        .iter()
        .zip(ys)
        .filter(|(x, &y)| classes[compiled.winner_index(x)] == y)
        .count();
    Ok(100.0 * hits as f64 / xs.len() as f64)
}

impl MetricsReport {
    pub fn evaluate(e: Evaluation<'_>) -> Result<Self> {
        let (test_x, test_y) = e.test;
        let predictions = test_x.iter().map(|x| e.rules.infer(x, e.crispness));
        let confusion = ConfusionMatrix::tally(e.classes, test_y.iter().copied().zip(predictions))?;
        let acc = accuracy(&confusion);
        Ok(Self {
            model: e.model.to_string(),
            accuracy: acc.overall,
            accuracy_per_class: acc.per_class,
            users_accuracy: users_accuracy(&confusion),
            kappa: kappa(&confusion),
            uncovered: uncovered(&e.rules.rules, test_x, e.crispness)?,
            rules: e.rules.len(),
            cpu_sec: e.cpu_sec.map(|s| (s * 100.0).round() / 100.0),
            conf: confusion_index(&confusion)?,
            fidelity: fidelity(e.network, e.rules, test_x, e.crispness)?,
            certainty: certainty(&e.rules.rules),
            network_accuracy: NetworkAccuracy {
                train: network_accuracy(e.network, e.train.0, e.train.1)?,
                test: network_accuracy(e.network, test_x, test_y)?,
            },
            present_links: e.network.present_links(),
            confusion,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
