use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dnf::{cnf_to_dnf, Conjunct, DnfFormula};
use super::AttrSet;
use crate::error::{Error, Result};
use crate::literal::Literal;

/// How the membership-difference threshold of the fuzzy discernibility
/// relation is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ThresholdPolicy {
    /// Per feature: `factor` times the widest within-class membership range
    /// among the feature's three terms, never below `floor`.
    Adaptive { factor: f64, floor: f64 },
    /// One global threshold.
    Fixed { value: f64 },
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy::Adaptive {
            factor: 0.5,
            floor: 0.1,
        }
    }
}

impl ThresholdPolicy {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ThresholdPolicy::Adaptive { factor, floor } => factor > 0.0 && floor > 0.0 && floor < 1.0,
            ThresholdPolicy::Fixed { value } => value > 0.0 && value < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("threshold policy {self:?} must stay within (0, 1)")))
        }
    }

    /// Per-attribute thresholds for one class table.
    pub fn thresholds(&self, class_rows: &[Vec<f64>]) -> Vec<f64> {
        let m = class_rows.first().map_or(0, Vec::len);
        match *self {
            ThresholdPolicy::Fixed { value } => vec![value; m],
            ThresholdPolicy::Adaptive { factor, floor } => {
                let range = |a: usize| {
                    let (lo, hi) = class_rows
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[a]), hi.max(r[a])));
                    hi - lo
                };
                (0..m)
                    .map(|a| {
                        let base = a - a % 3;
                        let widest = (base..(base + 3).min(m)).map(range).fold(0.0, f64::max);
                        (factor * widest).max(floor).min(0.99)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOptions {
    pub threshold: ThresholdPolicy,
    /// Longest conjunct kept during CNF to DNF conversion.
    pub max_conjunct_len: Option<usize>,
}

impl Default for RuleOptions {
    fn default() -> Self {
        Self {
            threshold: ThresholdPolicy::default(),
            max_conjunct_len: Some(6),
        }
    }
}

/// `formula -> class` with its dependency factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyRule {
    pub class: usize,
    pub formula: DnfFormula,
    pub df: f64,
}

impl fmt::Display for DependencyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{} <- {} ; df={:.3}", self.class, self.formula, self.df)
    }
}

impl FromStr for DependencyRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s
            .split_once("<-")
            .ok_or_else(|| Error::Parse(format!("rule `{s}` lacks `<-`")))?;
        let class: usize = head
            .trim()
            .strip_prefix('c')
            .and_then(|k| k.parse().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::Parse(format!("bad class in `{s}`")))?;
        let (body, df) = match rest.split_once(';') {
            Some((body, tail)) => {
                let df = tail
                    .trim()
                    .strip_prefix("df=")
                    .and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad df in `{s}`")))?;
                (body, df)
            }
            None => (rest, 1.0),
        };
        Ok(DependencyRule {
            class,
            formula: body.parse()?,
            df,
        })
    }
}

/// Dependency rules plus conversion diagnostics.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DependencyRuleSet {
    pub rules: Vec<DependencyRule>,
    /// Conjuncts dropped by the length cap, summed over all objects.
    pub cap_hits: usize,
    /// Classes whose rule came from a fallback because no object of the
    /// class yielded a usable formula.
    pub fallback_classes: Vec<usize>,
}

impl DependencyRuleSet {
    pub fn from_rules(rules: Vec<DependencyRule>) -> Self {
        Self {
            rules,
            ..Self::default()
        }
    }

    pub fn to_text(&self) -> String {
        self.rules.iter().map(|r| format!("{r}\n")).collect()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let rules = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rules(rules))
    }

    pub fn class_count(&self) -> usize {
        self.rules.iter().map(|r| r.class).max().unwrap_or(0)
    }
}

/// Per-class dependency rules from fuzzified training data.
///
/// `per_class[k]` holds the `n_k × 3n` membership rows of class `k + 1`.
/// For each object `x` of a class, every object `y` of another class yields
/// the clause of attributes on which `x` exceeds `y` by more than the
/// class threshold; the conjunction of those clauses is multiplied out into
/// DNF. Objects discernible from every other-class object form the positive
/// region; their DNFs are united into the class rule and
/// `df = |positive region| / n_k`.
pub fn dependency_rules(per_class: &[Vec<Vec<f64>>], options: &RuleOptions) -> Result<DependencyRuleSet> {
    options.threshold.validate()?;
    if let Some(k) = per_class.iter().position(Vec::is_empty) {
        return Err(Error::EmptyClass(k + 1));
    }
    let m = per_class[0][0].len();
    if m > AttrSet::MAX {
        return Err(Error::AttributeBudget {
            attributes: m,
            limit: AttrSet::MAX,
        });
    }
    for rows in per_class {
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::Dimension {
                expected: m,
                actual: bad.len(),
            });
        }
    }

    let mut out = DependencyRuleSet::default();
    for (k, rows) in per_class.iter().enumerate() {
        let th = options.threshold.thresholds(rows);
        let others: Vec<&Vec<f64>> = per_class
            .iter()
            .enumerate()
            .filter(|&(o, _)| o != k)
            .flat_map(|(_, r)| r.iter())
            .collect();

        let mut certain: Vec<Vec<AttrSet>> = Vec::new();
        let mut uncertain: Vec<Vec<AttrSet>> = Vec::new();
        for x in rows {
            let cells: Vec<AttrSet> = others
                .iter()
                .map(|y| AttrSet::from_iter((0..m).filter(|&a| x[a] - y[a] > th[a])))
                .collect();
            let in_positive_region = cells.iter().all(|c| !c.is_empty());
            let clauses: Vec<AttrSet> = cells.into_iter().filter(|c| !c.is_empty()).collect();
            if in_positive_region {
                certain.push(clauses);
            } else {
                uncertain.push(clauses);
            }
        }
        let df = certain.len() as f64 / rows.len() as f64;

        let mut terms = union_terms(&certain, options, &mut out.cap_hits);
        if terms.is_empty() {
            terms = union_terms(&uncertain, options, &mut out.cap_hits);
        }
        let formula = if terms.is_empty() {
            out.fallback_classes.push(k + 1);
            log::warn!("class {}: no discerning formula; using its most typical term", k + 1);
            DnfFormula::new(vec![Conjunct::new(vec![Literal::pos(most_typical_attribute(
                rows, &others, m,
            ))])])
        } else {
            DnfFormula::from_terms(&terms)
        };
        out.rules.push(DependencyRule {
            class: k + 1,
            formula,
            df,
        });
    }
    Ok(out)
}

fn union_terms(objects: &[Vec<AttrSet>], options: &RuleOptions, cap_hits: &mut usize) -> Vec<AttrSet> {
    let mut terms = Vec::new();
    for clauses in objects.iter().filter(|c| !c.is_empty()) {
        let conv = cnf_to_dnf(clauses, options.max_conjunct_len);
        *cap_hits += conv.cap_hits;
        terms.extend(conv.terms.into_iter().filter(|t| !t.is_empty()));
    }
    super::dnf::absorb(terms)
}

/// Attribute whose mean membership exceeds the other classes' mean the most.
fn most_typical_attribute(rows: &[Vec<f64>], others: &[&Vec<f64>], m: usize) -> usize {
    let mean = |it: &mut dyn Iterator<Item = f64>, n: usize| it.sum::<f64>() / n.max(1) as f64;
    (0..m)
        .map(|a| {
            let inside = mean(&mut rows.iter().map(|r| r[a]), rows.len());
            let outside = mean(&mut others.iter().map(|r| r[a]), others.len());
            (a, inside - outside)
        })
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}
