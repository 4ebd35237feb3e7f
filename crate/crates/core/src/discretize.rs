//! Boolean-reasoning discretization of real-valued condition attributes.
//!
//! Every candidate cut is a Boolean variable; a cut discerns an object pair
//! when the two values fall on different sides of it. The minimal set of
//! cuts that discerns every pair of differently-labelled objects is a set
//! cover problem, solved here with the greedy "most new pairs" rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::DecisionTable;

/// Sorted cut points of one attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeCuts {
    pub attribute: String,
    pub cuts: Vec<f64>,
}

/// Per-attribute cut points, one entry per condition attribute in table order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutSet(pub Vec<AttributeCuts>);

impl CutSet {
    pub fn attributes(&self) -> &[AttributeCuts] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|a| a.cuts.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// All cuts as `(attribute index, value)` in lexicographic order.
    pub fn flat(&self) -> Vec<(usize, f64)> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(a, ac)| ac.cuts.iter().map(move |&c| (a, c)))
            .collect()
    }

    /// Interval index of `value` on `attribute`: the number of cuts below it.
    pub fn interval(&self, attribute: usize, value: f64) -> usize {
        self.0[attribute].cuts.iter().filter(|&&c| c < value).count()
    }

    /// Replace every value of `table` with its interval index.
    pub fn apply(&self, table: &DecisionTable) -> Result<DecisionTable> {
        if self.0.len() != table.attribute_count() {
            return Err(Error::Dimension {
                expected: table.attribute_count(),
                actual: self.0.len(),
            });
        }
        let values = table
            .system()
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(a, v)| v.map(|x| self.interval(a, x) as f64))
                    .collect()
            })
            .collect();
        table.with_values(values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Midpoints between consecutive distinct values whose neighbouring objects
/// include at least one pair with different decisions.
pub fn candidate_cuts(table: &DecisionTable) -> CutSet {
    let per_attr = (0..table.attribute_count())
        .map(|a| {
            let mut pairs: Vec<(f64, usize)> = (0..table.object_count())
                .filter_map(|o| table.value(o, a).map(|v| (v, table.decision(o))))
                .collect();
            pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            // Group into distinct values with the set of classes seen there.
            let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
            for (v, d) in pairs {
                match groups.last_mut() {
                    Some((last, classes)) if *last == v => {
                        if !classes.contains(&d) {
                            classes.push(d);
                        }
                    }
                    _ => groups.push((v, vec![d])),
                }
            }
            let cuts = groups
                .windows(2)
                .filter(|w| {
                    let (l, r) = (&w[0].1, &w[1].1);
                    l.iter().any(|x| r.iter().any(|y| x != y))
                })
                .map(|w| (w[0].0 + w[1].0) / 2.0)
                .collect();
            AttributeCuts {
                attribute: table.attributes()[a].clone(),
                cuts,
            }
        })
        .collect();
    CutSet(per_attr)
}

/// Output of [`rsbr_discretize`].
#[derive(Debug, Clone)]
pub struct Discretization {
    /// Interval indices in place of the original values.
    pub table: DecisionTable,
    /// The selected cut subset.
    pub cuts: CutSet,
    /// Differently-labelled object pairs no candidate cut can discern.
    pub inconsistent_pairs: Vec<(usize, usize)>,
}

/// Does the cut `(attribute, value)` separate objects `i` and `j`?
pub fn cut_discerns(table: &DecisionTable, attribute: usize, cut: f64, i: usize, j: usize) -> bool {
    match (table.value(i, attribute), table.value(j, attribute)) {
        (Some(x), Some(y)) => (x < cut) != (y < cut),
        _ => false,
    }
}

/// Object pairs `(i, j)`, `i < j`, with different decisions.
pub fn conflicting_pairs(table: &DecisionTable) -> Vec<(usize, usize)> {
    let n = table.object_count();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if table.decision(i) != table.decision(j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Select a small subset of `cuts` that still discerns every differently
/// labelled pair the full candidate set discerns, then discretize `table`.
pub fn rsbr_discretize(table: &DecisionTable, cuts: &CutSet) -> Result<Discretization> {
    if table.system().has_missing() {
        return Err(Error::MalformedTable(
            "discretization requires a complete table".into(),
        ));
    }
    if cuts.attributes().len() != table.attribute_count() {
        return Err(Error::Dimension {
            expected: table.attribute_count(),
            actual: cuts.attributes().len(),
        });
    }
    let pairs = conflicting_pairs(table);
    let flat = cuts.flat();

    // Incidence: which pairs each cut discerns.
    let incidence: Vec<Vec<u32>> = flat
        .iter()
        .map(|&(a, c)| {
            pairs
                .iter()
                .enumerate()
                .filter(|(_, &(i, j))| cut_discerns(table, a, c, i, j))
                .map(|(p, _)| p as u32)
                .collect()
        })
        .collect();

    let mut coverable = vec![false; pairs.len()];
    for list in &incidence {
        for &p in list {
            coverable[p as usize] = true;
        }
    }
    let inconsistent_pairs: Vec<(usize, usize)> = pairs
        .iter()
        .zip(&coverable)
        .filter(|(_, &c)| !c)
        .map(|(&p, _)| p)
        .collect();
    if !inconsistent_pairs.is_empty() {
        log::warn!(
            "{} differently-labelled object pair(s) cannot be discerned by any cut; excluded from the cover",
            inconsistent_pairs.len()
        );
    }

    // Greedy cover; ties go to the earliest cut in (attribute, value) order.
    let mut covered: Vec<bool> = coverable.iter().map(|c| !c).collect();
    let mut remaining = coverable.iter().filter(|&&c| c).count();
    let mut chosen = vec![false; flat.len()];
    while remaining > 0 {
        let mut best: Option<(usize, usize)> = None;
        for (k, list) in incidence.iter().enumerate() {
            if chosen[k] {
                continue;
            }
            let gain = list.iter().filter(|&&p| !covered[p as usize]).count();
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((k, gain));
            }
        }
        let (k, gain) = best.expect("coverable pairs always have a discerning cut");
        chosen[k] = true;
        for &p in &incidence[k] {
            covered[p as usize] = true;
        }
        remaining -= gain;
    }

    let mut selected: Vec<AttributeCuts> = cuts
        .attributes()
        .iter()
        .map(|ac| AttributeCuts {
            attribute: ac.attribute.clone(),
            cuts: Vec::new(),
        })
        .collect();
    for (k, &(a, c)) in flat.iter().enumerate() {
        if chosen[k] {
            selected[a].cuts.push(c);
        }
    }
    let selected = CutSet(selected);
    Ok(Discretization {
        table: selected.apply(table)?,
        cuts: selected,
        inconsistent_pairs,
    })
}
