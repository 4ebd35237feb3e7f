//! Rough-set machinery: discernibility matrices, reducts, and per-class
//! dependency rules over linguistic attributes.

mod dnf;
mod reduct;
mod rules;

pub use dnf::{cnf_to_dnf, CnfConversion, Conjunct, DnfFormula};
pub use reduct::{minimal_transversals, reducts, MAX_REDUCT_ATTRIBUTES};
pub use rules::{dependency_rules, DependencyRule, DependencyRuleSet, RuleOptions, ThresholdPolicy};

use std::fmt;

use crate::error::{Error, Result};
use crate::table::DecisionTable;

/// A set of attribute indices (at most 128) as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AttrSet(pub u128);

impl AttrSet {
    pub const MAX: usize = 128;

    pub const EMPTY: AttrSet = AttrSet(0);

    pub fn singleton(a: usize) -> Self {
        AttrSet(1u128 << a)
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items.into_iter().fold(AttrSet::EMPTY, |s, a| s.with(a))
    }

    pub fn with(self, a: usize) -> Self {
        AttrSet(self.0 | (1u128 << a))
    }

    pub fn without(self, a: usize) -> Self {
        AttrSet(self.0 & !(1u128 << a))
    }

    pub fn contains(self, a: usize) -> bool {
        self.0 >> a & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        AttrSet(self.0 | other.0)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..Self::MAX).filter(move |&a| self.contains(a))
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }
}

impl fmt::Debug for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Lower-triangular matrix of attribute sets, one cell per object pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscernibilityMatrix {
    n: usize,
    cells: Vec<AttrSet>,
}

impl DiscernibilityMatrix {
    fn index(i: usize, j: usize) -> usize {
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        hi * (hi - 1) / 2 + lo
    }

    /// Build from a pairwise function evaluated on `j < i`.
    pub fn build(n: usize, mut cell: impl FnMut(usize, usize) -> AttrSet) -> Self {
        let mut cells = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..n {
            for j in 0..i {
                cells.push(cell(i, j));
            }
        }
        Self { n, cells }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Cell for the pair; symmetric, empty on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> AttrSet {
        if i == j {
            AttrSet::EMPTY
        } else {
            self.cells[Self::index(i, j)]
        }
    }

    /// Distinct nonempty cells: the clauses of the discernibility function.
    pub fn clauses(&self) -> Vec<AttrSet> {
        let mut out: Vec<AttrSet> = self.cells.iter().copied().filter(|c| !c.is_empty()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// `c_ij` = attributes on which objects `i` and `j` take different values.
pub fn discernibility_matrix(table: &DecisionTable) -> Result<DiscernibilityMatrix> {
    let m = table.attribute_count();
    if m > AttrSet::MAX {
        return Err(Error::AttributeBudget {
            attributes: m,
            limit: AttrSet::MAX,
        });
    }
    if table.system().has_missing() {
        return Err(Error::MalformedTable("discernibility needs a complete table".into()));
    }
    Ok(DiscernibilityMatrix::build(table.object_count(), |i, j| {
        AttrSet::from_iter((0..m).filter(|&a| table.value(i, a) != table.value(j, a)))
    }))
}

/// `c_ij` = attributes whose membership values differ by more than `threshold`.
pub fn fuzzy_discernibility_matrix(rows: &[Vec<f64>], threshold: f64) -> Result<DiscernibilityMatrix> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Parameter(format!(
            "discernibility threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let m = rows.first().map_or(0, Vec::len);
    if m > AttrSet::MAX {
        return Err(Error::AttributeBudget {
            attributes: m,
            limit: AttrSet::MAX,
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::Dimension {
            expected: m,
            actual: bad.len(),
        });
    }
    Ok(DiscernibilityMatrix::build(rows.len(), |i, j| {
        AttrSet::from_iter((0..m).filter(|&a| (rows[i][a] - rows[j][a]).abs() > threshold))
    }))
}
