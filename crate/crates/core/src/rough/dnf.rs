use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AttrSet;
use crate::error::{Error, Result};
use crate::literal::Literal;

/// Result of converting a monotone CNF to its absorbed DNF.
#[derive(Debug, Clone, PartialEq)]
pub struct CnfConversion {
    /// Conjuncts, none a superset of another, sorted by size then bits.
    pub terms: Vec<AttrSet>,
    /// Number of candidate conjuncts dropped for exceeding the length cap.
    pub cap_hits: usize,
}

/// Keep only the inclusion-minimal sets.
pub(crate) fn absorb(mut sets: Vec<AttrSet>) -> Vec<AttrSet> {
    sets.sort_unstable_by_key(|s| (s.len(), s.0));
    sets.dedup();
    let mut kept: Vec<AttrSet> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| k.is_subset_of(s)) {
            kept.push(s);
        }
    }
    kept
}

/// Multiply out `∧ clauses` (each clause a disjunction of attributes) into a
/// disjunction of conjunctions, absorbing after every distribution step.
///
/// An empty clause list is the constant true and yields one empty conjunct.
/// An empty clause makes the formula unsatisfiable and yields no conjuncts.
/// Conjuncts longer than `max_len` are discarded and counted in `cap_hits`.
pub fn cnf_to_dnf(clauses: &[AttrSet], max_len: Option<usize>) -> CnfConversion {
    let clauses = absorb(clauses.to_vec());
    let mut terms = vec![AttrSet::EMPTY];
    let mut cap_hits = 0;
    for &clause in &clauses {
        let mut next = Vec::with_capacity(terms.len() * clause.len());
        for &t in &terms {
            if t.intersects(clause) {
                next.push(t);
                continue;
            }
            for a in clause.iter() {
                let grown = t.with(a);
                if max_len.is_some_and(|cap| grown.len() > cap) {
                    cap_hits += 1;
                } else {
                    next.push(grown);
                }
            }
        }
        terms = absorb(next);
        if terms.is_empty() {
            break;
        }
    }
    if cap_hits > 0 {
        log::warn!("CNF to DNF: {cap_hits} conjunct(s) over the length cap were dropped");
    }
    CnfConversion { terms, cap_hits }
}

/// A conjunction of literals, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Conjunct(Vec<Literal>);

impl Conjunct {
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort_unstable();
        literals.dedup();
        Self(literals)
    }

    pub fn positive(attrs: AttrSet) -> Self {
        Self(attrs.iter().map(Literal::pos).collect())
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset_of(&self, other: &Conjunct) -> bool {
        self.0.iter().all(|l| other.0.binary_search(l).is_ok())
    }

    /// True if some attribute appears both plain and negated.
    pub fn is_contradictory(&self) -> bool {
        self.0
            .windows(2)
            .any(|w| w[0].attribute == w[1].attribute && w[0].negated != w[1].negated)
    }

    pub fn holds(&self, input: &[f64], crispness: f64) -> bool {
        self.0.iter().all(|l| l.holds(input, crispness))
    }

    pub fn max_attribute(&self) -> Option<usize> {
        self.0.iter().map(|l| l.attribute).max()
    }
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "TRUE");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Conjunct {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s);
        if s.trim() == "TRUE" {
            return Ok(Conjunct(Vec::new()));
        }
        let lits = s
            .split('&')
            .map(str::parse)
            .collect::<Result<Vec<Literal>>>()?;
        Ok(Conjunct::new(lits))
    }
}

/// A disjunction of conjuncts in canonical, absorbed form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DnfFormula(Vec<Conjunct>);

impl DnfFormula {
    /// Canonicalise: drop contradictory conjuncts, absorb supersets, order by
    /// length then literals.
    pub fn new(conjuncts: Vec<Conjunct>) -> Self {
        let mut cs: Vec<Conjunct> = conjuncts.into_iter().filter(|c| !c.is_contradictory()).collect();
        cs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        cs.dedup();
        let mut kept: Vec<Conjunct> = Vec::with_capacity(cs.len());
        for c in cs {
            if !kept.iter().any(|k| k.is_subset_of(&c)) {
                kept.push(c);
            }
        }
        Self(kept)
    }

    pub fn from_terms(terms: &[AttrSet]) -> Self {
        Self::new(terms.iter().map(|&t| Conjunct::positive(t)).collect())
    }

    pub fn conjuncts(&self) -> &[Conjunct] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn literal_count(&self) -> usize {
        self.0.iter().map(Conjunct::len).sum()
    }

    pub fn holds(&self, input: &[f64], crispness: f64) -> bool {
        self.0.iter().any(|c| c.holds(input, crispness))
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "FALSE");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            if c.len() > 1 {
                write!(f, "({c})")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for DnfFormula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "FALSE" {
            return Ok(DnfFormula(Vec::new()));
        }
        let cs = s
            .split('|')
            .map(str::parse)
            .collect::<Result<Vec<Conjunct>>>()?;
        Ok(DnfFormula::new(cs))
    }
}
