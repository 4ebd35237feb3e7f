use super::dnf::absorb;
use super::{discernibility_matrix, AttrSet};
use crate::error::{Error, Result};
use crate::table::DecisionTable;

/// Exact reduct computation is limited to this many condition attributes.
pub const MAX_REDUCT_ATTRIBUTES: usize = 20;

/// All minimal attribute sets hitting every clause, i.e. the prime
/// implicants of the monotone CNF `∧ ∨(clause)`.
///
/// Recursive branch-and-propagate: singleton clauses are forced, otherwise
/// the first attribute of the smallest clause is either taken or excluded.
pub fn minimal_transversals(clauses: &[AttrSet]) -> Vec<AttrSet> {
    let mut out = Vec::new();
    search(absorb(clauses.to_vec()), AttrSet::EMPTY, &mut out);
    let mut out = absorb(out);
    out.sort_unstable_by_key(|s| (s.len(), s.0));
    out
}

fn search(clauses: Vec<AttrSet>, chosen: AttrSet, out: &mut Vec<AttrSet>) {
    let mut chosen = chosen;
    let mut clauses = clauses;
    // Unit propagation.
    loop {
        if clauses.iter().any(|c| c.is_empty()) {
            return;
        }
        let units = clauses
            .iter()
            .filter(|c| c.len() == 1)
            .fold(AttrSet::EMPTY, |acc, &c| acc.union(c));
        if units.is_empty() {
            break;
        }
        chosen = chosen.union(units);
        clauses.retain(|c| !c.intersects(units));
    }
    let Some(&pivot_clause) = clauses.iter().min_by_key(|c| (c.len(), c.0)) else {
        out.push(chosen);
        return;
    };
    let a = pivot_clause.first().expect("nonempty clause");

    // Take `a`.
    let taken: Vec<AttrSet> = clauses.iter().copied().filter(|c| !c.contains(a)).collect();
    search(taken, chosen.with(a), out);

    // Exclude `a` from every remaining clause.
    let excluded: Vec<AttrSet> = clauses.iter().map(|c| c.without(a)).collect();
    search(absorb(excluded), chosen, out);
}

/// Reducts of the table's condition attributes: minimal subsets inducing
/// the same indiscernibility partition as the full attribute set.
pub fn reducts(table: &DecisionTable) -> Result<Vec<AttrSet>> {
    let m = table.attribute_count();
    if m > MAX_REDUCT_ATTRIBUTES {
        return Err(Error::AttributeBudget {
            attributes: m,
            limit: MAX_REDUCT_ATTRIBUTES,
        });
    }
    let matrix = discernibility_matrix(table)?;
    Ok(minimal_transversals(&matrix.clauses()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> AttrSet {
        AttrSet::from_iter(items.iter().copied())
    }

    #[test]
    fn identical_objects_have_one_empty_reduct() {
        let t = DecisionTable::from_rows(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0]; 3],
            vec![1, 2, 1],
        )
        .unwrap();
        assert_eq!(reducts(&t).unwrap(), vec![AttrSet::EMPTY]);
    }

    #[test]
    fn forced_attribute() {
        // a1 separates everything; a2 separates only objects 0 and 2.
        let t = DecisionTable::from_rows(
            vec!["a1".into(), "a2".into()],
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 1.0]],
            vec![1, 2, 3],
        )
        .unwrap();
        assert_eq!(reducts(&t).unwrap(), vec![set(&[0])]);
    }

    #[test]
    fn textbook_transversals() {
        // (a ∨ b)(b ∨ c)(a ∨ c) → ab, ac, bc
        let r = minimal_transversals(&[set(&[0, 1]), set(&[1, 2]), set(&[0, 2])]);
        assert_eq!(r, vec![set(&[0, 1]), set(&[0, 2]), set(&[1, 2])]);
    }

    #[test]
    fn attribute_budget() {
        let names: Vec<String> = (0..21).map(|i| format!("a{i}")).collect();
        let t = DecisionTable::from_rows(names, vec![vec![0.0; 21]], vec![1]).unwrap();
        assert!(matches!(reducts(&t), Err(Error::AttributeBudget { .. })));
    }
}
