//! Brute-force reference implementations used by the integration tests.
//! Each one is written from the definitions, not from the library code.

#![allow(dead_code)]

use rufmine::rough::{AttrSet, DependencyRuleSet};

/// Every 0/1 vector of length `n`.
pub fn crisp_inputs(n: usize) -> Vec<Vec<f64>> {
    (0..1u32 << n)
        .map(|bits| (0..n).map(|i| f64::from((bits >> i) & 1)).collect())
        .collect()
}

/// Minimal attribute subsets that induce the same indiscernibility
/// partition as all attributes, found by enumerating every subset.
pub fn brute_force_reducts(rows: &[Vec<f64>], attrs: usize) -> Vec<AttrSet> {
    let same_on = |i: usize, j: usize, mask: u32| (0..attrs).all(|a| mask & (1 << a) == 0 || rows[i][a] == rows[j][a]);
    let full = (1u32 << attrs) - 1;
    let preserving: Vec<u32> = (0..=full)
        .filter(|&mask| {
            (0..rows.len()).all(|i| (0..i).all(|j| same_on(i, j, mask) == same_on(i, j, full)))
        })
        .collect();
    let mut minimal: Vec<AttrSet> = preserving
        .iter()
        .filter(|&&m| !preserving.iter().any(|&o| o != m && o & m == o))
        .map(|&m| AttrSet::from_iter((0..attrs).filter(|a| m & (1 << a) != 0)))
        .collect();
    minimal.sort_by_key(|s| s.0);
    minimal
}

/// Evaluate a monotone CNF (clauses of attribute indices) on an assignment.
pub fn cnf_holds(clauses: &[Vec<usize>], x: &[bool]) -> bool {
    clauses.iter().all(|c| c.iter().any(|&a| x[a]))
}

/// Whether a cut `c` on values `u`, `v` separates them.
pub fn cut_separates(c: f64, u: f64, v: f64) -> bool {
    (u < c) != (v < c)
}

/// Smallest number of cuts from `cuts` (as `(attribute, value)`) that
/// separates every pair in `pairs`, by exhaustive search.
pub fn minimum_cut_count(rows: &[Vec<f64>], pairs: &[(usize, usize)], cuts: &[(usize, f64)]) -> usize {
    let k = cuts.len();
    let mut best = usize::MAX;
    for mask in 0u32..(1 << k) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let ok = pairs.iter().all(|&(i, j)| {
            (0..k).any(|c| mask & (1 << c) != 0 && cut_separates(cuts[c].1, rows[i][cuts[c].0], rows[j][cuts[c].0]))
        });
        if ok {
            best = size;
        }
    }
    best
}

/// Per-class truth of the planted rules on a crisp input.
pub fn planted_truth(rules: &DependencyRuleSet, classes: usize, x: &[f64]) -> Vec<bool> {
    (1..=classes)
        .map(|k| rules.rules.iter().filter(|r| r.class == k).any(|r| r.formula.holds(x, 0.5)))
        .collect()
}

/// Measures recomputed by straight counting from label pairs.
pub struct Tally {
    pub accuracy: Vec<Option<f64>>,
    pub overall: Option<f64>,
    pub users: Vec<Option<f64>>,
    pub kappa: Vec<Option<f64>>,
    pub kappa_overall: Option<f64>,
    pub conf: f64,
}

pub fn tally(classes: usize, pairs: &[(usize, usize)]) -> Tally {
    let n = pairs.len() as f64;
    let count = |f: &dyn Fn(&(usize, usize)) -> bool| pairs.iter().filter(|p| f(p)).count() as f64;
    let mut accuracy = Vec::new();
    let mut users = Vec::new();
    let mut kappa = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    for k in 1..=classes {
        let n_i = count(&|p| p.0 == k);
        let n_pred = count(&|p| p.1 == k);
        let n_ic = count(&|p| p.0 == k && p.1 == k);
        accuracy.push((n_i > 0.0).then(|| 100.0 * n_ic / n_i));
        users.push((n_pred > 0.0).then(|| n_ic / n_pred));
        let (a, b) = (n * n_ic - n_i * n_pred, n * n_i - n_i * n_pred);
        if b != 0.0 {
            kappa.push(Some(a / b));
            num += a;
            den += b;
        } else {
            kappa.push(None);
        }
    }
    let correct = count(&|p| p.0 == p.1);
    let mut off = Vec::new();
    for i in 1..=classes {
        for j in 1..=classes {
            if i != j {
                off.push(count(&|p| p.0 == i && p.1 == j));
            }
        }
    }
    let mean = off.iter().sum::<f64>() / off.len() as f64;
    Tally {
        accuracy,
        overall: (n > 0.0).then(|| 100.0 * correct / n),
        users,
        kappa,
        kappa_overall: (den != 0.0).then(|| num / den),
        conf: off.iter().filter(|&&v| v >= mean).count() as f64 / classes as f64,
    }
}

pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0).max(1.0);
    (m, var.sqrt())
}

/// `PASS`/`FAIL` line in a fixed format.
pub fn report(criterion: usize, pass: bool, detail: &str) {
    println!("criterion {criterion:>2}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
}
