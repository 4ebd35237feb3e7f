//! Gaussian-blob decision tables for experiments without market data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::table::DecisionTable;

/// Level pattern of class `k`: first the six permutations of `(0, 1, 2)`,
/// then the remaining points of `{0, 1, 2}³`.
fn class_levels(classes: usize) -> Result<Vec<[usize; 3]>> {
    let mut out: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if !out.contains(&[a, b, c]) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    if classes < 2 || classes > out.len() {
        return Err(Error::Parameter(format!("synthetic data supports 2..=27 classes, got {classes}")));
    }
    out.truncate(classes);
    Ok(out)
}

/// `per_class` points per class in three features with unit spread around
/// centres spaced `2·separation` apart per level. Each class sits at a
/// different low/medium/high combination, so two features usually name it.
pub fn make_synthetic(per_class: usize, classes: usize, separation: f64, seed: u64) -> Result<DecisionTable> {
    if per_class == 0 || !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::Parameter(format!(
            "need per_class ≥ 1 and a finite separation ≥ 0 (got {per_class}, {separation})"
        )));
    }
    let levels = class_levels(classes)?;
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(per_class * classes);
    let mut labels = Vec::with_capacity(per_class * classes);
    for (k, lv) in levels.iter().enumerate() {
        for _ in 0..per_class {
            rows.push(
                lv.iter()
                    .map(|&level| 2.0 * separation * level as f64 + noise.sample(&mut rng))
                    .collect(),
            );
            labels.push(k + 1);
        }
    }
    DecisionTable::from_rows(vec!["f1".into(), "f2".into(), "f3".into()], rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let a = make_synthetic(10, 6, 2.0, 9).unwrap();
        assert_eq!(a.object_count(), 60);
        assert_eq!(a.class_count(), 6);
        assert_eq!(a.dense_rows(), make_synthetic(10, 6, 2.0, 9).unwrap().dense_rows());
        assert_ne!(a.dense_rows(), make_synthetic(10, 6, 2.0, 10).unwrap().dense_rows());
        assert!(make_synthetic(10, 1, 2.0, 0).is_err());
    }

    #[test]
    fn class_means_follow_levels() {
        let t = make_synthetic(400, 3, 3.0, 1).unwrap();
        let rows = t.dense_rows();
        let mean = |k: usize, j: usize| {
            let v: Vec<f64> = rows.iter().zip(t.decisions()).filter(|(_, &d)| d == k).map(|(r, _)| r[j]).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!((mean(1, 0) - 0.0).abs() < 0.2);
        assert!((mean(1, 2) - 12.0).abs() < 0.2);
        assert!((mean(3, 0) - 6.0).abs() < 0.2);
    }
}
