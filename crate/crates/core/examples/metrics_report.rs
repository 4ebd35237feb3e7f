//! Confusion-matrix measures and the Behrens-Fisher statistic.

use rufmine::metrics::{accuracy, behrens_fisher, confusion_index, kappa, users_accuracy, ConfusionMatrix};

fn main() -> rufmine::Result<()> {
    // Actual class in rows, predicted class in columns.
    let m = ConfusionMatrix::from_counts(vec![vec![4, 1], vec![1, 4]])?;
    let a = accuracy(&m);
    println!("accuracy {:?} per class {:?}", a.overall, a.per_class);
    println!("user's accuracy {:?}", users_accuracy(&m));
    let k = kappa(&m);
    println!("kappa {:?} per class {:?}", k.overall, k.per_class);
    let c = confusion_index(&m)?;
    println!("conf {:.3} (degenerate: {})", c.value, c.degenerate);
    let v = behrens_fisher(88.6, 0.26, 10, 86.6, 0.46, 10)?;
    println!("Behrens-Fisher v = {v:.2}");
    Ok(())
}
