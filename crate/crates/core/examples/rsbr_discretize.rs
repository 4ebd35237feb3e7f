//! Greedy boolean-reasoning discretization of a continuous table.

use rufmine::discretize::{candidate_cuts, rsbr_discretize};
use rufmine::synth::make_synthetic;

fn main() -> rufmine::Result<()> {
    let table = make_synthetic(15, 3, 1.5, 7)?;
    let candidates = candidate_cuts(&table);
    let d = rsbr_discretize(&table, &candidates)?;
    println!("{} candidate cuts, {} selected", candidates.total(), d.cuts.total());
    for (attr, cut) in d.cuts.flat() {
        println!("  {} < {cut:.3}", table.attributes()[attr]);
    }
    println!("object pairs left undiscerned: {}", d.inconsistent_pairs.len());
    println!("{}", d.cuts.to_json()?);
    Ok(())
}
