//! π-function memberships, the 3n linguistic inputs and class memberships.

use rufmine::fuzzy::{class_membership, init_encoding, pi_membership, ClassStatistics, FuzzyGenerators, PiParams};
use rufmine::synth::make_synthetic;

fn main() -> rufmine::Result<()> {
    let p = PiParams::new(0.5, 0.4)?;
    for x in [0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
        println!("pi({x:.1}; c=0.5, r=0.4) = {:.4}", pi_membership(x, p));
    }
    let train = make_synthetic(20, 3, 2.0, 3)?;
    let enc = init_encoding(&train)?;
    let stats = ClassStatistics::from_table(&train, 3)?;
    let gens = FuzzyGenerators::initial(&train, &stats);
    let row = &train.dense_rows()[0];
    let lit: Vec<String> = enc.fuzzify(row)?.iter().map(|v| format!("{v:.2}")).collect();
    println!("pattern {row:.2?}");
    println!("L1 M1 H1 L2 M2 H2 L3 M3 H3 = {}", lit.join(" "));
    let mu: Vec<String> = class_membership(row, &stats, gens)?.iter().map(|v| format!("{v:.3}")).collect();
    println!("class memberships (f_d={:.3}, f_e={}) = {}", gens.f_d, gens.f_e, mu.join(" "));
    Ok(())
}
