//! Discernibility matrix, reducts and CNF-to-DNF conversion on a toy table.

use rufmine::rough::{cnf_to_dnf, discernibility_matrix, reducts};
use rufmine::table::DecisionTable;

fn main() -> rufmine::Result<()> {
    let table = DecisionTable::from_rows(
        vec!["outlook".into(), "humidity".into(), "wind".into(), "temp".into()],
        vec![
            vec![0.0, 1.0, 0.0, 2.0],
            vec![0.0, 1.0, 1.0, 2.0],
            vec![1.0, 1.0, 0.0, 2.0],
            vec![2.0, 0.0, 0.0, 1.0],
            vec![2.0, 0.0, 1.0, 0.0],
        ],
        vec![1, 1, 2, 2, 1],
    )?;
    let matrix = discernibility_matrix(&table)?;
    println!("non-empty discernibility cells:");
    for i in 0..matrix.size() {
        for j in 0..i {
            let cell = matrix.get(i, j);
            if !cell.is_empty() {
                println!("  ({i}, {j}): {:?}", cell.iter().collect::<Vec<_>>());
            }
        }
    }
    for r in reducts(&table)? {
        let names: Vec<&str> = r.iter().map(|a| table.attributes()[a].as_str()).collect();
        println!("reduct: {names:?}");
    }
    let dnf = cnf_to_dnf(&matrix.clauses(), None);
    println!("prime implicants of the discernibility function: {}", dnf.terms.len());
    Ok(())
}
