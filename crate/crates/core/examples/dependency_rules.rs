//! Per-class dependency rules from fuzzified training data.

use rufmine::pipeline::{knowledge_phase, prepare, PipelineConfig};
use rufmine::synth::make_synthetic;

fn main() -> rufmine::Result<()> {
    let cfg = PipelineConfig::default();
    let table = make_synthetic(cfg.per_class, cfg.classes, cfg.separation, cfg.data_seed)?;
    let prep = prepare(&table, &cfg)?;
    let k = knowledge_phase(&prep, &cfg)?;
    print!("{}", k.rules.to_text());
    let literals: usize = k.rules.rules.iter().map(|r| r.formula.literal_count()).sum();
    println!("{} rules, {literals} literals, {} conjunct(s) capped", k.rules.rules.len(), k.rules.cap_hits);
    Ok(())
}
