//! Two-stage modular evolution on a small synthetic problem.

use rufmine::evolution::GaConfig;
use rufmine::pipeline::{knowledge_phase, prepare, train_phase, PipelineConfig};
use rufmine::synth::make_synthetic;

fn main() -> rufmine::Result<()> {
    let cfg = PipelineConfig {
        classes: 3,
        train_fraction: 0.2,
        ga: GaConfig {
            generations: 40,
            ..GaConfig::default()
        },
        ..PipelineConfig::default()
    };
    let table = make_synthetic(60, cfg.classes, 2.0, 5)?;
    let prep = prepare(&table, &cfg)?;
    let k = knowledge_phase(&prep, &cfg)?;
    let (trained, log) = train_phase(&prep, &k, &cfg)?;
    let fit = trained.fitness.expect("modular evolution reports fitness");
    println!(
        "best F {:.4}: f1 {:.4}, f2 {:.4}, {} of {} links present",
        fit.fitness, fit.f1, fit.f2, fit.present_links, fit.possible_links
    );
    print!("{}", String::from_utf8_lossy(&log.to_csv()?).lines().take(6).map(|l| format!("{l}\n")).collect::<String>());
    Ok(())
}
