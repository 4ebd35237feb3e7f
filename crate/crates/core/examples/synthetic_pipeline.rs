//! Full pipeline on six Gaussian blobs, model S against the dense baseline.
//!
//! `cargo run --release --example synthetic_pipeline -- [seed]`

use rufmine::pipeline::{run_pipeline, ModelKind, PipelineConfig};

fn main() -> rufmine::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let dir = std::env::temp_dir().join(format!("rufmine-synthetic-{seed}"));
    for model in [ModelKind::S, ModelKind::F] {
        let cfg = PipelineConfig {
            seed,
            model,
            out: dir.join(model.to_string()),
            ..PipelineConfig::default()
        };
        let start = std::time::Instant::now();
        let run = run_pipeline(&cfg)?;
        let m = &run.metrics;
        println!(
            "model {model}: rule accuracy {:.1}%, network test {:.1}%, rules {}, fidelity {:.1}%, uncovered {:.1}%, links {}, {:.1}s",
            m.accuracy.unwrap_or(0.0),
            m.network_accuracy.test,
            m.rules,
            m.fidelity,
            m.uncovered,
            m.present_links,
            start.elapsed().as_secs_f64()
        );
        if model == ModelKind::S {
            print!("{}", run.rules.to_text());
        }
    }
    println!("artifacts under {}", dir.display());
    Ok(())
}
