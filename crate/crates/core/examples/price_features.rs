//! Features and quantile labels from a daily price series, then the full
//! pipeline on that series.
//!
//! `cargo run --release --example price_features -- [prices.csv]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rufmine::features::{derive_features, PriceSeries};
use rufmine::pipeline::{run_pipeline, PipelineConfig, Source};

fn main() -> rufmine::Result<()> {
    let dir = std::env::temp_dir().join("rufmine-prices");
    std::fs::create_dir_all(&dir)?;
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            // A geometric random walk with slowly drifting volatility.
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let shock = Normal::new(0.0, 1.0).expect("unit normal");
            let mut close = 100.0;
            let mut closes = Vec::new();
            for t in 0..750 {
                let vol = 0.01 + 0.008 * (t as f64 / 60.0).sin().abs();
                close *= 1.0 + 0.0003 + vol * shock.sample(&mut rng);
                closes.push(close);
            }
            let series = PriceSeries::from_closes(&closes)?;
            let mut w = csv::Writer::from_path(dir.join("prices.csv"))?;
            w.write_record(["date", "close"])?;
            for bar in series.bars() {
                w.write_record([bar.date.to_string(), bar.close.to_string()])?;
            }
            w.flush()?;
            dir.join("prices.csv")
        }
    };
    let series = PriceSeries::load(&path)?;
    let table = derive_features(&series, 5, 1, 3)?;
    println!("{} bars -> {} labelled days", series.len(), table.object_count());
    let cfg = PipelineConfig {
        source: Source::Prices,
        input: Some(path),
        classes: 3,
        train_fraction: 0.5,
        out: dir.join("run"),
        ..PipelineConfig::default()
    };
    let run = run_pipeline(&cfg)?;
    print!("{}", run.rules.to_text());
    println!(
        "network test accuracy {:.1}%, rule accuracy {:?}, uncovered {:.1}%",
        run.metrics.network_accuracy.test, run.metrics.accuracy, run.metrics.uncovered
    );
    Ok(())
}
