//! Runs the 5×2 protocol on the default synthetic dataset with the full and
//! the raw-only feature sets.

use std::time::Instant;

use emgkit::eval::{five_by_two_cv, PipelineConfig};
use emgkit::features::SchemaKind;
use emgkit::io::{generate_synthetic, SynthConfig};

fn main() -> emgkit::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let trials = generate_synthetic(&SynthConfig {
        seed,
        ..SynthConfig::default()
    })?;
    for schema in [SchemaKind::PartA, SchemaKind::RawOnly] {
        let mut cfg = PipelineConfig::default();
        cfg.features.schema = schema;
        cfg.seed = seed;
        let start = Instant::now();
        let report = five_by_two_cv(&trials, &cfg, &mut ())?;
        let selected: Vec<String> = report
            .folds
            .iter()
            .map(|f| f.selected.map_or("-".into(), |s| s.to_string()))
            .collect();
        println!(
            "{schema:?}: mean fold accuracy {:.2}%, overall {:.2}%, selected [{}], {:.1} s",
            report.mean_fold_accuracy,
            report.accuracy,
            selected.join(" "),
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
