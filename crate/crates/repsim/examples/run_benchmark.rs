//! The full benchmark pipeline on files: build a small layer-depth suite
//! (trained models, probed layers, npy + suite.json on disk), load it back,
//! and score every measure by rank correlation with probe accuracy.
//!
//! ```bash
//! cargo run --example run_benchmark
//! ```

use repsim::bench::{run_benchmark, CorrelationOutcome};
use repsim::io::load_suite;
use repsim::synth::{build_suite, SuitePreset, SynthConfig};

fn main() -> repsim::Result<()> {
    let out_dir = std::env::temp_dir().join("repsim-example-suite");
    let mut config = SynthConfig {
        input_dim: 16,
        n_classes: 8,
        n_train: 2500,
        n_eval: 600,
        hidden_widths: vec![24, 24, 24],
        train_seeds: vec![1, 2, 3, 4, 5],
        ..SynthConfig::default()
    };
    config.data.mean_scale = 3.0;
    config.sgd.epochs = 120;

    let built = build_suite(&config, SuitePreset::LayerDepth, &out_dir)?;
    println!(
        "built {} entries under {}",
        built.suite.entries.len(),
        out_dir.display()
    );
    for entry in &built.suite.entries {
        println!(
            "  {} layer {}  probe accuracy {:.3}",
            entry.model_id, entry.layer_id, entry.functionality
        );
    }

    let (_, suite) = load_suite(&built.suite_path)?;
    let report = run_benchmark(&suite)?;
    println!(
        "\nreference: {} layer {} (highest probe accuracy)",
        report.reference_model_id, report.reference_layer_id
    );
    println!("rank correlation of d(reference, entry) with |delta accuracy|:");
    for (metric, outcome) in &report.correlations {
        match outcome {
            CorrelationOutcome::Defined(rc) => println!(
                "  {metric:<11} rho {:+.3}  tau {:+.3}  (n = {})",
                rc.rho, rc.tau, rc.n
            ),
            CorrelationOutcome::Degenerate { reason } => {
                println!("  {metric:<11} undefined: {reason}")
            }
        }
    }
    println!("\nsuite fingerprint: {}", report.suite_fingerprint);
    println!("\nnote: linear CKA is dominated by the largest singular values and");
    println!("often scores near zero on mini-suites like this one; the shipped");
    println!("layer-depth preset (width 64, 6 seeds; see the acceptance tests)");
    println!("is calibrated so all five measures correlate positively.");
    Ok(())
}
