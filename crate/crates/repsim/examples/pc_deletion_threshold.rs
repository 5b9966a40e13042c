//! Sensitivity to principal-component deletion: delete the smallest
//! components of a layer representation, track each measure's distance
//! curve, and find where it first exceeds the cross-seed baseline.
//!
//! ```bash
//! cargo run --example pc_deletion_threshold
//! ```

use repsim::bench::{cross_seed_baseline, detection_threshold, normalize_matrix};
use repsim::perturb::PcDeletionSpec;
use repsim::repcore::{CenteringAxis, Matrix};
use repsim::synth::{extract_representations, generate_dataset, train_mlp, SynthConfig};
use repsim::MetricId;

fn main() -> repsim::Result<()> {
    let config = SynthConfig {
        input_dim: 16,
        n_classes: 4,
        n_train: 2000,
        n_eval: 500,
        hidden_widths: vec![32, 32],
        train_seeds: vec![1, 2, 3],
        ..SynthConfig::default()
    };
    let dataset = generate_dataset(&config, config.data.data_seed);

    // Last-layer representation per seed, normalized.
    let mut reps: Vec<Matrix> = Vec::new();
    for &seed in &config.train_seeds {
        let trained = train_mlp(&config, &dataset, seed)?;
        let layers = extract_representations(&trained.mlp, &dataset)?;
        let last = layers.last().unwrap();
        reps.push(normalize_matrix(
            &last.data,
            &last.model_id,
            CenteringAxis::PerNeuron,
        )?);
    }

    let width = reps[0].nrows();
    let grid = PcDeletionSpec::detection_default(width)?;
    println!("deletion grid for width {width}: {:?}\n", grid.k_values());

    for metric in [MetricId::LinearCka, MetricId::Procrustes, MetricId::Pwcca] {
        let baseline = cross_seed_baseline(&reps, metric)?;
        let result = detection_threshold(&reps[0], grid.k_values(), metric, baseline)?;
        println!("{metric} (cross-seed baseline {baseline:.4}):");
        for (k, d) in &result.curve {
            let marker = if *d > baseline { " <-- above baseline" } else { "" };
            println!("  k {k:>2}  d {d:.4}{marker}");
        }
        match result.threshold_fraction {
            Some(fraction) => println!(
                "  detection threshold: k = {} ({:.0}% of components)\n",
                result.threshold_k.unwrap(),
                fraction * 100.0
            ),
            None => println!("  never exceeds the baseline on this grid\n"),
        }
    }
    Ok(())
}
