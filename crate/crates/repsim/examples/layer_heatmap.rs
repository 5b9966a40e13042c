//! Pairwise layer distances between two models that differ only in
//! training seed: train two small networks, extract every hidden layer,
//! and print the cross-model distance matrix.
//!
//! ```bash
//! cargo run --example layer_heatmap
//! ```

use repsim::bench::pairwise_layer_matrix;
use repsim::repcore::{normalize, CenteringAxis, NormalizedRepresentation};
use repsim::synth::{extract_representations, generate_dataset, train_mlp, SynthConfig};
use repsim::MetricId;

fn main() -> repsim::Result<()> {
    let config = SynthConfig {
        input_dim: 16,
        n_classes: 4,
        n_train: 1500,
        n_eval: 400,
        hidden_widths: vec![24, 24, 24],
        train_seeds: vec![1, 2],
        ..SynthConfig::default()
    };
    let dataset = generate_dataset(&config, config.data.data_seed);

    let mut models: Vec<Vec<NormalizedRepresentation>> = Vec::new();
    for &seed in &config.train_seeds {
        let trained = train_mlp(&config, &dataset, seed)?;
        println!(
            "trained {} (train accuracy {:.3})",
            trained.mlp.model_id, trained.train_accuracy
        );
        let layers = extract_representations(&trained.mlp, &dataset)?
            .iter()
            .map(|raw| normalize(raw, CenteringAxis::PerNeuron))
            .collect::<repsim::Result<Vec<_>>>()?;
        models.push(layers);
    }

    for metric in [MetricId::Pwcca, MetricId::LinearCka, MetricId::Procrustes] {
        let matrices = pairwise_layer_matrix(&models[0], &models[1], metric)?;
        println!("\n{metric}: d(model-1 layer i, model-2 layer j)");
        print!("      ");
        for j in 0..matrices.cross.ncols() {
            print!("  L{j}    ");
        }
        println!();
        for i in 0..matrices.cross.nrows() {
            print!("  L{i} ");
            for j in 0..matrices.cross.ncols() {
                print!("  {:.4}", matrices.cross[(i, j)]);
            }
            println!();
        }
    }
    println!("\ndiagonals compare corresponding layers across seeds; a");
    println!("measure is specific to seed noise when its diagonal stays");
    println!("below its off-diagonals.");
    Ok(())
}
