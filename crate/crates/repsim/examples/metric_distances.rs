//! Compute all five dissimilarity measures on a pair of representations,
//! and check two of them against their diagonal closed forms.
//!
//! ```bash
//! cargo run --example metric_distances
//! ```

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use repsim::metrics::distance;
use repsim::perturb::diagonal_family;
use repsim::repcore::{normalize, CenteringAxis, Matrix, RawRepresentation};
use repsim::MetricId;

fn main() -> repsim::Result<()> {
    // Two seeded random representations: 6 neurons on 200 shared examples.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut sample = |seed_shift: f64| -> Matrix {
        Matrix::from_fn(6, 200, |_, _| {
            let g: f64 = StandardNormal.sample(&mut rng);
            g + seed_shift
        })
    };
    let raw_a = RawRepresentation::new(sample(0.0), "model-a", 3)?;
    let raw_b = RawRepresentation::new(sample(0.1), "model-b", 3)?;

    // The standard protocol: center each neuron, scale to unit Frobenius
    // norm, then compare.
    let a = normalize(&raw_a, CenteringAxis::PerNeuron)?;
    let b = normalize(&raw_b, CenteringAxis::PerNeuron)?;

    println!("distances between two random 6x200 representations:");
    for metric in MetricId::ALL {
        let d = distance(metric, &a.data, &b.data)?;
        let self_d = distance(metric, &a.data, &a.data)?;
        println!("  {metric:<11} d(a,b) = {d:.6}   d(a,a) = {self_d:.2e}");
    }

    // Representations sharing singular vectors reduce to closed forms in
    // the singular values.
    let s1 = [2.0, 1.0, 0.5];
    let s2 = [1.0, 1.0, 0.25];
    let (d1, d2) = diagonal_family(&s1, &s2)?;
    let proc = distance(MetricId::Procrustes, &d1, &d2)?;
    let proc_closed: f64 = s1.iter().zip(&s2).map(|(x, y)| (x - y) * (x - y)).sum();
    let cka = distance(MetricId::LinearCka, &d1, &d2)?;
    let sq1 = DVector::from_iterator(3, s1.iter().map(|x| x * x));
    let sq2 = DVector::from_iterator(3, s2.iter().map(|x| x * x));
    let cka_closed = 1.0 - sq1.dot(&sq2) / (sq1.norm() * sq2.norm());

    println!("\ndiagonal closed forms (singular values {s1:?} vs {s2:?}):");
    println!("  procrustes  {proc:.9}  closed form {proc_closed:.9}");
    println!("  linear_cka  {cka:.9}  closed form {cka_closed:.9}");
    Ok(())
}
