//! Representation similarity metrics and a functionality-grounded benchmark
//! harness.
//!
//! The crate compares neural-network layer representations (dense `p x n`
//! activation matrices) with five dissimilarity measures, perturbs
//! representations by deleting principal components, and scores each measure
//! by its rank correlation with observed functionality differences, with
//! bootstrap significance testing for differences between measures.
//!
//! Start with the runnable programs in `examples/`; each one exercises a
//! major capability end to end.

pub mod bench;
pub mod error;
pub mod io;
pub mod metrics;
pub mod perturb;
pub mod repcore;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use metrics::MetricId;
pub use repcore::{CenteringAxis, Matrix, NormalizedRepresentation, RawRepresentation};
