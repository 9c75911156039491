//! Entropy vectors, information inequalities and entropy cones.
//!
//! Entropies are measured in bits. Subsets of parties are bitmasks, with party `i`
//! at bit `i - 1`.

pub mod catalog;
pub mod cone;
pub mod entropy;
pub mod error;
pub mod exact;
pub mod extremal;
pub mod functional;
pub mod linear_rank;
pub mod morphisms;
pub mod perm;
pub mod quantum;
pub mod stabilizer;
pub mod subset;
pub mod types;
pub mod weyl;
pub mod zmod;

pub use entropy::{entropy_vector_classical, shannon_entropy, EntropyVector, JointDistribution, Probabilities};
pub use error::{Error, Result};
pub use quantum::{entropy_vector_quantum, ghz_state, partial_trace, purify, von_neumann_entropy, DensityMatrix, PureState};
