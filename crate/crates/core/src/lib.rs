//! Chung-Lu random graph generation with a Poisson transfer-matrix model of
//! the realized degree distribution, and an exact inverse that shifts inputs
//! so the realized distribution matches a desired target.

pub mod distributions;
pub mod error;
pub mod exact_inverse;
pub mod experiments;
pub mod feasibility;
pub mod generator;
pub mod io;
pub mod plot;
pub mod precision;
pub mod transfer_matrix;

pub use distributions::{
    expand_to_weights, power_law_distribution, proportional_l1_error, DegreeDistribution,
    WeightSequence,
};
pub use error::{Error, Result};
pub use exact_inverse::{shift_input, ExactInverse, ShiftResult};
pub use generator::{average_over_trials, Graph, Sampler, TrialStats};
pub use precision::{PrecisionContext, Real};
pub use transfer_matrix::{build_transfer_matrix, mean_action, predict_output, TransferMatrix};
