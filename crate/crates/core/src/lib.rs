//! Variational canonicalization of three-qubit pure states and tangle
//! estimation from computational-basis measurement statistics.
//!
//! A state `|ψ>` is driven by `U_A ⊗ U_B ⊗ U_C` into a form with no weight on
//! `|001>, |010>, |011>`. On that form the tangle equals `4 P₀₀₀ P₁₁₁`, so it
//! can be read off measurement frequencies. The [`experiment`] module runs the
//! full pipeline over random-state ensembles under a Pauli/readout error model.

pub mod canonical;
pub mod entanglement;
pub mod error;
pub mod experiment;
pub mod noise;
pub mod optimizer;
pub mod state;
pub mod streams;

pub use canonical::{
    canonicalize, cost, cost_sampled, CanonicalizationOutcome, CanonicalizationPolicy, CostMode,
};
pub use entanglement::{
    concurrence, extract_canonical_coefficients, hyperdeterminant, invariants_from_canonical,
    invariants_from_state, tangle, CanonicalCoefficients, InvariantSet,
};
pub use error::{Error, Result};
pub use noise::{
    error_event_probabilities, estimate_tangle, post_select, relative_error, sample_shots,
    NoiseConfig, ShotHistogram, TangleEstimate,
};
pub use optimizer::{minimize, OptimizationResult, OptimizerOptions};
pub use state::{
    apply_local_unitaries, build_unitary, outcome_probabilities, reduced_density_matrix, Complex,
    DensityMatrix, LocalUnitaryParams, PureState3, SingleQubitUnitary, Subsystem,
};
