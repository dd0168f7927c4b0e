//! Pointer-measurement model: coherent and reduced post-measurement states,
//! quantum mutual entropy versus accessible information, and phase dynamics.

pub mod dynamics;
pub mod error;
pub mod info;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod rng;
pub mod search;
pub mod stats;

pub use error::{Error, Result};
pub use info::{
    accessible_mutual_information, macroscopicity_gap, mutual_entropy, verify_inequality, CorrelationReport, Povm,
    Strategy,
};
pub use linalg::{
    partial_trace, shannon_entropy, tensor, trace_distance, von_neumann_entropy, CMatrix, CVector, DensityOperator,
    HilbertSpace, LogBase, PureState, C64,
};
pub use model::{
    apply_measurement, decoherence_error, expectation, premeasurement_mixed, premeasurement_pure, reduce, BranchKind,
    BranchState, MacroscopicObservable, PointerMeasurementModel,
};
pub use search::{projective_search, SearchOptions, SearchOutcome};
