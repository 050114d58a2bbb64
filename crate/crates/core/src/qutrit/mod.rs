//! Exact quantum mechanics of a single qutrit and the Yu–Oh ray set.

mod graph;
mod inequality;
mod operators;
mod rays;
mod state;

pub use graph::{compatibility, yu_oh_graph, CompatibilityGraph, GraphDocument};
pub use inequality::{
    evaluate_ineq2, evaluate_ineq3, expectation, h_projector_sum, h_projector_sum_for, s_operator,
    s_operator_for, CLASSICAL_BOUND_2, CLASSICAL_BOUND_3, EDGE_WEIGHT, PAIR_WEIGHT,
    QUANTUM_VALUE_2, QUANTUM_VALUE_3,
};
pub use operators::{commutator_norm, observable, projector, Observable, Projector};
pub use rays::{h_completion, yu_oh_rays, Ray, YuOh};
pub use state::{DensityMatrix, Ket, EIGENVALUE_FLOOR, STATE_TOLERANCE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QutritError {
    #[error("zero state vector cannot be normalized")]
    ZeroVector,
    #[error("ray {0} has a zero direction")]
    InvalidRay(String),
    #[error("unknown ray label {0:?}")]
    UnknownLabel(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} is not 1")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),
}

pub type Result<T> = std::result::Result<T, QutritError>;
