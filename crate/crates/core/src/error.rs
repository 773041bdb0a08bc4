use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::Point2;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid Hénon system: {0}")]
    InvalidSystem(String),

    #[error("filtration certification failed at {witness}: {reason}")]
    CertificationFailed { witness: Point2, reason: String },

    #[error("point {0} is outside V⁺")]
    OutsideVPlus(Point2),

    #[error("orbit of {point} did not escape within {iterations} iterations")]
    DoesNotEscape { point: Complex64, iterations: usize },

    #[error("point is not escaping (potential {potential:e} ≤ tolerance)")]
    NotEscaping { potential: f64 },

    #[error("Böttcher coordinates require monic polynomials")]
    NotMonic,

    #[error("branch ambiguity near {at}: {detail}")]
    BranchAmbiguity { at: Complex64, detail: String },

    #[error("root polishing failed at {root} (residual {residual:e})")]
    RootPolishFailed { root: Complex64, residual: f64 },

    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),

    #[error("ambiguous preimage at potential {potential:e}")]
    AmbiguousPreimage { potential: f64 },

    #[error("not a saddle: eigenvalue moduli {moduli:?}")]
    NotSaddle { moduli: [f64; 2] },

    #[error("linearization did not converge (discrepancy {discrepancy:e})")]
    NotConverged { discrepancy: f64 },

    #[error("rays did not land: {0:?}")]
    UnlandedRay(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("format error: {0}")]
    Format(String),
}
