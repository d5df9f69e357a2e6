//! Error type shared by all modules.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("matrix entries must be finite")]
    NonFiniteEntries,
    #[error("matrix exponential series did not converge within the term cap")]
    ExpSeriesDiverged,
    #[error("singular linear system: pivot magnitude {pivot:.3e} below threshold")]
    SingularSystem { pivot: f64 },
    #[error("singular stage system at xi_k = {xi_k}, h = {h}, lambda = {lambda}")]
    SingularStage {
        xi_k: f64,
        h: f64,
        lambda: Complex64,
    },
    #[error("no unit-first-row eigenvector matrix exists for this matrix")]
    DegenerateEigenvectors,
    #[error("parameter {name} = {value} outside valid range {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("lambda = {lambda} is not admissible (need Re kappa_- > 0 and Re kappa_+ > 0)")]
    InadmissibleLambda { lambda: Complex64 },
    #[error("stiff expansion outside its sector: Re(h kappa) = {value:.3} < {required}")]
    SectorViolation { value: f64, required: f64 },
    #[error("adaptive quadrature exceeded refinement depth {depth}")]
    QuadratureDepth { depth: u32 },
    #[error("raw-coordinate propagation left the representable range at xi = {xi}; use transformed coordinates")]
    RawOverflow { xi: f64 },
    #[error("reference value did not converge after {doublings} grid doublings")]
    ReferenceNotConverged { doublings: u32 },
    #[error("order fit needs >= 3 samples with positive values and distinct abscissae")]
    DegenerateFit,
    #[error("no closed-form {what} for this method")]
    NoClosedForm { what: &'static str },
    #[error("tabulated profile needs at least {min} nodes, got {got}")]
    TooFewNodes { min: usize, got: usize },
    #[error("tabulated profile nodes must be strictly increasing (violation at index {index})")]
    NonMonotonicNodes { index: usize },
    #[error("lambda must be nonzero for the asymptotic series")]
    ZeroLambda,
}
