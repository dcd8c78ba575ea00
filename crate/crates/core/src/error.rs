use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} outside supported range 1..={max}", max = crate::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("point is not a member of the group (eta = {eta})")]
    NonMember { eta: f64 },

    #[error("invalid membership guard {0}: must lie in [0, 1)")]
    InvalidGuard(f64),

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("direction lies in the null space of the functional")]
    NullDirection,

    #[error("neither witness case applies: {0}")]
    NoCase(String),

    #[error("elements {0} and {1} do not commute")]
    NotCommutative(usize, usize),

    #[error("point {t} outside the domain {domain}")]
    DomainViolation { t: f64, domain: String },

    #[error("homomorphism spec failed validation: {0}")]
    ConstraintViolation(String),

    #[error("homomorphism spec has not been validated: {0}")]
    Unvalidated(String),

    #[error("map is not a homomorphism on probes (residual {residual:e} > {tol:e})")]
    NotHomomorphic { residual: f64, tol: f64 },

    #[error("radial index varies across probes (spread {spread:e})")]
    InconsistentIndex { spread: f64 },

    #[error("image is not collinear with the reference image (deviation {0:e})")]
    NotCollinear(f64),

    #[error("image of the direction is zero")]
    ZeroImage,

    #[error("direction does not satisfy rho(u) = 1 (rho(u) = {0})")]
    NotUnitDirection(f64),

    #[error("map is not injective on the samples ({0} and {1} collide)")]
    NotInjective(usize, usize),

    #[error("limit did not converge after {steps} steps (t = {t_final:e}, last delta {last_delta:e})")]
    NonConvergent {
        steps: usize,
        t_final: f64,
        last_delta: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("box is not contained in the group domain (min eta {0})")]
    BoxOutsideDomain(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("schema validation failed: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
