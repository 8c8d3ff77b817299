use thiserror::Error;

/// Errors raised by map construction, dynamics, classification and the
/// numerical oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate map: {0}")]
    DegenerateMap(String),

    #[error("denominator vanishes (|<z,C>+d| = {modulus:e})")]
    DenominatorVanishes { modulus: f64 },

    #[error("map is not a self-map of the ball (max boundary modulus {max_modulus})")]
    NotSelfMap { max_modulus: f64 },

    #[error("eigenvalue solver did not converge")]
    DegenerateEigenproblem,

    #[error("map has an interior fixed point")]
    HasInteriorFixedPoint,

    #[error("no boundary fixed point with dilation <= 1")]
    NoQualifyingBoundaryPoint,

    #[error("boundary dilation {jacobian} disagrees with radial estimate {radial}")]
    DilationMismatch { jacobian: f64, radial: f64 },

    #[error("point is not interior (|a| = {norm})")]
    PointNotInterior { norm: f64 },

    #[error("point is not a Denjoy-Wolff point: {0}")]
    NotDenjoyWolff(String),

    #[error("half-plane form violates its constraints: {0}")]
    InvalidHalfPlaneForm(String),

    #[error("point is not a fixed point (residual {residual:e})")]
    NotAFixedPoint { residual: f64 },

    #[error("eigenvalue of modulus {modulus} falls in the gap below the unit circle")]
    GapEigenvalue { modulus: f64 },

    #[error("unitary index is {0}, expected 0")]
    UnitaryIndexNonzero(usize),

    #[error("map is not hyperbolic")]
    NotHyperbolic,

    #[error("map is not elliptic")]
    NotElliptic,

    #[error("elliptic map with unitary index 0 fixes {0} boundary points")]
    TooManyBoundaryFixedPoints(usize),

    #[error("parabolic: spectrum out of scope (Bayart); spectral radius = 1 (Theorem C)")]
    UnsupportedParabolic,

    #[error("non-elliptic automorphism: spectrum out of scope; spectral radius = {spectral_radius}")]
    UnsupportedAutomorphism { spectral_radius: f64 },

    #[error("map has no boundary fixed point")]
    NoBoundaryFixedPoint,

    #[error("series has zero constant term")]
    ZeroConstantTerm,

    #[error("compression dimension {dimension} (degree {degree}) exceeds the size cap {cap}")]
    SizeCapExceeded { degree: usize, dimension: usize, cap: usize },

    #[error("function is zero through the requested degree")]
    ZeroFunction,

    #[error("parameter constraint violated: {0}")]
    ParameterConstraintViolated(String),

    #[error("no closed-form eigenfunction family: {0}")]
    NoEigenfunctionFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
