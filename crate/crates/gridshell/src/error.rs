use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A composed transformation no longer satisfies the pseudo-orthogonality
    /// relation D^T E_pe D = E_pe within tolerance.
    #[error("Laguerre map fails pseudo-orthogonality check: residual {residual:e} > {tol:e}")]
    NotPseudoOrthogonal { residual: f64, tol: f64 },

    /// Rotation block passed to the Euclidean generator is not a proper rotation.
    #[error("rotation matrix is not orthogonal with determinant +1 (residual {0:e})")]
    NotARotation(f64),

    #[error("scaling factor must be positive, got {0}")]
    BadScaling(f64),

    /// The image of the tangent plane has a vanishing spatial part.
    #[error("singular transform: null normal direction collapsed (|n~| = {0:e})")]
    SingularTransform(f64),

    /// A transformed curvature sphere degenerated.
    #[error("curvature blow-up under transformation: transformed radius {0:e}")]
    CurvatureBlowUp(f64),

    #[error("singular parametrization at (xi, eta) = ({xi}, {eta}): denominator {den:e}")]
    SingularParametrization { xi: f64, eta: f64, den: f64 },

    /// The finite-difference frame violates the L-isothermic relation badly
    /// enough to signal an implementation or step-size fault.
    #[error("frame inconsistency at (xi, eta) = ({xi}, {eta}): |k1*A1 - k2*A2| relative mismatch {mismatch:e}")]
    FrameInconsistency { xi: f64, eta: f64, mismatch: f64 },

    #[error("flat point: vanishing principal curvature at (xi, eta) = ({xi}, {eta})")]
    FlatPoint { xi: f64, eta: f64 },

    /// The I0 condition T1*A2 = T2*A1 does not determine I0 (umbilic center).
    #[error("I0 condition is degenerate at the center sample (coefficient {0:e})")]
    ConditionDegenerate(f64),

    #[error("grid/field mismatch: field is {fr}x{fc} samples but grid needs {nr}x{nc}")]
    GridMismatch { fr: usize, fc: usize, nr: usize, nc: usize },

    #[error("nonpositive section radius {0}")]
    BadRadius(f64),

    /// Mechanism detected: the constrained stiffness matrix is not positive
    /// definite.
    #[error("singular stiffness: zero-energy mode encountered at dof {0} during factorization")]
    SingularStiffness(usize),

    #[error("optimization config invalid: {0}")]
    BadOptimizationConfig(String),

    #[error("degenerate corner geometry: {0}")]
    DegenerateCorners(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with pipeline stage context.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
