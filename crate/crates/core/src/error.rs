use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("instance mismatch: `{left}` vs `{right}`")]
    InstanceMismatch { left: String, right: String },

    #[error("scalar must be nonnegative, got {0}")]
    NegativeScalar(f64),

    #[error("invalid value for `{instance}`: {reason}")]
    InvalidValue { instance: String, reason: String },

    #[error("invalid neighborhood element: {0}")]
    InvalidNeighborhood(String),

    #[error("probe list is empty")]
    EmptyProbes,

    #[error("`{0}` is not a uc-cone")]
    NotUcCone(String),

    #[error("`{0}` is not a vector space")]
    NotVectorSpace(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {0} is outside the sampled domain")]
    OutsideDomain(String),

    #[error("domain exhausted: depth {requested} requested at {point}, sampled to {available}")]
    DomainExhausted {
        point: String,
        requested: u32,
        available: u32,
    },

    #[error("unbounded f(0)")]
    UnboundedAtOrigin,

    #[error("element {0} is not bounded")]
    Unbounded(String),

    #[error("hypothesis violated at {witness}")]
    HypothesisViolation { witness: String },

    #[error("no convergence at depth {depth}: final residual {residual}")]
    NonConvergence { depth: u32, residual: f64 },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("no tabulated value at {0}")]
    MissingTabulation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable kebab-case identifier used in structured failure reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InstanceMismatch { .. } => "instance-mismatch",
            Error::NegativeScalar(_) => "negative-scalar",
            Error::InvalidValue { .. } => "invalid-value",
            Error::InvalidNeighborhood(_) => "invalid-neighborhood",
            Error::EmptyProbes => "empty-probes",
            Error::NotUcCone(_) => "not-uc-cone",
            Error::NotVectorSpace(_) => "not-vector-space",
            Error::UnknownInstance(_) => "unknown-instance",
            Error::InvalidDomain(_) => "invalid-domain",
            Error::OutsideDomain(_) => "outside-domain",
            Error::DomainExhausted { .. } => "domain-exhausted",
            Error::UnboundedAtOrigin => "unbounded-f0",
            Error::Unbounded(_) => "unbounded",
            Error::HypothesisViolation { .. } => "hypothesis-violation",
            Error::NonConvergence { .. } => "non-convergence",
            Error::InternalInconsistency(_) => "internal-inconsistency",
            Error::MissingTabulation(_) => "missing-tabulation",
            Error::Precondition(_) => "precondition",
            Error::InvalidConfig(_) => "invalid-config",
        }
    }

    /// Process exit code: 1 invalid config, 2 hypothesis violation, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnboundedAtOrigin
            | Error::Unbounded(_)
            | Error::HypothesisViolation { .. }
            | Error::InternalInconsistency(_)
            | Error::Precondition(_) => 2,
            Error::NonConvergence { .. } => 3,
            _ => 1,
        }
    }
}
