use alloc::string::String;

/// Errors raised by the model, policy, and solver layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid state space: {0}")]
    InvalidStateSpace(String),
    #[error("invalid belief: {0}")]
    InvalidBelief(String),
    #[error("operation requires the state space {{-1, 0, 1}}")]
    WrongStateSpace,
    #[error("operation requires scalar states")]
    NotScalar,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point (a={a}, z={z}) lies outside the belief region")]
    OutOfSimplex { a: f64, z: f64 },
    #[error("vertices are not affinely independent")]
    DegenerateVertices,
    #[error("policy is not Bayes-plausible (residual {residual:.3e})")]
    NotBayesPlausible { residual: f64 },
    #[error("weight {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    WeightSum { sum: f64 },
    #[error("support beliefs {0} and {1} coincide")]
    DuplicateBelief(usize, usize),
    #[error("policy support is empty or does not match its weights")]
    MalformedPolicy,
    #[error("support beliefs {0} and {1} induce the same action")]
    AmbiguousDirection(usize, usize),
    #[error("policy support is not affinely independent")]
    RedundantPolicy,
    #[error("extreme support point is not interior to the simplex")]
    NotInterior,
    #[error("stretch factor {0} pushes the belief outside the simplex")]
    EpsilonTooLarge(f64),
    #[error("cost parameter must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("prior must have full support on {{-1, 0, 1}}")]
    BoundaryPrior,
    #[error("kappa {kappa} is outside the regime ({regime})")]
    OutOfRegime { kappa: f64, regime: &'static str },
    #[error("kappa {0} is outside (1/2, 2)")]
    KappaOutOfRange(f64),
    #[error("computed weight {0} is outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("slope {0} is infeasible for this prior")]
    InfeasibleSlope(f64),
    #[error("parameter {0} is outside its admissible range")]
    OutOfRange(f64),
    #[error("linear program is infeasible")]
    InfeasibleLp,
    #[error("linear program is unbounded")]
    UnboundedLp,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
