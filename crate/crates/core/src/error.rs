use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma pole at {0}")]
    GammaPole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("zero element")]
    ZeroElement,
    #[error("epsilon coset nontrivial: unsupported")]
    NontrivialEpsilonCoset,
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("outside convergence region: Re(s) = {0}")]
    OutsideConvergence(f64),
    #[error("empty space: dim S_{0} = 0")]
    EmptySpace(u32),
    #[error("length underflow: need {need} coefficients, have {have}")]
    LengthUnderflow { need: usize, have: usize },
    #[error("cannot separate eigenforms in weight {0}")]
    CannotSeparate(u32),
    #[error("truncation not certified: bound {0:e}")]
    TruncationNotCertified(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not normalized: C(1) = {0}")]
    NotNormalized(f64),
    #[error("too few coefficients: need {need}, have {have}")]
    InsufficientCoefficients { need: usize, have: usize },
    #[error("weight constraint k_j > l_j violated (k = {k}, l = {l})")]
    WeightConstraint { k: u32, l: u32 },
    #[error("residue enumeration overflow: N(c) = {norm} exceeds cap {cap}")]
    EnumerationOverflow { norm: u64, cap: u64 },
    #[error("uncertified truncation: {what} bound {bound:e}")]
    Uncertified { what: String, bound: f64 },
    #[error("quadrature failed to certify tolerance: achieved {0:e}")]
    Quadrature(f64),
    #[error("ill-conditioned omega system: condition estimate {0:e}")]
    IllConditioned(f64),
    #[error("trace formula inconsistency at (m, n) = ({m}, {n}): lhs {lhs}, rhs {rhs}")]
    TraceInconsistency { m: u64, n: u64, lhs: f64, rhs: f64 },
    #[error("degenerate recovery: denominator {0:e}")]
    DegenerateRecovery(f64),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
