use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid expression: {0}")]
    InvalidExpr(String),
    #[error("quotient invariants are not integral: {0}")]
    NonIntegralQuotient(String),
    #[error("inconsistent structure flags: {0}")]
    InconsistentFlags(String),
    #[error("primitive `{0}` is already registered")]
    DuplicateName(String),
    #[error("unknown primitive `{0}`")]
    UnknownPrimitive(String),
    #[error("branch class is not divisible by the cover degree: {0}")]
    NonDivisibleBranch(String),
    #[error("degree parameter must be at least 1: {0}")]
    NegativeDegree(String),
    #[error("missing capability: {0}")]
    MissingCapability(String),
    #[error("unsupported pattern: {0}")]
    UnsupportedPattern(String),
    #[error("flag is unknown: {0}")]
    UnknownFlag(String),
    #[error("unsupported fundamental group: {0}")]
    UnsupportedGroup(String),
    #[error("no splitting of `{0}` fits the obstruction pattern")]
    NoSplit(String),
    #[error("index must be odd, got {0}")]
    BadParity(u64),
    #[error("action is not admissible: {0}")]
    AdmissibilityFail(String),
    #[error("infeasible lattice point: {0}")]
    InfeasiblePoint(String),
    #[error("p outside the open interval: {0}")]
    BadP(String),
    #[error("invariants differ: {0}")]
    MismatchedInvariants(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
