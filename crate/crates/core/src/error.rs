use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("leaf index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("not a congruence: {0}")]
    NotACongruence(String),
    #[error("not an order-congruence: {0}")]
    NotOrderCongruence(String),
    #[error("not a compatible quasiorder: {0}")]
    NotCompatibleQuasiorder(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
    #[error("commutation failure: {0}")]
    CommutationFailure(String),
    #[error("witness inconsistency: {0}")]
    WitnessInconsistency(String),
    #[error("theorem contradiction: {0}")]
    TheoremContradiction(String),
    #[error("rule not applicable: {0}")]
    NotApplicable(String),
    #[error("skeleton mismatch: {0}")]
    SkeletonMismatch(String),
    #[error("chain does not close: {0}")]
    NotClosedChain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}
