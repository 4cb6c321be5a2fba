use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not in H1: {0}")]
    NotInH1(String),
    #[error("not in H0: {0}")]
    NotInH0(String),
    #[error("step needs nonempty factors")]
    EmptyStepFactor,
    #[error("degenerate state; use mzv_as_an")]
    DegenerateState,
    #[error("PFD requires integer exponents")]
    SymbolicExponent,
    #[error("reduce requires integer exponents")]
    SymbolicReduce,
    #[error("cannot step: symbolic head exponent")]
    SymbolicStep,
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("divergent or unverified convergence: {0}")]
    UnverifiedConvergence(String),
    #[error("precision not met: best estimate {value} with bound {bound}")]
    PrecisionNotMet { value: f64, bound: f64 },
    #[error("unbound slot: {0}")]
    UnboundSlot(String),
    #[error("family not implemented: {0}")]
    FamilyNotImplemented(String),
    #[error("diagram mismatch at step {step}:\n  algebra:  {algebra}\n  analysis: {analysis}")]
    DiagramMismatch {
        step: usize,
        algebra: String,
        analysis: String,
    },
    #[error("not reducible: {0}")]
    NotReducible(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}
