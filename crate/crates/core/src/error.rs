use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("zero has no unit part")]
    ZeroUnitPart,
    #[error("scalar {0} is not p-integral for p = {1}")]
    NotIntegral(String, u64),
    #[error("denominator is not a unit of the local ring")]
    NonUnitDenominator,
    #[error("hypothesis violated: f ∈ M fails (f is a unit)")]
    NotInMaximalIdeal,
    #[error("hypothesis violated: f ∉ (u1, …, ud) fails (f lies in the parameter ideal)")]
    InParameterIdeal,
    #[error("coordinate change has a unit constant term")]
    UnitConstantTerm,
    #[error("coordinate change depends on y")]
    NotGraphForm,
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("re-expansion incomplete: {0}")]
    ReexpansionIncomplete(String),
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("the origin cannot lie in the polyhedron")]
    OriginInPolyhedron,
    #[error("geometry cap exceeded: {0}")]
    GeometryCap(String),
    #[error("{0} is not a vertex")]
    NotAVertex(String),
    #[error("invalid linear form: {0}")]
    InvalidForm(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
