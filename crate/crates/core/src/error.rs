use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorexError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("polytope is unbounded: {0}")]
    UnboundedPolytope(String),
    #[error("polytope is not simple: {0}")]
    NotSimple(String),
    #[error("polytope has empty interior: {0}")]
    EmptyInterior(String),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("integrand degree {0} exceeds the cap of 8")]
    DegreeTooHigh(u32),
    #[error("Gram system is singular")]
    SingularGram,
    #[error("crease endpoints coincide")]
    DegenerateCrease,
    #[error("expected a quadrilateral, got {0} edges")]
    NotQuadrilateral(usize),
    #[error("expected a triangle, got {0} edges")]
    NotTriangle(usize),
    #[error("cannot combine weights: summand {0} is unstable")]
    MixedUnstable(usize),
    #[error("both sides of a parallel pair are cusps")]
    OppositeCusps,
    #[error("fibre weights must be equal, got {0} and {1}")]
    InconsistentBeta(String, String),
    #[error("positivity failed: {0}")]
    PositivityFailure(String),
    #[error("no root in interval: {0}")]
    NoRootInInterval(String),
    #[error("simplex is not in standard position: {0}")]
    NotSimplexNormalized(String),
    #[error("point outside the domain: {0}")]
    OutsideDomain(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("unknown chart for facet {0}")]
    UnknownChart(usize),
    #[error("non-positive alpha: c = {0}")]
    NonPositiveAlpha(String),
    #[error("formula pole: a0 * l = 4")]
    FormulaPole,
    #[error("no admissible normalization: {0}")]
    NoAdmissibleNormalization(String),
    #[error("index out of range: {0}")]
    BadIndex(String),
}

pub type Result<T> = std::result::Result<T, TorexError>;
