use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spin must be a positive half-integer, got 2s = {0}")]
    InvalidSpin(usize),

    #[error("coefficient vector has length {got}, spin 2s = {n} requires {}", n + 1)]
    DimensionMismatch { n: usize, got: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("every polynomial coefficient is below the absolute floor")]
    AllZeroPolynomial,

    #[error("constellation has total multiplicity {got}, expected {expected}")]
    MultiplicityMismatch { expected: usize, got: usize },

    #[error("permanent requested for {0} stars, at most 20 supported")]
    TooManyStars(usize),

    #[error("basis directions {0} and {1} coincide within tolerance")]
    DegenerateBasis(usize, usize),

    #[error("stars {0} and {1} coincide within tolerance")]
    DegenerateConstellation(usize, usize),

    #[error("direction is not a critical point (residual {0:.3e})")]
    NotCritical(f64),

    #[error("star has multiplicity {multiplicity}; cone coefficient {coefficient} is of higher order")]
    DegenerateStar { multiplicity: usize, coefficient: f64 },

    #[error("direction is not a star of the state (nearest chordal distance {0:.3e})")]
    NotAStar(f64),

    #[error("target is antipodal to the base (distance {0}), geodesic not unique")]
    AntipodalTarget(f64),

    #[error("target lies on the cut locus (distance {0})")]
    CutLocus(f64),

    #[error("degenerate triangle: side length {0} is 0 or π/2 within tolerance")]
    DegenerateTriangle(f64),

    #[error("Bargmann phase undefined: overlap {0:.3e} vanishes")]
    UndefinedPhase(f64),

    #[error("linear combination vanishes")]
    ZeroCombination,

    #[error("trajectory endpoints must be distinct and finite")]
    InvalidEndpoints,

    #[error("inputs do not define a complex line (the two states coincide)")]
    CoincidentStates,

    #[error("operation needs 2s ≥ {required}, got 2s = {got}")]
    SpinTooSmall { required: usize, got: usize },

    #[error("spin mismatch: {0} vs {1}")]
    SpinMismatch(usize, usize),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal conditions reported alongside a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Estimated condition number of a basis matrix exceeds the configured limit.
    IllConditioned(f64),
    /// Several SC states are equally close; the lexicographically smallest was picked.
    NonUniqueClosest(usize),
    /// Multistart seeds whose refinement did not converge.
    Convergence(Vec<usize>),
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::IllConditioned(c) => write!(f, "basis condition number {c:.3e} exceeds the limit"),
            Warning::NonUniqueClosest(k) => write!(f, "{k} SC states tie for closest"),
            Warning::Convergence(seeds) => write!(f, "{} multistart seeds did not converge", seeds.len()),
        }
    }
}
