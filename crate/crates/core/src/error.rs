use thiserror::Error;

/// Errors raised by the fitting pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Points `first` and `second` have overlapping ε-neighbourhoods.
    #[error("empirical points {first} and {second} are not distinct (sup-distance {distance} <= 2*epsilon)")]
    NotDistinct {
        first: usize,
        second: usize,
        distance: f64,
    },

    /// A singular value falls inside `[delta, k*delta]`, so no numerical rank is defined.
    #[error("no ({delta}, {k})-gap in the singular spectrum: sigma_{index} = {value}")]
    NoGap {
        delta: f64,
        k: f64,
        /// 1-based index of the offending singular value.
        index: usize,
        value: f64,
    },

    #[error("matrix is numerically rank deficient")]
    DomainViolation,

    /// The evaluation matrix of the current support is already rank deficient
    /// at the unperturbed points, so no further candidate can be examined.
    #[error("support of {size} terms is numerically dependent on the {points} points")]
    DegenerateSupport { size: usize, points: usize },

    #[error("linear system lost row rank")]
    RankDrop,

    #[error("non-finite value while evaluating the system")]
    Evaluation,

    #[error("iteration cap of {0} reached without convergence")]
    Divergence(usize),

    #[error("candidate term degree exceeds the configured cap of {0}")]
    DegreeCap(u32),

    /// An error raised while processing a specific candidate term.
    #[error("while processing candidate term {term}: {source}")]
    AtTerm {
        term: String,
        #[source]
        source: Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(&'static str),
}

impl Error {
    /// Strips any [`Error::AtTerm`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTerm { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
