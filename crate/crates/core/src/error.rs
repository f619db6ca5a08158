use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Violations of axioms are *not* errors: validators return them as data in a
/// [`crate::report::ValidationReport`]. Errors are reserved for failed
/// preconditions and malformed input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: expected one of {expected:?}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("arity error at {line}:{column}: `{symbol}` declared with arity {declared}, used with {used}")]
    Arity {
        symbol: String,
        declared: usize,
        used: usize,
        line: usize,
        column: usize,
    },

    #[error("unknown symbol `{symbol}` at {line}:{column}")]
    UnknownSymbol {
        symbol: String,
        line: usize,
        column: usize,
    },

    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),

    #[error("symbol `{symbol}` has arity {arity}, above the truncation bound {n_max}")]
    ArityAboveBound {
        symbol: String,
        arity: usize,
        n_max: usize,
    },

    #[error("variable x{index} out of range for a term over {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("arity mismatch: expected {expected} arguments, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error(
        "saturation did not converge within depth bound {depth_bound} (class counts {sizes:?})"
    )]
    NotSaturated {
        depth_bound: usize,
        sizes: Vec<usize>,
    },

    #[error("budget exceeded: {what} needs {required}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        required: u128,
        budget: u64,
    },

    #[error("relation is not symmetric and reflexive; offending pairs {0:?}")]
    NotSymmetricReflexive(Vec<(usize, usize)>),

    #[error("map is not surjective; missed elements {0:?}")]
    NotSurjective(Vec<usize>),

    #[error("tables are not a clone algebra: {0}")]
    NotACloneAlgebra(String),

    #[error("the algebras are over different clones")]
    DifferentClones,

    #[error("action lookup outside its domain: arity {arity}, tuple {tuple:?}")]
    Domain { arity: usize, tuple: Vec<usize> },

    #[error(
        "not an i-O-homomorphism (i_morphism={i_morphism}, equivariant={equivariant}): {witness}"
    )]
    NotIHom {
        i_morphism: bool,
        equivariant: bool,
        witness: String,
    },

    #[error("subset is not closed under the action: {0}")]
    NotClosed(String),

    #[error("LegNotReflecting({0})")]
    LegNotReflecting(usize),

    #[error("ImageNotClosed({0})")]
    ImageNotClosed(usize),

    #[error("internal inconsistency at {cell}: witnesses disagree {witnesses:?}")]
    InternalInconsistency {
        cell: String,
        witnesses: Vec<String>,
    },

    #[error("JointReflectionFailure: witness {0:?}")]
    JointReflectionFailure(Vec<usize>),

    #[error("NotACongruence: {0}")]
    NotACongruence(String),

    #[error("AtlasInvalid: {0}")]
    AtlasInvalid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl Error {
    /// True for errors caused by malformed input text rather than by a failed
    /// mathematical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::Arity { .. }
                | Error::UnknownSymbol { .. }
                | Error::DuplicateSymbol(_)
                | Error::ArityAboveBound { .. }
                | Error::VariableOutOfRange { .. }
                | Error::InvalidInput(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
