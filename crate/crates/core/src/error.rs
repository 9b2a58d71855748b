use thiserror::Error;

/// Errors raised anywhere in the lab.
///
/// The CLI maps these onto exit codes, so variants are grouped by how a
/// caller is expected to react: malformed input, a structural mismatch
/// between objects that must agree, an exhausted search budget, or a
/// failed promise.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}, column {column}: undeclared variable `{name}`")]
    UndeclaredVariable {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("`{symbol}` has arity {expected} but is used with {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown template `{0}`")]
    UnknownTemplate(String),

    #[error("search budget of {budget} nodes exhausted")]
    ResourceLimit { budget: u64 },

    #[error("nested term needs equal input and output domains (got {input} and {output})")]
    NestingAcrossDomains { input: usize, output: usize },

    #[error("instance still contains equalities; normalize it first")]
    NotNormalized,

    #[error("conjunct {conjunct} uses `{symbol}`, which is empty in the yes-structure")]
    EmptyRelation { conjunct: usize, symbol: String },

    #[error("symbol `{symbol}` has arity {arity}, above the bound {bound}")]
    ArityBound {
        symbol: String,
        arity: usize,
        bound: usize,
    },

    #[error("promise violated: {0}")]
    PromiseViolation(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
