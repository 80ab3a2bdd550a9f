use thiserror::Error;

use crate::seq::Seq;

/// Errors across parsing, validation, and the exact-law engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol must be 0 or 1, got {0:?}")]
    BadSymbol(char),

    #[error("sequence of length {len} exceeds the cap of {cap}")]
    SequenceTooLong { len: usize, cap: usize },

    #[error("tree file line {line}: {msg}")]
    TreeFormat { line: usize, msg: String },

    #[error("duplicate context {0}")]
    DuplicateContext(Seq),

    #[error("suffix property violated: {shorter} is a suffix of {longer}")]
    SuffixViolation { shorter: Seq, longer: Seq },

    #[error("probability row of context {context} sums to {sum}, not 1")]
    RowSum { context: Seq, sum: f64 },

    #[error("non-nullness violated: p({symbol}|{context}) = {value} is not positive")]
    NonNull {
        context: Seq,
        symbol: char,
        value: f64,
    },

    #[error("tree is incomplete: past {0} has no matching context")]
    Incomplete(Seq),

    #[error("no context matches past {0}")]
    NoMatchingContext(Seq),

    #[error("past of length {got} is shorter than the tree height {need}")]
    PastTooShort { need: usize, got: usize },

    #[error("tree height {height} exceeds the embedding cap of {cap}")]
    HeightCap { height: usize, cap: usize },

    #[error("sample of length {n} is shorter than the tree height {h}")]
    SampleTooShort { n: usize, h: usize },

    #[error("conditional undefined: the cylinder {0} has probability 0")]
    UndefinedConditional(Seq),

    #[error("cylinder length {len} exceeds the evaluation cap of {cap}")]
    LengthCap { len: usize, cap: usize },

    #[error("depth {depth} exceeds the cap of {cap}")]
    DepthCap { depth: usize, cap: usize },

    #[error("stationary solve did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("sample file: {0}")]
    SampleFormat(String),

    #[error("count depth d+1 = {depth} exceeds sample length {n}")]
    CountDepth { depth: usize, n: usize },

    #[error("estimator requires d < n, got d = {d}, n = {n}")]
    EstimatorDepth { d: usize, n: usize },

    #[error("threshold must be positive, got {0}")]
    BadThreshold(f64),

    #[error("noise probability must lie in [0,1], got {0}")]
    BadEpsilon(f64),

    #[error("config file line {line}: {msg}")]
    ConfigFormat { line: usize, msg: String },

    #[error("config invalid: {0}")]
    ConfigInvalid(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("the δ window is empty (lower edge {low} ≥ upper edge {high})")]
    EmptyWindow { low: f64, high: f64 },

    #[error("minimal sample size exceeds the cap of {cap:e}")]
    MinSampleSizeCap { cap: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for malformed input files (as opposed to semantic validation
    /// failures); the CLI maps these to a distinct exit code.
    pub fn is_format_error(&self) -> bool {
        matches!(
            self,
            Error::BadSymbol(_)
                | Error::TreeFormat { .. }
                | Error::SampleFormat(_)
                | Error::ConfigFormat { .. }
                | Error::Io(_)
        )
    }
}
