use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("world guard: construction needs {needed} worlds but max-worlds is {max}")]
    Guard { needed: usize, max: usize },
    #[error("empty atom context")]
    EmptyContext,
    #[error("generalized mode needs at least two worlds")]
    TooFewWorlds,
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("base must be a nontrivial set of the current stage")]
    TrivialBase,
    #[error("stage mismatch: expected stage {expected}, got {found}")]
    StageMismatch { expected: usize, found: usize },
    #[error("task list is empty")]
    EmptyTaskList,
    #[error("task list slots must come in complement pairs")]
    BadTaskList,
    #[error("conditional set is undefined for this antecedent")]
    Undefined,
    #[error("no measure attached")]
    NoMeasure,
    #[error("distribution does not match the model's stage-0 worlds")]
    DistributionMismatch,
    #[error("distribution has zero-weight worlds; use the smoothed extension")]
    Degenerate,
    #[error("zero mass met while dividing in a construction step")]
    ZeroMass,
    #[error("rational function is unbounded at 0")]
    Unbounded,
    #[error("faithful schedule gave up after {0} steps")]
    StepCap(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown world `{label}`")]
    UnknownWorld { line: usize, label: String },
    #[error("line {line}: duplicate world `{label}`")]
    DuplicateWorld { line: usize, label: String },
    #[error("line {line}: negative weight")]
    Negative { line: usize },
    #[error("weights sum to {0}, not 1")]
    BadTotal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DumpError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported dump version `{0}`")]
    Version(String),
    #[error("line {line}: unexpected end of dump")]
    Truncated { line: usize },
    #[error("line {line}: replay disagrees with the dump: {message}")]
    Mismatch { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}
