use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid identifier `{0}`")]
    InvalidName(String),

    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("formula has {atoms} atoms, exceeding the enumeration cap of {cap}")]
    AtomCapExceeded { atoms: usize, cap: usize },

    #[error("signal `{0}` is not in the output alphabet")]
    OutSetNotInAlphabet(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown region state `{0}`")]
    UnknownRState(String),

    #[error("unknown clock `{0}`")]
    UnknownClock(String),

    #[error("signal `{signal}` is an output of both `{first}` and `{second}`")]
    OverlappingOutputs {
        signal: String,
        first: String,
        second: String,
    },

    #[error("clock `{clock}` belongs to both `{first}` and `{second}`")]
    OverlappingClocks {
        clock: String,
        first: String,
        second: String,
    },

    #[error("product of an empty list of automata")]
    EmptyProduct,

    #[error("time delay must be nonnegative")]
    NegativeDelta,

    #[error("constant {constant} on clock `{clock}` exceeds its bound {bound}")]
    ConstantExceedsBound {
        clock: String,
        constant: u32,
        bound: u32,
    },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("region budget of {0} region states exceeded")]
    RegionBudgetExceeded(usize),

    #[error("automata are not comparable: {0}")]
    IncomparableAlphabets(String),

    #[error("error state `{0}` is not a state of the testing automaton")]
    UnknownErrorState(String),

    #[error("signal `{0}` is not an external input")]
    NonExternalSignal(String),

    #[error("malformed automaton: {0}")]
    Malformed(String),
}
