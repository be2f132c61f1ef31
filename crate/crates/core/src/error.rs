use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sequence of length {len} is too short (need at least 2 elements)")]
    Degenerate { len: usize },

    #[error("value {value} outside the alphabet 1..={n}")]
    ValueOutOfRange { value: usize, n: usize },

    #[error("alphabet size {0} is not supported (must be between 1 and 255)")]
    AlphabetSize(usize),

    #[error("not a permutation of 1..={n}: {values:?}")]
    NotAPermutation { values: Vec<u8>, n: usize },

    #[error("code has no 1-bit, so no lambda decomposition exists")]
    NoAscent,

    #[error("position {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{0}")]
    Domain(String),

    #[error("unknown catalog key `{0}`")]
    UnknownKey(String),

    #[error("pattern value {value} is not in the cycle alphabet 1..={n}")]
    AlphabetMismatch { value: usize, n: usize },

    #[error(
        "n = {n} exceeds the enumeration cap {cap}: {perms} permutations x {length} positions \
         (~{cost:.2e} symbol steps); raise the cap explicitly to proceed"
    )]
    CapExceeded {
        n: usize,
        cap: usize,
        perms: f64,
        length: usize,
        cost: f64,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("infeasible search configuration: {0}")]
    Infeasible(String),
}
