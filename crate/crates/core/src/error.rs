use thiserror::Error;

/// Errors reported by fallible library operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row subset is empty")]
    EmptySubset,
    #[error("subset has {len} rows, the closed-form limit is {limit}; use the xor oracle instead")]
    SubsetTooLarge { len: usize, limit: usize },
    #[error("message has {got} bits, expected {expected}")]
    MessageLength { got: usize, expected: usize },
    #[error("information length {k} exceeds the exhaustive limit {limit}")]
    InfoTooLarge { k: usize, limit: usize },
    #[error("list size must be at least 2")]
    ListTooSmall,
    #[error("no admissible triple for n={n}, level={level}")]
    NoAdmissibleTriple { n: usize, level: usize },
    #[error("ensemble of {m} triples exceeds the shift budget kappa+1 = {max}")]
    EnsembleTooLarge { m: usize, max: usize },
    #[error("triple cannot be canonicalized: {clause}")]
    CanonicalUnsat { clause: &'static str },
    #[error("not a valid merge triple: {reason}")]
    InvalidTriple { reason: String },
    #[error("invalid code description: {0}")]
    BadSpec(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
