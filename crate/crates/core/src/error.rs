use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape m={m}, n={n}, t={t}: require t ≤ m ≤ n with all values ≥ 1")]
    InvalidShape { m: i64, n: i64, t: i64 },

    #[error("invalid minor: {0}")]
    InvalidMinor(String),

    #[error("k = {k} out of range [{lo}, {hi}]")]
    KOutOfRange { k: i64, lo: i64, hi: i64 },

    #[error("polynomials live in different rings ({0})")]
    RingMismatch(String),

    #[error("zero polynomial has no initial form")]
    ZeroPolynomial,

    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
