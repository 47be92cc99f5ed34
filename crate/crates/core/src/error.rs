use thiserror::Error;

/// Why the factored path refused an input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastPathReason {
    /// `c_0 = 0`, so `y` is not a unit modulo every squarefree factor.
    ZeroConstantCoefficient,
    /// `p <= d`; squarefree splitting and the binomial remainders need `p > d`.
    CharacteristicTooSmall,
    /// `D < 2d`; such indices are served by direct iteration.
    IndexTooSmall,
}

impl std::fmt::Display for FastPathReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FastPathReason::ZeroConstantCoefficient => f.write_str("c_0 must be nonzero"),
            FastPathReason::CharacteristicTooSmall => {
                f.write_str("modulus must exceed the recurrence order")
            }
            FastPathReason::IndexTooSmall => f.write_str("index must be at least twice the order"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrime(u64),
    #[error("modulus {0} outside the supported range 2 < p < 2^62")]
    OutOfRange(u128),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation needs p > {needed}, but p = {modulus}")]
    CharacteristicTooSmall { modulus: u64, needed: u64 },
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("moduli are not pairwise coprime")]
    NotCoprime,
    #[error("degree bound violated: degree {degree} must be below {bound}")]
    DegreeViolation { degree: usize, bound: usize },
    #[error("element does not belong to this ring")]
    RingMismatch,
    #[error("dimension {size} exceeds the dense bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("tangling failed: every projection was singular and no fallback applied")]
    SingularProjection,
    #[error("index exceeds the direct-iteration cap of {cap}")]
    IndexTooLarge { cap: u64 },
    #[error("factored path unavailable: {0}")]
    FastPathUnavailable(FastPathReason),
    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
