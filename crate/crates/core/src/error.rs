use thiserror::Error;

/// Everything that can go wrong while building ideals or computing invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HkError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live in different rings")]
    RingMismatch,

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("invalid ideal: {0}")]
    InvalidIdeal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ordinary power must be at least 1 (the unit ideal is not representable)")]
    ZeroPower,

    #[error("{q} is not a power of the characteristic {p}")]
    NotPowerOfCharacteristic { q: u64, p: u64 },

    #[error("not m-primary: no pure power of the variable in direction {direction}, so the length is infinite")]
    NotMPrimary { direction: usize },

    #[error("cannot certify m-primary: no multiple N*r (N <= {bound}) of ray {ray} lies in the ideal")]
    CannotCertify { ray: usize, bound: u64 },

    #[error("inclusion-exclusion oracle is capped at {cap} generators, got {count}")]
    TooManyGenerators { count: usize, cap: usize },

    #[error("colength cross-check failed: inclusion-exclusion gave {ie}, corner splitting gave {dc}")]
    CrossCheckMismatch { ie: String, dc: String },

    #[error("Hilbert-Samuel function did not stabilize up to k = {k_max} (largest mismatch at k = {k}: sample {sample}, polynomial {polynomial})")]
    NoStabilization { k_max: usize, k: usize, sample: String, polynomial: String },

    #[error("budget too small: {0}")]
    BudgetTooSmall(String),

    #[error("enumeration budget exceeded: {points} points > cap {cap}")]
    EnumerationBudget { points: u128, cap: u64 },

    #[error("budget exceeded at e = {failed_e} (largest completed e = {completed}): {source}")]
    SequenceBudget { failed_e: u32, completed: u32, source: Box<HkError> },

    #[error("at q = {q}: {source}")]
    AtFrobeniusPower { q: u64, source: Box<HkError> },

    #[error("bound violated at q = {q}, k = {k}: length {length} >= bound {bound}")]
    BoundViolation { q: u64, k: u64, length: String, bound: String },

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("unsupported on this backend: {0}")]
    Unsupported(&'static str),
}

impl HkError {
    /// True for errors caused by running out of a computational budget rather
    /// than by invalid input or a failed check.
    pub fn is_budget(&self) -> bool {
        match self {
            HkError::NoStabilization { .. }
            | HkError::BudgetTooSmall(_)
            | HkError::EnumerationBudget { .. }
            | HkError::SequenceBudget { .. }
            | HkError::CannotCertify { .. } => true,
            HkError::AtFrobeniusPower { source, .. } => source.is_budget(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, HkError>;
