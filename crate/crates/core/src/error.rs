use thiserror::Error;

/// Errors surfaced by the library.
///
/// Construction-bug variants (`NoLift`, `NonUniqueLift`, `AxiomViolation`,
/// `ExtensionNotFound`) indicate that an input violated a structural
/// property it claimed to have; they are never silently repaired.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("group order exceeds cap {cap}")]
    OrderCapExceeded { cap: usize },
    #[error("group of order {order} exceeds lattice cap {cap}")]
    LatticeCapExceeded { order: usize, cap: usize },
    #[error("group of order {order} exceeds automorphism cap {cap}")]
    AutCapExceeded { order: usize, cap: usize },
    #[error("nerve has {count} chains, above cap {cap}")]
    NerveSizeExceeded { count: u128, cap: u128 },
    #[error("tower depth {requested} exceeds constructed depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },
    #[error("subgroup is not contained in its parent: {0}")]
    NotContained(String),
    #[error("subgroup {0} is not fully normalized")]
    NotFullyNormalized(String),
    #[error("object {0} is not F-centric")]
    NonCentricObject(String),
    #[error("target {0} is not an object of the linking system")]
    TargetNotObject(String),
    #[error("linking axiom violated: {0}")]
    AxiomViolation(String),
    #[error("no lift exists: {0}")]
    NoLift(String),
    #[error("lift is not unique: {0}")]
    NonUniqueLift(String),
    #[error("extension not found: {0}")]
    ExtensionNotFound(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("collection is not closed under F-conjugacy: {0}")]
    HNotClosed(String),
    #[error("collection misses centric-radical class {0}")]
    HMissingRadicals(String),
    #[error("invalid certificate link: {0}")]
    InvalidLink(String),
    #[error("integer overflow during exact arithmetic")]
    ArithmeticOverflow,
}

impl Error {
    /// Whether the error comes from a configured size cap.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::OrderCapExceeded { .. }
                | Error::LatticeCapExceeded { .. }
                | Error::AutCapExceeded { .. }
                | Error::NerveSizeExceeded { .. }
                | Error::DepthExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
