use thiserror::Error;

/// Errors surfaced by scenario validation, chain construction, and solves.
#[derive(Debug, Error)]
pub enum Error {
    /// A scenario or argument violates its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Building a chain would exceed the configured state cap. `states` is
    /// `None` when the count does not even fit in 128 bits.
    #[error("chain needs {} states, over the cap of {cap}", states.map_or("more than 2^128".to_string(), |s| s.to_string()))]
    StateSpaceTooLarge { states: Option<u128>, cap: usize },

    /// A transient state keeps all its probability mass, so absorption is
    /// unreachable from it and the expected absorption time diverges.
    #[error("state {state} has self-loop probability 1")]
    SingularSelfLoop { state: String },

    /// The relay-ahead probability is undefined for a loss-free source link
    /// (the relay is never behind; the correction term is zero by definition).
    #[error("relay-ahead probability is undefined at p_relay = 1")]
    PerfectRelayLink,

    /// Inclusion-exclusion over receiver subsets is capped to keep the 2^R
    /// term enumeration desk-scale.
    #[error("{receivers} receivers exceed the subset-enumeration cap of {cap}")]
    TooManyReceivers { receivers: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
