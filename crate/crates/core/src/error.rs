use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NegativeProbability: entry {index} is {value}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("NonFiniteProbability: entry {index} is {value}")]
    NonFiniteProbability { index: usize, value: f64 },

    #[error("SumNotOne: probabilities sum to {sum}")]
    SumNotOne { sum: f64 },

    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),

    #[error("UnsupportedUserCount: {users} users (supported range is {min}..={max})")]
    UnsupportedUserCount {
        users: usize,
        min: usize,
        max: usize,
    },

    #[error("EmptySubset")]
    EmptySubset,

    #[error("OverlappingSubsets: {0:#b} and {1:#b} share members")]
    OverlappingSubsets(u32, u32),

    #[error("SubsetOutOfRange: mask {mask:#b} exceeds {users} users")]
    SubsetOutOfRange { mask: u32, users: usize },

    #[error("WeightOutOfRange: weight {weight} not in {min}..={max}")]
    WeightOutOfRange {
        weight: usize,
        min: usize,
        max: usize,
    },

    #[error("ParameterOutOfRange: {0}")]
    ParameterOutOfRange(String),

    #[error("DivisionByZero: alpha({users},{s},{k}) vanishes")]
    DivisionByZero { users: usize, s: usize, k: usize },

    #[error("SingularSystem: I-measure linear system could not be solved")]
    SingularSystem,

    #[error("UserOutOfRange: user {user} with {users} users")]
    UserOutOfRange { user: usize, users: usize },

    #[error("UserCountMismatch: source has {source_users} users, channel has {channel_users}")]
    UserCountMismatch {
        source_users: usize,
        channel_users: usize,
    },

    #[error("InvalidField: {0}")]
    InvalidField(String),

    #[error("DegenerateChannel: user {user} has capacity {capacity} bits/use")]
    DegenerateChannel { user: usize, capacity: f64 },

    #[error("NegativeRate: rate of user {user} is {value}")]
    NegativeRate { user: usize, value: f64 },

    #[error("InvalidKappa: {0}")]
    InvalidKappa(f64),

    #[error("SymbolOutOfField: symbol {symbol} with field order {q}")]
    SymbolOutOfField { symbol: u32, q: u32 },

    #[error("IndexOutOfRange: index {index} with modulus {modulus}")]
    IndexOutOfRange { index: u64, modulus: u64 },

    #[error("TractabilityExceeded: {0}")]
    TractabilityExceeded(String),

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
