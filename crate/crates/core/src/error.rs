use std::fmt;

/// Errors from construction and domain checks across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Arm index outside `0..arms`.
    ArmIndex { index: usize, arms: usize },
    /// Agent index outside `0..agents`.
    AgentIndex { index: usize, agents: usize },
    /// Reward model violates a distribution invariant.
    InvalidModel(String),
    /// Graph specification is malformed (self-loop, duplicate edge, ...).
    InvalidGraph(String),
    /// Policy or bound parameters out of domain (xi <= 1, zeta <= 1, ...).
    InvalidParams(String),
    /// Scenario-level validation failure.
    InvalidScenario(String),
    /// Inputs to a comparison do not describe the same experiment.
    ShapeMismatch(String),
    /// Operation defined only for a subset of observation strategies.
    UnsupportedStrategy(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ArmIndex { index, arms } => {
                write!(f, "arm index {index} out of range (arms: {arms})")
            }
            Self::AgentIndex { index, agents } => {
                write!(f, "agent index {index} out of range (agents: {agents})")
            }
            Self::InvalidModel(msg) => write!(f, "invalid reward model: {msg}"),
            Self::InvalidGraph(msg) => write!(f, "invalid graph: {msg}"),
            Self::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Self::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            Self::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Self::UnsupportedStrategy(op) => {
                write!(f, "{op} is not defined for this observation strategy")
            }
        }
    }
}

impl std::error::Error for Error {}
