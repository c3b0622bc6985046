//! Decision space, objectives, and the calibrated benchmark instance.

mod benchmark;
pub mod calibration;
mod instance;
mod schema;

use thiserror::Error;

pub use benchmark::{
    benchmark_schema, build_instance, make_benchmark_instance, COST_COMPONENTS, IMPACT_FACTORS,
    PRIMARY_VARIABLES, SECONDARY_VARIABLES,
};
pub use instance::{
    BoundSide, CostComponent, CostTerm, ImpactFactor, ImpactTerm, InstanceDocument,
    ObjectiveVector, ProblemInstance, Shape, INSTANCE_FORMAT, INSTANCE_VERSION,
};
pub use schema::{DecisionVector, Direction, Tier, VariableSchema, VariableSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("variable {index} = {value} is outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("expected {expected} decision variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable {index} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
    #[error("variable index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("term refers to unknown variable {0}")]
    UnknownVariable(usize),
    #[error("{weights} impact weights for {factors} impact factors")]
    WeightCount { weights: usize, factors: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
}
