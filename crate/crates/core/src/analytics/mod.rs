//! Decision-support facts over a Pareto front: extremes, knee, variable
//! importance tiers, trade-off deltas and solution lookup.

mod front;
mod importance;
mod metrics;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use front::{
    sample_front, FrontColumn, FrontSolution, ParetoFront, COL_COST, COL_IMPACT, COL_NUMBER,
};
pub use importance::{
    average_ranks, categorize_variables, tier_for, ImportanceTiers, VariableScore,
    PRIMARY_THRESHOLD, RECOMMENDED_FRONT_SIZE, SECONDARY_THRESHOLD,
};
pub use metrics::{
    extremes, knee, select, trade_off, trade_off_top, Extremes, Knee, Selection, TradeOffReport,
    VariableDelta, KNEE_TOLERANCE, TOP_VARIABLE_DELTAS,
};

use crate::problem::ObjectiveVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("front is empty")]
    EmptyFront,
    #[error("front has {size} members, need at least {needed}")]
    DegenerateFront { size: usize, needed: usize },
    #[error("no solution numbered {0}")]
    UnknownSolution(usize),
    #[error("solution {dominated} is dominated by solution {by}")]
    Dominated { dominated: usize, by: usize },
    #[error("solution number {0} appears twice")]
    DuplicateNumber(usize),
    #[error("solution {number} has {found} values, expected {expected}")]
    ColumnMismatch {
        number: usize,
        expected: usize,
        found: usize,
    },
    #[error("solution {0} has a non-finite value")]
    NonFinite(usize),
    #[error("csv: {0}")]
    Csv(String),
}

pub const BUNDLE_FORMAT: &str = "paretoinfer/analytics";
pub const BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionRef {
    pub number: usize,
    pub objectives: ObjectiveVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KneeRef {
    pub number: usize,
    pub objectives: ObjectiveVector,
    pub distance: f64,
}

/// Extremes, knee and tiers of one front. Knee and tiers are absent on
/// fronts too small to define them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsBundle {
    pub format: String,
    pub version: u32,
    pub instance_ref: String,
    pub front_size: usize,
    pub min_cost: SolutionRef,
    pub min_impact: SolutionRef,
    pub knee: Option<KneeRef>,
    pub tiers: Option<ImportanceTiers>,
}

impl AnalyticsBundle {
    pub fn compute(front: &ParetoFront) -> Result<Self, AnalyticsError> {
        let ext = extremes(front)?;
        let as_ref = |s: &FrontSolution| SolutionRef {
            number: s.number,
            objectives: s.objectives,
        };
        let knee = match knee(front) {
            Ok(k) => Some(KneeRef {
                number: k.solution.number,
                objectives: k.solution.objectives,
                distance: k.distance,
            }),
            Err(AnalyticsError::DegenerateFront { .. }) => None,
            Err(e) => return Err(e),
        };
        let tiers = match categorize_variables(front) {
            Ok(t) => Some(t),
            Err(AnalyticsError::DegenerateFront { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            format: BUNDLE_FORMAT.into(),
            version: BUNDLE_VERSION,
            instance_ref: front.instance_ref().to_string(),
            front_size: front.len(),
            min_cost: as_ref(ext.min_cost),
            min_impact: as_ref(ext.min_impact),
            knee,
            tiers,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }
}
