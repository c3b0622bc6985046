//! NSGA-II: dominance, non-dominated sorting, crowding, variation, selection,
//! and a two-objective hypervolume indicator.

mod crowding;
mod dominance;
mod hypervolume;
mod nsga2;
mod operators;
mod rng;
mod sort;
mod zdt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::ProblemInstance;

pub use crowding::{crowding_distance, Crowding};
pub use dominance::{dominates, Dominance};
pub use hypervolume::hypervolume;
pub use nsga2::{run_nsga2, FrontRow, GenerationStats, RunDocument, RunResult, RUN_FORMAT, RUN_VERSION};
pub use operators::{polynomial_mutation, sbx_crossover};
pub use rng::{engine_rng, split_rng, EngineRng};
pub use sort::{fast_nondominated_sort, nondominated_indices, nondominated_sort};
pub use zdt::Zdt1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmoError {
    #[error("objective vectors have {left} and {right} components")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("evaluation failed at generation {generation}, individual {individual}: {message}")]
    Evaluation {
        generation: usize,
        individual: usize,
        message: String,
    },
    #[error("malformed run document: {0}")]
    Document(String),
}

/// A box-bounded minimization problem the engine can optimize.
pub trait Problem: Sync {
    fn bounds(&self) -> Vec<(f64, f64)>;
    fn num_objectives(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, String>;

    /// Reference point for the per-generation hypervolume.
    fn reference_point(&self) -> Option<Vec<f64>> {
        None
    }

    fn instance_ref(&self) -> String {
        "anonymous".into()
    }
}

impl Problem for ProblemInstance {
    fn bounds(&self) -> Vec<(f64, f64)> {
        self.schema().bounds()
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, String> {
        let f = ProblemInstance::evaluate(self, &x.to_vec().into()).map_err(|e| e.to_string())?;
        Ok(f.to_array().to_vec())
    }

    fn reference_point(&self) -> Option<Vec<f64>> {
        let nadir = self.nadir_bound();
        Some(vec![nadir.total_cost + 1.0, nadir.environmental_impact + 0.01])
    }

    fn instance_ref(&self) -> String {
        ProblemInstance::instance_ref(self)
    }
}

/// A population member with NSGA-II bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub rank: usize,
    pub crowding: Crowding,
}

impl Individual {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Self {
        Self {
            x,
            f,
            rank: 0,
            crowding: Crowding::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NsgaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub sbx_eta: f64,
    pub mutation_probability: f64,
    pub pm_eta: f64,
    pub seed: u64,
}

impl Default for NsgaParams {
    fn default() -> Self {
        Self {
            population_size: 500,
            generations: 250,
            crossover_probability: 0.9,
            sbx_eta: 15.0,
            mutation_probability: 1.0 / 50.0,
            pm_eta: 20.0,
            seed: 0,
        }
    }
}

impl NsgaParams {
    pub fn validate(&self) -> Result<(), EmoError> {
        let invalid = |field, reason: &str| {
            Err(EmoError::InvalidParams {
                field,
                reason: reason.to_string(),
            })
        };
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return invalid("population_size", "must be even and at least 4");
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return invalid("crossover_probability", "must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return invalid("mutation_probability", "must lie in [0, 1]");
        }
        if !(self.sbx_eta > 0.0 && self.sbx_eta.is_finite()) {
            return invalid("sbx_eta", "must be positive");
        }
        if !(self.pm_eta > 0.0 && self.pm_eta.is_finite()) {
            return invalid("pm_eta", "must be positive");
        }
        Ok(())
    }
}
