//! Evolutionary multi-objective optimization for sustainable infrastructure
//! planning, with Pareto-front analytics and persona-tailored explanations.

pub mod analytics;
pub mod emo;
pub mod inference;
pub mod problem;
