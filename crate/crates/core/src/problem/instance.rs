use serde::{Deserialize, Serialize};

use super::schema::{DecisionVector, VariableSchema};
use super::ProblemError;

pub const INSTANCE_FORMAT: &str = "paretoinfer/benchmark-instance";
pub const INSTANCE_VERSION: u32 = 1;

/// End of a variable's range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    Lower,
    Upper,
}

/// Monotone convex profile on the unit interval with `value(0) = 0` and `value(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Linear,
    Quadratic,
    /// `share * u^low_exponent + (1 - share) * u^high_exponent`
    DualPower {
        share: f64,
        low_exponent: f64,
        high_exponent: f64,
    },
}

impl Shape {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Shape::Linear => u,
            Shape::Quadratic => u * u,
            Shape::DualPower {
                share,
                low_exponent,
                high_exponent,
            } => share * u.powf(low_exponent) + (1.0 - share) * u.powf(high_exponent),
        }
    }

    pub fn slope(&self, u: f64) -> f64 {
        match *self {
            Shape::Linear => 1.0,
            Shape::Quadratic => 2.0 * u,
            Shape::DualPower {
                share,
                low_exponent,
                high_exponent,
            } => {
                share * low_exponent * u.powf(low_exponent - 1.0)
                    + (1.0 - share) * high_exponent * u.powf(high_exponent - 1.0)
            }
        }
    }

    fn is_valid(&self) -> bool {
        match *self {
            Shape::Linear | Shape::Quadratic => true,
            Shape::DualPower {
                share,
                low_exponent,
                high_exponent,
            } => {
                (0.0..=1.0).contains(&share)
                    && low_exponent >= 1.0
                    && high_exponent >= 1.0
                    && low_exponent.is_finite()
                    && high_exponent.is_finite()
            }
        }
    }
}

/// Normalized distance of `value` from one end of `[lower, upper]`.
pub(crate) fn distance_from(side: BoundSide, value: f64, lower: f64, upper: f64) -> f64 {
    let z = (value - lower) / (upper - lower);
    match side {
        BoundSide::Lower => z,
        BoundSide::Upper => 1.0 - z,
    }
}

/// `scale * shape(u)`, where `u` is the distance from the cheap end of the variable's range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTerm {
    pub variable: usize,
    pub scale: f64,
    pub cheap_at: BoundSide,
    pub shape: Shape,
}

/// A cost component in M$: a constant plus convex monotone terms over a few variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostComponent {
    pub name: String,
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<CostTerm>,
}

impl CostComponent {
    pub fn constant(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            constant: value,
            terms: Vec::new(),
        }
    }
}

/// `slope * u`, where `u` is the distance from the clean end of the variable's range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactTerm {
    pub variable: usize,
    pub slope: f64,
    pub clean_at: BoundSide,
}

/// A nonnegative environmental impact factor, affine in its variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactFactor {
    pub name: String,
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<ImpactTerm>,
}

impl ImpactFactor {
    pub fn constant(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            constant: value,
            terms: Vec::new(),
        }
    }
}

/// Evaluated objective pair; both are minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// M$
    pub total_cost: f64,
    pub environmental_impact: f64,
}

impl ObjectiveVector {
    pub fn new(total_cost: f64, environmental_impact: f64) -> Self {
        Self {
            total_cost,
            environmental_impact,
        }
    }

    pub fn to_array(&self) -> [f64; 2] {
        [self.total_cost, self.environmental_impact]
    }

    pub fn from_slice(f: &[f64]) -> Option<Self> {
        match f {
            [c, i] => Some(Self::new(*c, *i)),
            _ => None,
        }
    }
}

/// A concrete two-objective planning problem over a variable schema.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    schema: VariableSchema,
    cost_components: Vec<CostComponent>,
    impact_factors: Vec<ImpactFactor>,
    impact_weights: Vec<f64>,
    calibration_tag: String,
    seed: u64,
    // (schema position, term) pairs resolved once at construction
    cost_plan: Vec<Vec<(usize, CostTerm)>>,
    impact_plan: Vec<Vec<(usize, ImpactTerm)>>,
}

impl ProblemInstance {
    pub fn new(
        schema: VariableSchema,
        cost_components: Vec<CostComponent>,
        impact_factors: Vec<ImpactFactor>,
        impact_weights: Vec<f64>,
        calibration_tag: impl Into<String>,
        seed: u64,
    ) -> Result<Self, ProblemError> {
        if impact_weights.len() != impact_factors.len() {
            return Err(ProblemError::WeightCount {
                weights: impact_weights.len(),
                factors: impact_factors.len(),
            });
        }
        if impact_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(ProblemError::InvalidInstance(
                "impact weights must be finite and nonnegative".into(),
            ));
        }
        if !impact_weights.is_empty() && impact_weights.iter().sum::<f64>() <= 0.0 {
            return Err(ProblemError::InvalidInstance(
                "impact weights must not all be zero".into(),
            ));
        }

        let resolve = |variable: usize| {
            schema
                .position(variable)
                .ok_or(ProblemError::UnknownVariable(variable))
        };

        let mut cost_plan = Vec::with_capacity(cost_components.len());
        for component in &cost_components {
            if !component.constant.is_finite() {
                return Err(ProblemError::InvalidInstance(format!(
                    "cost component `{}` has a non-finite constant",
                    component.name
                )));
            }
            let mut plan = Vec::with_capacity(component.terms.len());
            for term in &component.terms {
                if !(term.scale.is_finite() && term.scale >= 0.0) || !term.shape.is_valid() {
                    return Err(ProblemError::InvalidInstance(format!(
                        "cost component `{}` has an invalid term on variable {}",
                        component.name, term.variable
                    )));
                }
                plan.push((resolve(term.variable)?, term.clone()));
            }
            cost_plan.push(plan);
        }

        let mut impact_plan = Vec::with_capacity(impact_factors.len());
        for factor in &impact_factors {
            if !(factor.constant.is_finite() && factor.constant >= 0.0) {
                return Err(ProblemError::InvalidInstance(format!(
                    "impact factor `{}` must have a nonnegative constant",
                    factor.name
                )));
            }
            let mut plan = Vec::with_capacity(factor.terms.len());
            for term in &factor.terms {
                if !(term.slope.is_finite() && term.slope >= 0.0) {
                    return Err(ProblemError::InvalidInstance(format!(
                        "impact factor `{}` has a negative slope on variable {}",
                        factor.name, term.variable
                    )));
                }
                plan.push((resolve(term.variable)?, term.clone()));
            }
            impact_plan.push(plan);
        }

        Ok(Self {
            schema,
            cost_components,
            impact_factors,
            impact_weights,
            calibration_tag: calibration_tag.into(),
            seed,
            cost_plan,
            impact_plan,
        })
    }

    pub fn schema(&self) -> &VariableSchema {
        &self.schema
    }

    pub fn cost_components(&self) -> &[CostComponent] {
        &self.cost_components
    }

    pub fn impact_factors(&self) -> &[ImpactFactor] {
        &self.impact_factors
    }

    pub fn impact_weights(&self) -> &[f64] {
        &self.impact_weights
    }

    pub fn calibration_tag(&self) -> &str {
        &self.calibration_tag
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stable identifier carried by runs and fronts.
    pub fn instance_ref(&self) -> String {
        format!("{}#seed={}", self.calibration_tag, self.seed)
    }

    /// Same instance with every impact weight multiplied by `factor >= 0`.
    /// A zero factor is allowed here even though construction rejects
    /// all-zero weights, so the impact's linearity holds down to 0.
    pub fn with_scaled_weights(&self, factor: f64) -> Result<Self, ProblemError> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(ProblemError::InvalidInstance(format!(
                "weight factor {factor} must be finite and >= 0"
            )));
        }
        Ok(Self {
            impact_weights: self.impact_weights.iter().map(|w| w * factor).collect(),
            ..self.clone()
        })
    }

    /// Value of cost component `k` at `x`; `x` must already be validated.
    pub fn cost_component_value(&self, k: usize, x: &[f64]) -> f64 {
        let specs = self.schema.variables();
        self.cost_plan[k]
            .iter()
            .fold(self.cost_components[k].constant, |acc, (pos, term)| {
                let spec = &specs[*pos];
                let u = distance_from(term.cheap_at, x[*pos], spec.lower, spec.upper);
                acc + term.scale * term.shape.value(u)
            })
    }

    /// Value of impact factor `j` at `x`; `x` must already be validated.
    pub fn impact_factor_value(&self, j: usize, x: &[f64]) -> f64 {
        let specs = self.schema.variables();
        self.impact_plan[j]
            .iter()
            .fold(self.impact_factors[j].constant, |acc, (pos, term)| {
                let spec = &specs[*pos];
                let u = distance_from(term.clean_at, x[*pos], spec.lower, spec.upper);
                acc + term.slope * u
            })
    }

    pub(crate) fn total_cost_unchecked(&self, x: &[f64]) -> f64 {
        (0..self.cost_components.len())
            .map(|k| self.cost_component_value(k, x))
            .sum()
    }

    pub(crate) fn impact_unchecked(&self, x: &[f64]) -> f64 {
        self.impact_weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * self.impact_factor_value(j, x))
            .sum()
    }

    /// Sum of all cost components at `x`, in M$.
    pub fn total_cost(&self, x: &DecisionVector) -> Result<f64, ProblemError> {
        self.schema.validate(x)?;
        Ok(self.total_cost_unchecked(x.values()))
    }

    /// Weighted sum of impact factors at `x`.
    pub fn environmental_impact(&self, x: &DecisionVector) -> Result<f64, ProblemError> {
        self.schema.validate(x)?;
        Ok(self.impact_unchecked(x.values()))
    }

    pub fn evaluate(&self, x: &DecisionVector) -> Result<ObjectiveVector, ProblemError> {
        self.schema.validate(x)?;
        Ok(ObjectiveVector::new(
            self.total_cost_unchecked(x.values()),
            self.impact_unchecked(x.values()),
        ))
    }

    /// Worst objective values attainable in the box, used as a hypervolume reference.
    pub fn nadir_bound(&self) -> ObjectiveVector {
        let cost = self.cost_components.iter().fold(0.0, |acc, c| {
            acc + c.constant + c.terms.iter().map(|t| t.scale).sum::<f64>()
        });
        let impact = self
            .impact_factors
            .iter()
            .zip(&self.impact_weights)
            .fold(0.0, |acc, (f, w)| {
                acc + w * (f.constant + f.terms.iter().map(|t| t.slope).sum::<f64>())
            });
        ObjectiveVector::new(cost, impact)
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            format: INSTANCE_FORMAT.to_string(),
            version: INSTANCE_VERSION,
            calibration_tag: self.calibration_tag.clone(),
            seed: self.seed,
            schema: self.schema.clone(),
            cost_components: self.cost_components.clone(),
            impact_factors: self.impact_factors.clone(),
            impact_weights: self.impact_weights.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let doc: InstanceDocument = serde_json::from_str(text)
            .map_err(|e| ProblemError::InvalidInstance(format!("malformed document: {e}")))?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: InstanceDocument) -> Result<Self, ProblemError> {
        if doc.format != INSTANCE_FORMAT || doc.version != INSTANCE_VERSION {
            return Err(ProblemError::InvalidInstance(format!(
                "unsupported document {} v{}",
                doc.format, doc.version
            )));
        }
        Self::new(
            doc.schema,
            doc.cost_components,
            doc.impact_factors,
            doc.impact_weights,
            doc.calibration_tag,
            doc.seed,
        )
    }
}

/// Versioned, self-describing serialized form of a [`ProblemInstance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub format: String,
    pub version: u32,
    pub calibration_tag: String,
    pub seed: u64,
    pub schema: VariableSchema,
    pub cost_components: Vec<CostComponent>,
    pub impact_factors: Vec<ImpactFactor>,
    pub impact_weights: Vec<f64>,
}
