use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::ProblemError;

/// Which end of a variable's range the planner considers desirable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Higher,
    Lower,
}

/// Importance tier of a decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Primary,
    Secondary,
    Additional,
}

impl Tier {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tier::Primary => "primary",
            Tier::Secondary => "secondary",
            Tier::Additional => "additional",
        }
    }
}

/// One decision variable: a named, bounded real quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    /// 1-based catalog number.
    pub index: usize,
    pub name: String,
    pub unit: String,
    pub lower: f64,
    pub upper: f64,
    pub better_direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier_hint: Option<Tier>,
}

impl VariableSpec {
    pub fn new(
        index: usize,
        name: impl Into<String>,
        unit: impl Into<String>,
        lower: f64,
        upper: f64,
        better_direction: Direction,
    ) -> Self {
        Self {
            index,
            name: name.into(),
            unit: unit.into(),
            lower,
            upper,
            better_direction,
            tier_hint: None,
        }
    }

    pub fn with_tier(mut self, tier: Tier) -> Self {
        self.tier_hint = Some(tier);
        self
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        value.is_finite() && value >= self.lower && value <= self.upper
    }
}

/// Ordered catalog of decision variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableSchema {
    variables: Vec<VariableSpec>,
}

impl VariableSchema {
    pub fn new(variables: Vec<VariableSpec>) -> Result<Self, ProblemError> {
        let mut seen = HashSet::new();
        for v in &variables {
            if !(v.lower < v.upper) || !v.lower.is_finite() || !v.upper.is_finite() {
                return Err(ProblemError::InvalidBounds {
                    index: v.index,
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if !seen.insert(v.index) {
                return Err(ProblemError::DuplicateIndex(v.index));
            }
        }
        Ok(Self { variables })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Position of the variable with catalog number `index`.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.variables.iter().position(|v| v.index == index)
    }

    pub fn get(&self, index: usize) -> Option<&VariableSpec> {
        self.variables.iter().find(|v| v.index == index)
    }

    pub fn by_name(&self, name: &str) -> Option<&VariableSpec> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.variables.iter().map(|v| (v.lower, v.upper)).collect()
    }

    /// Checks dimension and box bounds, reporting the first offending variable.
    pub fn validate(&self, x: &DecisionVector) -> Result<(), ProblemError> {
        if x.len() != self.len() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.len(),
                found: x.len(),
            });
        }
        for (spec, &value) in self.variables.iter().zip(x.values()) {
            if !spec.contains(value) {
                return Err(ProblemError::OutOfBounds {
                    index: spec.index,
                    value,
                    lower: spec.lower,
                    upper: spec.upper,
                });
            }
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for VariableSchema {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            variables: Vec<VariableSpec>,
        }
        let raw = Raw::deserialize(deserializer)?;
        VariableSchema::new(raw.variables).map_err(serde::de::Error::custom)
    }
}

/// A point in decision space, in the schema's physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for DecisionVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var_schema() -> VariableSchema {
        VariableSchema::new(vec![
            VariableSpec::new(1, "A", "u", 0.0, 1.0, Direction::Higher),
            VariableSpec::new(2, "B", "u", -5.0, 5.0, Direction::Lower),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_inverted_bounds() {
        let err = VariableSchema::new(vec![VariableSpec::new(
            7,
            "Bad",
            "u",
            1.0,
            1.0,
            Direction::Higher,
        )])
        .unwrap_err();
        assert!(matches!(err, ProblemError::InvalidBounds { index: 7, .. }));
    }

    #[test]
    fn rejects_duplicate_index() {
        let err = VariableSchema::new(vec![
            VariableSpec::new(1, "A", "u", 0.0, 1.0, Direction::Higher),
            VariableSpec::new(1, "B", "u", 0.0, 1.0, Direction::Higher),
        ])
        .unwrap_err();
        assert!(matches!(err, ProblemError::DuplicateIndex(1)));
    }

    #[test]
    fn validation_names_offending_index() {
        let schema = two_var_schema();
        assert!(schema.validate(&vec![0.5, 5.0].into()).is_ok());
        match schema.validate(&vec![0.5, 5.5].into()) {
            Err(ProblemError::OutOfBounds { index, .. }) => assert_eq!(index, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            schema.validate(&vec![f64::NAN, 0.0].into()),
            Err(ProblemError::OutOfBounds { index: 1, .. })
        ));
        assert!(matches!(
            schema.validate(&vec![0.5].into()),
            Err(ProblemError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }
}
