use serde::{Deserialize, Serialize};

use super::EmoError;

/// Pareto relation between two objective vectors (all objectives minimized).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Dominance {
    ADominates,
    BDominates,
    Incomparable,
}

impl Dominance {
    pub fn flip(self) -> Self {
        match self {
            Dominance::ADominates => Dominance::BDominates,
            Dominance::BDominates => Dominance::ADominates,
            Dominance::Incomparable => Dominance::Incomparable,
        }
    }
}

/// Compares `a` and `b`; equal vectors are incomparable.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<Dominance, EmoError> {
    if a.len() != b.len() {
        return Err(EmoError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(compare(a, b))
}

pub(crate) fn compare(a: &[f64], b: &[f64]) -> Dominance {
    let mut a_better = false;
    let mut b_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            a_better = true;
        } else if y < x {
            b_better = true;
        }
        if a_better && b_better {
            return Dominance::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, false) => Dominance::ADominates,
        (false, true) => Dominance::BDominates,
        _ => Dominance::Incomparable,
    }
}
