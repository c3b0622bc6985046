use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::front::{FrontSolution, ParetoFront};
use super::AnalyticsError;
use crate::problem::ObjectiveVector;

pub const TOP_VARIABLE_DELTAS: usize = 5;
/// Chord distances closer than this count as ties.
pub const KNEE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes<'a> {
    pub min_cost: &'a FrontSolution,
    pub min_impact: &'a FrontSolution,
}

/// Per-objective argmin; ties go to the better other objective, then the lower number.
pub fn extremes(front: &ParetoFront) -> Result<Extremes<'_>, AnalyticsError> {
    let s = front.solutions();
    if s.is_empty() {
        return Err(AnalyticsError::EmptyFront);
    }
    let pick = |key: fn(&FrontSolution) -> (f64, f64)| {
        s.iter()
            .min_by(|a, b| {
                let (ka, kb) = (key(a), key(b));
                ka.0.total_cmp(&kb.0)
                    .then(ka.1.total_cmp(&kb.1))
                    .then(a.number.cmp(&b.number))
            })
            .expect("non-empty")
    };
    Ok(Extremes {
        min_cost: pick(|x| (x.cost(), x.impact())),
        min_impact: pick(|x| (x.impact(), x.cost())),
    })
}

/// Objective ranges used for min-max normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Extent {
    pub cost: (f64, f64),
    pub impact: (f64, f64),
}

impl Extent {
    pub(crate) fn of(front: &ParetoFront) -> Self {
        let mut e = Extent {
            cost: (f64::INFINITY, f64::NEG_INFINITY),
            impact: (f64::INFINITY, f64::NEG_INFINITY),
        };
        for s in front.solutions() {
            e.cost = (e.cost.0.min(s.cost()), e.cost.1.max(s.cost()));
            e.impact = (e.impact.0.min(s.impact()), e.impact.1.max(s.impact()));
        }
        e
    }

    pub(crate) fn normalize(&self, o: &ObjectiveVector) -> (f64, f64) {
        (
            scale(o.total_cost, self.cost),
            scale(o.environmental_impact, self.impact),
        )
    }
}

fn scale(v: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knee<'a> {
    pub solution: &'a FrontSolution,
    /// Signed distance below the extremes' chord in normalized space.
    pub distance: f64,
}

/// Interior member farthest below the chord joining the two extremes.
pub fn knee(front: &ParetoFront) -> Result<Knee<'_>, AnalyticsError> {
    if front.len() < 3 {
        return Err(AnalyticsError::DegenerateFront {
            size: front.len(),
            needed: 3,
        });
    }
    let ext = extremes(front)?;
    let extent = Extent::of(front);
    let mut best: Option<Knee> = None;
    for s in front.solutions() {
        if s.number == ext.min_cost.number || s.number == ext.min_impact.number {
            continue;
        }
        let (c, i) = extent.normalize(&s.objectives);
        // chord from (0, 1) to (1, 0)
        let mut distance = (1.0 - c - i) / std::f64::consts::SQRT_2;
        if distance.abs() < KNEE_TOLERANCE {
            distance = 0.0;
        }
        // near-ties keep the lower solution number
        let better = match &best {
            None => true,
            Some(b) => {
                distance > b.distance + KNEE_TOLERANCE
                    || ((distance - b.distance).abs() <= KNEE_TOLERANCE
                        && s.number < b.solution.number)
            }
        };
        if better {
            best = Some(Knee { solution: s, distance });
        }
    }
    best.ok_or(AnalyticsError::DegenerateFront {
        size: front.len(),
        needed: 3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDelta {
    pub index: usize,
    pub name: String,
    pub unit: String,
    pub delta: f64,
    /// |delta| over the variable's range along the front.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeOffReport {
    pub solution_a: usize,
    pub solution_b: usize,
    pub delta_cost: f64,
    pub delta_impact: f64,
    pub top_variable_deltas: Vec<VariableDelta>,
}

/// Signed deltas b - a between two members, by solution number.
pub fn trade_off(front: &ParetoFront, a: usize, b: usize) -> Result<TradeOffReport, AnalyticsError> {
    trade_off_top(front, a, b, TOP_VARIABLE_DELTAS)
}

pub fn trade_off_top(
    front: &ParetoFront,
    a: usize,
    b: usize,
    k: usize,
) -> Result<TradeOffReport, AnalyticsError> {
    let sa = front.get(a)?;
    let sb = front.get(b)?;
    let mut deltas: Vec<VariableDelta> = front
        .columns()
        .iter()
        .enumerate()
        .map(|(p, col)| {
            let values = front.column_values(p);
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let delta = sb.x[p] - sa.x[p];
            VariableDelta {
                index: col.index,
                name: col.name.clone(),
                unit: col.unit.clone(),
                delta,
                normalized: if hi > lo { delta.abs() / (hi - lo) } else { 0.0 },
            }
        })
        .collect();
    deltas.sort_by(|x, y| y.normalized.total_cmp(&x.normalized).then(x.index.cmp(&y.index)));
    deltas.truncate(k);
    Ok(TradeOffReport {
        solution_a: a,
        solution_b: b,
        delta_cost: sb.cost() - sa.cost(),
        delta_impact: sb.impact() - sa.impact(),
        top_variable_deltas: deltas,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    ByIndex(usize),
    NearestTo(ObjectiveVector),
    Random(u64),
}

pub fn select(front: &ParetoFront, criteria: Selection) -> Result<&FrontSolution, AnalyticsError> {
    let s = front.solutions();
    if s.is_empty() {
        return Err(AnalyticsError::EmptyFront);
    }
    match criteria {
        Selection::ByIndex(n) => front.get(n),
        Selection::NearestTo(target) => {
            let extent = Extent::of(front);
            let (tc, ti) = extent.normalize(&target);
            let dist = |x: &FrontSolution| {
                let (c, i) = extent.normalize(&x.objectives);
                (c - tc).hypot(i - ti)
            };
            Ok(s.iter()
                .min_by(|a, b| dist(a).total_cmp(&dist(b)).then(a.number.cmp(&b.number)))
                .expect("non-empty"))
        }
        Selection::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(&s[rng.random_range(0..s.len())])
        }
    }
}
