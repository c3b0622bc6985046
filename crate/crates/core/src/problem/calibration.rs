//! Calibration of the benchmark's conflicting terms.
//!
//! Along the benchmark's Pareto front every point minimizes
//! `total_cost + lambda * impact` for some `lambda >= 0`, and because the
//! conflicting terms are separable that minimizer has a closed form:
//! primary variables solve `phi'(u) = lambda * B / A`, secondary variables
//! sit at `min(1, lambda * R / (2 S))`. The search below adjusts the
//! primary cost profile until the front's knee lands on the target, and
//! sizes each secondary cost so that the variable saturates at a chosen
//! fraction of the front.

use serde::{Deserialize, Serialize};

use super::instance::Shape;
use super::ProblemError;

pub const CALIBRATION_FORMAT: &str = "paretoinfer/benchmark-calibration";
pub const CALIBRATION_VERSION: u32 = 1;

const COMMITTED: &str = include_str!("../../fixtures/benchmark_calibration.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub cost_floor: f64,
    pub cost_ceiling: f64,
    pub impact_floor: f64,
    pub impact_ceiling: f64,
    pub knee_cost: f64,
    pub knee_impact: f64,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self {
            cost_floor: 200.0,
            cost_ceiling: 240.0,
            impact_floor: 0.115,
            impact_ceiling: 1.004,
            knee_cost: 218.66,
            knee_impact: 0.401,
        }
    }
}

impl CalibrationTargets {
    fn cost_span(&self) -> f64 {
        self.cost_ceiling - self.cost_floor
    }

    fn impact_span(&self) -> f64 {
        self.impact_ceiling - self.impact_floor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimaryShape {
    pub share: f64,
    pub low_exponent: f64,
    pub high_exponent: f64,
}

impl PrimaryShape {
    pub fn shape(&self) -> Shape {
        Shape::DualPower {
            share: self.share,
            low_exponent: self.low_exponent,
            high_exponent: self.high_exponent,
        }
    }
}

/// Calibrated coefficients of one conflicting variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermCoefficients {
    pub variable: usize,
    /// Cost added between the cheap and the clean bound, M$.
    pub cost_scale: f64,
    /// Weighted impact removed between the cheap and the clean bound.
    pub impact_scale: f64,
}

/// Free choices that the search does not touch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationDesign {
    pub tag: String,
    pub targets: CalibrationTargets,
    /// (variable, share of the primary cost and impact budgets)
    pub primary_split: Vec<(usize, f64)>,
    /// (variable, weighted impact scale, front fraction at which it saturates)
    pub secondary: Vec<(usize, f64, f64)>,
    pub initial_shape: PrimaryShape,
}

impl Default for CalibrationDesign {
    fn default() -> Self {
        Self {
            tag: "sip-benchmark-v1".into(),
            targets: CalibrationTargets::default(),
            primary_split: vec![(1, 0.27), (2, 0.23), (3, 0.30), (4, 0.20)],
            secondary: vec![
                (5, 0.032, 0.16),
                (6, 0.028, 0.17),
                (7, 0.030, 0.15),
                (8, 0.026, 0.16),
                (9, 0.024, 0.17),
            ],
            initial_shape: PrimaryShape {
                share: 0.67,
                low_exponent: 1.12,
                high_exponent: 6.0,
            },
        }
    }
}

/// Diagnostics recorded alongside the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub knee_cost: f64,
    pub knee_impact: f64,
    pub knee_distance: f64,
    pub max_secondary_fraction_error: f64,
    pub iterations: usize,
}

/// Output of [`calibrate`]; the committed copy lives in `fixtures/`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub format: String,
    pub version: u32,
    pub tag: String,
    pub targets: CalibrationTargets,
    pub primary_shape: PrimaryShape,
    pub primary: Vec<TermCoefficients>,
    pub secondary: Vec<TermCoefficients>,
    pub report: CalibrationReport,
}

impl Calibration {
    /// The coefficients shipped with the crate.
    pub fn committed() -> Self {
        Self::from_json(COMMITTED).expect("committed calibration fixture parses")
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let cal: Calibration = serde_json::from_str(text)
            .map_err(|e| ProblemError::InvalidInstance(format!("calibration fixture: {e}")))?;
        if cal.format != CALIBRATION_FORMAT || cal.version != CALIBRATION_VERSION {
            return Err(ProblemError::InvalidInstance(format!(
                "unsupported calibration {} v{}",
                cal.format, cal.version
            )));
        }
        Ok(cal)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("calibration serializes");
        text.push('\n');
        text
    }

    /// Closed-form front model for these coefficients.
    pub fn model(&self) -> FrontModel {
        FrontModel {
            targets: self.targets,
            shape: self.primary_shape,
            primary_cost: self.primary.iter().map(|t| t.cost_scale).sum(),
            primary_impact: self.primary.iter().map(|t| t.impact_scale).sum(),
            secondary: self
                .secondary
                .iter()
                .map(|t| (t.cost_scale, t.impact_scale))
                .collect(),
        }
    }
}

/// Point of the closed-form front at trade-off rate `lambda` (M$ per impact unit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    pub lambda: f64,
    pub total_cost: f64,
    pub impact: f64,
    /// Common position of the primary variables, 0 at the cheap bound.
    pub primary_position: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontModel {
    targets: CalibrationTargets,
    shape: PrimaryShape,
    primary_cost: f64,
    primary_impact: f64,
    secondary: Vec<(f64, f64)>,
}

impl FrontModel {
    fn primary_position(&self, lambda: f64) -> f64 {
        let shape = self.shape.shape();
        let target = lambda * self.primary_impact / self.primary_cost;
        if target <= shape.slope(0.0) {
            return 0.0;
        }
        if target >= shape.slope(1.0) {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if shape.slope(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn point(&self, lambda: f64) -> ModelPoint {
        let u = self.primary_position(lambda);
        let mut cost = self.targets.cost_floor + self.primary_cost * self.shape.shape().value(u);
        let mut impact = self.targets.impact_floor + self.primary_impact * (1.0 - u);
        for &(s, r) in &self.secondary {
            let v = (lambda * r / (2.0 * s)).min(1.0);
            cost += s * v * v;
            impact += r * (1.0 - v);
        }
        ModelPoint {
            lambda,
            total_cost: cost,
            impact,
            primary_position: u,
        }
    }

    /// Rate beyond which every conflicting variable sits at its clean bound.
    pub fn saturation_lambda(&self) -> f64 {
        let primary = self.shape.shape().slope(1.0) * self.primary_cost / self.primary_impact;
        self.secondary
            .iter()
            .map(|&(s, r)| 2.0 * s / r)
            .fold(primary, f64::max)
    }

    fn normalized(&self, p: &ModelPoint) -> (f64, f64) {
        (
            (p.total_cost - self.targets.cost_floor) / self.targets.cost_span(),
            (p.impact - self.targets.impact_floor) / self.targets.impact_span(),
        )
    }

    /// Share of the normalized L1 arc length from the cheap end.
    pub fn fraction(&self, lambda: f64) -> f64 {
        let (c, i) = self.normalized(&self.point(lambda));
        0.5 * (c + 1.0 - i)
    }

    /// Chord distance `(1 - c - i) / sqrt 2` in normalized objective space.
    pub fn chord_distance(&self, lambda: f64) -> f64 {
        let (c, i) = self.normalized(&self.point(lambda));
        (1.0 - c - i) / std::f64::consts::SQRT_2
    }

    pub fn knee(&self) -> ModelPoint {
        let top = self.saturation_lambda();
        let grid = 4000;
        let best = (0..=grid)
            .map(|k| top * k as f64 / grid as f64)
            .max_by(|a, b| self.chord_distance(*a).total_cmp(&self.chord_distance(*b)))
            .unwrap();
        let step = top / grid as f64;
        let (mut a, mut b) = ((best - step).max(0.0), (best + step).min(top));
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let m1 = b - inv_phi * (b - a);
            let m2 = a + inv_phi * (b - a);
            if self.chord_distance(m1) < self.chord_distance(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        self.point(0.5 * (a + b))
    }

    /// Rate at which the front reaches `fraction` of its arc length.
    pub fn lambda_at_fraction(&self, fraction: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.saturation_lambda());
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.fraction(mid) < fraction {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Dense sample of the front from the cheap end to the clean end.
    pub fn sample(&self, n: usize) -> Vec<ModelPoint> {
        let top = self.saturation_lambda();
        (0..n)
            .map(|k| self.point(top * k as f64 / (n - 1) as f64))
            .collect()
    }
}

fn model_for(design: &CalibrationDesign, shape: PrimaryShape, secondary_cost: &[f64]) -> FrontModel {
    let t = design.targets;
    let secondary_impact: f64 = design.secondary.iter().map(|s| s.1).sum();
    FrontModel {
        targets: t,
        shape,
        primary_cost: t.cost_span() - secondary_cost.iter().sum::<f64>(),
        primary_impact: t.impact_span() - secondary_impact,
        secondary: design
            .secondary
            .iter()
            .zip(secondary_cost)
            .map(|(s, c)| (*c, s.1))
            .collect(),
    }
}

fn knee_residual(model: &FrontModel, t: &CalibrationTargets) -> [f64; 2] {
    let k = model.knee();
    [
        (k.total_cost - t.knee_cost) / t.cost_span(),
        (k.impact - t.knee_impact) / t.impact_span(),
    ]
}

fn clamp_shape(s: PrimaryShape) -> PrimaryShape {
    PrimaryShape {
        share: s.share.clamp(1e-3, 0.999),
        low_exponent: s.low_exponent.clamp(1.0, s.high_exponent),
        high_exponent: s.high_exponent,
    }
}

/// Searches the primary profile and secondary cost scales for `design`.
pub fn calibrate(design: &CalibrationDesign) -> Result<Calibration, ProblemError> {
    let t = design.targets;
    let mut shape = design.initial_shape;
    let mut secondary_cost: Vec<f64> = vec![0.2; design.secondary.len()];
    let mut iterations = 0;

    for _outer in 0..60 {
        // damped Newton on the knee position with a finite-difference Jacobian
        for _ in 0..40 {
            iterations += 1;
            let model = model_for(design, shape, &secondary_cost);
            let r = knee_residual(&model, &t);
            if r[0].abs().max(r[1].abs()) < 1e-10 {
                break;
            }
            let h_share = 1e-6;
            let h_exp = 1e-5;
            let r_share = knee_residual(
                &model_for(
                    design,
                    PrimaryShape {
                        share: shape.share + h_share,
                        ..shape
                    },
                    &secondary_cost,
                ),
                &t,
            );
            let r_exp = knee_residual(
                &model_for(
                    design,
                    PrimaryShape {
                        low_exponent: shape.low_exponent + h_exp,
                        ..shape
                    },
                    &secondary_cost,
                ),
                &t,
            );
            let j = [
                [(r_share[0] - r[0]) / h_share, (r_exp[0] - r[0]) / h_exp],
                [(r_share[1] - r[1]) / h_share, (r_exp[1] - r[1]) / h_exp],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-14 {
                return Err(ProblemError::Calibration(
                    "knee position is insensitive to the primary profile".into(),
                ));
            }
            let d_share = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
            let d_exp = (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
            let mut damping = 1.0;
            let base = r[0].hypot(r[1]);
            loop {
                let trial = clamp_shape(PrimaryShape {
                    share: shape.share - damping * d_share,
                    low_exponent: shape.low_exponent - damping * d_exp,
                    high_exponent: shape.high_exponent,
                });
                let tr = knee_residual(&model_for(design, trial, &secondary_cost), &t);
                if tr[0].hypot(tr[1]) < base || damping < 1e-4 {
                    shape = trial;
                    break;
                }
                damping *= 0.5;
            }
        }

        // resize secondary costs so each saturates at its target fraction
        let model = model_for(design, shape, &secondary_cost);
        let updated: Vec<f64> = design
            .secondary
            .iter()
            .map(|&(_, impact, fraction)| model.lambda_at_fraction(fraction) * impact / 2.0)
            .collect();
        let change = updated
            .iter()
            .zip(&secondary_cost)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        secondary_cost = updated;
        if change < 1e-11 {
            break;
        }
    }

    let model = model_for(design, shape, &secondary_cost);
    let knee = model.knee();
    let fraction_error = design
        .secondary
        .iter()
        .zip(&secondary_cost)
        .map(|(&(_, r, target), &s)| (model.fraction(2.0 * s / r) - target).abs())
        .fold(0.0, f64::max);
    let r = knee_residual(&model, &t);
    if r[0].abs().max(r[1].abs()) > 1e-6 || fraction_error > 1e-6 {
        return Err(ProblemError::Calibration(format!(
            "did not converge: knee residual {r:?}, fraction error {fraction_error:e}"
        )));
    }

    let primary_cost = model.primary_cost;
    let primary_impact = model.primary_impact;
    Ok(Calibration {
        format: CALIBRATION_FORMAT.into(),
        version: CALIBRATION_VERSION,
        tag: design.tag.clone(),
        targets: t,
        primary_shape: shape,
        primary: design
            .primary_split
            .iter()
            .map(|&(variable, share)| TermCoefficients {
                variable,
                cost_scale: share * primary_cost,
                impact_scale: share * primary_impact,
            })
            .collect(),
        secondary: design
            .secondary
            .iter()
            .zip(&secondary_cost)
            .map(|(&(variable, impact, _), &cost)| TermCoefficients {
                variable,
                cost_scale: cost,
                impact_scale: impact,
            })
            .collect(),
        report: CalibrationReport {
            knee_cost: knee.total_cost,
            knee_impact: knee.impact,
            knee_distance: model.chord_distance(knee.lambda),
            max_secondary_fraction_error: fraction_error,
            iterations,
        },
    })
}
