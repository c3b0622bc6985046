//! Synthetic sustainable-infrastructure benchmark with 50 decision variables.
//!
//! Four "primary" variables carry the main cost/impact conflict through a
//! convex cost profile and a linear impact reduction. Five "secondary"
//! variables carry a small conflict that saturates early along the front.
//! The remaining variables have no conflict: their cheap end is also their
//! clean end, so every Pareto-optimal design pins them to that bound.
//! Coefficients of the conflicting terms come from the committed calibration
//! fixture; the non-conflicting coefficients are drawn from the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::calibration::Calibration;
use super::instance::{
    BoundSide, CostComponent, CostTerm, ImpactFactor, ImpactTerm, ProblemInstance, Shape,
};
use super::schema::{Direction, Tier, VariableSchema, VariableSpec};

/// Cost components and the share of the cost floor each carries, in M$.
pub const COST_COMPONENTS: [(&str, f64); 6] = [
    ("Construction", 80.0),
    ("Operations", 45.0),
    ("Maintenance", 30.0),
    ("Materials", 25.0),
    ("Energy Systems", 12.0),
    ("Community & Compliance", 8.0),
];

/// Impact factors and their default weights (sum to 1).
pub const IMPACT_FACTORS: [(&str, f64); 6] = [
    ("GHG Emissions", 0.30),
    ("Waste", 0.20),
    ("Land Use", 0.15),
    ("Water Stress", 0.15),
    ("Energy Intensity", 0.10),
    ("Ecosystem Disturbance", 0.10),
];

struct CatalogEntry {
    name: &'static str,
    unit: &'static str,
    lower: f64,
    upper: f64,
    better: Direction,
    tier: Tier,
    component: usize,
    factor: Option<usize>,
    /// Cheap end for conflicting variables; `None` lets the seed pick.
    cheap_at: Option<BoundSide>,
}

const fn entry(
    name: &'static str,
    unit: &'static str,
    lower: f64,
    upper: f64,
    better: Direction,
    tier: Tier,
    component: usize,
    factor: Option<usize>,
    cheap_at: Option<BoundSide>,
) -> CatalogEntry {
    CatalogEntry {
        name,
        unit,
        lower,
        upper,
        better,
        tier,
        component,
        factor,
        cheap_at,
    }
}

use BoundSide::{Lower as L, Upper as U};
use Direction::{Higher as Hi, Lower as Lo};
use Tier::{Additional as Add, Primary as Pri, Secondary as Sec};

// component: 0 construction, 1 operations, 2 maintenance, 3 materials, 4 energy, 5 community
// factor:    0 ghg, 1 waste, 2 land, 3 water, 4 energy intensity, 5 ecosystem
#[rustfmt::skip]
const CATALOG: [CatalogEntry; 50] = [
    entry("Cost Efficiency", "Units/$", 35.0, 50.0, Hi, Pri, 1, Some(4), Some(U)),
    entry("Durability", "Years", 25.0, 45.0, Hi, Pri, 0, Some(1), Some(L)),
    entry("Renewable Energy Usage", "%", 15.0, 55.0, Hi, Pri, 4, Some(0), Some(L)),
    entry("Carbon Footprint", "kt CO2e/yr", 40.0, 120.0, Lo, Pri, 3, Some(0), Some(U)),
    entry("Water Usage", "ML/yr", 200.0, 800.0, Lo, Sec, 1, Some(3), Some(U)),
    entry("Waste Production", "kt/yr", 5.0, 25.0, Lo, Sec, 2, Some(1), Some(U)),
    entry("Land Use", "ha", 50.0, 150.0, Lo, Sec, 0, Some(2), Some(U)),
    entry("Energy Efficiency", "%", 60.0, 95.0, Hi, Sec, 4, Some(4), Some(L)),
    entry("Maintenance Cost", "M$/yr", 5.0, 15.0, Lo, Sec, 2, Some(5), Some(L)),
    entry("Innovation Index", "score", 0.0, 10.0, Hi, Add, 4, None, None),
    entry("Environmental Impact Score", "score", 0.0, 100.0, Lo, Add, 5, None, None),
    entry("Community Impact", "score", 0.0, 10.0, Hi, Add, 5, None, None),
    entry("Regulatory Compliance", "%", 80.0, 100.0, Hi, Add, 5, None, None),
    entry("Stakeholder Satisfaction", "score", 0.0, 10.0, Hi, Add, 5, None, None),
    entry("Noise Level", "dB", 40.0, 80.0, Lo, Add, 1, Some(5), None),
    entry("Job Creation", "jobs", 100.0, 600.0, Hi, Add, 5, None, None),
    entry("Safety Record", "score", 0.0, 10.0, Hi, Add, 2, None, None),
    entry("Local Economic Contribution", "M$/yr", 1.0, 20.0, Hi, Add, 5, None, None),
    entry("Biodiversity Offset", "ha", 0.0, 50.0, Hi, Add, 0, Some(2), None),
    entry("Air Quality Index", "AQI", 20.0, 120.0, Lo, Add, 1, Some(0), None),
    entry("Public Transit Access", "score", 0.0, 10.0, Hi, Add, 5, None, None),
    entry("Construction Duration", "months", 12.0, 60.0, Lo, Add, 0, None, None),
    entry("Material Recyclability", "%", 10.0, 90.0, Hi, Add, 3, Some(1), None),
    entry("Grid Integration Capacity", "MW", 10.0, 200.0, Hi, Add, 1, None, None),
    entry("Storage Capacity", "MWh", 0.0, 500.0, Hi, Add, 4, None, None),
    entry("Flood Resilience", "score", 0.0, 10.0, Hi, Add, 0, None, None),
    entry("Climate Adaptation Score", "score", 0.0, 10.0, Hi, Add, 0, None, None),
    entry("Heat Island Mitigation", "score", 0.0, 10.0, Hi, Add, 0, Some(5), None),
    entry("Stormwater Retention", "%", 0.0, 80.0, Hi, Add, 0, Some(3), None),
    entry("Soil Remediation", "ha", 0.0, 30.0, Hi, Add, 0, Some(5), None),
    entry("Local Sourcing Share", "%", 10.0, 90.0, Hi, Add, 3, None, None),
    entry("Workforce Training Hours", "kh", 1.0, 50.0, Hi, Add, 5, None, None),
    entry("Digital Monitoring Coverage", "%", 0.0, 100.0, Hi, Add, 2, None, None),
    entry("Traffic Disruption", "days", 0.0, 365.0, Lo, Add, 1, None, None),
    entry("Embodied Energy", "TJ", 100.0, 900.0, Lo, Add, 3, Some(4), None),
    entry("Operational Emissions Intensity", "t CO2e/GWh", 20.0, 400.0, Lo, Add, 1, Some(0), None),
    entry("Green Space Provision", "ha", 0.0, 40.0, Hi, Add, 5, Some(2), None),
    entry("Accessibility Score", "score", 0.0, 10.0, Hi, Add, 5, None, None),
    entry("Cultural Heritage Protection", "score", 0.0, 10.0, Hi, Add, 5, None, None),
    entry("Lifecycle Assessment Coverage", "%", 0.0, 100.0, Hi, Add, 4, None, None),
    entry("Smart Metering Penetration", "%", 0.0, 100.0, Hi, Add, 2, Some(4), None),
    entry("Demand Response Capacity", "MW", 0.0, 100.0, Hi, Add, 1, None, None),
    entry("Circular Economy Index", "score", 0.0, 10.0, Hi, Add, 3, Some(1), None),
    entry("Hazardous Material Use", "t", 0.0, 200.0, Lo, Add, 2, Some(1), None),
    entry("Permit Processing Time", "months", 1.0, 24.0, Lo, Add, 5, None, None),
    entry("Insurance Premium", "M$/yr", 0.5, 5.0, Lo, Add, 2, None, None),
    entry("Contingency Reserve", "%", 0.0, 20.0, Hi, Add, 3, None, None),
    entry("Financing Rate", "%", 1.0, 8.0, Lo, Add, 5, None, None),
    entry("Asset Utilization", "%", 40.0, 100.0, Hi, Add, 1, None, None),
    entry("Supply Chain Stability", "score", 0.0, 10.0, Hi, Add, 3, None, None),
];

/// Catalog numbers of the variables whose terms come from the calibration fixture.
pub const PRIMARY_VARIABLES: [usize; 4] = [1, 2, 3, 4];
pub const SECONDARY_VARIABLES: [usize; 5] = [5, 6, 7, 8, 9];

/// The 50-variable schema with bounds, units and tier hints.
pub fn benchmark_schema() -> VariableSchema {
    let vars = CATALOG
        .iter()
        .enumerate()
        .map(|(i, e)| {
            VariableSpec::new(i + 1, e.name, e.unit, e.lower, e.upper, e.better).with_tier(e.tier)
        })
        .collect();
    VariableSchema::new(vars).expect("catalog is valid")
}

/// Deterministic benchmark instance for `seed`, using the committed calibration.
pub fn make_benchmark_instance(seed: u64) -> ProblemInstance {
    build_instance(&Calibration::committed(), seed)
}

/// Builds a benchmark instance from arbitrary calibration coefficients.
pub fn build_instance(cal: &Calibration, seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components: Vec<CostComponent> = COST_COMPONENTS
        .iter()
        .map(|(name, share)| CostComponent {
            name: (*name).to_string(),
            constant: share * cal.targets.cost_floor / 200.0,
            terms: Vec::new(),
        })
        .collect();
    let mut factors: Vec<ImpactFactor> = IMPACT_FACTORS
        .iter()
        .map(|(name, _)| ImpactFactor {
            name: (*name).to_string(),
            constant: cal.targets.impact_floor,
            terms: Vec::new(),
        })
        .collect();
    let weights: Vec<f64> = IMPACT_FACTORS.iter().map(|(_, w)| *w).collect();

    for (i, e) in CATALOG.iter().enumerate() {
        let variable = i + 1;
        let conflict = cal
            .primary
            .iter()
            .map(|t| (t, cal.primary_shape.shape()))
            .chain(cal.secondary.iter().map(|t| (t, Shape::Quadratic)))
            .find(|(t, _)| t.variable == variable);

        match conflict {
            Some((coeffs, shape)) => {
                let cheap_at = e.cheap_at.expect("conflicting variables fix their cheap end");
                let factor = e.factor.expect("conflicting variables feed an impact factor");
                components[e.component].terms.push(CostTerm {
                    variable,
                    scale: coeffs.cost_scale,
                    cheap_at,
                    shape,
                });
                factors[factor].terms.push(ImpactTerm {
                    variable,
                    slope: coeffs.impact_scale / weights[factor],
                    clean_at: opposite(cheap_at),
                });
            }
            None => {
                // draw order per variable: side, cost scale, impact scale
                let cheap_at = if rng.random_bool(0.5) { L } else { U };
                let scale = rng.random_range(0.02..0.20);
                components[e.component].terms.push(CostTerm {
                    variable,
                    scale,
                    cheap_at,
                    shape: Shape::Linear,
                });
                if let Some(factor) = e.factor {
                    let impact = rng.random_range(0.001..0.004);
                    factors[factor].terms.push(ImpactTerm {
                        variable,
                        slope: impact / weights[factor],
                        clean_at: cheap_at,
                    });
                }
            }
        }
    }

    ProblemInstance::new(
        benchmark_schema(),
        components,
        factors,
        weights,
        cal.tag.clone(),
        seed,
    )
    .expect("benchmark instance is valid")
}

fn opposite(side: BoundSide) -> BoundSide {
    match side {
        L => U,
        U => L,
    }
}
