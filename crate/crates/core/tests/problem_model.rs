use paretoinfer::problem::calibration::Calibration;
use paretoinfer::problem::{
    benchmark_schema, build_instance, make_benchmark_instance, CostComponent, CostTerm,
    DecisionVector, Direction, ImpactFactor, ProblemError, ProblemInstance, Shape, VariableSchema,
    VariableSpec, BoundSide, PRIMARY_VARIABLES,
};
use paretoinfer::emo::{dominates, Dominance};
use proptest::prelude::*;

fn lower_corner(schema: &VariableSchema) -> Vec<f64> {
    schema.variables().iter().map(|v| v.lower).collect()
}

/// Positions a black-box function depends on, found by toggling each
/// coordinate between its bounds.
fn support(n: usize, schema: &VariableSchema, f: impl Fn(&[f64]) -> f64) -> Vec<usize> {
    let base = lower_corner(schema);
    (0..n)
        .filter(|&i| {
            let mut x = base.clone();
            x[i] = schema.variables()[i].upper;
            f(&x) != f(&base)
        })
        .collect()
}

/// Minimum of `f` over every bound corner of the coordinates in `vars`.
fn corner_min(schema: &VariableSchema, vars: &[usize], f: impl Fn(&[f64]) -> f64) -> f64 {
    let specs = schema.variables();
    let mut best = f64::INFINITY;
    for mask in 0u64..(1u64 << vars.len()) {
        let mut x = lower_corner(schema);
        for (bit, &i) in vars.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                x[i] = specs[i].upper;
            }
        }
        best = best.min(f(&x));
    }
    best
}

/// Coordinate-wise argmin of `primary`, ties broken by `secondary`.
fn corner_by(inst: &ProblemInstance, primary: usize) -> DecisionVector {
    let schema = inst.schema();
    let mut x = lower_corner(schema);
    for i in 0..schema.len() {
        let mut hi = x.clone();
        hi[i] = schema.variables()[i].upper;
        let fl = inst.evaluate(&x.clone().into()).unwrap().to_array();
        let fh = inst.evaluate(&hi.clone().into()).unwrap().to_array();
        let secondary = 1 - primary;
        if (fh[primary], fh[secondary]) < (fl[primary], fl[secondary]) {
            x = hi;
        }
    }
    x.into()
}

#[test]
fn cost_corner_matches_component_oracle() {
    let inst = make_benchmark_instance(0);
    let schema = inst.schema();
    let oracle: f64 = (0..inst.cost_components().len())
        .map(|k| {
            let vars = support(schema.len(), schema, |x| inst.cost_component_value(k, x));
            assert!(vars.len() <= 16, "component {k} spans {} variables", vars.len());
            corner_min(schema, &vars, |x| inst.cost_component_value(k, x))
        })
        .sum();
    let corner = inst.evaluate(&corner_by(&inst, 0)).unwrap();
    assert!((oracle - 200.0).abs() <= 2.0, "oracle {oracle}");
    assert!((corner.total_cost - oracle).abs() < 1e-9);
    assert!((corner.environmental_impact - 1.004).abs() <= 0.05, "{corner:?}");
}

#[test]
fn impact_corner_matches_factor_oracle() {
    let inst = make_benchmark_instance(0);
    let schema = inst.schema();
    let oracle: f64 = inst
        .impact_weights()
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let vars = support(schema.len(), schema, |x| inst.impact_factor_value(j, x));
            assert!(vars.len() <= 16);
            w * corner_min(schema, &vars, |x| inst.impact_factor_value(j, x))
        })
        .sum();
    let corner = inst.evaluate(&corner_by(&inst, 1)).unwrap();
    assert!((oracle - 0.115).abs() <= 0.02, "oracle {oracle}");
    assert!((corner.environmental_impact - oracle).abs() < 1e-12);
    assert!((corner.total_cost - 240.0).abs() <= 2.0, "{corner:?}");
}

#[test]
fn corners_conflict() {
    let inst = make_benchmark_instance(0);
    let a = inst.evaluate(&corner_by(&inst, 0)).unwrap().to_array();
    let b = inst.evaluate(&corner_by(&inst, 1)).unwrap().to_array();
    assert_eq!(dominates(&a, &b).unwrap(), Dominance::Incomparable);
    assert_eq!(dominates(&b, &a).unwrap(), Dominance::Incomparable);
}

#[test]
fn seed_zero_is_bit_identical() {
    let a = make_benchmark_instance(0);
    let b = make_benchmark_instance(0);
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
    assert_ne!(make_benchmark_instance(1).to_json(), a.to_json());
}

#[test]
fn document_round_trip() {
    let inst = make_benchmark_instance(3);
    let again = ProblemInstance::from_json(&inst.to_json()).unwrap();
    assert_eq!(again, inst);
    let x = corner_by(&inst, 0);
    assert_eq!(again.evaluate(&x).unwrap(), inst.evaluate(&x).unwrap());
}

#[test]
fn schema_carries_expected_names() {
    let schema = benchmark_schema();
    assert_eq!(schema.len(), 50);
    let named = [
        (1, "Cost Efficiency"),
        (2, "Durability"),
        (3, "Renewable Energy Usage"),
        (4, "Carbon Footprint"),
        (5, "Water Usage"),
        (6, "Waste Production"),
        (7, "Land Use"),
        (8, "Energy Efficiency"),
        (9, "Maintenance Cost"),
        (10, "Innovation Index"),
        (50, "Supply Chain Stability"),
    ];
    for (idx, name) in named {
        assert_eq!(schema.get(idx).unwrap().name, name);
    }
    assert_eq!(schema.get(1).unwrap().unit, "Units/$");
    assert_eq!(schema.get(3).unwrap().lower, 15.0);
    assert_eq!(schema.get(3).unwrap().upper, 55.0);
}

#[test]
fn committed_calibration_is_consistent() {
    let cal = Calibration::committed();
    let knee = cal.model().knee();
    assert!((knee.total_cost - cal.targets.knee_cost).abs() < 1e-3);
    assert!((knee.impact - cal.targets.knee_impact).abs() < 1e-4);
    assert_eq!(build_instance(&cal, 0), make_benchmark_instance(0));
    let primary: Vec<usize> = cal.primary.iter().map(|t| t.variable).collect();
    assert_eq!(primary, PRIMARY_VARIABLES);
}

#[test]
fn trivial_sums() {
    let schema = VariableSchema::new(vec![VariableSpec::new(1, "A", "u", 0.0, 1.0, Direction::Higher)]).unwrap();
    let comps = vec![
        CostComponent::constant("a", 120.5),
        CostComponent::constant("b", 60.0),
        CostComponent::constant("c", 19.5),
    ];
    let inst = ProblemInstance::new(schema, comps, vec![ImpactFactor::constant("f", 0.910)], vec![1.0], "t", 0).unwrap();
    let f = inst.evaluate(&vec![0.3].into()).unwrap();
    assert_eq!(f.total_cost, 200.0);
    assert_eq!(f.environmental_impact, 0.910);
    let zero = inst.with_scaled_weights(0.0).unwrap();
    assert_eq!(zero.environmental_impact(&vec![0.3].into()).unwrap(), 0.0);
}

#[test]
fn purity_over_repeated_calls() {
    let inst = make_benchmark_instance(0);
    let x: DecisionVector = inst
        .schema()
        .variables()
        .iter()
        .map(|v| v.lower + 0.37 * v.width())
        .collect::<Vec<_>>()
        .into();
    let first = inst.evaluate(&x).unwrap();
    for _ in 0..1000 {
        let f = inst.evaluate(&x).unwrap();
        assert_eq!(f.total_cost.to_bits(), first.total_cost.to_bits());
        assert_eq!(f.environmental_impact.to_bits(), first.environmental_impact.to_bits());
    }
}

fn interior_point() -> impl Strategy<Value = Vec<f64>> {
    let schema = benchmark_schema();
    schema
        .variables()
        .iter()
        .map(|v| v.lower..=v.upper)
        .collect::<Vec<_>>()
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn impact_is_linear_in_weights(x in interior_point(), a in 0.0f64..50.0) {
        let inst = make_benchmark_instance(0);
        let scaled = inst.with_scaled_weights(a).unwrap();
        let x: DecisionVector = x.into();
        let base = inst.environmental_impact(&x).unwrap();
        prop_assert!(rel_close(scaled.environmental_impact(&x).unwrap(), a * base));
    }

    #[test]
    fn splitting_a_component_keeps_total(x in interior_point(), k in 0usize..6, share in 0.0f64..1.0) {
        let inst = make_benchmark_instance(0);
        let mut comps = inst.cost_components().to_vec();
        let orig = comps.remove(k);
        let cut = orig.terms.len() / 2;
        let first = CostComponent { name: format!("{} a", orig.name), constant: orig.constant * share, terms: orig.terms[..cut].to_vec() };
        let second = CostComponent { name: format!("{} b", orig.name), constant: orig.constant * (1.0 - share), terms: orig.terms[cut..].to_vec() };
        comps.insert(k, second);
        comps.insert(k, first);
        let split = ProblemInstance::new(
            inst.schema().clone(), comps, inst.impact_factors().to_vec(),
            inst.impact_weights().to_vec(), inst.calibration_tag(), inst.seed(),
        ).unwrap();
        let x: DecisionVector = x.into();
        prop_assert!(rel_close(split.total_cost(&x).unwrap(), inst.total_cost(&x).unwrap()));
    }

    #[test]
    fn validation_rejects_exactly_out_of_range(
        x in interior_point(),
        flips in proptest::collection::vec((0usize..50, prop_oneof![Just(-1.0f64), Just(1.0)], 1e-9f64..10.0), 0..4),
    ) {
        let schema = benchmark_schema();
        let mut x = x;
        for &(i, side, by) in &flips {
            let v = &schema.variables()[i];
            x[i] = if side < 0.0 { v.lower - by * v.width() } else { v.upper + by * v.width() };
        }
        let bad: Vec<usize> = schema.variables().iter().zip(&x)
            .filter(|(v, &value)| value < v.lower || value > v.upper)
            .map(|(v, _)| v.index)
            .collect();
        match schema.validate(&x.clone().into()) {
            Ok(()) => prop_assert!(bad.is_empty()),
            Err(ProblemError::OutOfBounds { index, .. }) => prop_assert_eq!(Some(&index), bad.first()),
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
    }
}

#[test]
fn invalid_term_is_rejected() {
    let schema = VariableSchema::new(vec![VariableSpec::new(1, "A", "u", 0.0, 1.0, Direction::Higher)]).unwrap();
    let bad = CostComponent {
        name: "c".into(),
        constant: 0.0,
        terms: vec![CostTerm {
            variable: 1,
            scale: 1.0,
            cheap_at: BoundSide::Lower,
            shape: Shape::DualPower { share: 1.5, low_exponent: 1.0, high_exponent: 2.0 },
        }],
    };
    assert!(ProblemInstance::new(schema, vec![bad], vec![], vec![], "t", 0).is_err());
}
