use paretoinfer::emo::{
    crowding_distance, dominates, engine_rng, fast_nondominated_sort, hypervolume,
    nondominated_sort, polynomial_mutation, run_nsga2, sbx_crossover, Crowding, Dominance,
    Individual, NsgaParams, Problem, RunDocument, Zdt1,
};
use paretoinfer::problem::make_benchmark_instance;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Peels fronts by checking every pair: O(n^2) per layer.
fn oracle_partition(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let weakly_better = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
    };
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| weakly_better(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn random_points(seed: u64, n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..m).map(|_| (rng.random::<f64>() * 20.0).round() / 2.0).collect())
        .collect()
}

#[test]
fn dominance_examples() {
    assert_eq!(dominates(&[200.0, 1.004], &[202.0, 0.910]).unwrap(), Dominance::Incomparable);
    assert_eq!(dominates(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), Dominance::ADominates);
    assert_eq!(dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), Dominance::Incomparable);
    assert!(dominates(&[1.0], &[1.0, 2.0]).is_err());
}

#[test]
fn sort_matches_oracle_on_many_seeds() {
    for seed in 0..100 {
        for m in [2, 3] {
            let pts = random_points(seed, 200, m);
            assert_eq!(fast_nondominated_sort(&pts), oracle_partition(&pts), "seed {seed} m {m}");
        }
    }
}

#[test]
fn sort_examples() {
    let chain = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
    assert_eq!(fast_nondominated_sort(&chain), vec![vec![0], vec![1], vec![2]]);
    let table = vec![
        vec![200.00, 1.004],
        vec![202.00, 0.910],
        vec![204.00, 0.807],
        vec![208.01, 0.709],
        vec![212.01, 0.573],
        vec![216.02, 0.463],
        vec![219.98, 0.328],
    ];
    assert_eq!(fast_nondominated_sort(&table), vec![(0..7).collect::<Vec<_>>()]);
    assert!(fast_nondominated_sort::<Vec<f64>>(&[]).is_empty());

    let mut pop: Vec<Individual> = chain.into_iter().map(|f| Individual::new(vec![], f)).collect();
    nondominated_sort(&mut pop);
    assert_eq!(pop.iter().map(|i| i.rank).collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn crowding_examples() {
    assert_eq!(
        crowding_distance(&[[0.0, 1.0], [1.0, 0.0]]),
        vec![Crowding::Boundary, Crowding::Boundary]
    );
    let c = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
    assert_eq!(c, vec![Crowding::Boundary, Crowding::Finite(2.0), Crowding::Boundary]);
    let d = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [1.0, 1.0], [2.0, 0.0]]);
    assert_eq!(d[1], Crowding::Finite(0.0));
    assert_eq!(d[2], Crowding::Finite(0.0));
    let e = crowding_distance(&[[0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]);
    assert_eq!(e, vec![Crowding::Boundary, Crowding::Finite(0.0), Crowding::Boundary]);
}

#[test]
fn hypervolume_examples() {
    assert_eq!(hypervolume(&[[0.0, 0.0]], [1.0, 1.0]), 1.0);
    assert_eq!(hypervolume(&[[0.0, 0.5], [0.5, 0.0]], [1.0, 1.0]), 0.75);
    assert_eq!(hypervolume(&[[0.0, 0.5], [0.5, 0.0], [0.6, 0.6]], [1.0, 1.0]), 0.75);
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct VariationTrace {
    seed: u64,
    bounds: Vec<(f64, f64)>,
    p1: Vec<f64>,
    p2: Vec<f64>,
    children: Vec<(Vec<f64>, Vec<f64>)>,
    mutants: Vec<Vec<f64>>,
}

fn variation_trace() -> VariationTrace {
    let seed = 20240;
    let bounds: Vec<(f64, f64)> = (0..8).map(|i| (-1.0 - i as f64, 2.0 + i as f64)).collect();
    let p1: Vec<f64> = bounds.iter().map(|(l, u)| l + 0.25 * (u - l)).collect();
    let mut p2: Vec<f64> = bounds.iter().map(|(l, u)| l + 0.8 * (u - l)).collect();
    p2[0] = bounds[0].0;
    let params = NsgaParams {
        mutation_probability: 0.5,
        ..NsgaParams::default()
    };
    let mut rng = engine_rng(seed);
    let children = (0..4)
        .map(|_| sbx_crossover(&p1, &p2, &bounds, &params, &mut rng))
        .collect();
    let mutants = (0..4)
        .map(|_| polynomial_mutation(&p1, &bounds, &params, &mut rng))
        .collect();
    VariationTrace {
        seed,
        bounds,
        p1,
        p2,
        children,
        mutants,
    }
}

#[test]
fn variation_matches_golden_trace() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/variation_trace.json");
    let trace = variation_trace();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(path, serde_json::to_string_pretty(&trace).unwrap() + "\n").unwrap();
    }
    let text = std::fs::read_to_string(path).expect("golden trace committed");
    let frozen: VariationTrace = serde_json::from_str(&text).unwrap();
    assert_eq!(frozen, trace);
}

#[test]
fn variation_identities() {
    let bounds = vec![(0.0, 1.0); 5];
    let p1 = vec![0.1, 0.2, 0.3, 0.4, 0.5];
    let p2 = vec![0.9, 0.8, 0.7, 0.6, 0.5];
    let mut rng = engine_rng(1);
    let off = NsgaParams {
        crossover_probability: 0.0,
        mutation_probability: 0.0,
        ..NsgaParams::default()
    };
    assert_eq!(sbx_crossover(&p1, &p2, &bounds, &off, &mut rng), (p1.clone(), p2.clone()));
    assert_eq!(polynomial_mutation(&p1, &bounds, &off, &mut rng), p1);
    let on = NsgaParams {
        crossover_probability: 1.0,
        mutation_probability: 1.0,
        ..NsgaParams::default()
    };
    assert_eq!(sbx_crossover(&p1, &p1, &bounds, &on, &mut rng), (p1.clone(), p1.clone()));
    let at_lower = vec![0.0; 5];
    for _ in 0..200 {
        assert!(polynomial_mutation(&at_lower, &bounds, &on, &mut rng).iter().all(|&v| v >= 0.0));
    }
}

proptest! {
    #[test]
    fn dominance_is_antisymmetric(a in proptest::collection::vec(-5i32..5, 3), b in proptest::collection::vec(-5i32..5, 3)) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let ab = dominates(&a, &b).unwrap();
        let ba = dominates(&b, &a).unwrap();
        prop_assert_eq!(ab.flip(), ba);
    }

    #[test]
    fn variation_stays_in_bounds(seed in any::<u64>(), t1 in proptest::collection::vec(0.0f64..=1.0, 6), t2 in proptest::collection::vec(0.0f64..=1.0, 6)) {
        let bounds: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let at = |t: &[f64]| -> Vec<f64> { bounds.iter().zip(t).map(|((l, u), s)| l + s * (u - l)).collect() };
        let (p1, p2) = (at(&t1), at(&t2));
        let params = NsgaParams { crossover_probability: 1.0, mutation_probability: 1.0, ..NsgaParams::default() };
        let mut rng = engine_rng(seed);
        let (c1, c2) = sbx_crossover(&p1, &p2, &bounds, &params, &mut rng);
        let m = polynomial_mutation(&c1, &bounds, &params, &mut rng);
        for v in [&c1, &c2, &m] {
            for (x, (l, u)) in v.iter().zip(&bounds) {
                prop_assert!(x >= l && x <= u);
            }
        }
    }
}

fn small(pop: usize, gens: usize, seed: u64) -> NsgaParams {
    NsgaParams {
        population_size: pop,
        generations: gens,
        seed,
        ..NsgaParams::default()
    }
}

fn mutually_nondominated(front: &[Individual]) -> bool {
    front.iter().enumerate().all(|(i, a)| {
        front[i + 1..]
            .iter()
            .all(|b| dominates(&a.f, &b.f).unwrap() == Dominance::Incomparable)
    })
}

#[test]
fn zero_generations_is_initial_nondominated_set() {
    let zdt = Zdt1::new(30);
    let run = run_nsga2(&zdt, &small(40, 0, 9)).unwrap();
    assert!(run.per_generation_stats.is_empty());
    let pts: Vec<Vec<f64>> = run.final_population.iter().map(|i| i.f.clone()).collect();
    let first = &oracle_partition(&pts)[0];
    assert_eq!(run.front.len(), first.len());
    assert!(mutually_nondominated(&run.front));
}

#[test]
fn runs_are_deterministic() {
    let inst = make_benchmark_instance(0);
    let a = run_nsga2(&inst, &small(20, 8, 5)).unwrap();
    let b = run_nsga2(&inst, &small(20, 8, 5)).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.per_generation_stats.len(), 8);
    let doc = RunDocument::from_json(&a.to_json()).unwrap();
    assert_eq!(doc.front.len(), a.front.len());
}

#[test]
fn population_stays_in_bounds_each_generation() {
    let inst = make_benchmark_instance(0);
    let bounds = inst.bounds();
    for gens in 0..6 {
        let run = run_nsga2(&inst, &small(16, gens, 3)).unwrap();
        for ind in &run.final_population {
            assert!(ind.x.iter().zip(&bounds).all(|(v, (l, u))| v >= l && v <= u));
        }
        assert!(mutually_nondominated(&run.front));
    }
}

#[test]
fn archive_hypervolume_never_drops() {
    let zdt = Zdt1::new(30);
    for seed in 0..5 {
        let run = run_nsga2(&zdt, &small(40, 60, seed)).unwrap();
        let hv: Vec<f64> = run.per_generation_stats.iter().map(|s| s.hypervolume.unwrap()).collect();
        assert!(hv.windows(2).all(|w| w[1] >= w[0]), "seed {seed}");
    }
}

#[test]
fn invalid_params_are_rejected() {
    let zdt = Zdt1::new(5);
    assert!(run_nsga2(&zdt, &small(7, 1, 0)).is_err());
    assert!(run_nsga2(&zdt, &small(2, 1, 0)).is_err());
}

struct Failing;

impl Problem for Failing {
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0)]
    }
    fn num_objectives(&self) -> usize {
        2
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, String> {
        if x[0] > 0.5 {
            Err("boom".into())
        } else {
            Ok(vec![x[0], 1.0 - x[0]])
        }
    }
}

#[test]
fn evaluation_failure_carries_context() {
    let err = run_nsga2(&Failing, &small(8, 2, 0)).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("generation") && text.contains("boom"), "{text}");
}
