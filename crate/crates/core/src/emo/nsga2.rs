//! Elitist generational loop.
//!
//! Generator draw order for a run seeded with `params.seed`:
//! 1. initial population, individual by individual, variable by variable;
//! 2. per generation, for each offspring pair: tournament for parent one,
//!    tournament for parent two, crossover, mutation of child one, mutation
//!    of child two.
//! Evaluation and selection draw nothing.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::crowding::crowding_distance;
use super::hypervolume::hypervolume;
use super::operators::{polynomial_mutation, sbx_crossover};
use super::rng::{engine_rng, EngineRng};
use super::sort::{fast_nondominated_sort, nondominated_indices};
use super::{EmoError, Individual, NsgaParams, Problem};

pub const RUN_FORMAT: &str = "paretoinfer/run-result";
pub const RUN_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Hypervolume of the best-so-far non-dominated archive (two objectives only).
    pub hypervolume: Option<f64>,
    /// Size of the population's rank-0 set after selection.
    pub front_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub params: NsgaParams,
    pub instance_ref: String,
    pub reference_point: Option<Vec<f64>>,
    pub final_population: Vec<Individual>,
    /// Rank-0 members with exact objective duplicates removed (lowest index kept).
    pub front: Vec<Individual>,
    pub per_generation_stats: Vec<GenerationStats>,
}

/// One exported front member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

/// Versioned serialized form of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDocument {
    pub format: String,
    pub version: u32,
    pub params: NsgaParams,
    pub instance_ref: String,
    pub reference_point: Option<Vec<f64>>,
    pub front: Vec<FrontRow>,
    pub per_generation_stats: Vec<GenerationStats>,
}

impl RunResult {
    pub fn to_document(&self) -> RunDocument {
        RunDocument {
            format: RUN_FORMAT.into(),
            version: RUN_VERSION,
            params: self.params.clone(),
            instance_ref: self.instance_ref.clone(),
            reference_point: self.reference_point.clone(),
            front: self
                .front
                .iter()
                .map(|ind| FrontRow {
                    x: ind.x.clone(),
                    f: ind.f.clone(),
                })
                .collect(),
            per_generation_stats: self.per_generation_stats.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("run document serializes")
    }
}

impl RunDocument {
    pub fn from_json(text: &str) -> Result<Self, EmoError> {
        let doc: RunDocument =
            serde_json::from_str(text).map_err(|e| EmoError::Document(e.to_string()))?;
        if doc.format != RUN_FORMAT || doc.version != RUN_VERSION {
            return Err(EmoError::Document(format!(
                "unsupported document {} v{}",
                doc.format, doc.version
            )));
        }
        Ok(doc)
    }
}

fn evaluate_all<P: Problem + ?Sized>(
    problem: &P,
    xs: Vec<Vec<f64>>,
    generation: usize,
) -> Result<Vec<Individual>, EmoError> {
    let evaluated: Vec<Result<Vec<f64>, String>> =
        xs.par_iter().map(|x| problem.evaluate(x)).collect();
    xs.into_iter()
        .zip(evaluated)
        .enumerate()
        .map(|(individual, (x, f))| match f {
            Ok(f) => Ok(Individual::new(x, f)),
            Err(message) => Err(EmoError::Evaluation {
                generation,
                individual,
                message,
            }),
        })
        .collect()
}

/// Sort and crowding over `population`, writing rank and crowding in place.
fn assign_rank_and_crowding(population: &mut [Individual]) -> Vec<Vec<usize>> {
    let fronts = fast_nondominated_sort(&population.iter().map(|i| i.f.as_slice()).collect::<Vec<_>>());
    for (rank, front) in fronts.iter().enumerate() {
        let objs: Vec<&[f64]> = front.iter().map(|&i| population[i].f.as_slice()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&objs)) {
            population[i].rank = rank;
            population[i].crowding = d;
        }
    }
    fronts
}

fn tournament(population: &[Individual], rng: &mut EngineRng) -> usize {
    let n = population.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    let (ia, ib) = (&population[a], &population[b]);
    if ia.rank != ib.rank {
        return if ia.rank < ib.rank { a } else { b };
    }
    match ia.crowding.value().total_cmp(&ib.crowding.value()) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if rng.random_bool(0.5) {
                a
            } else {
                b
            }
        }
    }
}

/// Truncates the ranked union of parents and offspring to `size` members.
fn environmental_selection(mut union: Vec<Individual>, size: usize) -> Vec<Individual> {
    let fronts = assign_rank_and_crowding(&mut union);
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for front in fronts {
        if chosen.len() + front.len() <= size {
            chosen.extend(front);
            if chosen.len() == size {
                break;
            }
        } else {
            let mut last = front;
            last.sort_by(|&a, &b| {
                union[b]
                    .crowding
                    .value()
                    .total_cmp(&union[a].crowding.value())
                    .then(a.cmp(&b))
            });
            chosen.extend(last.into_iter().take(size - chosen.len()));
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = union.into_iter().map(Some).collect();
    chosen
        .into_iter()
        .map(|i| slots[i].take().expect("each member chosen once"))
        .collect()
}

fn merge_archive(archive: &mut Vec<[f64; 2]>, population: &[Individual]) {
    archive.extend(
        population
            .iter()
            .filter(|ind| ind.rank == 0)
            .map(|ind| [ind.f[0], ind.f[1]]),
    );
    let keep = nondominated_indices(archive);
    let mut next: Vec<[f64; 2]> = keep.into_iter().map(|i| archive[i]).collect();
    next.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    next.dedup();
    *archive = next;
}

/// Rank-0 members with exact objective duplicates removed, lowest index kept.
fn extract_front(population: &[Individual]) -> Vec<Individual> {
    let mut front: Vec<Individual> = Vec::new();
    for ind in population.iter().filter(|i| i.rank == 0) {
        if !front.iter().any(|kept| kept.f == ind.f) {
            front.push(ind.clone());
        }
    }
    front
}

/// Runs NSGA-II on `problem`.
pub fn run_nsga2<P: Problem + ?Sized>(problem: &P, params: &NsgaParams) -> Result<RunResult, EmoError> {
    params.validate()?;
    let bounds = problem.bounds();
    let n = params.population_size;
    let mut rng = engine_rng(params.seed);

    let initial: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| lo + rng.random::<f64>() * (hi - lo))
                .collect()
        })
        .collect();
    let mut population = evaluate_all(problem, initial, 0)?;
    assign_rank_and_crowding(&mut population);

    let reference = problem.reference_point();
    let two_objective = problem.num_objectives() == 2;
    let reference_2d = reference
        .as_ref()
        .filter(|r| two_objective && r.len() == 2)
        .map(|r| [r[0], r[1]]);
    let mut archive: Vec<[f64; 2]> = Vec::new();
    if two_objective {
        merge_archive(&mut archive, &population);
    }

    let mut stats = Vec::with_capacity(params.generations);
    for generation in 1..=params.generations {
        let mut children = Vec::with_capacity(n);
        while children.len() < n {
            let a = tournament(&population, &mut rng);
            let b = tournament(&population, &mut rng);
            let (c1, c2) = sbx_crossover(&population[a].x, &population[b].x, &bounds, params, &mut rng);
            children.push(polynomial_mutation(&c1, &bounds, params, &mut rng));
            children.push(polynomial_mutation(&c2, &bounds, params, &mut rng));
        }
        let offspring = evaluate_all(problem, children, generation)?;

        let mut union = population;
        union.extend(offspring);
        population = environmental_selection(union, n);

        if two_objective {
            merge_archive(&mut archive, &population);
        }
        stats.push(GenerationStats {
            generation,
            hypervolume: reference_2d.map(|r| hypervolume(&archive, r)),
            front_size: population.iter().filter(|i| i.rank == 0).count(),
        });
    }

    Ok(RunResult {
        params: params.clone(),
        instance_ref: problem.instance_ref(),
        reference_point: reference,
        front: extract_front(&population),
        final_population: population,
        per_generation_stats: stats,
    })
}
