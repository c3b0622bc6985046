use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Crowding distance; `Boundary` marks a per-objective extreme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crowding {
    Boundary,
    Finite(f64),
}

impl Crowding {
    pub fn value(&self) -> f64 {
        match self {
            Crowding::Boundary => f64::INFINITY,
            Crowding::Finite(d) => *d,
        }
    }
}

impl Default for Crowding {
    fn default() -> Self {
        Crowding::Finite(0.0)
    }
}

impl PartialOrd for Crowding {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.value().total_cmp(&other.value()))
    }
}

/// Crowding distances for one front, in input order.
///
/// Computed over the distinct objective vectors. An exact duplicate never
/// earns density credit: only the first copy of a boundary vector keeps the
/// sentinel, and interior duplicates all receive zero.
pub fn crowding_distance<T: AsRef<[f64]>>(front: &[T]) -> Vec<Crowding> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }

    // group exact copies; each group is represented by its lowest index
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lex_cmp(front[a].as_ref(), front[b].as_ref()).then(a.cmp(&b)));
    let mut representative = vec![0usize; n];
    let mut unique: Vec<usize> = Vec::new();
    let mut copies: Vec<usize> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && front[order[k - 1]].as_ref() == front[i].as_ref() {
            let group = unique.len() - 1;
            representative[i] = group;
            copies[group] += 1;
        } else {
            representative[i] = unique.len();
            unique.push(i);
            copies.push(1);
        }
    }

    let unique_distance = distinct_crowding(&unique.iter().map(|&i| front[i].as_ref()).collect::<Vec<_>>());

    let mut out = vec![Crowding::Finite(0.0); n];
    for i in 0..n {
        let k = representative[i];
        let first_copy = unique[k] == i;
        out[i] = match unique_distance[k] {
            Crowding::Boundary if first_copy => Crowding::Boundary,
            Crowding::Boundary => Crowding::Finite(0.0),
            Crowding::Finite(_) if copies[k] > 1 => Crowding::Finite(0.0),
            d => d,
        };
    }
    out
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn distinct_crowding(points: &[&[f64]]) -> Vec<Crowding> {
    let n = points.len();
    if n <= 2 {
        return vec![Crowding::Boundary; n];
    }
    let m = points[0].len();
    let mut distance = vec![0.0_f64; n];
    let mut boundary = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..m {
        order.sort_by(|&a, &b| points[a][obj].total_cmp(&points[b][obj]).then(a.cmp(&b)));
        let lo = points[order[0]][obj];
        let hi = points[order[n - 1]][obj];
        boundary[order[0]] = true;
        boundary[order[n - 1]] = true;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let gap = points[order[w + 1]][obj] - points[order[w - 1]][obj];
            distance[order[w]] += gap / span;
        }
    }
    (0..n)
        .map(|i| {
            if boundary[i] {
                Crowding::Boundary
            } else {
                Crowding::Finite(distance[i])
            }
        })
        .collect()
}
