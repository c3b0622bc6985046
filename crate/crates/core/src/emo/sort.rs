use super::dominance::{compare, Dominance};
use super::Individual;

/// Fast non-dominated sorting over raw objective vectors.
///
/// Returns fronts of indices; front `k` holds the points dominated only by
/// members of earlier fronts. Indices within a front are ascending.
pub fn fast_nondominated_sort<T: AsRef<[f64]>>(objectives: &[T]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];

    for i in 0..n {
        for j in (i + 1)..n {
            match compare(objectives[i].as_ref(), objectives[j].as_ref()) {
                Dominance::ADominates => {
                    dominates_list[i].push(j);
                    dominated_by_count[j] += 1;
                }
                Dominance::BDominates => {
                    dominates_list[j].push(i);
                    dominated_by_count[i] += 1;
                }
                Dominance::Incomparable => {}
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Sorts a population into fronts and writes each member's rank.
pub fn nondominated_sort(population: &mut [Individual]) -> Vec<Vec<usize>> {
    let objectives: Vec<&[f64]> = population.iter().map(|ind| ind.f.as_slice()).collect();
    let fronts = fast_nondominated_sort(&objectives);
    for (rank, front) in fronts.iter().enumerate() {
        for &i in front {
            population[i].rank = rank;
        }
    }
    fronts
}

/// Indices of the members not dominated by any other member.
pub fn nondominated_indices<T: AsRef<[f64]>>(objectives: &[T]) -> Vec<usize> {
    if objectives.first().map(|f| f.as_ref().len()) == Some(2) {
        return nondominated_indices_2d(objectives);
    }
    (0..objectives.len())
        .filter(|&i| {
            objectives.iter().all(|other| {
                compare(other.as_ref(), objectives[i].as_ref()) != Dominance::ADominates
            })
        })
        .collect()
}

fn nondominated_indices_2d<T: AsRef<[f64]>>(objectives: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..objectives.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (objectives[a].as_ref(), objectives[b].as_ref());
        fa[0].total_cmp(&fb[0]).then(fa[1].total_cmp(&fb[1]))
    });
    let mut keep = Vec::new();
    let mut best_second = f64::INFINITY;
    let mut k = 0;
    while k < order.len() {
        // group exact ties on the first objective
        let first = objectives[order[k]].as_ref()[0];
        let mut end = k;
        while end < order.len() && objectives[order[end]].as_ref()[0] == first {
            end += 1;
        }
        let group_best = objectives[order[k]].as_ref()[1];
        if group_best < best_second {
            for &i in &order[k..end] {
                if objectives[i].as_ref()[1] == group_best {
                    keep.push(i);
                }
            }
            best_second = group_best;
        }
        k = end;
    }
    keep.sort_unstable();
    keep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_chain_gives_singleton_fronts() {
        let pts = [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        assert_eq!(fast_nondominated_sort(&pts), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn published_rows_form_one_front() {
        let rows = [
            [200.00, 1.004],
            [202.00, 0.910],
            [204.00, 0.807],
            [208.01, 0.709],
            [212.01, 0.573],
            [216.02, 0.463],
            [219.98, 0.328],
        ];
        assert_eq!(fast_nondominated_sort(&rows), vec![(0..7).collect::<Vec<_>>()]);
    }

    #[test]
    fn empty_input_gives_no_fronts() {
        let pts: Vec<Vec<f64>> = vec![];
        assert!(fast_nondominated_sort(&pts).is_empty());
    }

    #[test]
    fn duplicates_share_a_front() {
        let pts = [[1.0, 2.0], [1.0, 2.0], [2.0, 1.0], [3.0, 3.0]];
        assert_eq!(fast_nondominated_sort(&pts), vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(nondominated_indices(&pts), vec![0, 1, 2]);
    }

    #[test]
    fn two_objective_filter_matches_generic_filter() {
        let pts = [
            [1.0, 5.0],
            [1.0, 4.0],
            [2.0, 4.0],
            [2.0, 3.0],
            [0.5, 9.0],
            [3.0, 3.0],
            [4.0, 0.0],
        ];
        let generic: Vec<usize> = (0..pts.len())
            .filter(|&i| pts.iter().all(|o| compare(o, &pts[i]) != Dominance::ADominates))
            .collect();
        assert_eq!(nondominated_indices(&pts), generic);
    }
}
