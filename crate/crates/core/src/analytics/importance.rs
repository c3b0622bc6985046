use serde::{Deserialize, Serialize};

use super::front::ParetoFront;
use super::AnalyticsError;
use crate::problem::Tier;

pub const PRIMARY_THRESHOLD: f64 = 0.7;
pub const SECONDARY_THRESHOLD: f64 = 0.3;
/// Below this many members the tiers are still computed but flagged.
pub const RECOMMENDED_FRONT_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableScore {
    pub index: usize,
    pub name: String,
    pub score: f64,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceTiers {
    pub primary: Vec<usize>,
    pub secondary: Vec<usize>,
    pub additional: Vec<usize>,
    /// In column order.
    pub scores: Vec<VariableScore>,
    pub front_size: usize,
}

impl ImportanceTiers {
    pub fn tier_of(&self, index: usize) -> Option<Tier> {
        self.scores.iter().find(|s| s.index == index).map(|s| s.tier)
    }

    pub fn score_of(&self, index: usize) -> Option<f64> {
        self.scores.iter().find(|s| s.index == index).map(|s| s.score)
    }

    /// Variable indices ordered by descending score, ties by index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut s: Vec<&VariableScore> = self.scores.iter().collect();
        s.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
        s.into_iter().map(|v| v.index).collect()
    }

    /// Every column of `front` at score 0, for fronts too small to score.
    pub fn unscored(front: &ParetoFront) -> Self {
        let scores: Vec<VariableScore> = front
            .columns()
            .iter()
            .map(|c| VariableScore {
                index: c.index,
                name: c.name.clone(),
                score: 0.0,
                tier: Tier::Additional,
            })
            .collect();
        Self {
            primary: vec![],
            secondary: vec![],
            additional: scores.iter().map(|s| s.index).collect(),
            scores,
            front_size: front.len(),
        }
    }

    pub fn is_low_support(&self) -> bool {
        self.front_size < RECOMMENDED_FRONT_SIZE
    }
}

pub fn tier_for(score: f64) -> Tier {
    if score >= PRIMARY_THRESHOLD {
        Tier::Primary
    } else if score >= SECONDARY_THRESHOLD {
        Tier::Secondary
    } else {
        Tier::Additional
    }
}

/// Score = max over objectives of |Spearman correlation| along the front.
pub fn categorize_variables(front: &ParetoFront) -> Result<ImportanceTiers, AnalyticsError> {
    if front.len() < 3 {
        return Err(AnalyticsError::DegenerateFront {
            size: front.len(),
            needed: 3,
        });
    }
    let cost: Vec<f64> = front.solutions().iter().map(|s| s.cost()).collect();
    let impact: Vec<f64> = front.solutions().iter().map(|s| s.impact()).collect();
    let (rc, ri) = (average_ranks(&cost), average_ranks(&impact));
    let mut tiers = ImportanceTiers {
        primary: vec![],
        secondary: vec![],
        additional: vec![],
        scores: vec![],
        front_size: front.len(),
    };
    for (p, col) in front.columns().iter().enumerate() {
        let rx = average_ranks(&front.column_values(p));
        let score = pearson(&rx, &rc).abs().max(pearson(&rx, &ri).abs()).min(1.0);
        let tier = tier_for(score);
        match tier {
            Tier::Primary => tiers.primary.push(col.index),
            Tier::Secondary => tiers.secondary.push(col.index),
            Tier::Additional => tiers.additional.push(col.index),
        }
        tiers.scores.push(VariableScore {
            index: col.index,
            name: col.name.clone(),
            score,
            tier,
        });
    }
    Ok(tiers)
}

/// 1-based ranks, ties share their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = mean;
        }
        i = j + 1;
    }
    ranks
}

/// Zero when either side is constant.
fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_share_mean_rank() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn thresholds() {
        assert_eq!(tier_for(0.7), Tier::Primary);
        assert_eq!(tier_for(0.69), Tier::Secondary);
        assert_eq!(tier_for(0.3), Tier::Secondary);
        assert_eq!(tier_for(0.0), Tier::Additional);
    }
}
