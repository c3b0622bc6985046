use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::InferenceError;
use crate::analytics::{
    trade_off_top, AnalyticsBundle, FrontSolution, ImportanceTiers, ParetoFront, TradeOffReport,
    TOP_VARIABLE_DELTAS,
};
use crate::problem::Tier;

/// Variables shown when the primary tier is empty.
pub const FALLBACK_VARIABLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Selected,
    MinCost,
    Knee,
    MinImpact,
}

impl Role {
    fn label(&self) -> &'static str {
        match self {
            Role::Selected => "selected",
            Role::MinCost => "lowest cost",
            Role::Knee => "knee",
            Role::MinImpact => "lowest impact",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextOptions {
    pub include_secondary: bool,
    pub include_additional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSummary {
    pub size: usize,
    pub min_cost: f64,
    pub max_cost: f64,
    pub min_impact: f64,
    pub max_impact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextVariable {
    pub index: usize,
    pub name: String,
    pub unit: String,
    pub tier: Tier,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighlightedSolution {
    pub number: usize,
    pub roles: Vec<Role>,
    pub total_cost: f64,
    pub environmental_impact: f64,
    /// Aligned with `schema_excerpt`.
    pub values: Vec<f64>,
}

impl HighlightedSolution {
    pub fn has_role(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextAnalytics {
    pub min_cost: usize,
    pub min_impact: usize,
    pub knee: Option<usize>,
    pub trade_offs: Vec<TradeOffReport>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Omitted {
    pub primary: usize,
    pub secondary: usize,
    pub additional: usize,
}

/// Everything a prompt may say about a front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextDocument {
    pub instance_ref: String,
    pub front_summary: FrontSummary,
    pub highlighted_solutions: Vec<HighlightedSolution>,
    pub analytics: ContextAnalytics,
    pub schema_excerpt: Vec<ContextVariable>,
    /// Variables of the front left out of the excerpt, per tier.
    pub omitted: Omitted,
}

/// Selected rows plus both extremes and the knee. Only primary-tier
/// variables are included unless `opts` widens the excerpt.
pub fn build_context(
    front: &ParetoFront,
    analytics: &AnalyticsBundle,
    selection: &[usize],
    tiers: &ImportanceTiers,
    opts: ContextOptions,
) -> Result<ContextDocument, InferenceError> {
    for &n in selection {
        front
            .get(n)
            .map_err(|e| InferenceError::Context(e.to_string()))?;
    }
    let mut included: Vec<usize> = front
        .columns()
        .iter()
        .filter(|c| match tiers.tier_of(c.index).unwrap_or(Tier::Additional) {
            Tier::Primary => true,
            Tier::Secondary => opts.include_secondary,
            Tier::Additional => opts.include_additional,
        })
        .map(|c| c.index)
        .collect();
    if tiers.primary.is_empty() {
        for idx in tiers.ranked().into_iter().take(FALLBACK_VARIABLES) {
            if !included.contains(&idx) {
                included.push(idx);
            }
        }
    }
    // keep column order
    let positions: Vec<usize> = front
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, c)| included.contains(&c.index))
        .map(|(p, _)| p)
        .collect();
    let schema_excerpt: Vec<ContextVariable> = positions
        .iter()
        .map(|&p| {
            let c = &front.columns()[p];
            ContextVariable {
                index: c.index,
                name: c.name.clone(),
                unit: c.unit.clone(),
                tier: tiers.tier_of(c.index).unwrap_or(Tier::Additional),
                score: tiers.score_of(c.index).unwrap_or(0.0),
            }
        })
        .collect();
    let mut omitted = Omitted::default();
    for c in front.columns() {
        if !included.contains(&c.index) {
            match tiers.tier_of(c.index).unwrap_or(Tier::Additional) {
                Tier::Primary => omitted.primary += 1,
                Tier::Secondary => omitted.secondary += 1,
                Tier::Additional => omitted.additional += 1,
            }
        }
    }

    let knee = analytics.knee.map(|k| k.number);
    let mut rows: Vec<(usize, Vec<Role>)> = Vec::new();
    let mut add = |n: usize, role: Role| match rows.iter_mut().find(|(m, _)| *m == n) {
        Some((_, roles)) => {
            if !roles.contains(&role) {
                roles.push(role)
            }
        }
        None => rows.push((n, vec![role])),
    };
    for &n in selection {
        add(n, Role::Selected);
    }
    add(analytics.min_cost.number, Role::MinCost);
    if let Some(k) = knee {
        add(k, Role::Knee);
    }
    add(analytics.min_impact.number, Role::MinImpact);

    let highlighted_solutions = rows
        .into_iter()
        .map(|(n, roles)| {
            let s: &FrontSolution = front.get(n).expect("validated above");
            HighlightedSolution {
                number: n,
                roles,
                total_cost: s.cost(),
                environmental_impact: s.impact(),
                values: positions.iter().map(|&p| s.x[p]).collect(),
            }
        })
        .collect();

    let base = analytics.min_cost.number;
    let mut targets: Vec<usize> = Vec::new();
    for &n in selection {
        if n != base && !targets.contains(&n) {
            targets.push(n);
        }
    }
    if targets.is_empty() {
        if let Some(k) = knee {
            targets.push(k);
        }
    }
    let trade_offs = targets
        .into_iter()
        .map(|n| {
            let mut t = trade_off_top(front, base, n, usize::MAX)
                .map_err(|e| InferenceError::Context(e.to_string()))?;
            t.top_variable_deltas.retain(|d| included.contains(&d.index));
            t.top_variable_deltas.truncate(TOP_VARIABLE_DELTAS);
            Ok(t)
        })
        .collect::<Result<Vec<_>, InferenceError>>()?;

    let s = front.solutions();
    Ok(ContextDocument {
        instance_ref: front.instance_ref().to_string(),
        front_summary: FrontSummary {
            size: front.len(),
            min_cost: s.iter().map(|x| x.cost()).fold(f64::INFINITY, f64::min),
            max_cost: s.iter().map(|x| x.cost()).fold(f64::NEG_INFINITY, f64::max),
            min_impact: s.iter().map(|x| x.impact()).fold(f64::INFINITY, f64::min),
            max_impact: s.iter().map(|x| x.impact()).fold(f64::NEG_INFINITY, f64::max),
        },
        highlighted_solutions,
        analytics: ContextAnalytics {
            min_cost: analytics.min_cost.number,
            min_impact: analytics.min_impact.number,
            knee,
            trade_offs,
        },
        schema_excerpt,
        omitted,
    })
}

impl ContextDocument {
    pub fn solution(&self, number: usize) -> Option<&HighlightedSolution> {
        self.highlighted_solutions.iter().find(|s| s.number == number)
    }

    pub fn solution_refs(&self) -> Vec<usize> {
        self.highlighted_solutions.iter().map(|s| s.number).collect()
    }

    /// Removes a variable from the excerpt, the rows and the trade-offs.
    pub fn drop_variable(&mut self, index: usize) -> bool {
        let Some(p) = self.schema_excerpt.iter().position(|v| v.index == index) else {
            return false;
        };
        let v = self.schema_excerpt.remove(p);
        for row in &mut self.highlighted_solutions {
            row.values.remove(p);
        }
        for t in &mut self.analytics.trade_offs {
            t.top_variable_deltas.retain(|d| d.index != index);
        }
        match v.tier {
            Tier::Primary => self.omitted.primary += 1,
            Tier::Secondary => self.omitted.secondary += 1,
            Tier::Additional => self.omitted.additional += 1,
        }
        true
    }

    /// Additional-tier variables first, then secondary; weakest score first.
    pub fn truncation_order(&self) -> Vec<usize> {
        let mut order = Vec::new();
        for tier in [Tier::Additional, Tier::Secondary] {
            let mut vs: Vec<&ContextVariable> =
                self.schema_excerpt.iter().filter(|v| v.tier == tier).collect();
            vs.sort_by(|a, b| a.score.total_cmp(&b.score).then(b.index.cmp(&a.index)));
            order.extend(vs.into_iter().map(|v| v.index));
        }
        order
    }

    pub fn variable(&self, index: usize) -> Option<&ContextVariable> {
        self.schema_excerpt.iter().find(|v| v.index == index)
    }

    /// Text rendering embedded in prompts.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let f = &self.front_summary;
        let _ = writeln!(
            out,
            "Front: {} solutions ({}); Total Cost {} to {} M$; Env. Impact {} to {}.",
            f.size,
            self.instance_ref,
            fmt_cost(f.min_cost),
            fmt_cost(f.max_cost),
            fmt_impact(f.min_impact),
            fmt_impact(f.max_impact)
        );
        if self.schema_excerpt.is_empty() {
            out.push_str("Variables: none shown.\n");
        } else {
            let names: Vec<String> = self
                .schema_excerpt
                .iter()
                .map(|v| format!("{} ({})", v.name, v.unit))
                .collect();
            let _ = writeln!(out, "Variables: {}.", names.join(", "));
        }
        let o = &self.omitted;
        if o.primary + o.secondary + o.additional > 0 {
            let mut parts = Vec::new();
            for (n, label) in [(o.primary, "primary"), (o.secondary, "secondary"), (o.additional, "additional")] {
                if n > 0 {
                    parts.push(format!("{n} {label}"));
                }
            }
            let _ = writeln!(out, "Not shown: {} variables.", parts.join(", "));
        }
        out.push_str("Solutions:\n");
        for s in &self.highlighted_solutions {
            let roles: Vec<&str> = s.roles.iter().map(Role::label).collect();
            let _ = write!(
                out,
                "- Sol. {} ({}): Total Cost {} M$, Env. Impact {}",
                s.number,
                roles.join(", "),
                fmt_cost(s.total_cost),
                fmt_impact(s.environmental_impact)
            );
            if !s.values.is_empty() {
                let vals: Vec<String> = self
                    .schema_excerpt
                    .iter()
                    .zip(&s.values)
                    .map(|(v, &x)| format!("{} {}", v.name, with_unit(&fmt_value(x), &v.unit)))
                    .collect();
                let _ = write!(out, "; {}", vals.join(", "));
            }
            out.push_str(".\n");
        }
        out.push_str("Importance tiers (rank correlation with the objectives along the front):\n");
        for tier in [Tier::Primary, Tier::Secondary, Tier::Additional] {
            let vs: Vec<String> = self
                .schema_excerpt
                .iter()
                .filter(|v| v.tier == tier)
                .map(|v| format!("{} {}", v.name, fmt_score(v.score)))
                .collect();
            let listed = if vs.is_empty() { "none shown".to_string() } else { vs.join(", ") };
            let _ = writeln!(out, "- {}: {}", tier.as_str(), listed);
        }
        if !self.analytics.trade_offs.is_empty() {
            out.push_str("Trade-offs:\n");
            for t in &self.analytics.trade_offs {
                let _ = write!(out, "- {}", trade_off_sentence(self, t));
                out.push_str(".\n");
            }
        }
        out
    }
}

pub(crate) fn trade_off_sentence(ctx: &ContextDocument, t: &TradeOffReport) -> String {
    let mut s = format!(
        "Sol. {} to Sol. {}: Total Cost {} M$, Env. Impact {}",
        t.solution_a,
        t.solution_b,
        fmt_signed(t.delta_cost, 2),
        fmt_signed(t.delta_impact, 3)
    );
    let moves = variable_moves(ctx, t);
    if !moves.is_empty() {
        s.push_str("; ");
        s.push_str(&moves.join(", "));
    }
    s
}

pub(crate) fn variable_moves(ctx: &ContextDocument, t: &TradeOffReport) -> Vec<String> {
    t.top_variable_deltas
        .iter()
        .filter(|d| ctx.variable(d.index).is_some())
        .map(|d| format!("{} {}", d.name, with_unit(&fmt_signed_value(d.delta), &d.unit)))
        .collect()
}

pub fn fmt_cost(v: f64) -> String {
    format!("{v:.2}")
}

pub fn fmt_impact(v: f64) -> String {
    format!("{v:.3}")
}

pub fn fmt_score(v: f64) -> String {
    format!("{v:.2}")
}

/// Up to two decimals, trailing zeros trimmed.
pub fn fmt_value(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub(crate) fn fmt_signed(v: f64, decimals: usize) -> String {
    let s = format!("{:.*}", decimals, v.abs());
    if s.chars().all(|c| c == '0' || c == '.') {
        return s;
    }
    if v < 0.0 {
        format!("-{s}")
    } else {
        format!("+{s}")
    }
}

fn fmt_signed_value(v: f64) -> String {
    let s = fmt_value(v.abs());
    if s == "0" {
        s
    } else if v < 0.0 {
        format!("-{s}")
    } else {
        format!("+{s}")
    }
}

pub fn with_unit(value: &str, unit: &str) -> String {
    match unit {
        "" => value.to_string(),
        "%" => format!("{value}%"),
        u => format!("{value} {u}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting() {
        assert_eq!(fmt_value(49.0), "49");
        assert_eq!(fmt_value(27.345), "27.34");
        assert_eq!(fmt_value(-0.001), "0");
        assert_eq!(fmt_signed(8.009999999999991, 2), "+8.01");
        assert_eq!(fmt_signed(0.573 - 0.807, 3), "-0.234");
        assert_eq!(fmt_signed(0.0, 3), "0.000");
        assert_eq!(with_unit("18", "%"), "18%");
    }
}
