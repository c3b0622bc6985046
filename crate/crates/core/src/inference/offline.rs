//! Deterministic narrative built only from the prompt's context document.

use super::context::{
    fmt_cost, fmt_impact, fmt_score, fmt_signed, fmt_value, variable_moves, with_unit, ContextDocument,
    HighlightedSolution, Role,
};
use super::persona::{Expertise, Goal};
use super::prompt::{PromptDocument, TemplateId};
use crate::problem::Tier;

pub const OFFLINE_BACKEND_ID: &str = "offline-narrative-v1";

/// Bullet cap for the plain register.
const PLAIN_BULLETS: usize = 3;

pub fn narrate(prompt: &PromptDocument) -> String {
    let ctx = &prompt.context;
    let mut lines = match prompt.template {
        Some(TemplateId::Categorize) => categorize(ctx),
        _ => solutions(ctx, prompt),
    };
    if let Some(line) = goal_line(ctx, prompt.persona.goal()) {
        lines.push(line);
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

fn categorize(ctx: &ContextDocument) -> Vec<String> {
    let mut out = vec!["Variable importance along the front, from rank correlation with the objectives:".to_string()];
    for (tier, label) in [
        (Tier::Primary, "Primary"),
        (Tier::Secondary, "Secondary"),
        (Tier::Additional, "Additional"),
    ] {
        let vs: Vec<String> = ctx
            .schema_excerpt
            .iter()
            .filter(|v| v.tier == tier)
            .map(|v| format!("{} ({})", v.name, fmt_score(v.score)))
            .collect();
        let listed = if vs.is_empty() {
            "none in this context".to_string()
        } else {
            vs.join(", ")
        };
        out.push(format!("- {label}: {listed}"));
    }
    let o = &ctx.omitted;
    let parts: Vec<String> = [(o.secondary, "secondary"), (o.additional, "additional")]
        .into_iter()
        .filter(|(n, _)| *n > 0)
        .map(|(n, label)| format!("{n} {label}"))
        .collect();
    if !parts.is_empty() {
        out.push(format!("Not listed here: {} variables.", parts.join(" and ")));
    }
    out.push("Primary variables move with both objectives across the whole front; secondary ones matter over part of it; additional ones barely change the outcome.".into());
    out
}

fn role_sentence(s: &HighlightedSolution) -> &'static str {
    if s.has_role(Role::Knee) {
        "Knee of the front: a balanced trade-off between cost and environmental impact."
    } else if s.has_role(Role::MinCost) {
        "Lowest-cost option on the front, carrying the highest environmental impact."
    } else if s.has_role(Role::MinImpact) {
        "Lowest-impact option on the front, reached at the highest total cost."
    } else {
        "Intermediate option between the two extremes."
    }
}

fn settings(ctx: &ContextDocument, s: &HighlightedSolution) -> String {
    ctx.schema_excerpt
        .iter()
        .zip(&s.values)
        .map(|(v, &x)| format!("{} {}", v.name, with_unit(&fmt_value(x), &v.unit)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Rows in reading order: the selection, then the knee and the extremes.
fn ordered_rows(ctx: &ContextDocument, plain: bool) -> Vec<&HighlightedSolution> {
    let mut rows: Vec<&HighlightedSolution> = ctx
        .highlighted_solutions
        .iter()
        .filter(|s| s.has_role(Role::Selected))
        .collect();
    let mut push = |role: Role| {
        if let Some(s) = ctx.highlighted_solutions.iter().find(|s| s.has_role(role)) {
            if !rows.iter().any(|r| r.number == s.number) {
                rows.push(s);
            }
        }
    };
    if plain {
        push(Role::Knee);
        push(Role::MinCost);
        push(Role::MinImpact);
    } else {
        push(Role::MinCost);
        push(Role::Knee);
        push(Role::MinImpact);
    }
    rows
}

fn solutions(ctx: &ContextDocument, prompt: &PromptDocument) -> Vec<String> {
    let expertise = prompt.persona.expertise();
    let plain = expertise == Expertise::Executive;
    let mut out = vec!["Highlighted solutions on the front:".to_string()];
    let rows = ordered_rows(ctx, plain);
    let cap = if plain { PLAIN_BULLETS } else { usize::MAX };
    for s in rows.into_iter().take(cap) {
        let mut line = format!(
            "- Solution {}: Total Cost {} M$, Environmental Impact {}. {}",
            s.number,
            fmt_cost(s.total_cost),
            fmt_impact(s.environmental_impact),
            role_sentence(s)
        );
        if expertise != Expertise::Executive && !s.values.is_empty() {
            line.push_str(&format!(" Key settings: {}.", settings(ctx, s)));
        }
        out.push(line);
    }
    if !plain {
        for t in &ctx.analytics.trade_offs {
            let mut line = format!(
                "Moving from solution {} to solution {} changes total cost by {} M$ and environmental impact by {}",
                t.solution_a,
                t.solution_b,
                fmt_signed(t.delta_cost, 2),
                fmt_signed(t.delta_impact, 3)
            );
            let moves = variable_moves(ctx, t);
            if expertise == Expertise::DomainExpert && !moves.is_empty() {
                line.push_str(&format!("; the largest variable moves are {}", moves.join(", ")));
            }
            line.push('.');
            out.push(line);
        }
    }
    if prompt.template == Some(TemplateId::TradeoffAnalysis) {
        if let Some(k) = ctx.analytics.knee {
            out.push(format!(
                "Solution {k} is the most even compromise in this context: further cost buys progressively smaller impact reductions beyond it."
            ));
        }
    }
    out
}

fn goal_line(ctx: &ContextDocument, goal: Goal) -> Option<String> {
    let a = &ctx.analytics;
    let sol = |n: usize| ctx.solution(n);
    match goal {
        Goal::None => None,
        Goal::Environmental => sol(a.min_impact).map(|s| {
            format!(
                "For environmental priorities, solution {} has the lowest impact in this context at {}.",
                s.number,
                fmt_impact(s.environmental_impact)
            )
        }),
        Goal::Investor => sol(a.min_cost).map(|s| {
            format!(
                "For investors, solution {} keeps total cost lowest at {} M$.",
                s.number,
                fmt_cost(s.total_cost)
            )
        }),
        Goal::Community => Some(match a.knee {
            Some(k) => format!("For local communities, solution {k} limits impact without the highest spending."),
            None => "For local communities, the lowest-impact option limits local disruption most.".into(),
        }),
        Goal::Regulatory => Some(
            "For regulators, every highlighted solution is Pareto-optimal and each figure above is taken from the optimization results."
                .into(),
        ),
        Goal::Socioeconomic => Some(match a.knee {
            Some(k) => format!("For broader societal goals, solution {k} balances public spending against environmental outcomes."),
            None => "For broader societal goals, the extremes bound the spending and impact that society would bear.".into(),
        }),
    }
}
