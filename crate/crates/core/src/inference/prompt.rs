use serde::{Deserialize, Serialize};

use super::context::ContextDocument;
use super::persona::{Expertise, Goal, Persona};
use super::InferenceError;

pub const DEFAULT_CHARACTER_BUDGET: usize = 12_000;
/// Bumped whenever any template asset changes wording.
pub const TEMPLATE_VERSION: u32 = 1;

const PREAMBLE: &str = include_str!("../../templates/preamble.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    Categorize,
    TradeoffAnalysis,
    SolutionBrief,
    ExpertiseTailored,
    StakeholderGoal,
}

impl TemplateId {
    pub const ALL: [TemplateId; 5] = [
        TemplateId::Categorize,
        TemplateId::TradeoffAnalysis,
        TemplateId::SolutionBrief,
        TemplateId::ExpertiseTailored,
        TemplateId::StakeholderGoal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TemplateId::Categorize => "categorize",
            TemplateId::TradeoffAnalysis => "tradeoff_analysis",
            TemplateId::SolutionBrief => "solution_brief",
            TemplateId::ExpertiseTailored => "expertise_tailored",
            TemplateId::StakeholderGoal => "stakeholder_goal",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn source(&self) -> &'static str {
        match self {
            TemplateId::Categorize => include_str!("../../templates/categorize.txt"),
            TemplateId::TradeoffAnalysis => include_str!("../../templates/tradeoff_analysis.txt"),
            TemplateId::SolutionBrief => include_str!("../../templates/solution_brief.txt"),
            TemplateId::ExpertiseTailored => include_str!("../../templates/expertise_tailored.txt"),
            TemplateId::StakeholderGoal => include_str!("../../templates/stakeholder_goal.txt"),
        }
    }
}

fn persona_block(e: Expertise) -> &'static str {
    match e {
        Expertise::DomainExpert => include_str!("../../templates/persona/domain_expert.txt"),
        Expertise::MidTechnical => include_str!("../../templates/persona/mid_technical.txt"),
        Expertise::Executive => include_str!("../../templates/persona/executive.txt"),
    }
}

fn goal_block(g: Goal) -> Option<&'static str> {
    match g {
        Goal::Environmental => Some(include_str!("../../templates/goal/environmental.txt")),
        Goal::Investor => Some(include_str!("../../templates/goal/investor.txt")),
        Goal::Community => Some(include_str!("../../templates/goal/community.txt")),
        Goal::Regulatory => Some(include_str!("../../templates/goal/regulatory.txt")),
        Goal::Socioeconomic => Some(include_str!("../../templates/goal/socioeconomic.txt")),
        Goal::None => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Question {
    Template(TemplateId),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptDocument {
    pub system_preamble: String,
    pub context_block: String,
    pub question: String,
    pub persona: Persona,
    pub character_budget: usize,
    pub template: Option<TemplateId>,
    pub template_version: u32,
    /// The context after truncation; `context_block` renders exactly this.
    pub context: ContextDocument,
}

impl PromptDocument {
    /// The user-side message: context then question.
    pub fn user_message(&self) -> String {
        format!("Context:\n{}\n{}", self.context_block, self.question)
    }

    /// Full text whose length is held within the budget and whose digest
    /// identifies the prompt.
    pub fn text(&self) -> String {
        format!("{}\n\n{}", self.system_preamble, self.user_message())
    }

    pub fn len_chars(&self) -> usize {
        self.text().chars().count()
    }
}

pub fn system_preamble(persona: &Persona) -> String {
    let mut s = String::from(PREAMBLE);
    s.push_str(persona_block(persona.expertise()));
    if let Some(g) = goal_block(persona.goal()) {
        s.push_str(g);
    }
    s.trim_end().to_string()
}

fn question_text(ctx: &ContextDocument, q: &Question) -> Result<(String, Option<TemplateId>), InferenceError> {
    match q {
        Question::Template(t) => {
            let focus = focus_phrase(ctx);
            Ok((t.source().replace("{{focus}}", &focus).trim_end().to_string(), Some(*t)))
        }
        Question::Text(s) if s.trim().is_empty() => {
            Err(InferenceError::Config("question is empty and no template was selected".into()))
        }
        Question::Text(s) => Ok((s.trim().to_string(), None)),
    }
}

/// Names of up to three leading variables, for the trade-off template.
fn focus_phrase(ctx: &ContextDocument) -> String {
    let mut vars: Vec<_> = ctx.schema_excerpt.iter().collect();
    vars.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    let names: Vec<String> = vars.iter().take(3).map(|v| v.name.to_lowercase()).collect();
    match names.len() {
        0 => "the decision variables".into(),
        1 => names[0].clone(),
        n => format!("{} and {}", names[..n - 1].join(", "), names[n - 1]),
    }
}

/// Deterministic assembly. Drops additional-tier, then secondary-tier
/// variables until the prompt fits `budget`.
pub fn build_prompt(
    ctx: &ContextDocument,
    persona: &Persona,
    question: &Question,
    budget: usize,
) -> Result<PromptDocument, InferenceError> {
    let mut ctx = ctx.clone();
    let system_preamble = system_preamble(persona);
    let (question, template) = question_text(&ctx, question)?;
    let assemble = |ctx: &ContextDocument| PromptDocument {
        system_preamble: system_preamble.clone(),
        context_block: ctx.render(),
        question: question.clone(),
        persona: *persona,
        character_budget: budget,
        template,
        template_version: TEMPLATE_VERSION,
        context: ctx.clone(),
    };
    let mut doc = assemble(&ctx);
    let mut order = ctx.truncation_order().into_iter();
    while doc.len_chars() > budget {
        match order.next() {
            Some(idx) => {
                ctx.drop_variable(idx);
                doc = assemble(&ctx);
            }
            None => {
                return Err(InferenceError::Budget {
                    needed: doc.len_chars(),
                    budget,
                })
            }
        }
    }
    Ok(doc)
}
