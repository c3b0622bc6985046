use serde::{Deserialize, Serialize};

use super::InferenceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expertise {
    DomainExpert,
    MidTechnical,
    Executive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    Environmental,
    Investor,
    Community,
    Regulatory,
    Socioeconomic,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Register {
    Technical,
    Plain,
}

impl Expertise {
    pub fn as_str(&self) -> &'static str {
        match self {
            Expertise::DomainExpert => "domain_expert",
            Expertise::MidTechnical => "mid_technical",
            Expertise::Executive => "executive",
        }
    }

    pub fn default_register(&self) -> Register {
        match self {
            Expertise::Executive => Register::Plain,
            _ => Register::Technical,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "domain_expert" => Some(Self::DomainExpert),
            "mid_technical" => Some(Self::MidTechnical),
            "executive" => Some(Self::Executive),
            _ => None,
        }
    }
}

impl Goal {
    pub fn as_str(&self) -> &'static str {
        match self {
            Goal::Environmental => "environmental",
            Goal::Investor => "investor",
            Goal::Community => "community",
            Goal::Regulatory => "regulatory",
            Goal::Socioeconomic => "socioeconomic",
            Goal::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "environmental" => Some(Self::Environmental),
            "investor" => Some(Self::Investor),
            "community" => Some(Self::Community),
            "regulatory" => Some(Self::Regulatory),
            "socioeconomic" => Some(Self::Socioeconomic),
            "none" => Some(Self::None),
            _ => None,
        }
    }
}

impl Register {
    pub fn as_str(&self) -> &'static str {
        match self {
            Register::Technical => "technical",
            Register::Plain => "plain",
        }
    }
}

/// Stakeholder profile. Executives always get the plain register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Persona {
    expertise: Expertise,
    goal: Goal,
    language_register: Register,
}

impl Persona {
    pub fn new(expertise: Expertise, goal: Goal, register: Register) -> Result<Self, InferenceError> {
        if expertise == Expertise::Executive && register != Register::Plain {
            return Err(InferenceError::Config(
                "executive persona requires the plain register".into(),
            ));
        }
        Ok(Self {
            expertise,
            goal,
            language_register: register,
        })
    }

    /// Persona with the expertise's default register.
    pub fn of(expertise: Expertise, goal: Goal) -> Self {
        Self {
            expertise,
            goal,
            language_register: expertise.default_register(),
        }
    }

    pub fn expertise(&self) -> Expertise {
        self.expertise
    }

    pub fn goal(&self) -> Goal {
        self.goal
    }

    pub fn register(&self) -> Register {
        self.language_register
    }
}

impl Default for Persona {
    fn default() -> Self {
        Self::of(Expertise::Executive, Goal::None)
    }
}

impl<'de> Deserialize<'de> for Persona {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            expertise: Expertise,
            #[serde(default)]
            goal: Goal,
            #[serde(alias = "register")]
            language_register: Option<Register>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let register = raw
            .language_register
            .unwrap_or_else(|| raw.expertise.default_register());
        Persona::new(raw.expertise, raw.goal, register).map_err(serde::de::Error::custom)
    }
}
