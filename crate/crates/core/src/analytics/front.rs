use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::emo::{Dominance, RunDocument, RunResult};
use crate::problem::{ObjectiveVector, VariableSchema};

pub const COL_NUMBER: &str = "Sol. #";
pub const COL_COST: &str = "Total Cost (M$)";
pub const COL_IMPACT: &str = "Env. Impact (Score)";

/// A decision variable carried by a front, as it appears in exports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontColumn {
    pub index: usize,
    pub name: String,
    pub unit: String,
}

impl FrontColumn {
    pub fn header(&self) -> String {
        format!("{} ({})", self.name, self.unit)
    }
}

/// One numbered member of a front. `x` follows the front's columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSolution {
    pub number: usize,
    pub x: Vec<f64>,
    pub objectives: ObjectiveVector,
}

impl FrontSolution {
    pub fn cost(&self) -> f64 {
        self.objectives.total_cost
    }

    pub fn impact(&self) -> f64 {
        self.objectives.environmental_impact
    }
}

/// Mutually non-dominated solutions, sorted by strictly increasing total cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoFront {
    instance_ref: String,
    columns: Vec<FrontColumn>,
    solutions: Vec<FrontSolution>,
}

impl ParetoFront {
    /// Sorts by cost, drops exact objective duplicates (keeping the lowest
    /// solution number) and rejects any dominated member.
    pub fn new(
        instance_ref: impl Into<String>,
        columns: Vec<FrontColumn>,
        mut solutions: Vec<FrontSolution>,
    ) -> Result<Self, AnalyticsError> {
        let mut numbers = std::collections::HashSet::new();
        for s in &solutions {
            if s.x.len() != columns.len() {
                return Err(AnalyticsError::ColumnMismatch {
                    number: s.number,
                    expected: columns.len(),
                    found: s.x.len(),
                });
            }
            if !s.cost().is_finite() || !s.impact().is_finite() || s.x.iter().any(|v| !v.is_finite())
            {
                return Err(AnalyticsError::NonFinite(s.number));
            }
            if !numbers.insert(s.number) {
                return Err(AnalyticsError::DuplicateNumber(s.number));
            }
        }
        solutions.sort_by(|a, b| {
            a.cost()
                .total_cmp(&b.cost())
                .then(a.impact().total_cmp(&b.impact()))
                .then(a.number.cmp(&b.number))
        });
        solutions.dedup_by(|later, kept| later.objectives == kept.objectives);
        for (i, a) in solutions.iter().enumerate() {
            for b in &solutions[i + 1..] {
                match crate::emo::dominates(&a.objectives.to_array(), &b.objectives.to_array()) {
                    Ok(Dominance::ADominates) => {
                        return Err(AnalyticsError::Dominated {
                            dominated: b.number,
                            by: a.number,
                        })
                    }
                    Ok(Dominance::BDominates) => {
                        return Err(AnalyticsError::Dominated {
                            dominated: a.number,
                            by: b.number,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            instance_ref: instance_ref.into(),
            columns,
            solutions,
        })
    }

    /// Numbers the run's rank-0 set 1..=n in cost order.
    pub fn from_run(run: &RunResult, schema: &VariableSchema) -> Result<Self, AnalyticsError> {
        let rows = run.front.iter().map(|i| (i.x.as_slice(), i.f.as_slice()));
        Self::numbered(run.instance_ref.clone(), schema, rows)
    }

    /// Same numbering as [`ParetoFront::from_run`], from a stored run document.
    pub fn from_document(doc: &RunDocument, schema: &VariableSchema) -> Result<Self, AnalyticsError> {
        let rows = doc.front.iter().map(|r| (r.x.as_slice(), r.f.as_slice()));
        Self::numbered(doc.instance_ref.clone(), schema, rows)
    }

    fn numbered<'a>(
        instance_ref: String,
        schema: &VariableSchema,
        rows: impl Iterator<Item = (&'a [f64], &'a [f64])>,
    ) -> Result<Self, AnalyticsError> {
        let columns = schema
            .variables()
            .iter()
            .map(|v| FrontColumn {
                index: v.index,
                name: v.name.clone(),
                unit: v.unit.clone(),
            })
            .collect();
        let mut members: Vec<_> = rows.collect();
        for (i, (_, f)) in members.iter().enumerate() {
            if f.len() != 2 {
                return Err(AnalyticsError::ColumnMismatch {
                    number: i + 1,
                    expected: 2,
                    found: f.len(),
                });
            }
        }
        members.sort_by(|a, b| a.1[0].total_cmp(&b.1[0]).then(a.1[1].total_cmp(&b.1[1])));
        let solutions = members
            .into_iter()
            .enumerate()
            .map(|(i, (x, f))| FrontSolution {
                number: i + 1,
                x: x.to_vec(),
                objectives: ObjectiveVector::new(f[0], f[1]),
            })
            .collect();
        Self::new(instance_ref, columns, solutions)
    }

    pub fn instance_ref(&self) -> &str {
        &self.instance_ref
    }

    pub fn columns(&self) -> &[FrontColumn] {
        &self.columns
    }

    pub fn solutions(&self) -> &[FrontSolution] {
        &self.solutions
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn get(&self, number: usize) -> Result<&FrontSolution, AnalyticsError> {
        self.solutions
            .iter()
            .find(|s| s.number == number)
            .ok_or(AnalyticsError::UnknownSolution(number))
    }

    pub fn position(&self, number: usize) -> Option<usize> {
        self.solutions.iter().position(|s| s.number == number)
    }

    pub fn column_position(&self, index: usize) -> Option<usize> {
        self.columns.iter().position(|c| c.index == index)
    }

    /// Values of one column along the front, in cost order.
    pub fn column_values(&self, position: usize) -> Vec<f64> {
        self.solutions.iter().map(|s| s.x[position]).collect()
    }

    /// Comma-separated export. Numbers are written in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![COL_NUMBER.to_string(), COL_COST.into(), COL_IMPACT.into()];
        header.extend(self.columns.iter().map(FrontColumn::header));
        w.write_record(&header).expect("in-memory write");
        for s in &self.solutions {
            let mut row = vec![s.number.to_string(), s.cost().to_string(), s.impact().to_string()];
            row.extend(s.x.iter().map(|v| v.to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Parses an export. Column headers are matched by name against `schema`
    /// when given; otherwise columns are numbered by position.
    pub fn from_csv(
        text: &str,
        instance_ref: impl Into<String>,
        schema: Option<&VariableSchema>,
    ) -> Result<Self, AnalyticsError> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = r.headers().map_err(csv_err)?.clone();
        let fixed: Vec<&str> = header.iter().take(3).collect();
        if fixed != [COL_NUMBER, COL_COST, COL_IMPACT] {
            return Err(AnalyticsError::Csv(format!(
                "expected leading columns \"{COL_NUMBER}\", \"{COL_COST}\", \"{COL_IMPACT}\""
            )));
        }
        let columns = header
            .iter()
            .skip(3)
            .enumerate()
            .map(|(pos, h)| parse_column(pos, h, schema))
            .collect::<Result<Vec<_>, _>>()?;
        let mut solutions = Vec::new();
        for record in r.records() {
            let record = record.map_err(csv_err)?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let number: usize = record[0]
                .parse()
                .map_err(|_| AnalyticsError::Csv(format!("line {line}: bad solution number")))?;
            let nums = record
                .iter()
                .skip(1)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| AnalyticsError::Csv(format!("line {line}: bad number {v:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            solutions.push(FrontSolution {
                number,
                objectives: ObjectiveVector::new(nums[0], nums[1]),
                x: nums[2..].to_vec(),
            });
        }
        Self::new(instance_ref, columns, solutions)
    }
}

fn csv_err(e: csv::Error) -> AnalyticsError {
    AnalyticsError::Csv(e.to_string())
}

fn parse_column(
    pos: usize,
    header: &str,
    schema: Option<&VariableSchema>,
) -> Result<FrontColumn, AnalyticsError> {
    let (name, unit) = match header.rfind(" (") {
        Some(i) if header.ends_with(')') => (&header[..i], &header[i + 2..header.len() - 1]),
        _ => (header, ""),
    };
    let index = match schema {
        Some(s) => s
            .by_name(name)
            .map(|v| v.index)
            .ok_or_else(|| AnalyticsError::Csv(format!("unknown variable column {name:?}")))?,
        None => pos + 1,
    };
    Ok(FrontColumn {
        index,
        name: name.to_string(),
        unit: unit.to_string(),
    })
}

impl<'de> Deserialize<'de> for ParetoFront {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            instance_ref: String,
            columns: Vec<FrontColumn>,
            solutions: Vec<FrontSolution>,
        }
        let raw = Raw::deserialize(deserializer)?;
        ParetoFront::new(raw.instance_ref, raw.columns, raw.solutions)
            .map_err(serde::de::Error::custom)
    }
}

const SAMPLE_TABLE: &str = include_str!("../../fixtures/sample_table.csv");

/// The seven published rows with their three listed variables.
pub fn sample_front() -> ParetoFront {
    ParetoFront::from_csv(
        SAMPLE_TABLE,
        "sample-table",
        Some(&crate::problem::benchmark_schema()),
    )
    .expect("table fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(number: usize, c: f64, i: f64) -> FrontSolution {
        FrontSolution {
            number,
            x: vec![],
            objectives: ObjectiveVector::new(c, i),
        }
    }

    #[test]
    fn sorts_and_dedupes() {
        let f = ParetoFront::new(
            "t",
            vec![],
            vec![sol(3, 2.0, 0.0), sol(1, 0.0, 2.0), sol(2, 2.0, 0.0)],
        )
        .unwrap();
        let numbers: Vec<usize> = f.solutions().iter().map(|s| s.number).collect();
        assert_eq!(numbers, vec![1, 2]);
    }

    #[test]
    fn rejects_dominated_member() {
        let err = ParetoFront::new("t", vec![], vec![sol(1, 0.0, 0.0), sol(2, 1.0, 1.0)]).unwrap_err();
        assert_eq!(err, AnalyticsError::Dominated { dominated: 2, by: 1 });
    }

    #[test]
    fn sample_columns_resolve() {
        let f = sample_front();
        assert_eq!(f.len(), 7);
        let idx: Vec<usize> = f.columns().iter().map(|c| c.index).collect();
        assert_eq!(idx, vec![1, 2, 3]);
        assert_eq!(f.get(51).unwrap().x, vec![49.0, 27.0, 18.0]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let f = sample_front();
        let again = ParetoFront::from_csv(&f.to_csv(), "sample-table", None).unwrap();
        assert_eq!(again.solutions(), f.solutions());
        assert!(f.to_csv().starts_with("Sol. #,Total Cost (M$),Env. Impact (Score),Cost Efficiency (Units/$)"));
    }
}
