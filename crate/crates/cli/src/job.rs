//! Job descriptions read from JSON.

use serde::{Deserialize, Serialize};

use okv_core::{variables, FlagSpec, Field, GradedPoint, Polynomial, SectionSpace};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    /// Only `"Q"` is accepted.
    Named(String),
    Prime {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

impl FieldSpec {
    pub fn to_field(&self) -> CliResult<Field> {
        match self {
            FieldSpec::Named(s) if s == "Q" => Ok(Field::Rational),
            FieldSpec::Named(s) => Err(CliError::Validation(format!("unknown field {s:?}"))),
            FieldSpec::Prime { fp } => Ok(Field::prime(*fp)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub field: FieldSpec,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup_generators: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup_points: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsystem: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// Sections with their flag, or an abstract semigroup.
#[derive(Debug, Clone)]
pub enum Source {
    Sections {
        space: SectionSpace,
        flag: FlagSpec,
        polys: Vec<Polynomial>,
        subsystem: Option<SectionSpace>,
    },
    Generators {
        dim: usize,
        gens: Vec<GradedPoint>,
    },
    Points {
        dim: usize,
        points: Vec<GradedPoint>,
    },
}

#[derive(Debug, Clone)]
pub struct Job {
    pub spec: JobSpec,
    pub field: Field,
    pub source: Source,
}

pub const DEFAULT_MAX_DEGREE: u32 = 2;

impl Job {
    pub fn max_degree(&self) -> u32 {
        self.spec.max_degree.unwrap_or(DEFAULT_MAX_DEGREE)
    }
}

fn graded_points(rows: &[Vec<i64>], what: &str) -> CliResult<(usize, Vec<GradedPoint>)> {
    let first = rows
        .first()
        .ok_or_else(|| CliError::Validation(format!("{what} is empty")))?;
    let len = first.len();
    if len == 0 {
        return Err(CliError::Validation(format!("{what} entries need a degree")));
    }
    let mut out = Vec::new();
    for row in rows {
        if row.len() != len {
            return Err(CliError::Validation(format!("{what} entries differ in length")));
        }
        let degree = u32::try_from(row[0])
            .map_err(|_| CliError::Validation(format!("{what} entry {row:?} has a negative degree")))?;
        out.push(GradedPoint::new(degree, row[1..].to_vec()));
    }
    Ok((len - 1, out))
}

impl JobSpec {
    pub fn from_json(text: &str) -> CliResult<JobSpec> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("job spec: {e}")))
    }

    pub fn validate(&self) -> CliResult<Job> {
        let field = self.field.to_field()?;
        if self.max_degree == Some(0) {
            return Err(CliError::Validation("max_degree must be at least 1".into()));
        }
        if self.relation_degree == Some(0) {
            return Err(CliError::Validation("relation_degree must be at least 1".into()));
        }
        let given = [
            self.sections.is_some(),
            self.semigroup_generators.is_some(),
            self.semigroup_points.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if given != 1 {
            return Err(CliError::Validation(
                "exactly one of sections, semigroup_generators, semigroup_points is required".into(),
            ));
        }
        let source = if let Some(sections) = &self.sections {
            let vars = variables(&self.variables);
            let flag = FlagSpec::new(vars.clone())?;
            let parse = |list: &[String]| -> CliResult<Vec<Polynomial>> {
                list.iter()
                    .map(|s| Ok(Polynomial::parse(s, vars.clone(), field)?))
                    .collect()
            };
            let polys = parse(sections)?;
            let space = SectionSpace::span(vars.clone(), field, &polys)?;
            if space.is_zero() {
                return Err(CliError::Validation("the sections span the zero space".into()));
            }
            let subsystem = match &self.subsystem {
                None => None,
                Some(list) => Some(SectionSpace::span(vars.clone(), field, &parse(list)?)?),
            };
            Source::Sections {
                space,
                flag,
                polys,
                subsystem,
            }
        } else {
            if self.subsystem.is_some() {
                return Err(CliError::Validation("subsystem needs sections".into()));
            }
            let (rows, what) = match (&self.semigroup_generators, &self.semigroup_points) {
                (Some(r), _) => (r, "semigroup_generators"),
                (_, Some(r)) => (r, "semigroup_points"),
                _ => unreachable!("one source present"),
            };
            let (dim, pts) = graded_points(rows, what)?;
            if !self.variables.is_empty() && self.variables.len() != dim {
                return Err(CliError::Validation(format!(
                    "{} variables declared for {dim}-dimensional points",
                    self.variables.len()
                )));
            }
            if self.semigroup_generators.is_some() {
                if pts.iter().any(|p| p.degree == 0) {
                    return Err(CliError::Validation("generators need degree at least 1".into()));
                }
                Source::Generators { dim, gens: pts }
            } else {
                Source::Points { dim, points: pts }
            }
        };
        Ok(Job {
            spec: self.clone(),
            field,
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fields() {
        let q = JobSpec::from_json(r#"{"field":"Q","variables":["x"],"sections":["1","x"]}"#).unwrap();
        assert_eq!(q.field, FieldSpec::Named("Q".into()));
        let p = JobSpec::from_json(r#"{"field":{"Fp":7},"variables":["x"],"sections":["x"]}"#).unwrap();
        assert_eq!(p.validate().unwrap().field, Field::prime(7).unwrap());
        let bad = JobSpec::from_json(r#"{"field":{"Fp":8},"variables":["x"],"sections":["x"]}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_ambiguous_sources() {
        assert!(JobSpec::from_json(r#"{"field":"Q","variables":[],"colour":1}"#).is_err());
        let both = JobSpec::from_json(
            r#"{"field":"Q","variables":["x"],"sections":["x"],"semigroup_generators":[[1,0]]}"#,
        )
        .unwrap();
        assert!(matches!(both.validate(), Err(CliError::Validation(_))));
        let none = JobSpec::from_json(r#"{"field":"Q","variables":["x"]}"#).unwrap();
        assert!(none.validate().is_err());
    }

    #[test]
    fn rejects_undeclared_variables() {
        let job = JobSpec::from_json(r#"{"field":"Q","variables":["x"],"sections":["y"]}"#).unwrap();
        assert!(matches!(job.validate(), Err(CliError::Validation(_))));
    }

    #[test]
    fn rejects_zero_degrees() {
        let job = JobSpec::from_json(
            r#"{"field":"Q","semigroup_generators":[[1,0]],"max_degree":0}"#,
        )
        .unwrap();
        assert!(job.validate().is_err());
    }
}
