//! Command dispatch.

use serde_json::{json, Value};

use okv_core::degeneration::{
    degenerate_sections, degenerate_semigroup, fiber_check, flag_restriction_check,
    subsystem_compatibility, Degeneration,
};
use okv_core::semigroup::normality_check;
use okv_core::valuation::{nu, nu_image, saturation_check};
use okv_core::{GenerationStatus, GradedSemigroup, Limits};

use crate::error::{CliError, CliResult};
use crate::job::{Job, JobSpec, Source};
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Normality,
    Saturation,
    Restriction,
    Compatibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Nu,
    Body,
    Semigroup,
    Check(CheckKind),
    Degenerate,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Nu => "nu".into(),
            Command::Body => "body".into(),
            Command::Semigroup => "semigroup".into(),
            Command::Check(k) => format!(
                "check {}",
                match k {
                    CheckKind::Normality => "normality",
                    CheckKind::Saturation => "saturation",
                    CheckKind::Restriction => "restriction",
                    CheckKind::Compatibility => "compatibility",
                }
            ),
            Command::Degenerate => "degenerate".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    pub limits: Limits,
    /// Flag rank for `check restriction` (default 1).
    pub rank: Option<usize>,
    /// Valuation prefix for `check saturation` (default empty).
    pub prefix: Vec<u32>,
}

fn sections_only(what: &str) -> CliError {
    CliError::Validation(format!("{what} needs a job with sections"))
}

/// Semigroup of the job up to degree `m`.
fn semigroup(job: &Job, m: u32, limits: &Limits) -> CliResult<GradedSemigroup> {
    Ok(match &job.source {
        Source::Sections { space, flag, .. } => GradedSemigroup::build(space, flag, m, limits)?,
        Source::Generators { dim, gens } => GradedSemigroup::from_generators(*dim, gens, m)?,
        Source::Points { dim, points } => {
            if m > job.max_degree() {
                return Err(CliError::Validation(format!(
                    "explicit points are known only up to degree {}",
                    job.max_degree()
                )));
            }
            GradedSemigroup::from_points(*dim, points, m)?
        }
    })
}

fn dim_of(job: &Job) -> usize {
    match &job.source {
        Source::Sections { flag, .. } => flag.dim(),
        Source::Generators { dim, .. } | Source::Points { dim, .. } => *dim,
    }
}

pub fn run(command: Command, spec: &JobSpec, opts: &Options) -> CliResult<Value> {
    let job = spec.validate()?;
    let limits = &opts.limits;
    let m = job.max_degree();
    let mut caveats = Vec::new();
    let result = match command {
        Command::Nu => {
            let Source::Sections { space, flag, polys, .. } = &job.source else {
                return Err(sections_only("nu"));
            };
            let rows: Vec<Value> = spec
                .sections
                .as_ref()
                .expect("sections present")
                .iter()
                .zip(polys)
                .map(|(text, p)| {
                    let v = nu(p, flag).ok();
                    json!({
                        "section": text,
                        "valuation": v.as_ref().map(report::valuation),
                    })
                })
                .collect();
            let image: Vec<Value> = nu_image(space, flag)?.iter().map(report::valuation).collect();
            json!({"sections": rows, "image": image, "dimension": space.dim()})
        }
        Command::Body => {
            let g = semigroup(&job, m, limits)?;
            caveats.push(format!("inner approximation from the slices of degree 1 to {m}"));
            let body = g.okounkov_body_estimate()?;
            json!({
                "truncation_degree": m,
                "body": report::polytope(&body),
                "lattice_points": body.lattice_points(1).len(),
            })
        }
        Command::Semigroup => {
            let g = semigroup(&job, m, limits)?;
            caveats.push(format!("generation checked only up to degree {m}"));
            let gen = g.check_degree_one_generation();
            let (status, witness) = match &gen.status {
                GenerationStatus::GeneratedInDegreeOne => ("generated_in_degree_one", None),
                GenerationStatus::StrictGrowth(w) => ("strict_growth", Some(report::graded_point(w))),
                GenerationStatus::Inconclusive => ("inconclusive", None),
            };
            let slices: Vec<Value> = g
                .slices()
                .iter()
                .map(|s| json!(s.iter().map(report::valuation).collect::<Vec<_>>()))
                .collect();
            json!({
                "truncation_degree": m,
                "slices": slices,
                "hilbert_counts": g.hilbert_counts(),
                "minimal_generators": g.minimal_generators().iter().map(report::graded_point).collect::<Vec<_>>(),
                "generation": {"status": status, "witness": witness, "checked_degree": gen.checked_degree},
            })
        }
        Command::Check(CheckKind::Normality) => {
            let d = dim_of(&job) as u32;
            let rec = match &job.source {
                Source::Sections { space, flag, .. } => normality_check(space, flag, m, limits)?,
                _ => semigroup(&job, m.max(d), limits)?.normality_check(d)?,
            };
            caveats.push(format!("body estimated from degrees up to {}", m.max(d)));
            json!({
                "truncation_degree": m.max(d),
                "normal": rec.normal,
                "degree": rec.degree,
                "missing": rec.missing.iter().collect::<Vec<_>>(),
            })
        }
        Command::Check(CheckKind::Saturation) => {
            let Source::Sections { space, flag, .. } = &job.source else {
                return Err(sections_only("check saturation"));
            };
            let rec = saturation_check(space, flag, &opts.prefix)?;
            json!({
                "prefix": opts.prefix,
                "saturated": rec.saturated,
                "values": rec.values.iter().collect::<Vec<_>>(),
                "interval": [rec.interval.0, rec.interval.1],
            })
        }
        Command::Check(CheckKind::Restriction) => {
            let Source::Sections { space, flag, .. } = &job.source else {
                return Err(sections_only("check restriction"));
            };
            let r = opts.rank.unwrap_or(1);
            let rec = flag_restriction_check(space, flag, r, m, limits)?;
            caveats.push(format!("bodies estimated from degrees up to {m}"));
            json!({
                "truncation_degree": m,
                "rank": rec.rank,
                "face": report::polytope(&rec.face),
                "restricted_body": report::polytope(&rec.restricted_body),
                "match": rec.matches,
            })
        }
        Command::Check(CheckKind::Compatibility) => {
            let Source::Sections { space, flag, subsystem, .. } = &job.source else {
                return Err(sections_only("check compatibility"));
            };
            let sub = subsystem
                .as_ref()
                .ok_or_else(|| CliError::Validation("check compatibility needs a subsystem".into()))?;
            let rec = subsystem_compatibility(sub, space, flag, m, spec.relation_degree, limits)?;
            caveats.push(format!("bodies estimated from degrees up to {m}"));
            json!({
                "truncation_degree": m,
                "relation_degree": spec.relation_degree,
                "shared_weight_vector": rec.shared_pi.alphas().iter().map(report::integer).collect::<Vec<_>>(),
                "valid_for_both": rec.valid_for_both,
                "body_inclusion": rec.body_inclusion,
                "subsystem_body": report::polytope(&rec.sub_body),
                "body": report::polytope(&rec.body),
            })
        }
        Command::Degenerate => {
            let d = degenerate(&job, limits)?;
            caveats.push(format!("generators taken from degrees up to {}", d.generator_degree));
            caveats.push(format!("relations complete up to degree {}", d.relation_degree));
            degeneration_json(&d)?
        }
    };
    Ok(report::envelope(&command.name(), spec, result, caveats))
}

fn degenerate(job: &Job, limits: &Limits) -> CliResult<Degeneration> {
    let m = job.max_degree();
    let given = job.spec.relation_degree;
    Ok(match &job.source {
        Source::Sections { space, flag, .. } => degenerate_sections(space, flag, m, given, limits)?,
        Source::Generators { dim, gens } => {
            let maxdeg = gens.iter().map(|g| g.degree).max().unwrap_or(1);
            let d = given.unwrap_or(2 * maxdeg.min(m));
            let g = GradedSemigroup::from_generators(*dim, gens, m.max(d))?;
            degenerate_semigroup(&g, m, Some(d), job.field, limits)?
        }
        Source::Points { .. } => {
            let g = semigroup(job, m, limits)?;
            if let Some(d) = given {
                if d > m {
                    return Err(CliError::Validation(format!(
                        "relation degree {d} exceeds the explicit points' degree {m}"
                    )));
                }
            }
            degenerate_semigroup(&g, m, Some(given.unwrap_or(m)), job.field, limits)?
        }
    })
}

fn degeneration_json(d: &Degeneration) -> CliResult<Value> {
    let gens: Vec<Value> = d
        .presentation
        .generators()
        .iter()
        .map(|g| {
            json!({
                "label": g.label,
                "lift": g.lift.to_string(),
                "degree": report::graded_point(&g.degree),
                "weight": g.weight.as_ref().map(report::integer),
            })
        })
        .collect();
    let field = d.presentation.field();
    let mut fibers = serde_json::Map::new();
    for t in [1i64, 2] {
        let ok = fiber_check(&d.relations, &d.presentation, &d.weight, &field.from_i64(t))?;
        fibers.insert(t.to_string(), Value::Bool(ok));
    }
    Ok(json!({
        "generator_degree": d.generator_degree,
        "relation_degree": d.relation_degree,
        "presentation": gens,
        "weight_vector": d.weight.alphas().iter().map(report::integer).collect::<Vec<_>>(),
        "relations": d.relations.relations.iter().map(report::relation).collect::<Vec<_>>(),
        "flatness": report::flatness(&d.flatness),
        "fiber_checks": fibers,
    }))
}
