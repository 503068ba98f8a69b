//! Named example jobs.

use crate::error::{CliError, CliResult};
use crate::job::{FieldSpec, JobSpec};

pub const FIXTURE_NAMES: &[&str] = &[
    "counterexample-p1xp1",
    "bott-samelson-u",
    "bott-samelson-m",
    "elliptic-good",
    "elliptic-bad",
    "hirzebruch-trapezoid",
    "abelian-trapezoid",
];

const BOTT_SAMELSON_U: &[&str] = &[
    "1",
    "x",
    "y",
    "z",
    "x*z",
    "y*z",
    "x*(x*z+y)",
    "y*(x*z+y)",
];

/// `M = U + x·U`: the five new sections below complete `U` to a
/// 13-dimensional system.
const BOTT_SAMELSON_X_MULTIPLES: &[&str] = &["x^2", "x*y", "x*y*z", "x^2*(x*z+y)", "x*y*(x*z+y)"];

/// Largest degree of the explicit elliptic-bad point set.
pub const ELLIPTIC_BAD_DEGREE: u32 = 6;

fn strings(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn sections_job(vars: &[&str], sections: Vec<String>, max_degree: u32, provenance: &str) -> JobSpec {
    JobSpec {
        field: FieldSpec::Named("Q".into()),
        variables: strings(vars),
        sections: Some(sections),
        semigroup_generators: None,
        semigroup_points: None,
        subsystem: None,
        max_degree: Some(max_degree),
        relation_degree: None,
        provenance: Some(provenance.into()),
    }
}

fn generators_job(gens: Vec<Vec<i64>>, max_degree: u32, relation_degree: Option<u32>, provenance: &str) -> JobSpec {
    JobSpec {
        field: FieldSpec::Named("Q".into()),
        variables: Vec::new(),
        sections: None,
        semigroup_generators: Some(gens),
        semigroup_points: None,
        subsystem: None,
        max_degree: Some(max_degree),
        relation_degree,
        provenance: Some(provenance.into()),
    }
}

/// Degree-one lattice points of a polygon, as semigroup generators.
fn polygon_generators(points: &[(i64, i64)]) -> Vec<Vec<i64>> {
    points.iter().map(|&(a, b)| vec![1, a, b]).collect()
}

pub fn load_fixture(name: &str) -> CliResult<JobSpec> {
    let job = match name {
        "counterexample-p1xp1" => {
            let mut job = sections_job(
                &["x", "y"],
                strings(&["1", "x", "y + x*y^3", "x*y"]),
                2,
                "four sections of O(1,3) on P1xP1 whose value semigroup is not generated in degree one",
            );
            job.subsystem = Some(strings(&["1", "x", "x*y"]));
            job
        }
        "bott-samelson-u" => sections_job(
            &["x", "y", "z"],
            strings(BOTT_SAMELSON_U),
            3,
            "eight-dimensional system on a Bott-Samelson threefold",
        ),
        "bott-samelson-m" => {
            let mut sections = strings(BOTT_SAMELSON_U);
            sections.extend(strings(BOTT_SAMELSON_X_MULTIPLES));
            let mut job = sections_job(
                &["x", "y", "z"],
                sections,
                2,
                "the Bott-Samelson system enlarged by its multiples by x (13 sections)",
            );
            job.subsystem = Some(strings(BOTT_SAMELSON_U));
            job
        }
        "elliptic-good" => generators_job(
            vec![vec![1, 0], vec![1, 1], vec![1, 3]],
            6,
            Some(3),
            "plane cubic with a flag point whose value semigroup is generated by (1,0), (1,1), (1,3)",
        ),
        "elliptic-bad" => {
            let points: Vec<Vec<i64>> = (1..=ELLIPTIC_BAD_DEGREE as i64)
                .flat_map(|m| (0..3 * m).map(move |r| vec![m, r]))
                .collect();
            JobSpec {
                semigroup_generators: None,
                semigroup_points: Some(points),
                ..generators_job(
                    Vec::new(),
                    ELLIPTIC_BAD_DEGREE,
                    None,
                    "plane cubic with a flag point whose value semigroup {(m,r): 0 <= r <= 3m-1} is not finitely generated",
                )
            }
        }
        "hirzebruch-trapezoid" => generators_job(
            polygon_generators(&[(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (3, 1)]),
            2,
            None,
            "ruled surface with a=3, b=1, e=2: trapezoid with vertices (0,0), (0,1), (3,1), (1,0)",
        ),
        "abelian-trapezoid" => generators_job(
            polygon_generators(&[(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (0, 3)]),
            2,
            None,
            "abelian surface with n=2, m=1: quadrilateral with vertices (0,0), (1,0), (0,3), (1,1)",
        ),
        other => {
            return Err(CliError::Validation(format!(
                "unknown fixture {other:?}; known fixtures: {}",
                FIXTURE_NAMES.join(", ")
            )))
        }
    };
    Ok(job)
}
