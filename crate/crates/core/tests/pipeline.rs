use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use okv_core::polytope::qvec;
use okv_core::{
    degenerate_sections, parse_polynomial, variables, Field, FlagSpec, GenerationStatus, GradedPoint,
    GradedSemigroup, Limits, SectionSpace,
};

type Mono = (u32, u32);
type Poly = BTreeMap<Mono, BigRational>;

fn mono_poly(terms: &[(Mono, i64)]) -> Poly {
    terms.iter().map(|&(m, c)| (m, BigRational::from_integer(BigInt::from(c)))).collect()
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let e = out.entry((ma.0 + mb.0, ma.1 + mb.1)).or_insert_with(BigRational::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Rank of a list of polynomials by dense elimination over monomial columns.
#[allow(clippy::needless_range_loop)]
fn rank(polys: &[Poly]) -> usize {
    let cols: Vec<Mono> = polys.iter().flat_map(|p| p.keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut rows: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|p| cols.iter().map(|m| p.get(m).cloned().unwrap_or_else(BigRational::zero)).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols.len() {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = BigRational::one() / &rows[r][c];
        for i in r + 1..rows.len() {
            let f = &rows[i][c] * &inv;
            if f.is_zero() {
                continue;
            }
            for j in c..cols.len() {
                let d = &rows[r][j] * &f;
                rows[i][j] -= d;
            }
        }
        r += 1;
    }
    r
}

/// dim V^m for V = span{1, x, xy, y + xy^3}, from all degree-m products.
fn power_dims(max: usize) -> Vec<usize> {
    let basis = vec![
        mono_poly(&[((0, 0), 1)]),
        mono_poly(&[((1, 0), 1)]),
        mono_poly(&[((1, 1), 1)]),
        mono_poly(&[((0, 1), 1), ((1, 3), 1)]),
    ];
    let mut dims = vec![1];
    let mut layer = vec![mono_poly(&[((0, 0), 1)])];
    for _ in 1..=max {
        let mut next = Vec::new();
        for p in &layer {
            for b in &basis {
                next.push(mul(p, b));
            }
        }
        dims.push(rank(&next));
        // identical products add nothing to the span
        next.sort();
        next.dedup();
        layer = next;
    }
    dims
}

fn counterexample() -> (SectionSpace, FlagSpec) {
    let vars = variables(&["x", "y"]);
    let polys: Vec<_> = ["1", "x", "x*y", "y+x*y^3"]
        .iter()
        .map(|s| parse_polynomial(s, &vars, Field::Rational).unwrap())
        .collect();
    (
        SectionSpace::span(vars.clone(), Field::Rational, &polys).unwrap(),
        FlagSpec::new(vars).unwrap(),
    )
}

#[test]
fn counterexample_hilbert_counts_match_power_dimensions() {
    let (v, flag) = counterexample();
    let g = GradedSemigroup::build(&v, &flag, 5, &Limits::default()).unwrap();
    assert_eq!(g.hilbert_counts(), power_dims(5));
    assert_eq!(g.hilbert_counts(), vec![1, 4, 10, 19, 31, 46]);
}

#[test]
fn counterexample_generation_fails_in_degree_two() {
    let (v, flag) = counterexample();
    let g = GradedSemigroup::build(&v, &flag, 3, &Limits::default()).unwrap();
    assert_eq!(
        g.check_degree_one_generation().status,
        GenerationStatus::StrictGrowth(GradedPoint::new(2, vec![2, 3]))
    );
    let gens = g.minimal_generators();
    assert!(gens.contains(&GradedPoint::new(3, vec![3, 5])));
}

#[test]
fn counterexample_body_is_a_square_at_low_degree() {
    let (v, flag) = counterexample();
    let g = GradedSemigroup::build(&v, &flag, 1, &Limits::default()).unwrap();
    let body = g.okounkov_body_estimate().unwrap();
    assert_eq!(
        body.vertices(),
        [qvec(&[0, 0]), qvec(&[0, 1]), qvec(&[1, 0]), qvec(&[1, 1])]
    );
}

#[test]
fn degeneration_relations_vanish_and_flatness_breaks_in_degree_three() {
    let (v, flag) = counterexample();
    let d = degenerate_sections(&v, &flag, 2, Some(3), &Limits::default()).unwrap();
    for r in &d.relations.relations {
        assert!(d.presentation.evaluate(&r.g).unwrap().is_zero());
        assert_eq!(r.specialize(&Field::Rational.one()).unwrap(), r.g);
        assert_eq!(r.specialize(&Field::Rational.zero()).unwrap(), r.initial);
    }
    let rows = &d.flatness.rows;
    assert!(rows[..3].iter().all(|r| r.agrees()));
    assert_eq!(d.flatness.first_mismatch(), Some((3, 18, 19)));
}
