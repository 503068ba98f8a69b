//! Flag valuations on polynomial sections.
//!
//! For the coordinate flag `Y_r = {x_1 = ... = x_r = 0}` the valuation of a
//! polynomial is its lex-min exponent vector: the order along `x_1`, then the
//! order along `x_2` of what remains after dividing out and restricting, and
//! so on.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::SectionSpace;
use crate::poly::{Polynomial, Variables};

/// Coordinate flag given by an ordered list of local coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagSpec {
    vars: Variables,
}

impl FlagSpec {
    pub fn new(vars: Variables) -> Result<FlagSpec> {
        if vars.is_empty() {
            return Err(Error::InvalidArgument("a flag needs at least one variable".into()));
        }
        let distinct: BTreeSet<_> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err(Error::InvalidArgument("flag variables must be distinct".into()));
        }
        Ok(FlagSpec { vars })
    }

    pub fn vars(&self) -> &Variables {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// The flag `Y_r ⊃ ... ⊃ Y_d` on `Y_r`, in the remaining coordinates.
    pub fn tail(&self, r: usize) -> Variables {
        self.vars[r..].iter().cloned().collect()
    }

    fn check(&self, vars: &Variables) -> Result<()> {
        if vars != &self.vars {
            return Err(Error::VariableMismatch {
                left: vars.to_vec(),
                right: self.vars.to_vec(),
            });
        }
        Ok(())
    }
}

/// A point of `Z^d`, compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValuationVector(pub Vec<i64>);

impl ValuationVector {
    pub fn zero(d: usize) -> Self {
        ValuationVector(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &ValuationVector) -> ValuationVector {
        ValuationVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn prefix(&self, r: usize) -> Vec<i64> {
        self.0[..r].to_vec()
    }
}

impl fmt::Display for ValuationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A point `(m, u)` of `N × Z^d`.
///
/// `Ord` is the modified order: `(m1,u1) <= (m2,u2)` iff `m1 < m2`, or
/// `m1 == m2` and `u1 >=lex u2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedPoint {
    pub degree: u32,
    pub value: ValuationVector,
}

impl GradedPoint {
    pub fn new(degree: u32, value: Vec<i64>) -> Self {
        GradedPoint {
            degree,
            value: ValuationVector(value),
        }
    }

    pub fn add(&self, other: &GradedPoint) -> GradedPoint {
        GradedPoint {
            degree: self.degree + other.degree,
            value: self.value.add(&other.value),
        }
    }

    /// `(m, u_1, ..., u_d)` as a flat tuple.
    pub fn to_tuple(&self) -> Vec<i64> {
        let mut t = Vec::with_capacity(self.value.dim() + 1);
        t.push(self.degree as i64);
        t.extend_from_slice(&self.value.0);
        t
    }
}

impl Ord for GradedPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.value.cmp(&self.value))
    }
}

impl PartialOrd for GradedPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GradedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.degree, self.value)
    }
}

/// Modified order on flat `(m, u)` tuples, which may have negative entries.
pub fn modified_cmp(a: &[i64], b: &[i64]) -> Ordering {
    a[0].cmp(&b[0]).then_with(|| b[1..].cmp(&a[1..]))
}

/// `ν(f)`: the lex-min exponent vector of `f`.
pub fn nu(f: &Polynomial, flag: &FlagSpec) -> Result<ValuationVector> {
    flag.check(f.vars())?;
    f.leading()
        .map(|(e, _)| ValuationVector(e.as_i64()))
        .ok_or(Error::ZeroPolynomial)
}

/// `ν(W \ {0})`, read off the leading exponents of the reduced basis.
pub fn nu_image(w: &SectionSpace, flag: &FlagSpec) -> Result<BTreeSet<ValuationVector>> {
    flag.check(w.vars())?;
    Ok(w.leading_exponents()
        .into_iter()
        .map(|e| ValuationVector(e.as_i64()))
        .collect())
}

/// Image of `ν` truncated to the first `r` coordinates.
pub fn nu_prefix_image(w: &SectionSpace, flag: &FlagSpec, r: usize) -> Result<BTreeSet<Vec<i64>>> {
    if r > flag.dim() {
        return Err(Error::InvalidArgument(format!(
            "prefix length {r} exceeds flag length {}",
            flag.dim()
        )));
    }
    Ok(nu_image(w, flag)?.iter().map(|u| u.prefix(r)).collect())
}

/// The restricted system `V(a)`: keep sections of order at least `a_1`
/// along `x_1`, divide by `x_1^{a_1}`, set `x_1 = 0`, and recurse. The result
/// lives in the coordinates `x_{r+1}, ..., x_d`.
pub fn restricted_system(v: &SectionSpace, flag: &FlagSpec, a: &[u32]) -> Result<SectionSpace> {
    flag.check(v.vars())?;
    if a.len() > flag.dim() {
        return Err(Error::InvalidArgument(format!(
            "prefix length {} exceeds flag length {}",
            a.len(),
            flag.dim()
        )));
    }
    let mut current = v.clone();
    for (step, &order) in a.iter().enumerate() {
        let rest = flag.tail(step + 1);
        // In a fully reduced basis the x-order of a combination is the least
        // x-order of the leads it uses, so the subspace of order >= a is
        // spanned by basis elements whose lead clears the bound.
        let kept: Vec<Polynomial> = current
            .basis()
            .iter()
            .filter(|b| b.leading().expect("nonzero").0 .0[0] >= order)
            .map(|b| b.strip_first(order, &rest))
            .collect();
        current = SectionSpace::span(rest, v.field(), &kept)?.with_grade(v.grade());
    }
    Ok(current)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationRecord {
    pub saturated: bool,
    pub values: BTreeSet<i64>,
    pub interval: (i64, i64),
}

/// Whether a finite set of integers is a gap-free interval.
pub fn saturation_of_values(values: &BTreeSet<i64>) -> Option<SaturationRecord> {
    let min = *values.first()?;
    let max = *values.last()?;
    Some(SaturationRecord {
        saturated: (max - min + 1) as usize == values.len(),
        values: values.clone(),
        interval: (min, max),
    })
}

/// Checks whether `V(a)` is saturated along the next flag member.
pub fn saturation_check(v: &SectionSpace, flag: &FlagSpec, a: &[u32]) -> Result<SaturationRecord> {
    if a.len() >= flag.dim() {
        return Err(Error::InvalidArgument(
            "saturation needs a next flag member".into(),
        ));
    }
    let restricted = restricted_system(v, flag, a)?;
    let sub_flag = FlagSpec::new(flag.tail(a.len()))?;
    let values: BTreeSet<i64> = nu_image(&restricted, &sub_flag)?
        .into_iter()
        .map(|u| u.0[0])
        .collect();
    saturation_of_values(&values).ok_or(Error::BaseLocus(a.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::variables;
    use crate::scalar::Field;
    use proptest::prelude::*;

    fn flag(names: &[&str]) -> FlagSpec {
        FlagSpec::new(variables(names)).unwrap()
    }

    fn poly(f: &FlagSpec, s: &str) -> Polynomial {
        Polynomial::parse(s, f.vars().clone(), Field::Rational).unwrap()
    }

    fn space(f: &FlagSpec, polys: &[&str]) -> SectionSpace {
        let ps: Vec<_> = polys.iter().map(|s| poly(f, s)).collect();
        SectionSpace::span(f.vars().clone(), Field::Rational, &ps).unwrap()
    }

    #[test]
    fn table_entries() {
        let f = flag(&["x", "y", "z"]);
        assert_eq!(nu(&poly(&f, "y*(x*z + y)"), &f).unwrap().0, vec![0, 2, 0]);
        assert_eq!(nu(&poly(&f, "x*(x*z + y)"), &f).unwrap().0, vec![1, 1, 0]);
        assert_eq!(nu(&poly(&f, "1"), &f).unwrap().0, vec![0, 0, 0]);
    }

    #[test]
    fn witness_combination() {
        let f = flag(&["x", "y"]);
        let w = poly(&f, "x*(y + x*y^3) - 1*(x*y)");
        assert_eq!(nu(&w, &f).unwrap().0, vec![2, 3]);
    }

    #[test]
    fn zero_has_no_valuation() {
        let f = flag(&["x", "y"]);
        assert_eq!(nu(&poly(&f, "x - x"), &f), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn flag_rejects_duplicates() {
        assert!(FlagSpec::new(variables(&["x", "x"])).is_err());
        assert!(FlagSpec::new(variables::<&str>(&[])).is_err());
    }

    #[test]
    fn counterexample_images() {
        let f = flag(&["x", "y"]);
        let v = space(&f, &["1", "x", "y + x*y^3", "x*y"]);
        let img: Vec<_> = nu_image(&v, &f).unwrap().into_iter().map(|u| u.0).collect();
        assert_eq!(img, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let v2 = v.product(&v).unwrap();
        let img2 = nu_image(&v2, &f).unwrap();
        assert_eq!(img2.len(), 10);
        assert!(img2.contains(&ValuationVector(vec![2, 3])));
        let prefix = nu_prefix_image(&v, &f, 1).unwrap();
        assert_eq!(prefix, BTreeSet::from([vec![0], vec![1]]));
        assert_eq!(nu_prefix_image(&v, &f, 0).unwrap(), BTreeSet::from([vec![]]));
        assert!(nu_prefix_image(&v, &f, 3).is_err());
        let single = space(&f, &["x"]);
        assert_eq!(
            nu_image(&single, &f).unwrap(),
            BTreeSet::from([ValuationVector(vec![1, 0])])
        );
    }

    #[test]
    fn restricted_systems_of_counterexample() {
        let f = flag(&["x", "y"]);
        let v = space(&f, &["1", "x", "y + x*y^3", "x*y"]);
        let v2 = v.product(&v).unwrap();
        let rest = f.tail(1);
        let y3 = Polynomial::parse("y^3", rest.clone(), Field::Rational).unwrap();
        let v2_at_2 = restricted_system(&v2, &f, &[2]).unwrap();
        assert!(v2_at_2.contains(&y3).unwrap());
        let v_at_1 = restricted_system(&v, &f, &[1]).unwrap();
        assert_eq!(
            v_at_1.basis().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            vec!["1", "y"]
        );
        let sq = v_at_1.product(&v_at_1).unwrap();
        assert_eq!(sq.dim(), 3);
        assert!(!sq.contains(&y3).unwrap());
        assert_eq!(restricted_system(&v, &f, &[]).unwrap(), v);
    }

    #[test]
    fn restriction_to_zero_prefix_is_substitution() {
        let f = flag(&["x", "y", "z"]);
        let u = space(
            &f,
            &["1", "x", "y", "z", "x*z", "y*z", "x*(x*z+y)", "y*(x*z+y)"],
        );
        let r = restricted_system(&u, &f, &[0]).unwrap();
        let expected = SectionSpace::span(
            f.tail(1),
            Field::Rational,
            &["1", "y", "z", "y*z", "y^2"]
                .iter()
                .map(|s| Polynomial::parse(s, f.tail(1), Field::Rational).unwrap())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn empty_restriction_is_a_value() {
        let f = flag(&["x", "y"]);
        let v = space(&f, &["x", "x*y"]);
        assert!(restricted_system(&v, &f, &[2]).unwrap().is_zero());
        assert_eq!(saturation_check(&v, &f, &[2]), Err(Error::BaseLocus(1)));
    }

    #[test]
    fn saturation_examples() {
        let gap = saturation_of_values(&BTreeSet::from([0, 1, 3])).unwrap();
        assert!(!gap.saturated);
        assert_eq!(gap.interval, (0, 3));
        let full = saturation_of_values(&BTreeSet::from([0, 1])).unwrap();
        assert!(full.saturated);
        assert_eq!(full.interval, (0, 1));
        let f = flag(&["x", "y"]);
        let v = space(&f, &["1", "x", "y + x*y^3", "x*y"]);
        let rec = saturation_check(&v, &f, &[1]).unwrap();
        assert!(rec.saturated);
        assert_eq!(rec.values, BTreeSet::from([0, 1]));
    }

    #[test]
    fn modified_order() {
        let a = GradedPoint::new(2, vec![1, 1]);
        let b = GradedPoint::new(2, vec![2, 3]);
        assert!(b < a);
        assert!(GradedPoint::new(1, vec![9, 9]) < b);
        assert_eq!(modified_cmp(&a.to_tuple(), &b.to_tuple()), Ordering::Greater);
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((0u32..4, 0u32..4, 0u32..3), -4i64..5), 1..5).prop_map(|ts| {
            Polynomial::from_terms(
                variables(&["x", "y", "z"]),
                Field::Rational,
                ts.into_iter().map(|((a, b, c), k)| {
                    (
                        crate::poly::ExponentVector(vec![a, b, c]),
                        Field::Rational.from_i64(k),
                    )
                }),
            )
        })
    }

    proptest! {
        #[test]
        fn valuation_axioms(f in arb_poly(), g in arb_poly()) {
            let fl = flag(&["x", "y", "z"]);
            prop_assume!(!f.is_zero() && !g.is_zero());
            let nf = nu(&f, &fl).unwrap();
            let ng = nu(&g, &fl).unwrap();
            prop_assert_eq!(nu(&f.multiply(&g).unwrap(), &fl).unwrap(), nf.add(&ng));
            let s = f.add(&g).unwrap();
            if !s.is_zero() {
                let ns = nu(&s, &fl).unwrap();
                let lo = nf.clone().min(ng.clone());
                prop_assert!(ns >= lo);
                if ns > lo {
                    prop_assert_eq!(nf, ng);
                }
            }
        }

        #[test]
        fn image_size_is_dimension(ps in prop::collection::vec(arb_poly(), 0..6)) {
            let fl = flag(&["x", "y", "z"]);
            let w = SectionSpace::span(fl.vars().clone(), Field::Rational, &ps).unwrap();
            let img = nu_image(&w, &fl).unwrap();
            prop_assert_eq!(img.len(), w.dim());
            prop_assert_eq!(
                nu_prefix_image(&w, &fl, 3).unwrap(),
                img.iter().map(|u| u.0.clone()).collect::<BTreeSet<_>>()
            );
            // every element's valuation lies in the image
            for p in &ps {
                if !p.is_zero() {
                    prop_assert!(img.contains(&nu(p, &fl).unwrap()));
                }
            }
        }

        #[test]
        fn image_is_superadditive(a in prop::collection::vec(arb_poly(), 1..4),
                                  b in prop::collection::vec(arb_poly(), 1..4)) {
            let fl = flag(&["x", "y", "z"]);
            let sa = SectionSpace::span(fl.vars().clone(), Field::Rational, &a).unwrap();
            let sb = SectionSpace::span(fl.vars().clone(), Field::Rational, &b).unwrap();
            let prod = nu_image(&sa.product(&sb).unwrap(), &fl).unwrap();
            for u in nu_image(&sa, &fl).unwrap() {
                for v in nu_image(&sb, &fl).unwrap() {
                    prop_assert!(prod.contains(&u.add(&v)));
                }
            }
        }
    }
}
