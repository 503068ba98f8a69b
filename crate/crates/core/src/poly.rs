//! Sparse multivariate polynomials with exact coefficients.
//!
//! Terms are kept in a map ordered lexicographically on exponent vectors, so
//! the first term is always the lex-min one. The variable order is fixed for
//! the lifetime of a polynomial and encodes the coordinate flag.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// Exponents of a monomial, one per variable. Ordered lexicographically,
/// first coordinate compared first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(len: usize) -> Self {
        ExponentVector(vec![0; len])
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut e = vec![0; len];
        e[index] = 1;
        ExponentVector(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&e| e as i64).collect()
    }
}

/// Shared, ordered list of variable names.
pub type Variables = Arc<[String]>;

pub fn variables<S: AsRef<str>>(names: &[S]) -> Variables {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Variables,
    field: Field,
    terms: BTreeMap<ExponentVector, Scalar>,
}

impl Polynomial {
    pub fn zero(vars: Variables, field: Field) -> Self {
        Polynomial {
            vars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Variables, field: Field, c: Scalar) -> Self {
        let n = vars.len();
        Self::monomial(vars, field, ExponentVector::zero(n), c)
    }

    pub fn one(vars: Variables, field: Field) -> Self {
        Self::constant(vars, field, field.one())
    }

    pub fn monomial(vars: Variables, field: Field, exp: ExponentVector, c: Scalar) -> Self {
        assert_eq!(exp.len(), vars.len(), "exponent length must match variables");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Polynomial { vars, field, terms }
    }

    pub fn variable(vars: Variables, field: Field, index: usize) -> Self {
        let n = vars.len();
        Self::monomial(vars, field, ExponentVector::unit(n, index), field.one())
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(vars: Variables, field: Field, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, Scalar)>,
    {
        let mut p = Polynomial::zero(vars, field);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn vars(&self) -> &Variables {
        &self.vars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Scalar)> {
        self.terms.iter()
    }

    pub(crate) fn term_map(&self) -> &BTreeMap<ExponentVector, Scalar> {
        &self.terms
    }

    pub(crate) fn from_map(
        vars: Variables,
        field: Field,
        terms: BTreeMap<ExponentVector, Scalar>,
    ) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Polynomial { vars, field, terms }
    }

    pub fn coefficient(&self, exp: &ExponentVector) -> Scalar {
        self.terms
            .get(exp)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Lex-min term.
    pub fn leading(&self) -> Option<(&ExponentVector, &Scalar)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, exp: ExponentVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn same_ring(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if !Arc::ptr_eq(&self.vars, &other.vars) && self.vars != other.vars {
            return Err(Error::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.vars.clone(), self.field);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| (e.clone(), a.mul(c)))
            .collect();
        Polynomial::from_map(self.vars.clone(), self.field, terms)
    }

    /// Exact product; fails if the variable lists or fields differ.
    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial> {
        self.same_ring(other)?;
        let mut out = Polynomial::zero(self.vars.clone(), self.field);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), &ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.vars.clone(), self.field);
        for _ in 0..k {
            out = out.multiply(self).expect("same ring");
        }
        out
    }

    /// Scales so the lex-min coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Minimum exponent of variable `index` over all terms.
    pub fn order_in(&self, index: usize) -> Option<u32> {
        self.terms.keys().map(|e| e.0[index]).min()
    }

    /// Divides by `x_0^a` and sets `x_0 = 0`, dropping the first variable.
    /// Only terms whose first exponent is exactly `a` survive.
    pub fn strip_first(&self, a: u32, rest: &Variables) -> Polynomial {
        debug_assert_eq!(rest.len() + 1, self.vars.len());
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.0[0] == a)
            .map(|(e, c)| (ExponentVector(e.0[1..].to_vec()), c.clone()))
            .collect();
        Polynomial::from_map(rest.clone(), self.field, terms)
    }

    /// Re-expresses the polynomial over a larger variable list, placing the
    /// current variables at the given positions.
    pub fn embed(&self, vars: Variables, positions: &[usize]) -> Polynomial {
        let n = vars.len();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut out = vec![0; n];
                for (i, &p) in positions.iter().enumerate() {
                    out[p] = e.0[i];
                }
                (ExponentVector(out), c.clone())
            })
            .collect();
        Polynomial::from_map(vars, self.field, terms)
    }

    /// Substitutes `x_i -> values[i]` where given; variables mapped to
    /// `None` are kept.
    pub fn substitute(&self, values: &[Option<Scalar>]) -> Polynomial {
        let mut out = Polynomial::zero(self.vars.clone(), self.field);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exp = e.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    coeff = coeff.mul(&v.pow(&BigInt::from(e.0[i])).expect("nonneg power"));
                    exp.0[i] = 0;
                }
            }
            out.add_term(exp, &coeff);
        }
        out
    }

    /// Returns `λ` with `self = λ·other`, if one exists.
    pub fn proportional_to(&self, other: &Polynomial) -> Option<Scalar> {
        if self.same_ring(other).is_err() || self.is_zero() != other.is_zero() {
            return None;
        }
        let (e, c) = match other.leading() {
            None => return Some(self.field.one()),
            Some(t) => t,
        };
        let lambda = self.coefficient(e).div(c).ok()?;
        if lambda.is_zero() {
            return None;
        }
        (*self == other.scale(&lambda)).then_some(lambda)
    }

    /// Parses an arithmetic expression in `+ - * / ^`, parentheses,
    /// integer literals and the declared variables.
    pub fn parse(text: &str, vars: Variables, field: Field) -> Result<Polynomial> {
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
            vars,
            field,
        };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(p)
    }
}

/// `parse_polynomial` of the operation list.
pub fn parse_polynomial(text: &str, vars: &Variables, field: Field) -> Result<Polynomial> {
    Polynomial::parse(text, vars.clone(), field)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Variables,
    field: Field,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc.add(&rhs)? } else { acc.sub(&rhs)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                acc.multiply(&rhs)?
            } else {
                let divisor = match rhs.leading() {
                    Some((e, c)) if rhs.len() == 1 && e.total_degree() == 0 => c.clone(),
                    None => return Err(Error::DivisionByZero),
                    _ => return Err(self.error("can only divide by a nonzero constant")),
                };
                acc.scale(&divisor.inv()?)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(Error::NegativeExponent(self.pos));
            }
            let k = self.integer()?;
            let k: u32 = k
                .try_into()
                .map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let c = self
                    .field
                    .from_rational(&BigRational::from_integer(n))?;
                Ok(Polynomial::constant(self.vars.clone(), self.field, c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Polynomial::variable(self.vars.clone(), self.field, i)),
                    None => Err(Error::UndeclaredVariable(name.to_string())),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

impl fmt::Display for Polynomial {
    /// Terms in ascending lex order, e.g. `y + x*y^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let (negative, magnitude) = match c {
                Scalar::Rational(q) if q < &BigRational::zero() => (true, Scalar::Rational(-q)),
                _ => (false, c.clone()),
            };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if !magnitude.is_one() || e.total_degree() == 0 {
                factors.push(magnitude.to_string());
            }
            for (i, &p) in e.0.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], p)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy() -> Variables {
        variables(&["x", "y"])
    }

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, xy(), Field::Rational).unwrap()
    }

    fn exp(v: &[u32]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    #[test]
    fn parses_constant() {
        let one = p("1");
        assert_eq!(one.len(), 1);
        assert!(one.coefficient(&exp(&[0, 0])).is_one());
    }

    #[test]
    fn parses_two_term_section() {
        let f = p("y + x*y^3");
        let got: Vec<_> = f.terms().map(|(e, c)| (e.0.clone(), c.to_string())).collect();
        assert_eq!(got, vec![(vec![0, 1], "1".into()), (vec![1, 3], "1".into())]);
    }

    #[test]
    fn rejects_undeclared_variable() {
        let err = Polynomial::parse("x*q", xy(), Field::Rational).unwrap_err();
        assert_eq!(err, Error::UndeclaredVariable("q".into()));
    }

    #[test]
    fn rejects_negative_exponent_and_garbage() {
        assert!(matches!(
            Polynomial::parse("x^-1", xy(), Field::Rational),
            Err(Error::NegativeExponent(_))
        ));
        assert!(matches!(
            Polynomial::parse("x +", xy(), Field::Rational),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Polynomial::parse("x / y", xy(), Field::Rational),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(p("3/2*x - x/2"), p("x"));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(p("x").multiply(&p("y")).unwrap(), p("x*y"));
        assert_eq!(
            p("y + x*y^3").multiply(&p("y + x*y^3")).unwrap(),
            p("y^2 + 2*x*y^4 + x^2*y^6")
        );
        let f = p("y + x*y^3");
        assert_eq!(f.multiply(&p("1")).unwrap(), f);
    }

    #[test]
    fn multiply_rejects_mismatched_variables() {
        let a = p("x");
        let b = Polynomial::parse("x", variables(&["x", "z"]), Field::Rational).unwrap();
        assert!(matches!(a.multiply(&b), Err(Error::VariableMismatch { .. })));
    }

    #[test]
    fn display_format() {
        assert_eq!(p("x*y^3 + y").to_string(), "y + x*y^3");
        assert_eq!(p("-x + 2*y^2 - 3").to_string(), "-3 + 2*y^2 - x");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("x/2").to_string(), "1/2*x");
    }

    #[test]
    fn prime_field_parsing() {
        let f = Field::prime(5).unwrap();
        let q = Polynomial::parse("7*x + 5*y", xy(), f).unwrap();
        assert_eq!(q.to_string(), "2*x");
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((0u32..4, 0u32..4), -5i64..6), 0..6).prop_map(|ts| {
            Polynomial::from_terms(
                xy(),
                Field::Rational,
                ts.into_iter()
                    .map(|((a, b), c)| (exp(&[a, b]), Field::Rational.from_i64(c))),
            )
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_poly()) {
            let text = f.to_string();
            prop_assert_eq!(Polynomial::parse(&text, xy(), Field::Rational).unwrap(), f);
        }

        #[test]
        fn product_is_commutative(f in arb_poly(), g in arb_poly()) {
            prop_assert_eq!(f.multiply(&g).unwrap(), g.multiply(&f).unwrap());
        }
    }
}
