//! Row reduction of sparse vectors and reduced bases of polynomial spaces.
//!
//! Pivots are always the smallest key of a row. For polynomials that is the
//! lex-min exponent, which is exactly the flag valuation of the row.

use std::collections::BTreeMap;
use std::ops::Bound;

use crate::error::{Error, Result};
use crate::poly::{ExponentVector, Polynomial, Variables};
use crate::scalar::{Field, Scalar};

pub type SparseVec<K> = BTreeMap<K, Scalar>;

fn axpy<K: Ord + Clone>(target: &mut SparseVec<K>, c: &Scalar, row: &SparseVec<K>) {
    for (k, a) in row {
        let delta = a.mul(c);
        match target.entry(k.clone()) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !delta.is_zero() {
                    v.insert(delta);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&delta);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
}

/// Fully reduced echelon basis keyed by pivot.
///
/// Every row has pivot coefficient 1 and no row contains another row's pivot.
#[derive(Debug, Clone)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&K, &SparseVec<K>)> {
        self.rows.iter()
    }

    /// Reduces `v` modulo the rows; the result shares no key with a pivot.
    pub fn reduce(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        let mut cursor: Option<K> = None;
        loop {
            let lower = match &cursor {
                None => Bound::Unbounded,
                Some(k) => Bound::Excluded(k.clone()),
            };
            let hit = v
                .range((lower, Bound::Unbounded))
                .find(|(k, _)| self.rows.contains_key(*k))
                .map(|(k, c)| (k.clone(), c.clone()));
            match hit {
                None => return v,
                Some((k, c)) => {
                    axpy(&mut v, &c.neg(), &self.rows[&k]);
                    cursor = Some(k);
                }
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Inserts `v`, returning the new pivot if `v` was independent.
    pub fn insert(&mut self, v: SparseVec<K>) -> Option<K> {
        let r = self.reduce(v);
        let (pivot, lead) = match r.iter().next() {
            None => return None,
            Some((k, c)) => (k.clone(), c.clone()),
        };
        let inv = lead.inv().expect("nonzero pivot");
        let r: SparseVec<K> = r.into_iter().map(|(k, c)| (k, c.mul(&inv))).collect();
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&pivot).cloned() {
                axpy(row, &c.neg(), &r);
            }
        }
        self.rows.insert(pivot.clone(), r);
        Some(pivot)
    }
}

/// Echelon form that remembers how each row was assembled from the inputs,
/// so dependencies among inputs come out as kernel vectors.
#[derive(Debug, Clone)]
pub struct TrackedEchelon<K: Ord + Clone, L: Ord + Clone> {
    rows: BTreeMap<K, (SparseVec<K>, SparseVec<L>)>,
}

impl<K: Ord + Clone, L: Ord + Clone> Default for TrackedEchelon<K, L> {
    fn default() -> Self {
        TrackedEchelon {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone, L: Ord + Clone> TrackedEchelon<K, L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v` labelled by `combo`; returns the combination that reduces
    /// to zero when `v` is dependent on earlier inputs.
    pub fn insert(&mut self, mut v: SparseVec<K>, mut combo: SparseVec<L>) -> Option<SparseVec<L>> {
        let mut cursor: Option<K> = None;
        loop {
            let lower = match &cursor {
                None => Bound::Unbounded,
                Some(k) => Bound::Excluded(k.clone()),
            };
            let hit = v
                .range((lower, Bound::Unbounded))
                .find(|(k, _)| self.rows.contains_key(*k))
                .map(|(k, c)| (k.clone(), c.clone()));
            match hit {
                None => break,
                Some((k, c)) => {
                    let (row, row_combo) = &self.rows[&k];
                    let neg = c.neg();
                    axpy(&mut v, &neg, row);
                    axpy(&mut combo, &neg, row_combo);
                    cursor = Some(k);
                }
            }
        }
        match v.iter().next() {
            None => Some(combo),
            Some((k, c)) => {
                let inv = c.inv().expect("nonzero pivot");
                let k = k.clone();
                let v = v.into_iter().map(|(k, c)| (k, c.mul(&inv))).collect();
                let combo = combo.into_iter().map(|(k, c)| (k, c.mul(&inv))).collect();
                self.rows.insert(k, (v, combo));
                None
            }
        }
    }
}

/// A finite-dimensional space of polynomials held as a fully reduced basis
/// under the lex-min term order. Leading exponents of the basis are pairwise
/// distinct, and no leading exponent appears in another basis element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSpace {
    vars: Variables,
    field: Field,
    grade: u32,
    basis: Vec<Polynomial>,
}

impl SectionSpace {
    /// `reduce_to_basis`: reduced echelon basis of the span of `spanning`.
    pub fn span(vars: Variables, field: Field, spanning: &[Polynomial]) -> Result<SectionSpace> {
        let probe = Polynomial::zero(vars.clone(), field);
        let mut ech = Echelon::new();
        for p in spanning {
            probe.same_ring(p)?;
            ech.insert(p.term_map().clone());
        }
        Ok(Self::from_echelon(vars, field, 1, ech))
    }

    fn from_echelon(
        vars: Variables,
        field: Field,
        grade: u32,
        ech: Echelon<ExponentVector>,
    ) -> SectionSpace {
        let basis = ech
            .rows
            .into_values()
            .map(|row| Polynomial::from_map(vars.clone(), field, row))
            .collect();
        SectionSpace {
            vars,
            field,
            grade,
            basis,
        }
    }

    pub fn zero(vars: Variables, field: Field) -> SectionSpace {
        SectionSpace {
            vars,
            field,
            grade: 1,
            basis: Vec::new(),
        }
    }

    /// The space spanned by the constant 1, in grade 0.
    pub fn unit(vars: Variables, field: Field) -> SectionSpace {
        let one = Polynomial::one(vars.clone(), field);
        SectionSpace {
            vars,
            field,
            grade: 0,
            basis: vec![one],
        }
    }

    pub fn with_grade(mut self, grade: u32) -> SectionSpace {
        self.grade = grade;
        self
    }

    pub fn vars(&self) -> &Variables {
        &self.vars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn grade(&self) -> u32 {
        self.grade
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Basis sorted by leading exponent.
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn leading_exponents(&self) -> Vec<ExponentVector> {
        self.basis
            .iter()
            .map(|b| b.leading().expect("basis elements are nonzero").0.clone())
            .collect()
    }

    /// The basis element whose leading exponent is `e`.
    pub fn element_with_lead(&self, e: &ExponentVector) -> Option<&Polynomial> {
        self.basis
            .binary_search_by(|b| b.leading().expect("nonzero").0.cmp(e))
            .ok()
            .map(|i| &self.basis[i])
    }

    pub fn total_terms(&self) -> usize {
        self.basis.iter().map(Polynomial::len).sum()
    }

    fn echelon(&self) -> Echelon<ExponentVector> {
        let mut ech = Echelon::new();
        for b in &self.basis {
            ech.rows
                .insert(b.leading().expect("nonzero").0.clone(), b.term_map().clone());
        }
        ech
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool> {
        Polynomial::zero(self.vars.clone(), self.field).same_ring(p)?;
        Ok(self.echelon().contains(p.term_map()))
    }

    pub fn contains_space(&self, other: &SectionSpace) -> Result<bool> {
        let ech = self.echelon();
        for b in &other.basis {
            Polynomial::zero(self.vars.clone(), self.field).same_ring(b)?;
            if !ech.contains(b.term_map()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Span of all pairwise products; grade is the sum of the grades.
    pub fn product(&self, other: &SectionSpace) -> Result<SectionSpace> {
        self.product_capped(other, usize::MAX)
    }

    /// As [`SectionSpace::product`], failing once the basis holds more than
    /// `max_terms` terms in total.
    pub fn product_capped(&self, other: &SectionSpace, max_terms: usize) -> Result<SectionSpace> {
        if self.field != other.field || self.vars != other.vars {
            return Err(Error::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            });
        }
        let mut ech = Echelon::new();
        let mut terms = 0usize;
        for a in &self.basis {
            for b in &other.basis {
                let p = a.multiply(b)?;
                if let Some(pivot) = ech.insert(p.term_map().clone()) {
                    terms += ech.rows[&pivot].len();
                    if terms > max_terms {
                        return Err(Error::ResourceExceeded {
                            what: "terms in a power of the section space",
                            size: terms,
                            limit: max_terms,
                        });
                    }
                }
            }
        }
        Ok(Self::from_echelon(
            self.vars.clone(),
            self.field,
            self.grade + other.grade,
            ech,
        ))
    }
}

/// `product_space` of the operation list.
pub fn product_space(a: &SectionSpace, b: &SectionSpace) -> Result<SectionSpace> {
    a.product(b)
}

/// `reduce_to_basis` of the operation list.
pub fn reduce_to_basis(
    vars: &Variables,
    field: Field,
    spanning: &[Polynomial],
) -> Result<SectionSpace> {
    SectionSpace::span(vars.clone(), field, spanning)
}
