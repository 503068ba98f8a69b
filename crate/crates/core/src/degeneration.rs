//! Toric degenerations from value semigroups.
//!
//! A presentation lifts the minimal generators of `Γ` to sections
//! `f_1, ..., f_p`; relations among them are computed degree by degree as
//! kernels of evaluation matrices. Label monomials are graded by
//! `Σ a_i (m_i, u_i)` and a relation's initial form is its part of greatest
//! graded degree in the modified order. A weight vector `π` realizes that
//! initial form as a weighted one, which yields the one-parameter family
//! `g̃ = Σ c_a τ^{k - w·a} X^a`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::bigint::BigInt;
use num::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SectionSpace, SparseVec, TrackedEchelon};
use crate::poly::{variables, ExponentVector, Polynomial, Variables};
use crate::polytope::RationalPolytope;
use crate::scalar::{Field, Scalar};
use crate::semigroup::{section_powers, GradedSemigroup, Limits};
use crate::valuation::{modified_cmp, restricted_system, FlagSpec, GradedPoint};

/// `π(m, u) = α_0 m - Σ α_i u_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    alphas: Vec<BigInt>,
}

impl WeightVector {
    pub fn new(alphas: Vec<BigInt>) -> Self {
        WeightVector { alphas }
    }

    pub fn alphas(&self) -> &[BigInt] {
        &self.alphas
    }

    /// `d`, the number of valuation coordinates.
    pub fn dim(&self) -> usize {
        self.alphas.len() - 1
    }

    /// `π` on a flat tuple `(m, u_1, ..., u_d)`.
    pub fn eval_tuple(&self, t: &[i64]) -> BigInt {
        let mut out = &self.alphas[0] * t[0];
        for (a, &u) in self.alphas[1..].iter().zip(&t[1..]) {
            out -= a * u;
        }
        out
    }

    pub fn eval(&self, p: &GradedPoint) -> BigInt {
        self.eval_tuple(&p.to_tuple())
    }

    /// Strict order preservation on every pair of `s`, checked directly.
    pub fn preserves_order(&self, s: &[Vec<i64>]) -> bool {
        s.iter().all(|a| {
            s.iter().all(|b| {
                modified_cmp(a, b) != std::cmp::Ordering::Less || self.eval_tuple(a) < self.eval_tuple(b)
            })
        })
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.alphas.iter().map(BigInt::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Smallest weights meeting `α_k > C(α_{k+1} + ... + α_d)` with `α_d = 1`,
/// where `C` is one more than the largest coordinate of a pairwise
/// difference in `s ∪ {0, e_0, ..., e_d}`.
pub fn choose_weight_vector(d: usize, s: &[Vec<i64>]) -> Result<WeightVector> {
    if let Some(bad) = s.iter().find(|t| t.len() != d + 1) {
        return Err(Error::InvalidArgument(format!(
            "tuple {bad:?} does not have {} coordinates",
            d + 1
        )));
    }
    let full = augmented(d, s);
    let mut c: i64 = 0;
    for a in &full {
        for b in &full {
            for (x, y) in a.iter().zip(b) {
                c = c.max((x - y).abs());
            }
        }
    }
    let c = BigInt::from(c + 1);
    let mut alphas = vec![BigInt::zero(); d + 1];
    alphas[d] = BigInt::from(1);
    let mut tail = BigInt::from(1);
    for k in (0..d).rev() {
        alphas[k] = &c * &tail + 1;
        tail += &alphas[k];
    }
    let pi = WeightVector { alphas };
    if !pi.preserves_order(&full) {
        return Err(Error::Internal("weight vector fails to preserve order".into()));
    }
    Ok(pi)
}

fn augmented(d: usize, s: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut full: BTreeSet<Vec<i64>> = s.iter().cloned().collect();
    full.insert(vec![0; d + 1]);
    for i in 0..=d {
        let mut e = vec![0; d + 1];
        e[i] = 1;
        full.insert(e);
    }
    full.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub lift: Polynomial,
    pub degree: GradedPoint,
    pub weight: Option<BigInt>,
}

/// Lifts of semigroup generators, labelled `X1, ..., Xp` in order of
/// degree and then valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    labels: Variables,
    field: Field,
    dim: usize,
    generators: Vec<Generator>,
}

impl Presentation {
    fn assemble(field: Field, dim: usize, mut gens: Vec<(GradedPoint, Polynomial)>) -> Self {
        gens.sort_by(|a, b| (a.0.degree, &a.0.value).cmp(&(b.0.degree, &b.0.value)));
        let names: Vec<String> = (1..=gens.len()).map(|i| format!("X{i}")).collect();
        let generators = gens
            .into_iter()
            .zip(&names)
            .map(|((degree, lift), label)| Generator {
                label: label.clone(),
                lift,
                degree,
                weight: None,
            })
            .collect();
        Presentation {
            labels: variables(&names),
            field,
            dim,
            generators,
        }
    }

    /// Lifts each generator to the basis element of `V^m` with that leading
    /// valuation.
    pub fn from_powers(powers: &[SectionSpace], gens: &[GradedPoint]) -> Result<Self> {
        let first = powers
            .first()
            .ok_or_else(|| Error::InvalidArgument("no section powers".into()))?;
        let dim = first.vars().len();
        let mut lifted = Vec::new();
        for g in gens {
            let space = powers.get(g.degree as usize).ok_or_else(|| {
                Error::InvalidArgument(format!("generator {g} beyond the computed powers"))
            })?;
            let exp = ExponentVector(
                g.value
                    .0
                    .iter()
                    .map(|&x| u32::try_from(x))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidArgument(format!("generator {g} has a negative coordinate")))?,
            );
            let lift = space
                .element_with_lead(&exp)
                .ok_or_else(|| Error::Internal(format!("no section lifts generator {g}")))?;
            lifted.push((g.clone(), lift.clone()));
        }
        Ok(Self::assemble(first.field(), dim, lifted))
    }

    /// Realizes abstract generators as monomials `s^m t1^{u_1} ... td^{u_d}`.
    pub fn from_semigroup_generators(dim: usize, gens: &[GradedPoint], field: Field) -> Result<Self> {
        let mut names = vec!["s".to_string()];
        names.extend((1..=dim).map(|i| format!("t{i}")));
        let vars = variables(&names);
        let mut lifted = Vec::new();
        for g in gens {
            let mut e = vec![g.degree];
            for &u in &g.value.0 {
                e.push(u32::try_from(u).map_err(|_| {
                    Error::InvalidArgument(format!("generator {g} has a negative coordinate"))
                })?);
            }
            let lift = Polynomial::monomial(vars.clone(), field, ExponentVector(e), field.one());
            lifted.push((g.clone(), lift));
        }
        Ok(Self::assemble(field, dim, lifted))
    }

    pub fn labels(&self) -> &Variables {
        &self.labels
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Number of valuation coordinates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The same presentation without one generator; other labels are kept.
    pub fn drop_generator(&self, label: &str) -> Result<Presentation> {
        let generators: Vec<Generator> = self
            .generators
            .iter()
            .filter(|g| g.label != label)
            .cloned()
            .collect();
        if generators.len() == self.generators.len() {
            return Err(Error::InvalidArgument(format!("no generator labelled {label}")));
        }
        let names: Vec<&str> = generators.iter().map(|g| g.label.as_str()).collect();
        Ok(Presentation {
            labels: variables(&names),
            field: self.field,
            dim: self.dim,
            generators,
        })
    }

    /// Graded degree `Σ a_i (m_i, u_i)` of a label monomial.
    pub fn monomial_degree(&self, a: &ExponentVector) -> GradedPoint {
        let mut out = GradedPoint::new(0, vec![0; self.dim]);
        for (g, &e) in self.generators.iter().zip(&a.0) {
            for _ in 0..e {
                out = out.add(&g.degree);
            }
        }
        out
    }

    fn degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree.degree).collect()
    }

    fn weights(&self, pi: &WeightVector) -> Vec<BigInt> {
        self.generators.iter().map(|g| pi.eval(&g.degree)).collect()
    }

    /// Records `w_i = π(m_i, u_i)` on every generator.
    pub fn assign_weights(&mut self, pi: &WeightVector) {
        for g in self.generators.iter_mut() {
            g.weight = Some(pi.eval(&g.degree));
        }
    }

    /// `g(f_1, ..., f_p)` in the ring of the lifts.
    pub fn evaluate(&self, g: &Polynomial) -> Result<Polynomial> {
        if g.vars() != &self.labels {
            return Err(Error::VariableMismatch {
                left: g.vars().to_vec(),
                right: self.labels.to_vec(),
            });
        }
        let model = self.model_vars();
        let mut memo = BTreeMap::new();
        let mut out = Polynomial::zero(model, self.field);
        for (a, c) in g.terms() {
            let v = self.eval_monomial(a, &mut memo)?;
            out = out.add(&v.scale(c))?;
        }
        Ok(out)
    }

    fn model_vars(&self) -> Variables {
        self.generators
            .first()
            .map(|g| g.lift.vars().clone())
            .unwrap_or_else(|| variables::<&str>(&[]))
    }

    fn eval_monomial(
        &self,
        a: &ExponentVector,
        memo: &mut BTreeMap<ExponentVector, Polynomial>,
    ) -> Result<Polynomial> {
        if let Some(p) = memo.get(a) {
            return Ok(p.clone());
        }
        let value = match a.0.iter().position(|&e| e > 0) {
            None => Polynomial::one(self.model_vars(), self.field),
            Some(j) => {
                let mut b = a.clone();
                b.0[j] -= 1;
                self.eval_monomial(&b, memo)?.multiply(&self.generators[j].lift)?
            }
        };
        memo.insert(a.clone(), value.clone());
        Ok(value)
    }
}

/// Presentation by lifts of the minimal generators of `Γ` up to degree `M`.
pub fn build_presentation(v: &SectionSpace, flag: &FlagSpec, max_degree: u32, limits: &Limits) -> Result<Presentation> {
    let powers = section_powers(v, max_degree, limits)?;
    let g = GradedSemigroup::from_powers(&powers, flag)?;
    Presentation::from_powers(&powers, &g.minimal_generators())
}

/// All exponent vectors with `Σ a_i deg_i = n`, lexicographically sorted.
pub fn weighted_monomials(degrees: &[u32], n: u32, cap: usize) -> Result<Vec<ExponentVector>> {
    fn walk(
        degrees: &[u32],
        i: usize,
        left: u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<ExponentVector>,
        cap: usize,
    ) -> Result<()> {
        if i == degrees.len() {
            if left == 0 {
                out.push(ExponentVector(cur.clone()));
                if out.len() > cap {
                    return Err(Error::ResourceExceeded {
                        what: "monomials in one degree of the label ring",
                        size: out.len(),
                        limit: cap,
                    });
                }
            }
            return Ok(());
        }
        let max = left / degrees[i];
        for e in 0..=max {
            cur.push(e);
            walk(degrees, i + 1, left - e * degrees[i], cur, out, cap)?;
            cur.pop();
        }
        Ok(())
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidArgument("generator of degree 0".into()));
    }
    let mut out = Vec::new();
    walk(degrees, 0, n, &mut Vec::new(), &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// A relation among the generators together with its derived data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    /// `g` in the labels, with `g(f_1, ..., f_p) = 0`.
    pub g: Polynomial,
    /// Graded degree `(n, v)` of the initial form.
    pub degree: GradedPoint,
    /// Terms of `g` of greatest graded degree.
    pub initial: Polynomial,
    /// `k = π(n, v)`, once a weight vector is fixed.
    pub weight: Option<BigInt>,
    /// `g̃` in the labels and `tau`.
    pub rees: Option<Polynomial>,
}

impl Relation {
    /// `g̃` with `τ` set to `value`, as a polynomial in the labels.
    pub fn specialize(&self, value: &Scalar) -> Result<Polynomial> {
        let rees = self
            .rees
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("relation has no one-parameter family".into()))?;
        let p = self.g.nvars();
        let mut out = Polynomial::zero(self.g.vars().clone(), self.g.field());
        for (e, c) in rees.terms() {
            let factor = value.pow(&BigInt::from(e.0[p]))?;
            out.add_term(ExponentVector(e.0[..p].to_vec()), &c.mul(&factor));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    /// Relations are complete up to this label degree.
    pub max_degree: u32,
    pub relations: Vec<Relation>,
}

fn polynomial_from_columns(
    labels: &Variables,
    field: Field,
    cols: &[(GradedPoint, ExponentVector)],
    v: &SparseVec<usize>,
) -> Polynomial {
    Polynomial::from_terms(
        labels.clone(),
        field,
        v.iter().map(|(&i, c)| (cols[i].1.clone(), c.clone())),
    )
}

/// Terms of `g` whose graded degree is greatest in the modified order.
pub fn graded_initial(g: &Polynomial, p: &Presentation) -> Result<(GradedPoint, Polynomial)> {
    let top = g
        .terms()
        .map(|(a, _)| p.monomial_degree(a))
        .max()
        .ok_or(Error::ZeroPolynomial)?;
    let initial = Polynomial::from_terms(
        g.vars().clone(),
        g.field(),
        g.terms()
            .filter(|(a, _)| p.monomial_degree(a) == top)
            .map(|(a, c)| (a.clone(), c.clone())),
    );
    Ok((top, initial))
}

/// Relations generating the kernel of `X_i -> f_i` in every label degree up
/// to `D`. In each degree the kernel is put in fully reduced echelon form
/// with columns ordered by decreasing graded degree; a row is kept when its
/// initial form is not already in the span of label multiples of earlier
/// initial forms. The kept initial forms then span the initial ideal in
/// each degree up to `D`.
pub fn kernel_ideal_truncated(p: &Presentation, max_degree: u32, limits: &Limits) -> Result<RelationSet> {
    let degrees = p.degrees();
    let mut memo = BTreeMap::new();
    let mut selected: Vec<Relation> = Vec::new();
    for n in 1..=max_degree {
        let mons = weighted_monomials(&degrees, n, limits.max_monomials)?;
        let mut cols: Vec<(GradedPoint, ExponentVector)> =
            mons.into_iter().map(|a| (p.monomial_degree(&a), a)).collect();
        cols.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
        let index: BTreeMap<ExponentVector, usize> =
            cols.iter().enumerate().map(|(i, (_, a))| (a.clone(), i)).collect();

        let mut tracked: TrackedEchelon<ExponentVector, usize> = TrackedEchelon::new();
        let mut kernel: Echelon<usize> = Echelon::new();
        for (i, (_, a)) in cols.iter().enumerate() {
            let value = p.eval_monomial(a, &mut memo)?;
            let v: SparseVec<ExponentVector> =
                value.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
            if let Some(k) = tracked.insert(v, BTreeMap::from([(i, p.field.one())])) {
                kernel.insert(k);
            }
        }

        let mut lower: Echelon<usize> = Echelon::new();
        for rel in &selected {
            for c in weighted_monomials(&degrees, n - rel.degree.degree, limits.max_monomials)? {
                let v: SparseVec<usize> = rel
                    .initial
                    .terms()
                    .map(|(a, coef)| (index[&a.add(&c)], coef.clone()))
                    .collect();
                lower.insert(v);
            }
        }

        let rows: Vec<SparseVec<usize>> = kernel.rows().map(|(_, r)| r.clone()).collect();
        for row in rows {
            let pivot = *row.keys().next().expect("nonzero kernel row");
            let class = cols[pivot].0.clone();
            let initial: SparseVec<usize> = row
                .iter()
                .filter(|(i, _)| cols[**i].0 == class)
                .map(|(&i, c)| (i, c.clone()))
                .collect();
            if lower.insert(initial.clone()).is_some() {
                selected.push(Relation {
                    g: polynomial_from_columns(&p.labels, p.field, &cols, &row),
                    degree: class,
                    initial: polynomial_from_columns(&p.labels, p.field, &cols, &initial),
                    weight: None,
                    rees: None,
                });
            }
        }
    }
    Ok(RelationSet {
        max_degree,
        relations: selected,
    })
}

/// Terms of `g` of greatest weight `Σ a_i π(m_i, u_i)`.
pub fn initial_form(g: &Polynomial, p: &Presentation, pi: &WeightVector) -> Result<Polynomial> {
    let w = p.weights(pi);
    let weight = |a: &ExponentVector| -> BigInt {
        a.0.iter().zip(&w).map(|(&e, wi)| wi * e).sum()
    };
    let top = g.terms().map(|(a, _)| weight(a)).max().ok_or(Error::ZeroPolynomial)?;
    Ok(Polynomial::from_terms(
        g.vars().clone(),
        g.field(),
        g.terms()
            .filter(|(a, _)| weight(a) == top)
            .map(|(a, c)| (a.clone(), c.clone())),
    ))
}

/// Differences between the initial degree of each relation and the degrees
/// of its other terms.
pub fn relation_differences(p: &Presentation, rels: &RelationSet) -> Vec<Vec<i64>> {
    let mut out = BTreeSet::new();
    for r in &rels.relations {
        let top = r.degree.to_tuple();
        for (a, _) in r.g.terms() {
            let t = p.monomial_degree(a).to_tuple();
            out.insert(top.iter().zip(&t).map(|(x, y)| x - y).collect::<Vec<i64>>());
        }
    }
    out.into_iter().collect()
}

/// Whether the weighted initial form under `π` agrees with the graded one
/// for every relation.
pub fn weight_realizes_initial_forms(p: &Presentation, rels: &RelationSet, pi: &WeightVector) -> Result<bool> {
    for r in &rels.relations {
        if initial_form(&r.g, p, pi)? != r.initial {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weight vector for the relation set; fails if it does not reproduce the
/// graded initial forms.
pub fn choose_pipeline_weight(p: &Presentation, rels: &RelationSet) -> Result<WeightVector> {
    let pi = choose_weight_vector(p.dim(), &relation_differences(p, rels))?;
    if !weight_realizes_initial_forms(p, rels, &pi)? {
        return Err(Error::Internal(
            "weight vector does not reproduce the initial forms".into(),
        ));
    }
    Ok(pi)
}

/// Attaches `k` and `g̃ = Σ c_a τ^{k - w·a} X^a` to every relation.
pub fn rees_relations(rels: &RelationSet, p: &Presentation, pi: &WeightVector) -> Result<RelationSet> {
    let w = p.weights(pi);
    let mut names: Vec<String> = p.labels.to_vec();
    names.push("tau".into());
    let vars = variables(&names);
    let mut out = Vec::new();
    for r in &rels.relations {
        let weight = |a: &ExponentVector| -> BigInt {
            a.0.iter().zip(&w).map(|(&e, wi)| wi * e).sum()
        };
        let (a0, _) = r.initial.leading().ok_or(Error::ZeroPolynomial)?;
        let k = weight(a0);
        let mut terms = Vec::new();
        for (a, c) in r.g.terms() {
            let shift = &k - weight(a);
            if shift.is_negative() {
                return Err(Error::Internal(format!(
                    "negative power of tau in the family of {}",
                    r.g
                )));
            }
            let shift = shift.to_u32().ok_or(Error::ResourceExceeded {
                what: "power of tau",
                size: usize::MAX,
                limit: u32::MAX as usize,
            })?;
            let mut e = a.0.clone();
            e.push(shift);
            terms.push((ExponentVector(e), c.clone()));
        }
        out.push(Relation {
            weight: Some(k),
            rees: Some(Polynomial::from_terms(vars.clone(), r.g.field(), terms)),
            ..r.clone()
        });
    }
    Ok(RelationSet {
        max_degree: rels.max_degree,
        relations: out,
    })
}

/// Whether the fiber at `τ = t0` is the original ideal up to the torus
/// action: substituting `X_i -> t0^{w_i} X_i` into `g̃(X, t0)` gives
/// `t0^k g`.
pub fn fiber_check(rels: &RelationSet, p: &Presentation, pi: &WeightVector, t0: &Scalar) -> Result<bool> {
    if t0.is_zero() {
        return Err(Error::InvalidArgument(
            "the fiber at 0 is described by the initial forms".into(),
        ));
    }
    let w = p.weights(pi);
    for r in &rels.relations {
        let rees = r
            .rees
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("relation has no one-parameter family".into()))?;
        let n = r.g.nvars();
        let mut out = Polynomial::zero(r.g.vars().clone(), r.g.field());
        for (e, c) in rees.terms() {
            let mut power = BigInt::from(e.0[n]);
            for (&ai, wi) in e.0[..n].iter().zip(&w) {
                power += wi * ai;
            }
            out.add_term(ExponentVector(e.0[..n].to_vec()), &c.mul(&t0.pow(&power)?));
        }
        if out.proportional_to(&r.g).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dimensions in one label degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatnessRow {
    pub degree: u32,
    /// `dim (S/I)_n`, with `I` generated by the relations.
    pub quotient_dim: usize,
    /// `dim (S/⟨initial forms⟩)_n`.
    pub initial_quotient_dim: usize,
    /// `|Γ_n|`.
    pub semigroup_count: usize,
    /// Points of `Γ_n` reached by label monomials of degree `n`.
    pub toric_count: usize,
}

impl FlatnessRow {
    pub fn agrees(&self) -> bool {
        self.quotient_dim == self.initial_quotient_dim
            && self.initial_quotient_dim == self.semigroup_count
            && self.semigroup_count == self.toric_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatnessReport {
    pub max_degree: u32,
    pub rows: Vec<FlatnessRow>,
    pub binomial_initial: bool,
    pub verdict: bool,
}

impl FlatnessReport {
    /// First degree where the columns disagree, as `(degree, smaller, larger)`.
    pub fn first_mismatch(&self) -> Option<(u32, usize, usize)> {
        self.rows.iter().find(|r| !r.agrees()).map(|r| {
            let cols = [
                r.quotient_dim,
                r.initial_quotient_dim,
                r.semigroup_count,
                r.toric_count,
            ];
            let lo = *cols.iter().min().expect("four columns");
            let hi = *cols.iter().max().expect("four columns");
            (r.degree, lo, hi)
        })
    }
}

fn ideal_piece(
    gens: &[(u32, &Polynomial)],
    degrees: &[u32],
    n: u32,
    cap: usize,
) -> Result<Echelon<ExponentVector>> {
    let mut ech = Echelon::new();
    for &(deg, g) in gens.iter().filter(|(deg, _)| *deg <= n) {
        for c in weighted_monomials(degrees, n - deg, cap)? {
            let v: SparseVec<ExponentVector> = g.terms().map(|(a, coef)| (a.add(&c), coef.clone())).collect();
            ech.insert(v);
        }
    }
    Ok(ech)
}

/// Hilbert-function comparison of `S/I`, `S/⟨initial forms⟩`, `Γ` and the
/// toric image in degrees `0..=D`.
pub fn flatness_report(
    p: &Presentation,
    rels: &RelationSet,
    g: &GradedSemigroup,
    max_degree: u32,
    limits: &Limits,
) -> Result<FlatnessReport> {
    if max_degree > g.max_degree() {
        return Err(Error::InvalidArgument(format!(
            "semigroup known only up to degree {}",
            g.max_degree()
        )));
    }
    let degrees = p.degrees();
    let full: Vec<(u32, &Polynomial)> = rels.relations.iter().map(|r| (r.degree.degree, &r.g)).collect();
    let initial: Vec<(u32, &Polynomial)> = rels
        .relations
        .iter()
        .map(|r| (r.degree.degree, &r.initial))
        .collect();
    let mut rows = Vec::new();
    let mut binomial_initial = true;
    for n in 0..=max_degree {
        let mons = weighted_monomials(&degrees, n, limits.max_monomials)?;
        let class: BTreeMap<&ExponentVector, GradedPoint> =
            mons.iter().map(|a| (a, p.monomial_degree(a))).collect();
        let toric_count = class.values().collect::<BTreeSet<_>>().len();
        let i_piece = ideal_piece(&full, &degrees, n, limits.max_monomials)?;
        let in_piece = ideal_piece(&initial, &degrees, n, limits.max_monomials)?;
        let mut binomial = in_piece.rank() + toric_count == mons.len();
        for (_, row) in in_piece.rows() {
            let mut sums: BTreeMap<&GradedPoint, Scalar> = BTreeMap::new();
            for (a, c) in row {
                let s = sums.entry(&class[a]).or_insert_with(|| p.field.zero());
                *s = s.add(c);
            }
            binomial &= sums.values().all(Scalar::is_zero);
        }
        binomial_initial &= binomial;
        rows.push(FlatnessRow {
            degree: n,
            quotient_dim: mons.len() - i_piece.rank(),
            initial_quotient_dim: mons.len() - in_piece.rank(),
            semigroup_count: g.slice(n).len(),
            toric_count,
        });
    }
    let verdict = binomial_initial && rows.iter().all(FlatnessRow::agrees);
    Ok(FlatnessReport {
        max_degree,
        rows,
        binomial_initial,
        verdict,
    })
}

/// Everything produced by one run of the degeneration pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degeneration {
    pub semigroup: GradedSemigroup,
    pub presentation: Presentation,
    pub relations: RelationSet,
    pub weight: WeightVector,
    pub flatness: FlatnessReport,
    pub generator_degree: u32,
    pub relation_degree: u32,
}

fn default_relation_degree(p: &Presentation) -> u32 {
    2 * p.generators().iter().map(|g| g.degree.degree).max().unwrap_or(1)
}

fn finish(
    semigroup: GradedSemigroup,
    mut presentation: Presentation,
    generator_degree: u32,
    relation_degree: u32,
    limits: &Limits,
) -> Result<Degeneration> {
    let rels = kernel_ideal_truncated(&presentation, relation_degree, limits)?;
    let weight = choose_pipeline_weight(&presentation, &rels)?;
    presentation.assign_weights(&weight);
    let relations = rees_relations(&rels, &presentation, &weight)?;
    let flatness = flatness_report(&presentation, &relations, &semigroup, relation_degree, limits)?;
    Ok(Degeneration {
        semigroup,
        presentation,
        relations,
        weight,
        flatness,
        generator_degree,
        relation_degree,
    })
}

/// Pipeline for a section space: generators from `Γ` up to `M`, relations
/// and flatness up to `D` (default twice the largest generator degree).
pub fn degenerate_sections(
    v: &SectionSpace,
    flag: &FlagSpec,
    generator_degree: u32,
    relation_degree: Option<u32>,
    limits: &Limits,
) -> Result<Degeneration> {
    let mut powers = section_powers(v, generator_degree, limits)?;
    let gamma = GradedSemigroup::from_powers(&powers, flag)?;
    let gens = gamma.minimal_generators();
    let presentation = Presentation::from_powers(&powers, &gens)?;
    let d = relation_degree.unwrap_or_else(|| default_relation_degree(&presentation));
    while (powers.len() as u32) <= d {
        let next = powers.last().expect("nonempty").product_capped(v, limits.max_terms)?;
        powers.push(next);
    }
    let semigroup = GradedSemigroup::from_powers(&powers, flag)?;
    finish(semigroup, presentation, generator_degree, d, limits)
}

/// Pipeline for an abstract semigroup realized by monomials; `g` must be
/// known up to the relation degree.
pub fn degenerate_semigroup(
    g: &GradedSemigroup,
    generator_degree: u32,
    relation_degree: Option<u32>,
    field: Field,
    limits: &Limits,
) -> Result<Degeneration> {
    let gens: Vec<GradedPoint> = g
        .minimal_generators()
        .into_iter()
        .filter(|p| p.degree <= generator_degree)
        .collect();
    let presentation = Presentation::from_semigroup_generators(g.dim(), &gens, field)?;
    let d = relation_degree.unwrap_or_else(|| default_relation_degree(&presentation));
    finish(g.clone(), presentation, generator_degree, d, limits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityRecord {
    pub shared_pi: WeightVector,
    /// Whether `shared_pi` reproduces the initial forms of both systems.
    pub valid_for_both: bool,
    pub body_inclusion: bool,
    pub sub_body: RationalPolytope,
    pub body: RationalPolytope,
}

/// One weight vector serving the degenerations of both `V'` and `V`, and
/// the inclusion of their body estimates.
pub fn subsystem_compatibility(
    vp: &SectionSpace,
    v: &SectionSpace,
    flag: &FlagSpec,
    max_degree: u32,
    relation_degree: Option<u32>,
    limits: &Limits,
) -> Result<CompatibilityRecord> {
    if !v.contains_space(vp)? {
        return Err(Error::NotSubspace);
    }
    let mut systems = Vec::new();
    let mut diffs = Vec::new();
    for space in [vp, v] {
        let powers = section_powers(space, max_degree.max(1), limits)?;
        let gamma = GradedSemigroup::from_powers(&powers, flag)?;
        let pres = Presentation::from_powers(&powers, &gamma.minimal_generators())?;
        let d = relation_degree.unwrap_or_else(|| default_relation_degree(&pres));
        let rels = kernel_ideal_truncated(&pres, d, limits)?;
        diffs.extend(relation_differences(&pres, &rels));
        systems.push((gamma, pres, rels));
    }
    let shared_pi = choose_weight_vector(flag.dim(), &diffs)?;
    let mut valid_for_both = true;
    for (_, pres, rels) in &systems {
        valid_for_both &= weight_realizes_initial_forms(pres, rels, &shared_pi)?;
    }
    let sub_body = systems[0].0.okounkov_body_estimate()?;
    let body = systems[1].0.okounkov_body_estimate()?;
    Ok(CompatibilityRecord {
        shared_pi,
        valid_for_both,
        body_inclusion: body.contains_polytope(&sub_body),
        sub_body,
        body,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionRecord {
    pub rank: usize,
    pub face: RationalPolytope,
    pub restricted_body: RationalPolytope,
    pub matches: bool,
}

/// Compares the body estimate of `V(0^r)` on `Y_r` with the face of the
/// ambient estimate where the first `r` coordinates vanish.
pub fn flag_restriction_check(
    v: &SectionSpace,
    flag: &FlagSpec,
    r: usize,
    max_degree: u32,
    limits: &Limits,
) -> Result<RestrictionRecord> {
    if r > flag.dim() {
        return Err(Error::InvalidArgument(format!(
            "rank {r} exceeds flag length {}",
            flag.dim()
        )));
    }
    let restricted = restricted_system(v, flag, &vec![0; r])?;
    if restricted.is_zero() {
        return Err(Error::BaseLocus(r));
    }
    let body = GradedSemigroup::build(v, flag, max_degree.max(1), limits)?.okounkov_body_estimate()?;
    let face = body.face_restriction(r)?;
    let restricted_body = if r == flag.dim() {
        RationalPolytope::hull(0, &[Vec::new()])?
    } else {
        let sub_flag = FlagSpec::new(flag.tail(r))?;
        GradedSemigroup::build(&restricted, &sub_flag, max_degree.max(1), limits)?.okounkov_body_estimate()?
    };
    Ok(RestrictionRecord {
        rank: r,
        matches: face == restricted_body,
        face,
        restricted_body,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::polytope::qvec;
    use proptest::prelude::*;

    fn space(vars: &[&str], sections: &[&str]) -> (SectionSpace, FlagSpec) {
        let vars = variables(vars);
        let polys: Vec<_> = sections
            .iter()
            .map(|s| parse_polynomial(s, &vars, Field::Rational).unwrap())
            .collect();
        let v = SectionSpace::span(vars.clone(), Field::Rational, &polys).unwrap();
        (v, FlagSpec::new(vars).unwrap())
    }

    fn counterexample() -> (SectionSpace, FlagSpec) {
        space(&["x", "y"], &["1", "x", "y + x*y^3", "x*y"])
    }

    fn labels_poly(p: &Presentation, s: &str) -> Polynomial {
        parse_polynomial(s, p.labels(), p.field()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn weight_vector_examples() {
        let pi = choose_weight_vector(2, &[]).unwrap();
        assert_eq!(pi.alphas(), ints(&[9, 3, 1]).as_slice());
        let pi = choose_weight_vector(2, &[vec![0, -1, -2]]).unwrap();
        assert_eq!(pi.alphas(), ints(&[25, 5, 1]).as_slice());
        assert!(pi.eval_tuple(&[2, 1, 1]) > pi.eval_tuple(&[2, 2, 3]));
        let single = choose_weight_vector(0, &[vec![0]]).unwrap();
        assert_eq!(single.alphas(), ints(&[1]).as_slice());
    }

    #[test]
    fn standard_generators_have_negative_weight() {
        // e_i lies below 0 in the modified order, so π(0, e_i) < 0
        let pi = choose_weight_vector(2, &[]).unwrap();
        assert_eq!(pi.eval_tuple(&[0, 1, 0]), BigInt::from(-3));
        assert!(pi.eval_tuple(&[1, 0, 0]) > BigInt::zero());
    }

    #[test]
    fn counterexample_presentation() {
        let (v, flag) = counterexample();
        let p = build_presentation(&v, &flag, 2, &Limits::default()).unwrap();
        assert_eq!(p.len(), 5);
        let degrees: Vec<_> = p.generators().iter().map(|g| g.degree.clone()).collect();
        assert_eq!(
            degrees,
            vec![
                GradedPoint::new(1, vec![0, 0]),
                GradedPoint::new(1, vec![0, 1]),
                GradedPoint::new(1, vec![1, 0]),
                GradedPoint::new(1, vec![1, 1]),
                GradedPoint::new(2, vec![2, 3]),
            ]
        );
        let x2y3 = parse_polynomial("x^2*y^3", v.vars(), Field::Rational).unwrap();
        assert_eq!(p.generators()[4].lift, x2y3);
    }

    #[test]
    fn counterexample_relation() {
        let (v, flag) = counterexample();
        let p = build_presentation(&v, &flag, 2, &Limits::default()).unwrap();
        let rels = kernel_ideal_truncated(&p, 4, &Limits::default()).unwrap();
        let g = labels_poly(&p, "X2*X3 - X1*X4 - X5");
        let hit = rels
            .relations
            .iter()
            .find(|r| r.g.proportional_to(&g).is_some())
            .expect("relation present");
        assert_eq!(hit.degree, GradedPoint::new(2, vec![1, 1]));
        assert!(hit.initial.proportional_to(&labels_poly(&p, "X2*X3 - X1*X4")).is_some());
        for r in &rels.relations {
            assert!(p.evaluate(&r.g).unwrap().is_zero());
        }
    }

    #[test]
    fn counterexample_family() {
        let (v, flag) = counterexample();
        let d = degenerate_sections(&v, &flag, 2, None, &Limits::default()).unwrap();
        assert_eq!(d.relation_degree, 4);
        assert_eq!(d.weight.alphas(), ints(&[25, 5, 1]).as_slice());
        let weights: Vec<_> = d.presentation.generators().iter().map(|g| g.weight.clone().unwrap()).collect();
        assert_eq!(weights, ints(&[25, 24, 20, 19, 37]));
        let p = &d.presentation;
        let g = labels_poly(p, "X2*X3 - X1*X4 - X5");
        let r = d
            .relations
            .relations
            .iter()
            .find(|r| r.g.proportional_to(&g).is_some())
            .unwrap();
        assert_eq!(r.weight, Some(BigInt::from(44)));
        let tau_vars = r.rees.as_ref().unwrap().vars().clone();
        let expected = parse_polynomial("X2*X3 - X1*X4 - tau^7*X5", &tau_vars, Field::Rational).unwrap();
        assert!(r.rees.as_ref().unwrap().proportional_to(&expected).is_some());
        let f = Field::Rational;
        assert_eq!(r.specialize(&f.one()).unwrap(), r.g);
        assert_eq!(r.specialize(&f.zero()).unwrap(), r.initial);
        for rel in &d.relations.relations {
            assert_eq!(rel.specialize(&f.one()).unwrap(), rel.g);
            assert_eq!(rel.specialize(&f.zero()).unwrap(), rel.initial);
        }
        for t in [1, 2, -3] {
            assert!(fiber_check(&d.relations, p, &d.weight, &f.from_i64(t)).unwrap());
        }
        assert!(fiber_check(&d.relations, p, &d.weight, &f.zero()).is_err());
        // Γ_3 has the new generator (3,(3,5)), out of reach of the five labels
        assert!(d.flatness.rows[..3].iter().all(FlatnessRow::agrees));
        assert!(!d.flatness.verdict);
        assert_eq!(d.flatness.first_mismatch(), Some((3, 18, 19)));
    }

    #[test]
    fn counterexample_needs_a_degree_three_generator() {
        let (v, flag) = counterexample();
        let vars = v.vars().clone();
        let f = |s: &str| parse_polynomial(s, &vars, Field::Rational).unwrap();
        // x^2y^2·(y + xy^3) - (x·(y + xy^3) - xy) = x^3y^5, with both terms in V^3
        let lhs = f("x*y*x*y*(y + x*y^3) - 1*(x*(y + x*y^3) - 1*x*y)");
        assert_eq!(lhs, f("x^3*y^5"));
        let g = GradedSemigroup::build(&v, &flag, 3, &Limits::default()).unwrap();
        assert!(g.minimal_generators().contains(&GradedPoint::new(3, vec![3, 5])));
    }

    #[test]
    fn corrupted_family_fails_fiber_check() {
        let (v, flag) = counterexample();
        let d = degenerate_sections(&v, &flag, 2, None, &Limits::default()).unwrap();
        let mut rels = d.relations.clone();
        let rees = rels.relations[0].rees.take().unwrap();
        let bumped = Polynomial::from_terms(
            rees.vars().clone(),
            rees.field(),
            rees.terms().enumerate().map(|(i, (e, c))| {
                let mut e = e.clone();
                if i == 0 {
                    *e.0.last_mut().unwrap() += 1;
                }
                (e, c.clone())
            }),
        );
        rels.relations[0].rees = Some(bumped);
        let two = Field::Rational.from_i64(2);
        assert!(!fiber_check(&rels, &d.presentation, &d.weight, &two).unwrap());
    }

    #[test]
    fn dropping_the_degree_two_generator() {
        let (v, flag) = counterexample();
        let limits = Limits::default();
        let p = build_presentation(&v, &flag, 2, &limits).unwrap().drop_generator("X5").unwrap();
        let gamma = GradedSemigroup::build(&v, &flag, 4, &limits).unwrap();
        let rels = kernel_ideal_truncated(&p, 4, &limits).unwrap();
        let report = flatness_report(&p, &rels, &gamma, 4, &limits).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.first_mismatch(), Some((2, 9, 10)));
        let row = &report.rows[2];
        assert_eq!(
            (row.quotient_dim, row.initial_quotient_dim, row.semigroup_count, row.toric_count),
            (10, 10, 10, 9)
        );
    }

    #[test]
    fn elliptic_good_curve() {
        let gens: Vec<_> = [0, 1, 3].iter().map(|&u| GradedPoint::new(1, vec![u])).collect();
        let g = GradedSemigroup::from_generators(1, &gens, 3).unwrap();
        let d = degenerate_semigroup(&g, 1, Some(3), Field::Rational, &Limits::default()).unwrap();
        assert_eq!(d.presentation.len(), 3);
        assert_eq!(d.relations.relations.len(), 1);
        let r = &d.relations.relations[0];
        let cubic = labels_poly(&d.presentation, "X2^3 - X1^2*X3");
        assert!(r.g.proportional_to(&cubic).is_some());
        assert_eq!(r.initial, r.g);
        let counts: Vec<_> = d
            .flatness
            .rows
            .iter()
            .map(|r| (r.quotient_dim, r.initial_quotient_dim, r.semigroup_count))
            .collect();
        assert_eq!(counts, vec![(1, 1, 1), (3, 3, 3), (6, 6, 6), (9, 9, 9)]);
        assert!(d.flatness.verdict);
    }

    #[test]
    fn free_and_trivial_cases() {
        let (v, flag) = space(&["x", "y"], &["1", "x", "x*y"]);
        let p = build_presentation(&v, &flag, 2, &Limits::default()).unwrap();
        assert_eq!(p.len(), 3);
        assert!(kernel_ideal_truncated(&p, 4, &Limits::default())
            .unwrap()
            .relations
            .is_empty());
        let (one, flag) = space(&["x"], &["x + x^2"]);
        assert_eq!(build_presentation(&one, &flag, 3, &Limits::default()).unwrap().len(), 1);
    }

    #[test]
    fn initial_form_examples() {
        let (v, flag) = counterexample();
        let p = build_presentation(&v, &flag, 2, &Limits::default()).unwrap();
        let pi = WeightVector::new(ints(&[25, 5, 1]));
        let g = labels_poly(&p, "X2*X3 - X1*X4 - X5");
        assert_eq!(initial_form(&g, &p, &pi).unwrap(), labels_poly(&p, "X2*X3 - X1*X4"));
        let mono = labels_poly(&p, "3*X1*X5");
        assert_eq!(initial_form(&mono, &p, &pi).unwrap(), mono);
        let zero = labels_poly(&p, "0");
        assert_eq!(initial_form(&zero, &p, &pi), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn compatibility_examples() {
        let (v, flag) = counterexample();
        let limits = Limits::default();
        let (vp, _) = space(&["x", "y"], &["1", "x", "x*y"]);
        let rec = subsystem_compatibility(&vp, &v, &flag, 2, None, &limits).unwrap();
        assert!(rec.body_inclusion && rec.valid_for_both);
        let same = subsystem_compatibility(&v, &v, &flag, 2, None, &limits).unwrap();
        assert!(same.body_inclusion);
        let (point, _) = space(&["x", "y"], &["x"]);
        let rec = subsystem_compatibility(&point, &v, &flag, 2, None, &limits).unwrap();
        assert!(rec.body_inclusion);
        assert_eq!(rec.sub_body.vertices(), &[qvec(&[1, 0])]);
        let (outside, _) = space(&["x", "y"], &["y"]);
        assert_eq!(
            subsystem_compatibility(&outside, &v, &flag, 2, None, &limits),
            Err(Error::NotSubspace)
        );
    }

    #[test]
    fn restriction_examples() {
        let (u, flag) = space(
            &["x", "y", "z"],
            &["1", "x", "y", "z", "x*z", "y*z", "x*(x*z+y)", "y*(x*z+y)"],
        );
        let limits = Limits::default();
        let rec = flag_restriction_check(&u, &flag, 1, 2, &limits).unwrap();
        let expected = RationalPolytope::hull(
            2,
            &[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1]), qvec(&[2, 0])],
        )
        .unwrap();
        assert_eq!(rec.restricted_body, expected);
        assert!(rec.matches);
        assert!(flag_restriction_check(&u, &flag, 0, 2, &limits).unwrap().matches);
        let (divisible, flag) = space(&["x", "y"], &["x", "x*y"]);
        assert_eq!(
            flag_restriction_check(&divisible, &flag, 1, 2, &limits),
            Err(Error::BaseLocus(1))
        );
    }

    fn arb_set() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
        (0usize..=4).prop_flat_map(|d| {
            (
                Just(d),
                prop::collection::vec(prop::collection::vec(-1000i64..=1000, d + 1), 0..20),
            )
        })
    }

    proptest! {
        #[test]
        fn chosen_weights_preserve_order((d, s) in arb_set()) {
            let pi = choose_weight_vector(d, &s).unwrap();
            prop_assert!(pi.preserves_order(&s));
            prop_assert_eq!(&pi.alphas()[d], &BigInt::from(1));
        }

        #[test]
        fn weights_positive_on_cone_of_positive_elements((d, s) in arb_set(), coeffs in prop::collection::vec(0i64..50, 20)) {
            let pi = choose_weight_vector(d, &s).unwrap();
            let zero = vec![0; d + 1];
            let aug = augmented(d, &s);
            let positive: Vec<&Vec<i64>> = aug
                .iter()
                .filter(|t| modified_cmp(t, &zero) == std::cmp::Ordering::Greater)
                .collect();
            let mut point = vec![0i64; d + 1];
            for (t, c) in positive.iter().zip(&coeffs) {
                for (x, y) in point.iter_mut().zip(t.iter()) {
                    *x += c * y;
                }
            }
            if coeffs.iter().zip(&positive).any(|(c, _)| *c > 0) {
                prop_assert!(pi.eval_tuple(&point) > BigInt::zero());
            }
        }
    }
}
