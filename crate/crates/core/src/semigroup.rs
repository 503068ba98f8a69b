//! Truncated graded value semigroups and the diagnostics built on them.

use std::collections::BTreeSet;

use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::SectionSpace;
use crate::polytope::{q, QVec, RationalPolytope};
use crate::valuation::{nu_image, FlagSpec, GradedPoint, ValuationVector};

/// Caps on intermediate sizes; exceeding one is an error, never a silent
/// truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Total number of terms allowed in the basis of one power `V^m`.
    pub max_terms: usize,
    /// Number of monomials allowed in one degree of the label ring.
    pub max_monomials: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_terms: 200_000,
            max_monomials: 5_000,
        }
    }
}

/// `V^0, V^1, ..., V^M`, each reduced.
pub fn section_powers(v: &SectionSpace, max_degree: u32, limits: &Limits) -> Result<Vec<SectionSpace>> {
    if v.is_zero() {
        return Err(Error::InvalidArgument("the section space is zero".into()));
    }
    let mut powers = vec![SectionSpace::unit(v.vars().clone(), v.field())];
    for m in 1..=max_degree {
        let next = if m == 1 {
            v.clone().with_grade(1)
        } else {
            powers[m as usize - 1].product_capped(v, limits.max_terms)?
        };
        powers.push(next);
    }
    Ok(powers)
}

/// Slices `Γ_m` for `m = 0..=M`, with `Γ_0 = {0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSemigroup {
    dim: usize,
    slices: Vec<BTreeSet<ValuationVector>>,
    multiplicative: bool,
}

/// Outcome of comparing each slice with sums of degree-one points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerationStatus {
    GeneratedInDegreeOne,
    StrictGrowth(GradedPoint),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    pub status: GenerationStatus,
    pub checked_degree: u32,
}

/// Comparison of `Γ_k` with the lattice points of `k·Δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalityRecord {
    pub normal: bool,
    pub degree: u32,
    pub missing: BTreeSet<Vec<i64>>,
}

fn sumset(a: &BTreeSet<ValuationVector>, b: &BTreeSet<ValuationVector>) -> BTreeSet<ValuationVector> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.add(y))).collect()
}

impl GradedSemigroup {
    /// `Γ_ν(V)` up to degree `M`.
    pub fn build(v: &SectionSpace, flag: &FlagSpec, max_degree: u32, limits: &Limits) -> Result<Self> {
        let powers = section_powers(v, max_degree, limits)?;
        Self::from_powers(&powers, flag)
    }

    /// Semigroup read off precomputed powers `V^0..V^M`.
    pub fn from_powers(powers: &[SectionSpace], flag: &FlagSpec) -> Result<Self> {
        let slices = powers
            .iter()
            .map(|p| nu_image(p, flag))
            .collect::<Result<Vec<_>>>()?;
        Ok(GradedSemigroup {
            dim: flag.dim(),
            slices,
            multiplicative: true,
        })
    }

    /// All `N`-combinations of the generators of total degree at most `M`.
    pub fn from_generators(dim: usize, gens: &[GradedPoint], max_degree: u32) -> Result<Self> {
        for g in gens {
            if g.degree == 0 {
                return Err(Error::InvalidArgument(format!("generator {g} has degree 0")));
            }
            if g.value.dim() != dim {
                return Err(Error::InvalidArgument(format!("generator {g} is not in Z^{dim}")));
            }
        }
        let mut slices = vec![BTreeSet::from([ValuationVector::zero(dim)])];
        for m in 1..=max_degree {
            let mut slice = BTreeSet::new();
            for g in gens.iter().filter(|g| g.degree <= m) {
                for x in &slices[(m - g.degree) as usize] {
                    slice.insert(x.add(&g.value));
                }
            }
            slices.push(slice);
        }
        Ok(GradedSemigroup {
            dim,
            slices,
            multiplicative: true,
        })
    }

    /// Semigroup given slice by slice; degree-0 points other than the origin
    /// are rejected.
    pub fn from_points(dim: usize, points: &[GradedPoint], max_degree: u32) -> Result<Self> {
        let mut slices = vec![BTreeSet::new(); max_degree as usize + 1];
        slices[0].insert(ValuationVector::zero(dim));
        for p in points {
            if p.value.dim() != dim {
                return Err(Error::InvalidArgument(format!("point {p} is not in Z^{dim}")));
            }
            if p.degree == 0 && p.value != ValuationVector::zero(dim) {
                return Err(Error::InvalidArgument(format!("degree-0 point {p} is not the origin")));
            }
            if p.degree <= max_degree {
                slices[p.degree as usize].insert(p.value.clone());
            }
        }
        Ok(GradedSemigroup {
            dim,
            slices,
            multiplicative: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.slices.len() as u32 - 1
    }

    pub fn slice(&self, m: u32) -> &BTreeSet<ValuationVector> {
        &self.slices[m as usize]
    }

    pub fn slices(&self) -> &[BTreeSet<ValuationVector>] {
        &self.slices
    }

    /// Whether the slices came from a multiplicative source.
    pub fn is_multiplicative(&self) -> bool {
        self.multiplicative
    }

    pub fn contains(&self, p: &GradedPoint) -> bool {
        p.degree <= self.max_degree() && self.slice(p.degree).contains(&p.value)
    }

    pub fn points(&self) -> impl Iterator<Item = GradedPoint> + '_ {
        self.slices.iter().enumerate().flat_map(|(m, s)| {
            s.iter().map(move |u| GradedPoint {
                degree: m as u32,
                value: u.clone(),
            })
        })
    }

    /// `Γ_a + Γ_b ⊆ Γ_{a+b}` for all `a + b <= M`.
    pub fn is_superadditive(&self) -> bool {
        let big_m = self.max_degree();
        (1..=big_m).all(|a| {
            (a..=big_m - a).all(|b| {
                let target = self.slice(a + b);
                self.slice(a)
                    .iter()
                    .all(|x| self.slice(b).iter().all(|y| target.contains(&x.add(y))))
            })
        })
    }

    /// `[|Γ_m| : m = 0..=M]`.
    pub fn hilbert_counts(&self) -> Vec<usize> {
        self.slices.iter().map(BTreeSet::len).collect()
    }

    /// Points not expressible as sums of generators found in lower degrees,
    /// processed degree by degree in the modified order.
    pub fn minimal_generators(&self) -> Vec<GradedPoint> {
        let mut gens: Vec<GradedPoint> = Vec::new();
        // reach[k]: degree-k sums of at least one generator found so far
        let mut reach: Vec<BTreeSet<ValuationVector>> = vec![BTreeSet::new()];
        for m in 1..=self.max_degree() {
            let mut closure = BTreeSet::new();
            for g in &gens {
                let rest = m - g.degree;
                if rest == 0 {
                    continue;
                }
                for x in &reach[rest as usize] {
                    closure.insert(x.add(&g.value));
                }
            }
            let mut fresh: Vec<GradedPoint> = self
                .slice(m)
                .iter()
                .filter(|u| !closure.contains(*u))
                .map(|u| GradedPoint {
                    degree: m,
                    value: u.clone(),
                })
                .collect();
            fresh.sort();
            for g in &fresh {
                closure.insert(g.value.clone());
            }
            gens.extend(fresh);
            reach.push(closure);
        }
        gens
    }

    /// Compares `Γ_m` with the `m`-fold sumset of `Γ_1` for `m <= M`.
    pub fn check_degree_one_generation(&self) -> GenerationReport {
        let checked_degree = self.max_degree();
        let status = if !self.is_superadditive() {
            GenerationStatus::Inconclusive
        } else {
            let mut status = GenerationStatus::GeneratedInDegreeOne;
            let mut sums = self.slice(1.min(checked_degree)).clone();
            for m in 2..=checked_degree {
                sums = sumset(&sums, self.slice(1));
                let witness = self
                    .slice(m)
                    .iter()
                    .filter(|u| !sums.contains(*u))
                    .map(|u| GradedPoint {
                        degree: m,
                        value: u.clone(),
                    })
                    .min();
                if let Some(w) = witness {
                    status = GenerationStatus::StrictGrowth(w);
                    break;
                }
            }
            status
        };
        GenerationReport {
            status,
            checked_degree,
        }
    }

    /// `Conv(⋃_{1<=m<=M} Γ_m / m)`, an inner approximation of the body.
    pub fn okounkov_body_estimate(&self) -> Result<RationalPolytope> {
        let mut pts: Vec<QVec> = Vec::new();
        for m in 1..=self.max_degree() {
            let denom = q(m as i64);
            for u in self.slice(m) {
                pts.push(u.0.iter().map(|&x| q(x) / &denom).collect());
            }
        }
        if pts.is_empty() {
            return Err(Error::InvalidArgument(
                "no points of positive degree in the semigroup".into(),
            ));
        }
        RationalPolytope::hull(self.dim, &pts)
    }

    /// Compares `Γ_k` with `k·Δ ∩ Z^d` for the body estimate `Δ`.
    pub fn normality_check(&self, k: u32) -> Result<NormalityRecord> {
        if k == 0 || k > self.max_degree() {
            return Err(Error::InvalidArgument(format!(
                "normality degree {k} outside 1..={}",
                self.max_degree()
            )));
        }
        let body = self.okounkov_body_estimate()?;
        let expected = body.lattice_points(k);
        let have: BTreeSet<Vec<i64>> = self.slice(k).iter().map(|u| u.0.clone()).collect();
        let missing: BTreeSet<Vec<i64>> = expected.difference(&have).cloned().collect();
        Ok(NormalityRecord {
            normal: missing.is_empty() && have.is_subset(&expected),
            degree: k,
            missing,
        })
    }
}

/// `build_gamma` of the operation list.
pub fn build_gamma(v: &SectionSpace, flag: &FlagSpec, max_degree: u32, limits: &Limits) -> Result<GradedSemigroup> {
    GradedSemigroup::build(v, flag, max_degree, limits)
}

/// Normality of `V` in degree `d = dim`, using the body estimate up to
/// `max(M, d)`.
pub fn normality_check(v: &SectionSpace, flag: &FlagSpec, max_degree: u32, limits: &Limits) -> Result<NormalityRecord> {
    let d = flag.dim() as u32;
    let g = GradedSemigroup::build(v, flag, max_degree.max(d), limits)?;
    g.normality_check(d)
}

/// Rational point of `Γ_m / m`, used by callers comparing bodies.
pub fn scaled_point(m: u32, u: &ValuationVector) -> QVec {
    u.0.iter()
        .map(|&x| BigRational::new(x.into(), (m as i64).into()))
        .collect()
}
