//! Exact rational polytopes in small dimension.
//!
//! Conversions between vertex and halfspace descriptions go through the
//! double description method on a homogenized cone: facets of `conv(P)` are
//! the extreme rays of `{(c, a) : c + a·p >= 0 for all p in P}`, and vertices
//! of `{x : N x <= b}` are the extreme rays of `{(t, x) : t b - N x >= 0, t >= 0}`
//! with `t > 0`.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type QVec = Vec<BigRational>;

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a nonzero vector by a positive rational so its entries are
/// coprime integers.
fn primitive(v: &[BigRational]) -> QVec {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| BigRational::from_integer(x / &g))
        .collect()
}

/// Reduced row echelon form of the nonzero rows; returns rows and pivot
/// columns.
#[allow(clippy::needless_range_loop)]
fn rref(mut rows: Vec<QVec>, ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let delta = &rows[r][j] * &f;
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).1.len()
}

/// Inverts a square matrix.
fn invert(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let aug: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { q(1) } else { q(0) }));
            r
        })
        .collect();
    let (red, piv) = rref(aug, 2 * n);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

/// Extreme rays of the pointed cone `{y : a·y >= 0 for every constraint a}`
/// in `Q^n`. Fails if the constraints have rank below `n`.
fn extreme_rays(constraints: &[QVec], n: usize) -> Result<Vec<QVec>> {
    let mut basis_rows: Vec<QVec> = Vec::new();
    let mut chosen = Vec::new();
    for (i, a) in constraints.iter().enumerate() {
        let mut trial = basis_rows.clone();
        trial.push(a.clone());
        if rank(&trial, n) > basis_rows.len() {
            basis_rows = trial;
            chosen.push(i);
            if chosen.len() == n {
                break;
            }
        }
    }
    if chosen.len() < n {
        return Err(Error::Unbounded);
    }
    let inv = invert(&basis_rows).ok_or_else(|| Error::Internal("singular basis".into()))?;
    let m = constraints.len();
    let mut rays: Vec<(QVec, Bits)> = (0..n)
        .map(|j| {
            let col: QVec = inv.iter().map(|row| row[j].clone()).collect();
            let mut z = Bits::new(m);
            for (k, &ci) in chosen.iter().enumerate() {
                if k != j {
                    z.set(ci);
                }
            }
            (primitive(&col), z)
        })
        .collect();
    let chosen_set: BTreeSet<usize> = chosen.iter().copied().collect();
    for i in (0..m).filter(|i| !chosen_set.contains(i)) {
        let a = &constraints[i];
        let vals: Vec<BigRational> = rays.iter().map(|(r, _)| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_negative()).collect();
        let mut next: Vec<(QVec, Bits)> = Vec::new();
        for &p in &pos {
            for &nn in &neg {
                let common = rays[p].1.and(&rays[nn].1);
                if common.count() + 2 < n {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(j, (_, z))| j == p || j == nn || !common.subset_of(z));
                if !adjacent {
                    continue;
                }
                let r: QVec = rays[nn]
                    .0
                    .iter()
                    .zip(&rays[p].0)
                    .map(|(x, y)| x * &vals[p] - y * &vals[nn])
                    .collect();
                let mut z = common;
                z.set(i);
                next.push((primitive(&r), z));
            }
        }
        for (j, (r, z)) in rays.into_iter().enumerate() {
            if vals[j].is_zero() {
                let mut z = z;
                z.set(i);
                next.push((r, z));
            } else if vals[j].is_positive() {
                next.push((r, z));
            }
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|(r, _)| r).collect())
}

/// `normal · x <= offset`, or an equation `normal · x = offset`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: QVec,
    pub offset: BigRational,
}

impl Halfspace {
    fn canonical(normal: QVec, offset: BigRational) -> Halfspace {
        let mut all = normal;
        all.push(offset);
        let mut p = primitive(&all);
        let offset = p.pop().expect("offset present");
        Halfspace { normal: p, offset }
    }

    pub fn slack(&self, x: &[BigRational]) -> BigRational {
        &self.offset - dot(&self.normal, x)
    }

    fn negated(&self) -> Halfspace {
        Halfspace {
            normal: self.normal.iter().map(|x| -x).collect(),
            offset: -&self.offset,
        }
    }
}

/// A convex polytope held in both descriptions, cross-validated on
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolytope {
    ambient_dim: usize,
    vertices: Vec<QVec>,
    facets: Vec<Halfspace>,
    equations: Vec<Halfspace>,
    affine_dim: isize,
}

impl RationalPolytope {
    pub fn empty(ambient_dim: usize) -> Self {
        RationalPolytope {
            ambient_dim,
            vertices: Vec::new(),
            facets: Vec::new(),
            equations: Vec::new(),
            affine_dim: -1,
        }
    }

    /// Convex hull of a point set in `Q^d`.
    pub fn hull(ambient_dim: usize, points: &[QVec]) -> Result<Self> {
        let pts: BTreeSet<QVec> = points.iter().cloned().collect();
        if pts.iter().any(|p| p.len() != ambient_dim) {
            return Err(Error::InvalidArgument("point dimension mismatch".into()));
        }
        let pts: Vec<QVec> = pts.into_iter().collect();
        let Some(p0) = pts.first().cloned() else {
            return Ok(Self::empty(ambient_dim));
        };
        let d = ambient_dim;
        let dirs: Vec<QVec> = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&p0).map(|(a, b)| a - b).collect())
            .collect();
        let (span, pivots) = rref(dirs, d);
        let k = pivots.len();

        let mut equations = Vec::new();
        for i in (0..d).filter(|i| !pivots.contains(i)) {
            let mut normal = vec![q(0); d];
            normal[i] = q(1);
            for (j, &pj) in pivots.iter().enumerate() {
                normal[pj] = -&span[j][i];
            }
            let offset = dot(&normal, &p0);
            equations.push(Halfspace::canonical(normal, offset));
        }

        if k == 0 {
            return Self::assemble(d, vec![p0], Vec::new(), equations, 0);
        }

        let chart: Vec<QVec> = pts
            .iter()
            .map(|p| pivots.iter().map(|&j| p[j].clone()).collect())
            .collect();
        let rows: Vec<QVec> = chart
            .iter()
            .map(|y| {
                let mut r = vec![q(1)];
                r.extend(y.iter().cloned());
                r
            })
            .collect();
        let rays = extreme_rays(&rows, k + 1)?;
        let mut chart_facets = Vec::new();
        let mut facets = Vec::new();
        for ray in &rays {
            let c = ray[0].clone();
            let a: QVec = ray[1..].iter().map(|x| -x).collect();
            let mut normal = vec![q(0); d];
            for (j, &pj) in pivots.iter().enumerate() {
                normal[pj] = a[j].clone();
            }
            chart_facets.push((a, c.clone()));
            facets.push(Halfspace::canonical(normal, c));
        }
        let mut vertices = Vec::new();
        for (p, y) in pts.iter().zip(&chart) {
            let tight: Vec<QVec> = chart_facets
                .iter()
                .filter(|(a, c)| dot(a, y) == *c)
                .map(|(a, _)| a.clone())
                .collect();
            if rank(&tight, k) == k {
                vertices.push(p.clone());
            }
        }
        Self::assemble(d, vertices, facets, equations, k as isize)
    }

    fn assemble(
        ambient_dim: usize,
        mut vertices: Vec<QVec>,
        mut facets: Vec<Halfspace>,
        mut equations: Vec<Halfspace>,
        affine_dim: isize,
    ) -> Result<Self> {
        vertices.sort();
        vertices.dedup();
        facets.sort();
        facets.dedup();
        for e in equations.iter_mut() {
            // fix a sign convention: first nonzero normal entry positive
            if e.normal.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                *e = e.negated();
            }
        }
        equations.sort();
        equations.dedup();
        let poly = RationalPolytope {
            ambient_dim,
            vertices,
            facets,
            equations,
            affine_dim,
        };
        poly.validate()?;
        Ok(poly)
    }

    fn validate(&self) -> Result<()> {
        for v in &self.vertices {
            if self.equations.iter().any(|e| !e.slack(v).is_zero()) {
                return Err(Error::Internal("vertex off the affine hull".into()));
            }
            if self.facets.iter().any(|h| h.slack(v).is_negative()) {
                return Err(Error::Internal("vertex violates a facet".into()));
            }
            let tight = self.facets.iter().filter(|h| h.slack(v).is_zero()).count();
            if (tight as isize) < self.affine_dim {
                return Err(Error::Internal("vertex tight on too few facets".into()));
            }
        }
        Ok(())
    }

    /// Polytope `{x : h.normal · x <= h.offset}` in `Q^d`; fails when the
    /// description is unbounded.
    pub fn from_halfspaces(ambient_dim: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        let d = ambient_dim;
        if d == 0 {
            let feasible = halfspaces.iter().all(|h| !h.offset.is_negative());
            return if feasible {
                Self::hull(0, &[Vec::new()])
            } else {
                Ok(Self::empty(0))
            };
        }
        let mut rows: Vec<QVec> = vec![{
            let mut r = vec![q(0); d + 1];
            r[0] = q(1);
            r
        }];
        for h in halfspaces {
            let mut r = vec![h.offset.clone()];
            r.extend(h.normal.iter().map(|x| -x));
            rows.push(r);
        }
        let rays = extreme_rays(&rows, d + 1)?;
        let mut vertices = Vec::new();
        for r in rays {
            if r[0].is_positive() {
                vertices.push(r[1..].iter().map(|x| x / &r[0]).collect::<QVec>());
            } else if r.iter().any(|x| !x.is_zero()) {
                return Err(Error::Unbounded);
            }
        }
        Self::hull(d, &vertices)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Affine dimension; `-1` for the empty polytope.
    pub fn affine_dim(&self) -> isize {
        self.affine_dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Irredundant vertices in lexicographic order.
    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn equations(&self) -> &[Halfspace] {
        &self.equations
    }

    /// Full inequality description, each equation as a pair of inequalities.
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        let mut out = self.facets.clone();
        for e in &self.equations {
            out.push(e.clone());
            out.push(e.negated());
        }
        out
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        !self.is_empty()
            && self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|h| !h.slack(x).is_negative())
    }

    pub fn contains_polytope(&self, other: &RationalPolytope) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    pub fn dilate(&self, k: u32) -> RationalPolytope {
        let k = q(k as i64);
        let vertices: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * &k).collect())
            .collect();
        Self::hull(self.ambient_dim, &vertices).expect("dilation of a valid polytope")
    }

    /// Integer points of `k·P`, by bounding-box scan with exact membership.
    pub fn lattice_points(&self, k: u32) -> BTreeSet<Vec<i64>> {
        let mut out = BTreeSet::new();
        if self.is_empty() {
            return out;
        }
        let scaled = self.dilate(k);
        let d = self.ambient_dim;
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for v in &scaled.vertices {
            for i in 0..d {
                lo[i] = lo[i].min(v[i].ceil().to_integer().to_i64().expect("small bound"));
                hi[i] = hi[i].max(v[i].floor().to_integer().to_i64().expect("small bound"));
            }
        }
        if d == 0 {
            out.insert(Vec::new());
            return out;
        }
        if (0..d).any(|i| lo[i] > hi[i]) {
            return out;
        }
        let mut cur = lo.clone();
        loop {
            let x = qvec(&cur);
            if scaled.contains(&x) {
                out.insert(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Points with `x_1 = ... = x_r = 0`, projected to the last `d - r`
    /// coordinates.
    pub fn face_restriction(&self, r: usize) -> Result<RationalPolytope> {
        if r > self.ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "cannot fix {r} coordinates in dimension {}",
                self.ambient_dim
            )));
        }
        if r == 0 {
            return Ok(self.clone());
        }
        let rest = self.ambient_dim - r;
        if self.is_empty() {
            return Ok(Self::empty(rest));
        }
        let hs: Vec<Halfspace> = self
            .halfspaces()
            .into_iter()
            .map(|h| Halfspace {
                normal: h.normal[r..].to_vec(),
                offset: h.offset,
            })
            .collect();
        Self::from_halfspaces(rest, &hs)
    }

    /// `d!·vol(P)` for full-dimensional polytopes, via a pulling
    /// triangulation.
    pub fn normalized_volume(&self) -> Option<BigRational> {
        let d = self.ambient_dim;
        if self.affine_dim != d as isize {
            return None;
        }
        let facet_sets: Vec<BTreeSet<usize>> = self
            .facets
            .iter()
            .map(|h| {
                (0..self.vertices.len())
                    .filter(|&i| h.slack(&self.vertices[i]).is_zero())
                    .collect()
            })
            .collect();
        let all: BTreeSet<usize> = (0..self.vertices.len()).collect();
        let simplices = self.triangulate(&all, d, &facet_sets);
        let mut total = BigRational::zero();
        for s in simplices {
            let base = &self.vertices[s[0]];
            let rows: Vec<QVec> = s[1..]
                .iter()
                .map(|&i| {
                    self.vertices[i]
                        .iter()
                        .zip(base)
                        .map(|(a, b)| a - b)
                        .collect()
                })
                .collect();
            total += determinant(rows).abs();
        }
        Some(total)
    }

    fn face_dim(&self, face: &BTreeSet<usize>) -> usize {
        let mut it = face.iter();
        let Some(&first) = it.next() else { return 0 };
        let rows: Vec<QVec> = it
            .map(|&i| {
                self.vertices[i]
                    .iter()
                    .zip(&self.vertices[first])
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        rank(&rows, self.ambient_dim)
    }

    fn triangulate(
        &self,
        face: &BTreeSet<usize>,
        dim: usize,
        facet_sets: &[BTreeSet<usize>],
    ) -> Vec<Vec<usize>> {
        let apex = *face.iter().next().expect("nonempty face");
        if dim == 0 {
            return vec![vec![apex]];
        }
        let mut subfaces: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for f in facet_sets {
            let w: BTreeSet<usize> = face.intersection(f).copied().collect();
            if w.len() < face.len() && !w.is_empty() && self.face_dim(&w) == dim - 1 {
                subfaces.insert(w);
            }
        }
        let mut out = Vec::new();
        for w in subfaces.iter().filter(|w| !w.contains(&apex)) {
            for mut s in self.triangulate(w, dim - 1, facet_sets) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }
}

#[allow(clippy::needless_range_loop)]
fn determinant(mut m: Vec<QVec>) -> BigRational {
    let n = m.len();
    let mut det = q(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return q(0);
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for j in c..n {
                    let delta = &m[c][j] * &f;
                    m[i][j] -= delta;
                }
            }
        }
    }
    det
}

/// `convex_hull` of the operation list; the input must be nonempty.
pub fn convex_hull(points: &[QVec]) -> Result<RationalPolytope> {
    let d = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidArgument("convex hull of no points".into()))?;
    RationalPolytope::hull(d, points)
}
