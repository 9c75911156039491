//! Polyhedral cones with exact integer data and double-description conversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{dot, kernel, primitive, primitive_line, project_out, rank_int, rank_rat, rational_to_primitive, rref, to_rational};
use crate::functional::Functional;

/// Largest ambient dimension accepted by the double-description engine.
pub const MAX_DD_DIM: usize = 16;

/// Minimal generators of a cone: extreme rays modulo the lineality space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generators {
    pub rays: Vec<Vec<BigInt>>,
    pub lineality: Vec<Vec<BigInt>>,
}

impl Generators {
    /// Generators with each lineality direction listed with both signs.
    pub fn as_cone_generators(&self) -> Vec<Vec<BigInt>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        out
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Self) -> Self {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(k * 64 + b);
                w &= w - 1;
            }
        }
        out
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DD_DIM {
        return Err(Error::ResourceLimit(format!(
            "ambient dimension {dim} exceeds the double-description limit {MAX_DD_DIM}"
        )));
    }
    Ok(())
}

/// Generators of `{x : a . x >= 0 for all constraints a}` by the double-description method.
pub fn double_description(dim: usize, constraints: &[Vec<BigInt>]) -> Result<Generators> {
    check_dim(dim)?;
    let mut cons: Vec<Vec<BigInt>> = Vec::new();
    for c in constraints {
        if c.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
        }
        if c.iter().any(|x| !x.is_zero()) {
            cons.push(primitive(c));
        }
    }
    cons.sort();
    cons.dedup();
    let m = cons.len();

    let mut lineality: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| (0..dim).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    let mut rays: Vec<(Vec<BigInt>, Bits)> = Vec::new();

    for (k, a) in cons.iter().enumerate() {
        let lvals: Vec<BigInt> = lineality.iter().map(|l| dot(a, l)).collect();
        if let Some(j) = lvals.iter().position(|x| !x.is_zero()) {
            // the constraint cuts the lineality space
            let mut l0 = lineality.remove(j);
            let mut s0 = lvals[j].clone();
            if s0.is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
                s0 = -s0;
            }
            let rest: Vec<BigInt> = lvals.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, v)| v.clone()).collect();
            for (l, s) in lineality.iter_mut().zip(&rest) {
                if !s.is_zero() {
                    let v: Vec<BigInt> = l.iter().zip(&l0).map(|(x, y)| &s0 * x - s * y).collect();
                    *l = primitive(&v);
                }
            }
            for (r, z) in rays.iter_mut() {
                let s = dot(a, r);
                if !s.is_zero() {
                    let v: Vec<BigInt> = r.iter().zip(&l0).map(|(x, y)| &s0 * x - &s * y).collect();
                    *r = primitive(&v);
                }
                z.set(k);
            }
            let mut z0 = Bits::new(m);
            for i in 0..k {
                z0.set(i);
            }
            rays.push((l0, z0));
            continue;
        }

        let vals: Vec<BigInt> = rays.iter().map(|(r, _)| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (i, (_, z)) in rays.iter_mut().enumerate() {
                if vals[i].is_zero() {
                    z.set(k);
                }
            }
            continue;
        }
        let target = dim - lineality.len();
        let need = target.saturating_sub(2);
        let pairs: Vec<(usize, usize)> = pos.iter().flat_map(|&p| neg.iter().map(move |&q| (p, q))).collect();
        let new_rays: Vec<(Vec<BigInt>, Bits)> = pairs
            .par_iter()
            .filter_map(|&(p, q)| {
                let common = rays[p].1.and(&rays[q].1);
                if common.count() < need {
                    return None;
                }
                let rows: Vec<&[BigInt]> = common.ones().into_iter().map(|i| cons[i].as_slice()).collect();
                if rank_int(&rows) != need {
                    return None;
                }
                let sp = &vals[p];
                let sq = &vals[q];
                let v: Vec<BigInt> = rays[q].0.iter().zip(&rays[p].0).map(|(x, y)| sp * x - sq * y).collect();
                let mut z = common;
                z.set(k);
                Some((primitive(&v), z))
            })
            .collect();
        let mut kept: Vec<(Vec<BigInt>, Bits)> = Vec::with_capacity(rays.len() + new_rays.len());
        for (i, (r, mut z)) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                z.set(k);
            }
            kept.push((r, z));
        }
        kept.extend(new_rays);
        rays = kept;
    }

    Ok(canonical_generators(rays.into_iter().map(|(r, _)| r).collect(), lineality, dim))
}

fn canonical_generators(rays: Vec<Vec<BigInt>>, lineality: Vec<Vec<BigInt>>, dim: usize) -> Generators {
    let lin_rat: Vec<Vec<BigRational>> = lineality.iter().map(|l| to_rational(l)).collect();
    let (basis, _) = rref(&lin_rat, dim);
    let mut lin: Vec<Vec<BigInt>> = basis.iter().map(|b| primitive_line(&rational_to_primitive(b))).collect();
    lin.sort();
    let mut out: Vec<Vec<BigInt>> = rays
        .into_iter()
        .map(|r| {
            if basis.is_empty() {
                r
            } else {
                rational_to_primitive(&project_out(&to_rational(&r), &basis))
            }
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    out.sort();
    out.dedup();
    Generators { rays: out, lineality: lin }
}

/// Convex cone in `Q^dim`, given by generators, halfspaces or both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCone {
    dim: usize,
    generators: Option<Vec<Vec<BigInt>>>,
    halfspaces: Option<Vec<Vec<BigInt>>>,
}

fn normalize_rows(dim: usize, rows: Vec<Vec<BigInt>>) -> Result<Vec<Vec<BigInt>>> {
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        if r.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
        }
        if r.iter().any(|x| !x.is_zero()) {
            out.push(primitive(&r));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

impl PolyCone {
    pub fn from_generators(dim: usize, generators: Vec<Vec<BigInt>>) -> Result<Self> {
        Ok(Self { dim, generators: Some(normalize_rows(dim, generators)?), halfspaces: None })
    }

    pub fn from_rational_generators(dim: usize, generators: &[Vec<BigRational>]) -> Result<Self> {
        Self::from_generators(dim, generators.iter().map(|g| rational_to_primitive(g)).collect())
    }

    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Vec<BigInt>>) -> Result<Self> {
        Ok(Self { dim, generators: None, halfspaces: Some(normalize_rows(dim, halfspaces)?) })
    }

    pub fn from_both(dim: usize, generators: Vec<Vec<BigInt>>, halfspaces: Vec<Vec<BigInt>>) -> Result<Self> {
        Ok(Self {
            dim,
            generators: Some(normalize_rows(dim, generators)?),
            halfspaces: Some(normalize_rows(dim, halfspaces)?),
        })
    }

    /// Cone `{v : f(v) >= 0}` in the nonempty coordinates of entropy space.
    pub fn from_functionals(n: usize, fs: &[Functional]) -> Result<Self> {
        let dim = (1 << n) - 1;
        for f in fs {
            if f.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: f.n() });
            }
        }
        Self::from_halfspaces(dim, fs.iter().map(Functional::to_primitive).collect())
    }

    pub fn positive_orthant(dim: usize) -> Self {
        let id: Vec<Vec<BigInt>> = (0..dim)
            .map(|i| (0..dim).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        Self { dim, generators: Some(id.clone()), halfspaces: Some(id) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> Option<&[Vec<BigInt>]> {
        self.generators.as_deref()
    }

    pub fn halfspaces(&self) -> Option<&[Vec<BigInt>]> {
        self.halfspaces.as_deref()
    }

    /// Minimal generators (extreme rays and lineality basis).
    pub fn extremal_rays(&self) -> Result<Generators> {
        if let Some(h) = &self.halfspaces {
            return double_description(self.dim, h);
        }
        let g = self.generators.as_ref().expect("a representation is present");
        let dual = double_description(self.dim, g)?;
        double_description(self.dim, &dual.as_cone_generators())
    }

    /// An inequality description, computed when only generators are known.
    pub fn h_rep(&self) -> Result<Vec<Vec<BigInt>>> {
        if let Some(h) = &self.halfspaces {
            return Ok(h.clone());
        }
        let g = self.generators.as_ref().expect("a representation is present");
        Ok(double_description(self.dim, g)?.as_cone_generators())
    }

    /// A generator description, computed when only halfspaces are known.
    pub fn v_rep(&self) -> Result<Vec<Vec<BigInt>>> {
        if let Some(g) = &self.generators {
            return Ok(g.clone());
        }
        Ok(self.extremal_rays()?.as_cone_generators())
    }

    /// Dual cone `{f : f(x) >= 0 for all x in C}` with both representations.
    pub fn dual(&self) -> Result<Self> {
        match (&self.generators, &self.halfspaces) {
            (Some(g), _) => {
                let gens = double_description(self.dim, g)?;
                Self::from_both(self.dim, gens.as_cone_generators(), g.clone())
            }
            (None, Some(h)) => {
                let primal = double_description(self.dim, h)?;
                let dual_h = primal.as_cone_generators();
                let gens = double_description(self.dim, &dual_h)?;
                Self::from_both(self.dim, gens.as_cone_generators(), dual_h)
            }
            (None, None) => unreachable!("a representation is present"),
        }
    }

    /// Representation swap only; never enumerates.
    pub fn dual_swap(&self) -> Self {
        Self { dim: self.dim, generators: self.halfspaces.clone(), halfspaces: self.generators.clone() }
    }

    /// Exact membership test.
    pub fn contains(&self, v: &[BigRational]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let x = rational_to_primitive(v);
        if let Some(h) = &self.halfspaces {
            return Ok(h.iter().all(|a| !dot(a, &x).is_negative()));
        }
        let g = self.generators.as_ref().expect("a representation is present");
        let dual = double_description(self.dim, g)?;
        Ok(dual.rays.iter().all(|a| !dot(a, &x).is_negative()) && dual.lineality.iter().all(|a| dot(a, &x).is_zero()))
    }

    pub fn contains_int(&self, v: &[BigInt]) -> Result<bool> {
        self.contains(&to_rational(v))
    }

    /// `other ⊆ self`.
    pub fn contains_cone(&self, other: &Self) -> Result<bool> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let h = self.h_rep()?;
        Ok(other.v_rep()?.iter().all(|g| h.iter().all(|a| !dot(a, g).is_negative())))
    }

    /// Mutual containment.
    pub fn same_cone(&self, other: &Self) -> Result<bool> {
        Ok(self.contains_cone(other)? && other.contains_cone(self)?)
    }

    /// Whether `r` spans an extreme ray, by the rank of its tight constraints.
    pub fn is_extremal_ray(&self, r: &[BigInt]) -> Result<bool> {
        let h = self.h_rep()?;
        if h.iter().any(|a| dot(a, r).is_negative()) || r.iter().all(|x| x.is_zero()) {
            return Ok(false);
        }
        let hr: Vec<Vec<BigRational>> = h.iter().map(|a| to_rational(a)).collect();
        let lin_dim = kernel(&hr, self.dim).len();
        let tight: Vec<&[BigInt]> = h.iter().filter(|a| dot(a, r).is_zero()).map(|a| a.as_slice()).collect();
        if tight.len() == h.len() {
            // r lies in the lineality space
            return Ok(false);
        }
        Ok(rank_int(&tight) + lin_dim + 1 == self.dim)
    }
}

/// Outcome of [`is_facet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetReport {
    pub is_facet: bool,
    /// Dimension of the span of the witness points on the face.
    pub face_dimension: usize,
    /// Dimension of the span of all witness points.
    pub cone_dimension: usize,
}

/// Face of `{f >= 0}` spanned by the witness points where `f` vanishes.
///
/// Points are full tables of `2^n` rationals. The face is a facet when its dimension is
/// one less than that of the full entropy space (`2^n - 1`).
pub fn is_facet(f: &Functional, points: &[Vec<BigRational>]) -> Result<FacetReport> {
    let dim = (1usize << f.n()) - 1;
    let mut on_face = Vec::new();
    for p in points {
        let val = f.evaluate_exact(p)?;
        if val.is_negative() {
            let shown: Vec<String> = p.iter().map(crate::exact::format_rational).collect();
            return Err(Error::InvalidInput(format!("point ({}) violates the inequality", shown.join(", "))));
        }
        if val.is_zero() {
            on_face.push(p[1..].to_vec());
        }
    }
    let all: Vec<Vec<BigRational>> = points.iter().map(|p| p[1..].to_vec()).collect();
    let face_dimension = rank_rat(&on_face, dim);
    Ok(FacetReport { is_facet: face_dimension + 1 == dim, face_dimension, cone_dimension: rank_rat(&all, dim) })
}

/// Whether some extreme rays outside `B` span a nonzero element of `B`.
///
/// This is the obstruction to writing the dual cone as `(K* ∩ B) ⊕ C`.
pub fn direct_sum_obstruction(ext: &[Functional], basis: &[Functional]) -> Result<bool> {
    let Some(first) = ext.first().or(basis.first()) else {
        return Ok(false);
    };
    let n = first.n();
    let dim = (1usize << n) - 1;
    for f in ext.iter().chain(basis) {
        if f.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.n() });
        }
    }
    let b_rows: Vec<Vec<BigRational>> = basis.iter().map(|f| f.coeffs()[1..].to_vec()).collect();
    let rank_b = rank_rat(&b_rows, dim);
    let outside: Vec<Vec<BigRational>> = ext
        .iter()
        .map(|f| f.coeffs()[1..].to_vec())
        .filter(|r| {
            let mut with = b_rows.clone();
            with.push(r.clone());
            rank_rat(&with, dim) > rank_b
        })
        .collect();
    if outside.is_empty() {
        return Ok(false);
    }
    let rank_r = rank_rat(&outside, dim);
    let mut all = b_rows;
    all.extend(outside);
    Ok(rank_r + rank_b > rank_rat(&all, dim))
}
