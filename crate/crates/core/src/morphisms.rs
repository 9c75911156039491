//! Linear maps between entropy spaces: restriction, injection, purification, blocking,
//! the `S_{n+1}` action, balancing and the Matúš transform.
//!
//! Most maps are coordinate pullbacks `w_J = v_{φ(J)}`; they act on any entry type.

use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::entropy::EntropyVector;
use crate::error::{invalid, Error, Result};
use crate::functional::Functional;
use crate::perm::Permutation;
use crate::subset::{self, Subset};

fn pull<T: Clone>(v: &[T], map: &[Subset]) -> Vec<T> {
    map.iter().map(|&s| v[s].clone()).collect()
}

fn check_len<T>(v: &[T], n: usize) -> Result<()> {
    if v.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: v.len() });
    }
    Ok(())
}

fn n_of<T>(v: &[T]) -> Result<usize> {
    if !v.len().is_power_of_two() || v.len() < 2 {
        return invalid(format!("table of length {} is not indexed by subsets", v.len()));
    }
    Ok(v.len().trailing_zeros() as usize)
}

/// Source subsets for `sur_m^n`: `w_J = v_J`, `J ⊆ [n]`.
pub fn surject_map(n: usize) -> Vec<Subset> {
    (0..1 << n).collect()
}

/// Source subsets for `inj_n^m`: `w_J = v_{J ∩ [n]}`.
pub fn inject_map(n: usize, m: usize) -> Vec<Subset> {
    (0..1usize << m).map(|j| j & subset::full(n)).collect()
}

/// Source subsets for `pur_n^{n+1}`: `w_J = v_J` if `n+1 ∉ J`, else `v_{[n+1] \ J}`.
pub fn purify_map(n: usize) -> Vec<Subset> {
    let top = 1usize << n;
    (0..1usize << (n + 1))
        .map(|j| if j & top == 0 { j } else { subset::complement(j, n + 1) })
        .collect()
}

/// Source subsets for blocking by a composition `λ` of `m` into `n` consecutive blocks.
pub fn block_map(lambda: &[usize]) -> Result<Vec<Subset>> {
    if lambda.is_empty() || lambda.contains(&0) {
        return invalid("composition parts must be positive");
    }
    let mut blocks = Vec::with_capacity(lambda.len());
    let mut start = 0;
    for &part in lambda {
        blocks.push(((1usize << part) - 1) << start);
        start += part;
    }
    subset::check_parties(start)?;
    let n = lambda.len();
    Ok((0..1usize << n)
        .map(|j| (0..n).filter(|&b| j >> b & 1 == 1).fold(0, |acc, b| acc | blocks[b]))
        .collect())
}

/// Source subsets for the `S_{n+1}` action, `(π·v)_I = pur(v)_{π^{-1}(I)}`.
pub fn symmetry_map(pi: &Permutation, n: usize) -> Result<Vec<Subset>> {
    if pi.degree() != n + 1 {
        return invalid(format!("permutation of {} symbols cannot act on {n} parties", pi.degree()));
    }
    let inv = pi.inverse();
    let pur = purify_map(n);
    Ok((0..1usize << n).map(|i| pur[inv.apply_set(i)]).collect())
}

pub fn surject<T: Clone>(v: &[T], n: usize) -> Result<Vec<T>> {
    let m = n_of(v)?;
    if n > m || n == 0 {
        return invalid(format!("cannot restrict {m} parties to {n}"));
    }
    Ok(pull(v, &surject_map(n)))
}

pub fn inject<T: Clone>(v: &[T], m: usize) -> Result<Vec<T>> {
    let n = n_of(v)?;
    if m < n {
        return invalid(format!("cannot inject {n} parties into {m}"));
    }
    subset::check_parties(m)?;
    Ok(pull(v, &inject_map(n, m)))
}

pub fn purify_vector<T: Clone>(v: &[T]) -> Result<Vec<T>> {
    let n = n_of(v)?;
    subset::check_parties(n + 1)?;
    Ok(pull(v, &purify_map(n)))
}

pub fn block<T: Clone>(v: &[T], lambda: &[usize]) -> Result<Vec<T>> {
    let m = n_of(v)?;
    if lambda.iter().sum::<usize>() != m {
        return invalid(format!("composition {lambda:?} does not sum to {m}"));
    }
    Ok(pull(v, &block_map(lambda)?))
}

pub fn symmetry_action<T: Clone>(pi: &Permutation, v: &[T]) -> Result<Vec<T>> {
    let n = n_of(v)?;
    Ok(pull(v, &symmetry_map(pi, n)?))
}

fn ev(n: usize, entries: Vec<f64>) -> Result<EntropyVector> {
    EntropyVector::from_entries(n, entries)
}

pub fn surject_ev(v: &EntropyVector, n: usize) -> Result<EntropyVector> {
    ev(n, surject(v.entries(), n)?)
}

pub fn inject_ev(v: &EntropyVector, m: usize) -> Result<EntropyVector> {
    ev(m, inject(v.entries(), m)?)
}

pub fn purify_ev(v: &EntropyVector) -> Result<EntropyVector> {
    ev(v.n() + 1, purify_vector(v.entries())?)
}

pub fn block_ev(v: &EntropyVector, lambda: &[usize]) -> Result<EntropyVector> {
    ev(lambda.len(), block(v.entries(), lambda)?)
}

pub fn symmetry_action_ev(pi: &Permutation, v: &EntropyVector) -> Result<EntropyVector> {
    ev(v.n(), symmetry_action(pi, v.entries())?)
}

/// `[π·f](v) = f(π^{-1}·v)`.
pub fn adjoint_action(pi: &Permutation, f: &Functional) -> Result<Functional> {
    let n = f.n();
    let map = symmetry_map(&pi.inverse(), n)?;
    let mut g = Functional::zero(n);
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_zero() {
            g.add_coeff(map[i], c);
        }
    }
    Ok(g)
}

/// `r_i = sum_{I ∋ i} f_I`.
pub fn residual_weights(f: &Functional) -> Vec<BigRational> {
    (1..=f.n())
        .map(|i| {
            f.coeffs()
                .iter()
                .enumerate()
                .filter(|&(s, _)| subset::contains(s, i))
                .fold(BigRational::zero(), |acc, (_, c)| acc + c)
        })
        .collect()
}

pub fn is_balanced(f: &Functional) -> bool {
    residual_weights(f).iter().all(Zero::is_zero)
}

/// Projection onto balanced functionals: `g_[n] = f_[n] - sum r_i`, `g_{i^c} = f_{i^c} + r_i`.
pub fn balance(f: &Functional) -> Functional {
    let n = f.n();
    let r = residual_weights(f);
    let mut g = f.clone();
    let total = r.iter().fold(BigRational::zero(), |a, b| a + b);
    g.add_coeff(subset::full(n), &-total);
    for (i, ri) in r.iter().enumerate() {
        g.add_coeff(subset::complement(subset::singleton(i + 1), n), ri);
    }
    g
}

/// Monotonicity functional `m(i, i^c) = e*_[n] - e*_{i^c}`.
pub fn monotonicity(n: usize, i: usize) -> Functional {
    Functional::from_terms(n, &[(subset::full(n), 1), (subset::complement(subset::singleton(i), n), -1)])
}

/// `w_I = sum_{K ⊆ I} (-1)^{|I \ K|} (v_[n] - v_{[n] \ K})`; `w_∅ = 0`.
pub fn matus_transform<T>(v: &[T]) -> Result<Vec<T>>
where
    T: Clone + Zero + Add<Output = T> + Sub<Output = T> + Neg<Output = T>,
{
    let n = n_of(v)?;
    check_len(v, n)?;
    let full = subset::full(n);
    let mut w = vec![T::zero(); 1 << n];
    for (i, wi) in w.iter_mut().enumerate().skip(1) {
        let mut acc = T::zero();
        for k in subset::subsets_of(i) {
            let term = v[full].clone() - v[subset::complement(k, n)].clone();
            acc = if subset::size(i & !k).is_multiple_of(2) { acc + term } else { acc - term };
        }
        *wi = acc;
    }
    Ok(w)
}

/// `v^(I)_J = min(1, |I ∩ J|)`: a fair bit shared by the parties in `I`.
pub fn correlated_bits_vector(n: usize, i: Subset) -> Vec<BigRational> {
    (0..1usize << n)
        .map(|j| BigRational::from_integer(BigInt::from(u8::from(i & j != 0))))
        .collect()
}

/// All `2^n - 1` vectors `v^(I)`, `I` nonempty.
pub fn correlated_bits_family(n: usize) -> Vec<Vec<BigRational>> {
    subset::nonempty(n).map(|i| correlated_bits_vector(n, i)).collect()
}

/// The `S_{n+1}` action as a `2^n x 2^n` 0/1 matrix (row `I`, column `φ(I)`).
pub fn symmetry_matrix(pi: &Permutation, n: usize) -> Result<Vec<Vec<u8>>> {
    let map = symmetry_map(pi, n)?;
    Ok((0..1usize << n).map(|i| (0..1usize << n).map(|j| u8::from(map[i] == j)).collect()).collect())
}
