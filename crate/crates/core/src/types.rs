//! Type classes, Young-diagram combinatorics and the group-less Chan-Yeung construction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::entropy::{marginal_map, EntropyVector, ExactEntropyVector, JointDistribution, Probabilities};
use crate::error::{invalid, Error, Result};
use crate::exact::LogLinear;
use crate::subset::{self, Subset};

/// Weakly decreasing list of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return invalid("partition parts must be positive");
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("{parts:?} is not weakly decreasing"));
        }
        Ok(Self(parts))
    }

    /// Sorts and drops zeros.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    /// Parse a comma list such as `5,3,2,2,1,1,1`; the empty string is the empty partition.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(Self(Vec::new()));
        }
        let parts = t
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad partition {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` dominates `other` (both of the same size).
    pub fn dominates(&self, other: &Self) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let (mut a, mut b) = (0, 0);
        for i in 0..self.len().max(other.len()) {
            a += self.0.get(i).copied().unwrap_or(0);
            b += other.0.get(i).copied().unwrap_or(0);
            if a < b {
                return false;
            }
        }
        true
    }

    pub fn conjugate(&self) -> Self {
        let cols = self.0.first().copied().unwrap_or(0);
        Self((0..cols).map(|j| self.0.iter().filter(|&&p| p > j).count()).collect())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Partitions of `n` with at most `max_parts` parts, in reverse lexicographic order.
pub fn partitions(n: usize, max_parts: usize) -> Vec<Partition> {
    fn rec(rem: usize, max_part: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=rem.min(max_part)).rev() {
            cur.push(p);
            rec(rem - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_parts, &mut Vec::new(), &mut out);
    out
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n! / prod f_a!`.
pub fn type_class_size(f: &[u64]) -> BigUint {
    let n: u64 = f.iter().sum();
    let den = f.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
    factorial(n) / den
}

/// `log2 |T_f|` as an exact logarithm.
pub fn log2_type_class_size(f: &[u64]) -> LogLinear {
    let n: u64 = f.iter().sum();
    f.iter()
        .fold(LogLinear::log2_factorial(n), |acc, &x| acc.sub(&LogLinear::log2_factorial(x)))
}

/// Letter counts over a product alphabet (row-major, last party fastest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyTable {
    pub dims: Vec<usize>,
    pub counts: Vec<u64>,
}

impl FrequencyTable {
    pub fn new(dims: Vec<usize>, counts: Vec<u64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if counts.len() != size {
            return Err(Error::DimensionMismatch { expected: size, found: counts.len() });
        }
        Ok(Self { dims, counts })
    }

    pub fn size(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Counts summed over the parties outside `keep`.
pub fn marginal_frequency(f: &FrequencyTable, keep: Subset) -> Result<FrequencyTable> {
    let n = f.dims.len();
    if keep >> n != 0 {
        return invalid(format!("subset {} outside [{n}]", subset::label(keep)));
    }
    let (mdims, map) = marginal_map(&f.dims, keep);
    let mut counts = vec![0u64; mdims.iter().product()];
    for (x, &c) in f.counts.iter().enumerate() {
        counts[map[x]] += c;
    }
    Ok(FrequencyTable { dims: mdims, counts })
}

/// Exact `h_I = log2 |T_{f_I}|` for a joint frequency table.
pub fn type_entropy_exact(f: &FrequencyTable) -> Result<ExactEntropyVector> {
    let n = f.dims.len();
    subset::check_parties(n)?;
    let mut entries = vec![LogLinear::zero(); 1 << n];
    for s in subset::nonempty(n) {
        entries[s] = log2_type_class_size(&marginal_frequency(f, s)?.counts);
    }
    Ok(ExactEntropyVector { n, entries })
}

/// Frequency table `k q p` for a rational distribution with common denominator `q`.
pub fn scaled_type(p: &JointDistribution, k: u64) -> Result<FrequencyTable> {
    let Probabilities::Exact(probs) = p.probs() else {
        return invalid("the Chan-Yeung construction needs exact rational probabilities");
    };
    if k == 0 {
        return invalid("k must be positive");
    }
    let q = probs.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let scale = BigRational::from_integer(q * BigInt::from(k));
    let counts = probs
        .iter()
        .map(|x| {
            (x * &scale)
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::ResourceLimit("type counts too large".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    FrequencyTable::new(p.dims().to_vec(), counts)
}

/// `h_I = log2 |T_{kq p_I}|`, exact.
pub fn chan_yeung_exact(p: &JointDistribution, k: u64) -> Result<ExactEntropyVector> {
    type_entropy_exact(&scaled_type(p, k)?)
}

pub fn chan_yeung_vector(p: &JointDistribution, k: u64) -> Result<EntropyVector> {
    Ok(chan_yeung_exact(p, k)?.to_float())
}

/// Probability that the empirical distribution of `n` i.i.d. samples lies within L1
/// distance `eps` of `p`.
pub fn aep_mass(p: &[f64], n: usize, eps: f64) -> Result<f64> {
    crate::entropy::shannon_entropy(p)?;
    if eps >= 2.0 {
        return Ok(1.0);
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let a = p.len();
    let mut total = 0.0;
    let mut f = vec![0usize; a];
    compositions(n, a, &mut f, 0, &mut |f| {
        let dist: f64 = f.iter().zip(p).map(|(&c, &q)| (c as f64 / n as f64 - q).abs()).sum();
        if dist > eps + 1e-12 {
            return;
        }
        let mut ln = ln_fact[n];
        for (&c, &q) in f.iter().zip(p) {
            ln -= ln_fact[c];
            if c > 0 {
                if q == 0.0 {
                    return;
                }
                ln += c as f64 * q.ln();
            }
        }
        total += ln.exp();
    });
    Ok(total.min(1.0))
}

fn compositions(rem: usize, parts: usize, cur: &mut Vec<usize>, pos: usize, visit: &mut dyn FnMut(&[usize])) {
    if pos + 1 == parts {
        cur[pos] = rem;
        visit(cur);
        return;
    }
    for c in 0..=rem {
        cur[pos] = c;
        compositions(rem - c, parts, cur, pos + 1, visit);
    }
}

/// Shapes `ν ⊆ shape` with `shape / ν` a horizontal strip of `size` boxes.
fn strips(shape: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(shape: &[usize], i: usize, rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == shape.len() {
            if rem == 0 {
                let mut v = cur.clone();
                while v.last() == Some(&0) {
                    v.pop();
                }
                out.push(v);
            }
            return;
        }
        let lower = shape.get(i + 1).copied().unwrap_or(0);
        for nu in (lower..=shape[i]).rev() {
            let taken = shape[i] - nu;
            if taken > rem {
                break;
            }
            cur.push(nu);
            rec(shape, i + 1, rem - taken, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(shape, 0, size, &mut Vec::new(), &mut out);
    out
}

/// Number of semistandard tableaux of shape `mu` and content `content`.
pub fn kostka(mu: &Partition, content: &[usize]) -> u128 {
    if mu.size() != content.iter().sum::<usize>() {
        return 0;
    }
    let mut memo = HashMap::new();
    kostka_rec(mu.parts(), content, &mut memo)
}

fn kostka_rec(shape: &[usize], content: &[usize], memo: &mut HashMap<(Vec<usize>, usize), u128>) -> u128 {
    let Some((&last, rest)) = content.split_last() else {
        return u128::from(shape.is_empty());
    };
    let key = (shape.to_vec(), content.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = strips(shape, last).iter().map(|nu| kostka_rec(nu, rest, memo)).sum();
    memo.insert(key, v);
    v
}

/// Number of semistandard tableaux of shape `mu` with entries in `1..=d`.
pub fn dim_weyl(mu: &Partition, d: usize) -> BigUint {
    if mu.len() > d {
        return BigUint::zero();
    }
    let mut memo = HashMap::new();
    weyl_rec(mu.parts(), d, &mut memo)
}

fn weyl_rec(shape: &[usize], d: usize, memo: &mut HashMap<(Vec<usize>, usize), BigUint>) -> BigUint {
    if shape.is_empty() {
        return BigUint::one();
    }
    if d == 0 || shape.len() > d {
        return BigUint::zero();
    }
    let key = (shape.to_vec(), d);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let total: usize = shape.iter().sum();
    let mut v = BigUint::zero();
    for size in 0..=total {
        for nu in strips(shape, size) {
            v += weyl_rec(&nu, d - 1, memo);
        }
    }
    memo.insert(key, v.clone());
    v
}

/// Hook-content formula for `dim_weyl`.
pub fn dim_weyl_hook_content(mu: &Partition, d: usize) -> BigUint {
    let conj = mu.conjugate();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (i, &row) in mu.parts().iter().enumerate() {
        for j in 0..row {
            num *= BigInt::from(d as i64 + j as i64 - i as i64);
            den *= BigInt::from(row - j + conj.parts()[j] - i - 1);
        }
    }
    if num <= BigInt::zero() {
        return BigUint::zero();
    }
    (num / den).to_biguint().expect("nonnegative")
}

/// Hook-length formula.
pub fn dim_specht(lambda: &Partition) -> BigUint {
    let conj = lambda.conjugate();
    let mut hooks = BigUint::one();
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            hooks *= BigUint::from(row - j + conj.parts()[j] - i - 1);
        }
    }
    factorial(lambda.size() as u64) / hooks
}

/// `n! / prod λ_i!`.
pub fn dim_permutation_module(lambda: &Partition) -> BigUint {
    let f: Vec<u64> = lambda.parts().iter().map(|&x| x as u64).collect();
    type_class_size(&f)
}

/// Sorted multiplicities of the part values of `λ` padded with zeros to length `d`.
pub fn multiplicity_shape(lambda: &Partition, d: usize) -> Result<Partition> {
    if lambda.len() > d {
        return invalid(format!("{lambda} has more than {d} parts"));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..d {
        *counts.entry(lambda.parts().get(i).copied().unwrap_or(0)).or_insert(0) += 1;
    }
    Ok(Partition::from_unsorted(counts.into_values().collect()))
}

/// Number of tables with row sums `mu`, column sums `nu` and nonzero entries `lambda`.
pub fn classical_kronecker(lambda: &Partition, mu: &Partition, nu: &Partition) -> u128 {
    let n = lambda.size();
    if mu.size() != n || nu.size() != n {
        return 0;
    }
    let mut avail: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in lambda.parts() {
        *avail.entry(x).or_insert(0) += 1;
    }
    let mut cols = nu.parts().to_vec();
    let mut count = 0;
    table_rec(mu.parts(), 0, 0, mu.parts().first().copied().unwrap_or(0), &mut cols, &mut avail, &mut count);
    count
}

fn table_rec(
    rows: &[usize],
    r: usize,
    c: usize,
    row_rem: usize,
    cols: &mut Vec<usize>,
    avail: &mut BTreeMap<usize, usize>,
    count: &mut u128,
) {
    if r == rows.len() {
        if cols.iter().all(|&x| x == 0) {
            *count += 1;
        }
        return;
    }
    let last_col = c + 1 == cols.len();
    let hi = row_rem.min(cols[c]);
    let lo = if last_col { row_rem } else { 0 };
    if lo > hi {
        return;
    }
    for v in lo..=hi {
        if v > 0 {
            match avail.get_mut(&v) {
                Some(k) if *k > 0 => *k -= 1,
                _ => continue,
            }
        }
        cols[c] -= v;
        if last_col {
            let next_rem = rows.get(r + 1).copied().unwrap_or(0);
            table_rec(rows, r + 1, 0, next_rem, cols, avail, count);
        } else {
            table_rec(rows, r, c + 1, row_rem - v, cols, avail, count);
        }
        cols[c] += v;
        if v > 0 {
            *avail.get_mut(&v).expect("taken above") += 1;
        }
    }
}

/// Whether a joint type `lambda` with marginal types `mu`, `nu` exists.
pub fn marginal_compatible(lambda: &Partition, mu: &Partition, nu: &Partition) -> bool {
    classical_kronecker(lambda, mu, nu) != 0
}

/// Multiplicities `η_ν = sum_λ K_{μλ} K_{ν λ⁺}` over `ν ⊢ d`.
pub fn restriction_multiplicities(mu: &Partition, d: usize) -> Result<BTreeMap<Partition, u128>> {
    if mu.len() > d {
        return invalid(format!("{mu} has more than {d} rows"));
    }
    let mut out: BTreeMap<Partition, u128> = BTreeMap::new();
    for lambda in partitions(mu.size(), d) {
        let k1 = kostka(mu, lambda.parts());
        if k1 == 0 {
            continue;
        }
        let plus = multiplicity_shape(&lambda, d)?;
        for nu in partitions(d, d) {
            let k2 = kostka(&nu, plus.parts());
            if k2 != 0 {
                *out.entry(nu).or_insert(0) += k1 * k2;
            }
        }
    }
    Ok(out)
}

/// `sum_{λ ⊢ (n, d)} dim M^λ · d!/prod (λ⁺)_i! = d^n`.
pub fn schur_weyl_dimension_check(d: usize, n: usize) -> bool {
    let lhs = partitions(n, d).iter().fold(BigUint::zero(), |acc, lambda| {
        let plus = multiplicity_shape(lambda, d).expect("at most d parts");
        acc + dim_permutation_module(lambda) * dim_permutation_module(&plus)
    });
    lhs == BigUint::from(d).pow(n as u32)
}
