//! Exact integer and rational linear algebra, plus exact sums of binary logarithms.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad rational {t:?}"));
    match t.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Divide by the (positive) gcd of the entries. Direction is preserved.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Primitive scaling with the first nonzero entry positive; for lines, not rays.
pub fn primitive_line(v: &[BigInt]) -> Vec<BigInt> {
    let p = primitive(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => p.iter().map(|y| -y).collect(),
        _ => p,
    }
}

/// Positive integer multiple of a rational vector, made primitive.
pub fn rational_to_primitive(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    primitive(&ints)
}

pub fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().cloned().map(BigRational::from_integer).collect()
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn rank_int(rows: &[&[BigInt]]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.to_vec()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let (top, rest) = m.split_at_mut(rank + 1);
        let p = &top[rank];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            for c in col..ncols {
                row[c] = &row[c] * &p[col] - &a * &p[c];
            }
            *row = primitive(row);
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Reduced row echelon form over the rationals; returns nonzero rows and pivot columns.
pub fn rref(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][col].recip();
        for c in col..ncols {
            m[r][c] = &m[r][c] * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in col..ncols {
                    let t = &f * &m[r][c];
                    m[i][c] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank_rat(rows: &[Vec<BigRational>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : A x = 0}`.
pub fn kernel(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Orthogonal projection of `v` onto the orthogonal complement of the row space of `basis`.
pub fn project_out(v: &[BigRational], basis: &[Vec<BigRational>]) -> Vec<BigRational> {
    if basis.is_empty() {
        return v.to_vec();
    }
    // Gram system G c = B v, then v - B^T c.
    let k = basis.len();
    let mut aug: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k).map(|j| dot_rat(&basis[i], &basis[j])).collect();
            row.push(dot_rat(&basis[i], v));
            row
        })
        .collect();
    let (red, piv) = rref(&aug, k + 1);
    aug = red;
    let mut c = vec![BigRational::zero(); k];
    for (row, &p) in aug.iter().zip(&piv) {
        if p < k {
            c[p] = row[k].clone();
        }
    }
    let mut out = v.to_vec();
    for (ci, b) in c.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o -= ci * x;
        }
    }
    out
}

/// Primes up to and including `n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            (i * i..=n).step_by(i).for_each(|j| sieve[j] = false);
        }
        i += 1;
    }
    (0..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Prime factorization of a positive integer, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_square_free(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map_or(f64::NAN, |v| (v as f64).log2());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// An exact real number `sum_p c_p log2(p)` over primes `p` with rational `c_p`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogLinear {
    coeffs: BTreeMap<u64, BigRational>,
}

impl LogLinear {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c * log2(n)` for a positive integer `n`.
    pub fn log2_int(n: u64, c: BigRational) -> Self {
        assert!(n >= 1, "log of zero");
        let mut out = Self::zero();
        for (p, e) in factorize(n) {
            out.add_term(p, c.clone() * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// `log2(n!)`.
    pub fn log2_factorial(n: u64) -> Self {
        let mut out = Self::zero();
        for p in primes_up_to(n) {
            let mut e = 0u64;
            let mut q = p;
            while q <= n {
                e += n / q;
                q = match q.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
            out.add_term(p, BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    fn add_term(&mut self, p: u64, c: BigRational) {
        let entry = self.coeffs.entry(p).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&p);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, c) in &other.coeffs {
            out.add_term(p, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(&p, c)| (p, c * s)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> &BTreeMap<u64, BigRational> {
        &self.coeffs
    }

    pub fn to_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&p, c)| rational_to_f64(c) * (p as f64).log2())
            .sum()
    }

    /// Exact sign, decided by comparing two products of prime powers.
    pub fn sign(&self) -> Ordering {
        if self.coeffs.is_empty() {
            return Ordering::Equal;
        }
        let den = self
            .coeffs
            .values()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let mut pos = BigUint::one();
        let mut neg = BigUint::one();
        for (&p, c) in &self.coeffs {
            let e = (c * BigRational::from_integer(den.clone())).to_integer();
            let mag = e.magnitude().to_u32().expect("exponent too large");
            let term = BigUint::from(p).pow(mag);
            match e.sign() {
                Sign::Plus => pos *= term,
                Sign::Minus => neg *= term,
                Sign::NoSign => {}
            }
        }
        pos.cmp(&neg)
    }
}
