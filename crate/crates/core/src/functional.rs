//! Linear functionals on entropy space with exact rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::entropy::{EntropyVector, ExactEntropyVector};
use crate::error::{invalid, Error, Result};
use crate::exact::{format_rational, rational_to_f64, rational_to_primitive, LogLinear};
use crate::subset::{self, Subset};

/// `f = sum_I f_I e*_I`; the coefficient of the empty set is always zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Functional {
    n: usize,
    coeffs: Vec<BigRational>,
}

impl Functional {
    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: vec![BigRational::zero(); 1 << n] }
    }

    pub fn new(n: usize, coeffs: Vec<BigRational>) -> Result<Self> {
        subset::check_parties(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: coeffs.len() });
        }
        if !coeffs[0].is_zero() {
            return invalid("coefficient of the empty set must be 0");
        }
        Ok(Self { n, coeffs })
    }

    /// Sum of integer multiples of `e*_I`; terms on the empty set are dropped.
    pub fn from_terms(n: usize, terms: &[(Subset, i64)]) -> Self {
        let mut f = Self::zero(n);
        for &(s, c) in terms {
            f.add_coeff(s, &BigRational::from_integer(BigInt::from(c)));
        }
        f
    }

    /// Dual basis vector `e*_I`.
    pub fn unit(n: usize, s: Subset) -> Self {
        Self::from_terms(n, &[(s, 1)])
    }

    /// From the `2^n - 1` nonempty coordinates.
    pub fn from_nonempty(n: usize, coords: &[BigRational]) -> Result<Self> {
        let mut c = vec![BigRational::zero()];
        c.extend_from_slice(coords);
        Self::new(n, c)
    }

    pub fn from_nonempty_ints(n: usize, coords: &[BigInt]) -> Result<Self> {
        let r: Vec<BigRational> = coords.iter().cloned().map(BigRational::from_integer).collect();
        Self::from_nonempty(n, &r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn get(&self, s: Subset) -> &BigRational {
        &self.coeffs[s]
    }

    pub fn add_coeff(&mut self, s: Subset, c: &BigRational) {
        if s != 0 {
            self.coeffs[s] += c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "functionals on different spaces");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { n: self.n, coeffs }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::from_integer(1.into())))
    }

    /// Nonempty coordinates as a primitive integer vector (positive scaling).
    pub fn to_primitive(&self) -> Vec<BigInt> {
        rational_to_primitive(&self.coeffs[1..])
    }

    /// Same functional up to positive scaling.
    pub fn same_ray(&self, other: &Self) -> bool {
        self.n == other.n && self.to_primitive() == other.to_primitive()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: n });
        }
        Ok(())
    }

    pub fn evaluate(&self, v: &EntropyVector) -> Result<f64> {
        self.check(v.n())?;
        Ok(self
            .coeffs
            .iter()
            .zip(v.entries())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| rational_to_f64(c) * x)
            .sum())
    }

    /// Exact evaluation on a full table of `2^n` rationals.
    pub fn evaluate_exact(&self, v: &[BigRational]) -> Result<BigRational> {
        if v.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch { expected: self.coeffs.len(), found: v.len() });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(v)
            .filter(|(c, _)| !c.is_zero())
            .fold(BigRational::zero(), |acc, (c, x)| acc + c * x))
    }

    /// Exact evaluation on a vector of logarithms.
    pub fn evaluate_log(&self, v: &ExactEntropyVector) -> Result<LogLinear> {
        self.check(v.n)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&v.entries)
            .filter(|(c, _)| !c.is_zero())
            .fold(LogLinear::zero(), |acc, (c, x)| acc.add(&x.scale(c))))
    }

    /// Terms as `(subset, coefficient)` for nonzero coefficients.
    pub fn terms(&self) -> Vec<(Subset, &BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in terms.into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if k > 0 { "+ " } else { "" };
            let mag = c.abs();
            let coef = if mag == BigRational::from_integer(1.into()) { String::new() } else { format_rational(&mag) };
            if k > 0 {
                write!(f, " ")?;
            }
            let sign = if k > 0 && sign == "-" { "- " } else { sign };
            write!(f, "{sign}{coef}H({})", subset::label(s))?;
        }
        Ok(())
    }
}
