//! Entropy vectors and classical (Shannon) entropy.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::{rational_to_f64, LogLinear};
use crate::subset::{self, Subset};

/// Point in entropy space: one entry per subset of `[n]`, in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyVector {
    n: usize,
    entries: Vec<f64>,
}

impl EntropyVector {
    /// `n = 0` gives the one-entry vector of the empty system.
    pub fn zeros(n: usize) -> Result<Self> {
        if n > 0 {
            subset::check_parties(n)?;
        }
        Ok(Self { n, entries: vec![0.0; 1 << n] })
    }

    /// Build from a full table of `2^n` entries; entry 0 must be zero.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n > 0 {
            subset::check_parties(n)?;
        }
        if entries.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: entries.len() });
        }
        if entries[0] != 0.0 {
            return invalid("entropy of the empty set must be 0");
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return invalid("entropy entries must be finite");
        }
        Ok(Self { n, entries })
    }

    /// Build from the `2^n - 1` nonempty coordinates in mask order.
    pub fn from_nonempty(n: usize, coords: &[f64]) -> Result<Self> {
        let mut e = vec![0.0];
        e.extend_from_slice(coords);
        Self::from_entries(n, e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, s: Subset) -> f64 {
        self.entries[s]
    }

    pub fn set(&mut self, s: Subset, value: f64) {
        if s != 0 {
            self.entries[s] = value;
        }
    }

    pub fn nonempty_coords(&self) -> &[f64] {
        &self.entries[1..]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let e = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { n: self.n, entries: e })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|x| x * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }
}

/// Entropy vector with exact entries of the form `sum_p c_p log2 p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactEntropyVector {
    pub n: usize,
    pub entries: Vec<LogLinear>,
}

impl ExactEntropyVector {
    pub fn to_float(&self) -> EntropyVector {
        EntropyVector {
            n: self.n,
            entries: self.entries.iter().map(|e| e.to_f64()).collect(),
        }
    }
}

/// Probability table entries, either exact or floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum Probabilities {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Probabilities {
    pub fn len(&self) -> usize {
        match self {
            Self::Exact(v) => v.len(),
            Self::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Self::Exact(v) => v.iter().map(rational_to_f64).collect(),
            Self::Float(v) => v.clone(),
        }
    }
}

/// Normalization tolerance for floating point tables.
pub const FLOAT_NORM_TOL: f64 = 1e-12;

/// Joint distribution of `n` discrete random variables; row-major, last party fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    dims: Vec<usize>,
    probs: Probabilities,
}

impl JointDistribution {
    pub fn new(dims: Vec<usize>, probs: Probabilities) -> Result<Self> {
        if dims.contains(&0) {
            return invalid("alphabet sizes must be positive");
        }
        let size: usize = dims.iter().product();
        if probs.len() != size {
            return Err(Error::DimensionMismatch { expected: size, found: probs.len() });
        }
        match &probs {
            Probabilities::Exact(v) => {
                if let Some(x) = v.iter().find(|x| x.is_negative()) {
                    return Err(Error::NegativeProbability(rational_to_f64(x)));
                }
                let total: BigRational = v.iter().fold(BigRational::zero(), |a, b| a + b);
                if !total.is_one() {
                    return Err(Error::NotNormalized(rational_to_f64(&total)));
                }
            }
            Probabilities::Float(v) => check_float_distribution(v)?,
        }
        Ok(Self { dims, probs })
    }

    pub fn from_f64(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        Self::new(dims, Probabilities::Float(probs))
    }

    pub fn from_rationals(dims: Vec<usize>, probs: Vec<BigRational>) -> Result<Self> {
        Self::new(dims, Probabilities::Exact(probs))
    }

    /// Uniform distribution on the listed outcomes (each a tuple of letters).
    pub fn uniform_on(dims: Vec<usize>, outcomes: &[Vec<usize>]) -> Result<Self> {
        if outcomes.is_empty() {
            return invalid("empty support");
        }
        let size: usize = dims.iter().product();
        let mut probs = vec![BigRational::zero(); size];
        let w = BigRational::new(BigInt::one(), BigInt::from(outcomes.len()));
        for o in outcomes {
            let idx = flat_index(&dims, o)?;
            probs[idx] += &w;
        }
        Self::from_rationals(dims, probs)
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &Probabilities {
        &self.probs
    }

    /// Marginal on the parties in `keep`, listed in increasing order.
    pub fn marginalize(&self, keep: Subset) -> Result<Self> {
        let n = self.n_parties();
        if keep >> n != 0 {
            return invalid(format!("subset {} outside [{n}]", subset::label(keep)));
        }
        let (mdims, map) = marginal_map(&self.dims, keep);
        let size: usize = mdims.iter().product();
        let probs = match &self.probs {
            Probabilities::Exact(v) => {
                let mut out = vec![BigRational::zero(); size];
                for (x, p) in v.iter().enumerate() {
                    out[map[x]] += p;
                }
                Probabilities::Exact(out)
            }
            Probabilities::Float(v) => {
                let mut out = vec![0.0; size];
                for (x, p) in v.iter().enumerate() {
                    out[map[x]] += p;
                }
                Probabilities::Float(out)
            }
        };
        Ok(Self { dims: mdims, probs })
    }

    /// Product distribution; parties of `self` come first.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let probs = match (&self.probs, &other.probs) {
            (Probabilities::Exact(a), Probabilities::Exact(b)) => Probabilities::Exact(
                a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect(),
            ),
            _ => {
                let (a, b) = (self.probs.to_f64(), other.probs.to_f64());
                Probabilities::Float(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
            }
        };
        Self { dims, probs }
    }
}

/// Row-major index of a tuple of letters.
pub fn flat_index(dims: &[usize], letters: &[usize]) -> Result<usize> {
    if letters.len() != dims.len() {
        return Err(Error::DimensionMismatch { expected: dims.len(), found: letters.len() });
    }
    let mut idx = 0;
    for (&d, &x) in dims.iter().zip(letters) {
        if x >= d {
            return invalid(format!("letter {x} outside alphabet of size {d}"));
        }
        idx = idx * d + x;
    }
    Ok(idx)
}

/// Letters of a row-major index.
pub fn letters_of(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

/// Dimensions of the kept parties and, for each full index, its marginal index.
pub(crate) fn marginal_map(dims: &[usize], keep: Subset) -> (Vec<usize>, Vec<usize>) {
    let n = dims.len();
    let kept: Vec<usize> = (0..n).filter(|&i| keep >> i & 1 == 1).collect();
    let mdims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let size: usize = dims.iter().product();
    let mut map = Vec::with_capacity(size);
    let mut letters = vec![0usize; n];
    for _ in 0..size {
        let mut m = 0;
        for &i in &kept {
            m = m * dims[i] + letters[i];
        }
        map.push(m);
        for k in (0..n).rev() {
            letters[k] += 1;
            if letters[k] < dims[k] {
                break;
            }
            letters[k] = 0;
        }
    }
    (mdims, map)
}

fn check_float_distribution(p: &[f64]) -> Result<()> {
    if let Some(&x) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::NegativeProbability(x));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > FLOAT_NORM_TOL {
        return Err(Error::NotNormalized(total));
    }
    Ok(())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_float_distribution(p)?;
    Ok(shannon_unchecked(p))
}

pub(crate) fn shannon_unchecked(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    h.max(0.0)
}

/// Classical entropy vector `(H(X_I))_I`.
pub fn entropy_vector_classical(joint: &JointDistribution) -> Result<EntropyVector> {
    let n = joint.n_parties();
    subset::check_parties(n)?;
    let p = joint.probs.to_f64();
    let mut entries = vec![0.0; 1 << n];
    for s in subset::nonempty(n) {
        let (mdims, map) = marginal_map(&joint.dims, s);
        let mut m = vec![0.0; mdims.iter().product()];
        for (x, &px) in p.iter().enumerate() {
            m[map[x]] += px;
        }
        entries[s] = shannon_unchecked(&m);
    }
    EntropyVector::from_entries(n, entries)
}
