//! Weyl operators on `(C^d)^{⊗n}` as monomial matrices with exact phases.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quantum::C64;

/// Matrix with a single nonzero entry `exp(2 pi i phase[y] / (2d))` in each column `y`,
/// located at row `perm[y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub d: u64,
    pub perm: Vec<usize>,
    pub phase: Vec<u64>,
}

impl Monomial {
    pub fn identity(d: u64, size: usize) -> Self {
        Self { d, perm: (0..size).collect(), phase: vec![0; size] }
    }

    fn modulus(&self) -> u64 {
        2 * self.d
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus();
        let perm = other.perm.iter().map(|&r| self.perm[r]).collect();
        let phase = other
            .perm
            .iter()
            .zip(&other.phase)
            .map(|(&r, &p)| (self.phase[r] + p) % m)
            .collect();
        Self { d: self.d, perm, phase }
    }

    /// Multiply by the global phase `exp(2 pi i k / (2d))`.
    pub fn times_phase(&self, k: u64) -> Self {
        let m = self.modulus();
        Self {
            d: self.d,
            perm: self.perm.clone(),
            phase: self.phase.iter().map(|&p| (p + k) % m).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let m = self.modulus();
        let n2 = other.perm.len();
        let size = self.perm.len() * n2;
        let mut perm = Vec::with_capacity(size);
        let mut phase = Vec::with_capacity(size);
        for y1 in 0..self.perm.len() {
            for y2 in 0..n2 {
                perm.push(self.perm[y1] * n2 + other.perm[y2]);
                phase.push((self.phase[y1] + other.phase[y2]) % m);
            }
        }
        Self { d: self.d, perm, phase }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.phase.iter().all(|&p| p == 0)
    }

    pub fn trace(&self) -> C64 {
        let m = self.modulus() as f64;
        self.perm
            .iter()
            .enumerate()
            .filter(|(i, &p)| *i == p)
            .map(|(i, _)| C64::from_polar(1.0, 2.0 * PI * self.phase[i] as f64 / m))
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let size = self.perm.len();
        let m = self.modulus() as f64;
        let mut out = DMatrix::zeros(size, size);
        for y in 0..size {
            out[(self.perm[y], y)] = C64::from_polar(1.0, 2.0 * PI * self.phase[y] as f64 / m);
        }
        out
    }

    /// Add this operator to a dense accumulator.
    pub fn add_to(&self, acc: &mut DMatrix<C64>) {
        let m = self.modulus() as f64;
        for (y, (&r, &p)) in self.perm.iter().zip(&self.phase).enumerate() {
            acc[(r, y)] += C64::from_polar(1.0, 2.0 * PI * p as f64 / m);
        }
    }
}

/// Single-site operator `W(P, Q)` for representatives `0 <= P, Q < d`.
fn weyl_site(d: u64, p: u64, q: u64) -> Monomial {
    let m = 2 * d;
    let d2p1 = (d * d + 1) % m;
    // tau_{2d}(-PQ) = exp(2 pi i (d^2+1)(-PQ) / 2d)
    let tau = (m - (d2p1 * ((p * q) % m)) % m) % m;
    let size = d as usize;
    let mut perm = Vec::with_capacity(size);
    let mut phase = Vec::with_capacity(size);
    for y in 0..d {
        let x = (y + q) % d;
        perm.push(x as usize);
        // chi_d(P x) = exp(2 pi i 2 P x / 2d)
        phase.push((tau + 2 * ((p * x) % d)) % m);
    }
    Monomial { d, perm, phase }
}

/// `w(v) = ⊗_i w(p_i, q_i)` for `v = (p_1..p_n, q_1..q_n)`.
pub fn weyl_monomial(d: u64, v: &[u64]) -> Result<Monomial> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("local dimension must be at least 2, got {d}")));
    }
    if !v.len().is_multiple_of(2) || v.is_empty() {
        return Err(Error::InvalidInput("phase-space point must have even positive length".into()));
    }
    let n = v.len() / 2;
    let mut out = weyl_site(d, v[0] % d, v[n] % d);
    for i in 1..n {
        out = out.kron(&weyl_site(d, v[i] % d, v[n + i] % d));
    }
    Ok(out)
}

/// Dense Weyl operator.
pub fn weyl_operator(d: u64, v: &[u64]) -> Result<DMatrix<C64>> {
    Ok(weyl_monomial(d, v)?.to_dense())
}
