//! Permutations of `{1, ..., k}` (stored 0-based).

use itertools::Itertools;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Self { images: (0..k).collect() }
    }

    /// From 0-based images `i -> images[i]`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// From 1-based images, e.g. `[2, 1, 3]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidInput("symbols are 1-based".into()));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    /// Transposition of 1-based symbols `a` and `b` in `S_k`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > k || b > k {
            return Err(Error::InvalidInput(format!("({a} {b}) outside S_{k}")));
        }
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(a - 1, b - 1);
        Ok(Self { images })
    }

    /// Parse cycle notation such as `(1 3)(2 4)` or `()`; symbols are 1-based.
    pub fn parse_cycles(text: &str, k: usize) -> Result<Self> {
        let bad = || Error::Parse(format!("bad cycle notation {text:?}"));
        let mut images: Vec<usize> = (0..k).collect();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body_end = rest.find(')').ok_or_else(bad)?;
            if !rest.starts_with('(') {
                return Err(bad());
            }
            let body = &rest[1..body_end];
            let cycle: Vec<usize> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if cycle.iter().any(|&x| x == 0 || x > k) || !cycle.iter().all_unique() {
                return Err(bad());
            }
            // compose right-to-left: this cycle acts before the ones already read
            let mut cyc: Vec<usize> = (0..k).collect();
            for (i, &x) in cycle.iter().enumerate() {
                cyc[x - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
            images = (0..k).map(|i| images[cyc[i]]).collect();
            rest = rest[body_end + 1..].trim_start();
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Self { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// Image of a subset bitmask.
    pub fn apply_set(&self, s: usize) -> usize {
        (0..self.images.len())
            .filter(|&i| s >> i & 1 == 1)
            .fold(0, |acc, i| acc | 1 << self.images[i])
    }

    /// All permutations of `k` symbols in lexicographic order of images.
    pub fn all(k: usize) -> Vec<Self> {
        (0..k).permutations(k).map(|images| Self { images }).collect()
    }
}
