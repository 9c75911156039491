//! Subsets of parties `[n] = {1, ..., n}` encoded as bitmasks.
//!
//! Party `i` corresponds to bit `i - 1`, the empty set is `0`.

use crate::error::{invalid, Result};

pub type Subset = usize;

/// Largest number of parties supported by dense entropy vectors.
pub const MAX_PARTIES: usize = 16;

pub fn full(n: usize) -> Subset {
    (1usize << n) - 1
}

pub fn complement(s: Subset, n: usize) -> Subset {
    full(n) & !s
}

pub fn contains(s: Subset, party: usize) -> bool {
    party >= 1 && s & (1 << (party - 1)) != 0
}

pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

pub fn size(s: Subset) -> usize {
    s.count_ones() as usize
}

pub fn singleton(party: usize) -> Subset {
    1 << (party - 1)
}

/// Build a mask from 1-based party labels.
pub fn from_parties(parties: &[usize], n: usize) -> Result<Subset> {
    let mut s = 0;
    for &p in parties {
        if p == 0 || p > n {
            return invalid(format!("party {p} outside 1..={n}"));
        }
        s |= singleton(p);
    }
    Ok(s)
}

/// 1-based party labels in increasing order.
pub fn to_parties(s: Subset) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|b| s >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Comma-separated label, `""` for the empty set.
pub fn label(s: Subset) -> String {
    to_parties(s)
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Compact label used in inequality names, e.g. `{1,3}`.
pub fn brace_label(s: Subset) -> String {
    format!("{{{}}}", label(s))
}

pub fn parse_label(text: &str, n: usize) -> Result<Subset> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(0);
    }
    let mut parties = Vec::new();
    for tok in text.split(',') {
        let p: usize = tok
            .trim()
            .parse()
            .map_err(|_| crate::Error::Parse(format!("bad subset label {text:?}")))?;
        parties.push(p);
    }
    from_parties(&parties, n)
}

/// Nonempty subsets of `[n]` in increasing mask order.
pub fn nonempty(n: usize) -> impl Iterator<Item = Subset> {
    1..=full(n)
}

/// All subsets of `s` (including `0` and `s`), in increasing order.
pub fn subsets_of(s: Subset) -> Vec<Subset> {
    let mut out = Vec::with_capacity(1 << size(s));
    let mut t = 0usize;
    loop {
        out.push(t);
        if t == s {
            break;
        }
        t = (t.wrapping_sub(s)) & s;
    }
    out
}

pub fn check_parties(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PARTIES {
        return invalid(format!("number of parties must be in 1..={MAX_PARTIES}, got {n}"));
    }
    Ok(())
}
