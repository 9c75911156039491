//! Subspace arrangements over prime fields and their rank vectors.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::entropy::{EntropyVector, JointDistribution};
use crate::error::{invalid, Error, Result};
use crate::exact::{factorize, LogLinear};
use crate::stabilizer::{stabilizer_entropy_exact, Submodule};
use crate::subset::{self, Subset};
use crate::zmod;

/// Largest joint table built by `rank_witness`.
pub const WITNESS_TABLE_CAP: usize = 1 << 20;
/// Largest ambient dimension for which `rank_witness` enumerates the dual space.
pub const WITNESS_MAX_DIM: usize = 12;

fn check_prime(p: u64) -> Result<()> {
    let f = factorize(p);
    if p < 2 || f.len() != 1 || f[0].1 != 1 {
        return invalid(format!("{p} is not prime"));
    }
    Ok(())
}

/// Reduced row echelon form over `F_p`, zero rows dropped.
pub fn rref_mod(rows: &[Vec<u64>], m: usize, p: u64) -> Vec<Vec<u64>> {
    let reduced: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    zmod::howell_form(&reduced, m, p)
}

pub fn rank_mod(rows: &[Vec<u64>], m: usize, p: u64) -> usize {
    rref_mod(rows, m, p).len()
}

/// `{v : v . w = 0 for all rows w}`.
pub fn annihilator(rows: &[Vec<u64>], m: usize, p: u64) -> Vec<Vec<u64>> {
    // left kernel of the transpose
    let t: Vec<Vec<u64>> = (0..m).map(|j| rows.iter().map(|r| r[j] % p).collect()).collect();
    if rows.is_empty() {
        return (0..m).map(|i| (0..m).map(|j| u64::from(i == j)).collect()).collect();
    }
    zmod::left_kernel(&t, rows.len(), p)
}

/// Intersection of two row spaces.
pub fn intersect(a: &[Vec<u64>], b: &[Vec<u64>], m: usize, p: u64) -> Vec<Vec<u64>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let stacked: Vec<Vec<u64>> = a.iter().chain(b.iter()).cloned().collect();
    let ker = zmod::left_kernel(&stacked, m, p);
    let vecs: Vec<Vec<u64>> = ker
        .iter()
        .map(|x| {
            (0..m)
                .map(|j| a.iter().enumerate().fold(0, |acc, (i, r)| (acc + x[i] * r[j]) % p))
                .collect()
        })
        .collect();
    rref_mod(&vecs, m, p)
}

/// `n` subspaces of `F_p^m`, each stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceFamily {
    p: u64,
    m: usize,
    subspaces: Vec<Vec<Vec<u64>>>,
}

impl SubspaceFamily {
    pub fn new(p: u64, m: usize, spanning: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        check_prime(p)?;
        if spanning.len() > subset::MAX_PARTIES {
            return invalid(format!("at most {} subspaces", subset::MAX_PARTIES));
        }
        let mut subspaces = Vec::with_capacity(spanning.len());
        for rows in &spanning {
            if let Some(r) = rows.iter().find(|r| r.len() != m) {
                return Err(Error::DimensionMismatch { expected: m, found: r.len() });
            }
            subspaces.push(rref_mod(rows, m, p));
        }
        Ok(Self { p, m, subspaces })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.subspaces.len()
    }

    pub fn subspaces(&self) -> &[Vec<Vec<u64>>] {
        &self.subspaces
    }

    /// Span of `U_i`, `i` in `s`.
    pub fn span(&self, s: Subset) -> Vec<Vec<u64>> {
        let rows: Vec<Vec<u64>> = subset::to_parties(s)
            .into_iter()
            .flat_map(|i| self.subspaces[i - 1].iter().cloned())
            .collect();
        rref_mod(&rows, self.m, self.p)
    }
}

/// `r_I = dim span U_I`, indexed by bitmask.
pub fn rank_vector(fam: &SubspaceFamily) -> Vec<i64> {
    let n = fam.n();
    let mut r = vec![0i64; 1 << n];
    for s in subset::nonempty(n) {
        r[s] = fam.span(s).len() as i64;
    }
    r
}

/// `log2(p) r` in bits.
pub fn rank_to_entropy(fam: &SubspaceFamily) -> Result<EntropyVector> {
    let lp = (fam.p as f64).log2();
    EntropyVector::from_entries(fam.n(), rank_vector(fam).iter().map(|&r| r as f64 * lp).collect())
}

/// Exact `log2(p) r`.
pub fn rank_to_entropy_exact(fam: &SubspaceFamily) -> Vec<LogLinear> {
    rank_vector(fam)
        .into_iter()
        .map(|r| LogLinear::log2_int(fam.p, BigRational::from_integer(BigInt::from(r))))
        .collect()
}

/// `X` uniform on `F_p^m`, `X_i = (X . u)_{u in basis U_i}`; `None` when the table would be too large.
pub fn rank_witness(fam: &SubspaceFamily) -> Result<Option<JointDistribution>> {
    if fam.n() == 0 || fam.m > WITNESS_MAX_DIM {
        return Ok(None);
    }
    let p = fam.p as usize;
    let mut dims = Vec::with_capacity(fam.n());
    let mut table = 1usize;
    for u in &fam.subspaces {
        let size = p.checked_pow(u.len() as u32);
        let Some(size) = size.filter(|&s| s <= WITNESS_TABLE_CAP) else {
            return Ok(None);
        };
        table = match table.checked_mul(size) {
            Some(t) if t <= WITNESS_TABLE_CAP => t,
            _ => return Ok(None),
        };
        dims.push(size);
    }
    let Some(count) = p.checked_pow(fam.m as u32) else {
        return Ok(None);
    };
    let mut counts = vec![0u64; table];
    let mut x = vec![0u64; fam.m];
    for _ in 0..count {
        let mut idx = 0usize;
        for (u, &dim) in fam.subspaces.iter().zip(&dims) {
            let mut letter = 0usize;
            for row in u {
                let v = row.iter().zip(&x).fold(0, |acc, (a, b)| (acc + a * b) % fam.p);
                letter = letter * p + v as usize;
            }
            idx = idx * dim + letter;
        }
        counts[idx] += 1;
        for k in (0..fam.m).rev() {
            x[k] += 1;
            if x[k] < fam.p {
                break;
            }
            x[k] = 0;
        }
    }
    let total = BigInt::from(count);
    let probs = counts
        .into_iter()
        .map(|c| BigRational::new(BigInt::from(c), total.clone()))
        .collect();
    JointDistribution::from_rationals(dims, probs).map(Some)
}

/// `V_i = W_i^o` for subspaces `W_i` of `F_p^m`.
pub fn annihilator_convert(p: u64, m: usize, w: &[Vec<Vec<u64>>]) -> Result<SubspaceFamily> {
    check_prime(p)?;
    let ann = w
        .iter()
        .map(|rows| {
            if let Some(r) = rows.iter().find(|r| r.len() != m) {
                return Err(Error::DimensionMismatch { expected: m, found: r.len() });
            }
            Ok(annihilator(rows, m, p))
        })
        .collect::<Result<Vec<_>>>()?;
    SubspaceFamily::new(p, m, ann)
}

/// `m - dim ∩_{i in I} W_i` for every nonempty `I`, computed by direct intersection.
pub fn intersection_codims(p: u64, m: usize, w: &[Vec<Vec<u64>>]) -> Result<Vec<i64>> {
    check_prime(p)?;
    let n = w.len();
    subset::check_parties(n)?;
    let spaces: Vec<Vec<Vec<u64>>> = w.iter().map(|rows| rref_mod(rows, m, p)).collect();
    let mut out = vec![0i64; 1 << n];
    for s in subset::nonempty(n) {
        let parties = subset::to_parties(s);
        let mut acc = spaces[parties[0] - 1].clone();
        for &i in &parties[1..] {
            acc = intersect(&acc, &spaces[i - 1], m, p);
        }
        out[s] = (m - acc.len()) as i64;
    }
    Ok(out)
}

/// `U_i = (ker pi_i ∩ M^omega)^o` inside `(M^omega)^*`, written in coordinates of a basis of `M^omega`.
pub fn stabilizer_rank_family(module: &Submodule) -> Result<SubspaceFamily> {
    let d = module.d();
    check_prime(d).map_err(|_| Error::InvalidInput(format!("stabilizer_rank_family needs prime d, got {d}")))?;
    module.require_isotropic()?;
    let space = module.space();
    let basis = module.symplectic_complement().rows().to_vec();
    let k = basis.len();
    let subspaces = (1..=space.n)
        .map(|party| {
            space
                .party_columns(party)
                .iter()
                .map(|&col| basis.iter().map(|b| b[col]).collect::<Vec<u64>>())
                .collect::<Vec<_>>()
        })
        .collect();
    SubspaceFamily::new(d, k, subspaces)
}

/// Checks `S(I) + |I| log2 d = log2(d) r_I` exactly for every `I`.
pub fn stabilizer_rank_identity(module: &Submodule) -> Result<bool> {
    let fam = stabilizer_rank_family(module)?;
    let s = stabilizer_entropy_exact(module)?;
    let r = rank_to_entropy_exact(&fam);
    let log_d = LogLinear::log2_int(module.d(), BigRational::one());
    Ok(subset::nonempty(module.n()).all(|i| {
        let size = BigRational::from_integer(BigInt::from(subset::size(i)));
        s.entries[i].add(&log_d.scale(&size)).sub(&r[i]).is_zero()
    }))
}

/// Reads `p m n`, then for each subspace a row count followed by that many rows of `m` entries.
pub fn parse_family(text: &str) -> Result<SubspaceFamily> {
    let mut tokens = text.split_whitespace().map(|t| {
        t.parse::<u64>().map_err(|_| Error::Parse(format!("expected a nonnegative integer, found {t:?}")))
    });
    let mut next = |what: &str| tokens.next().unwrap_or_else(|| Err(Error::Parse(format!("missing {what}"))));
    let p = next("p")?;
    let m = next("m")? as usize;
    let n = next("n")? as usize;
    subset::check_parties(n)?;
    let mut spaces = Vec::with_capacity(n);
    for i in 0..n {
        let rows = next(&format!("row count of subspace {}", i + 1))? as usize;
        let mut basis = Vec::with_capacity(rows);
        for _ in 0..rows {
            basis.push((0..m).map(|_| next("matrix entry")).collect::<Result<Vec<u64>>>()?);
        }
        spaces.push(basis);
    }
    if next("end of input").is_ok() {
        return Err(Error::Parse("trailing data after the last subspace".into()));
    }
    SubspaceFamily::new(p, m, spaces)
}

pub fn format_family(fam: &SubspaceFamily) -> String {
    let mut out = format!("{} {} {}\n", fam.p, fam.m, fam.n());
    for u in &fam.subspaces {
        let _ = writeln!(out, "{}", u.len());
        for row in u {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
    }
    out
}
