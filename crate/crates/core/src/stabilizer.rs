//! Finite symplectic phase spaces `Z_d^{2n}`, isotropic submodules and stabilizer states.
//!
//! Phase-space coordinates are ordered `p_1..p_n, q_1..q_n`. Party `i` owns the pair
//! `(p_i, q_i)`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::{EntropyVector, ExactEntropyVector, JointDistribution};
use crate::error::{invalid, Error, Result};
use crate::exact::{factorize, is_square_free, LogLinear};
use crate::quantum::{DensityMatrix, C64};
use crate::subset::{self, Subset};
use crate::weyl::{weyl_monomial, Monomial};
use crate::zmod;

/// Largest phase space enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 4096;
/// Default cap on the Hilbert-space dimension of the dense oracle.
pub const DENSE_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseSpace {
    pub n: usize,
    pub d: u64,
}

impl PhaseSpace {
    pub fn new(n: usize, d: u64) -> Result<Self> {
        subset::check_parties(n)?;
        if d < 2 {
            return invalid(format!("local dimension must be at least 2, got {d}"));
        }
        if d > u32::MAX as u64 {
            return invalid("local dimension too large");
        }
        Ok(Self { n, d })
    }

    pub fn rank(&self) -> usize {
        2 * self.n
    }

    /// `log2 |V| = 2n log2 d`, if it fits.
    pub fn size(&self) -> Option<u64> {
        self.d.checked_pow(2 * self.n as u32)
    }

    /// Columns `p_i, q_i` belonging to 1-based party `i`.
    pub fn party_columns(&self, party: usize) -> [usize; 2] {
        [party - 1, self.n + party - 1]
    }
}

/// `omega(v, w) = sum_i v_{p_i} w_{q_i} - v_{q_i} w_{p_i}` mod `d`.
pub fn symplectic_form(v: &[u64], w: &[u64], d: u64) -> u64 {
    let n = v.len() / 2;
    let mut acc: i128 = 0;
    for i in 0..n {
        acc += v[i] as i128 * w[n + i] as i128 - v[n + i] as i128 * w[i] as i128;
    }
    acc.rem_euclid(d as i128) as u64
}

/// Submodule of `Z_d^{2n}` in Howell normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Submodule {
    space: PhaseSpace,
    rows: Vec<Vec<u64>>,
}

impl PartialOrd for PhaseSpace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PhaseSpace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.d).cmp(&(other.n, other.d))
    }
}

impl Submodule {
    /// Canonical submodule spanned by `generators`; entries are reduced mod `d`.
    pub fn canonicalize(space: PhaseSpace, generators: &[Vec<u64>]) -> Result<Self> {
        for g in generators {
            if g.len() != space.rank() {
                return Err(Error::DimensionMismatch { expected: space.rank(), found: g.len() });
            }
        }
        Ok(Self { space, rows: zmod::howell_form(generators, space.rank(), space.d) })
    }

    /// Like [`canonicalize`](Self::canonicalize) but accepts signed integers.
    pub fn from_signed(space: PhaseSpace, generators: &[Vec<i64>]) -> Result<Self> {
        let d = space.d as i64;
        let rows: Vec<Vec<u64>> = generators
            .iter()
            .map(|r| r.iter().map(|&x| x.rem_euclid(d) as u64).collect())
            .collect();
        Self::canonicalize(space, &rows)
    }

    pub fn zero(space: PhaseSpace) -> Self {
        Self { space, rows: Vec::new() }
    }

    pub fn full(space: PhaseSpace) -> Self {
        let id: Vec<Vec<u64>> = (0..space.rank())
            .map(|i| (0..space.rank()).map(|j| u64::from(i == j)).collect())
            .collect();
        Self { space, rows: id }
    }

    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    pub fn d(&self) -> u64 {
        self.space.d
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    /// Rows of the Howell normal form.
    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn cardinality(&self) -> BigUint {
        zmod::cardinality(&self.rows, self.space.d)
    }

    /// `log2 |M|` as an exact logarithm.
    pub fn log2_cardinality(&self) -> LogLinear {
        zmod::pivot_orders(&self.rows, self.space.d)
            .into_iter()
            .fold(LogLinear::zero(), |acc, o| acc.add(&LogLinear::log2_int(o, BigRational::one())))
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        v.len() == self.space.rank() && zmod::contains(&self.rows, v, self.space.d)
    }

    pub fn is_submodule_of(&self, other: &Self) -> bool {
        self.space == other.space && self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return invalid("submodules live in different phase spaces");
        }
        let mut g = self.rows.clone();
        g.extend(other.rows.iter().cloned());
        Self::canonicalize(self.space, &g)
    }

    pub fn with_generator(&self, v: &[u64]) -> Result<Self> {
        let mut g = self.rows.clone();
        g.push(v.to_vec());
        Self::canonicalize(self.space, &g)
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        zmod::elements(&self.rows, self.space.rank(), self.space.d)
    }

    pub fn is_isotropic(&self) -> bool {
        let d = self.space.d;
        self.rows
            .iter()
            .enumerate()
            .all(|(i, a)| self.rows[i + 1..].iter().all(|b| symplectic_form(a, b, d) == 0))
    }

    /// `M^omega = {v : omega(m, v) = 0 for all m in M}`.
    pub fn symplectic_complement(&self) -> Self {
        let n = self.space.n;
        let d = self.space.d;
        let k = self.rows.len();
        if k == 0 {
            return Self::full(self.space);
        }
        // omega(g, v) = c_g . v with c_g[q_i] = g[p_i], c_g[p_i] = -g[q_i]
        let b: Vec<Vec<u64>> = (0..2 * n)
            .map(|coord| {
                self.rows
                    .iter()
                    .map(|g| if coord < n { (d - g[n + coord]) % d } else { g[coord - n] })
                    .collect()
            })
            .collect();
        Self { space: self.space, rows: zmod::left_kernel(&b, k, d) }
    }

    /// `M_I = M ∩ V_I`.
    pub fn restrict(&self, parties: Subset) -> Self {
        let n = self.space.n;
        let d = self.space.d;
        let full = subset::full(n);
        if parties & full == full {
            return self.clone();
        }
        if self.rows.is_empty() {
            return self.clone();
        }
        let outside = subset::complement(parties, n);
        let mut order: Vec<usize> = Vec::new();
        for p in subset::to_parties(outside) {
            order.extend(self.space.party_columns(p));
        }
        let n_out = order.len();
        for p in subset::to_parties(parties & full) {
            order.extend(self.space.party_columns(p));
        }
        let permuted: Vec<Vec<u64>> = self.rows.iter().map(|r| order.iter().map(|&c| r[c]).collect()).collect();
        let form = zmod::howell_form(&permuted, 2 * n, d);
        let kept: Vec<Vec<u64>> = form
            .into_iter()
            .filter(|r| r[..n_out].iter().all(|&x| x == 0))
            .map(|r| {
                let mut back = vec![0u64; 2 * n];
                for (pos, &c) in order.iter().enumerate() {
                    back[c] = r[pos];
                }
                back
            })
            .collect();
        Self { space: self.space, rows: zmod::howell_form(&kept, 2 * n, d) }
    }

    pub(crate) fn require_isotropic(&self) -> Result<()> {
        if self.is_isotropic() {
            Ok(())
        } else {
            Err(Error::NotIsotropic)
        }
    }
}

/// Exact stabilizer entropy vector, `S(I) = |I| log2 d - log2 |M_I|`.
pub fn stabilizer_entropy_exact(m: &Submodule) -> Result<ExactEntropyVector> {
    m.require_isotropic()?;
    let n = m.n();
    let log_d = LogLinear::log2_int(m.d(), BigRational::one());
    let mut entries = vec![LogLinear::zero(); 1 << n];
    for s in subset::nonempty(n) {
        let size = BigRational::from_integer((subset::size(s) as i64).into());
        entries[s] = log_d.scale(&size).sub(&m.restrict(s).log2_cardinality());
    }
    Ok(ExactEntropyVector { n, entries })
}

/// Stabilizer entropy vector in bits.
pub fn stabilizer_entropy_vector(m: &Submodule) -> Result<EntropyVector> {
    Ok(stabilizer_entropy_exact(m)?.to_float())
}

/// Exact entropy vector of the uniform distribution on `M^omega`, party `i` seeing `(p_i, q_i)`.
pub fn classical_model_exact(m: &Submodule) -> Result<ExactEntropyVector> {
    m.require_isotropic()?;
    let n = m.n();
    let comp = m.symplectic_complement();
    let total = comp.log2_cardinality();
    let mut entries = vec![LogLinear::zero(); 1 << n];
    for s in subset::nonempty(n) {
        let kernel = comp.restrict(subset::complement(s, n));
        entries[s] = total.sub(&kernel.log2_cardinality());
    }
    Ok(ExactEntropyVector { n, entries })
}

pub fn classical_model_vector(m: &Submodule) -> Result<EntropyVector> {
    Ok(classical_model_exact(m)?.to_float())
}

/// The uniform distribution on `M^omega` as an explicit joint distribution.
pub fn classical_model_distribution(m: &Submodule) -> Result<JointDistribution> {
    m.require_isotropic()?;
    let n = m.n();
    let d = m.d() as usize;
    let dims = vec![d * d; n];
    let elems = m.symplectic_complement().elements();
    let outcomes: Vec<Vec<usize>> = elems
        .iter()
        .map(|v| (0..n).map(|i| v[i] as usize * d + v[n + i] as usize).collect())
        .collect();
    JointDistribution::uniform_on(dims, &outcomes)
}

/// Split a module over square-free `d = p_1 ... p_k` into its reductions mod each `p_i`.
pub fn crt_decompose(m: &Submodule) -> Result<Vec<Submodule>> {
    let d = m.d();
    if !is_square_free(d) {
        return Err(Error::NotSquareFree(d));
    }
    let primes: Vec<u64> = factorize(d).into_iter().map(|(p, _)| p).collect();
    let mut parts = Vec::with_capacity(primes.len());
    for &p in &primes {
        let space = PhaseSpace::new(m.n(), p)?;
        let rows: Vec<Vec<u64>> = m.rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
        parts.push(Submodule::canonicalize(space, &rows)?);
    }
    // reconstruction: sum of e_i * lift(M_i) with CRT idempotents e_i
    let mut gens = Vec::new();
    for (part, &p) in parts.iter().zip(&primes) {
        let e = crt_idempotent(p, d);
        for r in &part.rows {
            gens.push(r.iter().map(|&x| ((x as u128 * e as u128) % d as u128) as u64).collect());
        }
    }
    let rebuilt = Submodule::canonicalize(m.space(), &gens)?;
    if rebuilt != *m {
        return Err(Error::InvalidInput("CRT reconstruction failed".into()));
    }
    Ok(parts)
}

/// The `e` with `e = 1 mod p` and `e = 0 mod d/p`.
fn crt_idempotent(p: u64, d: u64) -> u64 {
    let r = d / p;
    (0..d).step_by(r as usize).find(|e| e % p == 1).expect("coprime factors")
}

/// Result of [`enumerate_isotropic`].
#[derive(Clone, Debug)]
pub struct IsotropicEnumeration {
    pub modules: Vec<Submodule>,
    pub exhaustive: bool,
    pub truncated: bool,
}

/// Isotropic submodules in lexicographic order of their canonical forms.
///
/// Exhaustive when `d^{2n} <= 4096`, otherwise a seeded random sample grown one
/// generator at a time.
pub fn enumerate_isotropic(space: PhaseSpace, budget: usize, seed: u64) -> IsotropicEnumeration {
    let exhaustive = space.size().is_some_and(|s| s <= EXHAUSTIVE_LIMIT);
    let mut found: BTreeSet<Submodule> = BTreeSet::new();
    if budget == 0 {
        return IsotropicEnumeration { modules: Vec::new(), exhaustive, truncated: true };
    }
    if exhaustive {
        let zero = Submodule::zero(space);
        let mut queue = VecDeque::from([zero.clone()]);
        found.insert(zero);
        while let Some(m) = queue.pop_front() {
            let mut local: HashSet<Submodule> = HashSet::new();
            for v in m.symplectic_complement().elements() {
                if m.contains(&v) {
                    continue;
                }
                let next = m.with_generator(&v).expect("same space");
                if local.insert(next.clone()) && found.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        found.insert(Submodule::zero(space));
        let max_attempts = budget.saturating_mul(50).max(100);
        for _ in 0..max_attempts {
            if found.len() > budget {
                break;
            }
            let mut m = Submodule::zero(space);
            loop {
                let comp = m.symplectic_complement();
                if comp == m {
                    break;
                }
                let v = random_element(&comp, &mut rng);
                if m.contains(&v) {
                    continue;
                }
                m = m.with_generator(&v).expect("same space");
                found.insert(m.clone());
                if rng.gen_bool(0.3) {
                    break;
                }
            }
        }
    }
    let truncated = found.len() > budget;
    IsotropicEnumeration { modules: found.into_iter().take(budget).collect(), exhaustive, truncated }
}

fn random_element<R: Rng>(m: &Submodule, rng: &mut R) -> Vec<u64> {
    let d = m.d();
    let orders = zmod::pivot_orders(&m.rows, d);
    let mut v = vec![0u64; m.space.rank()];
    for (row, o) in m.rows.iter().zip(orders) {
        let c = rng.gen_range(0..o);
        for (x, &r) in v.iter_mut().zip(row) {
            *x = ((*x as u128 + c as u128 * r as u128) % d as u128) as u64;
        }
    }
    v
}

/// Dense stabilizer state `d^{-n} sum_{m in M} mu_m w(m)` for isotropic `M`.
///
/// For even `d` the phases `mu` of the generators are searched over `{1, i, -1, -i}`.
pub fn stabilizer_state_dense(m: &Submodule, cap: usize) -> Result<DensityMatrix> {
    m.require_isotropic()?;
    let n = m.n();
    let d = m.d();
    let size = (d as usize)
        .checked_pow(n as u32)
        .filter(|&s| s <= cap)
        .ok_or_else(|| Error::ResourceLimit(format!("d^n exceeds dense cap {cap}")))?;
    let gens: Vec<Monomial> = m.rows.iter().map(|r| weyl_monomial(d, r)).collect::<Result<_>>()?;
    let choices: Vec<u64> = if d.is_multiple_of(2) { (0..4).map(|k| k * d / 2).collect() } else { vec![0] };
    let mut group: HashMap<Vec<u64>, Monomial> = HashMap::new();
    group.insert(vec![0; 2 * n], Monomial::identity(d, size));
    let expected = m.cardinality().to_usize().unwrap_or(usize::MAX);
    let mut found = None;
    search_phases(m, &gens, &choices, 0, group, expected, &mut |g| {
        let rho = dense_from_group(g, size, n, d);
        let ok = projector_check(&rho, expected, size);
        if ok {
            found = Some(rho);
        }
        ok
    });
    match found {
        Some(mat) => DensityMatrix::new(vec![d as usize; n], mat),
        None => Err(Error::ResourceLimit("no consistent phase assignment found".into())),
    }
}

fn search_phases(
    m: &Submodule,
    gens: &[Monomial],
    choices: &[u64],
    j: usize,
    group: HashMap<Vec<u64>, Monomial>,
    expected: usize,
    accept: &mut dyn FnMut(&HashMap<Vec<u64>, Monomial>) -> bool,
) -> bool {
    if j == gens.len() {
        return group.len() == expected && accept(&group);
    }
    let d = m.d();
    let key_j = &m.rows[j];
    for &ph in choices {
        let g = gens[j].times_phase(ph);
        if let Some(next) = extend_group(&group, &g, key_j, d) {
            if search_phases(m, gens, choices, j + 1, next, expected, accept) {
                return true;
            }
        }
    }
    false
}

/// Close an abelian group of phased Weyl operators under one more generator.
fn extend_group(
    group: &HashMap<Vec<u64>, Monomial>,
    g: &Monomial,
    key: &[u64],
    d: u64,
) -> Option<HashMap<Vec<u64>, Monomial>> {
    let add = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).map(|(x, y)| (x + y) % d).collect() };
    let mut powers = Vec::new();
    let mut pk = key.to_vec();
    let mut pw = g.clone();
    while !group.contains_key(&pk) {
        powers.push((pk.clone(), pw.clone()));
        pk = add(&pk, key);
        pw = pw.mul(g);
    }
    if group[&pk] != pw {
        return None;
    }
    let mut next = group.clone();
    for (k, h) in group {
        for (pk, pw) in &powers {
            next.insert(add(k, pk), h.mul(pw));
        }
    }
    Some(next)
}

fn dense_from_group(group: &HashMap<Vec<u64>, Monomial>, size: usize, n: usize, d: u64) -> DMatrix<C64> {
    let mut acc = DMatrix::<C64>::zeros(size, size);
    for g in group.values() {
        g.add_to(&mut acc);
    }
    acc / C64::new((d as f64).powi(n as i32), 0.0)
}

fn projector_check(rho: &DMatrix<C64>, card: usize, size: usize) -> bool {
    let scale = card as f64 / size as f64;
    let sq = rho * rho;
    let dev = (&sq - rho * C64::new(scale, 0.0)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > 1e-9 {
        return false;
    }
    let min = rho.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    min >= -1e-9
}

/// Parse the submodule text format: a `d n` header line followed by rows of `2n` integers.
pub fn parse_submodule(text: &str) -> Result<Submodule> {
    let (space, rows) = parse_generators(text)?;
    Submodule::from_signed(space, &rows)
}

/// Header and raw generator rows of the submodule text format.
pub fn parse_generators(text: &str) -> Result<(PhaseSpace, Vec<Vec<i64>>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty submodule file".into()))?;
    let nums: Vec<u64> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
        .collect::<Result<_>>()?;
    let [d, n] = nums[..] else {
        return Err(Error::Parse(format!("header must be `d n`, got {header:?}")));
    };
    let space = PhaseSpace::new(n as usize, d)?;
    let mut rows = Vec::new();
    for line in lines {
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad row {line:?}"))))
            .collect::<Result<_>>()?;
        if row.len() != space.rank() {
            return Err(Error::Parse(format!("row {line:?} must have {} entries", space.rank())));
        }
        rows.push(row);
    }
    Ok((space, rows))
}

/// First pair `(i, j)`, `i < j`, of generators with nonzero symplectic form.
pub fn isotropy_violation(space: PhaseSpace, rows: &[Vec<i64>]) -> Option<(usize, usize)> {
    let d = space.d as i64;
    let reduced: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x.rem_euclid(d) as u64).collect()).collect();
    (0..reduced.len())
        .flat_map(|i| (i + 1..reduced.len()).map(move |j| (i, j)))
        .find(|&(i, j)| symplectic_form(&reduced[i], &reduced[j], space.d) != 0)
}

pub fn format_submodule(m: &Submodule) -> String {
    let mut out = format!("{} {}\n", m.d(), m.n());
    for r in &m.rows {
        let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Entropy vectors `|I| log2 d` of the maximally mixed state, as a sanity reference.
pub fn maximally_mixed_vector(space: PhaseSpace) -> EntropyVector {
    let log_d = (space.d as f64).log2();
    let entries = (0..1usize << space.n).map(|s| subset::size(s) as f64 * log_d).collect();
    EntropyVector::from_entries(space.n, entries).expect("valid size")
}

impl Submodule {
    /// True when `M = M^omega`.
    pub fn is_lagrangian(&self) -> bool {
        self.is_isotropic() && self.cardinality() * self.cardinality() == BigUint::from(self.space.d).pow(self.space.rank() as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty() || self.cardinality().is_zero()
    }
}
