//! Flat spectra, entropy differentials and the extremal-ray trichotomy.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::entropy::{entropy_vector_classical, letters_of, marginal_map, shannon_unchecked, JointDistribution, Probabilities};
use crate::error::{invalid, Result};
use crate::exact::rational_to_f64;
use crate::quantum::{canonical_eigen, fix_phase, partial_trace, split_indices, DensityMatrix, PureState, C64};
use crate::subset::{self, Subset};

/// Default flatness tolerance, relative to the largest eigenvalue.
pub const FLAT_TOL: f64 = 1e-8;
/// Step for central finite differences.
pub const FD_STEP: f64 = 1e-5;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Whether the nonzero part of `spectrum` is uniform, and the number of nonzero levels.
///
/// Entries at or below `tol * max` count as zero; the rest must agree within `tol * max`.
pub fn is_flat(spectrum: &[f64], tol: f64) -> (bool, usize) {
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return (false, 0);
    }
    let cut = tol * top;
    let nonzero: Vec<f64> = spectrum.iter().copied().filter(|&x| x > cut).collect();
    let low = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
    (top - low <= cut, nonzero.len())
}

fn has_repeated_level(spectrum: &[f64], tol: f64) -> bool {
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    let mut nz: Vec<f64> = spectrum.iter().copied().filter(|&x| x > tol * top).collect();
    nz.sort_by(|a, b| b.total_cmp(a));
    nz.windows(2).any(|w| w[0] - w[1] <= tol * top)
}

#[derive(Clone, Debug)]
pub struct SchmidtData {
    pub subset: Subset,
    /// Squared coefficients, descending.
    pub coefficients: Vec<f64>,
    /// Vectors on the parties in `subset`.
    pub left: Vec<DVector<C64>>,
    /// Vectors on the complementary parties.
    pub right: Vec<DVector<C64>>,
}

impl SchmidtData {
    /// `sum_a sqrt(p_a) left_a (x) right_a` in the layout of `PureState::reshape`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let (dk, dt) = (self.left[0].len(), self.right[0].len());
        let mut m = DMatrix::<C64>::zeros(dk, dt);
        for ((p, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            m += l * r.transpose() * c(p.sqrt());
        }
        m
    }
}

/// Schmidt decomposition across `keep | keep^c`.
pub fn schmidt_decompose(psi: &PureState, keep: Subset) -> Result<SchmidtData> {
    let n = psi.n_parties();
    if keep == 0 || keep >> n != 0 || keep == subset::full(n) {
        return invalid(format!("Schmidt decomposition needs a proper nonempty subset, got {}", subset::brace_label(keep)));
    }
    let m = psi.reshape(keep);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut out = SchmidtData { subset: keep, coefficients: Vec::new(), left: Vec::new(), right: Vec::new() };
    for k in order {
        let s = svd.singular_values[k];
        let l: DVector<C64> = u.column(k).into_owned();
        let fixed = fix_phase(l.clone());
        // fixed = l * ph with |ph| = 1; compensate on the right
        let ph = l.dotc(&fixed);
        let r: DVector<C64> = vt.row(k).transpose() * ph.conj();
        out.coefficients.push(s * s);
        out.left.push(fixed);
        out.right.push(r);
    }
    Ok(out)
}

/// Status of one differential row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Flat,
    Regular,
    /// Repeated nonzero eigenvalue in a non-flat spectrum; first-order formula not used.
    Degenerate,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Flat => "flat",
            RowStatus::Regular => "regular",
            RowStatus::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DifferentialRow {
    pub subset: Subset,
    pub status: RowStatus,
    pub spectrum: Vec<f64>,
    pub entropy: f64,
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Some nontrivial entropy vanishes.
    Splits { subset: Subset },
    /// All nontrivial entropies equal `ratio`.
    Exceptional { ratio: f64 },
    AllFlat,
    NotCandidate { non_flat: Subset },
}

impl Verdict {
    pub fn code(&self) -> Option<u8> {
        match self {
            Verdict::Splits { .. } => Some(1),
            Verdict::Exceptional { .. } => Some(2),
            Verdict::AllFlat => Some(3),
            Verdict::NotCandidate { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Splits { .. } => "splits",
            Verdict::Exceptional { .. } => "exceptional",
            Verdict::AllFlat => "all-flat",
            Verdict::NotCandidate { .. } => "not-extremal-candidate",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DifferentialReport {
    /// Real tangent directions; for quantum reports these are vectors orthogonal to the state,
    /// for classical reports each column is `e_x - e_y` given by `pairs`.
    pub basis: Vec<DVector<C64>>,
    pub pairs: Vec<(usize, usize)>,
    pub rows: Vec<DifferentialRow>,
    /// `None` when some row is degenerate.
    pub rank: Option<usize>,
    pub verdict: Verdict,
}

impl DifferentialReport {
    pub fn columns(&self) -> usize {
        self.basis.len().max(self.pairs.len())
    }

    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.values.as_ref())
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row(&self, s: Subset) -> Option<&DifferentialRow> {
        self.rows.iter().find(|r| r.subset == s)
    }
}

fn real_inner(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.dotc(b).re
}

/// Real orthonormal basis of `{phi : <psi|phi> = 0}` starting from Schmidt-pair directions for party 1.
pub fn tangent_basis(psi: &PureState) -> Result<Vec<DVector<C64>>> {
    let amp = psi.amplitudes();
    let dim = amp.len();
    let target = 2 * (dim - 1);
    let mut seeds: Vec<DVector<C64>> = Vec::new();
    if psi.n_parties() >= 2 {
        let sd = schmidt_decompose(psi, subset::singleton(1))?;
        let (_, _, table) = split_indices(psi.dims(), subset::singleton(1));
        let embed = |l: &DVector<C64>, r: &DVector<C64>| {
            let mut v = DVector::<C64>::zeros(dim);
            for (t, row) in table.iter().enumerate() {
                for (a, &x) in row.iter().enumerate() {
                    v[x] = l[a] * r[t];
                }
            }
            v
        };
        let live: Vec<usize> = (0..sd.coefficients.len()).filter(|&k| sd.coefficients[k] > 1e-12).collect();
        for (i, &b) in live.iter().enumerate() {
            for &g in &live[i + 1..] {
                let phi = embed(&sd.left[b], &sd.right[b]) * c(sd.coefficients[g].sqrt())
                    - embed(&sd.left[g], &sd.right[g]) * c(sd.coefficients[b].sqrt());
                seeds.push(phi.clone());
                seeds.push(phi * C64::i());
            }
        }
    }
    for k in 0..dim {
        let mut e = DVector::<C64>::zeros(dim);
        e[k] = c(1.0);
        seeds.push(e.clone());
        seeds.push(e * C64::i());
    }
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(target);
    for s in seeds {
        if basis.len() == target {
            break;
        }
        let mut w = &s - amp * amp.dotc(&s);
        for b in &basis {
            let proj = real_inner(b, &w);
            w -= b * c(proj);
        }
        let nrm = w.norm();
        if nrm > 1e-8 {
            basis.push(w / c(nrm));
        }
    }
    Ok(basis)
}

fn log_weights(spectrum: &[f64], tol: f64) -> Vec<f64> {
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    spectrum.iter().map(|&p| if p > tol * top { p.log2() } else { 0.0 }).collect()
}

/// Analytic `(d s_I)_psi(phi)` in bits, with `phi` projected onto the tangent space first.
pub fn directional_derivative(psi: &PureState, keep: Subset, phi: &DVector<C64>) -> Result<f64> {
    let n = psi.n_parties();
    if keep == 0 || keep >> n != 0 {
        return invalid("subset outside the parties");
    }
    if phi.len() != psi.amplitudes().len() {
        return Err(crate::error::Error::DimensionMismatch { expected: psi.amplitudes().len(), found: phi.len() });
    }
    if keep == subset::full(n) {
        return Ok(0.0);
    }
    let amp = psi.amplitudes();
    let phi = phi - amp * amp.dotc(phi);
    let rho = psi.reduced(keep);
    let (vals, vecs) = canonical_eigen(rho.matrix());
    Ok(derivative_with(psi, keep, &phi, &vals, &vecs))
}

fn derivative_with(psi: &PureState, keep: Subset, phi: &DVector<C64>, vals: &[f64], vecs: &[DVector<C64>]) -> f64 {
    let big = psi.reshape(keep);
    let tangent = PureState::unchecked(psi.dims().to_vec(), phi.clone()).reshape(keep);
    let cross = big * tangent.adjoint();
    let logs = log_weights(vals, 1e-12);
    -2.0 * vecs
        .iter()
        .zip(&logs)
        .map(|(a, &l)| if l == 0.0 { 0.0 } else { l * a.dotc(&(&cross * a)).re })
        .sum::<f64>()
}

fn entropy_along(psi: &PureState, keep: Subset, phi: &DVector<C64>, t: f64) -> f64 {
    let v = psi.amplitudes() + phi * c(t);
    let nrm = v.norm();
    let moved = PureState::unchecked(psi.dims().to_vec(), v / c(nrm));
    let eigs = moved.reduced(keep).spectrum();
    shannon_unchecked(&eigs)
}

/// Central finite difference of `s_I` along `phi` (projected onto the tangent space).
pub fn finite_difference(psi: &PureState, keep: Subset, phi: &DVector<C64>, step: f64) -> f64 {
    let amp = psi.amplitudes();
    let phi = phi - amp * amp.dotc(phi);
    (entropy_along(psi, keep, &phi, step) - entropy_along(psi, keep, &phi, -step)) / (2.0 * step)
}

fn numeric_rank(rows: &[Vec<f64>], cols: usize, tol: f64) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
}

fn verdict_from(entries: &[(Subset, f64, Vec<f64>)], tol: f64) -> Verdict {
    let top = entries.iter().map(|e| e.1).fold(0.0, f64::max);
    let etol = tol * top.max(1.0);
    if let Some(e) = entries.iter().find(|e| e.1 <= etol) {
        return Verdict::Splits { subset: e.0 };
    }
    if let Some(e) = entries.iter().find(|e| !is_flat(&e.2, tol).0) {
        let first = entries[0].1;
        if entries.iter().all(|x| (x.1 - first).abs() <= etol) {
            return Verdict::Exceptional { ratio: first };
        }
        return Verdict::NotCandidate { non_flat: e.0 };
    }
    Verdict::AllFlat
}

/// Differential of all proper nonempty entropies of a pure state over `tangent_basis`.
pub fn entropy_differential(psi: &PureState, tol: f64) -> Result<DifferentialReport> {
    let n = psi.n_parties();
    subset::check_parties(n)?;
    let basis = tangent_basis(psi)?;
    let subsets: Vec<Subset> = subset::nonempty(n).filter(|&s| s != subset::full(n)).collect();
    let rows: Vec<DifferentialRow> = subsets
        .par_iter()
        .map(|&s| {
            let rho = psi.reduced(s);
            let (vals, vecs) = canonical_eigen(rho.matrix());
            let spectrum: Vec<f64> = vals.iter().map(|&x| x.max(0.0)).collect();
            let entropy = shannon_unchecked(&spectrum);
            let status = if is_flat(&spectrum, tol).0 {
                RowStatus::Flat
            } else if has_repeated_level(&spectrum, tol) {
                RowStatus::Degenerate
            } else {
                RowStatus::Regular
            };
            let values = (status != RowStatus::Degenerate)
                .then(|| basis.iter().map(|phi| derivative_with(psi, s, phi, &vals, &vecs)).collect());
            DifferentialRow { subset: s, status, spectrum, entropy, values }
        })
        .collect();
    let rank = rows
        .iter()
        .map(|r| r.values.clone())
        .collect::<Option<Vec<_>>>()
        .map(|m| numeric_rank(&m, basis.len(), tol));
    let entries: Vec<(Subset, f64, Vec<f64>)> = rows.iter().map(|r| (r.subset, r.entropy, r.spectrum.clone())).collect();
    let verdict = verdict_from(&entries, tol);
    Ok(DifferentialReport { basis, pairs: Vec::new(), rows, rank, verdict })
}

/// Trichotomy for a mixed state: splits, exceptional ray, all spectra flat, or none.
///
/// Flatness is tested before the exceptional case.
pub fn classify_quantum(rho: &DensityMatrix, tol: f64) -> Result<Verdict> {
    let n = rho.n_parties();
    subset::check_parties(n)?;
    let mut entries = subset::nonempty(n)
        .map(|s| {
            let eigs = partial_trace(rho, s)?.spectrum();
            Ok((s, shannon_unchecked(&eigs), eigs))
        })
        .collect::<Result<Vec<_>>>()?;
    // a pure state is read as the purification of its proper marginals
    if n > 1 && is_flat(&entries[entries.len() - 1].2, tol).1 == 1 {
        entries.pop();
    }
    Ok(verdict_from(&entries, tol))
}

pub fn classify_quantum_batch(states: &[DensityMatrix], tol: f64) -> Vec<Result<Verdict>> {
    states.par_iter().map(|r| classify_quantum(r, tol)).collect()
}

/// Support of `p` and the basis `e_{x0} - e_y` of the supporting space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportingSpace {
    pub support: Vec<usize>,
    pub basis: Vec<(usize, usize)>,
}

impl SupportingSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn float_probs(p: &JointDistribution) -> Vec<f64> {
    match p.probs() {
        Probabilities::Exact(v) => v.iter().map(rational_to_f64).collect(),
        Probabilities::Float(v) => v.clone(),
    }
}

pub fn supporting_space(p: &JointDistribution) -> SupportingSpace {
    let support: Vec<usize> = float_probs(p)
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, _)| i)
        .collect();
    let basis = support.iter().skip(1).map(|&y| (support[0], y)).collect();
    SupportingSpace { support, basis }
}

fn marginal_probs(p: &[f64], dims: &[usize], keep: Subset) -> (Vec<f64>, Vec<usize>) {
    let (mdims, map) = marginal_map(dims, keep);
    let mut out = vec![0.0; mdims.iter().product()];
    for (x, &q) in p.iter().enumerate() {
        out[map[x]] += q;
    }
    (out, map)
}

/// `(d h_I)_p(e_x - e_y) = log2(p_I(y_I) / p_I(x_I))` for every nonempty `I`.
pub fn classical_differential(p: &JointDistribution, tol: f64) -> Result<DifferentialReport> {
    let n = p.n_parties();
    subset::check_parties(n)?;
    let probs = float_probs(p);
    let space = supporting_space(p);
    let h = entropy_vector_classical(p)?;
    let mut rows = Vec::new();
    for s in subset::nonempty(n) {
        let (marg, map) = marginal_probs(&probs, p.dims(), s);
        let values = space
            .basis
            .iter()
            .map(|&(x, y)| (marg[map[y]] / marg[map[x]]).log2())
            .collect();
        let spectrum: Vec<f64> = marg.iter().copied().filter(|&q| q > 0.0).collect();
        let status = if is_flat(&spectrum, tol).0 { RowStatus::Flat } else { RowStatus::Regular };
        rows.push(DifferentialRow { subset: s, status, spectrum, entropy: h.get(s), values: Some(values) });
    }
    let matrix: Vec<Vec<f64>> = rows.iter().map(|r| r.values.clone().expect("classical rows")).collect();
    let rank = Some(numeric_rank(&matrix, space.dim(), tol));
    let entries: Vec<(Subset, f64, Vec<f64>)> = rows.iter().map(|r| (r.subset, r.entropy, r.spectrum.clone())).collect();
    let verdict = verdict_from(&entries, tol);
    Ok(DifferentialReport { basis: Vec::new(), pairs: space.basis, rows, rank, verdict })
}

/// Central difference of `h_I` along `e_x - e_y`.
pub fn classical_finite_difference(p: &JointDistribution, keep: Subset, x: usize, y: usize, step: f64) -> f64 {
    let probs = float_probs(p);
    let at = |t: f64| {
        let mut q = probs.clone();
        q[x] += t;
        q[y] -= t;
        shannon_unchecked(&marginal_probs(&q, p.dims(), keep).0)
    };
    (at(step) - at(-step)) / (2.0 * step)
}

pub fn classify_classical(p: &JointDistribution, tol: f64) -> Result<Verdict> {
    Ok(classical_differential(p, tol)?.verdict)
}

/// Letters of a flat outcome index, for labelling classical tangent directions.
pub fn outcome_letters(p: &JointDistribution, x: usize) -> Vec<usize> {
    letters_of(p.dims(), x)
}
