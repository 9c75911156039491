//! Density matrices, pure states and von Neumann entropy.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::entropy::{marginal_map, shannon_unchecked, EntropyVector, JointDistribution};
use crate::error::{Error, Result};
use crate::subset::{self, Subset};

pub type C64 = Complex<f64>;

/// Tolerance for Hermiticity, trace and eigenvalue checks.
pub const DENSITY_TOL: f64 = 1e-10;
/// Tolerance for the norm of a pure state.
pub const PURE_NORM_TOL: f64 = 1e-12;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Quantum state of `n` parties with local dimensions `dims`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::unchecked(dims, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn unchecked(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidDensityMatrix("local dimensions must be positive".into()));
        }
        let size: usize = dims.iter().product();
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(Error::DimensionMismatch { expected: size, found: matrix.nrows() });
        }
        Ok(Self { dims, matrix })
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let dev = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        let min = self.raw_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Maximally mixed state on the given local dimensions.
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let size: usize = dims.iter().product();
        let m = DMatrix::from_diagonal_element(size, size, c(1.0 / size as f64));
        Self::new(dims, m)
    }

    /// Diagonal embedding of a classical distribution.
    pub fn from_distribution(p: &JointDistribution) -> Result<Self> {
        let probs = p.probs().to_f64();
        let m = DMatrix::from_diagonal(&DVector::from_iterator(probs.len(), probs.iter().map(|&x| c(x))));
        Self::new(p.dims().to_vec(), m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, matrix: self.matrix.kronecker(&other.matrix) }
    }

    fn raw_eigenvalues(&self) -> Vec<f64> {
        self.matrix.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Eigenvalues sorted in descending order, small negatives clamped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .raw_eigenvalues()
            .into_iter()
            .map(|x| if (-DENSITY_TOL..0.0).contains(&x) { 0.0 } else { x })
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// Index table: `table[t][a]` is the full index for kept index `a` and traced index `t`.
pub(crate) fn split_indices(dims: &[usize], keep: Subset) -> (usize, usize, Vec<Vec<usize>>) {
    let n = dims.len();
    let (kdims, kmap) = marginal_map(dims, keep);
    let (tdims, tmap) = marginal_map(dims, subset::complement(keep, n));
    let dk: usize = kdims.iter().product();
    let dt: usize = tdims.iter().product();
    let mut table = vec![vec![0; dk]; dt];
    for x in 0..kmap.len() {
        table[tmap[x]][kmap[x]] = x;
    }
    (dk, dt, table)
}

/// Reduced state on the parties in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subset) -> Result<DensityMatrix> {
    let n = rho.n_parties();
    if keep >> n != 0 {
        return Err(Error::InvalidInput(format!("subset {} outside [{n}]", subset::label(keep))));
    }
    if keep == subset::full(n) {
        return Ok(rho.clone());
    }
    let (dk, _, table) = split_indices(&rho.dims, keep);
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    for row in &table {
        for a in 0..dk {
            for b in 0..dk {
                out[(a, b)] += rho.matrix[(row[a], row[b])];
            }
        }
    }
    let kdims: Vec<usize> = (0..n).filter(|&i| keep >> i & 1 == 1).map(|i| rho.dims[i]).collect();
    DensityMatrix::unchecked(kdims, out)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigs = rho.spectrum();
    if let Some(x) = eigs.iter().find(|&&x| x < 0.0) {
        return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {x:e}")));
    }
    Ok(shannon_unchecked(&eigs))
}

/// Entropy vector `(S(rho_I))_I`.
pub fn entropy_vector_quantum(rho: &DensityMatrix) -> Result<EntropyVector> {
    let n = rho.n_parties();
    subset::check_parties(n)?;
    let mut entries = vec![0.0; 1 << n];
    for s in subset::nonempty(n) {
        entries[s] = von_neumann_entropy(&partial_trace(rho, s)?)?;
    }
    EntropyVector::from_entries(n, entries)
}

/// Pure state of `n` parties.
#[derive(Clone, Debug)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: DVector<C64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if dims.contains(&0) {
            return Err(Error::InvalidInput("local dimensions must be positive".into()));
        }
        if amplitudes.len() != size {
            return Err(Error::DimensionMismatch { expected: size, found: amplitudes.len() });
        }
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { dims, amplitudes })
    }

    pub(crate) fn unchecked(dims: Vec<usize>, amplitudes: DVector<C64>) -> Self {
        Self { dims, amplitudes }
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(dims: Vec<usize>, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(dims, amplitudes / c(norm))
    }

    /// Product basis state `|x_1 ... x_n>`.
    pub fn basis(dims: Vec<usize>, letters: &[usize]) -> Result<Self> {
        let idx = crate::entropy::flat_index(&dims, letters)?;
        let size: usize = dims.iter().product();
        let mut v = DVector::zeros(size);
        v[idx] = c(1.0);
        Self::new(dims, v)
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> Result<Self> {
        let size: usize = dims.iter().product();
        let v = DVector::from_fn(size, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        Self::normalized(dims, v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { dims: self.dims.clone(), matrix: m }
    }

    /// Matrix `Psi` with `psi = sum Psi[a][t] |a>_keep |t>_rest`.
    pub fn reshape(&self, keep: Subset) -> DMatrix<C64> {
        let (dk, dt, table) = split_indices(&self.dims, keep);
        DMatrix::from_fn(dk, dt, |a, t| self.amplitudes[table[t][a]])
    }

    /// Reduced state on the parties in `keep`.
    pub fn reduced(&self, keep: Subset) -> DensityMatrix {
        let psi = self.reshape(keep);
        let dims = (0..self.n_parties())
            .filter(|&i| keep >> i & 1 == 1)
            .map(|i| self.dims[i])
            .collect();
        DensityMatrix { dims, matrix: &psi * psi.adjoint() }
    }

    /// Entropy vector of the pure state, computed from reduced states.
    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        let n = self.n_parties();
        subset::check_parties(n)?;
        let mut entries = vec![0.0; 1 << n];
        for s in subset::nonempty(n) {
            if s != subset::full(n) {
                entries[s] = von_neumann_entropy(&self.reduced(s))?;
            }
        }
        EntropyVector::from_entries(n, entries)
    }
}

/// Eigendecomposition of a Hermitian matrix with a canonical basis.
///
/// Eigenvalues are descending. Inside a (numerically) degenerate eigenspace the basis is
/// the Gram-Schmidt orthonormalization of the projected standard basis vectors, in index
/// order. Every vector has its first nonzero component real and positive.
pub fn canonical_eigen(m: &DMatrix<C64>) -> (Vec<f64>, Vec<DVector<C64>>) {
    const CLUSTER_TOL: f64 = 1e-9;
    let dim = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut values = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim);
    let mut i = 0;
    while i < dim {
        let mut j = i + 1;
        while j < dim && eig.eigenvalues[order[i]] - eig.eigenvalues[order[j]] <= CLUSTER_TOL {
            j += 1;
        }
        let cluster: Vec<DVector<C64>> = order[i..j].iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
        let basis = if cluster.len() == 1 {
            cluster
        } else {
            canonical_subspace_basis(&cluster, dim)
        };
        for (k, v) in basis.into_iter().enumerate() {
            values.push(eig.eigenvalues[order[i + k]]);
            vectors.push(fix_phase(v));
        }
        i = j;
    }
    (values, vectors)
}

fn canonical_subspace_basis(span: &[DVector<C64>], dim: usize) -> Vec<DVector<C64>> {
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(span.len());
    for k in 0..dim {
        if out.len() == span.len() {
            break;
        }
        // projection of e_k onto the span
        let mut w = DVector::<C64>::zeros(dim);
        for v in span {
            w += v * v[k].conj();
        }
        for u in &out {
            let ov = u.dotc(&w);
            w -= u * ov;
        }
        let nrm = w.norm();
        if nrm > 1e-6 {
            out.push(w / c(nrm));
        }
    }
    out
}

/// Rotate the global phase so the first significant component is real and positive.
pub fn fix_phase(v: DVector<C64>) -> DVector<C64> {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match v.iter().find(|z| z.norm() > 1e-9 * scale.max(1e-300)) {
        Some(z) => {
            let ph = z.conj() / c(z.norm());
            v * ph
        }
        None => v,
    }
}

/// Eigenvalues at or below this are dropped from purifications.
pub const PURIFY_ZERO: f64 = 1e-12;

/// Canonical purification `sum_i sqrt(p_i) |e_i> |i>` on dims `rho.dims + [D]`.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let d = rho.dim();
    let (vals, vecs) = canonical_eigen(&rho.matrix);
    let mut amp = DVector::<C64>::zeros(d * d);
    for (i, (p, e)) in vals.iter().zip(&vecs).enumerate() {
        if *p <= PURIFY_ZERO {
            continue;
        }
        let s = p.sqrt();
        for x in 0..d {
            amp[x * d + i] = e[x] * c(s);
        }
    }
    let mut dims = rho.dims.clone();
    dims.push(d);
    PureState::normalized(dims, amp)
}

/// `(1/sqrt d) sum_j |j ... j>`.
pub fn ghz_state(n: usize, d: usize) -> Result<PureState> {
    if n == 0 || d < 2 {
        return Err(Error::InvalidInput("ghz_state needs n >= 1 and d >= 2".into()));
    }
    let size = d.checked_pow(n as u32).ok_or_else(|| Error::ResourceLimit("state too large".into()))?;
    let stride: usize = (0..n).map(|k| d.pow(k as u32)).sum();
    let mut v = DVector::<C64>::zeros(size);
    for j in 0..d {
        v[j * stride] = c(1.0 / (d as f64).sqrt());
    }
    PureState::normalized(vec![d; n], v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(dims: Vec<usize>, d: &[f64]) -> DensityMatrix {
        let m = DMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|&x| c(x))));
        DensityMatrix::new(dims, m).unwrap()
    }

    fn bell() -> PureState {
        let mut v = DVector::zeros(4);
        v[0] = c(0.5f64.sqrt());
        v[3] = c(0.5f64.sqrt());
        PureState::new(vec![2, 2], v).unwrap()
    }

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn von_neumann_examples() {
        assert!((von_neumann_entropy(&diag(vec![2], &[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-12);
        assert!(von_neumann_entropy(&bell().density_matrix()).unwrap().abs() < 1e-12);
        assert!((von_neumann_entropy(&diag(vec![3], &[0.5, 0.25, 0.25])).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = DMatrix::from_diagonal_element(2, 2, c(0.5));
        m[(0, 1)] = c(0.3);
        assert!(DensityMatrix::new(vec![2], m).is_err());
        assert!(DensityMatrix::new(vec![2], DMatrix::from_diagonal_element(2, 2, c(0.4))).is_err());
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DensityMatrix::new(vec![2], neg).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let sigma = diag(vec![2], &[0.7, 0.3]);
        let tau = diag(vec![3], &[0.2, 0.3, 0.5]);
        let prod = sigma.tensor(&tau);
        assert!(max_diff(partial_trace(&prod, 0b01).unwrap().matrix(), sigma.matrix()) < 1e-12);
        assert!(max_diff(partial_trace(&prod, 0b10).unwrap().matrix(), tau.matrix()) < 1e-12);
        let b = bell().density_matrix();
        let r = partial_trace(&b, 0b01).unwrap();
        assert!(max_diff(r.matrix(), &DMatrix::from_diagonal_element(2, 2, c(0.5))) < 1e-12);
        assert!(max_diff(partial_trace(&b, 0b11).unwrap().matrix(), b.matrix()) < 1e-15);
    }

    #[test]
    fn ghz_examples() {
        let g = ghz_state(3, 2).unwrap();
        let s = entropy_vector_quantum(&g.density_matrix()).unwrap();
        for i in 1..7 {
            assert!((s.get(i) - 1.0).abs() < 1e-10);
        }
        assert!(s.get(7).abs() < 1e-10);
        let g = ghz_state(2, 3).unwrap();
        let s = g.entropy_vector().unwrap();
        assert!((s.get(1) - 3f64.log2()).abs() < 1e-10);
        assert!((s.get(2) - 3f64.log2()).abs() < 1e-10);
        assert!(s.get(3).abs() < 1e-10);
        let g1 = ghz_state(1, 2).unwrap();
        assert!(g1.entropy_vector().unwrap().get(1).abs() < 1e-12);
    }

    #[test]
    fn purification_examples() {
        let p = purify(&diag(vec![2], &[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        let a = p.amplitudes();
        assert!((a[0] - c((2.0f64 / 3.0).sqrt())).norm() < 1e-12);
        assert!((a[3] - c((1.0f64 / 3.0).sqrt())).norm() < 1e-12);
        assert!(a[1].norm() < 1e-12 && a[2].norm() < 1e-12);

        let mm = purify(&diag(vec![2], &[0.5, 0.5])).unwrap();
        assert!((mm.amplitudes() - bell().amplitudes()).norm() < 1e-12);

        let phi = PureState::normalized(vec![2], DVector::from_vec(vec![c(0.6), C64::new(0.0, 0.8)])).unwrap();
        let pp = purify(&phi.density_matrix()).unwrap();
        let expected = phi.tensor(&PureState::basis(vec![2], &[0]).unwrap());
        assert!((pp.amplitudes() - expected.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn purification_reduces_to_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let big = PureState::random(vec![3, 2], &mut rng).unwrap();
            let rho = big.reduced(0b01);
            let p = purify(&rho).unwrap();
            let back = p.reduced(0b01);
            assert!(max_diff(back.matrix(), rho.matrix()) < 1e-9);
            let s = p.entropy_vector().unwrap();
            assert!((s.get(1) - s.get(2)).abs() < 1e-9);
            assert!((s.get(1) - von_neumann_entropy(&rho).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn classical_embedding_and_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w: Vec<f64> = (0..12).map(|_| rng.gen::<f64>()).collect();
        let t: f64 = w.iter().sum();
        let p = JointDistribution::from_f64(vec![2, 3, 2], w.iter().map(|x| x / t).collect()).unwrap();
        let hq = entropy_vector_quantum(&DensityMatrix::from_distribution(&p).unwrap()).unwrap();
        let hc = crate::entropy::entropy_vector_classical(&p).unwrap();
        assert!(hq.max_abs_diff(&hc).unwrap() < 1e-9);

        let a = PureState::random(vec![2, 2], &mut rng).unwrap().reduced(0b01);
        let b = PureState::random(vec![3, 2], &mut rng).unwrap().reduced(0b01);
        let sa = von_neumann_entropy(&a).unwrap();
        let sb = von_neumann_entropy(&b).unwrap();
        let sab = entropy_vector_quantum(&a.tensor(&b)).unwrap();
        assert!((sab.get(3) - sa - sb).abs() < 1e-9);
    }
}
