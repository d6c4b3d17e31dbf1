//! Dense complex linear algebra and the validated domain types.
//!
//! Every type here is immutable once constructed. Constructors check the
//! defining invariants against a [`Tolerances`] and report the offending
//! magnitude when a check fails.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

pub use num_complex::Complex64;

/// Dense complex matrix. Storage order is internal (nalgebra is column-major).
pub type CMatrix = DMatrix<Complex64>;

/// Numerical tolerances used by the validating constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `|m_ij - conj(m_ji)|`.
    pub herm: f64,
    /// `|tr - 1|`.
    pub trace: f64,
    /// Smallest admissible eigenvalue is `-psd`.
    pub psd: f64,
    /// `|<v_i|v_j> - delta_ij|`.
    pub ortho: f64,
    /// Reconstruction tolerance per unit of dimension.
    pub recon_per_dim: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
            ortho: 1e-10,
            recon_per_dim: 1e-9,
        }
    }
}

impl Tolerances {
    /// Reconstruction tolerance for an `n`-dimensional matrix.
    pub fn recon(&self, n: usize) -> f64 {
        self.recon_per_dim * n.max(1) as f64
    }
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Conjugate transpose.
pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entry-wise `|m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `|M^H M - I|`, i.e. how far the columns are from orthonormal.
pub fn orthonormality_defect(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let mut worst = 0.0f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    let mut h = (m + m.adjoint()).scale(0.5);
    for i in 0..h.nrows() {
        h[(i, i)].im = 0.0;
    }
    h
}

fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues in ascending order
/// and the matching orthonormal eigenvectors as columns.
///
/// Only the Hermitian part of `m` is used. Any valid eigenbasis may be
/// returned for a degenerate spectrum.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let h = hermitian_part(m);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 1000 * n.max(10)).ok_or(Error::ConvergenceFailure)?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// An ordered orthonormal basis, stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: CMatrix,
}

impl OrthonormalBasis {
    /// Validates that the columns of `m` are orthonormal.
    pub fn from_columns(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        ensure_square(&m)?;
        let deviation = orthonormality_defect(&m);
        if !(deviation <= tol.ortho) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { vectors: m })
    }

    /// Caller guarantees orthonormality (solver and sampler outputs).
    pub(crate) fn from_unitary_unchecked(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self { vectors: m }
    }

    pub fn standard(n: usize) -> Self {
        Self {
            vectors: CMatrix::identity(n, n),
        }
    }

    /// Discrete Fourier basis, `f_k[j] = exp(2 pi i jk / n) / sqrt(n)`.
    /// Mutually unbiased with the standard basis.
    pub fn fourier(n: usize) -> Self {
        let scale = 1.0 / (n as f64).sqrt();
        let vectors = CMatrix::from_fn(n, n, |j, k| {
            let angle = 2.0 * std::f64::consts::PI * ((j * k) % n.max(1)) as f64 / n as f64;
            Complex64::from_polar(scale, angle)
        });
        Self { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// The basis vectors as the columns of a unitary matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn into_matrix(self) -> CMatrix {
        self.vectors
    }

    /// The `i`-th basis vector.
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i).iter().copied().collect()
    }

    /// The basis `(U e_i)_i` for a unitary `U`.
    pub fn transformed(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: unitary.nrows(),
            });
        }
        Ok(Self {
            vectors: unitary * &self.vectors,
        })
    }

    /// Reorders and rephases the vectors: new vector `k` is
    /// `phases[k] * old[perm[k]]`.
    pub fn relabelled(&self, perm: &[usize], phases: &[f64]) -> Result<Self> {
        let n = self.dim();
        if perm.len() != n || phases.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perm.len().min(phases.len()),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation of 0..{n}"
                )));
            }
        }
        let vectors = CMatrix::from_fn(n, n, |i, k| {
            self.vectors[(i, perm[k])] * Complex64::from_polar(1.0, phases[k])
        });
        Ok(Self { vectors })
    }
}

/// A quantum state: Hermitian, positive semi-definite, unit trace.
///
/// The spectrum (ascending) and an eigenbasis are computed once at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    spectrum: Vec<f64>,
    eigenbasis: OrthonormalBasis,
}

/// Checks the three state invariants in order (Hermitian, trace, PSD).
pub fn validate_density(m: &CMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let deviation = hermiticity_defect(m);
    if !(deviation <= tol.herm) {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = m.trace();
    let trace_dev = (trace - c(1.0, 0.0)).norm();
    if !(trace_dev <= tol.trace) {
        return Err(Error::TraceNotOne {
            trace: trace.re,
            deviation: trace_dev,
        });
    }
    let matrix = hermitian_part(m);
    let (spectrum, vectors) = eigh(&matrix)?;
    let min_eigenvalue = spectrum[0];
    if !(min_eigenvalue >= -tol.psd) {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(DensityMatrix {
        matrix,
        spectrum,
        eigenbasis: OrthonormalBasis::from_unitary_unchecked(vectors),
    })
}

impl DensityMatrix {
    pub fn new(m: &CMatrix, tol: &Tolerances) -> Result<Self> {
        validate_density(m, tol)
    }

    /// `I / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self::diagonal_unchecked(&vec![1.0 / n as f64; n])
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::InvalidArgument(
                "pure state needs a non-zero finite vector".into(),
            ));
        }
        let n = psi.len();
        let m = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm_sq);
        validate_density(&m, &Tolerances::default())
    }

    /// Diagonal state with the given probabilities.
    pub fn from_probabilities(probs: &[f64], tol: &Tolerances) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty probability vector".into()));
        }
        let sum: f64 = probs.iter().sum();
        if !((sum - 1.0).abs() <= tol.trace) {
            return Err(Error::TraceNotOne {
                trace: sum,
                deviation: (sum - 1.0).abs(),
            });
        }
        let min = probs.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min >= -tol.psd) {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self::diagonal_unchecked(probs))
    }

    /// Diagonal state whose eigenbasis is the (sorted) standard basis; no
    /// eigensolver is involved.
    pub(crate) fn diagonal_unchecked(probs: &[f64]) -> Self {
        let n = probs.len();
        let matrix = CMatrix::from_fn(
            n,
            n,
            |i, j| {
                if i == j {
                    c(probs[i], 0.0)
                } else {
                    Complex64::default()
                }
            },
        );
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));
        let spectrum = order.iter().map(|&k| probs[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| {
            if i == order[j] {
                c(1.0, 0.0)
            } else {
                Complex64::default()
            }
        });
        Self {
            matrix,
            spectrum,
            eigenbasis: OrthonormalBasis::from_unitary_unchecked(vectors),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// The eigenbasis returned by the solver, ordered like [`Self::spectrum`].
    pub fn eigenbasis(&self) -> &OrthonormalBasis {
        &self.eigenbasis
    }

    /// True when the matrix is exactly `I / n` (bitwise), the one state that
    /// is diagonal in every basis.
    pub fn is_exactly_maximally_mixed(&self) -> bool {
        let n = self.dim();
        let d = self.matrix[(0, 0)];
        (0..n).all(|j| {
            (0..n).all(|i| {
                let z = self.matrix[(i, j)];
                if i == j {
                    z == d
                } else {
                    z == Complex64::default()
                }
            })
        })
    }
}

/// Von Neumann entropy `-sum lambda ln lambda` in nats, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(rho.spectrum())
}

/// `-sum p ln p` over a probability vector; entries are clamped to `[0, 1]`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// `tr(rho^2)`, evaluated as the squared Frobenius norm.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// A Hermitian operator together with its spectrum and eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: CMatrix,
    spectrum: Vec<f64>,
    eigenbasis: OrthonormalBasis,
}

impl HermitianObservable {
    pub fn new(m: &CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = ensure_square(m)?;
        let deviation = hermiticity_defect(m);
        if !(deviation <= tol.herm) {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = hermitian_part(m);
        let (spectrum, vectors) = eigh(&matrix)?;
        let recon = reconstruct(&spectrum, &vectors);
        let err = (&recon - &matrix).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let scale = spectrum.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if !(err <= tol.recon(n) * scale) {
            return Err(Error::ConvergenceFailure);
        }
        Ok(Self {
            matrix,
            spectrum,
            eigenbasis: OrthonormalBasis::from_unitary_unchecked(vectors),
        })
    }

    /// `sum a_i |e_i><e_i|` for a real spectrum and an orthonormal basis.
    pub fn from_spectrum(spectrum: &[f64], basis: &OrthonormalBasis) -> Result<Self> {
        if spectrum.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: spectrum.len(),
            });
        }
        let m = reconstruct(spectrum, basis.matrix());
        Self::new(&m, &Tolerances::default())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn eigenbasis(&self) -> &OrthonormalBasis {
        &self.eigenbasis
    }

    /// `max_ij |a_i - a_j|`.
    pub fn spectral_spread(&self) -> f64 {
        spread(&self.spectrum)
    }

    /// `min_{i != j} |a_i - a_j|`; infinite in dimension 1.
    pub fn min_gap(&self) -> f64 {
        min_gap_sorted(&self.spectrum)
    }
}

/// Spectrum (ascending) and eigenbasis of an observable.
pub fn hermitian_eigendecomposition(a: &HermitianObservable) -> (&[f64], &OrthonormalBasis) {
    (a.spectrum(), a.eigenbasis())
}

pub(crate) fn reconstruct(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= v;
        }
    }
    scaled * vectors.adjoint()
}

pub(crate) fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        0.0
    } else {
        max - min
    }
}

/// Minimum gap between consecutive entries of an ascending slice.
pub(crate) fn min_gap_sorted(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(f64::INFINITY, f64::min)
}

/// An `n x k` isometry whose columns span the subspace `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: CMatrix,
}

impl Subspace {
    pub fn new(frame: CMatrix, tol: &Tolerances) -> Result<Self> {
        if frame.ncols() > frame.nrows() || frame.ncols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "a frame needs 1 <= k <= n columns, got {}x{}",
                frame.nrows(),
                frame.ncols()
            )));
        }
        let deviation = orthonormality_defect(&frame);
        if !(deviation <= tol.ortho) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { frame })
    }

    pub(crate) fn from_frame_unchecked(frame: CMatrix) -> Self {
        Self { frame }
    }

    /// Span of the selected vectors of a basis.
    pub fn from_basis_vectors(basis: &OrthonormalBasis, indices: &[usize]) -> Result<Self> {
        let n = basis.dim();
        if indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidArgument(format!(
                "basis index out of range for dimension {n}"
            )));
        }
        let frame = CMatrix::from_fn(n, indices.len(), |i, k| basis.matrix()[(i, indices[k])]);
        Self::new(frame, &Tolerances::default())
    }

    /// The line spanned by a single (not necessarily normalised) vector.
    pub fn line(v: &[Complex64]) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("zero vector spans no line".into()));
        }
        let frame = CMatrix::from_fn(v.len(), 1, |i, _| v[i] / norm);
        Self::new(frame, &Tolerances::default())
    }

    pub fn whole_space(n: usize) -> Self {
        Self {
            frame: CMatrix::identity(n, n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    /// Orthogonal projector `frame * frame^H`.
    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&g + g.adjoint()).scale(0.5)
    }

    fn real_diag(v: &[f64]) -> CMatrix {
        CMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { c(v[i], 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn maximally_mixed_qubit_is_valid() {
        let m = real_diag(&[0.5, 0.5]);
        let rho = validate_density(&m, &Tolerances::default()).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!(rho.is_exactly_maximally_mixed());
    }

    #[test]
    fn counterexample_matrix_is_valid() {
        let eps = 0.1;
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5 * eps, 0.0), c(0.5 * eps, 0.0), c(0.5, 0.0)]);
        let rho = validate_density(&m, &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(rho.spectrum()[0], 0.45, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.spectrum()[1], 0.55, epsilon = 1e-14);
    }

    #[test]
    fn validation_errors_name_the_violation() {
        let tol = Tolerances::default();
        match validate_density(&real_diag(&[1.0, 0.1]), &tol) {
            Err(Error::TraceNotOne { trace, .. }) => assert_abs_diff_eq!(trace, 1.1, epsilon = 1e-15),
            other => panic!("expected TraceNotOne, got {other:?}"),
        }
        let mut m = real_diag(&[0.5, 0.5]);
        m[(0, 1)] = c(0.2, 0.0);
        assert!(matches!(validate_density(&m, &tol), Err(Error::NotHermitian { .. })));
        match validate_density(&real_diag(&[1.5, -0.5]), &tol) {
            Err(Error::NotPsd { min_eigenvalue }) => assert_abs_diff_eq!(min_eigenvalue, -0.5, epsilon = 1e-14),
            other => panic!("expected NotPsd, got {other:?}"),
        }
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(
            validate_density(&rect, &tol),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn diagonal_eigendecomposition() {
        let a = HermitianObservable::new(&real_diag(&[3.0, 1.0, 2.0]), &Tolerances::default()).unwrap();
        let (spec, basis) = hermitian_eigendecomposition(&a);
        assert_eq!(spec.len(), 3);
        for (v, want) in spec.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*v, want, epsilon = 1e-14);
        }
        // eigenvalue k lives on standard vector order[k], up to phase
        for (k, idx) in [1usize, 2, 0].iter().enumerate() {
            assert_abs_diff_eq!(basis.matrix()[(*idx, k)].norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pauli_x_eigenvectors() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let a = HermitianObservable::new(&x, &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(a.spectrum()[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a.spectrum()[1], 1.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = [c(s, 0.0), c(-s, 0.0)];
        let plus = [c(s, 0.0), c(s, 0.0)];
        for (k, target) in [minus, plus].iter().enumerate() {
            let v = a.eigenbasis().vector(k);
            let overlap: Complex64 = v.iter().zip(target).map(|(x, t)| x.conj() * t).sum();
            assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigendecomposition_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let n = 2 + trial % 31;
            let m = random_hermitian(n, &mut rng);
            let (values, vectors) = eigh(&m).unwrap();
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
            assert!(orthonormality_defect(&vectors) < 1e-12);
            let err = (reconstruct(&values, &vectors) - &m)
                .iter()
                .fold(0.0f64, |a, z| a.max(z.norm()));
            assert!(err < 1e-10, "n = {n}: reconstruction error {err}");
            for (k, &lambda) in values.iter().enumerate() {
                let v = vectors.column(k);
                let residual = (&m * v - v * c(lambda, 0.0)).norm();
                assert!(residual < 1e-10);
            }
        }
    }

    #[test]
    fn operator_norm_basics() {
        assert_eq!(operator_norm(&CMatrix::zeros(3, 3)), 0.0);
        let f = OrthonormalBasis::fourier(5);
        assert_abs_diff_eq!(operator_norm(f.matrix()), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(operator_norm(&real_diag(&[0.5, -3.0, 2.0])), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn operator_norm_dominates_sampled_vectors() {
        // random-vector oracle: sup over the unit sphere approached from below
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            let m = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let norm = operator_norm(&m);
            let mut best = 0.0f64;
            for _ in 0..10_000 {
                let x =
                    nalgebra::DVector::from_fn(n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                let x = &x / c(x.norm(), 0.0);
                best = best.max((&m * x).norm());
            }
            assert!(norm >= best - 1e-12, "n = {n}: {norm} < {best}");
            // power iteration on M^H M reaches the top singular value
            let mtm = m.adjoint() * &m;
            let mut v = nalgebra::DVector::from_element(n, c(1.0, 0.3));
            for _ in 0..2000 {
                v = &mtm * &v;
                v /= c(v.norm(), 0.0);
            }
            assert!((norm - (&m * &v).norm()).abs() < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn entropy_and_purity_examples() {
        let pure = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(purity(&pure), 1.0, epsilon = 1e-14);
        for n in [1, 2, 5, 16] {
            let mixed = DensityMatrix::maximally_mixed(n);
            assert_abs_diff_eq!(von_neumann_entropy(&mixed), (n as f64).ln(), epsilon = 1e-13);
            assert_abs_diff_eq!(purity(&mixed), 1.0 / n as f64, epsilon = 1e-15);
        }
        let eps: f64 = 0.1;
        let (p, q) = ((1.0 + eps) / 2.0, (1.0 - eps) / 2.0);
        let rho = DensityMatrix::from_probabilities(&[p, q], &Tolerances::default()).unwrap();
        let direct = -(p * p.ln() + q * q.ln());
        assert_abs_diff_eq!(von_neumann_entropy(&rho), direct, epsilon = 1e-15);
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 0.688139, epsilon = 5e-7);
        let rho = DensityMatrix::from_probabilities(&[0.7, 0.3], &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(purity(&rho), 0.58, epsilon = 1e-15);
    }

    #[test]
    fn subspace_projector_is_idempotent() {
        let f = OrthonormalBasis::fourier(6);
        let s = Subspace::from_basis_vectors(&f, &[0, 2, 5]).unwrap();
        let p = s.projector();
        let err = (&p * &p - &p).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        assert!(err < 1e-12);
        assert_abs_diff_eq!(p.trace().re, 3.0, epsilon = 1e-12);
        assert!(Subspace::new(CMatrix::from_element(3, 1, c(1.0, 0.0)), &Tolerances::default()).is_err());
    }

    #[test]
    fn basis_rejects_non_orthonormal_columns() {
        let mut m = CMatrix::identity(3, 3);
        m[(0, 1)] = c(1e-6, 0.0);
        assert!(matches!(
            OrthonormalBasis::from_columns(m, &Tolerances::default()),
            Err(Error::NotOrthonormal { .. })
        ));
    }
}
