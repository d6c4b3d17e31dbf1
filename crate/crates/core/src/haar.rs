//! Haar-random unitaries, bases and states, exact single-row moments of the
//! Haar measure, and a seeded Monte Carlo driver.
//!
//! # Reproducibility
//!
//! [`SeededGenerator`] wraps ChaCha8. Parallel estimators never share a
//! generator: they draw one `u64` from the caller's generator to seed a fresh
//! master, split the work into fixed blocks of [`BLOCK_SIZE`] samples, and give
//! block `b` the ChaCha stream `b + 1` of that master seed. Per-sample values
//! are reassembled in block order before any reduction, so results depend only
//! on the seed and the sample count, never on the number of worker threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::coherence::{eta2, rewrite_in_basis};
use crate::linalg::{c, purity, CMatrix, Complex64, DensityMatrix, OrthonormalBasis, Subspace};
use crate::{Error, Result};

/// Samples per independent sub-stream in the parallel estimators.
pub const BLOCK_SIZE: usize = 64;

/// Identifier of the underlying pseudo-random algorithm.
pub const ALGORITHM: &str = "chacha8";

/// A reproducible random stream: identical seed and algorithm give an
/// identical sample stream.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    /// Independent sub-stream `index` of this generator's seed. Depends only
    /// on the seed, not on how far this generator has advanced.
    pub fn substream(&self, index: u64) -> Self {
        Self::with_stream(self.seed, index.wrapping_add(1))
    }

    /// A new master generator seeded from the next output of this one.
    pub fn split(&mut self) -> Self {
        Self::new(self.rng.next_u64())
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededGenerator {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // explicit loop keeps the draw order row-major regardless of storage
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-distributed `n x n` unitary: QR of a Ginibre matrix, then column `j`
/// of `Q` is multiplied by `r_jj / |r_jj|` so that the factorisation has a
/// positive diagonal and is unique. (nalgebra already returns a positive
/// diagonal, making this a no-op there; it is kept so the result does not
/// depend on that convention.)
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    assert!(n >= 1, "dimension must be positive");
    let qr = ginibre(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// QR of a Ginibre matrix with a data-dependent phase convention: each column
/// of `Q` is rephased so its diagonal entry is real and negative, as a plain
/// Householder factorisation does for the first column. Not Haar
/// distributed; kept as a negative control for the invariance tests.
#[doc(hidden)]
pub fn sample_uncorrected_qr<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut q = ginibre(n, n, rng).qr().q();
    for j in 0..n {
        let d = q[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = -(d.conj() / norm);
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// `(U e_i)_i` for a Haar unitary `U` and the standard reference basis.
pub fn random_basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OrthonormalBasis {
    OrthonormalBasis::from_unitary_unchecked(sample_haar_unitary(n, rng))
}

/// A Haar-random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let g = ginibre(n, 1, rng);
    let norm = g.norm();
    g.iter().map(|z| z / norm).collect()
}

/// Random subspace: dimension uniform on `1..=n`, frame taken from the first
/// columns of a Haar unitary.
pub fn random_subspace<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Subspace {
    let k = rng.random_range(1..=n);
    random_subspace_of_dim(n, k, rng)
}

pub fn random_subspace_of_dim<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Subspace {
    let u = sample_haar_unitary(n, rng);
    Subspace::from_frame_unchecked(u.columns(0, k).into_owned())
}

/// GUE-like random Hermitian matrix `(G + G^H) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Normalised Wishart state `G G^H / tr(G G^H)` with `G` of shape `n x rank`;
/// the state has rank `min(rank, n)` almost surely.
pub fn random_density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    assert!(n >= 1 && rank >= 1);
    loop {
        let g = ginibre(n, rank.min(n), rng);
        let w = &g * g.adjoint();
        let tr = w.trace().re;
        if let Ok(rho) = DensityMatrix::new(&w.unscale(tr), &Default::default()) {
            return rho;
        }
    }
}

/// Exact `int prod_k |u_1k|^(2 a_k) dmu_n = (n-1)! prod a_k! / (m+n-1)!` with
/// `m = sum a_k` and `n = a.len()`, evaluated in log space.
pub fn monomial_moment(a: &[u32]) -> f64 {
    let n = a.len();
    assert!(n >= 1, "exponent vector must be non-empty");
    let m: u64 = a.iter().map(|&k| k as u64).sum();
    let log = ln_factorial(n as u64 - 1) - ln_factorial(m + n as u64 - 1)
        + a.iter().map(|&k| ln_factorial(k as u64)).sum::<f64>();
    log.exp()
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `E sum_i rho_ii^2 = (tr rho^2 + 1) / (n + 1)` over Haar-random bases.
pub fn exact_expected_diag_square_sum(rho: &DensityMatrix) -> f64 {
    (purity(rho) + 1.0) / (rho.dim() as f64 + 1.0)
}

/// `E eta_2^2 = tr rho^2 - E sum_i rho_ii^2 = (n tr rho^2 - 1) / (n + 1)`.
pub fn exact_expected_eta2_sq(rho: &DensityMatrix) -> f64 {
    let n = rho.dim() as f64;
    ((n * purity(rho) - 1.0) / (n + 1.0)).max(0.0)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// `s / sqrt(samples)` with the unbiased sample deviation `s`.
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let len = values.len();
        if len < 2 {
            return Err(Error::InvalidArgument(format!(
                "an estimate needs at least 2 samples, got {len}"
            )));
        }
        let mean = values.iter().sum::<f64>() / len as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1) as f64;
        Ok(Self {
            mean,
            std_error: (var / len as f64).sqrt(),
            samples: len,
        })
    }

    /// `(mean - exact) / std_error`. A zero standard error gives 0 when the
    /// mean matches `exact` to 1e-12 and infinity otherwise.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = self.mean - exact;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff.abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }

    pub fn agrees_with(&self, exact: f64, sigmas: f64) -> bool {
        self.z_score(exact).abs() <= sigmas
    }
}

/// Evaluates `statistic` on `samples` independent Haar unitaries, in
/// parallel, returning the values in sample order. See the module docs for
/// the stream-splitting rule.
pub fn haar_samples<T, F>(n: usize, samples: usize, g: &mut SeededGenerator, statistic: F) -> Vec<T>
where
    T: Send,
    F: Fn(&CMatrix) -> T + Sync,
{
    let master = g.split();
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let per_block: Vec<Vec<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = master.substream(b as u64);
            let len = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
            (0..len).map(|_| statistic(&sample_haar_unitary(n, &mut rng))).collect()
        })
        .collect();
    per_block.into_iter().flatten().collect()
}

/// Monte Carlo estimate of `E eta_2(B, rho)^2` over Haar-random bases.
pub fn estimate_expected_eta2_sq(
    rho: &DensityMatrix,
    samples: usize,
    g: &mut SeededGenerator,
) -> Result<MonteCarloEstimate> {
    let values = haar_samples(rho.dim(), samples, g, |u| {
        let basis = OrthonormalBasis::from_unitary_unchecked(u.clone());
        let s = rewrite_in_basis(rho, &basis).expect("dimensions agree");
        eta2(&s).powi(2)
    });
    MonteCarloEstimate::from_samples(&values)
}

/// Monte Carlo estimate of `E sum_i rho_ii^2` over Haar-random bases.
pub fn estimate_expected_diag_square_sum(
    rho: &DensityMatrix,
    samples: usize,
    g: &mut SeededGenerator,
) -> Result<MonteCarloEstimate> {
    let values = haar_samples(rho.dim(), samples, g, |u| diag_square_sum(rho, u));
    MonteCarloEstimate::from_samples(&values)
}

/// `sum_i <u_i|rho|u_i>^2` for the columns `u_i` of `u`.
pub(crate) fn diag_square_sum(rho: &DensityMatrix, u: &CMatrix) -> f64 {
    let rho_u = rho.matrix() * u;
    (0..u.ncols())
        .map(|i| u.column(i).dotc(&rho_u.column(i)).re.powi(2))
        .sum()
}

/// Monte Carlo estimate of `E |u_ik|^2 |u_il|^2` next to its exact value
/// `(delta_kl + 1) / (n (n + 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapMomentCheck {
    pub estimate: MonteCarloEstimate,
    pub exact: f64,
    pub z_score: f64,
    /// Within 4 standard errors.
    pub agrees: bool,
}

pub fn overlap_moment_check(
    n: usize,
    i: usize,
    k: usize,
    l: usize,
    samples: usize,
    g: &mut SeededGenerator,
) -> Result<OverlapMomentCheck> {
    if i >= n || k >= n || l >= n {
        return Err(Error::InvalidArgument(format!(
            "indices ({i}, {k}, {l}) out of range for n = {n}"
        )));
    }
    let values = haar_samples(n, samples, g, |u| u[(i, k)].norm_sqr() * u[(i, l)].norm_sqr());
    let estimate = MonteCarloEstimate::from_samples(&values)?;
    let exact = if k == l { 2.0 } else { 1.0 } / (n * (n + 1)) as f64;
    let z_score = estimate.z_score(exact);
    Ok(OverlapMomentCheck {
        estimate,
        exact,
        z_score,
        agrees: z_score.abs() <= 4.0,
    })
}
