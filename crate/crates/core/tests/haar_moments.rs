use basis_coherence::haar::{
    haar_samples, monomial_moment, sample_haar_unitary, sample_uncorrected_qr, MonteCarloEstimate, SeededGenerator,
};
use basis_coherence::linalg::{CMatrix, OrthonormalBasis};

/// Exponent patterns with total degree at most 4.
const PATTERNS: &[&[u32]] = &[
    &[1],
    &[2],
    &[1, 1],
    &[3],
    &[2, 1],
    &[1, 1, 1],
    &[4],
    &[3, 1],
    &[2, 2],
    &[2, 1, 1],
    &[1, 1, 1, 1],
];

/// `(n-1)! prod a_k! / (n-1+m)!` in exact integer arithmetic.
fn sphere_moment(n: usize, a: &[u32]) -> f64 {
    let fact = |k: u64| (1..=k).product::<u64>() as f64;
    let m: u64 = a.iter().map(|&x| u64::from(x)).sum();
    let num: f64 = a.iter().map(|&x| fact(u64::from(x))).product();
    fact(n as u64 - 1) * num / fact(n as u64 - 1 + m)
}

#[test]
fn row_monomial_moments_match_closed_form() {
    let samples = 100_000;
    let mut g = SeededGenerator::new(2024);
    for n in [2usize, 3, 4, 8] {
        let patterns: Vec<&[u32]> = PATTERNS.iter().copied().filter(|a| a.len() <= n).collect();
        let values = haar_samples(n, samples, &mut g, |u| {
            patterns
                .iter()
                .map(|a| {
                    a.iter()
                        .enumerate()
                        .map(|(k, &e)| u[(0, k)].norm_sqr().powi(e as i32))
                        .product::<f64>()
                })
                .collect::<Vec<f64>>()
        });
        for (p, a) in patterns.iter().enumerate() {
            let column: Vec<f64> = values.iter().map(|v| v[p]).collect();
            let est = MonteCarloEstimate::from_samples(&column).unwrap();
            let exact_n = exact_for(n, a);
            assert!(
                (exact_n - sphere_moment(n, a)).abs() <= 1e-12 * exact_n,
                "closed forms disagree"
            );
            let z = est.z_score(exact_n);
            assert!(
                z.abs() <= 4.0,
                "n = {n}, a = {a:?}: mean {} vs {exact_n} (z = {z})",
                est.mean
            );
        }
    }
}

/// `monomial_moment` takes the exponents padded to length `n`.
fn exact_for(n: usize, a: &[u32]) -> f64 {
    let mut padded = a.to_vec();
    padded.resize(n, 0);
    monomial_moment(&padded)
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Critical value at significance `1e-4`.
fn ks_critical(n: usize, m: usize) -> f64 {
    let c = (-(1e-4f64 / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}

fn invariance_statistic(sampler: fn(usize, &mut SeededGenerator) -> CMatrix, seed: u64) -> (f64, f64) {
    let n = 3;
    let count = 20_000;
    let v = OrthonormalBasis::fourier(n).into_matrix();
    let mut g = SeededGenerator::new(seed);
    let mut plain = Vec::with_capacity(count);
    let mut shifted = Vec::with_capacity(count);
    for _ in 0..count {
        plain.push(sampler(n, &mut g)[(0, 0)].re);
        shifted.push((&v * sampler(n, &mut g))[(0, 0)].re);
    }
    (ks_statistic(plain, shifted), ks_critical(count, count))
}

#[test]
fn corrected_sampler_is_left_invariant() {
    let (d, crit) = invariance_statistic(sample_haar_unitary, 5);
    assert!(d < crit, "KS {d} >= {crit}");
}

#[test]
fn uncorrected_qr_is_detected() {
    let (d, crit) = invariance_statistic(sample_uncorrected_qr, 5);
    assert!(d > crit, "negative control not detected: KS {d} <= {crit}");
}

#[test]
fn ks_statistic_oracle() {
    assert_eq!(ks_statistic(vec![1.0, 2.0], vec![1.0, 2.0]), 0.0);
    assert_eq!(ks_statistic(vec![0.0, 1.0], vec![2.0, 3.0]), 1.0);
    assert!((ks_statistic(vec![0.0, 2.0], vec![1.0, 3.0]) - 0.5).abs() < 1e-15);
}
