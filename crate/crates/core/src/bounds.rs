//! Commutator inequalities between Hermitian operators and their eigenbases,
//! plus the near-equality lemma for the quadratic Jensen inequality.
//!
//! With `C = spread(A) * spread(B)`, `c = min_gap(A) * min_gap(B)` and
//! `d = d(B_A, B_B)`:
//!
//! ```text
//! ||[A, B]|| <= sqrt(n) / 2 * C * d
//! d          <= sqrt(2 n) / c * ||[A, B]||     (non-degenerate spectra)
//! ```

use crate::distance::basis_distance;
use crate::linalg::{commutator, min_gap_sorted, operator_norm, spread, HermitianObservable};
use crate::{Error, Result};

/// A computed inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub tolerance: f64,
    /// `slack >= -tolerance`.
    pub satisfied: bool,
}

impl BoundReport {
    /// Relative tolerance `1e-9 * max(1, rhs)`.
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self::with_tolerance(lhs, rhs, 1e-9 * rhs.max(1.0))
    }

    pub fn with_tolerance(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            lhs,
            rhs,
            slack,
            tolerance,
            satisfied: slack >= -tolerance,
        }
    }

    /// `slack / max(1, rhs)`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / self.rhs.max(1.0)
    }
}

fn check_dims(a: &HermitianObservable, b: &HermitianObservable) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.dim())
}

/// Gaps at or below `1e-8 * max(spread, max |lambda|)` count as degenerate.
///
/// Eigenvectors are only resolved to about `eps * ||A|| / gap`, so the scale
/// includes the magnitude as well as the spread: `A + c I` with a tiny spread
/// and large `c` is numerically degenerate.
pub fn degeneracy_threshold(spectrum: &[f64]) -> f64 {
    let magnitude = spectrum.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-8 * spread(spectrum).max(magnitude)
}

fn require_non_degenerate(a: &HermitianObservable) -> Result<f64> {
    let gap = a.min_gap();
    let threshold = degeneracy_threshold(a.spectrum());
    if gap <= threshold {
        return Err(Error::DegenerateSpectrum { gap, threshold });
    }
    Ok(gap)
}

/// `||[A, B]|| <= sqrt(n)/2 * C * d(B_A, B_B)`, using the solver's
/// eigenbases (valid for any eigenbasis).
pub fn commutator_upper_bound(a: &HermitianObservable, b: &HermitianObservable) -> Result<BoundReport> {
    let n = check_dims(a, b)?;
    let lhs = operator_norm(&commutator(a.matrix(), b.matrix()));
    let spreads = a.spectral_spread() * b.spectral_spread();
    let d = basis_distance(a.eigenbasis(), b.eigenbasis())?;
    let rhs = (n as f64).sqrt() / 2.0 * spreads * d;
    Ok(BoundReport::new(lhs, rhs))
}

/// `d(B_A, B_B) <= sqrt(2n)/c * ||[A, B]||` for non-degenerate spectra.
pub fn commutator_lower_bound(a: &HermitianObservable, b: &HermitianObservable) -> Result<BoundReport> {
    let n = check_dims(a, b)?;
    let gaps = require_non_degenerate(a)? * require_non_degenerate(b)?;
    let lhs = basis_distance(a.eigenbasis(), b.eigenbasis())?;
    let norm = operator_norm(&commutator(a.matrix(), b.matrix()));
    // n = 1: no gaps, gaps = inf and the commutator vanishes
    let rhs = if norm == 0.0 {
        0.0
    } else {
        (2.0 * n as f64).sqrt() / gaps * norm
    };
    Ok(BoundReport::new(lhs, rhs))
}

/// `sum l_i x_i^2 - (sum l_i x_i)^2`, evaluated as the weighted variance
/// `sum l_i (x_i - mean)^2`.
pub fn jensen_gap(weights: &[f64], points: &[f64]) -> f64 {
    let mean: f64 = weights.iter().zip(points).map(|(l, x)| l * x).sum();
    weights.iter().zip(points).map(|(l, x)| l * (x - mean).powi(2)).sum()
}

/// `sum_{i<j} l_i l_j (x_i - x_j)^2`.
pub fn pairwise_gap(weights: &[f64], points: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..weights.len() {
        for j in i + 1..weights.len() {
            total += weights[i] * weights[j] * (points[i] - points[j]).powi(2);
        }
    }
    total
}

/// If the Jensen gap is at most `epsilon`, then
/// `sum l_i (1 - l_i) <= 2 epsilon / min_{i != j} |x_i - x_j|^2`.
pub fn jensen_gap_bound(weights: &[f64], points: &[f64], epsilon: f64) -> Result<BoundReport> {
    if weights.len() != points.len() || weights.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: points.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    if !((sum - 1.0).abs() <= 1e-10) || !(min >= 0.0) {
        return Err(Error::WeightsNotNormalized { sum, min });
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = min_gap_sorted(&sorted);
    let threshold = 1e-8 * spread(&sorted);
    if gap <= threshold {
        return Err(Error::PointsNotDistinct { gap, threshold });
    }
    let actual = jensen_gap(weights, points);
    let scale: f64 = weights.iter().zip(points).map(|(l, x)| l * x * x).sum();
    if !(epsilon >= actual - 1e-12 * scale.max(1.0)) {
        return Err(Error::InvalidArgument(format!(
            "epsilon = {epsilon:e} is below the actual Jensen gap {actual:e}"
        )));
    }
    let lhs: f64 = weights.iter().map(|l| l * (1.0 - l)).sum();
    let rhs = if epsilon == 0.0 {
        0.0
    } else {
        2.0 * epsilon / (gap * gap)
    };
    Ok(BoundReport::new(lhs, rhs))
}
