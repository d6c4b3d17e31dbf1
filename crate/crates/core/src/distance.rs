//! Distance between orthonormal bases.
//!
//! For `B1 = (e_i)` and `B2 = (f_j)` the overlap matrix `o_ij = |<e_i|f_j>|^2`
//! is doubly stochastic and
//!
//! ```text
//! d(B1, B2)^2 = sum_ij o_ij (1 - o_ij)
//! ```
//!
//! `d` vanishes exactly when one basis is a relabelling (permutation and
//! rephasing) of the other, and reaches its maximum `sqrt(n - 1)` exactly when
//! the bases are mutually unbiased.

use nalgebra::DMatrix;

use crate::linalg::OrthonormalBasis;
use crate::{Error, Result};

/// `o_ij = |<e_i|f_j>|^2`; rows index the first basis, columns the second.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    entries: DMatrix<f64>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Largest `|row sum - 1|` or `|column sum - 1|`.
    pub fn stochasticity_defect(&self) -> f64 {
        let rows = self.entries.row_iter().map(|r| (r.sum() - 1.0).abs());
        let cols = self.entries.column_iter().map(|c| (c.sum() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// Whether every row holds a single entry `>= 1 - n * tol`, i.e. the
    /// overlap is a permutation matrix and the bases differ by a relabelling.
    pub fn is_permutation(&self, tol: f64) -> bool {
        let n = self.dim();
        let threshold = 1.0 - n as f64 * tol;
        self.entries
            .row_iter()
            .all(|r| r.iter().filter(|&&o| o >= threshold).count() == 1)
    }

    /// `sum_ij o_ij (1 - o_ij)`.
    ///
    /// `1 - o_ij` is evaluated as the rest of row `i`, `sum_{k != j} o_ik`
    /// (rows sum to one), from prefix and suffix sums. This avoids the
    /// cancellation in `1 - o_ij` when `o_ij` is close to 1, so small
    /// distances keep their relative accuracy.
    pub fn distance_squared(&self) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        let mut prefix = vec![0.0; n + 1];
        for row in self.entries.row_iter() {
            for j in 0..n {
                prefix[j + 1] = prefix[j] + row[j];
            }
            let mut suffix = 0.0;
            for j in (0..n).rev() {
                total += row[j] * (prefix[j] + suffix);
                suffix += row[j];
            }
        }
        total
    }
}

fn check_dims(b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<()> {
    if b1.dim() != b2.dim() {
        return Err(Error::DimensionMismatch {
            expected: b1.dim(),
            found: b2.dim(),
        });
    }
    Ok(())
}

pub fn overlap_matrix(b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<OverlapMatrix> {
    check_dims(b1, b2)?;
    let inner = b1.matrix().adjoint() * b2.matrix();
    Ok(OverlapMatrix {
        entries: inner.map(|z| z.norm_sqr()),
    })
}

/// `d(B1, B2)`, in `[0, sqrt(n - 1)]`.
pub fn basis_distance(b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<f64> {
    Ok(overlap_matrix(b1, b2)?.distance_squared().max(0.0).sqrt())
}

/// True iff `max_ij |o_ij - 1/n| <= tol`.
pub fn is_mutually_unbiased(b1: &OrthonormalBasis, b2: &OrthonormalBasis, tol: f64) -> Result<bool> {
    let o = overlap_matrix(b1, b2)?;
    let target = 1.0 / o.dim() as f64;
    Ok(o.entries.iter().all(|&v| (v - target).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{random_basis, SeededGenerator};
    use crate::linalg::{c, CMatrix};
    use approx::assert_abs_diff_eq;

    fn x_basis() -> OrthonormalBasis {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        OrthonormalBasis::from_columns(
            CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
            &Default::default(),
        )
        .unwrap()
    }

    /// Textbook formula for `d^2`, evaluated literally.
    fn direct_distance_squared(b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> f64 {
        let n = b1.dim();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let o = b1.matrix().column(i).dotc(&b2.matrix().column(j)).norm_sqr();
                total += o * (1.0 - o);
            }
        }
        total
    }

    #[test]
    fn overlap_of_basis_with_itself_is_identity() {
        let mut g = SeededGenerator::new(1);
        let b = random_basis(5, &mut g);
        let o = overlap_matrix(&b, &b).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_abs_diff_eq!(o.get(i, j), if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
        assert!(o.is_permutation(1e-10));
    }

    #[test]
    fn z_versus_x_qubit() {
        let z = OrthonormalBasis::standard(2);
        let x = x_basis();
        let o = overlap_matrix(&z, &x).unwrap();
        assert!(o.entries().iter().all(|&v| (v - 0.5).abs() < 1e-15));
        assert_abs_diff_eq!(basis_distance(&z, &x).unwrap(), 1.0, epsilon = 1e-15);
        assert!(is_mutually_unbiased(&z, &x, 1e-12).unwrap());
        assert!(!is_mutually_unbiased(&z, &z, 1e-12).unwrap());
    }

    #[test]
    fn random_pairs_are_doubly_stochastic() {
        let mut g = SeededGenerator::new(2);
        for n in 1..=12 {
            let (a, b) = (random_basis(n, &mut g), random_basis(n, &mut g));
            assert!(overlap_matrix(&a, &b).unwrap().stochasticity_defect() < 1e-9);
        }
    }

    #[test]
    fn relabelling_has_zero_distance() {
        let mut g = SeededGenerator::new(3);
        let b = random_basis(4, &mut g);
        let r = b.relabelled(&[2, 0, 3, 1], &[0.3, -1.2, 2.9, 0.0]).unwrap();
        assert!(basis_distance(&b, &r).unwrap() < 1e-12);
        assert!(overlap_matrix(&b, &r).unwrap().is_permutation(1e-10));
    }

    #[test]
    fn fourier_basis_is_unbiased_with_standard() {
        for n in [2usize, 3, 4, 7, 16] {
            let f = OrthonormalBasis::fourier(n);
            let e = OrthonormalBasis::standard(n);
            assert!(is_mutually_unbiased(&e, &f, 1e-12).unwrap());
            assert_abs_diff_eq!(
                basis_distance(&e, &f).unwrap(),
                ((n - 1) as f64).sqrt(),
                epsilon = 1e-12
            );
        }
        // dim-4 DFT rows, checked entry by entry
        let f = OrthonormalBasis::fourier(4);
        for z in f.matrix().iter() {
            assert_abs_diff_eq!(z.norm_sqr(), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn rotated_qubit_matches_direct_formula() {
        let z = OrthonormalBasis::standard(2);
        for k in 0..20 {
            let theta = k as f64 * std::f64::consts::PI / 19.0;
            let (s, co) = theta.sin_cos();
            let rot = OrthonormalBasis::from_columns(
                CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]),
                &Default::default(),
            )
            .unwrap();
            let d = basis_distance(&z, &rot).unwrap();
            // o = cos^2, sin^2 twice each: d^2 = 4 sin^2 cos^2
            assert_abs_diff_eq!(d, (4.0 * s * s * co * co).sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(d * d, direct_distance_squared(&z, &rot), epsilon = 1e-12);
        }
    }

    #[test]
    fn matches_direct_formula_on_random_pairs() {
        let mut g = SeededGenerator::new(4);
        for n in 1..=10 {
            for _ in 0..20 {
                let (a, b) = (random_basis(n, &mut g), random_basis(n, &mut g));
                let d = basis_distance(&a, &b).unwrap();
                assert_abs_diff_eq!(d * d, direct_distance_squared(&a, &b), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let r = basis_distance(&OrthonormalBasis::standard(2), &OrthonormalBasis::standard(3));
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 2, found: 3 })));
    }
}
