//! Coherence of a state relative to a basis.
//!
//! Writing `rho` in a basis `B = (e_i)` splits it into a diagonal part
//! `D_B[rho]`, which reproduces the total probability formula, and an
//! off-diagonal part `Q_B[rho]`, which carries the interference terms. For
//! any subspace `F` the deviation from the formula is
//! `|tr(rho P_F) - tr(D_B[rho] P_F)| = |tr(Q_B[rho] P_F)|`.

use std::fmt;

use crate::distance::basis_distance;
use crate::linalg::{
    c, shannon_entropy, von_neumann_entropy, CMatrix, Complex64, DensityMatrix, OrthonormalBasis, Subspace,
};
use crate::{Error, Result};

/// A state together with its matrix `rep_ij = <e_i|rho|e_j>` in a basis.
#[derive(Debug, Clone)]
pub struct StateInBasis<'a> {
    rho: &'a DensityMatrix,
    basis: &'a OrthonormalBasis,
    rep: CMatrix,
}

impl<'a> StateInBasis<'a> {
    pub fn rho(&self) -> &'a DensityMatrix {
        self.rho
    }

    pub fn basis(&self) -> &'a OrthonormalBasis {
        self.basis
    }

    pub fn rep(&self) -> &CMatrix {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.nrows()
    }

    /// Diagonal of `rep` (a probability vector).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rep[(i, i)].re).collect()
    }

    fn off_diagonal(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.dim();
        (0..n).flat_map(move |j| (0..n).filter(move |&i| i != j).map(move |i| self.rep[(i, j)]))
    }
}

/// `rep = B^H rho B`, made exactly Hermitian.
pub fn rewrite_in_basis<'a>(rho: &'a DensityMatrix, basis: &'a OrthonormalBasis) -> Result<StateInBasis<'a>> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: basis.dim(),
        });
    }
    let rep = if rho.is_exactly_maximally_mixed() {
        // U^H (I/n) U = I/n exactly
        rho.matrix().clone()
    } else {
        let b = basis.matrix();
        let raw = b.adjoint() * rho.matrix() * b;
        let mut rep = (&raw + raw.adjoint()).scale(0.5);
        for i in 0..rep.nrows() {
            rep[(i, i)].im = 0.0;
        }
        rep
    };
    Ok(StateInBasis { rho, basis, rep })
}

/// `D_B[rho]`, as a diagonal state in the coordinates of `B`.
pub fn diagonal_part(s: &StateInBasis) -> DensityMatrix {
    DensityMatrix::diagonal_unchecked(&s.diagonal())
}

/// `Q_B[rho]` in the coordinates of `B`: `rep` with its diagonal zeroed.
pub fn off_diagonal_part(s: &StateInBasis) -> CMatrix {
    let mut q = s.rep.clone();
    for i in 0..q.nrows() {
        q[(i, i)] = Complex64::default();
    }
    q
}

/// `l1` norm of coherence, `sum_{i != j} |rho_ij|`.
pub fn eta1(s: &StateInBasis) -> f64 {
    s.off_diagonal().map(|z| z.norm()).sum()
}

/// `l2` norm of coherence, `(sum_{i != j} |rho_ij|^2)^(1/2)`.
pub fn eta2(s: &StateInBasis) -> f64 {
    s.off_diagonal().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `n * max_{i != j} |rho_ij|`.
pub fn eta_inf(s: &StateInBasis) -> f64 {
    s.dim() as f64 * s.off_diagonal().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance between the (solver's) eigenbasis of `rho` and `B`.
pub fn delta(s: &StateInBasis) -> f64 {
    basis_distance(s.rho.eigenbasis(), s.basis).expect("dimensions checked at construction")
}

/// Relative entropy of coherence `c [S(D_B[rho]) - S(rho)]` in nats, clamped
/// at zero against rounding.
pub fn s_rel(s: &StateInBasis, c: f64) -> f64 {
    let diff = shannon_entropy(&s.diagonal()) - von_neumann_entropy(s.rho);
    (c * diff).max(0.0)
}

/// `|tr(Q_B[rho] P_F)| = |sum_k <pi_k|Q|pi_k>|` over an orthonormal frame of `F`.
pub fn tpf_deviation(s: &StateInBasis, f: &Subspace) -> Result<f64> {
    if f.ambient_dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: f.ambient_dim(),
        });
    }
    let q = off_diagonal_part(s);
    // frame in the coordinates of B
    let p = s.basis.matrix().adjoint() * f.frame();
    let qp = &q * &p;
    let total: f64 = (0..p.ncols()).map(|k| p.column(k).dotc(&qp.column(k)).re).sum();
    Ok(total.abs())
}

/// The candidate measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureId {
    Eta1,
    Eta2,
    EtaInf,
    Delta,
    /// Relative entropy of coherence scaled by `c > 0`.
    SRel(f64),
}

impl MeasureId {
    /// The four maps that satisfy both axioms.
    pub const COHERENCE_MEASURES: [MeasureId; 4] = [Self::Eta1, Self::Eta2, Self::EtaInf, Self::Delta];

    pub fn srel(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "S_rel constant must be positive, got {c}"
            )));
        }
        Ok(Self::SRel(c))
    }

    /// Numeric code used in CSV reports.
    pub fn code(&self) -> u8 {
        match self {
            Self::Eta1 => 1,
            Self::Eta2 => 2,
            Self::EtaInf => 3,
            Self::Delta => 4,
            Self::SRel(_) => 5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Eta1 => "eta1",
            Self::Eta2 => "eta2",
            Self::EtaInf => "eta_inf",
            Self::Delta => "delta",
            Self::SRel(_) => "srel",
        }
    }

    /// Parses `eta1`, `eta2`, `eta_inf`, `delta`, `srel`; `srel` takes the
    /// given constant.
    pub fn parse(name: &str, srel_constant: f64) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "eta1" => Ok(Self::Eta1),
            "eta2" => Ok(Self::Eta2),
            "eta_inf" | "etainf" => Ok(Self::EtaInf),
            "delta" => Ok(Self::Delta),
            "srel" | "s_rel" => Self::srel(srel_constant),
            other => Err(Error::InvalidArgument(format!("unknown measure '{other}'"))),
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SRel(c) => write!(f, "srel(c={c})"),
            other => f.write_str(other.name()),
        }
    }
}

pub fn measure_value(s: &StateInBasis, id: MeasureId) -> f64 {
    match id {
        MeasureId::Eta1 => eta1(s),
        MeasureId::Eta2 => eta2(s),
        MeasureId::EtaInf => eta_inf(s),
        MeasureId::Delta => delta(s),
        MeasureId::SRel(c) => s_rel(s, c),
    }
}

/// The 2x2 state `[[1/2, eps/2], [eps/2, 1/2]]`.
pub fn counterexample_state(epsilon: f64) -> Result<DensityMatrix> {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[c(0.5, 0.0), c(0.5 * epsilon, 0.0), c(0.5 * epsilon, 0.0), c(0.5, 0.0)],
    );
    DensityMatrix::new(&m, &Default::default())
}

/// The line spanned by `(e_1 + e_2) / sqrt(2)`.
pub fn counterexample_subspace() -> Subspace {
    Subspace::line(&[c(1.0, 0.0), c(1.0, 0.0)]).expect("non-zero vector")
}
