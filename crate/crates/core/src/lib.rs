//! Basis-relative quantum coherence.
//!
//! Coherence of a state `rho` is measured *relative to an orthonormal basis*
//! as the ability of `rho` to violate the total probability formula when
//! probabilities are conditioned on observables diagonal in that basis. The
//! crate provides:
//!
//! - [`linalg`]: validated density matrices, bases, observables and subspaces
//!   on top of dense complex linear algebra;
//! - [`distance`]: the distance between orthonormal bases and mutual
//!   unbiasedness;
//! - [`bounds`]: commutator-norm inequalities relating that distance to
//!   `[A, B]`, and the near-equality lemma for the quadratic Jensen inequality;
//! - [`coherence`] and [`axioms`]: the coherence measures (`eta_1`, `eta_2`,
//!   `eta_inf`, `delta`, relative entropy of coherence), the TPF deviation,
//!   and randomized checkers for the two axioms of a coherence measure;
//! - [`haar`]: Haar-random unitaries and bases, exact single-row moments and
//!   seeded, worker-count-independent Monte Carlo;
//! - [`experiments`] and [`cli`]: reproducible CSV experiment reports and the
//!   command-line front end.

// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod bounds;
pub mod cli;
pub mod coherence;
pub mod distance;
mod error;
pub mod experiments;
pub mod haar;
pub mod linalg;

pub use error::{Error, Result};
pub use linalg::{
    operator_norm, purity, von_neumann_entropy, CMatrix, Complex64, DensityMatrix, HermitianObservable,
    OrthonormalBasis, Subspace, Tolerances,
};
