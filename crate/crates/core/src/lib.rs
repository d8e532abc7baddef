//! Spectral analysis of self-adjoint operator functions `λ ↦ T(λ)` at
//! matrix scale.
//!
//! The crate computes generalized Rayleigh functionals, eigenvalues of
//! operator functions through a monotone counting function, triple
//! variational characterizations of eigenvalues above a resolvent point,
//! resolvent-point and spectral-gap certificates, and the three-way
//! spectral decomposition of ℝᵈ attached to an interval. Every routine is
//! cross-checked in the test suites against an independent reference.
//!
//! Modules, bottom up:
//!
//! * [`linalg`]: symmetric eigendecomposition, spectral subspaces, inertia.
//! * [`families`]: operator families, the monotone-crossing check, file format, demo corpus.
//! * [`rayleigh`]: the Rayleigh functional `p(x)` and its subspace minimum.
//! * [`krein`]: maximal non-negative subspaces at a resolvent point.
//! * [`spectra`]: counting function, spectra, slope-condition and resolvent certificates, decomposition.
//! * [`varbounds`]: classical and triple variational values, witness subspaces.
//! * [`perturb`]: spectral gaps under non-negative perturbations.

// `!(a < b)` comparisons are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod interval;
pub mod krein;
pub mod linalg;
pub mod perturb;
pub mod rayleigh;
pub mod report;
pub mod sampling;
pub mod spectra;
pub mod varbounds;

pub use error::{Error, Result};
pub use families::{FamilyKind, OperatorFamily};
pub use interval::Interval;
pub use linalg::{Inertia, SubspaceBasis, SymMatrix};
pub use rayleigh::ExtendedReal;

