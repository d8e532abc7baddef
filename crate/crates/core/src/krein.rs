//! Maximal non-negative subspaces of the form of `T(γ)` at a resolvent
//! point `γ`.
//!
//! With `T(γ)` invertible, ℝᵈ splits orthogonally into the positive and
//! negative spectral subspaces `K₊`, `K₋`. Scaling the eigenvectors by
//! `|μ|^{-1/2}` makes the form read `|ξ₊|² − |ξ₋|²`, and in these weighted
//! coordinates the maximal non-negative subspaces are exactly the graphs
//! `{ξ₊ + Cξ₊}` of contractions `C: K₊ → K₋`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::OperatorFamily;
use crate::linalg::{compress_orthonormal, eigh, spectral_norm, SubspaceBasis, SymMatrix};
use crate::report::ser_basis;
use crate::sampling::{haar_orthogonal, rng_from_seed};

/// Slack on the contraction norm.
pub const CONTRACTION_SLACK: f64 = 1e-12;

/// Spectral splitting of `T(γ)` with `|t(γ)|`-normalizing weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreinFrame {
    pub gamma: f64,
    /// Orthonormal eigenvectors of the positive eigenvalues.
    #[serde(serialize_with = "ser_basis")]
    pub k_plus: SubspaceBasis,
    /// Orthonormal eigenvectors of the negative eigenvalues.
    #[serde(serialize_with = "ser_basis")]
    pub k_minus: SubspaceBasis,
    /// `√μ` for each column of `k_plus`.
    pub w_plus: Vec<f64>,
    /// `√|μ|` for each column of `k_minus`.
    pub w_minus: Vec<f64>,
}

impl KreinFrame {
    pub fn ambient_dim(&self) -> usize {
        self.k_plus.ambient_dim()
    }

    /// `K₊` columns divided by their weights: unit vectors of the form.
    fn plus_columns(&self) -> DMatrix<f64> {
        scaled_columns(self.k_plus.matrix(), &self.w_plus, |w| 1.0 / w)
    }

    fn minus_columns(&self) -> DMatrix<f64> {
        scaled_columns(self.k_minus.matrix(), &self.w_minus, |w| 1.0 / w)
    }
}

fn scaled_columns(m: &DMatrix<f64>, w: &[f64], f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let mut out = m.clone();
    for (j, mut c) in out.column_iter_mut().enumerate() {
        c *= f(w[j]);
    }
    out
}

/// Splits `T(γ)`; fails when `T(γ)` has an eigenvalue within
/// `1e-8·(1 + ‖T(γ)‖)` of zero.
pub fn krein_frame(f: &OperatorFamily, gamma: f64) -> Result<KreinFrame> {
    let t = f.evaluate(gamma)?;
    let tol = t.default_tol();
    let eig = eigh(&t)?;
    let min_abs = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_abs <= tol {
        return Err(Error::NotInResolvent { gamma, min_abs, tol });
    }
    let w_plus = eig.values.iter().filter(|&&v| v > 0.0).map(|v| v.sqrt()).collect();
    let w_minus = eig.values.iter().filter(|&&v| v < 0.0).map(|v| (-v).sqrt()).collect();
    Ok(KreinFrame {
        gamma,
        k_plus: eig.select(|v| v > 0.0),
        k_minus: eig.select(|v| v < 0.0),
        w_plus,
        w_minus,
    })
}

/// A maximal non-negative subspace together with its angular operator.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxNonnegSubspace {
    pub frame: KreinFrame,
    /// `dim K₋ × dim K₊`, spectral norm at most one.
    pub contraction: DMatrix<f64>,
    /// Columns `ξ₊ + Cξ₊` over the weighted `K₊` basis.
    pub basis: SubspaceBasis,
}

impl MaxNonnegSubspace {
    pub fn from_contraction(frame: KreinFrame, c: DMatrix<f64>) -> Result<Self> {
        let (p, m) = (frame.k_plus.dim(), frame.k_minus.dim());
        if c.nrows() != m || c.ncols() != p {
            return Err(Error::Dimension { expected: m * p, found: c.nrows() * c.ncols() });
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = spectral_norm(&c);
        if norm > 1.0 + CONTRACTION_SLACK {
            return Err(Error::ContractionViolation { norm });
        }
        let cols = frame.plus_columns() + frame.minus_columns() * &c;
        let basis = if p == 0 { SubspaceBasis::empty(frame.ambient_dim()) } else { SubspaceBasis::new(cols)? };
        Ok(Self { frame, contraction: c, basis })
    }

    /// The spectral subspace `K₊` itself (`C = 0`).
    pub fn canonical(frame: KreinFrame) -> Self {
        let c = DMatrix::zeros(frame.k_minus.dim(), frame.k_plus.dim());
        let basis = frame.k_plus.clone();
        Self { frame, contraction: c, basis }
    }

    /// Recover the angular operator of a subspace given by any basis.
    ///
    /// In weighted coordinates `S` has components `Ξ₊`, `Ξ₋`, and
    /// `C = Ξ₋ Ξ₊⁻¹`. Fails unless `dim S = dim K₊` and `Ξ₊` is invertible.
    pub fn from_basis(frame: KreinFrame, s: &SubspaceBasis) -> Result<Self> {
        if s.ambient_dim() != frame.ambient_dim() {
            return Err(Error::Dimension { expected: frame.ambient_dim(), found: s.ambient_dim() });
        }
        let p = frame.k_plus.dim();
        if s.dim() != p {
            return Err(Error::Precondition(format!(
                "subspace has dimension {} but the positive part has dimension {p}",
                s.dim()
            )));
        }
        let xi_plus = weight_rows(frame.k_plus.matrix().transpose() * s.matrix(), &frame.w_plus);
        let xi_minus = weight_rows(frame.k_minus.matrix().transpose() * s.matrix(), &frame.w_minus);
        let c = if p == 0 {
            DMatrix::zeros(frame.k_minus.dim(), 0)
        } else {
            let ct = xi_plus
                .transpose()
                .lu()
                .solve(&xi_minus.transpose())
                .ok_or_else(|| Error::Precondition("subspace meets the negative part".into()))?;
            ct.transpose()
        };
        Self::from_contraction(frame, c)
    }
}

fn weight_rows(mut m: DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    for (i, mut r) in m.row_iter_mut().enumerate() {
        r *= w[i];
    }
    m
}

impl Serialize for MaxNonnegSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MaxNonnegSubspace", 3)?;
        st.serialize_field("gamma", &self.frame.gamma)?;
        let rows: Vec<Vec<f64>> = self.contraction.row_iter().map(|r| r.iter().copied().collect()).collect();
        st.serialize_field("contraction", &rows)?;
        let cols: Vec<Vec<f64>> = self.basis.matrix().column_iter().map(|c| c.iter().copied().collect()).collect();
        st.serialize_field("basis", &cols)?;
        st.end()
    }
}

/// Knobs for contraction sampling.
#[derive(Debug, Clone, Copy, Default)]
pub struct SampleOptions {
    /// Use singular values equal to one, giving subspaces with neutral
    /// directions.
    pub pin_to_one: bool,
}

/// Draw `C = U Σ Vᵀ` with Haar `U`, `V` and singular values uniform on
/// `[0, 1]` (or all one when pinned).
pub fn sample_contraction(frame: &KreinFrame, opts: SampleOptions, rng: &mut impl Rng) -> DMatrix<f64> {
    let (p, m) = (frame.k_plus.dim(), frame.k_minus.dim());
    let u = haar_orthogonal(m, rng);
    let v = haar_orthogonal(p, rng);
    let mut sigma = DMatrix::zeros(m, p);
    for i in 0..m.min(p) {
        sigma[(i, i)] = if opts.pin_to_one { 1.0 } else { rng.random_range(0.0..=1.0) };
    }
    u * sigma * v.transpose()
}

pub fn sample_max_nonneg_in(frame: &KreinFrame, opts: SampleOptions, rng: &mut impl Rng) -> Result<MaxNonnegSubspace> {
    let c = sample_contraction(frame, opts, rng);
    MaxNonnegSubspace::from_contraction(frame.clone(), c)
}

/// Seeded random maximal non-negative subspace at `γ`.
pub fn sample_max_nonneg(f: &OperatorFamily, gamma: f64, seed: u64) -> Result<MaxNonnegSubspace> {
    let frame = krein_frame(f, gamma)?;
    sample_max_nonneg_in(&frame, SampleOptions::default(), &mut rng_from_seed(seed))
}

/// `λ_min(T(γ)|_S) ≥ −1e-8·(1 + ‖T(γ)‖)`.
pub fn is_nonneg(f: &OperatorFamily, gamma: f64, s: &SubspaceBasis) -> Result<bool> {
    let t = f.evaluate(gamma)?;
    nonneg_for(&t, s)
}

fn nonneg_for(t: &SymMatrix, s: &SubspaceBasis) -> Result<bool> {
    if s.ambient_dim() != t.dim() {
        return Err(Error::Dimension { expected: t.dim(), found: s.ambient_dim() });
    }
    if s.is_empty() {
        return Ok(true);
    }
    Ok(eigh(&compress_orthonormal(t, &s.orthonormal()))?.min() >= -t.default_tol())
}

/// Non-negative and of dimension `dim K₊`; in finite dimension this is
/// exactly maximality.
pub fn is_maximal_nonneg(f: &OperatorFamily, gamma: f64, s: &SubspaceBasis) -> Result<bool> {
    let frame = krein_frame(f, gamma)?;
    Ok(s.dim() == frame.k_plus.dim() && is_nonneg(f, gamma, s)?)
}
