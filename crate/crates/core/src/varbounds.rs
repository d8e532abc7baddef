//! Variational values of eigenvalues above a resolvent point `γ`.
//!
//! The `n`-th eigenvalue above `γ` satisfies
//!
//! ```text
//! λₙ = sup_{M ∈ M_γ⁺} sup_{L ⊂ M, dim L = n−1} inf_{x ∈ M, x ⊥ L, x ≠ 0} p(x)
//! ```
//!
//! where `M_γ⁺` are the maximal non-negative subspaces of the form of
//! `T(γ)`. This module evaluates the inner infimum exactly, explores the
//! two suprema by sampling (which can only give lower bounds), and builds
//! the explicit pair `(M, L)` that attains `λₙ`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::OperatorFamily;
use crate::interval::Interval;
use crate::krein::{is_maximal_nonneg, krein_frame, sample_max_nonneg_in, SampleOptions};
use crate::linalg::{compress_orthonormal, eigh, hstack, orthonormalize, SubspaceBasis, SymMatrix};
use crate::rayleigh::{ExtendedReal, Scanner};
use crate::report::ser_basis;
use crate::sampling::{gaussian_matrix, substream};
use crate::spectra::{counting, spectrum_in, SpectralPoint, BISECT_REL};

/// Infinite domain ends are clipped here when scanning for `p(x)`.
pub const SCAN_LIMIT: f64 = 1e3;
/// Bracketing grid of the Rayleigh scans.
pub const SCAN_GRID: usize = 129;
/// Containment slack for `L ⊆ M`.
pub const CONTAIN_TOL: f64 = 1e-10;
pub const EQ_TOL: f64 = 1e-6;
pub const INEQ_TOL: f64 = 1e-8;

/// `n`-th smallest eigenvalue of `A` as a min-max and as a max-min of the
/// Rayleigh quotient, each evaluated on its optimal subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalValue {
    /// `min_{dim S = n} max_{x ∈ S} R(x)`, attained at the span of the first
    /// `n` eigenvectors.
    pub min_max: f64,
    /// `max_{dim L = n−1} min_{x ⊥ L} R(x)`, attained at the span of the
    /// first `n − 1` eigenvectors.
    pub max_min: f64,
    pub eigh: f64,
}

pub fn classical_double_variation(a: &SymMatrix, n: usize) -> Result<ClassicalValue> {
    let d = a.dim();
    if n == 0 || n > d {
        return Err(Error::IndexOutOfRange { n, max: d });
    }
    let e = eigh(a)?;
    let first = |k: usize| e.vectors.columns(0, k).into_owned();
    let min_max = eigh(&compress_orthonormal(a, &first(n)))?.max();
    let l = SubspaceBasis::new(first(n - 1))?;
    let complement = SubspaceBasis::full(d).complement_of(&l, CONTAIN_TOL)?;
    let max_min = eigh(&compress_orthonormal(a, complement.matrix()))?.min();
    let value = e.values[n - 1];
    let tol = 1e-9 * (1.0 + value.abs());
    if (min_max - value).abs() > tol || (max_min - value).abs() > tol {
        return Err(Error::Consistency(format!(
            "variational values {min_max} / {max_min} disagree with eigenvalue {value}"
        )));
    }
    Ok(ClassicalValue { min_max, max_min, eigh: value })
}

/// Scanner over the whole domain, used for every Rayleigh evaluation here.
pub fn domain_scanner(f: &OperatorFamily) -> Result<Scanner<'_>> {
    Scanner::over_domain(f, SCAN_LIMIT, SCAN_GRID)
}

/// `inf { p(x) : x ∈ M, x ⊥ L, x ≠ 0 }` with Euclidean orthogonality.
pub fn inner_variation(f: &OperatorFamily, m: &SubspaceBasis, l: &SubspaceBasis) -> Result<ExtendedReal> {
    inner_variation_with(&domain_scanner(f)?, m, l)
}

pub fn inner_variation_with(scanner: &Scanner<'_>, m: &SubspaceBasis, l: &SubspaceBasis) -> Result<ExtendedReal> {
    if l.dim() >= m.dim() {
        return Err(Error::Precondition(format!("dim L = {} must be below dim M = {}", l.dim(), m.dim())));
    }
    let complement = m.complement_of(l, CONTAIN_TOL)?;
    scanner.min_over(&complement)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationMode {
    Sampled,
    Witness,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationResult {
    pub n: usize,
    pub value: ExtendedReal,
    #[serde(serialize_with = "ser_basis")]
    pub witness_m: SubspaceBasis,
    #[serde(serialize_with = "ser_basis")]
    pub witness_l: SubspaceBasis,
    pub mode: VariationMode,
    /// Number of `(M, L)` pairs evaluated.
    pub pairs: usize,
}

/// Lower bound for `λₙ` from `samples` random pairs `(M, L)` plus the
/// constructed witness pair when it exists.
///
/// `M` is drawn through a random contraction, `L` as a random
/// `(n − 1)`-frame inside `M`. When `dim M_γ⁺ < n` no admissible `L`
/// exists and the value is `−∞`.
pub fn triple_lower_bound(f: &OperatorFamily, gamma: f64, n: usize, samples: usize, seed: u64) -> Result<VariationResult> {
    if n == 0 {
        return Err(Error::IndexOutOfRange { n, max: f.dim() });
    }
    let frame = krein_frame(f, gamma)?;
    let d = f.dim();
    if frame.k_plus.dim() < n {
        return Ok(VariationResult {
            n,
            value: ExtendedReal::NegInf,
            witness_m: SubspaceBasis::empty(d),
            witness_l: SubspaceBasis::empty(d),
            mode: VariationMode::Sampled,
            pairs: 0,
        });
    }
    let scanner = domain_scanner(f)?;
    let draws: Vec<(ExtendedReal, SubspaceBasis, SubspaceBasis)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let m = sample_max_nonneg_in(&frame, SampleOptions::default(), &mut rng)?.basis;
            let q = m.orthonormal();
            let coeffs = gaussian_matrix(q.ncols(), n - 1, &mut rng);
            let l = SubspaceBasis::new(orthonormalize(&(&q * coeffs)))?;
            let v = inner_variation_with(&scanner, &m, &l)?;
            Ok((v, m, l))
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(ExtendedReal, SubspaceBasis, SubspaceBasis, VariationMode)> = None;
    let mut pairs = draws.len();
    if let Ok(w) = witness_subspaces(f, gamma, n) {
        let v = inner_variation_with(&scanner, &w.m, &w.l)?;
        best = Some((v, w.m, w.l, VariationMode::Witness));
        pairs += 1;
    }
    for (v, m, l) in draws {
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, m, l, VariationMode::Sampled));
        }
    }
    let (value, witness_m, witness_l, mode) = best.ok_or_else(|| Error::Precondition("no pairs sampled".into()))?;
    Ok(VariationResult { n, value, witness_m, witness_l, mode, pairs })
}

/// The pair `(M, L)` attaining `λₙ`, with the gap point `μ` used to build it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPair {
    #[serde(serialize_with = "ser_basis")]
    pub m: SubspaceBasis,
    #[serde(serialize_with = "ser_basis")]
    pub l: SubspaceBasis,
    pub mu: f64,
    /// `λₙ` as located by the spectrum solver.
    pub lambda_n: f64,
    /// Largest index `k` with `λₖ = λₙ`.
    pub m_index: usize,
}

/// Upper end of the eigenvalue search above `γ`: the domain end (clipped,
/// and moved inward when open or spectral).
fn search_top(f: &OperatorFamily) -> Result<f64> {
    let dom = f.domain();
    let mut top = dom.hi.min(SCAN_LIMIT);
    if dom.hi_open || top < dom.hi {
        top -= 1e-9 * (1.0 + top.abs());
    }
    let mut step = 1e-9 * (1.0 + top.abs());
    for _ in 0..40 {
        if !counting(f, top)?.boundary {
            return Ok(top);
        }
        top -= step;
        step *= 2.0;
    }
    Err(Error::NoGap(top))
}

/// Eigenvalues of the family in `(γ, top)`.
pub fn spectrum_above(f: &OperatorFamily, gamma: f64) -> Result<(Vec<SpectralPoint>, f64)> {
    let top = search_top(f)?;
    if !(gamma < top) {
        return Ok((Vec::new(), top));
    }
    Ok((spectrum_in(f, &Interval::closed(gamma, top), BISECT_REL)?.eigenvalues, top))
}

/// `M = span{u₁,…,u_m} + L₍₀,∞₎(T(μ))`, `L = (I − P_K) span{u₁,…,u_{n−1}}`
/// with `K = span{uₙ,…,u_m} + L₍₀,∞₎(T(μ))` and `μ` the midpoint of the
/// gap above `λ_m`.
pub fn witness_subspaces(f: &OperatorFamily, gamma: f64, n: usize) -> Result<WitnessPair> {
    if n == 0 {
        return Err(Error::IndexOutOfRange { n, max: f.dim() });
    }
    krein_frame(f, gamma)?;
    let (points, top) = spectrum_above(f, gamma)?;
    let found: usize = points.iter().map(|p| p.multiplicity).sum();
    if found < n {
        return Err(Error::InsufficientSpectrum { found, needed: n });
    }
    // Locate the spectral point holding index n.
    let mut upto = 0;
    let mut group = 0;
    for (i, p) in points.iter().enumerate() {
        upto += p.multiplicity;
        if upto >= n {
            group = i;
            break;
        }
    }
    let m_index = upto;
    let lambda_n = points[group].lambda;
    let next = points.get(group + 1).map(|p| p.lambda).unwrap_or(top);
    if !(next > lambda_n) {
        return Err(Error::NoGap(lambda_n));
    }
    let mu = 0.5 * (lambda_n + next);

    let d = f.dim();
    let u: Vec<&DMatrix<f64>> = points[..=group].iter().map(|p| p.eigenvectors.matrix()).collect();
    let u_all = hstack(d, u.into_iter());
    let positive = eigh(&f.evaluate(mu)?)?.select(|v| v > 0.0);

    let m = SubspaceBasis::new(hstack(d, [&u_all, positive.matrix()].into_iter()))?;
    let tail = u_all.columns(n - 1, m_index - n + 1).into_owned();
    let k_cols = hstack(d, [&tail, positive.matrix()].into_iter());
    let pk = orthonormalize(&k_cols);
    let head = u_all.columns(0, n - 1).into_owned();
    let l_cols = &head - &pk * (pk.transpose() * &head);
    let l = if n == 1 { SubspaceBasis::empty(d) } else { SubspaceBasis::new(l_cols)? };

    if !is_maximal_nonneg(f, gamma, &m)? {
        return Err(Error::Consistency(format!("witness subspace is not maximal non-negative at {gamma}")));
    }
    Ok(WitnessPair { m, l, mu, lambda_n, m_index })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityReport {
    pub gamma: f64,
    pub n: usize,
    pub lambda_n: f64,
    pub mu: f64,
    pub witness_value: ExtendedReal,
    pub sampled_max: ExtendedReal,
    pub samples: usize,
    /// `|witness − λₙ| ≤ 1e-6`.
    pub equality_pass: bool,
    /// Sampled maximum at most `λₙ + 1e-8`.
    pub inequality_pass: bool,
    pub pass: bool,
}

/// Compares `λₙ` with the witness value and the sampled maximum.
pub fn verify_equality(f: &OperatorFamily, gamma: f64, n: usize, samples: usize, seed: u64) -> Result<EqualityReport> {
    let w = witness_subspaces(f, gamma, n)?;
    let scanner = domain_scanner(f)?;
    let witness_value = inner_variation_with(&scanner, &w.m, &w.l)?;
    let sampled = sampled_max(f, &scanner, gamma, n, samples, seed)?;
    let equality_pass = witness_value.finite().is_some_and(|v| (v - w.lambda_n).abs() <= EQ_TOL);
    let inequality_pass = sampled.to_f64() <= w.lambda_n + INEQ_TOL;
    Ok(EqualityReport {
        gamma,
        n,
        lambda_n: w.lambda_n,
        mu: w.mu,
        witness_value,
        sampled_max: sampled,
        samples,
        equality_pass,
        inequality_pass,
        pass: equality_pass && inequality_pass,
    })
}

/// Maximum of the inner variation over random pairs only.
pub fn sampled_max(
    f: &OperatorFamily,
    scanner: &Scanner<'_>,
    gamma: f64,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ExtendedReal> {
    let frame = krein_frame(f, gamma)?;
    if frame.k_plus.dim() < n || samples == 0 {
        return Ok(ExtendedReal::NegInf);
    }
    let values: Vec<ExtendedReal> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let m = sample_max_nonneg_in(&frame, SampleOptions::default(), &mut rng)?.basis;
            let q = m.orthonormal();
            let l = SubspaceBasis::new(orthonormalize(&(&q * gaussian_matrix(q.ncols(), n - 1, &mut rng))))?;
            inner_variation_with(scanner, &m, &l)
        })
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(ExtendedReal::NegInf, ExtendedReal::max))
}
