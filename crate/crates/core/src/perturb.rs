//! Spectral gaps of `A` under a non-negative perturbation `B`.
//!
//! If `(α, β)` is free of spectrum of `A` and `x·Bx ≤ a‖x‖² + b·x·Ax`
//! with `a, b ≥ 0`, then `(α̂, β)` with `α̂ = α + a + bα` is free of
//! spectrum of `A + B`: the gap can only close from below.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::OperatorFamily;
use crate::interval::Interval;
use crate::linalg::{eigh, SymMatrix};
use crate::spectra::{counting, spectrum_in, SpectrumReport, BISECT_REL};

/// Default relative-bound parameters tried by [`certify_gap`].
pub const DEFAULT_B_GRID: [f64; 6] = [0.0, 0.05, 0.1, 0.2, 0.4, 0.8];
const GOLDEN_ITERS: usize = 100;

/// Least `a` with `x·Bx ≤ a‖x‖² + b·x·Ax` for all `x`, namely
/// `max(0, λ_max(B − bA))`.
pub fn relative_bound_a(a_mat: &SymMatrix, b_mat: &SymMatrix, b: f64) -> Result<f64> {
    check_pair(a_mat, b_mat)?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::Precondition(format!("relative bound b must be finite and non-negative, got {b}")));
    }
    bound_unchecked(a_mat, b_mat, b)
}

fn bound_unchecked(a_mat: &SymMatrix, b_mat: &SymMatrix, b: f64) -> Result<f64> {
    Ok(eigh(&b_mat.sub(&a_mat.scale(b)))?.max().max(0.0))
}

fn check_pair(a_mat: &SymMatrix, b_mat: &SymMatrix) -> Result<()> {
    if a_mat.dim() != b_mat.dim() {
        return Err(Error::Dimension { expected: a_mat.dim(), found: b_mat.dim() });
    }
    let low = eigh(b_mat)?.min();
    if low < -b_mat.default_tol() {
        return Err(Error::Hypothesis(format!("perturbation is not positive semidefinite (lambda_min = {low})")));
    }
    Ok(())
}

/// `α + a + bα`.
pub fn alpha_hat(alpha: f64, a: f64, b: f64) -> f64 {
    alpha + a + b * alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapVerdict {
    Certified,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub alpha_hat: f64,
    pub verdict: GapVerdict,
    /// `(b, a(b), α̂(b))` for every parameter tried.
    pub tried: Vec<(f64, f64, f64)>,
    /// Spectrum of `A + B` strictly inside `(α̂, β)`; empty when the
    /// certificate is sound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<SpectrumReport>,
}

impl GapCertificate {
    /// Certified and the direct spectrum computation agrees.
    pub fn confirmed(&self) -> bool {
        self.verdict == GapVerdict::Certified && self.cross_check.as_ref().is_some_and(|r| r.is_empty())
    }
}

/// Minimizes `α̂` over `b_grid` (and, with `refine`, over all `b ≥ 0` by
/// golden-section search; `α̂(b)` is convex) and certifies `(α̂, β)`.
pub fn certify_gap(
    a_mat: &SymMatrix,
    b_mat: &SymMatrix,
    alpha: f64,
    beta: f64,
    b_grid: &[f64],
    refine: bool,
) -> Result<GapCertificate> {
    check_pair(a_mat, b_mat)?;
    if !(alpha < beta) {
        return Err(Error::InvalidInterval(format!("need alpha < beta, got {alpha} and {beta}")));
    }
    if let Some(b) = b_grid.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
        return Err(Error::Precondition(format!("relative bound b must be finite and non-negative, got {b}")));
    }
    let tol = a_mat.default_tol();
    if let Some(v) = eigh(a_mat)?.values.into_iter().find(|&v| v > alpha + tol && v < beta - tol) {
        return Err(Error::Hypothesis(format!("{v} is an eigenvalue of A inside ({alpha}, {beta})")));
    }

    let eval = |b: f64| -> Result<(f64, f64, f64)> {
        let a = bound_unchecked(a_mat, b_mat, b)?;
        Ok((b, a, alpha_hat(alpha, a, b)))
    };
    let mut tried: Vec<(f64, f64, f64)> = b_grid.iter().map(|&b| eval(b)).collect::<Result<_>>()?;
    if refine {
        let top = b_grid.iter().copied().fold(1.0, f64::max) * 2.0;
        tried.push(golden_min(&eval, 0.0, top)?);
    }
    let best = tried
        .iter()
        .copied()
        .reduce(|x, y| if y.2 < x.2 { y } else { x })
        .ok_or_else(|| Error::Precondition("empty grid of relative-bound parameters".into()))?;
    let (b, a, ahat) = best;
    let verdict = if ahat < beta { GapVerdict::Certified } else { GapVerdict::Inapplicable };
    let cross_check = match verdict {
        GapVerdict::Certified => Some(cross_check(&a_mat.add(b_mat), ahat, beta)?),
        GapVerdict::Inapplicable => None,
    };
    Ok(GapCertificate { alpha, beta, a, b, alpha_hat: ahat, verdict, tried, cross_check })
}

fn golden_min(eval: &impl Fn(f64) -> Result<(f64, f64, f64)>, lo: f64, hi: f64) -> Result<(f64, f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (lo, hi);
    let mut p1 = eval(hi - g * (hi - lo))?;
    let mut p2 = eval(lo + g * (hi - lo))?;
    for _ in 0..GOLDEN_ITERS {
        if p1.2 <= p2.2 {
            hi = p2.0;
            p2 = p1;
            p1 = eval(hi - g * (hi - lo))?;
        } else {
            lo = p1.0;
            p1 = p2;
            p2 = eval(lo + g * (hi - lo))?;
        }
        if hi - lo <= 1e-12 * (1.0 + hi) {
            break;
        }
    }
    Ok(if p1.2 <= p2.2 { p1 } else { p2 })
}

/// Spectrum of `C` on `(lo, hi)`, shrunk by a margin until both ends are
/// resolvent points.
fn cross_check(c: &SymMatrix, lo: f64, hi: f64) -> Result<SpectrumReport> {
    let span = (lo.abs().max(hi.abs())).max(1.0);
    let mut margin = 1e-6 * span;
    let f = OperatorFamily::shifted_linear(c.clone(), Interval::closed(lo, hi))?;
    for _ in 0..8 {
        let (a, b) = (lo + margin, hi - margin);
        if a >= b {
            break;
        }
        if !counting(&f, a)?.boundary && !counting(&f, b)?.boundary {
            return spectrum_in(&f, &Interval::closed(a, b), BISECT_REL);
        }
        margin *= 10.0;
    }
    Err(Error::NoGap(lo))
}
