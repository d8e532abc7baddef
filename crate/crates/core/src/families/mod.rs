//! Operator families `λ ↦ T(λ)` with symmetric matrix values.
//!
//! Four kinds are supported:
//!
//! * shifted linear pencils `A − λI`,
//! * matrix polynomials `Σ λʲ Cⱼ`,
//! * Schur complements `A − λI − B (D − λI)⁻¹ Bᵀ` away from `σ(D)`,
//! * diagonal families whose entries are continuous, non-increasing
//!   piecewise-linear functions.
//!
//! A family carries its domain `Δ`; evaluation outside `Δ` is an error,
//! never an extrapolation.

mod a3;
pub mod corpus;
mod json;

use nalgebra::{DMatrix, DVector};

pub use a3::{validate_a3, A3Options, A3Report, A3Witness};
pub use json::{parse_family, parse_matrix, serialize_family, serialize_matrix};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{eigh, SymMatrix};

/// Relative pole margin for Schur complement families.
pub const SCHUR_MARGIN_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `T(λ) = A − λI`
    ShiftedLinear { a: SymMatrix },
    /// `T(λ) = Σⱼ λʲ Cⱼ`
    Polynomial { coeffs: Vec<SymMatrix> },
    /// `T(λ) = A − λI − B (D − λI)⁻¹ Bᵀ`
    Schur { a: SymMatrix, b: DMatrix<f64>, d: SymMatrix },
    /// `T(λ) = diag(f₁(λ), …, f_d(λ))` with piecewise-linear `fₖ`.
    PwlDiag { entries: Vec<PwlEntry> },
}

impl FamilyKind {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilyKind::ShiftedLinear { .. } => "shifted_linear",
            FamilyKind::Polynomial { .. } => "polynomial",
            FamilyKind::Schur { .. } => "schur",
            FamilyKind::PwlDiag { .. } => "pwl_diag",
        }
    }
}

/// A continuous piecewise-linear scalar function given by knots
/// `(λ, value)` with strictly increasing `λ`, extended by constants
/// beyond the first and last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PwlEntry {
    knots: Vec<(f64, f64)>,
}

impl PwlEntry {
    /// Knots must be finite, strictly increasing in `λ` and non-increasing
    /// in value, and the function may not sit at `0` on an interval.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidFamily("piecewise-linear entry needs at least one knot".into()));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFinite);
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidFamily(format!(
                    "knot abscissae must increase strictly ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidFamily(format!(
                    "entry increases between lambda = {} and {}",
                    w[0].0, w[1].0
                )));
            }
            if w[0].1 == 0.0 && w[1].1 == 0.0 {
                return Err(Error::InvalidFamily(format!(
                    "entry vanishes on [{}, {}]",
                    w[0].0, w[1].0
                )));
            }
        }
        let first = knots[0].1;
        let last = knots[knots.len() - 1].1;
        if first == 0.0 || last == 0.0 {
            return Err(Error::InvalidFamily("entry has a constant zero tail".into()));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn value(&self, lambda: f64) -> f64 {
        let k = &self.knots;
        if lambda <= k[0].0 {
            return k[0].1;
        }
        if lambda >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|&(x, _)| x <= lambda) - 1;
        let (x0, y0) = k[i];
        let (x1, y1) = k[i + 1];
        y0 + (y1 - y0) * (lambda - x0) / (x1 - x0)
    }

    /// Right-hand slope at `lambda`.
    pub fn slope(&self, lambda: f64) -> f64 {
        let k = &self.knots;
        if lambda < k[0].0 || lambda >= k[k.len() - 1].0 {
            return 0.0;
        }
        let i = k.partition_point(|&(x, _)| x <= lambda) - 1;
        let (x0, y0) = k[i];
        let (x1, y1) = k[i + 1];
        (y1 - y0) / (x1 - x0)
    }

    pub fn is_breakpoint(&self, lambda: f64) -> bool {
        self.knots.iter().any(|&(x, _)| x == lambda)
    }
}

/// Spectral data of the `D` block of a Schur complement family.
#[derive(Debug, Clone, PartialEq)]
struct SchurPoles {
    poles: Vec<f64>,
    /// `B V` where `D = V diag(poles) Vᵀ`.
    bv: DMatrix<f64>,
    margin: f64,
}

/// `λ ↦ T(λ)` together with its domain `Δ`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    name: Option<String>,
    kind: FamilyKind,
    domain: Interval,
    dim: usize,
    schur: Option<SchurPoles>,
}

impl OperatorFamily {
    pub fn shifted_linear(a: SymMatrix, domain: Interval) -> Result<Self> {
        let dim = a.dim();
        Self::build(FamilyKind::ShiftedLinear { a }, domain, dim)
    }

    pub fn polynomial(coeffs: Vec<SymMatrix>, domain: Interval) -> Result<Self> {
        let dim = coeffs
            .first()
            .map(|c| c.dim())
            .ok_or_else(|| Error::InvalidFamily("polynomial needs at least one coefficient".into()))?;
        if let Some(c) = coeffs.iter().find(|c| c.dim() != dim) {
            return Err(Error::Dimension { expected: dim, found: c.dim() });
        }
        Self::build(FamilyKind::Polynomial { coeffs }, domain, dim)
    }

    pub fn schur(a: SymMatrix, b: DMatrix<f64>, d: SymMatrix, domain: Interval) -> Result<Self> {
        if b.nrows() != a.dim() {
            return Err(Error::Dimension { expected: a.dim(), found: b.nrows() });
        }
        if b.ncols() != d.dim() {
            return Err(Error::Dimension { expected: d.dim(), found: b.ncols() });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dim = a.dim();
        Self::build(FamilyKind::Schur { a, b, d }, domain, dim)
    }

    pub fn pwl_diag(entries: Vec<PwlEntry>, domain: Interval) -> Result<Self> {
        let dim = entries.len();
        Self::build(FamilyKind::PwlDiag { entries }, domain, dim)
    }

    fn build(kind: FamilyKind, domain: Interval, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFamily("dimension must be positive".into()));
        }
        let schur = match &kind {
            FamilyKind::Schur { b, d, .. } => {
                let eig = eigh(d)?;
                let margin = SCHUR_MARGIN_REL * (1.0 + d.norm());
                for &p in &eig.values {
                    if p >= domain.lo - margin && p <= domain.hi + margin {
                        return Err(Error::InvalidFamily(format!(
                            "pole {p} of the D block lies within {margin:.3e} of the domain {domain}"
                        )));
                    }
                }
                Some(SchurPoles { bv: b * &eig.vectors, poles: eig.values, margin })
            }
            _ => None,
        };
        Ok(Self { name: None, kind, domain, dim, schur })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, lambda: f64) -> Result<()> {
        if !self.domain.contains(lambda) {
            return Err(Error::OutOfDomain { lambda, domain: self.domain.to_string() });
        }
        if let Some(s) = &self.schur {
            for &pole in &s.poles {
                if (pole - lambda).abs() < s.margin {
                    return Err(Error::PoleProximity { lambda, pole, margin: s.margin });
                }
            }
        }
        Ok(())
    }

    /// `T(λ)`.
    pub fn evaluate(&self, lambda: f64) -> Result<SymMatrix> {
        self.check(lambda)?;
        let n = self.dim;
        let m = match &self.kind {
            FamilyKind::ShiftedLinear { a } => a.matrix() - DMatrix::identity(n, n) * lambda,
            FamilyKind::Polynomial { coeffs } => {
                // Horner
                let mut acc = coeffs[coeffs.len() - 1].matrix().clone();
                for c in coeffs.iter().rev().skip(1) {
                    acc = acc * lambda + c.matrix();
                }
                acc
            }
            FamilyKind::Schur { a, .. } => {
                let s = self.schur.as_ref().expect("schur data");
                let w = DVector::from_iterator(s.poles.len(), s.poles.iter().map(|p| 1.0 / (p - lambda)));
                a.matrix() - DMatrix::identity(n, n) * lambda - scaled_gram(&s.bv, &w)
            }
            FamilyKind::PwlDiag { entries } => {
                DMatrix::from_diagonal(&DVector::from_iterator(n, entries.iter().map(|e| e.value(lambda))))
            }
        };
        Ok(SymMatrix::symmetrized(m))
    }

    /// `T′(λ)`. Piecewise-linear entries use the right-hand slope at a
    /// breakpoint; see [`OperatorFamily::at_breakpoint`].
    pub fn derivative(&self, lambda: f64) -> Result<SymMatrix> {
        self.check(lambda)?;
        let n = self.dim;
        let m = match &self.kind {
            FamilyKind::ShiftedLinear { .. } => -DMatrix::identity(n, n),
            FamilyKind::Polynomial { coeffs } => {
                let mut acc = DMatrix::zeros(n, n);
                for (j, c) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * lambda + c.matrix() * j as f64;
                }
                acc
            }
            FamilyKind::Schur { .. } => {
                let s = self.schur.as_ref().expect("schur data");
                let w = DVector::from_iterator(
                    s.poles.len(),
                    s.poles.iter().map(|p| 1.0 / ((p - lambda) * (p - lambda))),
                );
                -DMatrix::identity(n, n) - scaled_gram(&s.bv, &w)
            }
            FamilyKind::PwlDiag { entries } => {
                DMatrix::from_diagonal(&DVector::from_iterator(n, entries.iter().map(|e| e.slope(lambda))))
            }
        };
        Ok(SymMatrix::symmetrized(m))
    }

    /// True when `lambda` is a knot of some piecewise-linear entry, where
    /// [`OperatorFamily::derivative`] reports a one-sided slope.
    pub fn at_breakpoint(&self, lambda: f64) -> bool {
        match &self.kind {
            FamilyKind::PwlDiag { entries } => entries.iter().any(|e| e.is_breakpoint(lambda)),
            _ => false,
        }
    }

    /// The quadratic form `x · T(λ) x`.
    pub fn form(&self, lambda: f64, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(self.evaluate(lambda)?.quad_form(x))
    }

    /// Poles of a Schur complement family (eigenvalues of `D`).
    pub fn poles(&self) -> &[f64] {
        self.schur.as_ref().map(|s| s.poles.as_slice()).unwrap_or(&[])
    }

    /// The orthogonally conjugated family `λ ↦ Q T(λ) Qᵀ`.
    ///
    /// Diagonal piecewise-linear families are not closed under rotation and
    /// are rejected.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Result<OperatorFamily> {
        let rotated = match &self.kind {
            FamilyKind::ShiftedLinear { a } => Self::shifted_linear(a.conjugate(q)?, self.domain)?,
            FamilyKind::Polynomial { coeffs } => Self::polynomial(
                coeffs.iter().map(|c| c.conjugate(q)).collect::<Result<_>>()?,
                self.domain,
            )?,
            FamilyKind::Schur { a, b, d } => Self::schur(a.conjugate(q)?, q * b, d.clone(), self.domain)?,
            FamilyKind::PwlDiag { .. } => {
                return Err(Error::InvalidFamily("diagonal piecewise-linear families cannot be rotated".into()))
            }
        };
        Ok(match &self.name {
            Some(n) => rotated.with_name(format!("{n}-rotated")),
            None => rotated,
        })
    }

    /// Same family on a smaller domain.
    pub fn restrict(&self, domain: Interval) -> Result<OperatorFamily> {
        if !self.domain.covers(&domain) {
            return Err(Error::InvalidInterval(format!("{domain} is not inside {}", self.domain)));
        }
        let mut f = Self::build(self.kind.clone(), domain, self.dim)?;
        f.name = self.name.clone();
        Ok(f)
    }
}

/// `G diag(w) Gᵀ`
fn scaled_gram(g: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut gw = g.clone();
    for (j, mut col) in gw.column_iter_mut().enumerate() {
        col *= w[j];
    }
    gw * g.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{haar_orthogonal, rng_from_seed};
    use rand::Rng;

    fn scalar(v: f64) -> SymMatrix {
        SymMatrix::from_diagonal(&[v])
    }

    fn schur_1x1() -> OperatorFamily {
        OperatorFamily::schur(
            scalar(0.0),
            DMatrix::from_element(1, 1, 1.0),
            scalar(2.0),
            Interval::closed(-1.0, 1.5),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = OperatorFamily::shifted_linear(SymMatrix::from_diagonal(&[1.0, 3.0]), Interval::closed(-5.0, 5.0))
            .unwrap();
        assert_eq!(f.evaluate(1.0).unwrap(), SymMatrix::from_diagonal(&[0.0, 2.0]));

        let p = OperatorFamily::polynomial(vec![scalar(1.0), scalar(-1.0), scalar(-1.0)], Interval::closed(0.0, 2.0))
            .unwrap();
        assert_eq!(p.evaluate(0.0).unwrap(), scalar(1.0));

        assert_eq!(schur_1x1().evaluate(0.0).unwrap(), scalar(-0.5));
    }

    #[test]
    fn derivative_examples() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        let f = OperatorFamily::shifted_linear(a, Interval::real_line()).unwrap();
        assert_eq!(f.derivative(7.5).unwrap(), SymMatrix::identity(2).scale(-1.0));

        let c1 = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, -2.0]]).unwrap();
        let c2 = SymMatrix::from_rows(&[vec![0.3, -1.0], vec![-1.0, 4.0]]).unwrap();
        let p = OperatorFamily::polynomial(vec![SymMatrix::identity(2), c1.clone(), c2.clone()], Interval::real_line())
            .unwrap();
        let lam = 0.7;
        let expect = c1.add(&c2.scale(2.0 * lam));
        assert!((p.derivative(lam).unwrap().matrix() - expect.matrix()).norm() < 1e-14);

        // Central difference of evaluate.
        let s = schur_1x1();
        let h = 1e-5;
        let fd = (s.evaluate(h).unwrap().matrix()[(0, 0)] - s.evaluate(-h).unwrap().matrix()[(0, 0)]) / (2.0 * h);
        let exact = s.derivative(0.0).unwrap().matrix()[(0, 0)];
        assert!((fd - (-1.25)).abs() < 1e-8);
        assert!((exact - (-1.25)).abs() < 1e-15);
    }

    #[test]
    fn form_examples() {
        let f = OperatorFamily::shifted_linear(SymMatrix::from_diagonal(&[1.0, 3.0]), Interval::real_line()).unwrap();
        assert_eq!(f.form(0.0, &DVector::from_column_slice(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(f.form(2.0, &DVector::zeros(2)).unwrap(), 0.0);
        let p = OperatorFamily::polynomial(vec![scalar(1.0), scalar(-1.0), scalar(-1.0)], Interval::closed(0.0, 2.0))
            .unwrap();
        assert_eq!(p.form(0.5, &DVector::from_element(1, 1.0)).unwrap(), 0.25);
        assert!(matches!(p.form(0.5, &DVector::zeros(2)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn domain_and_pole_errors() {
        let p = OperatorFamily::polynomial(vec![scalar(1.0)], Interval::closed(0.0, 2.0)).unwrap();
        assert!(matches!(p.evaluate(2.5), Err(Error::OutOfDomain { .. })));
        // Domain reaching the pole is rejected at construction.
        let bad = OperatorFamily::schur(scalar(0.0), DMatrix::from_element(1, 1, 1.0), scalar(2.0), Interval::closed(0.0, 3.0));
        assert!(matches!(bad, Err(Error::InvalidFamily(_))));
        let open = OperatorFamily::schur(
            scalar(0.0),
            DMatrix::from_element(1, 1, 1.0),
            scalar(2.0),
            Interval::new(0.0, 2.0, false, true).unwrap(),
        );
        assert!(open.is_err());
    }

    #[test]
    fn pwl_entry_rules() {
        let e = PwlEntry::new(vec![(0.0, 1.0), (0.5, -1.0)]).unwrap();
        assert_eq!(e.value(-3.0), 1.0);
        assert_eq!(e.value(0.25), 0.0);
        assert_eq!(e.value(9.0), -1.0);
        assert_eq!(e.slope(0.0), -4.0);
        assert_eq!(e.slope(0.5), 0.0);
        assert_eq!(e.slope(-1.0), 0.0);
        assert!(e.is_breakpoint(0.5));
        assert!(PwlEntry::new(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(PwlEntry::new(vec![(0.0, 1.0), (0.0, -1.0)]).is_err());
        assert!(PwlEntry::new(vec![(0.0, 1.0), (1.0, 0.0), (2.0, 0.0), (3.0, -1.0)]).is_err());
        assert!(PwlEntry::new(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(PwlEntry::new(vec![]).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = rng_from_seed(11);
        let fams = [
            corpus::quadratic_2x2(),
            corpus::schur_demo(),
            corpus::remark_iii(4),
            corpus::linear_rotated(),
        ];
        for f in &fams {
            let dom = f.domain().clip(10.0).unwrap();
            for _ in 0..50 {
                let lam = rng.random_range(dom.lo + 0.01..dom.hi - 0.01);
                let h = 1e-5 * (1.0 + lam.abs());
                if let FamilyKind::PwlDiag { entries } = f.kind() {
                    let near = entries.iter().any(|e| e.knots().iter().any(|&(x, _)| (x - lam).abs() <= 2.0 * h));
                    if near {
                        continue;
                    }
                }
                let fd = (f.evaluate(lam + h).unwrap().matrix() - f.evaluate(lam - h).unwrap().matrix()) / (2.0 * h);
                let d = f.derivative(lam).unwrap();
                let err = (fd - d.matrix()).norm();
                assert!(err <= 1e-6 * (1.0 + d.norm()), "{:?} at {lam}: {err}", f.name());
            }
        }
    }

    #[test]
    fn conjugation_preserves_values() {
        let q = haar_orthogonal(2, &mut rng_from_seed(5));
        let f = corpus::quadratic_2x2();
        let g = f.conjugate(&q).unwrap();
        let lhs = g.evaluate(0.9).unwrap();
        let rhs = f.evaluate(0.9).unwrap().conjugate(&q).unwrap();
        assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-13);
        assert!(corpus::remark_iii(4).conjugate(&DMatrix::identity(4, 4)).is_err());
    }
}
