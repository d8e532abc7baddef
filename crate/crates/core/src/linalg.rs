//! Dense real-symmetric linear algebra.
//!
//! Thin layer over `nalgebra`: a symmetric matrix newtype, full-column-rank
//! subspace bases, sorted eigendecomposition, spectral subspaces for
//! interval windows, compressions to subspaces, inertia and the direct-sum
//! defect of a family of subspaces.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Relative tolerance used for kernels, ranks and sign classification.
pub const REL_TOL: f64 = 1e-8;

/// Hard cap on implicit QR sweeps inside the symmetric eigensolver.
const EIGEN_MAX_ITER: usize = 100_000;

/// A real symmetric matrix. Entries are finite and exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Symmetrizes `(M + Mᵀ)/2` after checking shape and finiteness.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::symmetrized(m))
    }

    /// Internal constructor for values that are symmetric up to rounding.
    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let mut out = m;
        let n = out.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self(out)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare { rows: n, cols: bad.len() });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Frobenius norm (an upper bound for the spectral norm).
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Default kernel/rank tolerance `1e-8 * (1 + ‖M‖)`.
    pub fn default_tol(&self) -> f64 {
        REL_TOL * (1.0 + self.norm())
    }

    /// `x · (M x)`
    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.0 * x))
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        Self(&self.0 * s)
    }

    /// `Q M Qᵀ` for a square `Q` of matching size.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Result<SymMatrix> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: q.nrows() });
        }
        Ok(Self::symmetrized(q * &self.0 * q.transpose()))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }
}

/// Inertia `(n₋, n₀, n₊)` of a symmetric matrix relative to a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub n_minus: usize,
    pub n_zero: usize,
    pub n_plus: usize,
}

/// A subspace of ℝᵈ given by linearly independent columns.
///
/// The columns need not be orthonormal; [`SubspaceBasis::orthonormal`]
/// produces an orthonormal basis of the same span.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    cols: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Checks that the columns of `cols` are linearly independent.
    ///
    /// The test is scale free: columns are normalized and the smallest
    /// singular value of the result must exceed [`REL_TOL`].
    pub fn new(cols: DMatrix<f64>) -> Result<Self> {
        if cols.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if cols.ncols() > cols.nrows() {
            return Err(Error::RankDeficient { sigma_min: 0.0, tol: REL_TOL });
        }
        if cols.ncols() > 0 {
            let sigma_min = normalized_sigma_min(&cols);
            if !(sigma_min > REL_TOL) {
                return Err(Error::RankDeficient { sigma_min, tol: REL_TOL });
            }
        }
        Ok(Self { cols })
    }

    /// The trivial subspace `{0}` of ℝᵈ.
    pub fn empty(ambient_dim: usize) -> Self {
        Self { cols: DMatrix::zeros(ambient_dim, 0) }
    }

    /// All of ℝᵈ, spanned by the standard basis.
    pub fn full(ambient_dim: usize) -> Self {
        Self { cols: DMatrix::identity(ambient_dim, ambient_dim) }
    }

    pub fn from_vectors(ambient_dim: usize, vectors: &[DVector<f64>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::Dimension { expected: ambient_dim, found: v.len() });
        }
        if vectors.is_empty() {
            return Ok(Self::empty(ambient_dim));
        }
        Self::new(DMatrix::from_columns(vectors))
    }

    /// Wraps columns already known to be orthonormal.
    pub(crate) fn from_orthonormal(cols: DMatrix<f64>) -> Self {
        Self { cols }
    }

    pub fn ambient_dim(&self) -> usize {
        self.cols.nrows()
    }

    pub fn dim(&self) -> usize {
        self.cols.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.cols
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        self.cols.column(i).into_owned()
    }

    /// Orthonormal columns spanning the same subspace (Householder QR).
    pub fn orthonormal(&self) -> DMatrix<f64> {
        orthonormalize(&self.cols)
    }

    pub fn orthonormalized(&self) -> SubspaceBasis {
        Self { cols: self.orthonormal() }
    }

    /// Horizontal concatenation; fails if the union is not independent.
    pub fn concat(parts: &[&SubspaceBasis]) -> Result<SubspaceBasis> {
        let ambient = parts.first().map(|p| p.ambient_dim()).unwrap_or(0);
        if let Some(p) = parts.iter().find(|p| p.ambient_dim() != ambient) {
            return Err(Error::Dimension { expected: ambient, found: p.ambient_dim() });
        }
        Self::new(hstack(ambient, parts.iter().map(|p| p.matrix())))
    }

    /// Largest distance of a unit vector of `other` from this span,
    /// i.e. `‖(I − QQᵀ) Y‖₂` for orthonormal `Q` and `Y`.
    pub fn containment_residual(&self, other: &SubspaceBasis) -> f64 {
        if other.is_empty() {
            return 0.0;
        }
        let q = self.orthonormal();
        let y = other.orthonormal();
        let r = &y - &q * (q.transpose() * &y);
        spectral_norm(&r)
    }

    /// Orthonormal basis of `self ⊖ sub`, the Euclidean orthogonal
    /// complement of `sub` inside this span.
    pub fn complement_of(&self, sub: &SubspaceBasis, tol: f64) -> Result<SubspaceBasis> {
        if sub.ambient_dim() != self.ambient_dim() {
            return Err(Error::Dimension { expected: self.ambient_dim(), found: sub.ambient_dim() });
        }
        let residual = self.containment_residual(sub);
        if residual > tol {
            return Err(Error::Containment { residual });
        }
        let q = self.orthonormal();
        let k = q.ncols();
        if sub.is_empty() {
            return Ok(Self::from_orthonormal(q));
        }
        // Coordinates of `sub` inside the span, then the complement there.
        let y = orthonormalize(&(q.transpose() * sub.orthonormal()));
        let proj = DMatrix::identity(k, k) - &y * y.transpose();
        let eig = eigh(&SymMatrix::symmetrized(proj))?;
        let keep: Vec<usize> = (0..k).filter(|&i| eig.values[i] > 0.5).collect();
        let z = DMatrix::from_fn(k, keep.len(), |r, c| eig.vectors[(r, keep[c])]);
        Ok(Self::from_orthonormal(&q * z))
    }
}

/// Ascending eigenvalues with matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigh {
    pub fn basis(&self) -> SubspaceBasis {
        SubspaceBasis::from_orthonormal(self.vectors.clone())
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Columns whose eigenvalues satisfy `keep`, as an orthonormal basis.
    pub fn select(&self, mut keep: impl FnMut(f64) -> bool) -> SubspaceBasis {
        let idx: Vec<usize> = (0..self.values.len()).filter(|&i| keep(self.values[i])).collect();
        let n = self.vectors.nrows();
        SubspaceBasis::from_orthonormal(DMatrix::from_fn(n, idx.len(), |r, c| {
            self.vectors[(r, idx[c])]
        }))
    }
}

/// Symmetric eigendecomposition, eigenvalues ascending.
///
/// Each eigenvector is sign-normalized so that its largest-magnitude
/// entry (first one on ties) is positive, which makes the output a pure
/// function of the input.
pub fn eigh(m: &SymMatrix) -> Result<Eigh> {
    let n = m.dim();
    if n == 0 {
        return Ok(Eigh { values: vec![], vectors: DMatrix::zeros(0, 0) });
    }
    let se = SymmetricEigen::try_new(m.matrix().clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence { iterations: EIGEN_MAX_ITER })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        let mut v = se.eigenvectors.column(i).into_owned();
        let pivot = v.iamax();
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(c, &v);
    }
    Ok(Eigh { values, vectors })
}

/// Eigenvalues without eigenvectors, in no particular order.
fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    if m.dim() == 0 {
        return Ok(Vec::new());
    }
    // The eigenvalue-only solver has no iteration cap.
    if m.matrix().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.matrix().symmetric_eigenvalues().iter().copied().collect())
}

pub fn lambda_min(m: &SymMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn lambda_max(m: &SymMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Orthonormal basis of the span of eigenvectors whose eigenvalues lie in
/// `window`.
///
/// Closed finite endpoints absorb eigenvalues within `tol` of them (so
/// `[0, ∞)` captures a numerical kernel). An eigenvalue within `tol` of an
/// open finite endpoint is ambiguous and reported as an error.
pub fn spectral_basis(m: &SymMatrix, window: &Interval, tol: f64) -> Result<SubspaceBasis> {
    let eig = eigh(m)?;
    spectral_basis_from(&eig, window, tol)
}

pub(crate) fn spectral_basis_from(eig: &Eigh, window: &Interval, tol: f64) -> Result<SubspaceBasis> {
    for &mu in &eig.values {
        for (endpoint, open) in [(window.lo, window.lo_open), (window.hi, window.hi_open)] {
            if open && endpoint.is_finite() && (mu - endpoint).abs() <= tol {
                return Err(Error::AmbiguousWindow { endpoint, eigenvalue: mu, tol });
            }
        }
    }
    Ok(eig.select(|mu| {
        let lo_ok = if window.lo_open { mu > window.lo } else { mu >= window.lo - tol };
        let hi_ok = if window.hi_open { mu < window.hi } else { mu <= window.hi + tol };
        lo_ok && hi_ok
    }))
}

/// `Bᵀ M B` for an orthonormal basis `B` of `S`.
pub fn compress(m: &SymMatrix, s: &SubspaceBasis) -> Result<SymMatrix> {
    if s.ambient_dim() != m.dim() {
        return Err(Error::Dimension { expected: m.dim(), found: s.ambient_dim() });
    }
    Ok(compress_orthonormal(m, &s.orthonormal()))
}

/// `Bᵀ M B` where the caller guarantees `B` has orthonormal columns.
pub(crate) fn compress_orthonormal(m: &SymMatrix, b: &DMatrix<f64>) -> SymMatrix {
    SymMatrix::symmetrized(b.transpose() * m.matrix() * b)
}

pub fn inertia(m: &SymMatrix, tol: f64) -> Result<Inertia> {
    Ok(inertia_of(&eigh(m)?.values, tol))
}

pub(crate) fn inertia_of(values: &[f64], tol: f64) -> Inertia {
    let n_minus = values.iter().filter(|&&v| v < -tol).count();
    let n_plus = values.iter().filter(|&&v| v > tol).count();
    Inertia { n_minus, n_zero: values.len() - n_minus - n_plus, n_plus }
}

/// Smallest singular value of the concatenated, individually
/// orthonormalized bases. Positive iff the sum is direct and fills ℝᵈ.
pub fn direct_sum_defect(bases: &[SubspaceBasis]) -> Result<f64> {
    let ambient = bases.first().map(|b| b.ambient_dim()).unwrap_or(0);
    if let Some(b) = bases.iter().find(|b| b.ambient_dim() != ambient) {
        return Err(Error::Dimension { expected: ambient, found: b.ambient_dim() });
    }
    let total: usize = bases.iter().map(|b| b.dim()).sum();
    if total != ambient {
        return Err(Error::Dimension { expected: ambient, found: total });
    }
    if ambient == 0 {
        return Ok(1.0);
    }
    let ortho: Vec<DMatrix<f64>> = bases.iter().map(|b| b.orthonormal()).collect();
    Ok(sigma_min(&hstack(ambient, ortho.iter())))
}

pub(crate) fn hstack<'a>(rows: usize, parts: impl Iterator<Item = &'a DMatrix<f64>>) -> DMatrix<f64> {
    let parts: Vec<&DMatrix<f64>> = parts.collect();
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for p in parts {
        out.columns_mut(c, p.ncols()).copy_from(p);
        c += p.ncols();
    }
    out
}

pub(crate) fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    m.clone().qr().q()
}

pub(crate) fn sigma_min(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.min()
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn normalized_sigma_min(cols: &DMatrix<f64>) -> f64 {
    let mut c = cols.clone();
    for mut col in c.column_iter_mut() {
        let n = col.norm();
        if n == 0.0 {
            return 0.0;
        }
        col /= n;
    }
    sigma_min(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{haar_orthogonal, rng_from_seed};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        SymMatrix::new(&m + m.transpose()).unwrap()
    }

    #[test]
    fn eigh_diagonal_is_permutation() {
        let e = eigh(&SymMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let expect = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 1., 0., 0., 0., 1., 0.]);
        assert_eq!(e.vectors, expect);
    }

    #[test]
    fn eigh_zero_matrix() {
        let e = eigh(&SymMatrix::zeros(2)).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
        let g = e.vectors.transpose() * &e.vectors;
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn eigh_two_by_two() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = eigh(&m).unwrap();
        assert!(close(e.values[0], 1.0, 1e-14) && close(e.values[1], 3.0, 1e-14));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column(0);
        let v1 = e.vectors.column(1);
        assert!(close(v0[0].abs(), s, 1e-14) && close(v0[0], -v0[1], 1e-14));
        assert!(close(v1[0], s, 1e-14) && close(v1[1], s, 1e-14));
    }

    #[test]
    fn symmetrizes_on_construction() {
        let m = SymMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 1.0])).unwrap();
        assert_eq!(m.matrix()[(0, 1)], 3.0);
        assert_eq!(m.matrix()[(1, 0)], 3.0);
        assert!(SymMatrix::new(DMatrix::from_element(2, 3, 0.0)).is_err());
        assert_eq!(
            SymMatrix::new(DMatrix::from_element(1, 1, f64::NAN)),
            Err(Error::NonFinite)
        );
    }

    #[test]
    fn spectral_basis_windows() {
        let m = SymMatrix::from_diagonal(&[-1.0, 2.0]);
        let pos = spectral_basis(&m, &Interval::positive(), 1e-8).unwrap();
        assert_eq!(pos.dim(), 1);
        assert!(close(pos.column(0)[1].abs(), 1.0, 1e-15));
        let neg = spectral_basis(&m, &Interval::negative(), 1e-8).unwrap();
        assert!(close(neg.column(0)[0].abs(), 1.0, 1e-15));

        let k = SymMatrix::from_diagonal(&[0.0, 5.0]);
        assert_eq!(spectral_basis(&k, &Interval::nonnegative(), 1e-8).unwrap().dim(), 2);
        assert!(matches!(
            spectral_basis(&k, &Interval::positive(), 1e-8),
            Err(Error::AmbiguousWindow { .. })
        ));
    }

    #[test]
    fn compress_examples() {
        let m = SymMatrix::from_diagonal(&[1.0, 3.0]);
        let e1 = SubspaceBasis::new(DMatrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        assert!(close(compress(&m, &e1).unwrap().matrix()[(0, 0)], 1.0, 1e-15));
        let d = SubspaceBasis::new(DMatrix::from_column_slice(2, 1, &[1.0, 1.0])).unwrap();
        assert!(close(compress(&m, &d).unwrap().matrix()[(0, 0)], 2.0, 1e-14));
        let r = random_sym(4, 7);
        let full = compress(&r, &SubspaceBasis::full(4)).unwrap();
        assert!((full.matrix() - r.matrix()).norm() < 1e-14);

        let dep = DMatrix::from_column_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        assert!(matches!(SubspaceBasis::new(dep), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn inertia_examples() {
        let i = inertia(&SymMatrix::from_diagonal(&[-2.0, 0.0, 5.0]), 1e-8).unwrap();
        assert_eq!(i, Inertia { n_minus: 1, n_zero: 1, n_plus: 1 });
        let i = inertia(&SymMatrix::identity(3), 1e-8).unwrap();
        assert_eq!(i, Inertia { n_minus: 0, n_zero: 0, n_plus: 3 });
        let i = inertia(&SymMatrix::from_diagonal(&[-1e-12, 1.0]), 1e-8).unwrap();
        assert_eq!(i, Inertia { n_minus: 0, n_zero: 1, n_plus: 1 });
    }

    fn unit(v: &[f64]) -> DVector<f64> {
        let v = DVector::from_column_slice(v);
        v.normalize()
    }

    #[test]
    fn direct_sum_examples() {
        let e = |i: usize| {
            let mut v = DVector::zeros(3);
            v[i] = 1.0;
            SubspaceBasis::from_vectors(3, &[v]).unwrap()
        };
        assert!(close(direct_sum_defect(&[e(0), e(1), e(2)]).unwrap(), 1.0, 1e-14));

        let a = SubspaceBasis::from_vectors(2, &[unit(&[1.0, 0.0])]).unwrap();
        assert!(direct_sum_defect(&[a.clone(), a.clone()]).unwrap() < 1e-15);

        // Two unit vectors at angle θ have singular values sqrt(1 ± cos θ).
        let b = SubspaceBasis::from_vectors(2, &[unit(&[1.0, 0.1])]).unwrap();
        let d = direct_sum_defect(&[a.clone(), b]).unwrap();
        assert!(close(d, 0.07044721279093116, 1e-12), "{d}");
        let tiny = SubspaceBasis::from_vectors(2, &[unit(&[1.0, 1e-6])]).unwrap();
        assert!(direct_sum_defect(&[a.clone(), tiny]).unwrap() < 1e-5);

        assert!(matches!(direct_sum_defect(&[a]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn complement_within_span() {
        let m = SubspaceBasis::full(3);
        let l = SubspaceBasis::from_vectors(3, &[unit(&[1.0, 0.0, 0.0])]).unwrap();
        let c = m.complement_of(&l, 1e-10).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.matrix().row(0).norm() < 1e-14);
        let outside = SubspaceBasis::from_vectors(3, &[unit(&[0.0, 0.0, 1.0])]).unwrap();
        let plane = SubspaceBasis::from_vectors(3, &[unit(&[1.0, 0.0, 0.0]), unit(&[0.0, 1.0, 0.0])])
            .unwrap();
        assert!(matches!(plane.complement_of(&outside, 1e-10), Err(Error::Containment { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eigh_reconstructs(n in 1usize..=50, seed in any::<u64>()) {
            let m = random_sym(n, seed);
            let e = eigh(&m).unwrap();
            let lam = DMatrix::from_diagonal(&DVector::from_vec(e.values.clone()));
            let rec = &e.vectors * lam * e.vectors.transpose();
            prop_assert!((rec - m.matrix()).norm() <= 1e-9 * (1.0 + m.norm()));
            let g = e.vectors.transpose() * &e.vectors;
            prop_assert!((g - DMatrix::identity(n, n)).amax() <= 1e-12);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            for i in 0..n {
                let v = e.vectors.column(i);
                let r = m.matrix() * v - v * e.values[i];
                prop_assert!(r.norm() <= 1e-10 * (1.0 + m.norm()));
            }
        }

        #[test]
        fn sylvester_inertia(n in 1usize..=10, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            // Diagonal with well separated signs so a conditioning-scaled tol is safe.
            let diag: Vec<f64> = (0..n).map(|i| match i % 3 { 0 => -1.0 - i as f64, 1 => 0.0, _ => 1.0 + i as f64 }).collect();
            let u = haar_orthogonal(n, &mut rng);
            let v = haar_orthogonal(n, &mut rng);
            let s: Vec<f64> = (0..n).map(|i| 1.0 + 9.0 * (i as f64) / (n.max(2) - 1) as f64).collect();
            let p = &u * DMatrix::from_diagonal(&DVector::from_vec(s)) * v.transpose();
            let cond = 10.0;
            let m = SymMatrix::from_diagonal(&diag);
            let c = SymMatrix::new(&p * m.matrix() * p.transpose()).unwrap();
            let tol = 1e-8 * (1.0 + c.norm()) * cond * cond;
            prop_assert_eq!(inertia(&m, 1e-8).unwrap(), inertia(&c, tol).unwrap());
        }

        #[test]
        fn compression_outer_interlacing(n in 2usize..=12, k in 1usize..=12, seed in any::<u64>()) {
            let k = k.min(n);
            let m = random_sym(n, seed);
            let mut rng = rng_from_seed(seed ^ 0xabc);
            let q = haar_orthogonal(n, &mut rng);
            let s = SubspaceBasis::new(q.columns(0, k).into_owned()).unwrap();
            let full = eigh(&m).unwrap();
            let part = eigh(&compress(&m, &s).unwrap()).unwrap();
            prop_assert!(full.min() <= part.min() + 1e-12);
            prop_assert!(part.max() <= full.max() + 1e-12);
        }

        #[test]
        fn defect_reparameterization_invariant(n in 2usize..=8, split in 1usize..8, seed in any::<u64>()) {
            let split = split.min(n - 1);
            let mut rng = rng_from_seed(seed);
            use rand::Rng;
            let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let a = SubspaceBasis::new(raw.columns(0, split).into_owned());
            let b = SubspaceBasis::new(raw.columns(split, n - split).into_owned());
            let (Ok(a), Ok(b)) = (a, b) else { return Ok(()) };
            let d0 = direct_sum_defect(&[a.clone(), b.clone()]).unwrap();
            let ra = haar_orthogonal(split, &mut rng);
            let rb = haar_orthogonal(n - split, &mut rng);
            let a2 = SubspaceBasis::new(a.orthonormal() * ra).unwrap();
            let b2 = SubspaceBasis::new(b.orthonormal() * rb).unwrap();
            let d1 = direct_sum_defect(&[a2, b2]).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-10);
        }
    }
}
