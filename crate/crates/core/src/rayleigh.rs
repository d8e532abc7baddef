//! The generalized Rayleigh functional.
//!
//! For `x ≠ 0`, `p(x)` is the unique zero of `λ ↦ x·T(λ)x` on the domain,
//! `−∞` when the form is negative throughout and `+∞` when it is positive
//! throughout. Because the form crosses zero at most once and only
//! downward, `p(x) ⋛ λ ⟺ x·T(λ)x ⋛ 0`; this gives both the scan-and-bisect
//! evaluation and the subspace minimum
//! `inf_{x∈S} p(x) = zero of λ ↦ λ_min(T(λ)|_S)`.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::OperatorFamily;
use crate::interval::Interval;
use crate::linalg::{compress_orthonormal, eigh, SubspaceBasis, SymMatrix};

/// Default number of bracketing grid nodes.
pub const DEFAULT_GRID: usize = 257;

/// Relative half-width of the "form is zero" band.
pub const AT_BAND: f64 = 1e-9;

/// `ℝ ∪ {±∞}` with the obvious total order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => f.write_str("-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::report::ser_ext_f64(&self.to_f64(), s)
    }
}

/// `p(x)` together with the scan-related flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayleighValue {
    pub value: ExtendedReal,
    /// A sentinel was returned but the scan did not reach the domain end on
    /// that side, so the true zero may lie outside the scan.
    pub clipped: bool,
    /// The zero sits at an excluded (open) endpoint of the scan.
    pub at_boundary: bool,
}

/// Position of `λ` relative to `p(x)`, read off the sign of `x·T(λ)x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// `λ < p(x)`: the form is positive.
    Below,
    /// `λ = p(x)`: the form vanishes within tolerance.
    At,
    /// `λ > p(x)`: the form is negative.
    Above,
}

enum Crossing {
    Zero(f64),
    AllPositive,
    AllNegative,
}

/// Cached evaluations of a family on a bracketing grid over a scan interval.
///
/// Reusing one scanner for many vectors or subspaces avoids re-assembling
/// `T(λ)` at the grid nodes; only bisection steps evaluate the family anew.
pub struct Scanner<'a> {
    family: &'a OperatorFamily,
    scan: Interval,
    nodes: Vec<f64>,
    values: Vec<SymMatrix>,
    bands: Vec<f64>,
}

impl<'a> Scanner<'a> {
    /// `scan` must be bounded and lie inside the family's domain.
    pub fn new(family: &'a OperatorFamily, scan: Interval, grid_n: usize) -> Result<Self> {
        if !scan.is_bounded() {
            return Err(Error::Precondition(format!("scan interval {scan} must be bounded")));
        }
        if !family.domain().covers(&scan) {
            return Err(Error::Precondition(format!(
                "scan interval {scan} is not inside the domain {}",
                family.domain()
            )));
        }
        let nodes = scan.grid(grid_n)?;
        let values: Vec<SymMatrix> = nodes.iter().map(|&l| family.evaluate(l)).collect::<Result<_>>()?;
        let bands = values.iter().map(|t| AT_BAND * (1.0 + t.norm())).collect();
        Ok(Self { family, scan, nodes, values, bands })
    }

    /// Scan over the whole domain, clipping infinite ends to `±limit`.
    pub fn over_domain(family: &'a OperatorFamily, limit: f64, grid_n: usize) -> Result<Self> {
        let scan = family
            .domain()
            .clip(limit)
            .ok_or_else(|| Error::Precondition(format!("domain {} misses [-{limit}, {limit}]", family.domain())))?;
        Self::new(family, scan, grid_n)
    }

    pub fn scan(&self) -> &Interval {
        &self.scan
    }

    pub fn family(&self) -> &OperatorFamily {
        self.family
    }

    /// `p(x)` with flags.
    pub fn p_detailed(&self, x: &DVector<f64>) -> Result<RayleighValue> {
        if x.len() != self.family.dim() {
            return Err(Error::Dimension { expected: self.family.dim(), found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let nn = x.norm_squared();
        if nn == 0.0 {
            return Err(Error::ZeroVector);
        }
        let f = self.family;
        let crossing = self.locate(
            |i| (self.values[i].quad_form(x), self.bands[i] * nn),
            |l| Ok(f.evaluate(l)?.quad_form(x)),
        )?;
        Ok(self.finish(crossing, |i| (self.values[i].quad_form(x), self.bands[i] * nn)))
    }

    pub fn p(&self, x: &DVector<f64>) -> Result<ExtendedReal> {
        Ok(self.p_detailed(x)?.value)
    }

    /// `inf_{x ∈ S∖{0}} p(x)` with flags.
    pub fn min_over_detailed(&self, s: &SubspaceBasis) -> Result<RayleighValue> {
        if s.ambient_dim() != self.family.dim() {
            return Err(Error::Dimension { expected: self.family.dim(), found: s.ambient_dim() });
        }
        if s.is_empty() {
            return Err(Error::Precondition("subspace minimum over the trivial subspace".into()));
        }
        let b = s.orthonormal();
        let g_node = |i: usize| -> Result<f64> { lambda_min_on(&self.values[i], &b) };
        let node_vals: Vec<f64> = (0..self.nodes.len()).map(g_node).collect::<Result<_>>()?;
        let f = self.family;
        let crossing = self.locate(
            |i| (node_vals[i], self.bands[i]),
            |l| lambda_min_on(&f.evaluate(l)?, &b),
        )?;
        Ok(self.finish(crossing, |i| (node_vals[i], self.bands[i])))
    }

    pub fn min_over(&self, s: &SubspaceBasis) -> Result<ExtendedReal> {
        Ok(self.min_over_detailed(s)?.value)
    }

    /// Bracket on the grid, then bisect.
    fn locate(
        &self,
        node: impl Fn(usize) -> (f64, f64),
        mut eval: impl FnMut(f64) -> Result<f64>,
    ) -> Result<Crossing> {
        let n = self.nodes.len();
        let vals: Vec<(f64, f64)> = (0..n).map(&node).collect();
        if let Some(i) = vals.iter().position(|&(v, band)| v < -band) {
            if let Some(j) = (i + 1..n).find(|&j| vals[j].0 > vals[j].1) {
                return Err(Error::A3Violation {
                    down: (self.nodes[i.saturating_sub(1)], self.nodes[i]),
                    up: (self.nodes[j - 1], self.nodes[j]),
                });
            }
        }
        let Some(k) = vals.iter().position(|&(v, _)| v <= 0.0) else {
            return Ok(Crossing::AllPositive);
        };
        if vals[k].0 == 0.0 {
            return Ok(Crossing::Zero(self.nodes[k]));
        }
        if k == 0 {
            return Ok(Crossing::AllNegative);
        }
        let (mut lo, mut hi) = (self.nodes[k - 1], self.nodes[k]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-13 * (1.0 + mid.abs()) {
                break;
            }
            let v = eval(mid)?;
            if v > 0.0 {
                lo = mid;
            } else if v < 0.0 {
                hi = mid;
            } else {
                return Ok(Crossing::Zero(mid));
            }
        }
        Ok(Crossing::Zero(0.5 * (lo + hi)))
    }

    fn finish(&self, crossing: Crossing, node: impl Fn(usize) -> (f64, f64)) -> RayleighValue {
        let dom = self.family.domain();
        let last = self.nodes.len() - 1;
        match crossing {
            Crossing::Zero(l) => RayleighValue { value: ExtendedReal::Finite(l), clipped: false, at_boundary: false },
            Crossing::AllPositive => {
                let (v, band) = node(last);
                if self.scan.hi_open && v <= band {
                    return RayleighValue {
                        value: ExtendedReal::Finite(self.scan.hi),
                        clipped: false,
                        at_boundary: true,
                    };
                }
                RayleighValue { value: ExtendedReal::PosInf, clipped: self.scan.hi < dom.hi, at_boundary: false }
            }
            Crossing::AllNegative => {
                let (v, band) = node(0);
                if self.scan.lo_open && v >= -band {
                    return RayleighValue {
                        value: ExtendedReal::Finite(self.scan.lo),
                        clipped: false,
                        at_boundary: true,
                    };
                }
                RayleighValue { value: ExtendedReal::NegInf, clipped: self.scan.lo > dom.lo, at_boundary: false }
            }
        }
    }
}

fn lambda_min_on(t: &SymMatrix, b: &DMatrix<f64>) -> Result<f64> {
    Ok(eigh(&compress_orthonormal(t, b))?.min())
}

/// `p(x)` over `scan` with a `grid_n`-node bracketing grid.
pub fn rayleigh_p(f: &OperatorFamily, x: &DVector<f64>, scan: &Interval, grid_n: usize) -> Result<ExtendedReal> {
    Scanner::new(f, *scan, grid_n)?.p(x)
}

/// `inf_{x ∈ S∖{0}} p(x)`, computed as the zero of `λ ↦ λ_min` of the
/// compression of `T(λ)` to `S`.
pub fn min_rayleigh_over(f: &OperatorFamily, s: &SubspaceBasis, scan: &Interval) -> Result<ExtendedReal> {
    Scanner::new(f, *scan, DEFAULT_GRID)?.min_over(s)
}

/// Classify `λ` against `p(x)` by the sign of `x·T(λ)x`, with the zero band
/// `|form| ≤ 1e-9·(1 + ‖T(λ)‖)·‖x‖²`.
pub fn sign_equivalence_check(f: &OperatorFamily, x: &DVector<f64>, lambda: f64) -> Result<Order> {
    let nn = x.norm_squared();
    if nn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let t = f.evaluate(lambda)?;
    if x.len() != t.dim() {
        return Err(Error::Dimension { expected: t.dim(), found: x.len() });
    }
    let v = t.quad_form(x);
    let band = AT_BAND * (1.0 + t.norm()) * nn;
    Ok(if v > band {
        Order::Below
    } else if v < -band {
        Order::Above
    } else {
        Order::At
    })
}
