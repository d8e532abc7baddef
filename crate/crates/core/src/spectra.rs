//! Eigenvalues of an operator family through its counting function, and
//! the certificates built on top of them.
//!
//! Since every eigencurve of `T(λ)` crosses zero downward, the number
//! `N(λ)` of negative eigenvalues of `T(λ)` is non-decreasing and jumps
//! exactly at the eigenvalues of the family, by their multiplicity.
//! Bisection on `N` is therefore exhaustive and multiplicity aware.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::OperatorFamily;
use crate::interval::Interval;
use crate::krein::{is_maximal_nonneg, krein_frame, MaxNonnegSubspace};
use crate::linalg::{compress_orthonormal, direct_sum_defect, eigh, lambda_max, SubspaceBasis, SymMatrix};
use crate::report::{ser_basis, ser_opt_ext_f64};
use crate::sampling::{random_unit_vector, rng_from_seed};

/// Kernel tolerance relative to `1 + ‖T(λ)‖`.
pub const KTOL_REL: f64 = 1e-8;
/// Default relative bisection width.
pub const BISECT_REL: f64 = 1e-12;
/// Jumps closer than this (relative) are reported as one eigenvalue.
pub const CLUSTER_REL: f64 = 1e-10;
/// Direct-sum defect threshold of the decomposition check.
pub const DECOMP_PASS_TOL: f64 = 1e-10;
/// Default grid of the slope-condition check.
pub const VM_GRID: usize = 257;
const VM_SAMPLES: usize = 256;
const VM_ASCENT_STEPS: usize = 100;
const GOLDEN_ITERS: usize = 80;

/// `N(λ)` and whether `T(λ)` is numerically singular there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Count {
    pub n: usize,
    /// Some eigenvalue of `T(λ)` lies within the kernel tolerance of zero.
    pub boundary: bool,
}

/// Number of negative eigenvalues of `T(λ)`.
///
/// The count uses a sharp zero threshold so that jump locations are not
/// biased by the tolerance; the tolerance only drives the boundary flag.
pub fn counting(f: &OperatorFamily, lambda: f64) -> Result<Count> {
    let t = f.evaluate(lambda)?;
    count_of(&t)
}

fn count_of(t: &SymMatrix) -> Result<Count> {
    let ktol = KTOL_REL * (1.0 + t.norm());
    let eig = eigh(t)?;
    Ok(Count {
        n: eig.values.iter().filter(|&&v| v < 0.0).count(),
        boundary: eig.values.iter().any(|v| v.abs() <= ktol),
    })
}

/// An eigenvalue of the family with an orthonormal basis of `ker T(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub lambda: f64,
    pub multiplicity: usize,
    #[serde(serialize_with = "ser_basis")]
    pub eigenvectors: SubspaceBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub interval: Interval,
    /// Dimension of the space `T(λ)` acts on.
    pub ambient_dim: usize,
    pub eigenvalues: Vec<SpectralPoint>,
    /// Every probe `(λ, N(λ))`, sorted by `λ`.
    pub counting_trace: Vec<(f64, usize)>,
}

impl SpectrumReport {
    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues.iter().flat_map(|p| std::iter::repeat_n(p.lambda, p.multiplicity)).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|p| p.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// All eigenvectors side by side.
    pub fn eigenvector_basis(&self) -> Result<SubspaceBasis> {
        if self.eigenvalues.is_empty() {
            return Ok(SubspaceBasis::empty(self.ambient_dim));
        }
        SubspaceBasis::concat(&self.eigenvalues.iter().map(|p| &p.eigenvectors).collect::<Vec<_>>())
    }
}

/// All eigenvalues in `[a, b]` with multiplicities and eigenvectors.
///
/// Both endpoints must be resolvent points. Jumps of `N` are isolated by
/// bisection down to width `width_rel·(1 + |λ|)`.
pub fn spectrum_in(f: &OperatorFamily, interval: &Interval, width_rel: f64) -> Result<SpectrumReport> {
    if !interval.is_bounded() {
        return Err(Error::InvalidInterval(format!("{interval} must be bounded")));
    }
    if !(width_rel > 0.0) {
        return Err(Error::Precondition("bisection width must be positive".into()));
    }
    let (a, b) = (interval.lo, interval.hi);
    let ca = counting(f, a)?;
    let cb = counting(f, b)?;
    for (x, c) in [(a, ca), (b, cb)] {
        if c.boundary {
            return Err(Error::Precondition(format!("interval endpoint {x} is (numerically) an eigenvalue")));
        }
    }
    let mut trace = vec![(a, ca.n), (b, cb.n)];
    let mut jumps = Vec::new();
    if cb.n < ca.n {
        return Err(Error::Consistency(format!("counting function decreases: N({a}) = {}, N({b}) = {}", ca.n, cb.n)));
    }
    bisect(f, (a, ca.n), (b, cb.n), width_rel, &mut trace, &mut jumps)?;
    trace.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Merge numerically coincident jumps.
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for (l, m) in jumps {
        match merged.last_mut() {
            Some((pl, pm)) if (l - *pl).abs() <= CLUSTER_REL * (1.0 + l.abs()) => {
                *pl = (*pl * *pm as f64 + l * m as f64) / (*pm + m) as f64;
                *pm += m;
            }
            _ => merged.push((l, m)),
        }
    }

    let mut eigenvalues = Vec::with_capacity(merged.len());
    for (lambda, multiplicity) in merged {
        let t = f.evaluate(lambda)?;
        let ktol = KTOL_REL * (1.0 + t.norm());
        let kernel = eigh(&t)?.select(|v| v.abs() <= ktol);
        if kernel.dim() != multiplicity {
            return Err(Error::Consistency(format!(
                "jump of {multiplicity} at {lambda} but kernel dimension {}",
                kernel.dim()
            )));
        }
        eigenvalues.push(SpectralPoint { lambda, multiplicity, eigenvectors: kernel });
    }
    Ok(SpectrumReport { interval: *interval, ambient_dim: f.dim(), eigenvalues, counting_trace: trace })
}

fn bisect(
    f: &OperatorFamily,
    lo: (f64, usize),
    hi: (f64, usize),
    width_rel: f64,
    trace: &mut Vec<(f64, usize)>,
    jumps: &mut Vec<(f64, usize)>,
) -> Result<()> {
    if lo.1 == hi.1 {
        return Ok(());
    }
    let mid = 0.5 * (lo.0 + hi.0);
    if hi.0 - lo.0 <= width_rel * (1.0 + mid.abs()) || mid <= lo.0 || mid >= hi.0 {
        jumps.push((mid, hi.1 - lo.1));
        return Ok(());
    }
    let c = counting(f, mid)?.n;
    trace.push((mid, c));
    if c < lo.1 || c > hi.1 {
        return Err(Error::Consistency(format!("counting function is not monotone near {mid}")));
    }
    bisect(f, lo, (mid, c), width_rel, trace, jumps)?;
    bisect(f, (mid, c), hi, width_rel, trace, jumps)
}

/// Slope `x·T′(λ₀)x / ‖x‖²` of the eigencurve of `T(λ)` through `x0`.
///
/// `x0` must be an approximate eigenvector of `T(λ₀)`: the residual
/// `‖T x − ν x‖ / ‖x‖` with `ν` its Rayleigh quotient may not exceed
/// `1e-8·(1 + ‖T(λ₀)‖)`.
pub fn eigencurve_derivative(f: &OperatorFamily, lambda0: f64, x0: &DVector<f64>) -> Result<f64> {
    let t = f.evaluate(lambda0)?;
    eigencurve_derivative_tol(f, lambda0, x0, KTOL_REL * (1.0 + t.norm()))
}

pub fn eigencurve_derivative_tol(f: &OperatorFamily, lambda0: f64, x0: &DVector<f64>, tol: f64) -> Result<f64> {
    let nn = x0.norm_squared();
    if nn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let t = f.evaluate(lambda0)?;
    if x0.len() != t.dim() {
        return Err(Error::Dimension { expected: t.dim(), found: x0.len() });
    }
    let tx = t.matrix() * x0;
    let nu = x0.dot(&tx) / nn;
    let residual = (tx - x0 * nu).norm() / nn.sqrt();
    if residual > tol {
        return Err(Error::NotEigenvector { residual, tol });
    }
    Ok(f.derivative(lambda0)?.quad_form(x0) / nn)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted,
    Unknown,
}

/// Dual bound `m̄(λ)` and its multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualBound {
    pub lambda: f64,
    pub mu: f64,
    pub bound: f64,
}

/// A unit vector violating the slope condition at `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VmWitness {
    pub lambda: f64,
    pub x: Vec<f64>,
    /// `x·T(λ)x`, at most `ε` in absolute value.
    pub form: f64,
    /// `x·T′(λ)x`, larger than `−δ`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub eps: f64,
    pub delta: f64,
    /// `min` of the form of `T(μ₂)` on the subspace; absent when the
    /// subspace is trivial and the condition holds vacuously.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_ext_f64")]
    pub a: Option<f64>,
    /// Largest dual bound over the grid (the binding one).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_dual: Option<DualBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<VmWitness>,
    /// Columns of the subspace used in the resolvent condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<Vec<f64>>>,
    /// Independent check: `T(μ₂)` numerically singular.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint_singular: Option<bool>,
    pub note: String,
}

impl Certificate {
    fn vm(verdict: Verdict, eps: f64, delta: f64, worst: Option<DualBound>, witness: Option<VmWitness>) -> Self {
        Self {
            verdict,
            eps,
            delta,
            a: None,
            worst_dual: worst,
            witness,
            subspace: None,
            endpoint_singular: None,
            note: String::new(),
        }
    }
}

/// `min_{|μ| ≤ cap} λ_max(T′ − μT) + |μ|ε` with `cap = 10‖T′‖ / max(ε, 1e-12)`.
///
/// For a unit `x` with `|x·Tx| ≤ ε` every `μ` gives
/// `x·T′x ≤ λ_max(T′ − μT) + |μ|ε`, so the value bounds the slope from
/// above. The objective is convex in `μ`; golden-section search finds it.
pub fn dual_bound(t: &SymMatrix, dt: &SymMatrix, eps: f64) -> Result<(f64, f64)> {
    let cap = 10.0 * dt.norm() / eps.max(1e-12);
    let h = |mu: f64| -> Result<f64> { Ok(lambda_max(&dt.sub(&t.scale(mu)))? + mu.abs() * eps) };
    let mut best = (0.0, h(0.0)?);
    if cap > 0.0 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (-cap, cap);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (h(x1)?, h(x2)?);
        for _ in 0..GOLDEN_ITERS {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = h(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = h(x2)?;
            }
            for (x, v) in [(x1, f1), (x2, f2)] {
                if v < best.1 {
                    best = (x, v);
                }
            }
            if hi - lo <= 1e-12 * cap {
                break;
            }
        }
    }
    Ok(best)
}

/// Checks the uniform slope condition `|x·T(λ)x| ≤ ε‖x‖² ⟹ x·T′(λ)x ≤ −δ‖x‖²`
/// on a grid over `[a, b]`.
///
/// Certified when the dual bound is at most `−δ` at every grid point;
/// Refuted when sphere sampling or projected ascent finds a violating
/// unit vector; Unknown otherwise.
pub fn vm_certify(f: &OperatorFamily, interval: &Interval, eps: f64, delta: f64, grid_n: usize) -> Result<Certificate> {
    if !(eps > 0.0 && delta > 0.0) {
        return Err(Error::Precondition("slope condition needs eps > 0 and delta > 0".into()));
    }
    let probes = VmProbes::new(f, interval, grid_n)?;
    probes.certify(eps, delta, Some(delta))
}

/// Grid evaluations of `T` and `T′` reused across several `ε`.
struct VmProbes {
    points: Vec<(f64, SymMatrix, SymMatrix)>,
}

impl VmProbes {
    fn new(f: &OperatorFamily, interval: &Interval, grid_n: usize) -> Result<Self> {
        if !f.domain().covers(interval) {
            return Err(Error::Precondition(format!("{interval} is not inside the domain {}", f.domain())));
        }
        let grid = interval.grid(grid_n)?;
        let points = grid
            .into_iter()
            .map(|l| Ok((l, f.evaluate(l)?, f.derivative(l)?)))
            .collect::<Result<_>>()?;
        Ok(Self { points })
    }

    /// `(μ, m̄)` at every grid point.
    fn duals(&self, eps: f64) -> Result<Vec<(f64, f64)>> {
        self.points.iter().map(|(_, t, dt)| dual_bound(t, dt, eps)).collect()
    }

    fn certify(&self, eps: f64, delta_req: f64, delta: Option<f64>) -> Result<Certificate> {
        let duals = self.duals(eps)?;
        self.certify_with(eps, delta_req, delta, &duals, true)
    }

    /// With `delta = None` the δ is chosen as half the dual margin and a
    /// refutation needs a non-negative slope (violating every δ > 0).
    /// Without `search` only the dual bounds are consulted.
    fn certify_with(
        &self,
        eps: f64,
        delta_req: f64,
        delta: Option<f64>,
        duals: &[(f64, f64)],
        search: bool,
    ) -> Result<Certificate> {
        let mut worst = DualBound { lambda: f64::NAN, mu: 0.0, bound: f64::NEG_INFINITY };
        for ((l, _, _), &(mu, bound)) in self.points.iter().zip(duals) {
            if bound > worst.bound {
                worst = DualBound { lambda: *l, mu, bound };
            }
        }
        let delta = match delta {
            Some(d) => d,
            None if worst.bound < 0.0 => -0.5 * worst.bound,
            None => 0.0,
        };
        if delta > 0.0 && worst.bound <= -delta {
            return Ok(Certificate::vm(Verdict::Certified, eps, delta, Some(worst), None));
        }
        if search {
            let mut rng = rng_from_seed(eps.to_bits() ^ 0x5eed);
            for ((l, t, dt), &(_, bound)) in self.points.iter().zip(duals) {
                // The dual bound caps every slope in the band.
                let impossible = if delta > 0.0 { bound <= -delta_req.max(delta) } else { bound < 0.0 };
                if impossible {
                    continue;
                }
                if let Some(w) = search_witness(*l, t, dt, eps, delta, &mut rng)? {
                    return Ok(Certificate::vm(Verdict::Refuted, eps, delta, Some(worst), Some(w)));
                }
            }
        }
        Ok(Certificate::vm(Verdict::Unknown, eps, delta, Some(worst), None))
    }
}

fn search_witness(
    lambda: f64,
    t: &SymMatrix,
    dt: &SymMatrix,
    eps: f64,
    delta: f64,
    rng: &mut impl Rng,
) -> Result<Option<VmWitness>> {
    let d = t.dim();
    let check = |x: &DVector<f64>| -> Option<VmWitness> {
        let form = t.quad_form(x);
        let slope = dt.quad_form(x);
        let violates = if delta > 0.0 { slope > -delta } else { slope >= 0.0 };
        (form.abs() <= eps && violates).then(|| VmWitness { lambda, x: x.iter().copied().collect(), form, slope })
    };
    // Eigenvectors of T with small eigenvalues are feasible outright.
    let eig = eigh(t)?;
    let mut starts: Vec<DVector<f64>> = eig.vectors.column_iter().map(|c| c.into_owned()).collect();
    starts.extend((0..VM_SAMPLES).map(|_| random_unit_vector(d, rng)));
    let mut best: Option<(f64, DVector<f64>)> = None;
    for x in &starts {
        if let Some(w) = check(x) {
            return Ok(Some(w));
        }
        let score = dt.quad_form(x) - (t.quad_form(x).abs() - eps).max(0.0);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, x.clone()));
        }
    }
    // Projected gradient ascent on x·T′x over {‖x‖ = 1, |x·Tx| ≤ ε}.
    let Some((_, mut x)) = best else { return Ok(None) };
    let step = 0.1 / (1.0 + dt.norm());
    for _ in 0..VM_ASCENT_STEPS {
        let g = dt.matrix() * &x;
        x += g * (2.0 * step);
        x /= x.norm();
        project_to_band(t, &mut x, eps);
        if let Some(w) = check(&x) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Newton steps on `x·Tx` toward the band `|x·Tx| ≤ ε`, renormalizing.
fn project_to_band(t: &SymMatrix, x: &mut DVector<f64>, eps: f64) {
    for _ in 0..20 {
        let form = t.quad_form(x);
        if form.abs() <= eps {
            return;
        }
        let target = 0.5 * eps * form.signum();
        let grad = t.matrix() * &*x * 2.0;
        let gg = grad.norm_squared();
        if gg == 0.0 {
            return;
        }
        *x -= grad * ((form - target) / gg);
        let n = x.norm();
        if n == 0.0 {
            return;
        }
        *x /= n;
    }
}

/// Choice of the subspace in the resolvent condition.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ResolventSubspace {
    /// `L₍₀,∞₎(T(μ₁))`.
    Canonical,
    Given(MaxNonnegSubspace),
}

/// Choice of `(ε, δ)` for the slope condition.
#[derive(Debug, Clone, Copy)]
pub enum VmChoice {
    Given { eps: f64, delta: f64 },
    /// Try `ε = 2⁻ᵏ ε₀`, `k = 0..=steps`, with `δ` half the dual margin.
    Auto { eps0: f64, steps: u32 },
}

impl Default for VmChoice {
    fn default() -> Self {
        VmChoice::Auto { eps0: 0.5, steps: 20 }
    }
}

/// Sufficient condition for `μ₂ ∈ ρ(T)`: a maximal non-negative subspace
/// `M` of `T(μ₁)` on which `T(μ₂) ≥ a > 0`, together with the slope
/// condition on `[μ₁, μ₂]`.
pub fn resolvent_certify(
    f: &OperatorFamily,
    mu1: f64,
    mu2: f64,
    m: &ResolventSubspace,
    vm: VmChoice,
    grid_n: usize,
) -> Result<Certificate> {
    if !(mu1 < mu2) {
        return Err(Error::InvalidInterval(format!("need mu1 < mu2, got {mu1} and {mu2}")));
    }
    let window = Interval::closed(mu1, mu2);
    if !f.domain().covers(&window) {
        return Err(Error::OutOfDomain { lambda: if f.domain().contains(mu1) { mu2 } else { mu1 }, domain: f.domain().to_string() });
    }
    let basis = match m {
        ResolventSubspace::Canonical => krein_frame(f, mu1)?.k_plus,
        ResolventSubspace::Given(m) => {
            if !is_maximal_nonneg(f, mu1, &m.basis)? {
                return Err(Error::Hypothesis(format!("subspace is not maximal non-negative at {mu1}")));
            }
            m.basis.clone()
        }
    };
    let t2 = f.evaluate(mu2)?;
    let tol = KTOL_REL * (1.0 + t2.norm());
    let a = if basis.is_empty() {
        None
    } else {
        Some(eigh(&compress_orthonormal(&t2, &basis.orthonormal()))?.min())
    };
    let endpoint_singular = count_of(&t2)?.boundary;
    let columns: Vec<Vec<f64>> = basis.matrix().column_iter().map(|c| c.iter().copied().collect()).collect();
    let finish = |mut c: Certificate, note: &str| {
        c.a = a;
        c.subspace = Some(columns.clone());
        c.endpoint_singular = Some(endpoint_singular);
        c.note = note.to_string();
        c
    };

    let a_holds = a.is_none_or(|av| av > tol);
    let probes = VmProbes::new(f, &window, grid_n)?;
    let vm_cert = match vm {
        VmChoice::Given { eps, delta } => {
            if !(eps > 0.0 && delta > 0.0) {
                return Err(Error::Precondition("slope condition needs eps > 0 and delta > 0".into()));
            }
            let duals = probes.duals(eps)?;
            probes.certify_with(eps, delta, Some(delta), &duals, a_holds)?
        }
        VmChoice::Auto { eps0, steps } => {
            if !(eps0 > 0.0) {
                return Err(Error::Precondition("eps0 must be positive".into()));
            }
            // Dual bounds first for every ε; the witness search is costly
            // and only matters when nothing certifies.
            let mut tried = Vec::new();
            let mut found = None;
            for k in 0..=steps {
                let eps = eps0 * 0.5f64.powi(k as i32);
                let duals = probes.duals(eps)?;
                let c = probes.certify_with(eps, 0.0, None, &duals, false)?;
                if c.verdict == Verdict::Certified {
                    found = Some(c);
                    break;
                }
                tried.push((eps, duals, c));
            }
            match found {
                Some(c) => c,
                None => {
                    // The band |x·Tx| ≤ ε grows with ε, so a violating
                    // vector exists for some tried ε iff it exists for the
                    // largest one.
                    let (eps, duals, last) = tried.swap_remove(0);
                    let refuted = if a_holds { Some(probes.certify_with(eps, 0.0, None, &duals, true)?) } else { None };
                    match refuted {
                        Some(c) if c.verdict == Verdict::Refuted => c,
                        _ => tried.pop().map(|t| t.2).unwrap_or(last),
                    }
                }
            }
        }
    };

    if let Some(av) = a {
        if !(av > tol) {
            let c = Certificate { verdict: Verdict::Unknown, ..vm_cert };
            return Ok(finish(c, "form of T(mu2) is not uniformly positive on the subspace"));
        }
    }
    let note = match vm_cert.verdict {
        Verdict::Certified => "mu2 is a resolvent point",
        Verdict::Refuted => "slope condition refuted on [mu1, mu2]",
        Verdict::Unknown => "slope condition undecided on [mu1, mu2]",
    };
    Ok(finish(vm_cert, note))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub alpha: f64,
    pub beta: f64,
    /// `(dim L₍₋∞,0₎(T(α)), dim U, dim L₍₀,∞₎(T(β)))`.
    pub dims: (usize, usize, usize),
    pub ambient_dim: usize,
    pub defect: f64,
    pub pass: bool,
    pub eigenvalues: Vec<f64>,
}

/// Checks `ℝᵈ = L₍₋∞,0₎(T(α)) ∔ span{eigenvectors in (α, β)} ∔ L₍₀,∞₎(T(β))`.
pub fn decomposition_check(f: &OperatorFamily, alpha: f64, beta: f64) -> Result<DecompositionReport> {
    if !(alpha < beta) {
        return Err(Error::InvalidInterval(format!("need alpha < beta, got {alpha} and {beta}")));
    }
    let ta = f.evaluate(alpha)?;
    let tb = f.evaluate(beta)?;
    for (x, t) in [(alpha, &ta), (beta, &tb)] {
        let c = count_of(t)?;
        if c.boundary {
            return Err(Error::Precondition(format!("endpoint {x} is (numerically) an eigenvalue")));
        }
    }
    let v_minus = eigh(&ta)?.select(|v| v < 0.0);
    let v_plus = eigh(&tb)?.select(|v| v > 0.0);
    let spec = spectrum_in(f, &Interval::closed(alpha, beta), BISECT_REL)?;
    let u = spec.eigenvector_basis()?;
    let dims = (v_minus.dim(), u.dim(), v_plus.dim());
    let defect = direct_sum_defect(&[v_minus, u, v_plus])?;
    let pass = dims.0 + dims.1 + dims.2 == f.dim() && defect > DECOMP_PASS_TOL;
    Ok(DecompositionReport { alpha, beta, dims, ambient_dim: f.dim(), defect, pass, eigenvalues: spec.values() })
}

/// Sorted eigenvalues of `T(λ)` on a grid, one row per node.
pub fn eigencurves(f: &OperatorFamily, interval: &Interval, grid_n: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    interval.grid(grid_n)?.into_iter().map(|l| Ok((l, eigh(&f.evaluate(l)?)?.values))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::corpus;
    use crate::sampling::gaussian_matrix;

    fn pencil(diag: &[f64], lo: f64, hi: f64) -> OperatorFamily {
        OperatorFamily::shifted_linear(SymMatrix::from_diagonal(diag), Interval::closed(lo, hi)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn counting_examples() {
        let f = pencil(&[1.0, 2.0, 3.0], 0.0, 5.0);
        assert_eq!(counting(&f, 0.0).unwrap().n, 0);
        assert_eq!(counting(&f, 2.5).unwrap().n, 2);
        assert_eq!(counting(&f, 4.0).unwrap().n, 3);
        assert!(counting(&f, 2.0).unwrap().boundary);
        assert!(!counting(&f, 2.5).unwrap().boundary);
        // Entry k of remark-iii at 0.3 is 1 − 0.3k, negative only for k = 4.
        assert_eq!(counting(&corpus::remark_iii(4), 0.3).unwrap().n, 1);
        let r = corpus::remark_i();
        for l in r.domain().grid(17).unwrap() {
            assert_eq!(counting(&r, l).unwrap().n, 1);
        }
    }

    #[test]
    fn spectrum_examples() {
        let f = corpus::multiplicity();
        let s = spectrum_in(&f, &Interval::closed(0.0, 3.0), BISECT_REL).unwrap();
        let got: Vec<(f64, usize)> = s.eigenvalues.iter().map(|p| (p.lambda, p.multiplicity)).collect();
        assert_eq!(got.len(), 2);
        assert!(close(got[0].0, 1.0, 1e-11) && got[0].1 == 1);
        assert!(close(got[1].0, 2.0, 1e-11) && got[1].1 == 2);
        assert_eq!(s.eigenvalues[1].eigenvectors.dim(), 2);

        let q = corpus::quadratic_scalar();
        let s = spectrum_in(&q, &Interval::closed(0.0, 2.0), BISECT_REL).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(s.values().len(), 1);
        assert!(close(s.values()[0], golden, 1e-11));

        assert!(spectrum_in(&f, &Interval::closed(1.0, 3.0), BISECT_REL).is_err());
    }

    #[test]
    fn rotated_multiplicity_is_found() {
        let f = corpus::multiplicity_rotated();
        let s = spectrum_in(&f, &Interval::closed(-1.0, 6.0), BISECT_REL).unwrap();
        let got: Vec<usize> = s.eigenvalues.iter().map(|p| p.multiplicity).collect();
        assert_eq!(got, vec![1, 2, 1]);
        for (p, want) in s.eigenvalues.iter().zip([1.0, 2.0, 5.0]) {
            assert!(close(p.lambda, want, 1e-10), "{}", p.lambda);
        }
    }

    #[test]
    fn frozen_quadratic_and_schur_values() {
        let s = spectrum_in(&corpus::quadratic_2x2(), &Interval::closed(0.0, 4.0), BISECT_REL).unwrap();
        let v = s.values();
        assert!(close(v[0], 1.1123745259361242, 1e-10) && close(v[1], 1.6124357608739932, 1e-10), "{v:?}");
        let s = spectrum_in(&corpus::schur_demo(), &Interval::closed(-1.0, 4.5), BISECT_REL).unwrap();
        let v = s.values();
        assert!(close(v[0], 0.75790402, 1e-8) && close(v[1], 2.90459651, 1e-8), "{v:?}");
    }

    #[test]
    fn multiplicity_matches_kernel_across_corpus() {
        for f in corpus::all() {
            let dom = f.domain();
            let scan = Interval::closed(dom.lo + 1e-3, dom.hi - 1e-3);
            let s = spectrum_in(&f, &scan, BISECT_REL).unwrap();
            let jump = counting(&f, scan.hi).unwrap().n - counting(&f, scan.lo).unwrap().n;
            assert_eq!(s.total_multiplicity(), jump, "{:?}", f.name());
            // Eigenvectors of distinct eigenvalues are independent.
            let all = s.eigenvector_basis().unwrap();
            assert_eq!(all.dim(), jump);
        }
        let r3 = spectrum_in(&corpus::remark_iii(8), &Interval::closed(0.01, 2.5), BISECT_REL).unwrap();
        let want: Vec<f64> = (1..=8).rev().map(|k| 1.0 / k as f64).collect();
        for (g, w) in r3.values().iter().zip(&want) {
            assert!(close(*g, *w, 1e-11));
        }
    }

    #[test]
    fn derivative_examples() {
        let f = corpus::linear_rotated();
        let t = f.evaluate(2.0).unwrap();
        let e = eigh(&t).unwrap();
        for j in 0..3 {
            let x = e.vectors.column(j).into_owned();
            assert!(close(eigencurve_derivative(&f, 2.0, &x).unwrap(), -1.0, 1e-12));
        }
        let junk = DVector::from_column_slice(&[1.0, 1.0, 1.0]);
        assert!(matches!(eigencurve_derivative(&f, 2.0, &junk), Err(Error::NotEigenvector { .. })));
        assert!(eigencurve_derivative(&f, 2.0, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let f = corpus::quadratic_2x2();
        for &l in &[0.3, 1.0, 2.2, 3.5] {
            let e = eigh(&f.evaluate(l).unwrap()).unwrap();
            let h = 1e-5;
            let up = eigh(&f.evaluate(l + h).unwrap()).unwrap().values;
            let dn = eigh(&f.evaluate(l - h).unwrap()).unwrap().values;
            for j in 0..2 {
                let fd = (up[j] - dn[j]) / (2.0 * h);
                let d = eigencurve_derivative(&f, l, &e.vectors.column(j).into_owned()).unwrap();
                assert!((d - fd).abs() <= 1e-6 * d.abs(), "{l}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn degenerate_eigenvalue_splits_by_slope() {
        // T(λ) = diag(1 − λ, 1 − 3λ) has the double eigenvalue ν = 1 at
        // λ = 0; its two branches have slopes −1 and −3.
        let c0 = SymMatrix::identity(2);
        let c1 = SymMatrix::from_diagonal(&[-1.0, -3.0]);
        let f = OperatorFamily::polynomial(vec![c0, c1], Interval::closed(-1.0, 1.0)).unwrap();
        let e1 = DVector::from_column_slice(&[1.0, 0.0]);
        let e2 = DVector::from_column_slice(&[0.0, 1.0]);
        let s1 = eigencurve_derivative(&f, 0.0, &e1).unwrap();
        let s2 = eigencurve_derivative(&f, 0.0, &e2).unwrap();
        assert_eq!((s1, s2), (-1.0, -3.0));
        let h = 1e-6;
        let up = eigh(&f.evaluate(h).unwrap()).unwrap().values;
        // Sorted ascending: the steeper branch is below for λ > 0.
        assert!(close((up[0] - 1.0) / h, -3.0, 1e-6) && close((up[1] - 1.0) / h, -1.0, 1e-6));
    }

    #[test]
    fn dual_bound_is_an_upper_bound() {
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let n = 4;
            let g = gaussian_matrix(n, n, &mut rng);
            let t = SymMatrix::new(&g + g.transpose()).unwrap();
            let g = gaussian_matrix(n, n, &mut rng);
            let dt = SymMatrix::new(&g + g.transpose()).unwrap();
            let eps = 0.3;
            let (_, bound) = dual_bound(&t, &dt, eps).unwrap();
            for _ in 0..500 {
                let x = random_unit_vector(n, &mut rng);
                if t.quad_form(&x).abs() <= eps {
                    assert!(dt.quad_form(&x) <= bound + 1e-12);
                }
            }
        }
    }

    #[test]
    fn vm_examples() {
        let f = corpus::linear_rotated();
        let c = vm_certify(&f, f.domain(), 0.7, 1.0, VM_GRID).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);

        // −λ² − a at λ = 0: T′(0) = 0 and |T(0)| = a ≤ ε.
        let r = corpus::remark_i();
        let c = vm_certify(&r, &Interval::closed(-1.0, 0.0), 2.0 * corpus::REMARK_I_A, 1e-3, VM_GRID).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        let w = c.witness.unwrap();
        let x = DVector::from_vec(w.x.clone());
        let form = r.evaluate(w.lambda).unwrap().quad_form(&x);
        let slope = r.derivative(w.lambda).unwrap().quad_form(&x);
        assert!(form.abs() <= 2.0 * corpus::REMARK_I_A && slope > -1e-3, "{w:?}");
        assert!(w.lambda.abs() < 0.05);

        // K − λD − λ²M on [0, 1]: T′ = −D − 2λM ≤ −λ_min(D) = −1.
        let q = corpus::quadratic_2x2();
        let c = vm_certify(&q, &Interval::closed(0.0, 1.0), 0.1, 0.99, VM_GRID).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(c.worst_dual.unwrap().bound <= -0.99);
        // On [0, 2] the kernel vectors at 1.112… and 1.612… lie in the band
        // with slopes between −6 and −3, so δ = 10 must fail.
        let c = vm_certify(&q, &Interval::closed(0.0, 2.0), 0.1, 10.0, VM_GRID).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
    }

    #[test]
    fn resolvent_examples() {
        let f = corpus::pencil_gap();
        let c = resolvent_certify(&f, 0.0, 1.0, &ResolventSubspace::Canonical, VmChoice::default(), VM_GRID).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(close(c.a.unwrap(), 1.0, 1e-12));
        assert_eq!(c.endpoint_singular, Some(false));

        let r = corpus::remark_i();
        let c = resolvent_certify(&r, -1.0, 0.0, &ResolventSubspace::Canonical, VmChoice::default(), VM_GRID).unwrap();
        assert_eq!(c.a, None);
        assert_ne!(c.verdict, Verdict::Certified);
        assert_eq!(c.verdict, Verdict::Refuted);

        // Inside the gap (1.1124, 1.6124) of the quadratic family.
        let q = corpus::quadratic_2x2();
        let c = resolvent_certify(&q, 1.2, 1.5, &ResolventSubspace::Canonical, VmChoice::default(), VM_GRID).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        let s = spectrum_in(&q, &Interval::closed(1.5 - 1e-3, 1.5 + 1e-3), BISECT_REL).unwrap();
        assert!(s.is_empty());
        // Crossing an eigenvalue the positive part loses positivity.
        let c = resolvent_certify(&q, 0.5, 1.5, &ResolventSubspace::Canonical, VmChoice::default(), VM_GRID).unwrap();
        assert_ne!(c.verdict, Verdict::Certified);
    }

    #[test]
    fn resolvent_rejects_non_maximal_subspace() {
        let f = corpus::linear();
        let fr = krein_frame(&f, 0.5).unwrap();
        let mut m = MaxNonnegSubspace::canonical(fr);
        m.basis = SubspaceBasis::new(m.basis.matrix().columns(0, 2).into_owned()).unwrap();
        let err = resolvent_certify(&f, 0.5, 0.8, &ResolventSubspace::Given(m), VmChoice::default(), 33).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn decomposition_examples() {
        let f = corpus::linear();
        let r = decomposition_check(&f, 0.5, 2.5).unwrap();
        assert_eq!(r.dims, (0, 2, 1));
        assert!(close(r.defect, 1.0, 1e-12) && r.pass);
        let r = decomposition_check(&corpus::linear_rotated(), 0.5, 2.5).unwrap();
        assert_eq!(r.dims, (0, 2, 1));
        assert!(close(r.defect, 1.0, 1e-10) && r.pass);
        let r = decomposition_check(&corpus::quadratic_2x2(), 0.5, 3.0).unwrap();
        assert_eq!(r.dims.1, 2);
        assert!(r.pass && r.defect > 1e-6);
        assert!(decomposition_check(&f, 1.0, 2.5).is_err());
    }

    #[test]
    fn counting_is_monotone_across_corpus() {
        for f in corpus::all() {
            let grid = f.domain().grid(1024).unwrap();
            let counts: Vec<usize> = grid.iter().map(|&l| counting(&f, l).unwrap().n).collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{:?}", f.name());
        }
    }
}
