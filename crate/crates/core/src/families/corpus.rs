//! Built-in demo families.
//!
//! | name                   | kind           | domain      | eigenvalues in domain          |
//! |------------------------|----------------|-------------|--------------------------------|
//! | `linear`               | shifted linear | `[0, 5]`    | 1, 2, 3                        |
//! | `multiplicity`         | shifted linear | `[-1, 6]`   | 1, 2 (double), 5               |
//! | `linear-rotated`       | shifted linear | `[0, 5]`    | 1, 2, 3                        |
//! | `multiplicity-rotated` | shifted linear | `[-1, 6]`   | 1, 2 (double), 5               |
//! | `pencil-gap`           | shifted linear | `[-3, 4]`   | −1, 2                          |
//! | `quadratic-scalar`     | polynomial     | `[0, 2]`    | (√5 − 1)/2                     |
//! | `quadratic-2x2`        | polynomial     | `[0, 4]`    | 1.11237…, 1.61243…             |
//! | `schur`                | schur          | `[-1, 4.5]` | 0.75790…, 2.90459…             |
//! | `remark-i`             | polynomial     | `[-2, 2]`   | none                           |
//! | `remark-iii-{4,8,16}`  | pwl diagonal   | `[-1, 3]`   | 1/k for k = 1..d               |

use nalgebra::DMatrix;

use super::{OperatorFamily, PwlEntry};
use crate::interval::Interval;
use crate::linalg::SymMatrix;
use crate::sampling::{haar_orthogonal, rng_from_seed};

/// Seed of the fixed rotation used by the rotated demo families.
pub const ROTATION_SEED: u64 = 2024;

/// Small positive constant of the `remark-i` family.
pub const REMARK_I_A: f64 = 1e-3;

pub const NAMES: &[&str] = &[
    "linear",
    "multiplicity",
    "linear-rotated",
    "multiplicity-rotated",
    "pencil-gap",
    "quadratic-scalar",
    "quadratic-2x2",
    "schur",
    "remark-i",
    "remark-iii-4",
    "remark-iii-8",
    "remark-iii-16",
];

fn sym(rows: &[&[f64]]) -> SymMatrix {
    SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("demo matrix")
}

fn rotation(n: usize) -> DMatrix<f64> {
    haar_orthogonal(n, &mut rng_from_seed(ROTATION_SEED))
}

/// `diag(1, 2, 3) − λI` on `[0, 5]`.
pub fn linear() -> OperatorFamily {
    OperatorFamily::shifted_linear(SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]), Interval::closed(0.0, 5.0))
        .unwrap()
        .with_name("linear")
}

/// `diag(1, 2, 2, 5) − λI` on `[-1, 6]`.
pub fn multiplicity() -> OperatorFamily {
    OperatorFamily::shifted_linear(SymMatrix::from_diagonal(&[1.0, 2.0, 2.0, 5.0]), Interval::closed(-1.0, 6.0))
        .unwrap()
        .with_name("multiplicity")
}

pub fn linear_rotated() -> OperatorFamily {
    linear().conjugate(&rotation(3)).unwrap()
}

pub fn multiplicity_rotated() -> OperatorFamily {
    multiplicity().conjugate(&rotation(4)).unwrap()
}

/// `diag(−1, 2) − λI` on `[-3, 4]`; `(−1, 2)` is a spectral gap.
pub fn pencil_gap() -> OperatorFamily {
    OperatorFamily::shifted_linear(SymMatrix::from_diagonal(&[-1.0, 2.0]), Interval::closed(-3.0, 4.0))
        .unwrap()
        .with_name("pencil-gap")
}

/// Scalar `1 − λ − λ²` on `[0, 2]`.
pub fn quadratic_scalar() -> OperatorFamily {
    let c = |v: f64| SymMatrix::from_diagonal(&[v]);
    OperatorFamily::polynomial(vec![c(1.0), c(-1.0), c(-1.0)], Interval::closed(0.0, 2.0))
        .unwrap()
        .with_name("quadratic-scalar")
}

/// Overdamped `K − λD − λ²M` with `K = [[5,1],[1,3]]`, `D = diag(2,1)`,
/// `M = I` on `[0, 4]`.
pub fn quadratic_2x2() -> OperatorFamily {
    let k = sym(&[&[5.0, 1.0], &[1.0, 3.0]]);
    let d = SymMatrix::from_diagonal(&[2.0, 1.0]);
    let m = SymMatrix::identity(2);
    OperatorFamily::polynomial(vec![k, d.scale(-1.0), m.scale(-1.0)], Interval::closed(0.0, 4.0))
        .unwrap()
        .with_name("quadratic-2x2")
}

/// Schur complement of `[[diag(1,3), B], [Bᵀ, 5]]` with `B = (1, 0.5)ᵀ`
/// on `[-1, 4.5]`, below the pole at 5.
pub fn schur_demo() -> OperatorFamily {
    OperatorFamily::schur(
        SymMatrix::from_diagonal(&[1.0, 3.0]),
        DMatrix::from_column_slice(2, 1, &[1.0, 0.5]),
        SymMatrix::from_diagonal(&[5.0]),
        Interval::closed(-1.0, 4.5),
    )
    .unwrap()
    .with_name("schur")
}

/// Scalar `−λ² − a` with `a = 1e-3`: every form is negative, so there is
/// no spectrum, and `T′(0) = 0` breaks the uniform slope condition at 0.
pub fn remark_i() -> OperatorFamily {
    let c = |v: f64| SymMatrix::from_diagonal(&[v]);
    OperatorFamily::polynomial(vec![c(-REMARK_I_A), c(0.0), c(-1.0)], Interval::closed(-2.0, 2.0))
        .unwrap()
        .with_name("remark-i")
}

/// `diag(T₁, …, T_d)` with `T_k(λ) = 1` for `λ ≤ 0`, `1 − kλ` on
/// `(0, 2/k)` and `−1` beyond; eigenvalues `1/k`.
pub fn remark_iii(d: usize) -> OperatorFamily {
    let entries = (1..=d)
        .map(|k| PwlEntry::new(vec![(0.0, 1.0), (2.0 / k as f64, -1.0)]).unwrap())
        .collect();
    OperatorFamily::pwl_diag(entries, Interval::closed(-1.0, 3.0))
        .unwrap()
        .with_name(format!("remark-iii-{d}"))
}

pub fn by_name(name: &str) -> Option<OperatorFamily> {
    Some(match name {
        "linear" => linear(),
        "multiplicity" => multiplicity(),
        "linear-rotated" => linear_rotated(),
        "multiplicity-rotated" => multiplicity_rotated(),
        "pencil-gap" => pencil_gap(),
        "quadratic-scalar" => quadratic_scalar(),
        "quadratic-2x2" => quadratic_2x2(),
        "schur" => schur_demo(),
        "remark-i" => remark_i(),
        "remark-iii-4" => remark_iii(4),
        "remark-iii-8" => remark_iii(8),
        "remark-iii-16" => remark_iii(16),
        _ => return None,
    })
}

pub fn all() -> Vec<OperatorFamily> {
    NAMES.iter().map(|n| by_name(n).unwrap()).collect()
}

/// Perturbation demo: `A = diag(−1, 2)`, `B = 0.5·e₁e₁ᵀ`.
pub fn perturbation_pair() -> (SymMatrix, SymMatrix) {
    (SymMatrix::from_diagonal(&[-1.0, 2.0]), SymMatrix::from_diagonal(&[0.5, 0.0]))
}
