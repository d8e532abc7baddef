use nalgebra::DVector;
use serde::Serialize;

use super::OperatorFamily;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{eigh, SymMatrix};
use crate::sampling::{random_unit_vector, rng_from_seed};

/// Knobs for [`validate_a3`].
#[derive(Debug, Clone, Copy)]
pub struct A3Options {
    pub grid_n: usize,
    /// Sub-interval to scan; required when the domain is unbounded.
    pub window: Option<Interval>,
}

impl Default for A3Options {
    fn default() -> Self {
        Self { grid_n: 1024, window: None }
    }
}

/// A vector whose form goes negative and later positive again.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A3Witness {
    pub x: Vec<f64>,
    /// Grid cell in which the form first drops below zero.
    pub down: (f64, f64),
    /// Later grid cell in which it climbs back above zero.
    pub up: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A3Report {
    pub pass: bool,
    pub window: Interval,
    pub grid_n: usize,
    pub vectors_checked: usize,
    pub witnesses: Vec<A3Witness>,
}

/// Sample-based check of the monotone-crossing property: once
/// `λ ↦ x·T(λ)x` is negative it must stay non-positive.
///
/// Probes `sample_count` random unit vectors plus the standard basis and
/// the eigenvectors of `T′` at the window midpoint (the directions in which
/// the form is most likely to increase).
pub fn validate_a3(f: &OperatorFamily, sample_count: usize, seed: u64, opts: A3Options) -> Result<A3Report> {
    let window = match opts.window {
        Some(w) => f
            .domain()
            .intersect(&w)
            .ok_or_else(|| Error::Precondition(format!("window {w} misses the domain {}", f.domain())))?,
        None => *f.domain(),
    };
    if !window.is_bounded() {
        return Err(Error::Precondition(format!(
            "A3 validation needs a bounded window, domain is {}",
            f.domain()
        )));
    }
    let grid = window.grid(opts.grid_n)?;
    let values: Vec<SymMatrix> = grid.iter().map(|&l| f.evaluate(l)).collect::<Result<_>>()?;
    let bands: Vec<f64> = values.iter().map(|t| 1e-9 * (1.0 + t.norm())).collect();

    let n = f.dim();
    let mut probes: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    let mid = grid[grid.len() / 2];
    let slope = eigh(&f.derivative(mid)?)?;
    probes.extend(slope.vectors.column_iter().map(|c| c.into_owned()));
    let mut rng = rng_from_seed(seed);
    probes.extend((0..sample_count).map(|_| random_unit_vector(n, &mut rng)));

    let mut witnesses = Vec::new();
    for x in &probes {
        let scale = x.norm_squared();
        let mut first_negative = None;
        for (i, t) in values.iter().enumerate() {
            let v = t.quad_form(x);
            match first_negative {
                None if v < -bands[i] * scale => first_negative = Some(i),
                Some(j) if v > bands[i] * scale => {
                    witnesses.push(A3Witness {
                        x: x.iter().copied().collect(),
                        down: (grid[j.saturating_sub(1)], grid[j]),
                        up: (grid[i - 1], grid[i]),
                    });
                    break;
                }
                _ => {}
            }
        }
    }
    Ok(A3Report {
        pass: witnesses.is_empty(),
        window,
        grid_n: grid.len(),
        vectors_checked: probes.len(),
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::corpus;

    fn scalar(v: f64) -> SymMatrix {
        SymMatrix::from_diagonal(&[v])
    }

    #[test]
    fn linear_pencils_pass() {
        let r = validate_a3(&corpus::linear(), 64, 1, A3Options::default()).unwrap();
        assert!(r.pass);
        assert_eq!(r.vectors_checked, 64 + 6);
    }

    #[test]
    fn quadratic_scalar_passes_on_its_domain() {
        // 1 − λ − λ² has derivative −1 − 2λ < 0 on [0, 2].
        let r = validate_a3(&corpus::quadratic_scalar(), 16, 2, A3Options::default()).unwrap();
        assert!(r.pass);
        // On [-3, 2] the second root −(1+√5)/2 is an upward crossing.
        let f = OperatorFamily::polynomial(
            vec![scalar(1.0), scalar(-1.0), scalar(-1.0)],
            Interval::closed(-3.0, 2.0),
        )
        .unwrap();
        let r = validate_a3(&f, 4, 2, A3Options::default()).unwrap();
        assert!(!r.pass);
        let w = &r.witnesses[0];
        let lower_root = -1.618_033_988_749_895;
        assert!(w.up.0 <= lower_root && lower_root <= w.up.1, "{w:?}");
    }

    #[test]
    fn indefinite_slope_fails_with_witness() {
        // T(λ) = λ·diag(−1, 1): along e₂ the form λ increases through 0.
        let c1 = SymMatrix::from_diagonal(&[-1.0, 1.0]);
        let f = OperatorFamily::polynomial(vec![SymMatrix::zeros(2), c1], Interval::closed(-1.0, 1.0)).unwrap();
        let r = validate_a3(&f, 8, 3, A3Options::default()).unwrap();
        assert!(!r.pass);
        let e2 = r.witnesses.iter().find(|w| w.x == vec![0.0, 1.0]).expect("eigenvector of C1 flagged");
        assert!(e2.down.1 <= e2.up.0);
        assert!(e2.up.0 <= 1e-12 && e2.up.1 >= -1e-12);
    }

    #[test]
    fn unbounded_domain_needs_window() {
        let f = OperatorFamily::shifted_linear(SymMatrix::identity(2), Interval::real_line()).unwrap();
        assert!(validate_a3(&f, 4, 0, A3Options::default()).is_err());
        let opts = A3Options { window: Some(Interval::closed(-2.0, 2.0)), ..Default::default() };
        assert!(validate_a3(&f, 4, 0, opts).unwrap().pass);
    }

    #[test]
    fn corpus_satisfies_a3() {
        for f in corpus::all() {
            let r = validate_a3(&f, 32, 7, A3Options::default()).unwrap();
            assert!(r.pass, "{:?}: {:?}", f.name(), r.witnesses.first());
        }
    }
}
