//! Splitting a grid function into two auxiliary components.
//!
//! Given distinct `rho1[k]`, `rho2[k]`, every pair of consecutive values
//! `(y[k], y[k+1])` is written uniquely as
//!
//! ```text
//! y[k]   = y1[k] + y2[k]
//! y[k+1] = rho1[k] y1[k] + rho2[k] y2[k]
//! ```
//!
//! Neither component has to solve the original recurrence, and for smooth `y`
//! the components may still jump wildly from node to node.

use num_complex::Complex64;

use crate::recurrence::{GridFunction, RecurrenceCoefficients};
use crate::{Error, Result};

/// Default relative margin by which `rho1[k]` and `rho2[k]` must differ.
pub const DEFAULT_DISTINCTNESS: f64 = 1e-10;

/// `|rho1 - rho2| > tol * max(1, |rho1|, |rho2|)`.
pub fn are_distinct(rho1: Complex64, rho2: Complex64, tol: f64) -> bool {
    let scale = 1f64.max(rho1.norm()).max(rho2.norm());
    (rho1 - rho2).norm() > tol * scale
}

/// The pair `(y1[k], y2[k])` at one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitState {
    pub y1: Complex64,
    pub y2: Complex64,
}

impl SplitState {
    pub fn new(y1: Complex64, y2: Complex64) -> Self {
        Self { y1, y2 }
    }

    /// `y[k] = y1[k] + y2[k]`.
    pub fn sum(&self) -> Complex64 {
        self.y1 + self.y2
    }

    pub fn max_abs(&self) -> f64 {
        self.y1.norm().max(self.y2.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.y1.is_finite() && self.y2.is_finite()
    }
}

/// Split states on consecutive nodes starting at `first_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitField {
    pub first_index: i64,
    pub states: Vec<SplitState>,
}

impl SplitField {
    pub fn last_index(&self) -> i64 {
        self.first_index + self.states.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, k: i64) -> Option<SplitState> {
        if k < self.first_index {
            return None;
        }
        self.states.get((k - self.first_index) as usize).copied()
    }

    /// The recombined grid function `y1 + y2`.
    pub fn sums(&self) -> Result<GridFunction> {
        GridFunction::new(self.first_index, self.states.iter().map(SplitState::sum).collect())
    }

    pub fn first_component(&self) -> Result<GridFunction> {
        GridFunction::new(self.first_index, self.states.iter().map(|s| s.y1).collect())
    }

    pub fn second_component(&self) -> Result<GridFunction> {
        GridFunction::new(self.first_index, self.states.iter().map(|s| s.y2).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.states.iter().map(SplitState::max_abs).fold(0.0, f64::max)
    }
}

/// Pointwise distinct splitting sequences over an index window.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSequences {
    first_index: i64,
    rho1: Vec<Complex64>,
    rho2: Vec<Complex64>,
    tolerance: f64,
}

impl SplitSequences {
    pub fn new(first_index: i64, rho1: Vec<Complex64>, rho2: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(first_index, rho1, rho2, DEFAULT_DISTINCTNESS)
    }

    pub fn with_tolerance(
        first_index: i64,
        rho1: Vec<Complex64>,
        rho2: Vec<Complex64>,
        tolerance: f64,
    ) -> Result<Self> {
        if rho1.len() != rho2.len() {
            return Err(Error::LengthMismatch {
                a: rho1.len(),
                b: rho2.len(),
                f: rho2.len(),
            });
        }
        if rho1.is_empty() {
            return Err(Error::EmptyWindow);
        }
        for (i, (r1, r2)) in rho1.iter().zip(&rho2).enumerate() {
            if !are_distinct(*r1, *r2, tolerance) {
                return Err(Error::DegenerateSplit {
                    index: Some(first_index + i as i64),
                });
            }
        }
        Ok(Self {
            first_index,
            rho1,
            rho2,
            tolerance,
        })
    }

    /// The same pair of constants at every node.
    pub fn constant(first_index: i64, len: usize, rho1: Complex64, rho2: Complex64) -> Result<Self> {
        Self::new(first_index, vec![rho1; len], vec![rho2; len])
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn last_index(&self) -> i64 {
        self.first_index + self.rho1.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.rho1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho1.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `(rho1[k], rho2[k])`.
    pub fn at(&self, k: i64) -> Result<(Complex64, Complex64)> {
        if k < self.first_index || k > self.last_index() {
            return Err(Error::IndexOutOfRange {
                index: k,
                first: self.first_index,
                last: self.last_index(),
            });
        }
        let i = (k - self.first_index) as usize;
        Ok((self.rho1[i], self.rho2[i]))
    }

    pub fn rho1_values(&self) -> &[Complex64] {
        &self.rho1
    }

    pub fn rho2_values(&self) -> &[Complex64] {
        &self.rho2
    }

    /// [`decompose`] with the splitting constants of node `k`.
    pub fn decompose_at(&self, k: i64, y_k: Complex64, y_next: Complex64) -> Result<SplitState> {
        let (r1, r2) = self.at(k)?;
        decompose_with_tolerance(y_k, y_next, r1, r2, self.tolerance).map_err(|_| Error::DegenerateSplit {
            index: Some(k),
        })
    }
}

/// Unique `(y1[k], y2[k])` reproducing `y[k]` and `y[k+1]`.
pub fn decompose(y_k: Complex64, y_next: Complex64, rho1: Complex64, rho2: Complex64) -> Result<SplitState> {
    decompose_with_tolerance(y_k, y_next, rho1, rho2, DEFAULT_DISTINCTNESS)
}

pub fn decompose_with_tolerance(
    y_k: Complex64,
    y_next: Complex64,
    rho1: Complex64,
    rho2: Complex64,
    tol: f64,
) -> Result<SplitState> {
    if !are_distinct(rho1, rho2, tol) {
        return Err(Error::DegenerateSplit { index: None });
    }
    let d = rho1 - rho2;
    Ok(SplitState {
        y1: (y_next - rho2 * y_k) / d,
        y2: -(y_next - rho1 * y_k) / d,
    })
}

/// Inverse of [`decompose`]: returns `(y[k], y[k+1])`.
pub fn recombine(state: SplitState, rho1: Complex64, rho2: Complex64) -> (Complex64, Complex64) {
    (state.y1 + state.y2, rho1 * state.y1 + rho2 * state.y2)
}

/// Split state at node `s + 1` (with `s = coeffs.first_index()`) for the
/// Cauchy data `y[s] = y1`, `y[s+1] = y2`, using the recurrence at `s + 1` to
/// supply `y[s+2]`.
pub fn initial_split(
    coeffs: &RecurrenceCoefficients,
    y1: Complex64,
    y2: Complex64,
    rho1: Complex64,
    rho2: Complex64,
) -> Result<SplitState> {
    let k = coeffs.first_index() + 1;
    let (a, b, f) = coeffs.at(k)?;
    if !are_distinct(rho1, rho2, DEFAULT_DISTINCTNESS) {
        return Err(Error::DegenerateSplit { index: Some(k) });
    }
    let d = rho1 - rho2;
    Ok(SplitState {
        y1: (f - y1 * b - (rho2 + a) * y2) / d,
        y2: -(f - y1 * b - (rho1 + a) * y2) / d,
    })
}

/// Residuals of the two linear relations linking the split states at nodes
/// `k` and `k+1`:
///
/// ```text
/// y1[k+1] + y2[k+1] - rho1[k] y1[k] - rho2[k] y2[k]
/// (rho1[k+1] + a[k+1]) y1[k+1] + (rho2[k+1] + a[k+1]) y2[k+1] + b[k+1] (y1[k] + y2[k]) - f[k+1]
/// ```
pub fn step_residuals(
    coeffs: &RecurrenceCoefficients,
    split: &SplitSequences,
    k: i64,
    current: SplitState,
    next: SplitState,
) -> Result<[Complex64; 2]> {
    let (r1, r2) = split.at(k)?;
    let (q1, q2) = split.at(k + 1)?;
    let (a, b, f) = coeffs.at(k + 1)?;
    Ok([
        next.sum() - r1 * current.y1 - r2 * current.y2,
        (q1 + a) * next.y1 + (q2 + a) * next.y2 + b * current.sum() - f,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::recurrence::solve_cauchy;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * 1f64.max(b.norm())
    }

    #[test]
    fn pure_branches() {
        let (r1, r2) = (c64(0.9, 0.2), c64(-0.4, 1.0));
        let y = c64(1.5, -0.5);
        let s = decompose(y, r1 * y, r1, r2).unwrap();
        assert!(close(s.y1, y, 1e-15) && s.y2.norm() < 1e-15);
        let s = decompose(y, r2 * y, r1, r2).unwrap();
        assert!(s.y1.norm() < 1e-15 && close(s.y2, y, 1e-15));
    }

    #[test]
    fn half_half_split() {
        let one = c64(1.0, 0.0);
        let s = decompose(one, c64(0.0, 0.0), one, -one).unwrap();
        assert_eq!(s, SplitState::new(c64(0.5, 0.0), c64(0.5, 0.0)));
        assert_eq!(recombine(s, one, -one), (one, c64(0.0, 0.0)));
    }

    #[test]
    fn first_branch_recombines_to_rho1() {
        let r1 = c64(2.0, -3.0);
        let s = SplitState::new(c64(1.0, 0.0), c64(0.0, 0.0));
        assert_eq!(recombine(s, r1, c64(7.0, 7.0)), (c64(1.0, 0.0), r1));
    }

    #[test]
    fn coinciding_rho_is_degenerate() {
        let r = c64(0.3, 0.3);
        assert_eq!(
            decompose(c64(1.0, 0.0), c64(2.0, 0.0), r, r).unwrap_err(),
            Error::DegenerateSplit { index: None }
        );
        let err = SplitSequences::new(5, vec![r, r], vec![-r, r]).unwrap_err();
        assert_eq!(err, Error::DegenerateSplit { index: Some(6) });
    }

    #[test]
    fn initial_split_agrees_with_decompose() {
        let (r1, r2) = (c64(1.3, 0.1), c64(-0.2, 0.7));
        let a2 = -(r1 + r2);
        let coeffs = RecurrenceCoefficients::new(
            1,
            vec![c64(0.0, 0.0), a2, c64(0.1, 0.0)],
            vec![c64(1.0, 0.0), c64(0.5, -0.5), c64(1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)],
        )
        .unwrap();
        let s = initial_split(&coeffs, c64(0.0, 0.0), c64(1.0, 0.0), r1, r2).unwrap();
        // y3 = -a2 * 1
        let expected = decompose(c64(1.0, 0.0), -a2, r1, r2).unwrap();
        assert!(close(s.y1, expected.y1, 1e-14) && close(s.y2, expected.y2, 1e-14));
        let y = solve_cauchy(&coeffs, c64(0.0, 0.0), c64(1.0, 0.0), 3).unwrap();
        assert!(close(y.at(3).unwrap(), -a2, 1e-15));

        let zero = initial_split(&coeffs, c64(0.0, 0.0), c64(0.0, 0.0), r1, r2).unwrap();
        assert_eq!(zero, SplitState::default());
    }

    #[test]
    fn initial_split_with_forcing() {
        let coeffs = RecurrenceCoefficients::new(
            1,
            vec![c64(0.2, 0.1); 4],
            vec![c64(-0.7, 0.3); 4],
            vec![c64(1.5, -2.0); 4],
        )
        .unwrap();
        let (y1, y2) = (c64(0.3, 0.4), c64(-1.2, 0.9));
        let (r1, r2) = (c64(0.5, 0.5), c64(2.0, -1.0));
        let y = solve_cauchy(&coeffs, y1, y2, 3).unwrap();
        let s = initial_split(&coeffs, y1, y2, r1, r2).unwrap();
        let d = decompose(y2, y.at(3).unwrap(), r1, r2).unwrap();
        assert!(close(s.y1, d.y1, 1e-14) && close(s.y2, d.y2, 1e-14));
        assert!(close(s.sum(), y2, 1e-13));
    }

    fn complex() -> impl Strategy<Value = Complex64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| c64(re, im))
    }

    proptest! {
        #[test]
        fn roundtrip_both_ways(u in complex(), v in complex(), r1 in complex(), r2 in complex()) {
            prop_assume!((r1 - r2).norm() > 0.1);
            let (uu, vv) = recombine(decompose(u, v, r1, r2).unwrap(), r1, r2);
            prop_assert!(close(uu, u, 1e-13) && close(vv, v, 1e-13));
            let (yk, yn) = recombine(SplitState::new(u, v), r1, r2);
            let t = decompose(yk, yn, r1, r2).unwrap();
            let scale = 1e-13 * u.norm().max(v.norm()).max(1.0);
            prop_assert!((t.y1 - u).norm() <= scale && (t.y2 - v).norm() <= scale);
        }

        #[test]
        fn split_of_any_solution_satisfies_step_relations(
            seed_a in proptest::collection::vec(complex(), 12),
            seed_b in proptest::collection::vec(complex(), 12),
            r1 in proptest::collection::vec(complex(), 12),
            r2 in proptest::collection::vec(complex(), 12),
        ) {
            prop_assume!(r1.iter().zip(&r2).all(|(p, q)| (p - q).norm() > 0.1));
            let b: Vec<_> = seed_b.iter().map(|z| z + c64(4.0, 0.0)).collect();
            let coeffs = RecurrenceCoefficients::homogeneous(1, seed_a.clone(), b).unwrap();
            let y = solve_cauchy(&coeffs, c64(1.0, 0.0), c64(0.5, -0.5), 12).unwrap();
            let split = SplitSequences::new(1, r1, r2).unwrap();
            let states: Vec<_> = (1..12)
                .map(|k| split.decompose_at(k, y.at(k).unwrap(), y.at(k + 1).unwrap()).unwrap())
                .collect();
            for k in 1..11 {
                let res = step_residuals(&coeffs, &split, k, states[(k - 1) as usize], states[k as usize]).unwrap();
                let scale = y.max_abs() * 50.0;
                prop_assert!(res[0].norm() <= 1e-12 * scale && res[1].norm() <= 1e-12 * scale);
            }
        }
    }
}
