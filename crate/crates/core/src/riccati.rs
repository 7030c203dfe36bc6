//! Riccati sequences that diagonalize the T-matrix.
//!
//! If both splitting sequences obey
//!
//! ```text
//! rho[k+1] = -b[k+1] / rho[k] - a[k+1]
//! ```
//!
//! the split system decouples into `y1[k+1] = rho1[k] y1[k]` and
//! `y2[k+1] = rho2[k] y2[k]`: two independent solutions of the recurrence.
//! Fixed points of the iteration, when they exist, are the roots of the
//! characteristic equation and need not be attracting.

use num_complex::Complex64;

use crate::recurrence::{GridFunction, RecurrenceCoefficients};
use crate::split::{are_distinct, SplitField, SplitState, DEFAULT_DISTINCTNESS};
use crate::{Error, Result};

/// `|rho|` above which an iteration is flagged as divergent.
pub const DIVERGENCE_UPPER: f64 = 1e6;
/// `|rho|` below which an iteration is flagged as divergent.
pub const DIVERGENCE_LOWER: f64 = 1e-12;
/// Smallest admissible `|rho[k+1] + a[k+1]|` in the inverse iteration.
pub const POLE_TOLERANCE: f64 = 1e-300;

/// A Riccati sequence stored in ascending index order.
///
/// When the iteration left the range `[DIVERGENCE_LOWER, DIVERGENCE_UPPER]`,
/// `diverged_at` holds the index of the first offending value, which is the
/// last value kept in the direction of iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiTrace {
    pub first_index: i64,
    pub rho: Vec<Complex64>,
    pub diverged_at: Option<i64>,
}

impl RiccatiTrace {
    pub fn last_index(&self) -> i64 {
        self.first_index + self.rho.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        if k < self.first_index {
            return None;
        }
        self.rho.get((k - self.first_index) as usize).copied()
    }

    pub fn at(&self, k: i64) -> Result<Complex64> {
        self.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            first: self.first_index,
            last: self.last_index(),
        })
    }
}

fn out_of_range(rho: Complex64) -> bool {
    let m = rho.norm();
    !(DIVERGENCE_LOWER..=DIVERGENCE_UPPER).contains(&m)
}

/// Forward iteration from `rho[from_k] = seed`, producing up to `count` values.
pub fn riccati_forward(
    coeffs: &RecurrenceCoefficients,
    seed: Complex64,
    from_k: i64,
    count: usize,
) -> Result<RiccatiTrace> {
    let mut rho = Vec::with_capacity(count);
    let mut diverged_at = None;
    if count > 0 {
        rho.push(seed);
    }
    let mut k = from_k;
    while rho.len() < count {
        let (a, b, _) = coeffs.at(k + 1)?;
        let next = -b / rho[rho.len() - 1] - a;
        k += 1;
        rho.push(next);
        if out_of_range(next) || !next.is_finite() {
            diverged_at = Some(k);
            break;
        }
    }
    Ok(RiccatiTrace {
        first_index: from_k,
        rho,
        diverged_at,
    })
}

/// Downward iteration `rho[k] = -b[k+1] / (rho[k+1] + a[k+1])` from
/// `rho[from_k] = seed`, producing up to `count` values.
pub fn riccati_inverse(
    coeffs: &RecurrenceCoefficients,
    seed: Complex64,
    from_k: i64,
    count: usize,
) -> Result<RiccatiTrace> {
    let mut rho = Vec::with_capacity(count);
    let mut diverged_at = None;
    if count > 0 {
        rho.push(seed);
    }
    let mut k = from_k;
    while rho.len() < count {
        let (a, b, _) = coeffs.at(k)?;
        let denominator = rho[rho.len() - 1] + a;
        if denominator.norm() < POLE_TOLERANCE {
            return Err(Error::PoleHit { index: k - 1 });
        }
        let prev = -b / denominator;
        k -= 1;
        rho.push(prev);
        if out_of_range(prev) || !prev.is_finite() {
            diverged_at = Some(k);
            break;
        }
    }
    rho.reverse();
    Ok(RiccatiTrace {
        first_index: k,
        rho,
        diverged_at,
    })
}

/// Roots of `rho^2 + a rho + b = 0`.
///
/// The first root is the one with the larger imaginary part; when both are
/// real (or share their imaginary part) the larger modulus comes first, then
/// the larger real part. The smaller root is recovered from the product of
/// the roots to avoid cancellation.
pub fn characteristic_roots(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let disc = (a * a - 4.0 * b).sqrt();
    // pick the sign that avoids cancellation in -a -/+ disc
    let sum = if (a.conj() * disc).re >= 0.0 { a + disc } else { a - disc };
    let (r1, r2) = if sum.norm() == 0.0 {
        let r = -a / 2.0;
        (r, r)
    } else {
        let big = -sum / 2.0;
        (big, b / big)
    };
    let scale = 1f64.max(r1.norm()).max(r2.norm());
    let same_imag = (r1.im - r2.im).abs() <= 1e-14 * scale;
    let first_is_r1 = if !same_imag {
        r1.im > r2.im
    } else if (r1.norm() - r2.norm()).abs() > 1e-14 * scale {
        r1.norm() > r2.norm()
    } else {
        r1.re >= r2.re
    };
    if first_is_r1 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Decoupled propagation `y1[k+1] = rho1[k] y1[k]`, `y2[k+1] = rho2[k] y2[k]`
/// starting from `initial` at the traces' common first index.
pub fn diagonal_propagate(
    trace1: &RiccatiTrace,
    trace2: &RiccatiTrace,
    initial: SplitState,
    count: usize,
) -> Result<SplitField> {
    let first = trace1.first_index;
    if trace2.first_index != first {
        return Err(Error::IndexOutOfRange {
            index: trace2.first_index,
            first,
            last: trace1.last_index(),
        });
    }
    let mut states = Vec::with_capacity(count);
    if count > 0 {
        states.push(initial);
    }
    let mut state = initial;
    for k in first..first + count as i64 - 1 {
        let (r1, r2) = (trace1.at(k)?, trace2.at(k)?);
        if !are_distinct(r1, r2, DEFAULT_DISTINCTNESS) {
            return Err(Error::DegenerateSplit { index: Some(k) });
        }
        state = SplitState::new(r1 * state.y1, r2 * state.y2);
        states.push(state);
    }
    Ok(SplitField {
        first_index: first,
        states,
    })
}

/// A single solution `y[k+1] = rho[k] y[k]` with `y[first] = start`.
pub fn product_solution(trace: &RiccatiTrace, start: Complex64, count: usize) -> Result<GridFunction> {
    let mut values = Vec::with_capacity(count);
    values.push(start);
    for k in trace.first_index..trace.first_index + count as i64 - 1 {
        let last = values[values.len() - 1];
        values.push(trace.at(k)? * last);
    }
    GridFunction::new(trace.first_index, values)
}

/// `b[k] = -rho_star a[k] - rho_star^2`, which makes the constant sequence
/// `rho_star` a Riccati solution for any `a`.
pub fn proportional_coefficients(a: &[Complex64], rho_star: Complex64) -> Vec<Complex64> {
    a.iter().map(|a| -rho_star * a - rho_star * rho_star).collect()
}

/// Residual `rho[k+1] rho[k] + a[k+1] rho[k] + b[k+1]` of the forward relation.
pub fn riccati_residual(coeffs: &RecurrenceCoefficients, trace: &RiccatiTrace, k: i64) -> Result<Complex64> {
    let (a, b, _) = coeffs.at(k + 1)?;
    let (r, r_next) = (trace.at(k)?, trace.at(k + 1)?);
    Ok(r_next * r + a * r + b)
}
