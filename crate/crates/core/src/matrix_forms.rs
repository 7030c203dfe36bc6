//! Transfer (T) and scattering (S) forms of the split system.
//!
//! The T-form maps the split state at node `k` to node `k+1`:
//!
//! ```text
//! (y1[k+1], y2[k+1]) = T[k] (y1[k], y2[k]) + (F[k+1], -F[k+1])
//! ```
//!
//! The S-form exchanges incoming and outgoing components across the same step,
//!
//! ```text
//! (y2[k], y1[k+1]) = S[k] (y1[k], y2[k+1]) + (Fs[k+1], rho2[k] Fs[k+1])
//! ```
//!
//! and stays bounded where the T-sweep grows exponentially. Spans of S-steps
//! are combined with the Redheffer star product.

use num_complex::Complex64;

use crate::recurrence::RecurrenceCoefficients;
use crate::split::{are_distinct, SplitField, SplitSequences, SplitState};
use crate::{Error, Result};

/// Component modulus above which a T-sweep is declared divergent.
pub const OVERFLOW_THRESHOLD: f64 = 1e100;

/// Smallest admissible `|1 - A22 B11|` in a star product.
pub const STAR_SINGULAR_TOL: f64 = 1e-14;

/// Relative threshold for the scatter denominator.
pub const SCATTER_DENOMINATOR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixForm {
    Transfer,
    Scatter,
}

/// A 2x2 step matrix plus its forcing 2-vector.
///
/// For [`MatrixForm::Transfer`] the input is `(y1[k], y2[k])` and the output
/// `(y1[k+1], y2[k+1])`; for [`MatrixForm::Scatter`] the input is
/// `(y1[k], y2[k+1])` and the output `(y2[k], y1[k+1])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
    pub forcing: [Complex64; 2],
    pub form: MatrixForm,
}

impl StepMatrix {
    pub fn apply(&self, input: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m11 * input[0] + self.m12 * input[1] + self.forcing[0],
            self.m21 * input[0] + self.m22 * input[1] + self.forcing[1],
        ]
    }

    /// Frobenius norm of the 2x2 block.
    pub fn norm(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.m11, self.m12, self.m21, self.m22, self.forcing[0], self.forcing[1]]
            .iter()
            .all(|z| z.is_finite())
    }
}

/// T-matrix of the step `k -> k+1`.
pub fn transfer_matrix(coeffs: &RecurrenceCoefficients, split: &SplitSequences, k: i64) -> Result<StepMatrix> {
    let (r1, r2) = split.at(k)?;
    let (q1, q2) = split.at(k + 1)?;
    let (a, b, f) = coeffs.at(k + 1)?;
    if !are_distinct(q1, q2, split.tolerance()) {
        return Err(Error::DegenerateSplit { index: Some(k + 1) });
    }
    let d = q1 - q2;
    let forcing = f / d;
    Ok(StepMatrix {
        m11: -(b + (q2 + a) * r1) / d,
        m12: -(b + (q2 + a) * r2) / d,
        m21: (b + (q1 + a) * r1) / d,
        m22: (b + (q1 + a) * r2) / d,
        forcing: [forcing, -forcing],
        form: MatrixForm::Transfer,
    })
}

/// Split states produced by a T-sweep. Stops early once any component
/// exceeds [`OVERFLOW_THRESHOLD`]; the offending state is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferSweep {
    pub field: SplitField,
    pub overflow_at: Option<i64>,
}

impl TransferSweep {
    pub fn overflowed(&self) -> bool {
        self.overflow_at.is_some()
    }
}

/// Iterates the T-form from `initial` at node `start` until `count` states
/// (including the initial one) are produced or the sweep overflows.
pub fn propagate_transfer(
    coeffs: &RecurrenceCoefficients,
    split: &SplitSequences,
    start: i64,
    initial: SplitState,
    count: usize,
) -> Result<TransferSweep> {
    let mut states = Vec::with_capacity(count);
    states.push(initial);
    let mut overflow_at = None;
    if initial.max_abs() > OVERFLOW_THRESHOLD || !initial.is_finite() {
        overflow_at = Some(start);
    }
    let mut state = initial;
    let mut k = start;
    while overflow_at.is_none() && states.len() < count {
        let t = transfer_matrix(coeffs, split, k)?;
        let [y1, y2] = t.apply([state.y1, state.y2]);
        state = SplitState::new(y1, y2);
        k += 1;
        states.push(state);
        if !state.is_finite() || state.max_abs() > OVERFLOW_THRESHOLD {
            overflow_at = Some(k);
        }
    }
    Ok(TransferSweep {
        field: SplitField {
            first_index: start,
            states,
        },
        overflow_at,
    })
}

/// S-matrix of the step `k -> k+1`.
pub fn scatter_step(coeffs: &RecurrenceCoefficients, split: &SplitSequences, k: i64) -> Result<StepMatrix> {
    let (r1, r2) = split.at(k)?;
    let (q1, q2) = split.at(k + 1)?;
    let (a, b, f) = coeffs.at(k + 1)?;
    let d = b + r2 * (q1 + a);
    let scale = b.norm() + r2.norm() * (q1 + a).norm();
    if !(d.norm() > SCATTER_DENOMINATOR_TOL * scale) {
        return Err(Error::SingularScatterDenominator { index: k });
    }
    let forcing = f / d;
    Ok(StepMatrix {
        m11: -(b + r1 * (q1 + a)) / d,
        m12: (q1 - q2) / d,
        m21: (r1 - r2) * b / d,
        m22: -(b + r2 * (q2 + a)) / d,
        forcing: [forcing, r2 * forcing],
        form: MatrixForm::Scatter,
    })
}

/// Scattering relation across a span of nodes `first..=last`:
/// `(y2[first], y1[last]) = S (y1[first], y2[last]) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulativeScatter {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
    pub offset: [Complex64; 2],
}

impl CumulativeScatter {
    /// The empty span: inputs pass straight through.
    pub fn identity() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self {
            s11: zero,
            s12: one,
            s21: one,
            s22: zero,
            offset: [zero, zero],
        }
    }

    pub fn from_step(step: &StepMatrix) -> Self {
        Self {
            s11: step.m11,
            s12: step.m12,
            s21: step.m21,
            s22: step.m22,
            offset: step.forcing,
        }
    }

    /// Star product: `self` on the left, `next` immediately to its right.
    pub fn star(&self, next: &CumulativeScatter) -> Result<Self> {
        let (a, b) = (self, next);
        let d = Complex64::new(1.0, 0.0) - a.s22 * b.s11;
        if d.norm() < STAR_SINGULAR_TOL {
            return Err(Error::StarProductSingular { value: d.norm() });
        }
        let inward = (a.s22 * b.offset[0] + a.offset[1]) / d;
        Ok(Self {
            s11: a.s11 + a.s12 * b.s11 * a.s21 / d,
            s12: a.s12 * b.s12 / d,
            s21: b.s21 * a.s21 / d,
            s22: b.s22 + b.s21 * a.s22 * b.s12 / d,
            offset: [
                a.offset[0] + a.s12 * (b.offset[0] + b.s11 * a.offset[1]) / d,
                b.offset[1] + b.s21 * inward,
            ],
        })
    }

    pub fn apply(&self, input: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.s11 * input[0] + self.s12 * input[1] + self.offset[0],
            self.s21 * input[0] + self.s22 * input[1] + self.offset[1],
        ]
    }
}

/// Left-to-right star-product accumulation of scatter steps.
pub fn cascade_scatter(steps: &[StepMatrix]) -> Result<CumulativeScatter> {
    steps.iter().enumerate().try_fold(CumulativeScatter::identity(), |acc, (i, step)| {
        if step.form != MatrixForm::Scatter {
            return Err(Error::NotScatterForm { position: i });
        }
        acc.star(&CumulativeScatter::from_step(step))
    })
}

/// Split states on `first..=last` fixed by the incoming components at both
/// ends, together with the cumulative S-matrix of the span.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointSolution {
    pub field: SplitField,
    pub total: CumulativeScatter,
}

/// Solves the split system on `first..=last` with `y1[first] = left_input`
/// and `y2[last] = right_input`.
///
/// A forward pass stores the cumulative S-matrix of every prefix; a backward
/// pass then recovers `y2[k]` and `y1[k]` node by node. Every division is by
/// a star-product denominator, so nothing grows through evanescent stretches.
pub fn solve_two_point(
    coeffs: &RecurrenceCoefficients,
    split: &SplitSequences,
    first: i64,
    last: i64,
    left_input: Complex64,
    right_input: Complex64,
) -> Result<TwoPointSolution> {
    if last < first {
        return Err(Error::EmptyWindow);
    }
    let n = (last - first) as usize;
    let mut steps = Vec::with_capacity(n);
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(CumulativeScatter::identity());
    for k in first..last {
        let step = CumulativeScatter::from_step(&scatter_step(coeffs, split, k)?);
        let next = prefix[prefix.len() - 1].star(&step)?;
        steps.push(step);
        prefix.push(next);
    }
    let total = prefix[n];

    let mut states = vec![SplitState::default(); n + 1];
    let mut y2_next = right_input;
    states[n] = SplitState::new(
        total.s21 * left_input + total.s22 * right_input + total.offset[1],
        right_input,
    );
    for i in (0..n).rev() {
        let p = &prefix[i];
        let s = &steps[i];
        // y1[k] as seen from the left, still missing the p22 * y2[k] term
        let partial = p.s21 * left_input + p.offset[1];
        let d = Complex64::new(1.0, 0.0) - s.s11 * p.s22;
        let y2 = (s.s11 * partial + s.s12 * y2_next + s.offset[0]) / d;
        states[i] = SplitState::new(partial + p.s22 * y2, y2);
        y2_next = y2;
    }
    Ok(TwoPointSolution {
        field: SplitField {
            first_index: first,
            states,
        },
        total,
    })
}
