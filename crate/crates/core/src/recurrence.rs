//! The base recurrence `y[k+1] + a[k] y[k] + b[k] y[k-1] = f[k]`, its direct
//! solvers and the two-point boundary problem built from a solution basis.

use num_complex::Complex64;

use crate::{Error, Result};

/// Smallest admissible `|b[k]|` for recurrences that may be swept backwards.
pub const MIN_COUPLING: f64 = 1e-300;

/// Relative threshold below which the 2x2 boundary system is treated as singular.
pub const BOUNDARY_SINGULAR_TOL: f64 = 1e-13;

/// Coefficients `a[k]`, `b[k]`, `f[k]` over the window `first_index..first_index + len`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoefficients {
    first_index: i64,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    f: Vec<Complex64>,
}

impl RecurrenceCoefficients {
    /// Builds a coefficient window, rejecting `|b[k]| <= MIN_COUPLING`.
    pub fn new(
        first_index: i64,
        a: Vec<Complex64>,
        b: Vec<Complex64>,
        f: Vec<Complex64>,
    ) -> Result<Self> {
        let coeffs = Self::new_forward_only(first_index, a, b, f)?;
        if let Some(pos) = coeffs.b.iter().position(|b| b.norm() <= MIN_COUPLING) {
            return Err(Error::VanishingCoupling {
                index: first_index + pos as i64,
            });
        }
        Ok(coeffs)
    }

    /// Like [`RecurrenceCoefficients::new`] but allows `b[k] = 0`, which is
    /// harmless as long as the recurrence is only iterated forwards.
    pub fn new_forward_only(
        first_index: i64,
        a: Vec<Complex64>,
        b: Vec<Complex64>,
        f: Vec<Complex64>,
    ) -> Result<Self> {
        if a.len() != b.len() || a.len() != f.len() {
            return Err(Error::LengthMismatch {
                a: a.len(),
                b: b.len(),
                f: f.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if a.iter().chain(&b).chain(&f).any(|z| !z.is_finite()) {
            return Err(Error::InvalidProfile("non-finite coefficient".into()));
        }
        Ok(Self {
            first_index,
            a,
            b,
            f,
        })
    }

    /// Homogeneous recurrence (`f = 0`).
    pub fn homogeneous(first_index: i64, a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        let f = vec![Complex64::new(0.0, 0.0); a.len()];
        Self::new(first_index, a, b, f)
    }

    /// Constant coefficients repeated `len` times.
    pub fn constant(
        first_index: i64,
        len: usize,
        a: Complex64,
        b: Complex64,
        f: Complex64,
    ) -> Result<Self> {
        Self::new(first_index, vec![a; len], vec![b; len], vec![f; len])
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn last_index(&self) -> i64 {
        self.first_index + self.a.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    fn offset(&self, k: i64) -> Result<usize> {
        if k < self.first_index || k > self.last_index() {
            return Err(Error::InsufficientCoefficients {
                first: self.first_index,
                last: self.last_index(),
                needed: k,
            });
        }
        Ok((k - self.first_index) as usize)
    }

    pub fn a(&self, k: i64) -> Result<Complex64> {
        Ok(self.a[self.offset(k)?])
    }

    pub fn b(&self, k: i64) -> Result<Complex64> {
        Ok(self.b[self.offset(k)?])
    }

    pub fn f(&self, k: i64) -> Result<Complex64> {
        Ok(self.f[self.offset(k)?])
    }

    /// `(a[k], b[k], f[k])`.
    pub fn at(&self, k: i64) -> Result<(Complex64, Complex64, Complex64)> {
        let i = self.offset(k)?;
        Ok((self.a[i], self.b[i], self.f[i]))
    }

    pub fn a_values(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b_values(&self) -> &[Complex64] {
        &self.b
    }

    pub fn f_values(&self) -> &[Complex64] {
        &self.f
    }

    /// Left-hand side residual `y[k+1] + a[k] y[k] + b[k] y[k-1] - f[k]`.
    pub fn residual(&self, y: &GridFunction, k: i64) -> Result<Complex64> {
        let (a, b, f) = self.at(k)?;
        Ok(y.at(k + 1)? + a * y.at(k)? + b * y.at(k - 1)? - f)
    }
}

/// A complex sequence indexed by absolute node number.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    first_index: i64,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(first_index: i64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(Self {
            first_index,
            values,
        })
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn last_index(&self) -> i64 {
        self.first_index + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        if k < self.first_index {
            return None;
        }
        self.values.get((k - self.first_index) as usize).copied()
    }

    pub fn at(&self, k: i64) -> Result<Complex64> {
        self.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            first: self.first_index,
            last: self.last_index(),
        })
    }

    /// `(index, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.first_index + i as i64, *v))
    }

    /// Largest modulus in the window.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Direct forward iteration of the recurrence from Cauchy data.
///
/// The result starts at `coeffs.first_index()` with `y[s] = y1`, `y[s+1] = y2`
/// and holds `count` values; coefficients at `s+1 ..= s+count-2` are used.
pub fn solve_cauchy(
    coeffs: &RecurrenceCoefficients,
    y1: Complex64,
    y2: Complex64,
    count: usize,
) -> Result<GridFunction> {
    let start = coeffs.first_index();
    if count < 2 {
        return Err(Error::EmptyWindow);
    }
    let needed = start + count as i64 - 2;
    if count > 2 && needed > coeffs.last_index() {
        return Err(Error::InsufficientCoefficients {
            first: coeffs.first_index(),
            last: coeffs.last_index(),
            needed,
        });
    }
    let mut values = Vec::with_capacity(count);
    values.push(y1);
    values.push(y2);
    for k in (start + 1)..=needed {
        let (a, b, f) = coeffs.at(k)?;
        let n = values.len();
        values.push(f - a * values[n - 1] - b * values[n - 2]);
    }
    GridFunction::new(start, values)
}

/// One step of the standard companion system: `(y[k], y[k-1]) -> (y[k+1], y[k])`.
pub fn companion_step(
    coeffs: &RecurrenceCoefficients,
    k: i64,
    state: [Complex64; 2],
) -> Result<[Complex64; 2]> {
    let (a, b, f) = coeffs.at(k)?;
    Ok([-a * state[0] - b * state[1] + f, state[0]])
}

/// Casoratian `ya[k] yb[k+1] - yb[k] ya[k+1]`.
pub fn casoratian(ya: &GridFunction, yb: &GridFunction, k: i64) -> Result<Complex64> {
    Ok(ya.at(k)? * yb.at(k + 1)? - yb.at(k)? * ya.at(k + 1)?)
}

/// Solution of a first-kind boundary problem as a combination of two basis solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySolution {
    pub c1: Complex64,
    pub c2: Complex64,
    pub y: GridFunction,
}

/// Finds `C1`, `C2` with `C1 basis1 + C2 basis2` taking `y_left` at the first
/// node and `y_right` at the last node of the shared window.
pub fn solve_boundary_first_kind(
    basis1: &GridFunction,
    basis2: &GridFunction,
    y_left: Complex64,
    y_right: Complex64,
) -> Result<BoundarySolution> {
    if basis1.first_index() != basis2.first_index() || basis1.len() != basis2.len() {
        return Err(Error::IndexOutOfRange {
            index: basis2.first_index(),
            first: basis1.first_index(),
            last: basis1.last_index(),
        });
    }
    let (first, last) = (basis1.first_index(), basis1.last_index());
    let (p, q) = (basis1.at(first)?, basis2.at(first)?);
    let (r, s) = (basis1.at(last)?, basis2.at(last)?);
    let det = p * s - q * r;
    let scale = (p.norm() + q.norm()) * (r.norm() + s.norm());
    if !(det.norm() > BOUNDARY_SINGULAR_TOL * scale) {
        return Err(Error::SingularBoundarySystem { det: det.norm() });
    }
    let c1 = (y_left * s - q * y_right) / det;
    let c2 = (p * y_right - r * y_left) / det;
    let values = basis1
        .values()
        .iter()
        .zip(basis2.values())
        .map(|(u, v)| c1 * u + c2 * v)
        .collect();
    Ok(BoundarySolution {
        c1,
        c2,
        y: GridFunction::new(first, values)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn real(v: f64) -> Complex64 {
        c64(v, 0.0)
    }

    fn fibonacci(len: usize) -> RecurrenceCoefficients {
        RecurrenceCoefficients::constant(1, len, real(-1.0), real(-1.0), real(0.0)).unwrap()
    }

    #[test]
    fn fibonacci_tenth_term() {
        let y = solve_cauchy(&fibonacci(12), real(1.0), real(1.0), 10).unwrap();
        assert_eq!(y.last_index(), 10);
        assert_eq!(y.at(10).unwrap(), real(55.0));
    }

    #[test]
    fn pure_forcing_reduces_to_constant() {
        let c = c64(0.7, -1.3);
        let coeffs =
            RecurrenceCoefficients::new_forward_only(1, vec![real(0.0); 8], vec![real(0.0); 8], vec![c; 8])
                .unwrap();
        let y = solve_cauchy(&coeffs, c64(5.0, 1.0), c64(-2.0, 0.5), 8).unwrap();
        for k in 3..=8 {
            assert_eq!(y.at(k).unwrap(), c);
        }
    }

    #[test]
    fn zero_coupling_rejected_unless_forward_only() {
        let err = RecurrenceCoefficients::constant(1, 3, real(0.0), real(0.0), real(0.0)).unwrap_err();
        assert_eq!(err, Error::VanishingCoupling { index: 1 });
    }

    #[test]
    fn arithmetic_progression_is_preserved() {
        let coeffs = RecurrenceCoefficients::constant(1, 30, real(-2.0), real(1.0), real(0.0)).unwrap();
        let y = solve_cauchy(&coeffs, real(1.0), real(2.0), 25).unwrap();
        for (k, v) in y.iter() {
            assert_eq!(v, real(k as f64));
        }
    }

    #[test]
    fn short_window_is_reported() {
        let err = solve_cauchy(&fibonacci(5), real(1.0), real(1.0), 10).unwrap_err();
        assert!(matches!(err, Error::InsufficientCoefficients { needed: 9, .. }));
    }

    #[test]
    fn companion_examples() {
        let fib = fibonacci(3);
        assert_eq!(companion_step(&fib, 2, [real(1.0), real(1.0)]).unwrap(), [real(2.0), real(1.0)]);
        let shift = RecurrenceCoefficients::new_forward_only(1, vec![real(0.0)], vec![real(0.0)], vec![real(0.0)])
            .unwrap();
        let x = c64(3.0, 4.0);
        assert_eq!(companion_step(&shift, 1, [x, c64(9.0, 9.0)]).unwrap(), [real(0.0), x]);
        assert!(companion_step(&shift, 2, [x, x]).is_err());
    }

    #[test]
    fn casoratian_examples() {
        let y = GridFunction::new(1, vec![real(1.0), real(1.0), real(2.0)]).unwrap();
        assert_eq!(casoratian(&y, &y, 1).unwrap(), real(0.0));
        let z = GridFunction::new(1, vec![real(2.0), real(1.0), real(3.0)]).unwrap();
        assert_eq!(casoratian(&y, &z, 1).unwrap(), real(-1.0));

        let (r1, r2) = (c64(0.3, 0.2), c64(-1.1, 0.4));
        let ya = GridFunction::new(4, vec![real(1.0), r1]).unwrap();
        let yb = GridFunction::new(4, vec![real(1.0), r2]).unwrap();
        assert_eq!(casoratian(&ya, &yb, 4).unwrap(), r2 - r1);
        assert!(matches!(casoratian(&ya, &yb, 5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn boundary_problem_examples() {
        let coeffs = RecurrenceCoefficients::constant(1, 20, c64(-1.5, 0.1), real(0.8), real(0.0)).unwrap();
        let b1 = solve_cauchy(&coeffs, real(1.0), real(0.0), 20).unwrap();
        let b2 = solve_cauchy(&coeffs, real(0.0), real(1.0), 20).unwrap();

        let err = solve_boundary_first_kind(&b1, &b1, real(1.0), real(2.0)).unwrap_err();
        assert!(matches!(err, Error::SingularBoundarySystem { .. }));

        let sol = solve_boundary_first_kind(&b1, &b2, b1.at(1).unwrap(), b1.at(20).unwrap()).unwrap();
        assert!((sol.c1 - 1.0).norm() < 1e-12 && sol.c2.norm() < 1e-12);

        let (yl, yr) = (c64(0.4, -2.0), c64(-3.0, 0.25));
        let sol = solve_boundary_first_kind(&b1, &b2, yl, yr).unwrap();
        assert!((sol.y.at(1).unwrap() - yl).norm() <= 1e-12 * yl.norm());
        assert!((sol.y.at(20).unwrap() - yr).norm() <= 1e-12 * yr.norm());
        let scale = sol.y.max_abs();
        for k in 2..20 {
            assert!(coeffs.residual(&sol.y, k).unwrap().norm() <= 1e-10 * scale);
        }
    }
}
