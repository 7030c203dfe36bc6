//! Chains of coupled resonators in the two-term coupling-cavity model.
//!
//! Cell `k` has normalized radius `g[k]`; `u[k]` is the normalized aperture
//! between cells `k-1` and `k`, so a chain of `N` cells carries
//! `u[1..=N+1]`. The `E010` amplitudes obey
//!
//! ```text
//! Z[k] e[k] = e[k-1] u[k] / g[k]^2 + e[k+1] u[k+1] / g[k]^2
//! Z[k] = 1 - g[k]^2 + (u[k] + u[k+1]) / g[k]^2 - i g[k] / Q
//! ```
//!
//! A constant-gradient design makes `exp(i phi)` an exact ratio
//! `e[k+1] / e[k]` in every cell.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quartic::positive_root_nearest;
use crate::recurrence::{GridFunction, RecurrenceCoefficients};
use crate::riccati::{characteristic_roots, diagonal_propagate, product_solution, riccati_forward, RiccatiTrace};
use crate::split::{SplitField, SplitState};
use crate::{c64, Error, Result};

/// Geometry of a chain. `q = f64::INFINITY` means no loss.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDesign {
    phi: f64,
    q: f64,
    g: Vec<f64>,
    u: Vec<f64>,
}

impl ChainDesign {
    /// `g[0]` is cell 1 and `u[0]` is `u_1`; `u` needs at least one more
    /// entry than `g`.
    pub fn new(phi: f64, q: f64, g: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if !phi.is_finite() || phi.sin().abs() < 1e-12 {
            return Err(Error::InvalidDesign(format!("phase advance {phi} has vanishing sine")));
        }
        if q.is_nan() || q <= 0.0 {
            return Err(Error::InvalidDesign(format!("quality factor must be positive, got {q}")));
        }
        if g.is_empty() {
            return Err(Error::InvalidDesign("chain has no cells".into()));
        }
        if u.len() <= g.len() {
            return Err(Error::InvalidDesign(format!(
                "{} cells need {} apertures, got {}",
                g.len(),
                g.len() + 1,
                u.len()
            )));
        }
        if let Some(k) = g.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidDesign(format!("radius of cell {} is not positive", k + 1)));
        }
        if let Some(k) = u.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidDesign(format!("aperture {} is not positive", k + 1)));
        }
        Ok(Self { phi, q, g, u })
    }

    /// Identical cells and apertures.
    pub fn uniform(phi: f64, q: f64, g: f64, u: f64, cells: usize) -> Result<Self> {
        Self::new(phi, q, vec![g; cells], vec![u; cells + 1])
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn cells(&self) -> usize {
        self.g.len()
    }

    pub fn g_values(&self) -> &[f64] {
        &self.g
    }

    pub fn u_values(&self) -> &[f64] {
        &self.u
    }

    /// Radius of cell `k`, `1 <= k <= cells`.
    pub fn g(&self, k: usize) -> f64 {
        self.g[k - 1]
    }

    /// Aperture `u_k`, `1 <= k <= cells + 1`.
    pub fn u(&self, k: usize) -> f64 {
        self.u[k - 1]
    }

    /// `Z_k`.
    pub fn resonant_term(&self, k: usize) -> Complex64 {
        let g = self.g(k);
        let real = 1.0 - g * g + (self.u(k) + self.u(k + 1)) / (g * g);
        c64(real, -g / self.q)
    }
}

fn loss_slope(phi: f64, q: f64) -> f64 {
    (phi.cos() - 1.0) / (q * phi.sin())
}

/// `a_k = -Z_k g_k^2 / u_{k+1}`, `b_k = u_k / u_{k+1}`, `f_k = 0` on cells `1..=N`.
pub fn ccm_coefficients(design: &ChainDesign) -> RecurrenceCoefficients {
    let n = design.cells();
    let a = (1..=n)
        .map(|k| -design.resonant_term(k) * design.g(k).powi(2) / design.u(k + 1))
        .collect();
    let b = (1..=n).map(|k| c64(design.u(k) / design.u(k + 1), 0.0)).collect();
    RecurrenceCoefficients::homogeneous(1, a, b).expect("positive apertures give nonzero couplings")
}

/// Constant-gradient design of `cells` cells starting from aperture `u1`.
pub fn design_constant_gradient(u1: f64, phi: f64, q: f64, cells: usize) -> Result<ChainDesign> {
    if !(u1.is_finite() && u1 > 0.0) {
        return Err(Error::InvalidDesign(format!("first aperture must be positive, got {u1}")));
    }
    if !(phi > 0.0 && phi < PI) {
        return Err(Error::InvalidDesign(format!("phase advance must lie in (0, pi), got {phi}")));
    }
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidDesign(format!("quality factor must be positive, got {q}")));
    }
    if cells == 0 {
        return Err(Error::InvalidDesign("chain has no cells".into()));
    }
    let cm1 = phi.cos() - 1.0;
    let c = loss_slope(phi, q);

    let g1 = positive_root_nearest([2.0 * cm1 * u1, 0.0, -1.0, -c], 1.0).ok_or(Error::NoPhysicalRoot { cell: 1 })?;
    let mut g = vec![g1];
    let mut u = vec![u1];
    for k in 1..=cells {
        let (gk, uk) = (g[k - 1], u[k - 1]);
        let next_u = (gk * gk - gk.powi(4)) / cm1 - uk;
        if !(next_u > 0.0) {
            return Err(Error::NoPhysicalRoot { cell: k + 1 });
        }
        u.push(next_u);
        if k < cells {
            let rhs = gk.powi(4) + c * gk.powi(3) - gk * gk;
            let next_g = positive_root_nearest([-rhs, 0.0, -1.0, -c], gk).ok_or(Error::NoPhysicalRoot { cell: k + 1 })?;
            g.push(next_g);
        }
    }
    ChainDesign::new(phi, q, g, u)
}

/// `|Z_k - (exp(i phi) u_{k+1} + exp(-i phi) u_k) / g_k^2| / |Z_k|`.
pub fn forward_condition_residual(design: &ChainDesign, k: usize) -> f64 {
    let z = design.resonant_term(k);
    let e = Complex64::from_polar(1.0, design.phi);
    let coupled = (e * design.u(k + 1) + e.conj() * design.u(k)) / design.g(k).powi(2);
    (z - coupled).norm() / z.norm()
}

/// `u_k` reconstructed from `g_k` alone.
pub fn aperture_from_radius(g: f64, phi: f64, q: f64) -> f64 {
    let cm1 = phi.cos() - 1.0;
    (g * g - g.powi(4) + g.powi(3) * loss_slope(phi, q)) / (2.0 * cm1)
}

/// Constant trace `exp(i phi)` on cells `1..=N`.
pub fn forward_trace(design: &ChainDesign) -> RiccatiTrace {
    RiccatiTrace {
        first_index: 1,
        rho: vec![Complex64::from_polar(1.0, design.phi); design.cells()],
        diverged_at: None,
    }
}

/// Starting value for the backward-field ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackwardSeed {
    /// Root of `rho^2 + a_1 rho + b_1 = 0` with negative imaginary part.
    NegativePhaseRoot,
    Value(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardField {
    pub trace: RiccatiTrace,
    /// Cumulative product from `y2[1] = 1`.
    pub y2: GridFunction,
    pub amplitude: Vec<f64>,
    /// Unwrapped `arg y2[k] + (k - 1) phi`.
    pub phase_deviation: Vec<f64>,
}

impl BackwardField {
    pub fn max_phase_deviation(&self) -> f64 {
        self.phase_deviation.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn amplitude_nondecreasing(&self) -> bool {
        self.amplitude.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Coefficients whose Riccati equation is the backward-field recurrence
/// `rho_k = -r_k / rho_{k-1} + exp(i phi) + r_k exp(-i phi)`, where
/// `r_k = (u_k / u_{k+1})^exponent`.
pub fn backward_coefficients(design: &ChainDesign, ratio_exponent: i32) -> RecurrenceCoefficients {
    let e = Complex64::from_polar(1.0, design.phi);
    let ratios: Vec<f64> = (1..=design.cells())
        .map(|k| (design.u(k) / design.u(k + 1)).powi(ratio_exponent))
        .collect();
    let a = ratios.iter().map(|&r| -(e + r * e.conj())).collect();
    let b = ratios.iter().map(|&r| c64(r, 0.0)).collect();
    RecurrenceCoefficients::homogeneous(1, a, b).expect("positive apertures give nonzero couplings")
}

/// Backward field over the chain. A diverging trace shortens the output.
pub fn backward_field(design: &ChainDesign, seed: BackwardSeed, ratio_exponent: i32) -> Result<BackwardField> {
    let coeffs = backward_coefficients(design, ratio_exponent);
    let seed = match seed {
        BackwardSeed::NegativePhaseRoot => {
            let (a, b, _) = coeffs.at(1)?;
            characteristic_roots(a, b).1
        }
        BackwardSeed::Value(v) => v,
    };
    let trace = riccati_forward(&coeffs, seed, 1, design.cells())?;
    let y2 = product_solution(&trace, c64(1.0, 0.0), trace.len())?;
    let amplitude = y2.values().iter().map(|y| y.norm()).collect();
    let mut phase_deviation = Vec::with_capacity(y2.len());
    let mut acc = 0.0;
    phase_deviation.push(acc);
    for rho in trace.rho.iter().take(y2.len() - 1) {
        acc += wrap(rho.arg() + design.phi);
        phase_deviation.push(acc);
    }
    Ok(BackwardField {
        trace,
        y2,
        amplitude,
        phase_deviation,
    })
}

/// Forward and backward fields from unit values at cell 1.
pub fn decoupled_fields(design: &ChainDesign, backward: &BackwardField) -> Result<SplitField> {
    let forward = forward_trace(design);
    let one = c64(1.0, 0.0);
    diagonal_propagate(&forward, &backward.trace, SplitState::new(one, one), backward.y2.len())
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::riccati_residual;

    const PHI: f64 = 2.0 * PI / 3.0;

    #[test]
    fn lossless_first_cell_closed_form() {
        let d = design_constant_gradient(0.03, PHI, f64::INFINITY, 1).unwrap();
        let exact = ((1.0 + (1.0f64 + 12.0 * 0.03).sqrt()) / 2.0).sqrt();
        assert!((d.g(1) - exact).abs() < 1e-12);
        assert!((d.g(1) - 1.04072).abs() < 1e-5);
        assert!(ccm_coefficients(&d).a(1).unwrap().im == 0.0);
    }

    #[test]
    fn loss_shifts_first_cell_slightly() {
        let lossless = design_constant_gradient(0.03, PHI, f64::INFINITY, 1).unwrap().g(1);
        let lossy = design_constant_gradient(0.03, PHI, 1e4, 1).unwrap().g(1);
        assert!(lossy != lossless && (lossy - lossless).abs() < 1e-3);
    }

    #[test]
    fn designs_close_the_forward_condition() {
        for u1 in [0.1, 0.05, 0.03, 0.02] {
            let d = design_constant_gradient(u1, PHI, 1e4, 100).unwrap();
            assert_eq!(d.u_values().len(), 101);
            assert!(d.u_values().windows(2).all(|w| w[1] < w[0]));
            let dg: Vec<f64> = d.g_values().windows(2).map(|w| w[1] - w[0]).collect();
            assert!(dg.iter().all(|&x| x < 0.0) || dg.iter().all(|&x| x > 0.0));
            for k in 1..=100 {
                assert!(forward_condition_residual(&d, k) <= 1e-12);
                let u = aperture_from_radius(d.g(k), PHI, 1e4);
                assert!((u - d.u(k)).abs() <= 1e-12);
            }
            let prod: f64 = ccm_coefficients(&d).b_values().iter().map(|b| b.re).product();
            assert!((prod / (d.u(1) / d.u(101)) - 1.0).abs() < 1e-13);
            let coeffs = ccm_coefficients(&d);
            let trace = forward_trace(&d);
            for k in 1..100 {
                assert!(riccati_residual(&coeffs, &trace, k).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn short_apertures_run_out() {
        assert!(design_constant_gradient(0.001, PHI, 1e4, 8).is_ok());
        assert_eq!(
            design_constant_gradient(0.001, PHI, 1e4, 100),
            Err(Error::NoPhysicalRoot { cell: 10 })
        );
    }

    #[test]
    fn invalid_inputs() {
        assert!(design_constant_gradient(0.0, PHI, 1e4, 5).is_err());
        assert!(design_constant_gradient(0.1, 0.0, 1e4, 5).is_err());
        assert!(design_constant_gradient(0.1, PHI, -1.0, 5).is_err());
        assert!(ChainDesign::new(PHI, 1e4, vec![1.0], vec![0.1]).is_err());
        assert!(ChainDesign::new(PI, 1e4, vec![1.0], vec![0.1, 0.1]).is_err());
        assert!(ChainDesign::new(PHI, 1e4, vec![1.0], vec![0.1, -0.1]).is_err());
    }

    #[test]
    fn uniform_chain_backward_fixed_point() {
        let d = ChainDesign::uniform(PHI, f64::INFINITY, 1.0, 0.05, 30).unwrap();
        let coeffs = ccm_coefficients(&d);
        assert!(coeffs.b_values().iter().all(|b| *b == c64(1.0, 0.0)));
        let back = backward_field(&d, BackwardSeed::NegativePhaseRoot, 1).unwrap();
        let target = Complex64::from_polar(1.0, -PHI);
        assert!(back.trace.rho.iter().all(|r| (r - target).norm() < 1e-12));
        assert!(back.max_phase_deviation() < 1e-12);
    }

    #[test]
    fn backward_field_regimes() {
        let big = backward_field(&design_constant_gradient(0.1, PHI, 1e4, 100).unwrap(), BackwardSeed::NegativePhaseRoot, 1).unwrap();
        assert!(big.amplitude_nondecreasing());
        assert!(big.amplitude[99] > big.amplitude[0]);
        assert!(big.max_phase_deviation() < 0.1);
        let small = backward_field(&design_constant_gradient(0.001, PHI, 1e4, 8).unwrap(), BackwardSeed::NegativePhaseRoot, 1).unwrap();
        assert!(small.max_phase_deviation() > big.max_phase_deviation());

        let cubed = backward_field(&design_constant_gradient(0.1, PHI, 1e4, 100).unwrap(), BackwardSeed::NegativePhaseRoot, 3).unwrap();
        assert_eq!(cubed.y2.len(), 100);
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(0.0), 0.0);
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap(-3.0 * PI / 2.0) - PI / 2.0).abs() < 1e-15);
    }
}
