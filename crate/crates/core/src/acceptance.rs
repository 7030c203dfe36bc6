//! End-to-end checks of the library against reference values and invariants.
//!
//! Each check returns a [`Criterion`] rather than panicking so that callers
//! can print a full report. Randomized suites use fixed seeds.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cavity::{
    backward_field, ccm_coefficients, decoupled_fields, design_constant_gradient, forward_condition_residual,
    BackwardSeed,
};
use crate::matrix_forms::{propagate_transfer, transfer_matrix};
use crate::recurrence::{companion_step, solve_cauchy, RecurrenceCoefficients};
use crate::riccati::riccati_forward;
use crate::slab::{
    analytic_slab_rt, solve_forward_smatrix, solve_forward_tmatrix, solve_independent_pair, solve_inverse_scheme,
    vacuum_roots, RhoChoice, SlabProfile,
};
use crate::split::{decompose, recombine, SplitSequences};
use crate::{c64, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn criterion(id: u32, name: &'static str, outcome: Result<(bool, String)>) -> Criterion {
    match outcome {
        Ok((passed, detail)) => Criterion {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => Criterion {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn within(z: Complex64, re: f64, im: f64, tol: f64) -> bool {
    (z.re - re).abs() <= tol && (z.im - im).abs() <= tol
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

const PAPER_H: f64 = 2.0 * PI / 100.0;
const CHAIN_PHI: f64 = 2.0 * PI / 3.0;
const CHAIN_Q: f64 = 1e4;

pub fn analytic_oracle() -> Criterion {
    let (r, t) = analytic_slab_rt(c64(3.0, 0.03), 2.0 * PI, 22.0 * PI);
    let ok = within(r, -0.3207, -0.065787, 5e-4)
        && within(t, -0.2185, 0.4836, 5e-4)
        && (r.norm() - 0.3273).abs() <= 5e-4
        && (t.norm() - 0.5306).abs() <= 5e-4;
    criterion(
        1,
        "analytic slab oracle",
        Ok((ok, format!("R = {}, T = {}", fmt_c(r), fmt_c(t)))),
    )
}

#[allow(clippy::approx_constant)]
pub fn smatrix_forward() -> Criterion {
    let run = || {
        let res = solve_forward_smatrix(&SlabProfile::reference_slab(), RhoChoice::LocalRoots)?;
        let ok = within(res.r, -0.318, -0.051929, 2e-3)
            && within(res.t, -0.2145, 0.4859, 2e-3)
            && (res.r.norm() - 0.3222).abs() <= 2e-3
            && (res.t.norm() - 0.5312).abs() <= 2e-3;
        Ok((ok, format!("R = {}, T = {}", fmt_c(res.r), fmt_c(res.t))))
    };
    criterion(2, "S-matrix forward solve", run())
}

pub fn inverse_scheme() -> Criterion {
    let run = || {
        let profile = SlabProfile::reference_slab();
        let unit = solve_inverse_scheme(&profile, c64(1.0, 0.0))?;
        let forward = solve_forward_smatrix(&profile, RhoChoice::LocalRoots)?;
        let scaled = solve_inverse_scheme(&profile, Complex64::from_polar(0.531, 1.9865))?;
        let diff = scaled
            .field
            .values()
            .iter()
            .zip(forward.field.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        let rel = diff / forward.field.max_abs();
        let ok = within(unit.r, -0.3089, -0.090980, 2e-3) && within(unit.t, -0.2445, 0.4718, 2e-3) && rel <= 1e-2;
        Ok((
            ok,
            format!("R_inv = {}, T_inv = {}, field mismatch {rel:.2e}", fmt_c(unit.r), fmt_c(unit.t)),
        ))
    };
    criterion(3, "inverse scheme", run())
}

pub fn independent_pair_relation() -> Criterion {
    let run = || {
        let profile = SlabProfile::reference_slab();
        let forward = solve_forward_smatrix(&profile, RhoChoice::LocalRoots)?;
        let pair = solve_independent_pair(&profile, vacuum_roots(PAPER_H))?;
        if pair.components.len() != forward.field.len() {
            return Ok((false, format!("pair stopped after {} nodes", pair.components.len())));
        }
        let diff = pair
            .components
            .states
            .iter()
            .zip(forward.field.values())
            .fold(0.0f64, |m, (s, y)| m.max((y - (s.y1 + forward.r * s.y2)).norm()));
        let rel = diff / forward.field.max_abs();
        Ok((rel <= 1e-6, format!("max |Y - (y1 + R y2)| / max|Y| = {rel:.2e}")))
    };
    criterion(4, "independent pair relation", run())
}

pub fn choice_independence() -> Criterion {
    let run = || {
        let profile = SlabProfile::reference_slab();
        let local = solve_forward_smatrix(&profile, RhoChoice::LocalRoots)?;
        let constant = solve_forward_smatrix(&profile, RhoChoice::Constant(c64(0.9, 0.0)))?;
        let diff = local
            .field
            .values()
            .iter()
            .zip(constant.field.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        let rel = diff / local.field.max_abs();
        Ok((rel <= 1e-9, format!("max pointwise difference {rel:.2e} relative")))
    };
    criterion(5, "splitting choice independence", run())
}

pub fn ramp_divergence() -> Criterion {
    let run = || {
        let profile = SlabProfile::default_ramp();
        let s = solve_forward_smatrix(&profile, RhoChoice::LocalRoots)?;
        let t = solve_forward_tmatrix(&profile, RhoChoice::LocalRoots, s.r)?;
        let s_peak = s.components.max_abs();
        let s_ok = s_peak.is_finite() && s_peak <= crate::matrix_forms::OVERFLOW_THRESHOLD;
        let detail = match t.overflow_at {
            Some(k) => format!("T-sweep overflow at node {k}; S-sweep peak component {s_peak:.3e}"),
            None => format!("T-sweep completed, peak {:.3e}; S-sweep peak {s_peak:.3e}", t.field.max_abs()),
        };
        Ok((t.overflowed() && s_ok, detail))
    };
    criterion(6, "T-sweep divergence on ramp", run())
}

fn random_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random_range(-PI..PI))
}

fn random_in_annulus(rng: &mut ChaCha8Rng, inner: f64, outer: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(inner..outer), rng.random_range(-PI..PI))
}

fn random_coefficients(rng: &mut ChaCha8Rng, len: usize) -> Result<RecurrenceCoefficients> {
    let a = (0..len).map(|_| random_in_disk(rng, 2.0)).collect();
    let b = (0..len).map(|_| random_in_annulus(rng, 0.05, 2.0)).collect();
    let f = (0..len).map(|_| random_in_disk(rng, 1.0)).collect();
    RecurrenceCoefficients::new(1, a, b, f)
}

fn random_split(rng: &mut ChaCha8Rng, len: usize) -> Result<SplitSequences> {
    let mut rho1 = Vec::with_capacity(len);
    let mut rho2 = Vec::with_capacity(len);
    while rho1.len() < len {
        let r1 = random_in_annulus(rng, 0.5, 2.0);
        let r2 = random_in_annulus(rng, 0.5, 2.0);
        if (r1 - r2).norm() >= 0.1 {
            rho1.push(r1);
            rho2.push(r2);
        }
    }
    SplitSequences::new(1, rho1, rho2)
}

pub fn oracle_equivalence() -> Criterion {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst_transfer = 0.0f64;
        let mut worst_companion = 0.0f64;
        let mut overflowed = 0;
        for _ in 0..1000 {
            let n = rng.random_range(3..=200usize);
            let coeffs = random_coefficients(&mut rng, n)?;
            let split = random_split(&mut rng, n)?;
            let y0 = random_in_disk(&mut rng, 1.0);
            let y1 = random_in_disk(&mut rng, 1.0);
            let y = solve_cauchy(&coeffs, y0, y1, n)?;
            let scale = y.max_abs();

            let initial = split.decompose_at(1, y0, y1)?;
            let sweep = propagate_transfer(&coeffs, &split, 1, initial, n - 1)?;
            if sweep.overflowed() {
                overflowed += 1;
                continue;
            }
            for (s, (_, v)) in sweep.field.states.iter().zip(y.iter()) {
                worst_transfer = worst_transfer.max((s.sum() - v).norm() / scale);
            }

            let mut state = [y1, y0];
            for k in 2..n as i64 {
                state = companion_step(&coeffs, k, state)?;
                worst_companion = worst_companion.max((state[0] - y.at(k + 1)?).norm() / scale);
            }
        }
        let ok = worst_transfer <= 1e-10 && worst_companion <= 1e-12 && overflowed == 0;
        Ok((
            ok,
            format!(
                "1000 instances: transfer {worst_transfer:.2e}, companion {worst_companion:.2e} relative, {overflowed} overflowed"
            ),
        ))
    };
    criterion(7, "oracle equivalence", run())
}

pub fn riccati_diagonality() -> Criterion {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut worst_full = 0.0f64;
        let mut worst_half = 0.0f64;
        let mut instances = 0;
        while instances < 1000 {
            let n = rng.random_range(2..=20usize);
            let coeffs = random_coefficients(&mut rng, n + 1)?;
            let seed1 = random_in_annulus(&mut rng, 0.5, 2.0);
            let seed2 = random_in_annulus(&mut rng, 0.5, 2.0);
            let t1 = riccati_forward(&coeffs, seed1, 1, n)?;
            let t2 = riccati_forward(&coeffs, seed2, 1, n)?;
            if t1.len() < n || t2.len() < n || t1.rho.iter().zip(&t2.rho).any(|(p, q)| (p - q).norm() < 0.1) {
                continue;
            }
            let free: Vec<Complex64> = (0..n).map(|_| random_in_annulus(&mut rng, 0.5, 2.0)).collect();
            if free.iter().zip(&t2.rho).any(|(p, q)| (p - q).norm() < 0.1) {
                continue;
            }
            instances += 1;
            let full = SplitSequences::new(1, t1.rho.clone(), t2.rho.clone())?;
            let half = SplitSequences::new(1, free, t2.rho.clone())?;
            for k in 1..n as i64 {
                let t = transfer_matrix(&coeffs, &full, k)?;
                worst_full = worst_full.max(t.m12.norm().max(t.m21.norm()) / t.norm());
                let t = transfer_matrix(&coeffs, &half, k)?;
                worst_half = worst_half.max(t.m12.norm() / t.norm());
            }
        }
        let ok = worst_full <= 1e-12 && worst_half <= 1e-12;
        Ok((
            ok,
            format!("1000 instances: both consistent {worst_full:.2e}, second only {worst_half:.2e}"),
        ))
    };
    criterion(8, "Riccati diagonality", run())
}

pub fn splitting_roundtrip() -> Criterion {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut worst = 0.0f64;
        let mut samples = 0;
        while samples < 100_000 {
            let r1 = random_in_disk(&mut rng, 2.0);
            let r2 = random_in_disk(&mut rng, 2.0);
            if (r1 - r2).norm() < 0.1 {
                continue;
            }
            samples += 1;
            let (y, y_next) = (random_in_disk(&mut rng, 1.0), random_in_disk(&mut rng, 1.0));
            let (back, back_next) = recombine(decompose(y, y_next, r1, r2)?, r1, r2);
            worst = worst.max((back - y).norm()).max((back_next - y_next).norm());
            let state = crate::split::SplitState::new(random_in_disk(&mut rng, 1.0), random_in_disk(&mut rng, 1.0));
            let (p, q) = recombine(state, r1, r2);
            let again = decompose(p, q, r1, r2)?;
            worst = worst.max((again.y1 - state.y1).norm()).max((again.y2 - state.y2).norm());
        }
        Ok((worst <= 1e-13, format!("1e5 samples, worst error {worst:.2e}")))
    };
    criterion(9, "splitting roundtrip", run())
}

pub fn cavity_design_closure() -> Criterion {
    let run = || {
        let mut worst_condition = 0.0f64;
        let mut worst_amplitude = 0.0f64;
        let mut worst_phase = 0.0f64;
        for u1 in [0.1, 0.05, 0.03, 0.02] {
            let design = design_constant_gradient(u1, CHAIN_PHI, CHAIN_Q, 100)?;
            for k in 1..=design.cells() {
                worst_condition = worst_condition.max(forward_condition_residual(&design, k));
            }
            let back = backward_field(&design, BackwardSeed::NegativePhaseRoot, 1)?;
            let fields = decoupled_fields(&design, &back)?;
            let forward = fields.first_component()?;
            let first = forward.at(1)?;
            for w in forward.values().windows(2) {
                worst_phase = worst_phase.max(((w[1] / w[0]).arg() - CHAIN_PHI).abs());
            }
            for v in forward.values() {
                worst_amplitude = worst_amplitude.max((v.norm() - first.norm()).abs());
            }
            // the same forward wave, stepped through the recurrence itself
            let coeffs = ccm_coefficients(&design);
            let e = Complex64::from_polar(1.0, CHAIN_PHI);
            let y = solve_cauchy(&coeffs, c64(1.0, 0.0), e, design.cells())?;
            for (k, v) in y.iter() {
                worst_amplitude = worst_amplitude.max((v.norm() - 1.0).abs());
                if k > 1 {
                    worst_phase = worst_phase.max(((v / y.at(k - 1)?).arg() - CHAIN_PHI).abs());
                }
            }
        }
        let g1 = design_constant_gradient(0.03, CHAIN_PHI, f64::INFINITY, 1)?.g(1);
        let ok = worst_condition <= 1e-12 && worst_amplitude <= 1e-10 && worst_phase <= 1e-10 && (g1 - 1.04072).abs() <= 1e-4;
        Ok((
            ok,
            format!(
                "condition residual {worst_condition:.2e}, amplitude {worst_amplitude:.2e}, phase {worst_phase:.2e}, lossless g1 = {g1:.7}"
            ),
        ))
    };
    criterion(10, "cavity design closure", run())
}

/// Longest chain a `u1 = 0.001` constant-gradient design supports at the
/// reference phase advance and loss.
pub const SMALL_APERTURE_CELLS: usize = 8;

pub fn cavity_backward_field() -> Criterion {
    let run = || {
        let mut ok = true;
        let mut notes = Vec::new();
        for u1 in [0.1, 0.05, 0.02] {
            let design = design_constant_gradient(u1, CHAIN_PHI, CHAIN_Q, 100)?;
            let back = backward_field(&design, BackwardSeed::NegativePhaseRoot, 1)?;
            let ratio = back.amplitude[back.amplitude.len() - 1] / back.amplitude[0];
            ok &= back.amplitude_nondecreasing() && ratio > 1.0 && back.amplitude.len() == 100;
            notes.push(format!("u1={u1}: growth {ratio:.4}"));
        }
        let reference = backward_field(
            &design_constant_gradient(0.1, CHAIN_PHI, CHAIN_Q, 100)?,
            BackwardSeed::NegativePhaseRoot,
            1,
        )?
        .max_phase_deviation();
        let small = backward_field(
            &design_constant_gradient(0.001, CHAIN_PHI, CHAIN_Q, SMALL_APERTURE_CELLS)?,
            BackwardSeed::NegativePhaseRoot,
            1,
        )?
        .max_phase_deviation();
        ok &= small > reference;
        notes.push(format!("phase deviation {small:.3e} (u1=0.001) vs {reference:.3e} (u1=0.1)"));
        Ok((ok, notes.join(", ")))
    };
    criterion(11, "cavity backward field", run())
}

/// Criteria 1 to 11 in order.
pub fn run_library_criteria() -> Vec<Criterion> {
    vec![
        analytic_oracle(),
        smatrix_forward(),
        inverse_scheme(),
        independent_pair_relation(),
        choice_independence(),
        ramp_divergence(),
        oracle_equivalence(),
        riccati_diagonality(),
        splitting_roundtrip(),
        cavity_design_closure(),
        cavity_backward_field(),
    ]
}
