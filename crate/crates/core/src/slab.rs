//! Normal-incidence diffraction on a 1-D dielectric slab.
//!
//! The wave equation `y'' + eps(xi) y = 0` is discretized on nodes
//! `xi_k = k h`, `k = 1..=N3`, as the three-point scheme
//!
//! ```text
//! y[k+1] + y[k-1] - (2 - h^2 eps[k]) y[k] = 0
//! ```
//!
//! i.e. `a[k] = -(2 - h^2 eps[k])`, `b[k] = 1`. A unit forward wave enters at
//! node 1 and nothing comes back from beyond node `N3`. With the local
//! characteristic roots as splitting sequences, `y1` and `y2` are the forward
//! and backward plane waves wherever `eps = 1`. The implicit time factor is
//! `exp(-i omega t)`, so the forward vacuum root is `~exp(+i h)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::matrix_forms::{propagate_transfer, solve_two_point, TransferSweep};
use crate::recurrence::{GridFunction, RecurrenceCoefficients};
use crate::riccati::{diagonal_propagate, riccati_forward, riccati_inverse, RiccatiTrace};
use crate::split::{decompose, SplitField, SplitSequences, SplitState};
use crate::{c64, Error, Result};

/// Node permittivities plus region markers.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabProfile {
    h: f64,
    eps: Vec<Complex64>,
    n1: i64,
    n2: i64,
    n3: i64,
}

impl SlabProfile {
    /// `eps[0]` belongs to node 1. Requires `h > 0` and `1 <= n1 < n2 <= n3 <= eps.len()`.
    pub fn new(h: f64, eps: Vec<Complex64>, n1: i64, n2: i64, n3: i64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidProfile(format!("grid step must be positive, got {h}")));
        }
        if !(1 <= n1 && n1 < n2 && n2 <= n3 && n3 <= eps.len() as i64) {
            return Err(Error::InvalidProfile(format!(
                "markers must satisfy 1 <= N1 < N2 <= N3 <= {}, got {n1}, {n2}, {n3}",
                eps.len()
            )));
        }
        if let Some(k) = eps.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidProfile(format!("permittivity at node {} is not finite", k + 1)));
        }
        Ok(Self { h, eps, n1, n2, n3 })
    }

    /// Vacuum on `1..=n1`, `eps2` on `n1+1..=n2`, vacuum on `n2+1..=n3`.
    pub fn homogeneous_slab(h: f64, eps2: Complex64, n1: i64, n2: i64, n3: i64) -> Result<Self> {
        let eps = (1..=n3.max(0))
            .map(|k| if k > n1 && k <= n2 { eps2 } else { c64(1.0, 0.0) })
            .collect();
        Self::new(h, eps, n1, n2, n3)
    }

    /// The reference slab: `h = 2 pi / 100`, `eps2 = 3 + 0.03i`, markers 100, 1100, 1200.
    pub fn reference_slab() -> Self {
        Self::homogeneous_slab(2.0 * PI / 100.0, c64(3.0, 0.03), 100, 1100, 1200)
            .expect("reference geometry is valid")
    }

    /// Linear ramp `eps[k] = 1 - 2 (k - n1 + 0.5) / (n2 - n1)` on `n1..=n2`,
    /// vacuum elsewhere. The permittivity turns negative past the midpoint.
    pub fn ramp(h: f64, n1: i64, n2: i64, n3: i64) -> Result<Self> {
        let width = (n2 - n1) as f64;
        let eps = (1..=n3.max(0))
            .map(|k| {
                if k >= n1 && k <= n2 {
                    c64(1.0 - 2.0 * ((k - n1) as f64 + 0.5) / width, 0.0)
                } else {
                    c64(1.0, 0.0)
                }
            })
            .collect();
        Self::new(h, eps, n1, n2, n3)
    }

    /// Ramp long enough for the T-sweep through its evanescent half to exceed
    /// the overflow threshold: markers 100, 14100, 14200 at `h = 2 pi / 100`.
    pub fn default_ramp() -> Self {
        Self::ramp(2.0 * PI / 100.0, 100, 14_100, 14_200).expect("reference ramp is valid")
    }

    /// `eps = 1` on `1..=len`.
    pub fn vacuum(h: f64, len: i64) -> Result<Self> {
        Self::new(h, vec![c64(1.0, 0.0); len.max(0) as usize], 1, len, len)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n1(&self) -> i64 {
        self.n1
    }

    pub fn n2(&self) -> i64 {
        self.n2
    }

    pub fn n3(&self) -> i64 {
        self.n3
    }

    pub fn eps_values(&self) -> &[Complex64] {
        &self.eps
    }

    pub fn eps(&self, k: i64) -> Result<Complex64> {
        if k < 1 || k > self.eps.len() as i64 {
            return Err(Error::IndexOutOfRange {
                index: k,
                first: 1,
                last: self.eps.len() as i64,
            });
        }
        Ok(self.eps[(k - 1) as usize])
    }

    /// Roots of the local characteristic equation at node `k`.
    pub fn roots_at(&self, k: i64) -> Result<(Complex64, Complex64)> {
        Ok(local_roots(self.eps(k)?, self.h))
    }
}

/// Recurrence coefficients of the tight-binding scheme over all profile nodes.
pub fn discretize(profile: &SlabProfile) -> RecurrenceCoefficients {
    let h2 = profile.h * profile.h;
    let a = profile.eps.iter().map(|e| -(2.0 - h2 * e)).collect();
    RecurrenceCoefficients::homogeneous(1, a, vec![c64(1.0, 0.0); profile.eps.len()])
        .expect("b = 1 and a finite profile always form a valid window")
}

/// Roots `c +- sqrt(c^2 - 1)`, `c = 1 - h^2 eps / 2`, of
/// `rho^2 - (2 - h^2 eps) rho + 1 = 0`.
///
/// The square root is the principal one; the pair is then ordered so that the
/// first root is the forward wave: the smaller modulus (decaying towards
/// larger `k`), or for equal moduli the positive imaginary part.
pub fn local_roots(eps: Complex64, h: f64) -> (Complex64, Complex64) {
    let c = 1.0 - h * h * eps / 2.0;
    let s = (c * c - 1.0).sqrt();
    let (p, m) = (c + s, c - s);
    let (np, nm) = (p.norm(), m.norm());
    let forward_is_p = if (np - nm).abs() > 1e-12 * np.max(nm) {
        np < nm
    } else {
        p.im >= m.im
    };
    if forward_is_p {
        (p, m)
    } else {
        (m, p)
    }
}

/// Closed-form reflection and transmission of a homogeneous slab occupying
/// `xi1 < xi <= xi2` in vacuum, both referenced to `xi = 0`.
pub fn analytic_slab_rt(eps2: Complex64, xi1: f64, xi2: f64) -> (Complex64, Complex64) {
    let i = c64(0.0, 1.0);
    let n = eps2.sqrt();
    let phase = n * (xi2 - xi1);
    let denominator = (n + 1.0).powu(2) * (-i * phase).exp() - (n - 1.0).powu(2) * (i * phase).exp();
    let r = (eps2 - 1.0) * 2.0 * i * phase.sin() * (i * (2.0 * xi1 + xi2)).exp() / denominator;
    let t = 4.0 * n * (i * (xi1 - xi2)).exp() / denominator;
    (r, t)
}

/// How the splitting sequences are chosen at interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoChoice {
    /// Local characteristic roots at every node.
    LocalRoots,
    /// `rho1 = c`, `rho2 = 1 / c` on nodes `2..N3`. The end nodes keep their
    /// local roots so the boundary data stay forward/backward wave amplitudes.
    Constant(Complex64),
}

/// Splitting sequences over `1..=N3` for the given choice.
pub fn split_for(profile: &SlabProfile, choice: RhoChoice) -> Result<SplitSequences> {
    let n3 = profile.n3;
    let mut rho1 = Vec::with_capacity(n3 as usize);
    let mut rho2 = Vec::with_capacity(n3 as usize);
    for k in 1..=n3 {
        let (r1, r2) = match choice {
            RhoChoice::Constant(c) if k > 1 && k < n3 => (c, 1.0 / c),
            _ => profile.roots_at(k)?,
        };
        rho1.push(r1);
        rho2.push(r2);
    }
    SplitSequences::new(1, rho1, rho2)
}

/// Reflection, transmission and total field of a forward solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterResult {
    /// `S11` of the whole grid: backward amplitude at node 1 per unit incident amplitude.
    pub r: Complex64,
    /// `S21` of the whole grid: forward amplitude at node `N3` per unit incident amplitude.
    pub t: Complex64,
    /// `Y[k] = y1[k] + y2[k]` on `1..=N3`.
    pub field: GridFunction,
    pub components: SplitField,
}

/// S-matrix solve with `y1[1] = 1` and `y2[N3] = 0`.
pub fn solve_forward_smatrix(profile: &SlabProfile, choice: RhoChoice) -> Result<ScatterResult> {
    let coeffs = discretize(profile);
    let split = split_for(profile, choice)?;
    let one = c64(1.0, 0.0);
    let solution = solve_two_point(&coeffs, &split, 1, profile.n3, one, c64(0.0, 0.0))?;
    Ok(ScatterResult {
        r: solution.total.s11,
        t: solution.total.s21,
        field: solution.field.sums()?,
        components: solution.field,
    })
}

/// T-sweep from node 1 with incident amplitude 1 and the given reflected
/// amplitude. Flags overflow instead of failing.
pub fn solve_forward_tmatrix(profile: &SlabProfile, choice: RhoChoice, reflection: Complex64) -> Result<TransferSweep> {
    let coeffs = discretize(profile);
    let split = split_for(profile, choice)?;
    propagate_transfer(
        &coeffs,
        &split,
        1,
        SplitState::new(c64(1.0, 0.0), reflection),
        profile.n3 as usize,
    )
}

/// Forward and backward vacuum roots for step `h`.
pub fn vacuum_roots(h: f64) -> (Complex64, Complex64) {
    local_roots(c64(1.0, 0.0), h)
}

/// Two independent solutions obtained from Riccati sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentPair {
    pub trace1: RiccatiTrace,
    pub trace2: RiccatiTrace,
    /// `y1[1] = y2[1] = 1`; shortened if either trace diverged.
    pub components: SplitField,
}

impl IndependentPair {
    pub fn first(&self) -> GridFunction {
        self.components.first_component().expect("pair holds node 1")
    }

    pub fn second(&self) -> GridFunction {
        self.components.second_component().expect("pair holds node 1")
    }
}

/// Runs the forward Riccati iteration from `seeds` at node 1 and propagates
/// both decoupled solutions from unit values.
pub fn solve_independent_pair(profile: &SlabProfile, seeds: (Complex64, Complex64)) -> Result<IndependentPair> {
    let coeffs = discretize(profile);
    let n3 = profile.n3 as usize;
    let trace1 = riccati_forward(&coeffs, seeds.0, 1, n3)?;
    let trace2 = riccati_forward(&coeffs, seeds.1, 1, n3)?;
    let count = n3.min(trace1.len().min(trace2.len()) + 1);
    let one = c64(1.0, 0.0);
    let components = diagonal_propagate(&trace1, &trace2, SplitState::new(one, one), count)?;
    Ok(IndependentPair {
        trace1,
        trace2,
        components,
    })
}

/// Result of the inverse scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseResult {
    pub r: Complex64,
    pub t: Complex64,
    pub trace: RiccatiTrace,
    /// The first inverse solution on `1..=N3`.
    pub field: GridFunction,
}

/// Backward sweep from a pure forward wave at node `N3`.
///
/// The Riccati sequence starts from the forward vacuum root at `N3` and runs
/// downwards; `y[k] = y[k+1] / rho[k]`. The field at nodes 1 and 2 is split
/// into forward and backward vacuum waves, which are then phase-referenced to
/// `xi = 0` (node 0). `R` is the backward/forward ratio there and `T` the
/// exit amplitude `terminal_value exp(-i N3 h)` over the incident amplitude.
pub fn solve_inverse_scheme(profile: &SlabProfile, terminal_value: Complex64) -> Result<InverseResult> {
    let coeffs = discretize(profile);
    let n3 = profile.n3;
    let h = profile.h;
    let (exit_forward, _) = profile.roots_at(n3)?;
    let trace = riccati_inverse(&coeffs, exit_forward, n3, n3 as usize)?;
    if trace.first_index > 1 {
        return Err(Error::RiccatiDiverged {
            index: trace.diverged_at.unwrap_or(trace.first_index),
        });
    }
    let mut values = vec![c64(0.0, 0.0); n3 as usize];
    values[(n3 - 1) as usize] = terminal_value;
    for k in (1..n3).rev() {
        let i = (k - 1) as usize;
        values[i] = values[i + 1] / trace.at(k)?;
    }
    let field = GridFunction::new(1, values)?;

    let (fwd, bwd) = profile.roots_at(1)?;
    let (a_fwd, a_bwd) = plane_wave_amplitudes(&field, 1, fwd, bwd)?;
    let a_fwd = a_fwd * c64(0.0, -h).exp();
    let a_bwd = a_bwd * c64(0.0, h).exp();
    let exit = terminal_value * c64(0.0, -(n3 as f64) * h).exp();
    Ok(InverseResult {
        r: a_bwd / a_fwd,
        t: exit / a_fwd,
        trace,
        field,
    })
}

/// Forward/backward plane-wave amplitudes at node `k`:
/// `A_fwd + A_bwd = y[k]`, `A_fwd rho_fwd + A_bwd rho_bwd = y[k+1]`.
pub fn plane_wave_amplitudes(
    y: &GridFunction,
    k: i64,
    rho_fwd: Complex64,
    rho_bwd: Complex64,
) -> Result<(Complex64, Complex64)> {
    let s = decompose(y.at(k)?, y.at(k + 1)?, rho_fwd, rho_bwd).map_err(|_| Error::DegenerateSplit { index: Some(k) })?;
    Ok((s.y1, s.y2))
}

/// Largest residual of the discrete wave equation over the interior nodes of
/// `y`, relative to `max |y|`.
pub fn relative_wave_residual(profile: &SlabProfile, y: &GridFunction) -> Result<f64> {
    let coeffs = discretize(profile);
    let scale = y.max_abs().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for k in (y.first_index() + 1)..y.last_index() {
        worst = worst.max(coeffs.residual(y, k)?.norm());
    }
    Ok(worst / scale)
}
