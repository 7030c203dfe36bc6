//! Command-line drivers for the slab and cavity-chain experiments.

pub mod emit;
pub mod parse;

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::Value;

use splitrec::acceptance::{run_library_criteria, Criterion, SMALL_APERTURE_CELLS};
use splitrec::cavity::{backward_field, design_constant_gradient, forward_condition_residual, BackwardSeed};
use splitrec::slab::{
    analytic_slab_rt, solve_forward_smatrix, solve_forward_tmatrix, solve_independent_pair, solve_inverse_scheme,
    vacuum_roots, RhoChoice, SlabProfile,
};

use emit::{Format, Report, Series};
use parse::{finite_f64, parse_complex, positive_q, ratio_exponent};

const FIGURES: &str = "\
Figure data:
  Fig. 1   splitrec slab-ramp --output DIR            (s_field, t_field)
           splitrec slab-ramp --rho-const 0.9 --output DIR
  Fig. 2   splitrec slab-ramp --output DIR and --rho-const 0.9 (s_field of both)
  Fig. 3   splitrec slab-smatrix --defaults-paper --output DIR   (field)
  Fig. 4   splitrec slab-pair --defaults-paper --output DIR      (y1, y2: abs)
  Fig. 5   splitrec slab-pair --defaults-paper --output DIR      (y1, y2: phase_rad)
  Fig. 6   splitrec slab-pair --defaults-paper --output DIR      (relation, field)
  Fig. 7   splitrec slab-inverse --defaults-paper --output DIR   (curve 1)
           splitrec slab-inverse --defaults-paper --terminal-abs 0.531 --terminal-phase 1.9865 --output DIR
  Fig. 8   splitrec cavity-design --u1 U --output DIR   for U in 0.1 0.05 0.02   (design: u)
  Fig. 9   splitrec cavity-design --u1 U --output DIR   for U in 0.1 0.05 0.02   (design: g)
  Fig. 10  splitrec cavity-backward --u1 U --output DIR for U in 0.1 0.05 0.02   (amplitude)
  Fig. 11  splitrec cavity-backward --u1 U --output DIR for U in 0.1 0.05 0.02   (phase_deviation)
  Fig. 12  splitrec cavity-design --u1 0.001 --cells 8 --output DIR            (design: u)
  Fig. 13  splitrec cavity-backward --u1 0.001 --cells 8 --output DIR          (amplitude)
  Fig. 14  splitrec cavity-backward --u1 0.001 --cells 8 --output DIR          (phase_deviation)

Exit status: 0 success, 1 domain or I/O error, 2 usage error.";

#[derive(Debug, Parser)]
#[command(
    name = "splitrec",
    version,
    about = "Split-recurrence solvers for slab diffraction and coupled-cavity chains",
    after_long_help = FIGURES
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory for output files; nothing is written without it
    #[arg(long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SlabArgs {
    /// Reference slab: h = 2pi/100, eps2 = 3+0.03i, N1 = 100, N2 = 1100, N3 = 1200
    #[arg(long, conflicts_with_all = ["h", "eps2", "n1", "n2", "n3"])]
    pub defaults_paper: bool,
    /// Grid step
    #[arg(long, value_parser = finite_f64, default_value_t = 2.0 * PI / 100.0)]
    pub h: f64,
    /// Slab permittivity, e.g. 3+0.03i
    #[arg(long, value_parser = parse_complex, default_value = "3+0.03i")]
    pub eps2: Complex64,
    /// Last vacuum node before the slab
    #[arg(long, default_value_t = 100)]
    pub n1: i64,
    /// Last slab node
    #[arg(long, default_value_t = 1100)]
    pub n2: i64,
    /// Last grid node
    #[arg(long, default_value_t = 1200)]
    pub n3: i64,
}

impl SlabArgs {
    fn profile(&self) -> splitrec::Result<SlabProfile> {
        if self.defaults_paper {
            return Ok(SlabProfile::reference_slab());
        }
        SlabProfile::homogeneous_slab(self.h, self.eps2, self.n1, self.n2, self.n3)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RhoArgs {
    /// Constant splitting value rho1 = c, rho2 = 1/c on interior nodes (default: local roots)
    #[arg(long, value_parser = parse_complex, value_name = "C")]
    pub rho_const: Option<Complex64>,
}

impl RhoArgs {
    fn choice(&self) -> RhoChoice {
        match self.rho_const {
            Some(c) => RhoChoice::Constant(c),
            None => RhoChoice::LocalRoots,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// First aperture
    #[arg(long, value_parser = finite_f64)]
    pub u1: f64,
    /// Phase advance per cell in radians
    #[arg(long, value_parser = finite_f64, default_value_t = 2.0 * PI / 3.0)]
    pub phi: f64,
    /// Quality factor; `inf` for a lossless chain
    #[arg(long, value_parser = positive_q, default_value_t = 1e4)]
    pub q: f64,
    /// Number of cells
    #[arg(long, default_value_t = 100)]
    pub cells: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form reflection and transmission of a homogeneous slab
    SlabExact {
        #[arg(long, value_parser = parse_complex, default_value = "3+0.03i")]
        eps2: Complex64,
        #[arg(long, value_parser = finite_f64, default_value_t = 2.0 * PI)]
        xi1: f64,
        #[arg(long, value_parser = finite_f64, default_value_t = 22.0 * PI)]
        xi2: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stable two-point solve of the slab problem
    SlabSmatrix {
        #[command(flatten)]
        slab: SlabArgs,
        #[command(flatten)]
        rho: RhoArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Independent solutions from vacuum-seeded Riccati sequences
    SlabPair {
        #[command(flatten)]
        slab: SlabArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Backward sweep from a prescribed transmitted wave
    SlabInverse {
        #[command(flatten)]
        slab: SlabArgs,
        /// Modulus of the field at the last node
        #[arg(long, value_parser = finite_f64, default_value_t = 1.0)]
        terminal_abs: f64,
        /// Phase of the field at the last node, radians
        #[arg(long, value_parser = finite_f64, default_value_t = 0.0)]
        terminal_phase: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Linear permittivity ramp: scatter solve next to a diverging transfer sweep
    SlabRamp {
        #[arg(long, value_parser = finite_f64, default_value_t = 2.0 * PI / 100.0)]
        h: f64,
        #[arg(long, default_value_t = 100)]
        n1: i64,
        #[arg(long, default_value_t = 14_100)]
        n2: i64,
        #[arg(long, default_value_t = 14_200)]
        n3: i64,
        #[command(flatten)]
        rho: RhoArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Constant-gradient chain geometry
    CavityDesign {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Backward field along a constant-gradient chain
    CavityBackward {
        #[command(flatten)]
        chain: ChainArgs,
        /// Exponent of the aperture ratio in the backward recurrence
        #[arg(long, default_value_t = 1, value_parser = ratio_exponent)]
        ratio_exponent: i32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the acceptance criteria
    Selftest,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] splitrec::Error),
    #[error(transparent)]
    Emit(#[from] emit::EmitError),
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    if let Command::Selftest = cli.command {
        return selftest(out);
    }
    let (report, output) = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    if let Some(dir) = &output.output {
        if let Err(e) = report.write(dir, output.format) {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    }
    let _ = write!(out, "{}", emit::json_text(&report.summary()));
    0
}

fn execute(command: &Command) -> Result<(Report, OutputArgs), CliError> {
    match command {
        Command::SlabExact { eps2, xi1, xi2, out } => {
            if xi2 <= xi1 {
                return Err(splitrec::Error::InvalidProfile(format!("xi2 = {xi2} must exceed xi1 = {xi1}")).into());
            }
            let (r, t) = analytic_slab_rt(*eps2, *xi1, *xi2);
            let mut report = Report::new("slab-exact");
            report.complex("R", r).complex("T", t);
            Ok((report, out.clone()))
        }
        Command::SlabSmatrix { slab, rho, out } => Ok((slab_smatrix(slab, rho)?, out.clone())),
        Command::SlabPair { slab, out } => Ok((slab_pair(slab)?, out.clone())),
        Command::SlabInverse {
            slab,
            terminal_abs,
            terminal_phase,
            out,
        } => {
            let profile = slab.profile()?;
            let terminal = Complex64::from_polar(*terminal_abs, *terminal_phase);
            let inv = solve_inverse_scheme(&profile, terminal)?;
            let mut report = Report::new("slab-inverse");
            report
                .complex("R_inv", inv.r)
                .complex("T_inv", inv.t)
                .complex("terminal", terminal)
                .series("y1", Series::complex(1, inv.field.values()))
                .series("rho", Series::complex(inv.trace.first_index, &inv.trace.rho));
            Ok((report, out.clone()))
        }
        Command::SlabRamp { h, n1, n2, n3, rho, out } => {
            let profile = SlabProfile::ramp(*h, *n1, *n2, *n3)?;
            let s = solve_forward_smatrix(&profile, rho.choice())?;
            let t = solve_forward_tmatrix(&profile, rho.choice(), s.r)?;
            let t_sum: Vec<Complex64> = t.field.states.iter().map(|x| x.sum()).collect();
            let eps: Vec<f64> = profile.eps_values().iter().map(|e| e.re).collect();
            let mut report = Report::new("slab-ramp");
            report
                .complex("R", s.r)
                .complex("T", s.t)
                .scalar("t_overflow_at", t.overflow_at.map_or(Value::Null, Value::from))
                .series("s_field", Series::complex(1, s.field.values()))
                .series("t_field", Series::complex(1, &t_sum))
                .series("eps", Series::real(1, &eps));
            Ok((report, out.clone()))
        }
        Command::CavityDesign { chain, out } => {
            let design = design_constant_gradient(chain.u1, chain.phi, chain.q, chain.cells)?;
            let rows = (1..=design.cells())
                .map(|k| (k as i64, vec![design.g(k), design.u(k)]))
                .collect();
            let residual = (1..=design.cells())
                .map(|k| forward_condition_residual(&design, k))
                .fold(0.0, f64::max);
            let mut report = Report::new("cavity-design");
            report
                .number("g1", design.g(1))
                .number("u_exit", design.u(design.cells() + 1))
                .number("max_condition_residual", residual)
                .series(
                    "design",
                    Series::Table {
                        columns: vec!["g".into(), "u".into()],
                        rows,
                    },
                );
            Ok((report, out.clone()))
        }
        Command::CavityBackward {
            chain,
            ratio_exponent,
            out,
        } => {
            let design = design_constant_gradient(chain.u1, chain.phi, chain.q, chain.cells)?;
            let back = backward_field(&design, BackwardSeed::NegativePhaseRoot, *ratio_exponent)?;
            let growth = back.amplitude[back.amplitude.len() - 1] / back.amplitude[0];
            let mut report = Report::new("cavity-backward");
            report
                .scalar("ratio_exponent", Value::from(*ratio_exponent))
                .scalar("diverged_at", back.trace.diverged_at.map_or(Value::Null, Value::from))
                .number("amplitude_growth", growth)
                .number("max_phase_deviation", back.max_phase_deviation())
                .series("y2", Series::complex(1, back.y2.values()))
                .series("amplitude", Series::real(1, &back.amplitude))
                .series("phase_deviation", Series::real(1, &back.phase_deviation))
                .series("rho", Series::complex(1, &back.trace.rho));
            Ok((report, out.clone()))
        }
        Command::Selftest => unreachable!("handled by run"),
    }
}

fn slab_smatrix(slab: &SlabArgs, rho: &RhoArgs) -> Result<Report, CliError> {
    let profile = slab.profile()?;
    let res = solve_forward_smatrix(&profile, rho.choice())?;
    let first = res.components.first_component()?;
    let second = res.components.second_component()?;
    let mut report = Report::new("slab-smatrix");
    report.complex("R", res.r).complex("T", res.t);
    let h = profile.h();
    let (r, t) = analytic_slab_rt(eps2_of(&profile), profile.n1() as f64 * h, profile.n2() as f64 * h);
    report.complex("R_exact", r).complex("T_exact", t);
    report
        .series("field", Series::complex(1, res.field.values()))
        .series("y1", Series::complex(1, first.values()))
        .series("y2", Series::complex(1, second.values()));
    Ok(report)
}

fn eps2_of(profile: &SlabProfile) -> Complex64 {
    profile.eps_values()[profile.n2() as usize - 1]
}

fn slab_pair(slab: &SlabArgs) -> Result<Report, CliError> {
    let profile = slab.profile()?;
    let forward = solve_forward_smatrix(&profile, RhoChoice::LocalRoots)?;
    let pair = solve_independent_pair(&profile, vacuum_roots(profile.h()))?;
    let relation: Vec<Complex64> = pair.components.states.iter().map(|s| s.y1 + forward.r * s.y2).collect();
    let mismatch = relation
        .iter()
        .zip(forward.field.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
        / forward.field.max_abs();
    let mut report = Report::new("slab-pair");
    report
        .complex("R", forward.r)
        .number("relation_mismatch", mismatch)
        .scalar("rho1_diverged_at", pair.trace1.diverged_at.map_or(Value::Null, Value::from))
        .scalar("rho2_diverged_at", pair.trace2.diverged_at.map_or(Value::Null, Value::from))
        .series("y1", Series::complex(1, pair.first().values()))
        .series("y2", Series::complex(1, pair.second().values()))
        .series("rho1", Series::complex(1, &pair.trace1.rho))
        .series("rho2", Series::complex(1, &pair.trace2.rho))
        .series("relation", Series::complex(1, &relation))
        .series("field", Series::complex(1, forward.field.values()));
    Ok(report)
}

/// Runs each argument list twice into separate directories under `scratch`
/// and compares every produced file byte for byte.
pub fn determinism_criterion(scratch: &Path, runs: &[Vec<String>]) -> Criterion {
    let mut compared = 0;
    let mut problem = None;
    'outer: for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for pass in ["a", "b"] {
            let dir = scratch.join(format!("run{i}{pass}"));
            let mut full: Vec<String> = vec!["splitrec".into()];
            full.extend(args.iter().cloned());
            full.push("--output".into());
            full.push(dir.display().to_string());
            let mut sink = Vec::new();
            let code = run(&full, &mut sink, &mut std::io::sink());
            if code != 0 {
                problem = Some(format!("`{}` exited with {code}", args.join(" ")));
                break 'outer;
            }
            outputs.push((dir, sink));
        }
        let (a, b) = (&outputs[0], &outputs[1]);
        if a.1 != b.1 {
            problem = Some(format!("stdout of `{}` differs", args.join(" ")));
            break;
        }
        match (dir_contents(&a.0), dir_contents(&b.0)) {
            (Ok(x), Ok(y)) if x == y => compared += x.len(),
            (Ok(_), Ok(_)) => {
                problem = Some(format!("files of `{}` differ", args.join(" ")));
                break;
            }
            (Err(e), _) | (_, Err(e)) => {
                problem = Some(format!("cannot read outputs: {e}"));
                break;
            }
        }
    }
    Criterion {
        id: 12,
        name: "CLI determinism",
        passed: problem.is_none(),
        detail: problem.unwrap_or_else(|| format!("{compared} files byte-identical across repeated runs")),
    }
}

fn dir_contents(dir: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        files.push((entry.file_name().to_string_lossy().into_owned(), fs::read(entry.path())?));
    }
    files.sort();
    Ok(files)
}

/// Argument lists used by the determinism check.
pub fn determinism_runs() -> Vec<Vec<String>> {
    let cells = SMALL_APERTURE_CELLS.to_string();
    [
        vec!["slab-smatrix", "--defaults-paper"],
        vec!["slab-inverse", "--defaults-paper", "--format", "json"],
        vec!["cavity-design", "--u1", "0.03", "--phi", "2.0943951", "--q", "10000", "--cells", "100"],
        vec!["cavity-backward", "--u1", "0.001", "--cells", cells.as_str()],
    ]
    .iter()
    .map(|v| v.iter().map(|s| s.to_string()).collect())
    .collect()
}

fn selftest(out: &mut dyn Write) -> i32 {
    let mut report = run_library_criteria();
    let scratch = std::env::temp_dir().join(format!("splitrec-selftest-{}", std::process::id()));
    report.push(determinism_criterion(&scratch, &determinism_runs()));
    let _ = fs::remove_dir_all(&scratch);
    for c in &report {
        let _ = writeln!(out, "{c}");
    }
    let failed = report.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} of {} criteria passed", report.len() - failed, report.len());
    i32::from(failed > 0)
}
