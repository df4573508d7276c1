//! Command-line front end. Exit codes: 0 pass, 1 usage or I/O error,
//! 2 numerical invariant failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::central::{collinear3, ngon, ngon_range_note, CentralConfiguration};
use crate::error::{NcolError, Result};
use crate::io::{write_rows, write_trajectory, ConfigFile};
use crate::mcgehee::{homothetic_initial, integrate_el, SimOptions};
use crate::morse::{default_shifts, morse_witnesses, Profile, QuadOptions};
use crate::nbody::{Alpha, TangentVector};
use crate::spectral::{
    collinear_threshold, collinear_unequal_threshold, figure1_grid, ngon_threshold, smallest_eigenvalue, sweep,
    SweepFamily,
};
use crate::weak::{check_esplode1, check_esplode2, family_report, gamma_trace, ScaledFamily, WeakOptions, ALPHA_GRID};

#[derive(Debug, Parser)]
#[command(name = "ncol", version, about = "Collision Morse-index probes for alpha-homogeneous N-body problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Collinear3,
    #[value(name = "collinear3-m2")]
    Collinear3M2,
    Ngon,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileKind {
    Flat,
    Exp,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value = "collinear3")]
    pub family: FamilyKind,
    /// Exponent of the potential; a config file supplies its own by default.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub m1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m2: f64,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Space dimension (2 for the collinear family, 3 for polygons by default).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Configuration JSON for `--family file`.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or verify a central configuration and print it as JSON.
    Central {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Smallest constrained Hessian eigenvalue and the collision criterion.
    Spectral {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Threshold exponent of the closed-form inequality of a family.
    Threshold {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Per-α rows of the closed-form and spectral criteria.
    Sweep {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1.95)]
        alpha_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sweep of the equal-mass collinear family on the figure grid.
    Figure1 {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Integrate the homothetic collision in reduced coordinates.
    Simulate {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 0.0)]
        energy: f64,
        #[arg(long, default_value_t = 50.0)]
        tau_max: f64,
        /// Stop once ρ falls below this; 0 disables the stop.
        #[arg(long, default_value_t = 1e-8)]
        rho_min: f64,
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        /// Largest accepted scaled energy drift.
        #[arg(long, default_value_t = 1e-8)]
        drift_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Second-variation witnesses from disjoint bumps along the homothetic collision.
    Morse {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 10)]
        bumps: usize,
        #[arg(long, default_value_t = 1.0)]
        l1: f64,
        #[arg(long, default_value_t = 20.0)]
        width: f64,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, value_enum, default_value = "flat")]
        profile: ProfileKind,
        #[arg(long, default_value_t = 0.8)]
        flat: f64,
        #[arg(long, default_value_t = 0.0)]
        energy: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scaled weak-force family: Γ identity and grid searches.
    Weakforce {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Comma-separated decreasing α grid.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Size of the initial angular velocity along the first eigendirection.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = 0.001)]
        grid: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// 1 for malformed input or I/O, 2 for numerical failures.
pub fn exit_code(e: &NcolError) -> i32 {
    match e {
        NcolError::Parse(_)
        | NcolError::Io(_)
        | NcolError::InvalidAlpha(_)
        | NcolError::InvalidMass(_)
        | NcolError::InvalidN(_)
        | NcolError::DimensionMismatch(_)
        | NcolError::RejectedInitialData(_)
        | NcolError::SupportOutOfRange { .. }
        | NcolError::OverlappingSupports(_) => 1,
        _ => 2,
    }
}

fn sink(out: &OutArgs) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json(out: &OutArgs, v: &serde_json::Value) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    Ok(())
}

fn alpha_or(fam: &FamilyArgs, default: f64) -> Result<Alpha> {
    Alpha::new(fam.alpha.unwrap_or(default))
}

/// The central configuration selected by the family flags.
pub fn resolve(fam: &FamilyArgs) -> Result<CentralConfiguration> {
    let cc = match fam.family {
        FamilyKind::Collinear3 => collinear3(1.0, 1.0, alpha_or(fam, 1.0)?)?,
        FamilyKind::Collinear3M2 => collinear3(fam.m1, fam.m2, alpha_or(fam, 1.0)?)?,
        FamilyKind::Ngon => {
            if let Some(note) = ngon_range_note(fam.n) {
                eprintln!("{note}");
            }
            return ngon(fam.n, alpha_or(fam, 1.0)?, fam.dim.unwrap_or(3));
        }
        FamilyKind::File => {
            let path = fam.file.as_ref().ok_or_else(|| NcolError::Parse("--family file needs --file".into()))?;
            let cfg = ConfigFile::load(path)?;
            let (x, m, a) = cfg.parts()?;
            let a = match fam.alpha {
                Some(v) => Alpha::new(v)?,
                None => a,
            };
            let family = match &cfg.family {
                Some(f) => f.parse()?,
                None => crate::central::Family::Numeric,
            };
            CentralConfiguration::verify(x, m, a, family)?
        }
    };
    match fam.dim {
        Some(d) if d != cc.dim() => cc.embedded(d),
        _ => Ok(cc),
    }
}

fn sweep_family(fam: &FamilyArgs) -> Result<SweepFamily> {
    match fam.family {
        FamilyKind::Collinear3 => Ok(SweepFamily::CollinearEqual),
        FamilyKind::Collinear3M2 => Ok(SweepFamily::CollinearM2 { m1: fam.m1 }),
        FamilyKind::Ngon => Ok(SweepFamily::Ngon { n: fam.n, dim: fam.dim.unwrap_or(3) }),
        FamilyKind::File => Err(NcolError::Parse("sweeps need a named family".into())),
    }
}

fn emit_rows<T: serde::Serialize>(out: &OutArgs, format: Format, rows: &[T]) -> Result<()> {
    match format {
        Format::Csv => write_rows(sink(out)?, rows),
        Format::Json => emit_json(out, &serde_json::to_value(rows)?),
    }
}

fn cmd_central(fam: &FamilyArgs, out: &OutArgs) -> Result<i32> {
    let cc = resolve(fam)?;
    emit_json(out, &serde_json::to_value(ConfigFile::from_central(&cc))?)?;
    Ok(if cc.residual < cc.residual_tolerance() { 0 } else { 2 })
}

fn cmd_spectral(fam: &FamilyArgs, out: &OutArgs) -> Result<i32> {
    let cc = resolve(fam)?;
    let r = smallest_eigenvalue(&cc)?;
    emit_json(
        out,
        &json!({
            "alpha": r.alpha,
            "family": r.family.as_str(),
            "N": r.n,
            "dim": r.dim,
            "b": r.b,
            "mu1": r.mu1,
            "margin": r.margin,
            "satisfied": r.satisfied,
            "eigenspace_dim": r.eigenspace.len(),
            "eigvec": r.eigvec.flat(),
        }),
    )?;
    Ok(0)
}

fn cmd_threshold(fam: &FamilyArgs, out: &OutArgs) -> Result<i32> {
    let (name, t) = match fam.family {
        FamilyKind::Collinear3 => ("collinear3", collinear_threshold()?),
        FamilyKind::Collinear3M2 => ("collinear3-m2", collinear_unequal_threshold(fam.m1)?),
        FamilyKind::Ngon => ("ngon", ngon_threshold(fam.n)?),
        FamilyKind::File => return Err(NcolError::Parse("thresholds need a named family".into())),
    };
    let mut v = serde_json::to_value(t)?;
    v["family"] = json!(name);
    emit_json(out, &v)?;
    Ok(if t.alpha_star.is_some() { 0 } else { 2 })
}

fn cmd_sweep(fam: &FamilyArgs, lo: f64, hi: f64, steps: usize, format: Format, out: &OutArgs) -> Result<i32> {
    if steps == 0 || !(lo < hi) {
        return Err(NcolError::Parse(format!("empty alpha range [{lo}, {hi}] with {steps} steps")));
    }
    Alpha::new(lo)?;
    Alpha::new(hi)?;
    let alphas = crate::roots::linspace(lo, hi, steps);
    let rows = sweep(sweep_family(fam)?, &alphas)?;
    emit_rows(out, format, &rows)?;
    Ok(0)
}

fn cmd_figure1(format: Format, out: &OutArgs) -> Result<i32> {
    let rows = sweep(SweepFamily::CollinearEqual, &figure1_grid())?;
    emit_rows(out, format, &rows)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    fam: &FamilyArgs,
    energy: f64,
    tau_max: f64,
    rho_min: f64,
    grid: Option<f64>,
    rtol: f64,
    drift_tol: f64,
    out: &OutArgs,
) -> Result<i32> {
    let cc = resolve(fam)?;
    let init = homothetic_initial(&cc, energy, 1.0)?;
    let opts = SimOptions {
        tau_max,
        rtol,
        rho_min: (rho_min > 0.0).then_some(rho_min),
        grid,
        ..Default::default()
    };
    let traj = integrate_el(&init, &cc.masses, cc.alpha, &opts)?;
    write_trajectory(sink(out)?, &traj)?;
    let drift = traj.max_scaled_energy_drift();
    let constraint = traj.max_constraint_drift();
    eprintln!(
        "{}",
        json!({"states": traj.len(), "tau_final": traj.tau.last(), "energy_drift": drift, "constraint_drift": constraint})
    );
    Ok(if drift <= drift_tol && constraint <= 1e-9 { 0 } else { 2 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_morse(
    fam: &FamilyArgs,
    bumps: usize,
    l1: f64,
    width: f64,
    start: f64,
    profile: ProfileKind,
    flat: f64,
    energy: f64,
    tol: f64,
    out: &OutArgs,
) -> Result<i32> {
    let cc = resolve(fam)?;
    let rep = smallest_eigenvalue(&cc)?;
    let l2 = l1 + width;
    let shifts = default_shifts(bumps, l1, l2, start);
    let horizon = shifts.last().copied().unwrap_or(start) + l2 + 1.0;
    let init = homothetic_initial(&cc, energy, 1.0)?;
    let opts = SimOptions { tau_max: horizon, rho_min: None, ..Default::default() };
    let traj = integrate_el(&init, &cc.masses, cc.alpha, &opts)?;
    let profile = match profile {
        ProfileKind::Flat => Profile::FlatTop { flat },
        ProfileKind::Exp => Profile::Exp,
    };
    let quad = QuadOptions { tol, ..Default::default() };
    let r = morse_witnesses(&traj, &rep.eigvec, &shifts, l1, l2, profile, &quad)?;
    let mut v = serde_json::to_value(&r)?;
    v["alpha"] = json!(cc.alpha.get());
    v["margin"] = json!(rep.margin);
    emit_json(out, &v)?;
    Ok(if r.block_error <= 1e-10 { 0 } else { 2 })
}

fn cmd_weakforce(
    fam: &FamilyArgs,
    alphas: Option<&[f64]>,
    eps: f64,
    perturb: f64,
    grid: f64,
    out: &OutArgs,
) -> Result<i32> {
    let cc = resolve(fam)?;
    let alphas = alphas.unwrap_or(&ALPHA_GRID);
    let s_prime = if perturb != 0.0 {
        let e = smallest_eigenvalue(&cc)?.eigvec;
        let n = crate::nbody::mass_inner(&cc.masses, cc.dim(), e.flat(), e.flat()).sqrt();
        TangentVector::new(cc.dim(), e.flat().iter().map(|x| perturb * x / n).collect())?
    } else {
        TangentVector::zeros(cc.dim(), cc.n())
    };
    let opts = WeakOptions { grid, ..Default::default() };
    let family = ScaledFamily::build(&cc.s0, &s_prime, &cc.masses, alphas, &opts)?;
    write_rows(sink(out)?, &family_report(&family, eps))?;
    let gamma_err = family.runs.iter().map(|r| gamma_trace(r).identity_error).fold(0.0, crate::worst);
    let e1 = check_esplode1(&family, eps);
    let e2 = check_esplode2(&family, eps);
    let decreasing = family.radially_decreasing();
    eprintln!(
        "{}",
        json!({
            "gamma_identity_error": gamma_err,
            "radially_decreasing": decreasing,
            "esplode1": e1.found(),
            "esplode2": e2.finder.found(),
            "uniform_collapse": family.uniform_collapse(&[0.5, 0.1, 0.01]),
        })
    );
    Ok(if gamma_err <= 1e-6 && decreasing { 0 } else { 2 })
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Central { fam, out } => cmd_central(fam, out),
        Command::Spectral { fam, out } => cmd_spectral(fam, out),
        Command::Threshold { fam, out } => cmd_threshold(fam, out),
        Command::Sweep { fam, alpha_min, alpha_max, steps, format, out } => {
            cmd_sweep(fam, *alpha_min, *alpha_max, *steps, *format, out)
        }
        Command::Figure1 { format, out } => cmd_figure1(*format, out),
        Command::Simulate { fam, energy, tau_max, rho_min, grid, rtol, drift_tol, out } => {
            cmd_simulate(fam, *energy, *tau_max, *rho_min, *grid, *rtol, *drift_tol, out)
        }
        Command::Morse { fam, bumps, l1, width, start, profile, flat, energy, tol, out } => {
            cmd_morse(fam, *bumps, *l1, *width, *start, *profile, *flat, *energy, *tol, out)
        }
        Command::Weakforce { fam, alphas, eps, perturb, grid, out } => {
            cmd_weakforce(fam, alphas.as_deref(), *eps, *perturb, *grid, out)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("NCOL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // A pool may already exist when called more than once in a process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
