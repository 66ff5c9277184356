use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lagspec::duistermaat::{
    duistermaat_index, verify_identities, verify_krein, verify_one_sided_limits, DuistermaatError, VerifyReport,
};
use lagspec::linalg::ToleranceConfig;
use lagspec::maslov::{uniform_grid, verify_hormander, MaslovError};
use lagspec::models::checks::{pinned_deviation, sweep, sweep_csv, verify_models, SweepFamily};
use lagspec::models::spectrum::{
    eigenvalues, shift_direct_one_sided, sigma_bounds, spectral_shift_predicted, Extension,
};
use lagspec::models::{BcName, IntervalProblem, ModelError, Potential};
use lagspec::symplectic::{plane_from_json, LagrangianPlane, SymplecticError};

#[derive(Parser, Debug)]
#[command(name = "lagspec", version, about = "Duistermaat and Maslov indices, spectral shifts and interlacing checks")]
struct Cli {
    /// Master seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TolArgs {
    #[arg(long, global = true)]
    rank_rel_tol: Option<f64>,
    #[arg(long, global = true)]
    inertia_zero_tol: Option<f64>,
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    #[arg(long, global = true)]
    lagrangian_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Interval length.
    #[arg(long = "len", default_value_t = 1.0)]
    length: f64,
    /// `zero`, `const:<c>`, or a CSV file with header `x,q`.
    #[arg(long, default_value = "zero")]
    potential: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// iD(L1, L2, L3) of three planes given as JSON files.
    Index { l1: PathBuf, l2: PathBuf, l3: PathBuf },
    /// Eigenvalues of one extension in a window, as CSV.
    Spectrum {
        #[arg(long)]
        bc: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, required = true)]
        window: Vec<f64>,
    },
    /// Spectral shift between two extensions at λ, directly and from indices.
    Shift {
        #[arg(long)]
        bc1: String,
        #[arg(long)]
        bc2: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s2: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Randomized verification suites with a JSON report.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest dimension n; plane suites run `trials` trials for each n = 1..=n_max.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Lowest eigenvalues along a one-parameter boundary family, as CSV.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long, num_args = 3, value_names = ["A", "B", "STEPS"], allow_negative_numbers = true, required = true)]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Identities,
    Limits,
    Hormander,
    Krein,
    Models,
}

/// Outcome categories and their exit codes.
#[derive(Debug)]
enum Failure {
    Verification(String),
    Config(String),
    Epsilon(String),
    Crossing(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Verification(_) => 1,
            Self::Config(_) => 2,
            Self::Epsilon(_) => 3,
            Self::Crossing(_) => 4,
            Self::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Verification(m) | Self::Config(m) | Self::Epsilon(m) | Self::Crossing(m) | Self::Internal(m) => m,
        }
    }
}

fn from_symplectic(e: SymplecticError) -> Failure {
    Failure::Config(e.to_string())
}

fn from_duistermaat(e: DuistermaatError) -> Failure {
    let msg = e.to_string();
    match e {
        DuistermaatError::NoAdmissibleEpsilon | DuistermaatError::EpsilonInExceptionSet { .. } => Failure::Epsilon(msg),
        DuistermaatError::DimensionMismatch(_) | DuistermaatError::Symplectic(_) => Failure::Config(msg),
        _ => Failure::Internal(msg),
    }
}

fn from_maslov(e: MaslovError) -> Failure {
    let msg = e.to_string();
    match e {
        MaslovError::UnresolvedCrossing { .. } | MaslovError::NonIsolated { .. } => Failure::Crossing(msg),
        MaslovError::InvalidDomain(..) => Failure::Config(msg),
        MaslovError::Duistermaat(d) => from_duistermaat(d),
        _ => Failure::Internal(msg),
    }
}

fn from_model(e: ModelError) -> Failure {
    let msg = e.to_string();
    match e {
        ModelError::InvalidPotential(_) | ModelError::InvalidProblem(_) | ModelError::UnknownBc(_) => Failure::Config(msg),
        ModelError::Maslov(m) => from_maslov(m),
        ModelError::Duistermaat(d) => from_duistermaat(d),
        ModelError::Symplectic(s) => from_symplectic(s),
        _ => Failure::Internal(msg),
    }
}

fn tolerances(t: &TolArgs) -> Result<ToleranceConfig, Failure> {
    let mut tol = ToleranceConfig::default();
    if let Some(v) = t.rank_rel_tol {
        tol.rank_rel_tol = v;
    }
    if let Some(v) = t.inertia_zero_tol {
        tol.inertia_zero_tol = v;
    }
    if let Some(v) = t.root_tol {
        tol.root_tol = v;
    }
    if let Some(v) = t.lagrangian_tol {
        tol.lagrangian_tol = v;
    }
    tol.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(tol)
}

fn problem(m: &ModelArgs) -> Result<IntervalProblem, Failure> {
    let potential = match m.potential.as_str() {
        "zero" => Potential::Zero,
        spec if spec.starts_with("const:") => {
            let c = spec["const:".len()..].parse::<f64>().map_err(|e| Failure::Config(format!("potential {spec:?}: {e}")))?;
            Potential::Constant(c)
        }
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("reading {path}: {e}")))?;
            Potential::from_csv(&text).map_err(from_model)?
        }
    };
    IntervalProblem::new(m.length, potential).map_err(from_model)
}

fn extension(p: &IntervalProblem, bc: &str, s: f64) -> Result<Extension, Failure> {
    let name: BcName = bc.parse().map_err(from_model)?;
    Extension::catalog(p.clone(), name, s).map_err(from_model)
}

fn read_plane(path: &PathBuf, tol: &ToleranceConfig) -> Result<LagrangianPlane, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("reading {}: {e}", path.display())))?;
    plane_from_json(&text, tol).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_index(paths: [&PathBuf; 3], tol: &ToleranceConfig) -> Result<String, Failure> {
    let [l1, l2, l3] = paths.map(|p| read_plane(p, tol));
    let (l1, l2, l3) = (l1?, l2?, l3?);
    if l1.n() != l2.n() || l1.n() != l3.n() {
        return Err(Failure::Config("planes must have equal n".into()));
    }
    let id123 = duistermaat_index(&l1, &l2, &l3, tol).map_err(from_duistermaat)?;
    let id213 = duistermaat_index(&l2, &l1, &l3, tol).map_err(from_duistermaat)?;
    let d12 = l1.intersection_dim(&l2, tol).map_err(from_symplectic)?;
    if id123 + id213 != l1.n() - d12 {
        return Err(Failure::Internal(format!("swap identity violated: {id123} + {id213} != {} - {d12}", l1.n())));
    }
    let mut out = String::new();
    writeln!(out, "{id123}").unwrap();
    writeln!(out, "iD(L1,L2,L3) = {id123}").unwrap();
    writeln!(out, "iD(L2,L1,L3) = {id213}").unwrap();
    writeln!(out, "dim(L1∩L2) = {d12}").unwrap();
    writeln!(out, "swap identity: PASS").unwrap();
    Ok(out)
}

fn cmd_spectrum(bc: &str, s: f64, model: &ModelArgs, window: &[f64], tol: &ToleranceConfig) -> Result<String, Failure> {
    let (a, b) = (window[0], window[1]);
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Failure::Config(format!("invalid window [{a}, {b}]")));
    }
    let e = extension(&problem(model)?, bc, s)?;
    let slice = eigenvalues(&e, a, b, tol).map_err(from_model)?;
    let mut out = String::from("lambda,multiplicity\n");
    for (l, m) in slice.eigenvalues {
        writeln!(out, "{l},{m}").unwrap();
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_shift(bc1: &str, s1: f64, bc2: &str, s2: f64, lambda: f64, model: &ModelArgs, tol: &ToleranceConfig) -> Result<String, Failure> {
    if !lambda.is_finite() {
        return Err(Failure::Config("lambda must be finite".into()));
    }
    let p = problem(model)?;
    let (e1, e2) = (extension(&p, bc1, s1)?, extension(&p, bc2, s2)?);
    let (left, right) = shift_direct_one_sided(&e1, &e2, lambda, tol).map_err(from_model)?;
    let predicted = spectral_shift_predicted(&e1, &e2, lambda, tol).map_err(from_model)?;
    let (sm, sp) = sigma_bounds(&e1.plane, &e2.plane, tol).map_err(from_model)?;
    let mut out = String::new();
    writeln!(out, "shift_direct = {right}").unwrap();
    writeln!(out, "shift_predicted = {}", predicted.right).unwrap();
    if predicted.on_spectrum {
        writeln!(out, "shift_direct_left = {left}").unwrap();
        writeln!(out, "shift_predicted_left = {}", predicted.left).unwrap();
    }
    writeln!(out, "sigma_minus = {sm}").unwrap();
    writeln!(out, "sigma_plus = {sp}").unwrap();
    let within = |v: i64| -(sm as i64) <= v && v <= sp as i64;
    writeln!(out, "bound: {}", pass(within(right) && within(left))).unwrap();
    if (left, right) != (predicted.left, predicted.right) {
        return Err(Failure::Internal(format!(
            "{out}direct shift ({left}, {right}) disagrees with predicted ({}, {})",
            predicted.left, predicted.right
        )));
    }
    Ok(out)
}

#[derive(Serialize)]
struct SuiteReport {
    suite: Suite,
    seed: u64,
    trials: usize,
    reports: BTreeMap<String, VerifyReport>,
    failures: usize,
}

fn cmd_verify(suite: Suite, trials: usize, n_max: usize, seed: u64, tol: &ToleranceConfig) -> Result<String, Failure> {
    if n_max == 0 {
        return Err(Failure::Config("--n-max must be at least 1".into()));
    }
    let mut reports = BTreeMap::new();
    if let Suite::Models = suite {
        reports.insert("interval".to_string(), verify_models(trials, seed, tol));
    } else {
        for n in 1..=n_max {
            let r = match suite {
                Suite::Identities => verify_identities(n, trials, seed, tol),
                Suite::Limits => verify_one_sided_limits(n, trials, seed, tol),
                Suite::Hormander => verify_hormander(n, trials, seed, tol),
                Suite::Krein => verify_krein(n, trials, seed, tol),
                Suite::Models => unreachable!(),
            };
            reports.insert(format!("n={n}"), r);
        }
    }
    let failures = reports.values().map(VerifyReport::total_failures).sum();
    let report = SuiteReport { suite, seed, trials, reports, failures };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if failures > 0 {
        return Err(Failure::Verification(text));
    }
    Ok(text)
}

fn cmd_sweep(family: &str, grid: &[f64], kmax: usize, model: &ModelArgs, tol: &ToleranceConfig) -> Result<String, Failure> {
    let family: SweepFamily = family.parse().map_err(from_model)?;
    let (a, b, steps) = (grid[0], grid[1], grid[2]);
    if !(a.is_finite() && b.is_finite() && a <= b) || steps < 1.0 || steps.fract() != 0.0 || kmax == 0 {
        return Err(Failure::Config("grid needs finite a <= b, a positive integer step count, and kmax >= 1".into()));
    }
    let p = problem(model)?;
    let s_grid = uniform_grid(a, b, steps as usize);
    let rows = sweep(&p, family, &s_grid, kmax, tol).map_err(from_model)?;
    if let SweepFamily::DeltaPrime = family {
        if matches!(p.potential(), Potential::Zero | Potential::Constant(_)) {
            let dev = pinned_deviation(&p, &rows, tol).map_err(from_model)?;
            if dev > 1e-6 {
                return Err(Failure::Internal(format!("even branches moved off the antiperiodic values by {dev:e}")));
            }
        }
    }
    Ok(sweep_csv(&rows))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let tol = tolerances(&cli.tol)?;
    match &cli.command {
        Command::Index { l1, l2, l3 } => cmd_index([l1, l2, l3], &tol),
        Command::Spectrum { bc, s, model, window } => cmd_spectrum(bc, *s, model, window, &tol),
        Command::Shift { bc1, bc2, s1, s2, lambda, model } => cmd_shift(bc1, *s1, bc2, *s2, *lambda, model, &tol),
        Command::Verify { suite, trials, n_max } => cmd_verify(*suite, *trials, *n_max, cli.seed, &tol),
        Command::Sweep { family, grid, kmax, model } => cmd_sweep(family, grid, *kmax, model, &tol),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Config(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| emit(&cli, &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(report)) => {
            let _ = emit(&cli, &report);
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
