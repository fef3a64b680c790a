//! `rupture` — command-line front end for the rupture-solution toolkit.
//!
//! Thin wrappers over the library: classification queries (`classify`,
//! `regions`), the period and energy theory (`period`, `profile`,
//! `energy`, `sweep`), cylinder connection runs (`connect`), and a
//! cross-module identity suite (`verify`).
//!
//! Conventions shared by every subcommand:
//!
//! - results go to standard output, or to `--output PATH`; a relative
//!   PATH is placed under `$RUPTURE_OUT_DIR` when that variable is set;
//! - CSV files carry a header row and 17-significant-digit values; JSON
//!   documents follow the schemas shipped under `docs/schema/`;
//! - exit codes: 0 ok, 1 failed checks or numerical non-convergence,
//!   2 usage errors (bad flags, malformed grids, out-of-domain numbers);
//! - output is deterministic for fixed inputs.

mod verify;

use clap::{Args, Parser, Subcommand};
use rupture_core::classify::{classify, in_m_explicit};
use rupture_core::cylinder::{connect, default_t_half, discrete_equilibrium};
use rupture_core::energy::{log_grid, monotonicity_sweep, report};
use rupture_core::params::ProblemParams;
use rupture_core::period::{half_period, period_limits};
use rupture_core::profile::{build_profile, p3_family, trivial_profile, OrbitProfile};
use rupture_core::Error;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable naming the directory that relative `--output`
/// paths are resolved against.
const OUT_DIR_ENV: &str = "RUPTURE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "rupture",
    version,
    about = "Structure theory of MEMS rupture solutions: classification, \
             periodic profiles, period/energy functions, cylinder connections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the solution structure at one (α, p): kind, N₀, admissible
    /// frequencies, the J-interval (JSON).
    Classify(ClassifyArgs),
    /// Rasterize a parameter window into the raw data behind the region
    /// picture (CSV: alpha,p,in_M,n0).
    Regions(RegionsArgs),
    /// Half-period L(τ) of one orbit together with the τ→1 and τ→∞
    /// limits (JSON).
    Period(PeriodArgs),
    /// Sample one periodic profile w(θ) on a uniform grid (CSV: theta,w).
    Profile(ProfileArgs),
    /// Energy report at one τ: F (or F₁), H, both energy routes, L (JSON).
    Energy(EnergyArgs),
    /// Sweep F (or F₁) and E over a log-spaced τ-grid with a
    /// monotonicity verdict (CSV: tau,F,E or tau,F1,E).
    Sweep(SweepArgs),
    /// Solve the truncated-cylinder connection problem between two
    /// boundary profiles (JSON summary, optional field CSV).
    Connect(ConnectArgs),
    /// Run the cross-module identity suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
}

/// The parameter triple, shared by every computing subcommand.
#[derive(Args)]
struct ParamArgs {
    /// Radial weight exponent α (must be > −2).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Negative exponent p (must be > 0).
    #[arg(long)]
    p: f64,
    /// Coupling λ (must be > 0; F, F₁ and L do not depend on it).
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

impl ParamArgs {
    fn build(&self) -> CliResult<ProblemParams> {
        ProblemParams::new(self.alpha, self.p, self.lambda).map_err(Failure::usage)
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RegionsArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha_max: f64,
    #[arg(long)]
    p_min: f64,
    #[arg(long)]
    p_max: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PeriodArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Amplitude ratio τ ≥ 1.
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Which profile: `trivial`, `jN` (N an admissible frequency), or
    /// `p3:EPS:A` (the explicit p = 3 family).
    #[arg(long)]
    spec: String,
    /// Number of θ-grid points.
    #[arg(long, default_value_t = 2048)]
    n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Amplitude ratio τ ≥ 1.
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// τ-grid as `min:max:count`, log-spaced.
    #[arg(long)]
    tau: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConnectArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Boundary profile at t = −T (`trivial`, `jN`, or `p3:EPS:A`).
    #[arg(long)]
    left: String,
    /// Boundary profile at t = +T.
    #[arg(long)]
    right: String,
    /// Cylinder half-length T (default 12/min(β,1)).
    #[arg(long)]
    t_half: Option<f64>,
    /// t-grid intervals (must be even).
    #[arg(long, default_value_t = 400)]
    nt: usize,
    /// θ-grid points.
    #[arg(long, default_value_t = 128)]
    ntheta: usize,
    /// Use the profiles exactly as sampled instead of polishing them to
    /// the discrete angular equilibrium first. Raw continuum samples
    /// violate the discrete θ-equation at O(hθ²) and generically make
    /// equal-boundary runs non-convergent; this flag exists to observe
    /// exactly that.
    #[arg(long)]
    raw: bool,
    /// Also write the solved field (CSV t,theta,v) to this path when a
    /// field exists.
    #[arg(long)]
    field_csv: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Emit the report as a JSON array instead of one line per check.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// What a failed run means for the exit code.
enum Failure {
    /// Bad request: malformed flags, out-of-domain numbers, broken grids.
    Usage(String),
    /// The computation itself failed (quadrature or integrator gave up).
    Numerical(String),
    /// `verify` ran and at least one check failed.
    ChecksFailed,
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::InvalidGrid(_)
            | Error::PeriodOutOfRange { .. }
            | Error::NotAdmissible { .. }
            | Error::ComponentOutOfRange { .. } => Failure::Usage(e.to_string()),
            Error::QuadratureNonConvergence { .. } | Error::IntegratorFailure { .. } => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(()) => 0,
        Err(Failure::ChecksFailed) => 1,
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Classify(args) => cmd_classify(args),
        Command::Regions(args) => cmd_regions(args),
        Command::Period(args) => cmd_period(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Energy(args) => cmd_energy(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Connect(args) => cmd_connect(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

// ---------------------------------------------------------------- output

/// Resolve a relative `--output` path against `$RUPTURE_OUT_DIR`.
fn resolve_output(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

/// Write to the chosen destination in one shot (stdout when no path).
fn write_output(output: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match output {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let path = resolve_output(path);
            std::fs::write(&path, content)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

// --------------------------------------------------------------- profiles

/// Parse a profile selector: `trivial`, `jN`, or `p3:EPS:A`.
fn build_profile_spec(spec: &str, params: &ProblemParams, n: usize) -> CliResult<OrbitProfile> {
    if spec == "trivial" {
        return Ok(trivial_profile(params, n)?);
    }
    if let Some(freq) = spec.strip_prefix('j') {
        let j: u32 = freq
            .parse()
            .map_err(|_| Failure::Usage(format!("bad profile spec `{spec}` (want jN)")))?;
        return Ok(build_profile(j, params, n)?);
    }
    if let Some(rest) = spec.strip_prefix("p3:") {
        let (eps, a) = rest
            .split_once(':')
            .and_then(|(e, a)| Some((e.parse::<f64>().ok()?, a.parse::<f64>().ok()?)))
            .ok_or_else(|| Failure::Usage(format!("bad profile spec `{spec}` (want p3:EPS:A)")))?;
        return Ok(p3_family(eps, a, params, n)?);
    }
    Err(Failure::Usage(format!(
        "unknown profile spec `{spec}` (want `trivial`, `jN`, or `p3:EPS:A`)"
    )))
}

// ------------------------------------------------------------ subcommands

fn cmd_classify(args: ClassifyArgs) -> CliResult<()> {
    let params = args.params.build()?;
    write_output(&args.output, &to_json(&classify(&params)))
}

fn cmd_regions(args: RegionsArgs) -> CliResult<()> {
    if !(args.alpha_min > -2.0 && args.alpha_max > args.alpha_min) {
        return Err(Failure::Usage(format!(
            "alpha window must satisfy −2 < min < max (got {}..{})",
            args.alpha_min, args.alpha_max
        )));
    }
    if !(args.p_min > 0.0 && args.p_max > args.p_min) {
        return Err(Failure::Usage(format!(
            "p window must satisfy 0 < min < max (got {}..{})",
            args.p_min, args.p_max
        )));
    }
    if args.n < 2 {
        return Err(Failure::Usage(format!("need at least 2 grid points per axis (got {})", args.n)));
    }

    let coord = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (args.n - 1) as f64;
    let mut csv = String::from("alpha,p,in_M,n0\n");
    for i in 0..args.n {
        let alpha = coord(args.alpha_min, args.alpha_max, i);
        for k in 0..args.n {
            let p = coord(args.p_min, args.p_max, k);
            let params = ProblemParams::new(alpha, p, 1.0).map_err(Failure::usage)?;
            let descriptor = classify(&params);
            writeln!(
                csv,
                "{alpha:.16e},{p:.16e},{},{}",
                in_m_explicit(&params),
                descriptor.n0
            )
            .expect("write to string");
        }
    }
    write_output(&args.output, &csv)
}

#[derive(Serialize)]
struct PeriodOut {
    tau: f64,
    half_period: f64,
    beta_half_period: f64,
    /// L(τ→1⁺) = π/(β√(p+1)).
    limit_tau_to_one: f64,
    /// L(τ→∞) = π/(β·min{p+1, 2}).
    limit_tau_to_infinity: f64,
}

fn cmd_period(args: PeriodArgs) -> CliResult<()> {
    let params = args.params.build()?;
    let l = half_period(args.tau, &params)?;
    let (l1, linf) = period_limits(&params);
    let out = PeriodOut {
        tau: args.tau,
        half_period: l,
        beta_half_period: params.beta * l,
        limit_tau_to_one: l1,
        limit_tau_to_infinity: linf,
    };
    write_output(&args.output, &to_json(&out))
}

fn cmd_profile(args: ProfileArgs) -> CliResult<()> {
    let params = args.params.build()?;
    let profile = build_profile_spec(&args.spec, &params, args.n)?;
    let mut csv = String::from("theta,w\n");
    for (theta, w) in profile.thetas.iter().zip(&profile.values) {
        writeln!(csv, "{theta:.16e},{w:.16e}").expect("write to string");
    }
    write_output(&args.output, &csv)
}

fn cmd_energy(args: EnergyArgs) -> CliResult<()> {
    let params = args.params.build()?;
    write_output(&args.output, &to_json(&report(args.tau, &params)?))
}

/// Parse a τ-grid spec `min:max:count`.
fn parse_tau_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::Usage(format!("bad τ-grid `{spec}` (want min:max:count)"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo >= 1.0) {
        return Err(Failure::Usage(format!("τ-grid must start at τ ≥ 1 (got {lo})")));
    }
    Ok(log_grid(lo, hi, count)?)
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    let params = args.params.build()?;
    let grid = parse_tau_grid(&args.tau)?;
    let table = monotonicity_sweep(&params, &grid)?;

    let mut csv = String::new();
    csv.push_str(if table.uses_f1 { "tau,F1,E\n" } else { "tau,F,E\n" });
    for row in &table.rows {
        writeln!(csv, "{:.16e},{:.16e},{:.16e}", row.tau, row.f, row.energy)
            .expect("write to string");
    }
    write_output(&args.output, &csv)?;
    // Verdict as a side note so the CSV stream stays clean.
    eprintln!(
        "trend {:?}: {} violation(s) on {} rows",
        table.expected,
        table.violations.len(),
        table.rows.len()
    );
    Ok(())
}

fn cmd_connect(args: ConnectArgs) -> CliResult<()> {
    let params = args.params.build()?;
    let polish = |prof: OrbitProfile| -> CliResult<OrbitProfile> {
        if args.raw {
            Ok(prof)
        } else {
            Ok(discrete_equilibrium(&prof, &params)?)
        }
    };
    let left = polish(build_profile_spec(&args.left, &params, args.ntheta)?)?;
    let right = polish(build_profile_spec(&args.right, &params, args.ntheta)?)?;
    let t_half = args.t_half.unwrap_or_else(|| default_t_half(&params));

    let report = connect(&left, &right, t_half, args.nt, args.ntheta, &params)?;

    if let (Some(path), Some(field)) = (&args.field_csv, &report.field) {
        let path = resolve_output(path);
        let mut buf = Vec::new();
        field.write_csv(&mut buf).expect("write to memory");
        std::fs::write(&path, buf)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    write_output(&args.output, &to_json(&report.summary()))
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let checks = verify::run_all();
    if args.json {
        write_output(&args.output, &to_json(&checks))?;
    } else {
        let mut text = String::new();
        for check in &checks {
            writeln!(
                text,
                "{} {} — {}",
                if check.pass { "PASS" } else { "FAIL" },
                check.name,
                check.detail
            )
            .expect("write to string");
        }
        write_output(&args.output, &text)?;
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
