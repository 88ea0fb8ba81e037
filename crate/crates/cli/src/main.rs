#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fwlab::harness::{emit_report, io, run_comparison, run_sweep, to_csv, to_json, ReportFormat};
use fwlab::models::{ModelSpec, Potential};
use fwlab::{ComparisonReport, FwError, Method, StepwiseConfig, ToleranceConfig};

const METHODS_HELP: &str = "\
Methods:
  eriksen     U = ½(1 + βλ)·[½ + ¼(βλ + λβ)]^(-1/2) with λ = H(H²)^(-1/2);
              satisfies βU = U†β exactly
  eriksenalt  the same operator as (1 + βλ)·((1 + βλ)†(1 + βλ))^(-1/2)
  exactcase   closed form for [E, O] = 0: U = (ε + m + βO)/√(2ε(ε + m)),
              ε = √(m² + O²), giving H_FW = βε + E; fails with NotCommuting otherwise
  stepwise    repeated rotations exp(βO_k/2m) removing the odd part step by step
  weakfield   λ ≈ H·R⁻¹ with the weak-field root
              R = ε + ¼{ε⁻¹, {βm + O, E}} − ⅛{(βm + O)ε⁻¹, [ε, [ε, E]]}

Exit status: 0 on success, 1 on usage or model errors, 2 if any method failed.
FWLAB_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "fwlab", version, about = "Exact and stepwise Foldy–Wouthuysen transforms of Dirac-type Hamiltonians")]
#[command(after_help = METHODS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free particle H = βm + α·p (4×4)
    #[command(after_help = METHODS_HELP)]
    Free(FreeArgs),
    /// One-dimensional lattice Dirac operator with a scalar potential
    #[command(after_help = METHODS_HELP)]
    Lattice(LatticeCmd),
    /// Explicit Hermitian matrix read from a file
    #[command(after_help = METHODS_HELP)]
    Matrix(MatrixArgs),
    /// Lattice runs over a list of potential strengths with convergence orders
    #[command(after_help = METHODS_HELP)]
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated methods to run
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "eriksen,eriksenalt,exactcase,stepwise,weakfield")]
    methods: Vec<Method>,
    /// Stepwise stopping tolerance on ‖H_odd‖/‖H‖
    #[arg(long, default_value_t = StepwiseConfig::default().tol)]
    tol: f64,
    /// Stepwise iteration cap
    #[arg(long = "max-iter", default_value_t = StepwiseConfig::default().max_iterations)]
    max_iter: usize,
    /// Record per-method wall time (makes reports non-reproducible)
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct OutputArgs {
    /// Report file; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
}

#[derive(Args)]
struct FreeArgs {
    /// Particle mass
    #[arg(long, allow_negative_numbers = true)]
    mass: f64,
    /// Momentum components x,y,z
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Vec<f64>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct LatticeArgs {
    /// Number of sites (even, at least 4)
    #[arg(long)]
    n: usize,
    /// Box half-width; sites sit at x_j = -L + (j + ½)·2L/n
    #[arg(long = "L", allow_negative_numbers = true)]
    half_width: f64,
    /// Particle mass
    #[arg(long, allow_negative_numbers = true)]
    mass: f64,
    /// zero, constant:c, gaussian:g,width, step:g,edge, linear:g or file:path
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    potential: String,
    /// Seed recorded in the report
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct LatticeCmd {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Also write the Hamiltonian as a matrix file
    #[arg(long = "save-matrix")]
    save_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    /// Matrix file: `dim upper_dim` header, then rows of a+bj entries
    #[arg(long)]
    file: PathBuf,
    /// Mass used to split off the βm term
    #[arg(long, allow_negative_numbers = true)]
    mass: f64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Swept parameter: the potential strength
    #[arg(long, value_parser = ["g"], default_value = "g")]
    param: String,
    /// Comma-separated positive values
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    values: Vec<f64>,
    /// Output directory for per-value reports and summary.json
    #[arg(long)]
    out: PathBuf,
    /// Per-value report format
    #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Model(FwError),
}

impl From<FwError> for Failure {
    fn from(e: FwError) -> Self {
        Failure::Model(e)
    }
}

impl RunArgs {
    fn methods(&self) -> BTreeSet<Method> {
        self.methods.iter().copied().collect()
    }

    fn tolerances(&self) -> Result<ToleranceConfig, Failure> {
        if !(self.tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(ToleranceConfig {
            stepwise: StepwiseConfig {
                tol: self.tol,
                max_iterations: self.max_iter,
            },
            record_timings: self.timings,
            ..ToleranceConfig::default()
        })
    }
}

impl LatticeArgs {
    fn spec(&self) -> Result<ModelSpec, Failure> {
        let potential = Potential::parse(&self.potential)?;
        Ok(ModelSpec {
            seed: self.seed,
            ..ModelSpec::lattice(self.n, self.half_width, self.mass, potential)
        })
    }
}

fn format_of(name: &str) -> ReportFormat {
    name.parse().expect("clap restricts the format")
}

fn check_mass(mass: f64) -> Result<(), Failure> {
    if mass > 0.0 && mass.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--mass must be positive, got {mass}")))
    }
}

fn write_report(report: &ComparisonReport, output: &OutputArgs) -> Result<(), Failure> {
    let format = format_of(&output.format);
    match &output.out {
        Some(path) => emit_report(report, format, path)?,
        None => match format {
            ReportFormat::Json => print!("{}", to_json(report)?),
            ReportFormat::Csv => print!("{}", to_csv(report)?),
        },
    }
    Ok(())
}

fn compare(spec: &ModelSpec, run: &RunArgs, output: &OutputArgs) -> Result<bool, Failure> {
    let tol = run.tolerances()?;
    let report = run_comparison(spec, &run.methods(), &tol)?;
    write_report(&report, output)?;
    Ok(report.has_errors())
}

/// File name for one sweep value; `{:?}` keeps distinct values distinct.
fn sweep_file(dir: &Path, value: f64, format: ReportFormat) -> PathBuf {
    let ext = match format {
        ReportFormat::Json => "json",
        ReportFormat::Csv => "csv",
    };
    dir.join(format!("g_{value:?}.{ext}"))
}

fn sweep(args: &SweepArgs) -> Result<bool, Failure> {
    check_mass(args.lattice.mass)?;
    let base = args.lattice.spec()?;
    let tol = args.run.tolerances()?;
    let outcome = run_sweep(&base, &args.values, &args.run.methods(), &tol)?;
    std::fs::create_dir_all(&args.out).map_err(FwError::from)?;
    let format = format_of(&args.format);
    for (value, report) in args.values.iter().zip(&outcome.reports) {
        emit_report(report, format, sweep_file(&args.out, *value, format))?;
    }
    io::write_atomic(args.out.join("summary.json"), to_json(&outcome.summary)?.as_bytes())?;
    Ok(outcome.reports.iter().any(|r| r.has_errors()))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Free(a) => {
            check_mass(a.mass)?;
            let [x, y, z] = a.p[..] else {
                return Err(Failure::Usage(format!("--p needs three components, got {}", a.p.len())));
            };
            compare(&ModelSpec::free_particle(a.mass, [x, y, z]), &a.run, &a.output)
        }
        Command::Lattice(a) => {
            check_mass(a.lattice.mass)?;
            let spec = a.lattice.spec()?;
            if let Some(path) = &a.save_matrix {
                io::save_matrix(path, &spec.build()?.hamiltonian)?;
            }
            compare(&spec, &a.run, &a.output)
        }
        Command::Matrix(a) => {
            check_mass(a.mass)?;
            let path = a.file.to_str().ok_or_else(|| Failure::Usage("matrix path is not UTF-8".into()))?;
            compare(&ModelSpec::explicit(path, a.mass), &a.run, &a.output)
        }
        Command::Sweep(a) => sweep(&a),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("FWLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("FWLAB_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Model(e)) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(1)
        }
    }
}
