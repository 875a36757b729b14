//! `multieig`: nearest matrix with a multiple eigenvalue from the command line.

mod bench;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multieig::heuristics;
use multieig::mtx;
use multieig::objective::Frame;
use multieig::record::{read_result, write_result, ResultRecord};
use multieig::roster::{starts_for, StartRule};
use multieig::solver::{multistart_solve, InnerSolver, Method, SolverConfig};
use multieig::source::{MatrixSource, StructureSpec};
use multieig::verify::{verify_parts, Thresholds, VerificationReport};
use multieig::{CMatrix, Error, C64};

/// Exit code for a run that finished but did not pass verification.
const EXIT_UNVERIFIED: u8 = 2;
const EXIT_USAGE: u8 = 1;

#[derive(Parser)]
#[command(name = "multieig", version, about = "Nearest matrix with a multiple eigenvalue")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the nearest (structured) matrix with a double eigenvalue.
    Solve(SolveArgs),
    /// Re-check a stored result against its matrix.
    Verify(VerifyArgs),
    /// Eigenvalues, condition numbers and ranked starting candidates.
    EigInfo(EigInfoArgs),
    /// Run the published experiments and compare with their reference values.
    Bench(bench::BenchArgs),
    /// Print a gallery or file matrix, or write it in Matrix Market format.
    Gallery(GalleryArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Penalty,
    Alm,
}

#[derive(Clone, Copy, ValueEnum)]
enum InnerArg {
    Gd,
    Tr,
}

#[derive(Args)]
struct SolveArgs {
    /// gallery:<name>[:params], file:<path.mtx> or json:{"n":..,"entries":[[re,im],..]}
    #[arg(long)]
    matrix: String,
    /// full, pattern, toeplitz, toeplitz-pattern, companion:<form> or basis:<file.json>
    #[arg(long, default_value = "full")]
    structure: String,
    /// Number of heuristic starting candidates.
    #[arg(long, default_value_t = 1)]
    starts: usize,
    /// Start from this eigenvalue guess (e.g. 0.5+1.2i) instead of the heuristic candidates.
    #[arg(long, allow_hyphen_values = true)]
    lambda0: Option<C64>,
    #[arg(long, value_enum, default_value = "penalty")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "gd")]
    inner: InnerArg,
    #[arg(long)]
    tolgrad: Option<f64>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    eps_decrease: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON result here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve starts on this many threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON result written by `solve --out`.
    #[arg(long)]
    result: PathBuf,
    /// Matrix to check against; defaults to the source stored in the result.
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args)]
struct EigInfoArgs {
    #[arg(long)]
    matrix: String,
    /// Rows of the ranked candidate table.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct GalleryArgs {
    #[arg(long)]
    matrix: String,
    /// Write Matrix Market output to this file instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a subcommand: bad input or a failed computation.
#[derive(Debug)]
pub struct CliError(String);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError(s)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn load_matrix(descriptor: &str) -> CliResult<CMatrix> {
    Ok(descriptor.parse::<MatrixSource>()?.load()?)
}

fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn config_from(args: &SolveArgs) -> CliResult<SolverConfig> {
    let mut cfg = SolverConfig {
        method: match args.method {
            MethodArg::Penalty => Method::Penalty,
            MethodArg::Alm => Method::Alm,
        },
        inner: match args.inner {
            InnerArg::Gd => InnerSolver::GradientDescent,
            InnerArg::Tr => InnerSolver::TrustRegion,
        },
        ..SolverConfig::default()
    };
    if let Some(t) = args.tolgrad {
        cfg.tolgradnorm = t;
    }
    if let Some(e) = args.eps0 {
        cfg.eps0 = e;
    }
    if let Some(d) = args.eps_decrease {
        cfg.eps_decrease = d;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verdict(report: &VerificationReport) -> &'static str {
    if report.passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_solve(args: &SolveArgs) -> CliResult<u8> {
    if args.starts == 0 || args.jobs == 0 {
        return Err("--starts and --jobs must be at least 1".to_string().into());
    }
    let cfg = config_from(args)?;
    let a = load_matrix(&args.matrix)?;
    let s = args.structure.parse::<StructureSpec>()?.build(&a)?;
    let rule = match args.lambda0 {
        Some(l) => StartRule::Lambda0(l),
        None => StartRule::Top(args.starts),
    };
    let starts = starts_for(&a, &rule)?;
    let outcome = multistart_solve(&a, &s, &starts, &cfg, args.jobs)?;
    let record = ResultRecord::new(&args.matrix, &args.structure, &s, &cfg, &outcome);
    if let Some(path) = &args.out {
        write_result(&record, path)?;
    }
    println!(
        "distance={} lambda={} gradnorm={} feasible={} verification={} start={}",
        record.distance,
        fmt_c(record.lambda),
        record.gradnorm,
        record.feasible,
        verdict(&record.verification),
        record.start_index
    );
    if !outcome.any_feasible {
        eprintln!("warning: no start produced a feasible perturbation");
    }
    Ok(if record.feasible && record.verification.passed {
        0
    } else {
        EXIT_UNVERIFIED
    })
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<u8> {
    let record = read_result(&args.result)?;
    let a = load_matrix(args.matrix.as_deref().unwrap_or(&record.source))?;
    let s = record.structure.parse::<StructureSpec>()?.build(&a)?;
    let delta = record.delta()?;
    let frame: Frame = record.frame()?;
    if delta.shape() != a.shape() {
        return Err(format!("result is for n = {}, matrix is {}×{}", record.n, a.nrows(), a.ncols()).into());
    }
    let report = verify_parts(&a, &s, &delta, record.lambda, &frame, &Thresholds::default())?;
    println!("distance={} (recomputed {})", record.distance, delta.norm());
    println!("eigen_gap={:e} limit={:e}", report.eigen_gap, Thresholds::default().eigen_gap_limit(a.norm()));
    println!("right_residual={:e} left_residual={:e}", report.right_residual, report.left_residual);
    if let (Some(uv), Some(rank), Some(sigma)) = (report.uv_orthogonality, report.delta_rank_ratio, report.sigma_min_match) {
        println!("uv_orthogonality={uv:e} delta_rank_ratio={rank:e} sigma_min_match={sigma:e}");
    }
    println!("verification={}", verdict(&report));
    Ok(if report.passed { 0 } else { EXIT_UNVERIFIED })
}

fn cmd_eig_info(args: &EigInfoArgs) -> CliResult<u8> {
    let a = load_matrix(&args.matrix)?;
    let info = heuristics::eig_condition_numbers(&a)?;
    println!("{:>4}  {:>44}  {:>12}", "j", "lambda", "p");
    for (j, e) in info.iter().enumerate() {
        println!("{j:>4}  {:>44}  {:>12.5e}", fmt_c(e.lambda), e.p);
    }
    println!();
    println!("{:>4}  {:>4}  {:>4}  {:>12}  {:>44}", "rank", "j", "k", "s", "lambda0");
    for (r, c) in heuristics::candidates_from_info(&info, args.top).iter().enumerate() {
        println!("{:>4}  {:>4}  {:>4}  {:>12.5e}  {:>44}", r + 1, c.j, c.k, c.s, fmt_c(c.lambda0));
    }
    Ok(0)
}

fn cmd_gallery(args: &GalleryArgs) -> CliResult<u8> {
    let a = load_matrix(&args.matrix)?;
    match &args.out {
        Some(path) => mtx::write_matrix_market(&a, path)?,
        None => {
            for i in 0..a.nrows() {
                let row: Vec<String> = (0..a.ncols()).map(|j| fmt_c(a[(i, j)])).collect();
                println!("{}", row.join("  "));
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            // help and version go to stdout, real errors to stderr
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::EigInfo(a) => cmd_eig_info(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Gallery(a) => cmd_gallery(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
