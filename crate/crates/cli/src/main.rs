use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pmean::analysis::{check_extrema_are_maxima, check_sign_ranges, check_upper_range_constants, locate_root};
use pmean::hardness::{max_matching_brute, planted_yes, random_no, reduce, Gap3dmInstance, Matching};
use pmean::instance::{generate, FamilyKind, GenParams};
use pmean::report::{exact_report, solve_report, verify_report, Report, Row, RowStatus};
use pmean::swmax::DEFAULT_BUDGET;
use pmean::{Exponent, Instance, SwBackend, EPS};

const DEFAULT_GRID: &str = "-inf,-1,0,0.4,1";

#[derive(Parser)]
#[command(name = "pmean", version, about = "Allocate indivisible goods for p-mean welfare")]
struct Cli {
    /// Largest number of labeled partitions a brute-force enumeration may visit.
    #[arg(long, global = true, env = "PMEAN_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen(GenArgs),
    /// Run the allocator and report its p-mean welfare.
    Solve(RunArgs),
    /// Brute-force the p-optimal welfare.
    Exact(ExactArgs),
    /// Compare the allocator against brute force; exit 1 on a ratio below 1/40.
    Verify(RunArgs),
    /// Check the scalar inequalities behind the guarantee on dense grids.
    CheckIneq(IneqArgs),
    /// Build a 3-dimensional-matching gadget instance and check its gap.
    HardnessDemo(HardnessArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_family)]
    family: FamilyKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additive clauses for xos and explicit instances.
    #[arg(long, default_value_t = GenParams::default().clauses)]
    clauses: usize,
    /// Budget cap as a fraction of the total weight (budget_additive only).
    #[arg(long, default_value_t = GenParams::default().cap_fraction)]
    cap_fraction: f64,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated exponents in (-inf, 1]; `-inf` is accepted.
    #[arg(long, value_parser = parse_ps, default_value = DEFAULT_GRID, allow_hyphen_values = true)]
    p: Grid,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    sw_backend: BackendArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    output: Format,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_ps, default_value = DEFAULT_GRID, allow_hyphen_values = true)]
    p: Grid,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    output: Format,
}

#[derive(Args)]
struct IneqArgs {
    /// Grid spacing on (0, 0.4] and [0.4, 1].
    #[arg(long, default_value_t = 0.001)]
    grid_step: f64,
    /// Grid spacing on [-50, 0).
    #[arg(long, default_value_t = 0.01)]
    negative_step: f64,
}

#[derive(Args)]
struct HardnessArgs {
    #[arg(long)]
    q: usize,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_ps, default_value = DEFAULT_GRID, allow_hyphen_values = true)]
    p: Grid,
    /// Where to write the reduced instance.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Yes,
    No,
}

/// One `--p` value holds the whole comma-separated list.
#[derive(Clone, Debug)]
struct Grid(Vec<Exponent>);

fn parse_ps(s: &str) -> Result<Grid, String> {
    Exponent::parse_list(s).map(Grid).map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    s.parse().map_err(|e: pmean::Error| e.to_string())
}

/// Why a command did not succeed.
enum Failure {
    /// The run completed and found a violated guarantee.
    Violation,
    /// Bad input, an exceeded budget or an I/O problem.
    Usage(String),
}

impl From<pmean::Error> for Failure {
    fn from(e: pmean::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(args) => run_solve(args, cli.budget),
        Command::Exact(args) => run_exact(args, cli.budget),
        Command::Verify(args) => run_verify(args, cli.budget),
        Command::CheckIneq(args) => run_check_ineq(args),
        Command::HardnessDemo(args) => run_hardness(args, cli.budget),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn backend(arg: BackendArg, budget: u64) -> SwBackend {
    match arg {
        BackendArg::Exact => SwBackend::ExactBruteForce { budget },
        BackendArg::Greedy => SwBackend::GreedyDemand,
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Instance::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CsvRow {
    p: String,
    alg_welfare: Option<f64>,
    opt_welfare: Option<f64>,
    ratio: Option<f64>,
    status: &'static str,
}

impl From<&Row> for CsvRow {
    fn from(r: &Row) -> Self {
        CsvRow {
            p: r.p.to_string(),
            alg_welfare: r.alg_welfare,
            opt_welfare: r.opt_welfare,
            ratio: r.ratio,
            status: match r.status {
                RowStatus::Pass => "pass",
                RowStatus::Fail => "fail",
                RowStatus::Vacuous => "vacuous",
                RowStatus::Unchecked => "unchecked",
            },
        }
    }
}

fn print_report(report: &Report, format: Format) -> Outcome {
    match format {
        Format::Json => print_json(report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            for row in &report.rows {
                w.serialize(CsvRow::from(row))
                    .map_err(|e| Failure::Usage(e.to_string()))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn run_gen(args: GenArgs) -> Outcome {
    let params = GenParams {
        clauses: args.clauses,
        cap_fraction: args.cap_fraction,
    };
    let inst = generate(args.family, args.n, args.m, args.seed, params)?;
    let text = inst.to_json() + "\n";
    match args.out {
        Some(path) => fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn run_solve(args: RunArgs, budget: u64) -> Outcome {
    let inst = load(&args.instance)?;
    let report = solve_report(&inst, &args.p.0, backend(args.sw_backend, budget))?;
    print_report(&report, args.output)
}

fn run_exact(args: ExactArgs, budget: u64) -> Outcome {
    let inst = load(&args.instance)?;
    let report = exact_report(&inst, &args.p.0, budget)?;
    print_report(&report, args.output)
}

fn run_verify(args: RunArgs, budget: u64) -> Outcome {
    let inst = load(&args.instance)?;
    let report = verify_report(&inst, &args.p.0, backend(args.sw_backend, budget), budget)?;
    print_report(&report, args.output)?;
    if report.all_pass {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

#[derive(Serialize)]
struct IneqReport {
    ok: bool,
    ranges: pmean::analysis::SignRangeReport,
    root: Option<f64>,
    upper_range: pmean::analysis::UpperRangeReport,
    extrema: pmean::analysis::ExtremaReport,
    worst_violation: f64,
}

fn run_check_ineq(args: IneqArgs) -> Outcome {
    for step in [args.grid_step, args.negative_step] {
        if !(step > 0.0 && step <= 0.1) {
            return Err(Failure::Usage(format!("grid steps must lie in (0, 0.1], got {step}")));
        }
    }
    let ranges = check_sign_ranges(-50.0, args.negative_step, args.grid_step);
    let root = locate_root().ok();
    let upper_range = check_upper_range_constants(args.grid_step);
    let extrema = check_extrema_are_maxima(-5.0, 1.0, args.grid_step, 1e-8);
    let ok = ranges.ok() && root.is_some() && upper_range.ok() && extrema.minima.is_empty();
    let report = IneqReport {
        ok,
        worst_violation: ranges.worst_violation,
        ranges,
        root,
        upper_range,
        extrema,
    };
    print_json(&report)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

#[derive(Serialize)]
struct HardnessReport {
    q: usize,
    mode: &'static str,
    graph: Gap3dmInstance,
    max_matching: Matching,
    /// Largest matching as a fraction of `q`.
    alpha: f64,
    /// 3 on the YES side, `2 + alpha` on the NO side.
    expected_opt: f64,
    gap_holds: bool,
    instance_file: PathBuf,
    verification: Report,
}

fn run_hardness(args: HardnessArgs, budget: u64) -> Outcome {
    let (graph, mode) = match args.mode {
        Mode::Yes => (planted_yes(args.q, args.q, args.seed)?, "yes"),
        Mode::No => (random_no(args.q, 2 * args.q, args.seed)?, "no"),
    };
    let inst = reduce(&graph);
    let path = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("hardness-{mode}-q{}-seed{}.json", args.q, args.seed)));
    fs::write(&path, inst.to_json() + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;

    let max_matching = max_matching_brute(&graph)?;
    let alpha = max_matching.len() as f64 / args.q as f64;
    let verification = verify_report(&inst, &args.p.0, SwBackend::ExactBruteForce { budget }, budget)?;
    let opts = verification.rows.iter().filter_map(|r| r.opt_welfare);
    let (expected_opt, gap_holds) = match args.mode {
        Mode::Yes => (3.0, opts.clone().all(|o| (o - 3.0).abs() <= EPS)),
        Mode::No => (2.0 + alpha, opts.clone().all(|o| o <= 2.0 + alpha + EPS)),
    };
    let ok = gap_holds && verification.all_pass;
    print_json(&HardnessReport {
        q: args.q,
        mode,
        graph,
        max_matching,
        alpha,
        expected_opt,
        gap_holds,
        instance_file: path,
        verification,
    })?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}
