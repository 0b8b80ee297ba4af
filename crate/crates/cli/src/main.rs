use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use macaulay::bench::{self, BenchConfig, BenchSettings};
use macaulay::format::{parse_problem, serialize_problem, solutions_csv};
use macaulay::profile::{self, DEFAULT_GRID_POINTS, DEFAULT_TAU_MAX};
use macaulay::solver::{solve, Enlarge, SolverOptions};
use macaulay::subspace::{history_csv, RankMode, Route};
use macaulay::{database, BasisId, Error, OrderId};

/// Exit statuses; errors from the library map through `Error::name`.
const EXIT_CODES: &[(&str, u8)] = &[
    ("IoError", 3),
    ("Timeout", 4),
    ("FormatError", 10),
    ("VersionError", 11),
    ("EmptyEquation", 12),
    ("SupportLengthMismatch", 13),
    ("ShapeMismatch", 14),
    ("UnderDetermined", 15),
    ("IndexOutOfRange", 16),
    ("Overflow", 17),
    ("DegreeTooSmall", 18),
    ("DegreeSkip", 19),
    ("RankAmbiguous", 20),
    ("NoGap", 21),
    ("GapMissing", 22),
    ("ShiftEscapesSubspace", 23),
    ("DimensionMismatch", 24),
    ("DegreeCapExceeded", 25),
    ("PositiveDimensionalAffine", 26),
    ("UnknownProblem", 27),
    ("AllFailRow", 28),
    ("LinalgError", 29),
    ("InvalidOption", 30),
];

fn exit_code(name: &str) -> u8 {
    EXIT_CODES.iter().find(|(n, _)| *n == name).map_or(1, |(_, c)| *c)
}

struct Failure {
    name: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            name: e.name(),
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        name: "IoError",
        message: format!("{}: {e}", path.display()),
    }
}

#[derive(Parser)]
#[command(name = "macaulay", version, about = "Block Macaulay matrix solver for polynomial systems and multiparameter eigenvalue problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file (`.mlp`).
    Solve(SolveArgs),
    /// Inspect or export the embedded problem collection.
    Db {
        #[command(subcommand)]
        action: DbAction,
    },
    /// Time solver configurations over a set of database problems.
    Bench(BenchArgs),
    /// Performance profile of a timing table.
    Profile(ProfileArgs),
}

#[derive(Subcommand)]
enum DbAction {
    List,
    Show { name: String },
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SolverFlags {
    #[arg(long, default_value_t = Route::Null)]
    route: Route,
    #[arg(long, default_value_t = Enlarge::Recursive)]
    enlarge: Enlarge,
    #[arg(long = "rank", default_value_t = RankMode::Block)]
    rank_mode: RankMode,
    /// Allow a positive-dimensional solution set at infinity.
    #[arg(long)]
    posdim: bool,
    #[arg(long)]
    no_cluster: bool,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    ctol: f64,
    #[arg(long, default_value_t = 25)]
    maxdeg: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Convert the problem to this basis before solving.
    #[arg(long)]
    basis: Option<BasisId>,
    #[arg(long, default_value_t = OrderId::Grevlex)]
    order: OrderId,
}

impl SolverFlags {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            route: self.route,
            enlarge: self.enlarge,
            rank_mode: self.rank_mode,
            posdim: self.posdim,
            cluster: !self.no_cluster,
            tol: self.tol,
            ctol: self.ctol,
            maxdeg: self.maxdeg,
            seed: self.seed,
            basis: self.basis,
            order: self.order,
            ..SolverOptions::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[command(flatten)]
    flags: SolverFlags,
    /// Solution CSV; diagnostics go to the same path with `.json` appended.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seconds before giving up.
    #[arg(long)]
    timeout: Option<f64>,
    /// Print the per-degree rank history to stderr.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated database names.
    #[arg(long, default_value = "noon3,katsura3,katsura4,conics")]
    problems: String,
    /// Configuration such as `route=null,enlarge=iterative`; repeatable.
    /// Defaults to the column route and both null-route enlargements.
    #[arg(long = "config")]
    configs: Vec<String>,
    #[command(flatten)]
    flags: SolverFlags,
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    #[arg(long)]
    no_warmup: bool,
    /// Run distinct problems concurrently.
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = DEFAULT_TAU_MAX)]
    tau_max: f64,
    /// Directory for times.csv, relative.csv and profile.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// CSV `problem,<solver>,..` with times in seconds or FAIL.
    times: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TAU_MAX)]
    tau_max: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn duration(seconds: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(seconds)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Error::InvalidOption(format!("timeout must be positive, got {seconds}")).into())
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.file).map_err(|e| io_failure(&args.file, e))?;
    let problem = parse_problem(&text)?;
    let opts = args.flags.options();
    opts.validate()?;
    let result = match args.timeout {
        None => solve(&problem, &opts),
        Some(seconds) => {
            let limit = duration(seconds)?;
            let (tx, rx) = mpsc::channel();
            let (p, o) = (problem.clone(), opts.clone());
            thread::spawn(move || {
                let _ = tx.send(solve(&p, &o));
            });
            rx.recv_timeout(limit).map_err(|_| Failure {
                name: "Timeout",
                message: format!("no result within {seconds} s"),
            })?
        }
    }?;
    let d = &result.diagnostics;
    if args.verbose {
        eprint!("{}", history_csv(&d.history));
    }
    let csv = solutions_csv(&result, problem.m());
    let json = serde_json::to_string_pretty(d).expect("diagnostics serialize");
    match &args.out {
        Some(path) => {
            write(path, &csv)?;
            write(&with_suffix(path, ".json"), &(json + "\n"))?;
        }
        None => print!("{csv}"),
    }
    eprintln!(
        "{} affine solutions, nullity {}, degree {}, {:.3} s",
        result.len(),
        d.nullity,
        d.final_degree,
        d.timings.total_s
    );
    Ok(())
}

fn optional(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn cmd_db(action: DbAction) -> Result<(), Failure> {
    match action {
        DbAction::List => {
            println!("{:<12} {:<7} {:>2} {:>2} {:>2} {:>2} {:>2} {:>5} {:>5}", "name", "kind", "s", "k", "l", "d", "m", "m_b", "m_a");
            for e in database::list() {
                println!(
                    "{:<12} {:<7} {:>2} {:>2} {:>2} {:>2} {:>2} {:>5} {:>5}",
                    e.name,
                    e.kind.to_string(),
                    e.s,
                    e.k,
                    e.l,
                    e.d,
                    e.m,
                    optional(e.m_b),
                    optional(e.m_a)
                );
            }
        }
        DbAction::Show { name } => {
            let e = database::show(&name)?;
            println!("name={}", e.name);
            println!("description={}", e.description);
            println!("kind={}", e.kind);
            println!("s={}", e.s);
            println!("k={}", e.k);
            println!("l={}", e.l);
            println!("d={}", e.d);
            println!("m={}", e.m);
            println!("m_b={}", optional(e.m_b));
            println!("m_a={}", optional(e.m_a));
        }
        DbAction::Export { name, out } => {
            let text = serialize_problem(&database::load(&name)?);
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let base = args.flags.options();
    base.validate()?;
    let configs = if args.configs.is_empty() {
        bench::default_configs(&base)
    } else {
        args.configs
            .iter()
            .map(|s| BenchConfig::parse(s, &base))
            .collect::<Result<Vec<_>, _>>()?
    };
    let problems = args
        .problems
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|n| database::load(n).map(|p| (n.to_string(), p)))
        .collect::<Result<Vec<_>, _>>()?;
    let settings = BenchSettings {
        timeout: duration(args.timeout)?,
        warmup: !args.no_warmup,
        parallel: args.parallel,
    };
    let report = bench::run(&problems, &configs, &settings);
    let profile = report.profile(args.tau_max, DEFAULT_GRID_POINTS)?;
    for w in &profile.warnings {
        eprintln!("warning: {w}");
    }
    let relative = report.relative_csv();
    print!("{relative}");
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        write(&dir.join("times.csv"), &report.times_csv())?;
        write(&dir.join("relative.csv"), &relative)?;
        write(&dir.join("profile.csv"), &profile.to_csv(&report.configs))?;
    }
    Ok(())
}

fn cmd_profile(args: ProfileArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.times).map_err(|e| io_failure(&args.times, e))?;
    let (solvers, _, times) = profile::parse_times_csv(&text)?;
    let table = profile::performance_profile(&times, args.tau_max, args.points)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    let csv = table.to_csv(&solvers);
    match &args.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Db { action } => cmd_db(action),
        Command::Bench(a) => cmd_bench(a),
        Command::Profile(a) => cmd_profile(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.name, f.message);
            ExitCode::from(exit_code(f.name))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let mut codes: Vec<u8> = EXIT_CODES.iter().map(|(_, c)| *c).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), EXIT_CODES.len());
        assert!(codes.iter().all(|&c| c > 2));
    }

    #[test]
    fn every_library_error_has_a_code() {
        let samples = [
            Error::Format { line: 1, message: String::new() },
            Error::UnknownProblem(String::new()),
            Error::DegreeCapExceeded { maxdeg: 1 },
            Error::PositiveDimensionalAffine { maxdeg: 1 },
            Error::GapMissing,
            Error::AllFailRow { row: 1 },
            Error::Linalg(String::new()),
            Error::InvalidOption(String::new()),
        ];
        for e in samples {
            assert_ne!(exit_code(e.name()), 1, "{}", e.name());
        }
    }

    #[test]
    fn flags_map_to_options() {
        let cli = Cli::parse_from(["macaulay", "solve", "x.mlp", "--route", "column", "--no-cluster", "--order", "grinvlex"]);
        let Command::Solve(a) = cli.command else { panic!() };
        let o = a.flags.options();
        assert_eq!(o.route, Route::Column);
        assert!(!o.cluster);
        assert_eq!(o.order, OrderId::Grinvlex);
        assert_eq!(o.seed, 42);
    }
}
