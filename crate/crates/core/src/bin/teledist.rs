use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use teledist::report::{render_table, run, AllocPolicy, Capacities, RunConfig};
use teledist::sat::{self, Backend, CnfFormula, SatConfig, SatStatus};
use teledist::strategy::{Strategy, DEFAULT_HISTORY, DEFAULT_WINDOW};
use teledist::{report::load_circuit, sat::SOLVER_ENV};

#[derive(Parser)]
#[command(
    name = "teledist",
    version,
    about = "Distribute circuit qubits over machines with few teleportations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Solve a circuit and print the per-state placement table.
    Solve(SolveArgs),
    /// Print the layering of a circuit.
    Layers { input: PathBuf },
    /// Decide a DIMACS CNF file with the embedded solver (exit 10 SAT, 20 UNSAT).
    Sat {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seconds before giving up.
        #[arg(long)]
        time_limit: Option<f64>,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// `.tfc` circuit, or a `.layers` listing used as-is.
    input: PathBuf,
    #[arg(long)]
    machines: usize,
    /// One capacity for every machine, or a comma-separated list.
    #[arg(long)]
    capacity: String,
    /// in-order | random | explicit:PATH
    #[arg(long, default_value = "in-order")]
    alloc: String,
    /// Seed for random allocation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Layers per subproblem.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    /// linear | binary | history[:LENGTH]
    #[arg(long, default_value = "history")]
    strategy: String,
    /// Minimize empty machines after teleports.
    #[arg(long)]
    balance: bool,
    /// Teleport cost matrix file; enables cost minimization.
    #[arg(long)]
    cost_matrix: Option<PathBuf>,
    /// Skip the final pass that prefers pairwise swaps.
    #[arg(long)]
    no_swap_preference: bool,
    /// embedded[:SEED] | external:COMMAND (default from TELEDIST_SAT_SOLVER, else embedded)
    #[arg(long)]
    backend: Option<String>,
    /// Write each window's final CNF and variable map here.
    #[arg(long)]
    emit_cnf: Option<PathBuf>,
    /// Write an Alloy model of the instance here.
    #[arg(long)]
    emit_alloy: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Do not print the table.
    #[arg(long)]
    no_table: bool,
    /// Seconds allowed for each SAT call.
    #[arg(long)]
    time_limit: Option<f64>,
}

fn parse_capacity(s: &str) -> Result<Capacities, String> {
    let values: Result<Vec<usize>, _> = s.split(',').map(|v| v.trim().parse::<usize>()).collect();
    let values = values.map_err(|e| format!("--capacity {s}: {e}"))?;
    Ok(match values.as_slice() {
        [one] => Capacities::Uniform(*one),
        _ => Capacities::PerMachine(values),
    })
}

fn parse_alloc(s: &str, seed: u64) -> Result<AllocPolicy, String> {
    match s {
        "in-order" => Ok(AllocPolicy::InOrder),
        "random" => Ok(AllocPolicy::Random { seed }),
        _ => s
            .strip_prefix("explicit:")
            .map(|p| AllocPolicy::Explicit(PathBuf::from(p)))
            .ok_or_else(|| format!("--alloc {s}: expected in-order, random or explicit:PATH")),
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "linear" => Ok(Strategy::Linear),
        "binary" => Ok(Strategy::Binary),
        "history" => Ok(Strategy::History {
            length: DEFAULT_HISTORY,
        }),
        _ => s
            .strip_prefix("history:")
            .and_then(|h| h.parse::<usize>().ok())
            .filter(|&h| h > 0)
            .map(|length| Strategy::History { length })
            .ok_or_else(|| format!("--strategy {s}: expected linear, binary or history[:LENGTH]")),
    }
}

fn parse_backend(arg: Option<&str>) -> Result<Backend, String> {
    let from_env = std::env::var(SOLVER_ENV).ok().filter(|v| !v.trim().is_empty());
    match (arg, from_env) {
        (None, Some(command)) => Ok(Backend::External { command }),
        (None, None) | (Some("embedded"), _) => Ok(Backend::Embedded { seed: 0 }),
        (Some(s), _) => {
            if let Some(seed) = s.strip_prefix("embedded:") {
                let seed = seed.parse().map_err(|e| format!("--backend {s}: {e}"))?;
                Ok(Backend::Embedded { seed })
            } else if let Some(command) = s.strip_prefix("external:") {
                Ok(Backend::External {
                    command: command.to_string(),
                })
            } else {
                Err(format!("--backend {s}: expected embedded[:SEED] or external:COMMAND"))
            }
        }
    }
}

fn seconds(v: Option<f64>) -> Result<Option<Duration>, String> {
    v.map(|s| Duration::try_from_secs_f64(s).map_err(|e| format!("--time-limit {s}: {e}")))
        .transpose()
}

fn solve_command(args: SolveArgs) -> Result<ExitCode, (i32, String)> {
    let usage = |m: String| (2, m);
    let mut config = RunConfig::new(
        args.input,
        args.machines,
        parse_capacity(&args.capacity).map_err(usage)?,
    );
    config.allocation = parse_alloc(&args.alloc, args.seed).map_err(usage)?;
    config.window_size = args.window;
    config.strategy = parse_strategy(&args.strategy).map_err(usage)?;
    config.balance = args.balance;
    config.cost_matrix = args.cost_matrix;
    config.prefer_swaps = !args.no_swap_preference;
    config.backend = parse_backend(args.backend.as_deref()).map_err(usage)?;
    config.time_limit = seconds(args.time_limit).map_err(usage)?;
    config.emit_cnf = args.emit_cnf;
    config.emit_alloy = args.emit_alloy;

    let report = run(&config).map_err(|e| (e.exit_code(), e.to_string()))?;
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json() + "\n").map_err(|e| (7, format!("{}: {e}", path.display())))?;
    }
    if !args.no_table {
        print!("{}", render_table(&report));
    }
    Ok(ExitCode::SUCCESS)
}

fn sat_command(file: PathBuf, seed: u64, time_limit: Option<f64>) -> Result<ExitCode, (i32, String)> {
    let text = std::fs::read_to_string(&file).map_err(|e| (3, format!("{}: {e}", file.display())))?;
    let formula = CnfFormula::from_dimacs(&text).map_err(|e| (3, format!("{}: {e}", file.display())))?;
    let config = SatConfig {
        backend: Backend::Embedded { seed },
        time_limit: seconds(time_limit).map_err(|m| (2, m))?,
    };
    match sat::solve(&formula, &config) {
        Ok(result) => {
            print!("{}", sat::format_solver_output(&result));
            Ok(ExitCode::from(match result.status {
                SatStatus::Sat => 10,
                SatStatus::Unsat => 20,
            }))
        }
        Err(sat::SatError::TimeLimitExceeded(_)) => {
            println!("s UNKNOWN");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Err((5, e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve_command(args),
        Command::Layers { input } => load_circuit(&input)
            .map(|c| {
                print!("{}", c.circuit.to_layer_text());
                ExitCode::SUCCESS
            })
            .map_err(|e| (e.exit_code(), e.to_string())),
        Command::Sat { file, seed, time_limit } => sat_command(file, seed, time_limit),
    };
    result.unwrap_or_else(|(code, message)| {
        eprintln!("teledist: {message}");
        ExitCode::from(code as u8)
    })
}
