//! End-to-end runs and their reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alloy::{emit_model, AlloyBounds, AlloyError, AlloyOptions};
use crate::circuit::{normalize, CircuitGraph, LayerTextError};
use crate::encode::{encode, Bounds, DecisionInstance, EncodeError};
use crate::network::{
    allocate_in_order, allocate_random, explicit_allocation, Allocation, CostMatrix, NetworkError, NetworkSpec,
    RANDOM_ALLOCATION_PRNG,
};
use crate::sat::{Backend, SatConfig, SatError};
use crate::strategy::{solve_circuit, Objectives, SolveConfig, Strategy, StrategyError};
use crate::tfc::{parse_tfc, TfcError};

pub const SCHEMA_VERSION: u32 = 1;

/// Describes how state indices relate to layers in reports.
pub const STATE_CONVENTION: &str = "state 0 is the initial allocation; state i executes layer i-1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Capacities {
    Uniform(usize),
    PerMachine(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocPolicy {
    InOrder,
    Random { seed: u64 },
    Explicit(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// `.tfc` circuit, or a `.layers` listing taken as already layered.
    pub input: PathBuf,
    pub machines: usize,
    pub capacities: Capacities,
    pub allocation: AllocPolicy,
    pub window_size: usize,
    pub strategy: Strategy,
    pub balance: bool,
    pub cost_matrix: Option<PathBuf>,
    pub prefer_swaps: bool,
    pub backend: Backend,
    /// Limit for each individual SAT call.
    pub time_limit: Option<Duration>,
    pub emit_cnf: Option<PathBuf>,
    pub emit_alloy: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, machines: usize, capacities: Capacities) -> Self {
        RunConfig {
            input: input.into(),
            machines,
            capacities,
            allocation: AllocPolicy::InOrder,
            window_size: crate::strategy::DEFAULT_WINDOW,
            strategy: Strategy::default(),
            balance: false,
            cost_matrix: None,
            prefer_swaps: true,
            backend: Backend::default(),
            time_limit: None,
            emit_cnf: None,
            emit_alloy: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Input {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Config(String),
    #[error("instance rejected: {0}")]
    Invalid(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("solver: {0}")]
    Solver(#[from] SatError),
    #[error("{0}")]
    Search(StrategyError),
    #[error("alloy emission: {0}")]
    Alloy(#[from] AlloyError),
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Read { .. } | RunError::Input { .. } => 3,
            RunError::Config(_) => 2,
            RunError::Invalid(_) | RunError::Network(_) => 4,
            RunError::Solver(_) => 5,
            RunError::Search(_) => 6,
            RunError::Alloy(_) | RunError::Write { .. } => 7,
        }
    }
}

impl From<StrategyError> for RunError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::Sat(s) => RunError::Solver(s),
            StrategyError::Encode(EncodeError::InstanceInvalid(m)) => RunError::Invalid(m),
            other => RunError::Search(other),
        }
    }
}

fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|source| RunError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// A circuit ready for solving, with display names for its qubits.
#[derive(Debug, Clone)]
pub struct LoadedCircuit {
    pub circuit: CircuitGraph,
    pub qubit_names: Vec<String>,
}

pub fn load_circuit(path: &Path) -> Result<LoadedCircuit, RunError> {
    let text = read(path)?;
    let input_err = |line: usize, message: String| RunError::Input {
        path: path.to_path_buf(),
        line,
        message,
    };
    if path.extension().is_some_and(|e| e == "layers") {
        let circuit = CircuitGraph::parse_layer_text(&text)
            .map_err(|LayerTextError { line, message }| input_err(line, message))?;
        let qubit_names = (1..=circuit.qubit_count).map(|i| format!("q{i}")).collect();
        return Ok(LoadedCircuit { circuit, qubit_names });
    }
    let doc = parse_tfc(&text).map_err(|e: TfcError| input_err(e.line(), e.to_string()))?;
    let (n, gates) = doc.to_gate_list();
    Ok(LoadedCircuit {
        circuit: normalize(gates, n),
        qubit_names: doc.variables.clone(),
    })
}

/// Parses `name machine` lines; machines are `M<k>` or a 1-based integer.
pub fn parse_allocation_file(
    text: &str,
    qubit_names: &[String],
    net: &NetworkSpec,
) -> Result<Allocation, (usize, String)> {
    let mut pairs = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let (Some(name), Some(m), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err((line, format!("expected `qubit machine`, got `{content}`")));
        };
        let qubit = qubit_names
            .iter()
            .position(|q| q == name)
            .ok_or_else(|| (line, format!("unknown qubit `{name}`")))?;
        let label = m.strip_prefix('M').unwrap_or(m);
        let machine = label
            .parse::<usize>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| (line, format!("bad machine `{m}`")))?;
        pairs.push((qubit, machine - 1));
    }
    explicit_allocation(&pairs, qubit_names.len(), net).map_err(|e| (0, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub machines: usize,
    pub capacities: Vec<usize>,
    pub allocation: AllocPolicy,
    pub prng: Option<String>,
    pub window_size: usize,
    pub strategy: Strategy,
    pub objectives: Objectives,
    pub cost_matrix: Option<Vec<Vec<u32>>>,
    pub backend: Backend,
    pub time_limit_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRow {
    pub state: usize,
    /// Qubits whose machine changed on entering this state.
    pub moved: usize,
    /// Pairwise exchanges among those moves.
    pub swaps: usize,
    /// Qubit names on each machine.
    pub machines: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub num_tele: usize,
    pub swap_count: usize,
    pub adjusted_tele: usize,
    pub vacancy_total: Option<usize>,
    pub weighted_cost: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubproblemReport {
    pub window: usize,
    pub first_layer: usize,
    pub layer_count: usize,
    pub teleport_optimum: u32,
    pub vacancy_optimum: Option<u32>,
    pub cost_optimum: Option<u32>,
    pub swaps: Option<u32>,
    /// See `Refinement::swaps_proven`.
    pub swaps_proven: bool,
    pub probes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub load_secs: f64,
    pub solve_secs: f64,
    pub total_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub qubit_count: usize,
    pub layer_count: usize,
    pub qubits: Vec<String>,
    pub state_convention: String,
    pub states: Vec<StateRow>,
    pub totals: Totals,
    pub subproblems: Vec<SubproblemReport>,
    pub timing: Timing,
}

impl SolutionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with `timing` zeroed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.timing = Timing::default();
        copy.to_json()
    }
}

fn build_network(config: &RunConfig) -> Result<NetworkSpec, RunError> {
    let caps = match &config.capacities {
        Capacities::Uniform(c) => vec![*c; config.machines],
        Capacities::PerMachine(list) => {
            if list.len() != config.machines {
                return Err(RunError::Config(format!(
                    "{} capacities given for {} machines",
                    list.len(),
                    config.machines
                )));
            }
            list.clone()
        }
    };
    let mut net = NetworkSpec::new(caps)?;
    if let Some(path) = &config.cost_matrix {
        let matrix = CostMatrix::parse(&read(path)?).map_err(|e| match e {
            NetworkError::CostParse { line, message } => RunError::Input {
                path: path.clone(),
                line,
                message,
            },
            other => RunError::Network(other),
        })?;
        net = net.with_cost_matrix(matrix)?;
    }
    Ok(net)
}

/// Runs the whole pipeline and writes any requested side outputs.
pub fn run(config: &RunConfig) -> Result<SolutionReport, RunError> {
    let started = Instant::now();
    if config.window_size == 0 {
        return Err(RunError::Config("window size must be positive".into()));
    }
    let loaded = load_circuit(&config.input)?;
    let circuit = &loaded.circuit;
    let net = build_network(config)?;
    if let Err(diags) = net.validate(circuit) {
        let text: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(RunError::Invalid(text.join("; ")));
    }
    let n = circuit.qubit_count;
    let initial = match &config.allocation {
        AllocPolicy::InOrder => allocate_in_order(&net, n)?,
        AllocPolicy::Random { seed } => allocate_random(&net, n, *seed)?,
        AllocPolicy::Explicit(path) => {
            parse_allocation_file(&read(path)?, &loaded.qubit_names, &net).map_err(|(line, message)| {
                RunError::Input {
                    path: path.clone(),
                    line,
                    message,
                }
            })?
        }
    };
    let load_secs = started.elapsed().as_secs_f64();

    let objectives = Objectives {
        balance: config.balance,
        weighted_cost: config.cost_matrix.is_some(),
        prefer_swaps: config.prefer_swaps,
    };
    let solve_cfg = SolveConfig {
        sat: SatConfig {
            backend: config.backend.clone(),
            time_limit: config.time_limit,
        },
        strategy: config.strategy,
        objectives,
        window_size: config.window_size,
    };
    let solve_start = Instant::now();
    let output = solve_circuit(circuit, &net, &initial, &solve_cfg)?;
    let solve_secs = solve_start.elapsed().as_secs_f64();

    if let Some(dir) = &config.emit_cnf {
        emit_cnf(dir, circuit, &net, &output.fragments)?;
    }
    let solution = &output.solution;
    if let Some(path) = &config.emit_alloy {
        let model = emit_model(
            circuit,
            &net,
            &initial,
            AlloyBounds {
                teleports: solution.num_tele as u32,
                vacancies: solution.vacancy_total.map(|v| v as u32),
                cost: solution.weighted_cost.map(|c| c as u32),
            },
            AlloyOptions {
                balance: config.balance,
                hetero: config.cost_matrix.is_some(),
            },
        )?;
        std::fs::write(path, model.text).map_err(|source| RunError::Write {
            path: path.clone(),
            source,
        })?;
    }

    let k = net.machine_count();
    let moves = &solution.moves_per_transition;
    let swaps = &solution.swaps_per_transition;
    let states = solution
        .assignments
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| StateRow {
            state: i,
            moved: if i == 0 { 0 } else { moves[i - 1] },
            swaps: if i == 0 { 0 } else { swaps[i - 1] },
            machines: (0..k)
                .map(|m| {
                    s.qubits_on(m)
                        .into_iter()
                        .map(|q| loaded.qubit_names[q].clone())
                        .collect()
                })
                .collect(),
        })
        .collect();
    let subproblems = output
        .fragments
        .iter()
        .map(|f| SubproblemReport {
            window: f.window,
            first_layer: f.layers.start,
            layer_count: f.layers.len(),
            teleport_optimum: f.teleport_optimum,
            vacancy_optimum: f.refinement.vacancy,
            cost_optimum: f.refinement.cost,
            swaps: f.refinement.swaps,
            swaps_proven: f.refinement.swaps_proven,
            probes: f.probes,
        })
        .collect();

    Ok(SolutionReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            input: config.input.display().to_string(),
            machines: k,
            capacities: net.capacities().to_vec(),
            prng: matches!(config.allocation, AllocPolicy::Random { .. }).then(|| RANDOM_ALLOCATION_PRNG.to_string()),
            allocation: config.allocation.clone(),
            window_size: config.window_size,
            strategy: config.strategy,
            objectives,
            cost_matrix: net.cost_matrix().map(|c| c.rows().to_vec()),
            backend: config.backend.clone(),
            time_limit_secs: config.time_limit.map(|d| d.as_secs_f64()),
        },
        qubit_count: n,
        layer_count: circuit.layer_count(),
        qubits: loaded.qubit_names.clone(),
        state_convention: STATE_CONVENTION.to_string(),
        states,
        totals: Totals {
            num_tele: solution.num_tele,
            swap_count: solution.swap_count,
            adjusted_tele: solution.adjusted_tele,
            vacancy_total: solution.vacancy_total,
            weighted_cost: solution.weighted_cost,
        },
        subproblems,
        timing: Timing {
            load_secs,
            solve_secs,
            total_secs: started.elapsed().as_secs_f64(),
        },
    })
}

/// Writes each window's final decision instance as DIMACS plus a variable map.
fn emit_cnf(
    dir: &Path,
    circuit: &CircuitGraph,
    net: &NetworkSpec,
    fragments: &[crate::strategy::Fragment],
) -> Result<(), RunError> {
    let werr = |path: PathBuf| move |source| RunError::Write { path, source };
    std::fs::create_dir_all(dir).map_err(werr(dir.to_path_buf()))?;
    for f in fragments {
        let window = circuit.window(f.layers.clone());
        let bounds = Bounds {
            teleports: f.teleport_optimum,
            vacancies: f.refinement.vacancy,
            cost: f.refinement.cost,
            min_swaps: f.refinement.swaps.filter(|&s| s > 0),
        };
        let enc = encode(&DecisionInstance {
            window: &window,
            net,
            initial: f.sequence.initial(),
            bounds,
        })
        .map_err(StrategyError::from)?;
        let stem = format!("window{:04}_T{}", f.window, f.teleport_optimum);
        let cnf = dir.join(format!("{stem}.cnf"));
        std::fs::write(&cnf, enc.formula.to_dimacs()).map_err(werr(cnf.clone()))?;
        let map = dir.join(format!("{stem}.map"));
        std::fs::write(&map, enc.indexing.to_sidecar()).map_err(werr(map.clone()))?;
    }
    Ok(())
}

/// Fixed-width table, one row per state. Rows whose moves include swaps show
/// the swap-adjusted count with a `(swap)` note.
pub fn render_table(report: &SolutionReport) -> String {
    let k = report.config.machines;
    let mut header = vec!["State".to_string(), "Teleported".to_string()];
    header.extend((1..=k).map(|m| format!("Machine {m}")));
    let rows: Vec<Vec<String>> = report
        .states
        .iter()
        .map(|r| {
            let count = match r.swaps {
                0 => r.moved.to_string(),
                1 => format!("{} (swap)", r.moved - 1),
                s => format!("{} ({s} swaps)", r.moved - s),
            };
            let mut row = vec![r.state.to_string(), count];
            row.extend(r.machines.iter().map(|qs| qs.join(", ")));
            row
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("| {} |", padded.join(" | "))
    };
    let rule = format!(
        "+{}+",
        widths.iter().map(|w| "-".repeat(w + 2)).collect::<Vec<_>>().join("+")
    );
    let mut out = String::new();
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "{}", line(&header));
    let _ = writeln!(out, "{rule}");
    for r in &rows {
        let _ = writeln!(out, "{}", line(r));
    }
    let _ = writeln!(out, "{rule}");
    let t = &report.totals;
    let _ = write!(
        out,
        "teleports: {} raw, {} swap-adjusted ({} swap{})",
        t.num_tele,
        t.adjusted_tele,
        t.swap_count,
        if t.swap_count == 1 { "" } else { "s" }
    );
    if let Some(v) = t.vacancy_total {
        let _ = write!(out, ", vacancies {v}");
    }
    if let Some(c) = t.weighted_cost {
        let _ = write!(out, ", weighted cost {c}");
    }
    out.push('\n');
    out
}
