//! Satisfiability backends: the embedded CDCL solver and external DIMACS processes.

pub mod card;
mod cdcl;
pub mod cnf;

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cnf::{CnfFormula, Model, VarGroup};

/// Environment variable naming an external solver command.
pub const SOLVER_ENV: &str = "TELEDIST_SAT_SOLVER";

/// Variables annotated with this group name are branched on first by the
/// embedded solver. External solvers ignore annotations.
pub const PRIORITY_GROUP: &str = "move";

#[derive(Debug, Error)]
pub enum SatError {
    #[error("time limit of {0:?} exceeded")]
    TimeLimitExceeded(Duration),
    #[error("external solver failed: {message}\n{stderr}")]
    BackendFailure { message: String, stderr: String },
    #[error("could not parse solver output: {0}")]
    OutputUnparsable(String),
    #[error("DIMACS line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("solver returned a model that violates clause {clause}")]
    ModelRejected { clause: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SatStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub status: SatStatus,
    /// Present iff `status` is `Sat`.
    pub model: Option<Model>,
    pub stats: SatStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// In-process CDCL; `seed` 0 gives the unperturbed deterministic order.
    Embedded { seed: u64 },
    /// Command line; the DIMACS file path is appended as the last argument.
    External { command: String },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Embedded { seed: 0 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SatConfig {
    pub backend: Backend,
    pub time_limit: Option<Duration>,
}

/// Decides `formula`. Any model is checked clause by clause before it is returned.
pub fn solve(formula: &CnfFormula, config: &SatConfig) -> Result<SatResult, SatError> {
    let result = match &config.backend {
        Backend::Embedded { seed } => solve_embedded(formula, *seed, config.time_limit)?,
        Backend::External { command } => {
            let file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
            std::fs::write(file.path(), formula.to_dimacs())?;
            run_external(file.path(), command, formula.variable_count(), config.time_limit)?
        }
    };
    check_model(formula, &result)?;
    Ok(result)
}

fn solve_embedded(formula: &CnfFormula, seed: u64, time_limit: Option<Duration>) -> Result<SatResult, SatError> {
    let start = Instant::now();
    let deadline = time_limit.map(|t| start + t);
    let mut solver = cdcl::Solver::new(formula.variable_count() as usize, seed);
    for group in formula.annotations().iter().filter(|g| g.name == PRIORITY_GROUP) {
        solver.prioritize(group.first..=group.last, 1.0);
    }
    let mut consistent = true;
    for c in formula.clauses() {
        if !solver.add_clause(c) {
            consistent = false;
            break;
        }
    }
    let outcome = if consistent {
        solver.solve(deadline)
    } else {
        cdcl::Outcome::Unsat
    };
    let mut stats = solver.stats.clone();
    stats.seconds = start.elapsed().as_secs_f64();
    match outcome {
        cdcl::Outcome::Sat(values) => Ok(SatResult {
            status: SatStatus::Sat,
            model: Some(Model::from_values(values)),
            stats,
        }),
        cdcl::Outcome::Unsat => Ok(SatResult {
            status: SatStatus::Unsat,
            model: None,
            stats,
        }),
        cdcl::Outcome::Timeout => Err(SatError::TimeLimitExceeded(time_limit.unwrap_or_default())),
    }
}

fn check_model(formula: &CnfFormula, result: &SatResult) -> Result<(), SatError> {
    if let Some(model) = &result.model {
        if let Some(clause) = formula.clauses().iter().position(|c| !c.iter().any(|&l| model.lit(l))) {
            return Err(SatError::ModelRejected { clause });
        }
    }
    Ok(())
}

/// Runs `solver_command` on an existing DIMACS file and parses its `s`/`v` lines.
pub fn solve_external(dimacs_path: &Path, solver_command: &str) -> Result<SatResult, SatError> {
    let formula = CnfFormula::from_dimacs(&std::fs::read_to_string(dimacs_path)?)?;
    let result = run_external(dimacs_path, solver_command, formula.variable_count(), None)?;
    check_model(&formula, &result)?;
    Ok(result)
}

fn run_external(
    path: &Path,
    command: &str,
    variable_count: u32,
    time_limit: Option<Duration>,
) -> Result<SatResult, SatError> {
    let mut parts = command.split_whitespace();
    let program = parts.next().ok_or_else(|| SatError::BackendFailure {
        message: "empty solver command".into(),
        stderr: String::new(),
    })?;
    let start = Instant::now();
    let mut child = Command::new(program)
        .args(parts)
        .arg(path)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SatError::BackendFailure {
            message: format!("cannot start `{program}`: {e}"),
            stderr: String::new(),
        })?;

    let mut stdout_pipe = child.stdout.take().expect("piped");
    let mut stderr_pipe = child.stderr.take().expect("piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr_pipe.read_to_string(&mut s);
        s
    });

    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if let Some(limit) = time_limit {
            if start.elapsed() >= limit {
                let _ = child.kill();
                let _ = child.wait();
                return Err(SatError::TimeLimitExceeded(limit));
            }
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();

    // 10 and 20 are the conventional SAT/UNSAT exit codes
    if !matches!(status.code(), Some(0 | 10 | 20)) {
        return Err(SatError::BackendFailure {
            message: format!("`{command}` exited with {status}"),
            stderr,
        });
    }
    let mut result = parse_solver_output(&stdout, variable_count)?;
    result.stats.seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Parses competition-format solver output (`s ...` status, `v ...` model lines).
pub fn parse_solver_output(stdout: &str, variable_count: u32) -> Result<SatResult, SatError> {
    let mut status = None;
    let mut model = Model::new(variable_count);
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = match s.trim() {
                "SATISFIABLE" => Some(SatStatus::Sat),
                "UNSATISFIABLE" => Some(SatStatus::Unsat),
                other => {
                    return Err(SatError::OutputUnparsable(format!("status `{other}`")));
                }
            };
        } else if let Some(v) = line.strip_prefix("v ").or(if line == "v" { Some("") } else { None }) {
            for tok in v.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| SatError::OutputUnparsable(format!("model literal `{tok}`")))?;
                if lit != 0 {
                    if lit.unsigned_abs() > variable_count {
                        return Err(SatError::OutputUnparsable(format!(
                            "model literal {lit} beyond {variable_count} variables"
                        )));
                    }
                    model.set(lit.unsigned_abs(), lit > 0);
                }
            }
        }
    }
    match status {
        None => Err(SatError::OutputUnparsable("no `s` status line".into())),
        Some(SatStatus::Sat) => Ok(SatResult {
            status: SatStatus::Sat,
            model: Some(model),
            stats: SatStats::default(),
        }),
        Some(SatStatus::Unsat) => Ok(SatResult {
            status: SatStatus::Unsat,
            model: None,
            stats: SatStats::default(),
        }),
    }
}

/// Competition-format output for `result`, as printed by the `sat` subcommand.
pub fn format_solver_output(result: &SatResult) -> String {
    match (&result.status, &result.model) {
        (SatStatus::Sat, Some(model)) => {
            let mut out = String::from("s SATISFIABLE\n");
            let lits: Vec<String> = (1..=model.variable_count())
                .map(|v| if model.value(v) { v.to_string() } else { format!("-{v}") })
                .collect();
            for chunk in lits.chunks(20) {
                out.push_str("v ");
                out.push_str(&chunk.join(" "));
                out.push('\n');
            }
            out.push_str("v 0\n");
            out
        }
        _ => "s UNSATISFIABLE\n".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn formula(nvars: u32, clauses: &[&[i32]]) -> CnfFormula {
        let mut f = CnfFormula::new();
        f.new_vars(nvars as usize);
        for c in clauses {
            f.add_clause(c.iter().copied());
        }
        f
    }

    #[test]
    fn trivial_cases() {
        let r = solve(&formula(1, &[&[1]]), &SatConfig::default()).unwrap();
        assert_eq!(r.status, SatStatus::Sat);
        assert!(r.model.unwrap().value(1));
        let r = solve(&formula(1, &[&[1], &[-1]]), &SatConfig::default()).unwrap();
        assert_eq!(r.status, SatStatus::Unsat);
        assert!(r.model.is_none());
    }

    /// Pigeonhole: `holes + 1` pigeons into `holes` holes.
    fn pigeonhole(holes: usize) -> CnfFormula {
        let pigeons = holes + 1;
        let var = |p: usize, h: usize| (p * holes + h + 1) as i32;
        let mut f = CnfFormula::new();
        f.new_vars(pigeons * holes);
        for p in 0..pigeons {
            f.add_clause((0..holes).map(|h| var(p, h)));
        }
        for h in 0..holes {
            for a in 0..pigeons {
                for b in a + 1..pigeons {
                    f.add_clause([-var(a, h), -var(b, h)]);
                }
            }
        }
        f
    }

    #[test]
    fn pigeonhole_is_unsat() {
        for holes in 1..=7 {
            let r = solve(&pigeonhole(holes), &SatConfig::default()).unwrap();
            assert_eq!(r.status, SatStatus::Unsat, "php {holes}");
        }
    }

    #[test]
    fn time_limit_is_not_unsat() {
        let cfg = SatConfig {
            backend: Backend::Embedded { seed: 0 },
            time_limit: Some(Duration::from_millis(1)),
        };
        match solve(&pigeonhole(11), &cfg) {
            Err(SatError::TimeLimitExceeded(_)) => {}
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn output_parsing() {
        let r = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap();
        let m = r.model.unwrap();
        assert!(m.value(1) && !m.value(2) && m.value(3));
        assert_eq!(
            parse_solver_output("s UNSATISFIABLE\n", 3).unwrap().status,
            SatStatus::Unsat
        );
        assert!(matches!(
            parse_solver_output("nothing\n", 3),
            Err(SatError::OutputUnparsable(_))
        ));
        assert!(matches!(
            parse_solver_output("s SATISFIABLE\nv 9 0\n", 3),
            Err(SatError::OutputUnparsable(_))
        ));
        let text = format_solver_output(&r_sat());
        assert_eq!(text, "s SATISFIABLE\nv 1 -2\nv 0\n");
    }

    fn r_sat() -> SatResult {
        SatResult {
            status: SatStatus::Sat,
            model: Some(Model::from_values(vec![true, false])),
            stats: SatStats::default(),
        }
    }

    #[test]
    fn missing_external_command() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.cnf");
        std::fs::write(&path, "p cnf 1 1\n1 0\n").unwrap();
        assert!(matches!(
            solve_external(&path, "/nonexistent/solver-binary"),
            Err(SatError::BackendFailure { .. })
        ));
    }

    fn brute_force(f: &CnfFormula) -> bool {
        let n = f.variable_count();
        (0u32..1 << n).any(|bits| {
            let m = Model::from_values((0..n).map(|i| bits >> i & 1 == 1).collect());
            f.is_satisfied_by(&m)
        })
    }

    fn arb_cnf() -> impl Strategy<Value = CnfFormula> {
        (1u32..10).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            prop::collection::vec(prop::collection::vec(lit, 1..4), 0..45).prop_map(move |clauses| {
                let mut f = CnfFormula::new();
                f.new_vars(n as usize);
                for c in clauses {
                    f.add_clause(c);
                }
                f
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn agrees_with_brute_force(f in arb_cnf(), seed in 0u64..4) {
            let cfg = SatConfig { backend: Backend::Embedded { seed }, time_limit: None };
            let r = solve(&f, &cfg).unwrap();
            prop_assert_eq!(r.status == SatStatus::Sat, brute_force(&f));
        }
    }
}
