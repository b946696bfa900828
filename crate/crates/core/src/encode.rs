//! CNF encoding of one bounded distribution question.
//!
//! For a window of `S` layers the encoding has states `s_0..s_S`. `s_0` is
//! pinned to the starting allocation; layer `i - 1` must be local at `s_i`.
//! Moves are counted from `s_0` on, so a start that does not already
//! localize the first layer still yields a well-defined instance.
//!
//! Variable groups, in allocation order:
//! * `placement` (`x(i, q, m)`): qubit `q` on machine `m` in state `i`;
//! * `gate` (`y(g, m)`): gate `g` runs on machine `m`;
//! * `move` (`mv(i, q)`): `s_i(q) != s_{i-1}(q)`;
//! * `vacancy` (`z(i, m)`): machine `m` empty in state `i >= 1`;
//! * `cost-unary` (`t(i, q, a, b)`): `q` moves `a -> b` at transition `i`;
//! * `swap` (`p(i, q, r)`): `q` and `r` exchange machines at transition `i`;
//! * `counter`: sequential-counter registers.

use std::fmt::Write as _;

use thiserror::Error;

use crate::assignment::AssignmentSequence;
use crate::circuit::CircuitGraph;
use crate::network::{Allocation, NetworkSpec};
use crate::sat::card::{at_least, at_most};
use crate::sat::{CnfFormula, Model};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("invalid instance: {0}")]
    InstanceInvalid(String),
    #[error("model inconsistent at state {state}, qubit {qubit}: {found} machines selected")]
    ModelInconsistent { state: usize, qubit: usize, found: usize },
    #[error("sidecar line {line}: {message}")]
    Sidecar { line: usize, message: String },
}

/// Upper bounds of one decision question. `None` leaves a quantity unconstrained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bounds {
    pub teleports: u32,
    pub vacancies: Option<u32>,
    pub cost: Option<u32>,
    /// Lower bound on pairwise exchanges; used to prefer swap-rich optima.
    pub min_swaps: Option<u32>,
}

impl Bounds {
    pub fn teleports(t: u32) -> Self {
        Bounds {
            teleports: t,
            ..Bounds::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecisionInstance<'a> {
    /// Layers of the window, numbered from 0.
    pub window: &'a CircuitGraph,
    pub net: &'a NetworkSpec,
    pub initial: &'a Allocation,
    pub bounds: Bounds,
}

/// Variable map from states, qubits and machines to CNF variable ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateIndexing {
    states: usize,
    qubits: usize,
    machines: usize,
    placement_base: i32,
    move_base: i32,
}

impl StateIndexing {
    /// Number of states including `s_0`.
    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn machine_count(&self) -> usize {
        self.machines
    }

    /// Variable for "qubit `q` on machine `m` in state `i`".
    pub fn var(&self, state: usize, qubit: usize, machine: usize) -> i32 {
        debug_assert!(state < self.states && qubit < self.qubits && machine < self.machines);
        self.placement_base + ((state * self.qubits + qubit) * self.machines + machine) as i32
    }

    /// Variable for "qubit `q` moved between `s_{i-1}` and `s_i`", `i >= 1`.
    pub fn move_var(&self, state: usize, qubit: usize) -> i32 {
        debug_assert!(state >= 1 && state < self.states);
        self.move_base + ((state - 1) * self.qubits + qubit) as i32
    }

    /// `i q m var_id` rows for decoding models produced elsewhere.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# states {} qubits {} machines {}",
            self.states, self.qubits, self.machines
        );
        for i in 0..self.states {
            for q in 0..self.qubits {
                for m in 0..self.machines {
                    let _ = writeln!(out, "{i} {q} {m} {}", self.var(i, q, m));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct EncodedInstance {
    pub formula: CnfFormula,
    pub indexing: StateIndexing,
}

fn check_instance(inst: &DecisionInstance<'_>) -> Result<(), EncodeError> {
    let invalid = |m: String| Err(EncodeError::InstanceInvalid(m));
    if inst.window.layer_count() == 0 {
        return invalid("empty window".into());
    }
    if let Err(diags) = inst.net.validate(inst.window) {
        let text: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return invalid(text.join("; "));
    }
    if inst.initial.qubit_count() != inst.window.qubit_count {
        return invalid(format!(
            "initial allocation covers {} qubits, circuit has {}",
            inst.initial.qubit_count(),
            inst.window.qubit_count
        ));
    }
    if let Err(e) = inst.initial.check(inst.net) {
        return invalid(format!("initial allocation: {e}"));
    }
    if let Err(e) = inst.window.check_invariants() {
        return invalid(e);
    }
    Ok(())
}

/// Builds a formula that is satisfiable iff some assignment sequence meets
/// locality, capacity and every bound in `inst.bounds`.
pub fn encode(inst: &DecisionInstance<'_>) -> Result<EncodedInstance, EncodeError> {
    check_instance(inst)?;
    let n = inst.window.qubit_count;
    let k = inst.net.machine_count();
    let layers = inst.window.layer_count();
    let states = layers + 1;
    let mut f = CnfFormula::new();

    let placement = f.new_vars(states * n * k);
    f.annotate("placement", placement.clone());
    let moves = f.new_vars(layers * n);
    f.annotate("move", moves.clone());
    let ix = StateIndexing {
        states,
        qubits: n,
        machines: k,
        placement_base: placement.start,
        move_base: moves.start,
    };

    for q in 0..n {
        let home = inst.initial.machine_of(q);
        for m in 0..k {
            let v = ix.var(0, q, m);
            f.add_clause([if m == home { v } else { -v }]);
        }
    }

    for i in 1..states {
        for q in 0..n {
            f.add_clause((0..k).map(|m| ix.var(i, q, m)));
            for a in 0..k {
                for b in a + 1..k {
                    f.add_clause([-ix.var(i, q, a), -ix.var(i, q, b)]);
                }
            }
        }
        for m in 0..k {
            let cap = inst.net.capacity(m);
            if cap < n {
                let on: Vec<i32> = (0..n).map(|q| ix.var(i, q, m)).collect();
                at_most(&mut f, &on, cap);
            }
        }
    }

    let gate_start = f.variable_count() as i32 + 1;
    for (layer_idx, layer) in inst.window.layers.iter().enumerate() {
        let i = layer_idx + 1;
        for gate in &layer.gates {
            let hosts: Vec<usize> = (0..k).filter(|&m| inst.net.capacity(m) >= gate.arity()).collect();
            let ys: Vec<i32> = hosts.iter().map(|_| f.new_var()).collect();
            f.add_clause(ys.iter().copied());
            for a in 0..ys.len() {
                for b in a + 1..ys.len() {
                    f.add_clause([-ys[a], -ys[b]]);
                }
            }
            for (&y, &m) in ys.iter().zip(&hosts) {
                for &q in gate.operands() {
                    f.add_clause([-y, ix.var(i, q, m)]);
                }
            }
        }
    }
    f.annotate("gate", gate_start..f.variable_count() as i32 + 1);

    let mut move_lits = Vec::with_capacity(layers * n);
    for i in 1..states {
        for q in 0..n {
            let mv = ix.move_var(i, q);
            move_lits.push(mv);
            for m in 0..k {
                let (prev, cur) = (ix.var(i - 1, q, m), ix.var(i, q, m));
                f.add_clause([-prev, cur, mv]);
                f.add_clause([-mv, -prev, -cur]);
            }
        }
    }
    at_most(&mut f, &move_lits, inst.bounds.teleports as usize);

    if let Some(e) = inst.bounds.vacancies {
        let zs = f.new_vars(layers * k);
        f.annotate("vacancy", zs.clone());
        let zs: Vec<i32> = zs.collect();
        for i in 1..states {
            for m in 0..k {
                let z = zs[(i - 1) * k + m];
                let mut some = vec![z];
                for q in 0..n {
                    let x = ix.var(i, q, m);
                    some.push(x);
                    f.add_clause([-z, -x]);
                }
                f.add_clause(some);
            }
        }
        at_most(&mut f, &zs, e as usize);
    }

    if let Some(w) = inst.bounds.cost {
        let start = f.variable_count() as i32 + 1;
        let mut units = Vec::new();
        for i in 1..states {
            for q in 0..n {
                for a in 0..k {
                    if i == 1 && a != inst.initial.machine_of(q) {
                        continue;
                    }
                    for b in 0..k {
                        let c = inst.net.move_cost(a, b);
                        if a == b || c == 0 {
                            continue;
                        }
                        let t = f.new_var();
                        let (from, to) = (ix.var(i - 1, q, a), ix.var(i, q, b));
                        f.add_clause([-from, -to, t]);
                        f.add_clause([-t, from]);
                        f.add_clause([-t, to]);
                        units.extend(std::iter::repeat_n(t, c as usize));
                    }
                }
            }
        }
        f.annotate("cost-unary", start..f.variable_count() as i32 + 1);
        at_most(&mut f, &units, w as usize);
    }

    if let Some(s) = inst.bounds.min_swaps.filter(|&s| s > 0) {
        let start = f.variable_count() as i32 + 1;
        let mut pairs = Vec::new();
        for i in 1..states {
            let mut touching: Vec<Vec<i32>> = vec![Vec::new(); n];
            for q in 0..n {
                for r in q + 1..n {
                    let p = f.new_var();
                    for m in 0..k {
                        f.add_clause([-p, -ix.var(i - 1, q, m), ix.var(i, r, m)]);
                        f.add_clause([-p, -ix.var(i - 1, r, m), ix.var(i, q, m)]);
                        f.add_clause([-p, -ix.var(i - 1, q, m), -ix.var(i - 1, r, m)]);
                    }
                    f.add_clause([-p, ix.move_var(i, q)]);
                    f.add_clause([-p, ix.move_var(i, r)]);
                    touching[q].push(p);
                    touching[r].push(p);
                    pairs.push(p);
                }
            }
            for group in &touching {
                at_most(&mut f, group, 1);
            }
        }
        f.annotate("swap", start..f.variable_count() as i32 + 1);
        at_least(&mut f, &pairs, s as usize);
    }

    Ok(EncodedInstance {
        formula: f,
        indexing: ix,
    })
}

/// Reads the placement of every qubit in every state from `model`.
pub fn decode(encoded: &EncodedInstance, model: &Model) -> Result<AssignmentSequence, EncodeError> {
    let ix = &encoded.indexing;
    decode_with(ix.states, ix.qubits, ix.machines, model, |i, q, m| ix.var(i, q, m))
}

fn decode_with(
    states: usize,
    qubits: usize,
    machines: usize,
    model: &Model,
    var: impl Fn(usize, usize, usize) -> i32,
) -> Result<AssignmentSequence, EncodeError> {
    let mut seq = Vec::with_capacity(states);
    for i in 0..states {
        let mut placement = Vec::with_capacity(qubits);
        for q in 0..qubits {
            let on: Vec<usize> = (0..machines).filter(|&m| model.lit(var(i, q, m))).collect();
            if on.len() != 1 {
                return Err(EncodeError::ModelInconsistent {
                    state: i,
                    qubit: q,
                    found: on.len(),
                });
            }
            placement.push(on[0]);
        }
        seq.push(Allocation::from_vec_unchecked(placement));
    }
    Ok(AssignmentSequence::new(seq))
}

/// Decodes a model using a sidecar produced by [`StateIndexing::to_sidecar`].
pub fn decode_with_sidecar(sidecar: &str, model: &Model) -> Result<AssignmentSequence, EncodeError> {
    let mut rows = Vec::new();
    let (mut states, mut qubits, mut machines) = (0, 0, 0);
    for (idx, line) in sidecar.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| EncodeError::Sidecar {
                line: idx + 1,
                message: format!("expected integers, found `{line}`"),
            })?;
        let [i, q, m, v] = nums[..] else {
            return Err(EncodeError::Sidecar {
                line: idx + 1,
                message: "expected `i q m var_id`".into(),
            });
        };
        states = states.max(i + 1);
        qubits = qubits.max(q + 1);
        machines = machines.max(m + 1);
        rows.push((i, q, m, v as i32));
    }
    let mut table = vec![0i32; states * qubits * machines];
    for (i, q, m, v) in rows {
        table[(i * qubits + q) * machines + m] = v;
    }
    if let Some(pos) = table.iter().position(|&v| v == 0) {
        return Err(EncodeError::Sidecar {
            line: 0,
            message: format!("missing entry {pos} in variable map"),
        });
    }
    decode_with(states, qubits, machines, model, |i, q, m| {
        table[(i * qubits + q) * machines + m]
    })
}
