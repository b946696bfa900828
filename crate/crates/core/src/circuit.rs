//! Layered circuit-graph model.
//!
//! Gates are reduced to the set of qubits they touch. A layer is a set of
//! gates on pairwise-disjoint qubits; layers execute left to right.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A gate, reduced to its operand set. Operands are kept sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    operands: Vec<usize>,
}

impl Gate {
    pub fn new(operands: impl IntoIterator<Item = usize>) -> Self {
        let mut operands: Vec<usize> = operands.into_iter().collect();
        operands.sort_unstable();
        operands.dedup();
        assert!(!operands.is_empty(), "a gate needs at least one operand");
        Gate { operands }
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn arity(&self) -> usize {
        self.operands.len()
    }

    pub fn shares_qubit(&self, other: &Gate) -> bool {
        // both sorted
        let (mut i, mut j) = (0, 0);
        while i < self.operands.len() && j < other.operands.len() {
            match self.operands[i].cmp(&other.operands[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Path over the operands in ascending order. Its connectivity forces
    /// all operands onto one machine.
    pub fn edge_chain(&self) -> Vec<(usize, usize)> {
        self.operands.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub index: usize,
    pub gates: Vec<Gate>,
}

impl Layer {
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.gates.iter().flat_map(|g| g.operands().iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitGraph {
    pub qubit_count: usize,
    pub layers: Vec<Layer>,
}

impl CircuitGraph {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn max_arity(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| l.gates.iter().map(Gate::arity))
            .max()
            .unwrap_or(0)
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    /// Builds a graph directly from explicit layers (each inner list one layer).
    pub fn from_layers(qubit_count: usize, layers: Vec<Vec<Gate>>) -> Self {
        let layers = layers
            .into_iter()
            .enumerate()
            .map(|(index, gates)| Layer { index, gates })
            .collect();
        let graph = CircuitGraph { qubit_count, layers };
        debug_assert!(graph.check_invariants().is_ok());
        graph
    }

    /// Copy of layers `range` renumbered from 0.
    pub fn window(&self, range: std::ops::Range<usize>) -> CircuitGraph {
        CircuitGraph::from_layers(
            self.qubit_count,
            self.layers[range].iter().map(|l| l.gates.clone()).collect(),
        )
    }

    /// Checks operand range, per-layer disjointness and index numbering.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.index != i {
                return Err(format!("layer {i} carries index {}", layer.index));
            }
            let mut used = vec![false; self.qubit_count];
            for q in layer.qubits() {
                if q >= self.qubit_count {
                    return Err(format!("layer {i}: qubit {q} out of range"));
                }
                if std::mem::replace(&mut used[q], true) {
                    return Err(format!("layer {i}: qubit {q} used twice"));
                }
            }
        }
        Ok(())
    }
}

/// Text dump, one line per layer: `layer 0: (q1,q2)(q3,q4)` with 1-based qubit labels.
impl fmt::Display for CircuitGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for layer in &self.layers {
            write!(f, "layer {}: ", layer.index)?;
            for g in &layer.gates {
                let names: Vec<String> = g.operands().iter().map(|q| format!("q{}", q + 1)).collect();
                write!(f, "({})", names.join(","))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Error in a layer listing, with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LayerTextError {
    pub line: usize,
    pub message: String,
}

impl CircuitGraph {
    /// Layer listing in the dump format, preceded by a `qubits N` header.
    pub fn to_layer_text(&self) -> String {
        format!("qubits {}\n{self}", self.qubit_count)
    }

    /// Parses a layer listing: an optional `qubits N` header and one
    /// `layer i: (q1,q2)(q3,q4)` line per layer, in order. `#` starts a comment.
    /// Without a header the qubit count is the largest label used.
    pub fn parse_layer_text(text: &str) -> Result<CircuitGraph, LayerTextError> {
        let mut declared = None;
        let mut layers: Vec<Vec<Gate>> = Vec::new();
        let mut max_label = 0;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let err = |message: String| LayerTextError { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(n) = content.strip_prefix("qubits") {
                if declared.is_some() || !layers.is_empty() {
                    return Err(err("qubits header must come first".into()));
                }
                declared = Some(
                    n.trim()
                        .parse::<usize>()
                        .map_err(|e| err(format!("qubit count: {e}")))?,
                );
                continue;
            }
            let (head, body) = content
                .split_once(':')
                .ok_or_else(|| err("expected `layer <index>: <gates>`".into()))?;
            let index = head
                .trim()
                .strip_prefix("layer")
                .and_then(|i| i.trim().parse::<usize>().ok())
                .ok_or_else(|| err(format!("bad layer header `{}`", head.trim())))?;
            if index != layers.len() {
                return Err(err(format!("layer {index} out of order, expected {}", layers.len())));
            }
            let mut gates = Vec::new();
            let mut rest = body.trim();
            while !rest.is_empty() {
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|r| r.split_once(')'))
                    .ok_or_else(|| err(format!("bad gate near `{rest}`")))?;
                let mut ops = Vec::new();
                for name in inner.0.split(',') {
                    let label = name
                        .trim()
                        .strip_prefix('q')
                        .and_then(|d| d.parse::<usize>().ok())
                        .filter(|&d| d >= 1)
                        .ok_or_else(|| err(format!("bad qubit label `{}`", name.trim())))?;
                    max_label = max_label.max(label);
                    ops.push(label - 1);
                }
                gates.push(Gate::new(ops));
                rest = inner.1.trim_start();
            }
            layers.push(gates);
        }
        let qubit_count = declared.unwrap_or(max_label);
        if max_label > qubit_count {
            return Err(LayerTextError {
                line: 0,
                message: format!("label q{max_label} exceeds declared {qubit_count} qubits"),
            });
        }
        let graph = CircuitGraph {
            qubit_count,
            layers: layers
                .into_iter()
                .enumerate()
                .map(|(index, gates)| Layer { index, gates })
                .collect(),
        };
        graph
            .check_invariants()
            .map_err(|message| LayerTextError { line: 0, message })?;
        Ok(graph)
    }
}

/// Keeps only gates of arity two or more; single-qubit gates never need a teleport.
pub fn drop_unary_gates(gates: Vec<Gate>) -> Vec<Gate> {
    gates.into_iter().filter(|g| g.arity() >= 2).collect()
}

/// ASAP layering: each gate goes into the earliest layer after the last layer
/// touching any of its qubits.
pub fn pack_layers(gates: &[Gate], qubit_count: usize) -> CircuitGraph {
    // next free layer per qubit
    let mut frontier = vec![0usize; qubit_count];
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    for gate in gates {
        let at = gate.operands().iter().map(|&q| frontier[q]).max().unwrap_or(0);
        if at == layers.len() {
            layers.push(Vec::new());
        }
        layers[at].push(gate.clone());
        for &q in gate.operands() {
            frontier[q] = at + 1;
        }
    }
    CircuitGraph::from_layers(qubit_count, layers)
}

/// Drops unary gates then layers the remainder.
pub fn normalize(gates: Vec<Gate>, qubit_count: usize) -> CircuitGraph {
    pack_layers(&drop_unary_gates(gates), qubit_count)
}
