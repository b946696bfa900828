//! Machine network: capacities, per-link teleport costs and initial qubit placement.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::CircuitGraph;

/// PRNG behind [`allocate_random`]; echoed in reports.
pub const RANDOM_ALLOCATION_PRNG: &str = "ChaCha8 (rand_chacha), Fisher-Yates slot shuffle";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("a network needs at least one machine")]
    NoMachines,
    #[error("machine {machine} has zero capacity")]
    ZeroCapacity { machine: usize },
    #[error("cost matrix is {rows}x? but the network has {machines} machines")]
    CostShape { rows: usize, machines: usize },
    #[error("cost matrix diagonal entry ({machine},{machine}) is {value}, expected 0")]
    NonZeroDiagonal { machine: usize, value: u32 },
    #[error("cost matrix line {line}: {message}")]
    CostParse { line: usize, message: String },
    #[error("qubit {qubit} is assigned more than once")]
    DuplicateQubit { qubit: usize },
    #[error("qubit {qubit} has no machine")]
    NotTotal { qubit: usize },
    #[error("machine {machine} holds {count} qubits, capacity is {capacity}")]
    CapacityExceeded {
        machine: usize,
        count: usize,
        capacity: usize,
    },
    #[error("qubit {qubit} out of range for a {qubit_count}-qubit circuit")]
    QubitOutOfRange { qubit: usize, qubit_count: usize },
    #[error("machine {machine} does not exist")]
    MachineOutOfRange { machine: usize },
}

/// Square, zero-diagonal teleport cost matrix; row = source machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostMatrix {
    rows: Vec<Vec<u32>>,
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self, NetworkError> {
        let k = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(NetworkError::CostShape {
                    rows: k,
                    machines: row.len(),
                });
            }
            if row[i] != 0 {
                return Err(NetworkError::NonZeroDiagonal {
                    machine: i,
                    value: row[i],
                });
            }
        }
        Ok(CostMatrix { rows })
    }

    /// All off-diagonal entries 1.
    pub fn unit(k: usize) -> Self {
        CostMatrix {
            rows: (0..k).map(|i| (0..k).map(|j| u32::from(i != j)).collect()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn cost(&self, from: usize, to: usize) -> u32 {
        self.rows[from][to]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn max_cost(&self) -> u32 {
        self.rows.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Parses `k` followed by `k` rows of `k` integers.
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first_line, first) = lines.next().ok_or(NetworkError::CostParse {
            line: 1,
            message: "empty cost matrix file".into(),
        })?;
        let k: usize = first.parse().map_err(|_| NetworkError::CostParse {
            line: first_line,
            message: format!("expected machine count, found `{first}`"),
        })?;
        let mut rows = Vec::with_capacity(k);
        for (line, text) in lines {
            let row = text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>().map_err(|_| NetworkError::CostParse {
                        line,
                        message: format!("`{tok}` is not a non-negative integer"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != k {
                return Err(NetworkError::CostParse {
                    line,
                    message: format!("expected {k} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(NetworkError::CostShape {
                rows: rows.len(),
                machines: k,
            });
        }
        CostMatrix::new(rows)
    }
}

impl fmt::Display for CostMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.rows.len())?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    capacities: Vec<usize>,
    cost_matrix: Option<CostMatrix>,
}

impl NetworkSpec {
    pub fn new(capacities: Vec<usize>) -> Result<Self, NetworkError> {
        if capacities.is_empty() {
            return Err(NetworkError::NoMachines);
        }
        if let Some(machine) = capacities.iter().position(|&c| c == 0) {
            return Err(NetworkError::ZeroCapacity { machine });
        }
        Ok(NetworkSpec {
            capacities,
            cost_matrix: None,
        })
    }

    pub fn homogeneous(machines: usize, capacity: usize) -> Result<Self, NetworkError> {
        Self::new(vec![capacity; machines])
    }

    pub fn with_cost_matrix(mut self, matrix: CostMatrix) -> Result<Self, NetworkError> {
        if matrix.size() != self.machine_count() {
            return Err(NetworkError::CostShape {
                rows: matrix.size(),
                machines: self.machine_count(),
            });
        }
        self.cost_matrix = Some(matrix);
        Ok(self)
    }

    pub fn machine_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn capacity(&self, machine: usize) -> usize {
        self.capacities[machine]
    }

    pub fn total_capacity(&self) -> usize {
        self.capacities.iter().sum()
    }

    pub fn max_capacity(&self) -> usize {
        self.capacities.iter().copied().max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.capacities.windows(2).all(|w| w[0] == w[1])
    }

    pub fn cost_matrix(&self) -> Option<&CostMatrix> {
        self.cost_matrix.as_ref()
    }

    /// Cost of moving one qubit; unit cost off the diagonal without a matrix.
    pub fn move_cost(&self, from: usize, to: usize) -> u32 {
        match &self.cost_matrix {
            Some(m) => m.cost(from, to),
            None => u32::from(from != to),
        }
    }

    /// Checks that `circuit` fits: enough total room and a machine large enough
    /// for the widest gate. Returns every violated condition.
    pub fn validate(&self, circuit: &CircuitGraph) -> Result<(), Vec<Diagnostic>> {
        let mut diags = Vec::new();
        if self.total_capacity() < circuit.qubit_count {
            diags.push(Diagnostic::CapacitySum {
                total: self.total_capacity(),
                qubits: circuit.qubit_count,
            });
        }
        if circuit.max_arity() > self.max_capacity() {
            diags.push(Diagnostic::GateTooWide {
                arity: circuit.max_arity(),
                max_capacity: self.max_capacity(),
            });
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diagnostic {
    CapacitySum { total: usize, qubits: usize },
    GateTooWide { arity: usize, max_capacity: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::CapacitySum { total, qubits } => write!(
                f,
                "total machine capacity {total} is less than the {qubits} qubits of the circuit"
            ),
            Diagnostic::GateTooWide { arity, max_capacity } => write!(
                f,
                "a gate of arity {arity} cannot fit on any machine (largest capacity {max_capacity})"
            ),
        }
    }
}

/// Qubit-to-machine map, indexed by qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(Vec<usize>);

impl Allocation {
    /// Wraps a placement vector after checking range and capacity.
    pub fn new(placement: Vec<usize>, net: &NetworkSpec) -> Result<Self, NetworkError> {
        let alloc = Allocation(placement);
        alloc.check(net)?;
        Ok(alloc)
    }

    /// No checks; for callers that already hold a valid placement.
    pub(crate) fn from_vec_unchecked(placement: Vec<usize>) -> Self {
        Allocation(placement)
    }

    pub fn machine_of(&self, qubit: usize) -> usize {
        self.0[qubit]
    }

    pub fn qubit_count(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Qubits on `machine`, ascending.
    pub fn qubits_on(&self, machine: usize) -> Vec<usize> {
        (0..self.0.len()).filter(|&q| self.0[q] == machine).collect()
    }

    pub fn load(&self, machine_count: usize) -> Vec<usize> {
        let mut load = vec![0; machine_count];
        for &m in &self.0 {
            load[m] += 1;
        }
        load
    }

    pub fn check(&self, net: &NetworkSpec) -> Result<(), NetworkError> {
        let k = net.machine_count();
        if let Some(&machine) = self.0.iter().find(|&&m| m >= k) {
            return Err(NetworkError::MachineOutOfRange { machine });
        }
        for (machine, count) in self.load(k).into_iter().enumerate() {
            if count > net.capacity(machine) {
                return Err(NetworkError::CapacityExceeded {
                    machine,
                    count,
                    capacity: net.capacity(machine),
                });
            }
        }
        Ok(())
    }

    /// Number of qubits placed differently in `other`.
    pub fn moves_to(&self, other: &Allocation) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn vacancies(&self, machine_count: usize) -> usize {
        self.load(machine_count).iter().filter(|&&c| c == 0).count()
    }

    pub fn cost_to(&self, other: &Allocation, net: &NetworkSpec) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| u64::from(net.move_cost(a, b)))
            .sum()
    }

    /// Every gate's operands share one machine.
    pub fn localizes(&self, gates: &[crate::circuit::Gate]) -> bool {
        gates.iter().all(|g| {
            let first = self.0[g.operands()[0]];
            g.operands().iter().all(|&q| self.0[q] == first)
        })
    }
}

/// Fills machine 0 to capacity, then machine 1, and so on.
pub fn allocate_in_order(net: &NetworkSpec, qubit_count: usize) -> Result<Allocation, NetworkError> {
    let slots = slot_list(net);
    if slots.len() < qubit_count {
        return Err(NetworkError::CapacityExceeded {
            machine: net.machine_count() - 1,
            count: qubit_count,
            capacity: slots.len(),
        });
    }
    Ok(Allocation(slots[..qubit_count].to_vec()))
}

/// Shuffles the capacity-expanded slot list with a seeded ChaCha8 stream and
/// gives qubit `i` slot `i`.
pub fn allocate_random(net: &NetworkSpec, qubit_count: usize, seed: u64) -> Result<Allocation, NetworkError> {
    let mut slots = slot_list(net);
    if slots.len() < qubit_count {
        return Err(NetworkError::CapacityExceeded {
            machine: net.machine_count() - 1,
            count: qubit_count,
            capacity: slots.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    slots.shuffle(&mut rng);
    slots.truncate(qubit_count);
    Ok(Allocation(slots))
}

fn slot_list(net: &NetworkSpec) -> Vec<usize> {
    net.capacities()
        .iter()
        .enumerate()
        .flat_map(|(m, &c)| std::iter::repeat_n(m, c))
        .collect()
}

/// Builds an allocation from explicit `(qubit, machine)` pairs.
pub fn explicit_allocation(
    pairs: &[(usize, usize)],
    qubit_count: usize,
    net: &NetworkSpec,
) -> Result<Allocation, NetworkError> {
    let mut placement: Vec<Option<usize>> = vec![None; qubit_count];
    for &(qubit, machine) in pairs {
        if qubit >= qubit_count {
            return Err(NetworkError::QubitOutOfRange { qubit, qubit_count });
        }
        if machine >= net.machine_count() {
            return Err(NetworkError::MachineOutOfRange { machine });
        }
        if placement[qubit].replace(machine).is_some() {
            return Err(NetworkError::DuplicateQubit { qubit });
        }
    }
    let placement = placement
        .into_iter()
        .enumerate()
        .map(|(qubit, m)| m.ok_or(NetworkError::NotTotal { qubit }))
        .collect::<Result<Vec<_>, _>>()?;
    Allocation::new(placement, net)
}
