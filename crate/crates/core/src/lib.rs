//! Distribution of reversible-circuit qubits over capacity-limited machines
//! with a minimal number of teleportations.
//!
//! The pipeline reads a `.tfc` circuit, packs its gates into layers, splits
//! the layers into windows, and finds for each window the least teleport
//! bound whose CNF encoding is satisfiable.

pub mod alloy;
pub mod assignment;
pub mod circuit;
pub mod encode;
pub mod network;
pub mod oracle;
pub mod report;
pub mod sat;
pub mod strategy;
pub mod tfc;

pub use assignment::AssignmentSequence;
pub use circuit::{CircuitGraph, Gate, Layer};
pub use network::{Allocation, CostMatrix, NetworkSpec};
pub use strategy::{solve_circuit, Objectives, Solution, SolveConfig, Strategy};
