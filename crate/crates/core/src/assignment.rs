//! Per-state qubit placements and their accounting.

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitGraph;
use crate::network::{Allocation, NetworkSpec};

/// States `s_0..s_S`: `s_0` is the starting allocation, `s_i` the placement in
/// effect while layer `i - 1` executes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AssignmentSequence {
    states: Vec<Allocation>,
}

impl AssignmentSequence {
    pub fn new(states: Vec<Allocation>) -> Self {
        assert!(!states.is_empty(), "a sequence has at least its initial state");
        AssignmentSequence { states }
    }

    pub fn states(&self) -> &[Allocation] {
        &self.states
    }

    pub fn initial(&self) -> &Allocation {
        &self.states[0]
    }

    pub fn last(&self) -> &Allocation {
        self.states.last().expect("non-empty")
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.states.len() - 1
    }

    pub fn into_states(self) -> Vec<Allocation> {
        self.states
    }

    /// Moved-qubit count for each transition `s_{i-1} -> s_i`.
    pub fn moves_per_transition(&self) -> Vec<usize> {
        self.states.windows(2).map(|w| w[0].moves_to(&w[1])).collect()
    }

    pub fn total_moves(&self) -> usize {
        self.moves_per_transition().iter().sum()
    }

    /// Empty machines summed over states `s_1..s_S`.
    pub fn vacancy_total(&self, machine_count: usize) -> usize {
        self.states[1..].iter().map(|s| s.vacancies(machine_count)).sum()
    }

    pub fn weighted_cost(&self, net: &NetworkSpec) -> u64 {
        self.states.windows(2).map(|w| w[0].cost_to(&w[1], net)).sum()
    }

    /// Pairwise exchanges per transition: for every machine pair `{a, b}`,
    /// `min(#a->b, #b->a)`.
    pub fn swaps_per_transition(&self, machine_count: usize) -> Vec<usize> {
        self.states
            .windows(2)
            .map(|w| transition_swaps(&w[0], &w[1], machine_count))
            .collect()
    }

    /// Capacity at every state and locality of window layer `i - 1` at state `i`.
    pub fn verify(&self, window: &CircuitGraph, net: &NetworkSpec) -> Result<(), String> {
        if self.states.len() != window.layer_count() + 1 {
            return Err(format!(
                "{} states for {} layers",
                self.states.len(),
                window.layer_count()
            ));
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.qubit_count() != window.qubit_count {
                return Err(format!("state {i} places {} qubits", s.qubit_count()));
            }
            s.check(net).map_err(|e| format!("state {i}: {e}"))?;
        }
        for (layer, s) in window.layers.iter().zip(&self.states[1..]) {
            if !s.localizes(&layer.gates) {
                return Err(format!("layer {} has a non-local gate", layer.index));
            }
        }
        Ok(())
    }
}

pub(crate) fn transition_swaps(from: &Allocation, to: &Allocation, machine_count: usize) -> usize {
    let mut flow = vec![0usize; machine_count * machine_count];
    for (&a, &b) in from.as_slice().iter().zip(to.as_slice()) {
        if a != b {
            flow[a * machine_count + b] += 1;
        }
    }
    let mut swaps = 0;
    for a in 0..machine_count {
        for b in a + 1..machine_count {
            swaps += flow[a * machine_count + b].min(flow[b * machine_count + a]);
        }
    }
    swaps
}
