//! Exhaustive reference solver for tiny instances.
//!
//! States are all capacity-respecting allocations; a layered shortest-path
//! pass over them gives exact optima. This module shares no code with the
//! CNF encoder and is used to check it.

use thiserror::Error;

use crate::assignment::{transition_swaps, AssignmentSequence};
use crate::circuit::CircuitGraph;
use crate::network::{Allocation, NetworkSpec};

pub const MAX_STATES: u64 = 100_000;
pub const MAX_LAYERS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search ({machines}^{qubits} allocations, {layers} layers)")]
    TooLarge {
        machines: usize,
        qubits: usize,
        layers: usize,
    },
    #[error("no capacity-respecting allocation localizes layer {layer}")]
    Infeasible { layer: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub min_moves: usize,
    /// Largest swap count among sequences with `min_moves` moves.
    pub max_swaps_at_min: usize,
    pub witness: AssignmentSequence,
}

/// Bounds for [`oracle_feasible`]; `None` leaves a quantity free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleBounds {
    pub teleports: usize,
    pub vacancies: Option<usize>,
    pub cost: Option<u64>,
    pub min_swaps: Option<usize>,
}

fn guard(circuit: &CircuitGraph, net: &NetworkSpec) -> Result<(), OracleError> {
    let k = net.machine_count();
    let n = circuit.qubit_count;
    let count = (k as u64).checked_pow(n as u32);
    if count.is_none_or(|c| c > MAX_STATES) || circuit.layer_count() > MAX_LAYERS {
        return Err(OracleError::TooLarge {
            machines: k,
            qubits: n,
            layers: circuit.layer_count(),
        });
    }
    Ok(())
}

/// Capacity-respecting allocations in lexicographic order of placement vectors.
fn all_allocations(n: usize, net: &NetworkSpec) -> Vec<Allocation> {
    let k = net.machine_count();
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let alloc = Allocation::from_vec_unchecked(digits.clone());
        if alloc.check(net).is_ok() {
            out.push(alloc);
        }
        // increment, last qubit fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < k {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn layer_candidates(circuit: &CircuitGraph, all: &[Allocation]) -> Result<Vec<Vec<usize>>, OracleError> {
    circuit
        .layers
        .iter()
        .map(|layer| {
            let ok: Vec<usize> = (0..all.len()).filter(|&s| all[s].localizes(&layer.gates)).collect();
            if ok.is_empty() {
                Err(OracleError::Infeasible { layer: layer.index })
            } else {
                Ok(ok)
            }
        })
        .collect()
}

/// Exact minimum moved-qubit total from `initial`, with a witness.
///
/// Among optimal sequences the witness maximizes swaps, then takes the
/// lexicographically smallest predecessor at every step.
pub fn oracle_minimum(
    circuit: &CircuitGraph,
    net: &NetworkSpec,
    initial: &Allocation,
) -> Result<OracleResult, OracleError> {
    guard(circuit, net)?;
    let k = net.machine_count();
    let all = all_allocations(circuit.qubit_count, net);
    let candidates = layer_candidates(circuit, &all)?;

    // (moves, -swaps) lexicographic; predecessor index into previous layer's list
    type Key = (usize, isize);
    let mut prev_states: Vec<Allocation> = vec![initial.clone()];
    let mut prev_cost: Vec<Key> = vec![(0, 0)];
    let mut back: Vec<Vec<usize>> = Vec::new();

    for cands in &candidates {
        let mut cost = Vec::with_capacity(cands.len());
        let mut pred = Vec::with_capacity(cands.len());
        for &s in cands {
            let cur = &all[s];
            let mut best: Option<(Key, usize)> = None;
            for (p, prev) in prev_states.iter().enumerate() {
                let (m, sw) = prev_cost[p];
                let key = (m + prev.moves_to(cur), sw - transition_swaps(prev, cur, k) as isize);
                if best.is_none_or(|(b, _)| key < b) {
                    best = Some((key, p));
                }
            }
            let (key, p) = best.expect("previous layer non-empty");
            cost.push(key);
            pred.push(p);
        }
        prev_states = cands.iter().map(|&s| all[s].clone()).collect();
        prev_cost = cost;
        back.push(pred);
    }

    let (end, &(moves, neg_swaps)) = prev_cost
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (*c, i))
        .expect("at least the initial state");

    let mut seq = vec![prev_states[end].clone()];
    let mut idx = end;
    for layer in (0..back.len()).rev() {
        idx = back[layer][idx];
        let state = if layer == 0 {
            initial.clone()
        } else {
            all[candidates[layer - 1][idx]].clone()
        };
        seq.push(state);
    }
    seq.reverse();
    Ok(OracleResult {
        min_moves: moves,
        max_swaps_at_min: (-neg_swaps) as usize,
        witness: AssignmentSequence::new(seq),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Vector {
    moves: usize,
    vacancies: usize,
    cost: u64,
    swaps: usize,
}

impl Vector {
    fn dominates(&self, other: &Vector) -> bool {
        self.moves <= other.moves
            && self.vacancies <= other.vacancies
            && self.cost <= other.cost
            && self.swaps >= other.swaps
    }
}

fn insert_pareto(set: &mut Vec<Vector>, v: Vector) {
    if set.iter().any(|s| s.dominates(&v)) {
        return;
    }
    set.retain(|s| !v.dominates(s));
    set.push(v);
}

/// True iff some sequence meets every supplied bound.
pub fn oracle_feasible(
    circuit: &CircuitGraph,
    net: &NetworkSpec,
    initial: &Allocation,
    bounds: OracleBounds,
) -> Result<bool, OracleError> {
    guard(circuit, net)?;
    let k = net.machine_count();
    let all = all_allocations(circuit.qubit_count, net);
    let candidates = match layer_candidates(circuit, &all) {
        Ok(c) => c,
        Err(OracleError::Infeasible { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    let track_vac = bounds.vacancies.is_some();
    let track_cost = bounds.cost.is_some();
    let track_swaps = bounds.min_swaps.is_some();
    let within = |v: &Vector| {
        v.moves <= bounds.teleports
            && bounds.vacancies.is_none_or(|e| v.vacancies <= e)
            && bounds.cost.is_none_or(|w| v.cost <= w)
    };

    let mut prev_states: Vec<&Allocation> = vec![initial];
    let mut prev_sets: Vec<Vec<Vector>> = vec![vec![Vector {
        moves: 0,
        vacancies: 0,
        cost: 0,
        swaps: 0,
    }]];

    for cands in &candidates {
        let mut sets = Vec::with_capacity(cands.len());
        for &s in cands {
            let cur = &all[s];
            let vac = if track_vac { cur.vacancies(k) } else { 0 };
            let mut set = Vec::new();
            for (prev, pset) in prev_states.iter().zip(&prev_sets) {
                if pset.is_empty() {
                    continue;
                }
                let dm = prev.moves_to(cur);
                let dc = if track_cost { prev.cost_to(cur, net) } else { 0 };
                let ds = if track_swaps { transition_swaps(prev, cur, k) } else { 0 };
                for v in pset {
                    let next = Vector {
                        moves: v.moves + dm,
                        vacancies: v.vacancies + vac,
                        cost: v.cost + dc,
                        swaps: v.swaps + ds,
                    };
                    if within(&next) {
                        insert_pareto(&mut set, next);
                    }
                }
            }
            sets.push(set);
        }
        prev_states = cands.iter().map(|&s| &all[s]).collect();
        prev_sets = sets;
    }

    let min_swaps = bounds.min_swaps.unwrap_or(0);
    Ok(prev_sets.iter().flatten().any(|v| v.swaps >= min_swaps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn g(ops: &[usize]) -> Gate {
        Gate::new(ops.iter().copied())
    }

    #[test]
    fn local_gate_costs_nothing() {
        let c = CircuitGraph::from_layers(3, vec![vec![g(&[0, 1])]]);
        let net = NetworkSpec::homogeneous(2, 2).unwrap();
        let init = Allocation::new(vec![0, 0, 1], &net).unwrap();
        let r = oracle_minimum(&c, &net, &init).unwrap();
        assert_eq!(r.min_moves, 0);
        assert_eq!(r.witness.states(), &[init.clone(), init]);
    }

    #[test]
    fn infeasible_layer() {
        let c = CircuitGraph::from_layers(2, vec![vec![g(&[0, 1])]]);
        let net = NetworkSpec::homogeneous(2, 1).unwrap();
        assert!(net.validate(&c).is_err());
        let init = Allocation::new(vec![0, 1], &net).unwrap();
        assert_eq!(
            oracle_minimum(&c, &net, &init),
            Err(OracleError::Infeasible { layer: 0 })
        );
        assert_eq!(
            oracle_feasible(
                &c,
                &net,
                &init,
                OracleBounds {
                    teleports: 2,
                    ..Default::default()
                }
            ),
            Ok(false)
        );
    }

    #[test]
    fn guard_refuses_large() {
        let c = CircuitGraph::from_layers(20, vec![]);
        let net = NetworkSpec::homogeneous(3, 20).unwrap();
        let init = Allocation::new(vec![0; 20], &net).unwrap();
        assert!(matches!(
            oracle_minimum(&c, &net, &init),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn empty_circuit_is_free() {
        let c = CircuitGraph::from_layers(2, vec![]);
        let net = NetworkSpec::homogeneous(2, 2).unwrap();
        let init = Allocation::new(vec![0, 1], &net).unwrap();
        let r = oracle_minimum(&c, &net, &init).unwrap();
        assert_eq!(r.min_moves, 0);
        assert_eq!(r.witness.state_count(), 1);
    }

    #[test]
    fn minimum_matches_feasibility_threshold() {
        let c = CircuitGraph::from_layers(
            4,
            vec![
                vec![g(&[0, 2]), g(&[1, 3])],
                vec![g(&[0, 1])],
                vec![g(&[2, 3]), g(&[0, 1])],
            ],
        );
        let net = NetworkSpec::homogeneous(2, 2).unwrap();
        let init = Allocation::new(vec![0, 0, 1, 1], &net).unwrap();
        let r = oracle_minimum(&c, &net, &init).unwrap();
        r.witness.verify(&c, &net).unwrap();
        assert_eq!(r.witness.total_moves(), r.min_moves);
        for t in 0..=8 {
            let feasible = oracle_feasible(
                &c,
                &net,
                &init,
                OracleBounds {
                    teleports: t,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(feasible, t >= r.min_moves, "t = {t}");
        }
    }
}
