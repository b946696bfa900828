#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use teledist::network::allocate_random;
use teledist::{Allocation, CircuitGraph, CostMatrix, Gate, NetworkSpec};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn layers(name: &str) -> CircuitGraph {
    CircuitGraph::parse_layer_text(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

pub fn circuit1() -> (CircuitGraph, NetworkSpec, Allocation) {
    let net = NetworkSpec::homogeneous(2, 3).unwrap();
    let init = Allocation::new(vec![0, 0, 1, 1], &net).unwrap();
    (layers("circuit1.layers"), net, init)
}

pub fn circuit2() -> (CircuitGraph, NetworkSpec, Allocation) {
    let net = NetworkSpec::homogeneous(3, 4).unwrap();
    let init = Allocation::new(vec![1, 0, 1, 2, 0], &net).unwrap();
    (layers("circuit2.layers"), net, init)
}

pub fn hetero3() -> CostMatrix {
    CostMatrix::parse(&std::fs::read_to_string(data("hetero3.cost")).unwrap()).unwrap()
}

/// A small random instance: capacities cover the qubits and the widest gate.
#[derive(Debug, Clone)]
pub struct Instance {
    pub circuit: CircuitGraph,
    pub net: NetworkSpec,
    pub initial: Allocation,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_k: usize, max_layers: usize) -> Instance {
    let n = rng.random_range(2..=max_n);
    let k = rng.random_range(1..=max_k);
    let mut caps: Vec<usize> = (0..k).map(|_| rng.random_range(1..=n)).collect();
    while caps.iter().sum::<usize>() < n {
        let m = rng.random_range(0..k);
        caps[m] += 1;
    }
    let widest = *caps.iter().max().unwrap();
    let l = rng.random_range(1..=max_layers);
    let mut layers = Vec::with_capacity(l);
    for _ in 0..l {
        let mut qubits: Vec<usize> = (0..n).collect();
        qubits.shuffle(rng);
        let mut gates = Vec::new();
        let mut rest = &qubits[..];
        while rest.len() >= 2 && widest >= 2 && rng.random_bool(0.7) {
            let arity = rng.random_range(2..=rest.len().min(widest).min(3));
            gates.push(Gate::new(rest[..arity].iter().copied()));
            rest = &rest[arity..];
        }
        layers.push(gates);
    }
    let mut net = NetworkSpec::new(caps).unwrap();
    if rng.random_bool(0.5) {
        let rows = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| if a == b { 0 } else { rng.random_range(1..=3) })
                    .collect()
            })
            .collect();
        net = net.with_cost_matrix(CostMatrix::new(rows).unwrap()).unwrap();
    }
    let initial = allocate_random(&net, n, rng.random()).unwrap();
    Instance {
        circuit: CircuitGraph::from_layers(n, layers),
        net,
        initial,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Synthetic large circuit: `layers` layers of 1-3 gates of arity 2-4.
pub fn synthetic_circuit(seed: u64, n: usize, layers: usize) -> CircuitGraph {
    let mut rng = rng(seed);
    let list = (0..layers)
        .map(|_| {
            let mut qubits: Vec<usize> = (0..n).collect();
            qubits.shuffle(&mut rng);
            let count = rng.random_range(1..=3);
            let mut rest = &qubits[..];
            let mut gates = Vec::new();
            for _ in 0..count {
                let arity = rng.random_range(2..=4);
                gates.push(Gate::new(rest[..arity].iter().copied()));
                rest = &rest[arity..];
            }
            gates
        })
        .collect();
    CircuitGraph::from_layers(n, list)
}
