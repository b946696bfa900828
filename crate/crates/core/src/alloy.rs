//! Alloy model text for a placement problem.
//!
//! The emitted model uses one `circGraph` atom per layer: the first atom
//! carries layer 0 and the initial allocation, and each later atom must
//! localize its own layer. This is the relational formulation; the CNF
//! encoder instead adds a separate initial state before layer 0. The two
//! agree whenever the initial allocation already localizes layer 0.

use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::CircuitGraph;
use crate::network::{Allocation, NetworkSpec};

/// Largest `qubits + machines + layers` the emitter accepts.
pub const MAX_ATOMS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlloyError {
    #[error("model needs {atoms} atoms, more than {MAX_ATOMS}")]
    TooManyAtoms { atoms: usize },
    #[error("circuit has no layers")]
    EmptyCircuit,
    #[error("heterogeneous costs requested but the network has no cost matrix")]
    MissingCostMatrix,
    #[error("initial allocation places {found} qubits, circuit has {expected}")]
    AllocationSize { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlloyOptions {
    pub balance: bool,
    pub hetero: bool,
}

/// Bounds asserted by `finalLayer`. Vacancy and cost bounds are emitted
/// only when the matching option is on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlloyBounds {
    pub teleports: u32,
    pub vacancies: Option<u32>,
    pub cost: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlloyModelText {
    pub text: String,
    /// Number of `circGraph` atoms in the run scope.
    pub atom_count: usize,
    pub int_bits: u32,
}

/// Smallest `b` with `2^(b-1) > v`.
fn bits_for(v: u64) -> u32 {
    let mut b = 1;
    while (1u64 << (b - 1)) <= v {
        b += 1;
    }
    b
}

/// Integer width covering every literal and every counter after one step
/// past its bound. Counters only grow, so a run meeting its bounds never
/// exceeds `bound + one step`.
fn int_bits(
    circuit: &CircuitGraph,
    net: &NetworkSpec,
    bounds: &AlloyBounds,
    options: AlloyOptions,
    max_cost: u32,
) -> u32 {
    let n = circuit.qubit_count as u64;
    let k = net.machine_count() as u64;
    let mut need = (bounds.teleports as u64 + n)
        .max(n)
        .max(k)
        .max(net.max_capacity() as u64 + 1);
    if options.balance {
        let e = bounds.vacancies.unwrap_or(0) as u64;
        need = need.max(e + k);
    }
    if options.hetero {
        let w = bounds.cost.unwrap_or(0) as u64;
        need = need.max(w + n * max_cost as u64).max(max_cost as u64);
    }
    bits_for(need)
}

fn machine(m: usize) -> String {
    format!("M{}", m + 1)
}

fn qubit(q: usize) -> String {
    format!("q{}", q + 1)
}

fn edges_expr(circuit: &CircuitGraph, layer: usize) -> String {
    let pairs: Vec<String> = circuit.layers[layer]
        .gates
        .iter()
        .flat_map(|g| g.edge_chain())
        .map(|(a, b)| format!("({}->{})", qubit(a), qubit(b)))
        .collect();
    if pairs.is_empty() {
        "none".to_string()
    } else {
        pairs.join("+")
    }
}

pub fn emit_model(
    circuit: &CircuitGraph,
    net: &NetworkSpec,
    initial: &Allocation,
    bounds: AlloyBounds,
    options: AlloyOptions,
) -> Result<AlloyModelText, AlloyError> {
    let n = circuit.qubit_count;
    let k = net.machine_count();
    let layers = circuit.layer_count();
    if layers == 0 {
        return Err(AlloyError::EmptyCircuit);
    }
    if initial.qubit_count() != n {
        return Err(AlloyError::AllocationSize {
            expected: n,
            found: initial.qubit_count(),
        });
    }
    let atoms = n + k + layers;
    if atoms > MAX_ATOMS {
        return Err(AlloyError::TooManyAtoms { atoms });
    }
    let costs = if options.hetero {
        Some(net.cost_matrix().ok_or(AlloyError::MissingCostMatrix)?)
    } else {
        None
    };
    let max_cost = costs.map_or(0, |c| c.max_cost());
    let bits = int_bits(circuit, net, &bounds, options, max_cost);

    let mut out = String::new();
    // Writing into a String cannot fail.
    let w = &mut out;
    let _ = writeln!(w, "module teleport");
    let _ = writeln!(w, "open util/ordering[circGraph] as grph");
    let _ = writeln!(w, "open util/integer");
    let _ = writeln!(w);

    let qubits: Vec<String> = (0..n).map(qubit).collect();
    let machines: Vec<String> = (0..k).map(machine).collect();
    let _ = writeln!(w, "abstract sig Qubit {{ }}");
    let _ = writeln!(w, "one sig {} extends Qubit{{}}", qubits.join(","));
    let _ = writeln!(w);
    if costs.is_some() {
        let _ = writeln!(w, "abstract sig Machine {{");
        let _ = writeln!(w, "  costTo:Machine->Int }}");
    } else {
        let _ = writeln!(w, "abstract sig Machine {{ }}");
    }
    let _ = writeln!(w, "one sig {} extends Machine{{}}", machines.join(","));
    if let Some(c) = costs {
        let mut terms = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    terms.push(format!("({} -> {} ->{})", machine(a), machine(b), c.cost(a, b)));
                }
            }
        }
        for a in 0..k {
            terms.push(format!("({} -> {} ->0)", machine(a), machine(a)));
        }
        let _ = writeln!(w, "fact {{");
        let _ = writeln!(w, "  costTo = {} }}", terms.join("+\n    "));
    }
    let _ = writeln!(w);

    let _ = writeln!(w, "sig circGraph{{");
    let _ = writeln!(w, "  edges:Qubit->Qubit,");
    let _ = writeln!(w, "  location:Qubit->Machine,");
    let mut fields = vec!["numTele:Int"];
    if options.balance {
        fields.push("emptyMachines:Int");
    }
    if options.hetero {
        fields.push("teleCost:Int");
    }
    let _ = writeln!(w, "  {} }}", fields.join(",\n  "));
    let _ = writeln!(w);

    let _ = writeln!(w, "// one machine per qubit in every layer");
    let _ = writeln!(w, "fact qubitAlloc {{");
    let _ = writeln!(w, "  all q:Qubit,c:circGraph|#c.location[q] =1}}");
    if net.is_homogeneous() {
        let cap = net.capacity(0);
        let _ = writeln!(w, "// machine capacity {cap}");
        let _ = writeln!(w, "fact mCap {{");
        let _ = writeln!(w, " all c:circGraph,m:Machine| #(c.location).m < {}}}", cap + 1);
    } else {
        let _ = writeln!(w, "// per-machine capacities");
        let _ = writeln!(w, "fact mCap {{");
        let caps: Vec<String> = (0..k)
            .map(|m| format!("#(c.location).{} < {}", machine(m), net.capacity(m) + 1))
            .collect();
        let _ = writeln!(w, " all c:circGraph| {}}}", caps.join(" && "));
    }
    let _ = writeln!(w);

    let mut init = vec!["(c0.numTele=0)".to_string()];
    if options.balance {
        init.push("(c0.emptyMachines=0)".into());
    }
    if options.hetero {
        init.push("(c0.teleCost=0)".into());
    }
    let location: Vec<String> = (0..n)
        .map(|q| format!("({}->{})", qubit(q), machine(initial.machine_of(q))))
        .collect();
    let _ = writeln!(w, "fact  CircuitGraph {{");
    let _ = writeln!(w, "  let c0=grph/first|");
    let _ = write!(w, "  c0.edges={}&&{} &&", edges_expr(circuit, 0), init.join("&&"));
    let _ = write!(w, "\n  c0.location={}", location.join("+"));
    for i in 1..layers {
        let _ = write!(
            w,
            " &&\n  let c{i}=c{}.next|c{i}.edges={}",
            i - 1,
            edges_expr(circuit, i)
        );
    }
    let _ = writeln!(w, " }}");
    let _ = writeln!(w);

    let mut params = vec![
        "loc:Qubit->Machine",
        "r:Qubit->Qubit,uloc:Qubit->Machine",
        "tele:Int,utele:Int",
    ];
    let mut args = vec!["c.location,uc.edges", "uc.location,c.numTele,uc.numTele"];
    if options.balance {
        params.push("emptyMachines:Int,uEmptyMachines:Int");
        args.push("c.emptyMachines,uc.emptyMachines");
    }
    if options.hetero {
        params.push("totCost:Int,uTotCost:Int");
        args.push("c.teleCost,uc.teleCost");
    }
    let _ = writeln!(w, "pred teleport[{}] {{", params.join(",\n  "));
    let _ = writeln!(w, " all disj q0,q1:Qubit|");
    let _ = writeln!(w, "   (q0->q1 in r) implies q0.uloc=q1.uloc");
    let _ = write!(w, " utele=plus[tele,#(uloc-loc)]");
    if options.balance {
        let _ = write!(w, "\n uEmptyMachines=\n  plus[emptyMachines,#(Machine-Qubit.uloc)]");
    }
    if options.hetero {
        let _ = write!(
            w,
            "\n uTotCost=\n  plus[totCost,\n   sum q:Qubit|((q.loc).costTo)[q.uloc]]"
        );
    }
    let _ = writeln!(w, "}}");
    let _ = writeln!(w);
    let _ = writeln!(w, "fact layerTransition {{");
    let _ = writeln!(w, "  all c:circGraph,uc:grph/next[c] {{");
    let _ = writeln!(w, "  teleport[{}] }}}}", args.join(",\n        "));
    let _ = writeln!(w);

    let mut finals = vec![format!("lte[grph/last.numTele,{}]", bounds.teleports)];
    if let (true, Some(e)) = (options.balance, bounds.vacancies) {
        finals.push(format!("lte[grph/last.emptyMachines,{e}]"));
    }
    if let (true, Some(c)) = (options.hetero, bounds.cost) {
        finals.push(format!("lte[grph/last.teleCost,{c}]"));
    }
    let _ = writeln!(w, "pred finalLayer {{");
    let _ = writeln!(w, "  {} }}", finals.join("\n  "));
    let _ = writeln!(w);
    let _ = writeln!(w, "run finalLayer for {layers} circGraph, {bits} Int");

    Ok(AlloyModelText {
        text: out,
        atom_count: layers,
        int_bits: bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::network::CostMatrix;

    fn g(ops: &[usize]) -> Gate {
        Gate::new(ops.iter().copied())
    }

    fn circuit1() -> CircuitGraph {
        let pairs = [
            vec![g(&[0, 1]), g(&[2, 3])],
            vec![g(&[1, 2])],
            vec![g(&[2, 3])],
            vec![g(&[0, 1])],
            vec![g(&[1, 3])],
            vec![g(&[0, 2])],
            vec![g(&[1, 3])],
            vec![g(&[1, 2])],
            vec![g(&[0, 2])],
            vec![g(&[1, 3])],
        ];
        CircuitGraph::from_layers(4, pairs.to_vec())
    }

    #[test]
    fn bit_width() {
        assert_eq!(bits_for(0), 1);
        assert_eq!(bits_for(1), 2);
        assert_eq!(bits_for(7), 4);
        assert_eq!(bits_for(8), 5);
        assert_eq!(bits_for(15), 5);
        assert_eq!(bits_for(16), 6);
    }

    #[test]
    fn circuit1_lines() {
        let net = NetworkSpec::homogeneous(2, 3).unwrap();
        let init = Allocation::new(vec![0, 0, 1, 1], &net).unwrap();
        let m = emit_model(
            &circuit1(),
            &net,
            &init,
            AlloyBounds {
                teleports: 6,
                ..Default::default()
            },
            AlloyOptions::default(),
        )
        .unwrap();
        assert!(m.text.contains("c0.edges=(q1->q2)+(q3->q4)&&(c0.numTele=0)"));
        assert!(m.text.contains("c9.edges=(q2->q4) }"));
        assert!(m.text.contains("#(c.location).m < 4}"));
        assert!(m.text.contains("lte[grph/last.numTele,6]"));
        assert!(m.text.ends_with("run finalLayer for 10 circGraph, 5 Int\n"));
        assert_eq!((m.atom_count, m.int_bits), (10, 5));
        assert_eq!(m.text.matches("\nrun ").count(), 1);
    }

    #[test]
    fn nary_gate_chains() {
        let c = CircuitGraph::from_layers(5, vec![vec![g(&[1, 2, 3, 4])], vec![]]);
        let net = NetworkSpec::homogeneous(3, 4).unwrap();
        let init = Allocation::new(vec![1, 0, 1, 2, 0], &net).unwrap();
        let m = emit_model(&c, &net, &init, AlloyBounds::default(), AlloyOptions::default()).unwrap();
        assert!(m.text.contains("c0.edges=(q2->q3)+(q3->q4)+(q4->q5)&&"));
        assert!(m.text.contains("c1.edges=none }"));
    }

    #[test]
    fn hetero_and_balance_variants() {
        let c = CircuitGraph::from_layers(5, vec![vec![g(&[1, 4])]]);
        let costs = CostMatrix::new(vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 3, 0]]).unwrap();
        let net = NetworkSpec::homogeneous(3, 4).unwrap().with_cost_matrix(costs).unwrap();
        let init = Allocation::new(vec![1, 0, 1, 2, 0], &net).unwrap();
        let bounds = AlloyBounds {
            teleports: 13,
            vacancies: Some(19),
            cost: Some(11),
        };
        let opts = AlloyOptions {
            balance: true,
            hetero: true,
        };
        let m = emit_model(&c, &net, &init, bounds, opts).unwrap();
        for needle in [
            "(M1 -> M2 ->1)",
            "(M3 -> M2 ->3)",
            "(M3 -> M3 ->0)",
            "emptyMachines:Int",
            "teleCost:Int",
            "(c0.emptyMachines=0)&&(c0.teleCost=0)",
            "lte[grph/last.emptyMachines,19]",
            "lte[grph/last.teleCost,11]",
            "sum q:Qubit|((q.loc).costTo)[q.uloc]",
        ] {
            assert!(m.text.contains(needle), "missing {needle}");
        }
        // cost 11 plus 5 qubits at cost 3 = 26 < 32
        assert_eq!(m.int_bits, 6);
        let plain = NetworkSpec::homogeneous(3, 4).unwrap();
        assert_eq!(
            emit_model(&c, &plain, &init, bounds, opts),
            Err(AlloyError::MissingCostMatrix)
        );
    }

    #[test]
    fn per_machine_capacity_fact() {
        let c = CircuitGraph::from_layers(3, vec![vec![g(&[0, 1])]]);
        let net = NetworkSpec::new(vec![2, 1]).unwrap();
        let init = Allocation::new(vec![0, 0, 1], &net).unwrap();
        let m = emit_model(&c, &net, &init, AlloyBounds::default(), AlloyOptions::default()).unwrap();
        assert!(m
            .text
            .contains("all c:circGraph| #(c.location).M1 < 3 && #(c.location).M2 < 2}"));
    }

    #[test]
    fn errors_and_stability() {
        let net = NetworkSpec::homogeneous(2, 3).unwrap();
        let init = Allocation::new(vec![0, 0, 1, 1], &net).unwrap();
        let empty = CircuitGraph::from_layers(4, vec![]);
        let b = AlloyBounds::default();
        let o = AlloyOptions::default();
        assert_eq!(emit_model(&empty, &net, &init, b, o), Err(AlloyError::EmptyCircuit));
        let big = CircuitGraph::from_layers(4, vec![vec![]; MAX_ATOMS]);
        assert!(matches!(
            emit_model(&big, &net, &init, b, o),
            Err(AlloyError::TooManyAtoms { .. })
        ));
        let a = emit_model(&circuit1(), &net, &init, b, o).unwrap();
        assert_eq!(a, emit_model(&circuit1(), &net, &init, b, o).unwrap());
    }
}
