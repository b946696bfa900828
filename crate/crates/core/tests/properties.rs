mod common;

use common::*;
use proptest::prelude::*;
use teledist::assignment::AssignmentSequence;
use teledist::oracle::{oracle_feasible, oracle_minimum, OracleBounds};
use teledist::strategy::{SolveOutput, StrategyError};
use teledist::{solve_circuit, Allocation, NetworkSpec, Objectives, SolveConfig, Strategy};

fn solve(inst: &Instance, window: usize, strategy: Strategy, objectives: Objectives) -> Option<SolveOutput> {
    let cfg = SolveConfig {
        strategy,
        objectives,
        window_size: window,
        ..SolveConfig::default()
    };
    match solve_circuit(&inst.circuit, &inst.net, &inst.initial, &cfg) {
        Ok(out) => Some(out),
        Err(StrategyError::Infeasible { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

fn relabel(seq: &AssignmentSequence, perm: &[usize], net: &NetworkSpec) -> AssignmentSequence {
    AssignmentSequence::new(
        seq.states()
            .iter()
            .map(|a| Allocation::new(a.as_slice().iter().map(|&m| perm[m]).collect(), net).unwrap())
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn reported_solutions_are_consistent(seed in any::<u64>(), window in 1usize..4) {
        let inst = random_instance(&mut rng(seed), 5, 3, 6);
        let Some(out) = solve(&inst, window, Strategy::default(), Objectives { prefer_swaps: true, ..Objectives::default() }) else {
            return Ok(());
        };
        let s = &out.solution;
        prop_assert!(s.assignments.verify(&inst.circuit, &inst.net).is_ok());
        prop_assert_eq!(s.assignments.initial(), &inst.initial);
        prop_assert_eq!(s.assignments.state_count(), inst.circuit.layer_count() + 1);
        prop_assert_eq!(s.moves_per_transition.iter().sum::<usize>(), s.num_tele);
        prop_assert_eq!(s.adjusted_tele + s.swap_count, s.num_tele);
        for (moves, swaps) in s.moves_per_transition.iter().zip(&s.swaps_per_transition) {
            prop_assert!(2 * swaps <= *moves);
        }
        prop_assert!(2 * s.adjusted_tele >= s.num_tele);
        let optima: u32 = out.fragments.iter().map(|f| f.teleport_optimum).sum();
        prop_assert_eq!(optima as usize, s.num_tele);
    }

    #[test]
    fn swap_count_ignores_machine_names(seed in any::<u64>(), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let inst = random_instance(&mut rng(seed), 5, 3, 6);
        let Some(out) = solve(&inst, usize::MAX, Strategy::Binary, Objectives::default()) else {
            return Ok(());
        };
        let k = inst.net.machine_count();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng(perm_seed));
        let mut caps = vec![0; k];
        for m in 0..k {
            caps[perm[m]] = inst.net.capacity(m);
        }
        let renamed_net = NetworkSpec::new(caps).unwrap();
        let seq = &out.solution.assignments;
        let renamed = relabel(seq, &perm, &renamed_net);
        prop_assert_eq!(renamed.swaps_per_transition(k), seq.swaps_per_transition(k));
        prop_assert_eq!(renamed.moves_per_transition(), seq.moves_per_transition());
    }

    #[test]
    fn windows_never_beat_the_whole_circuit(seed in any::<u64>(), window in 1usize..4) {
        let inst = random_instance(&mut rng(seed), 5, 3, 6);
        let whole = solve(&inst, usize::MAX, Strategy::Binary, Objectives::default());
        let windowed = solve(&inst, window, Strategy::Binary, Objectives::default());
        match (whole, windowed) {
            (Some(w), Some(p)) => prop_assert!(p.solution.num_tele >= w.solution.num_tele),
            (None, Some(_)) => prop_assert!(false, "windowed run found a solution the whole run missed"),
            _ => {}
        }
    }

    #[test]
    fn strategies_find_the_oracle_optimum(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 4, 3, 5);
        let oracle = oracle_minimum(&inst.circuit, &inst.net, &inst.initial).ok().map(|r| r.min_moves);
        for strategy in [Strategy::Linear, Strategy::Binary, Strategy::History { length: 2 }] {
            let got = solve(&inst, usize::MAX, strategy, Objectives::default()).map(|o| o.solution.num_tele);
            prop_assert_eq!(got, oracle, "{:?}", strategy);
        }
    }

    #[test]
    fn refinement_keeps_teleports_and_reaches_the_vacancy_minimum(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 4, 3, 5);
        let plain = solve(&inst, usize::MAX, Strategy::Binary, Objectives::default());
        let balanced = solve(&inst, usize::MAX, Strategy::Binary, Objectives { balance: true, ..Objectives::default() });
        let (Some(plain), Some(balanced)) = (plain, balanced) else {
            return Ok(());
        };
        let t = plain.solution.num_tele;
        prop_assert_eq!(balanced.solution.num_tele, t);
        let e = balanced.solution.vacancy_total.unwrap();
        let feasible = |vacancies: usize| {
            oracle_feasible(&inst.circuit, &inst.net, &inst.initial, OracleBounds {
                teleports: t,
                vacancies: Some(vacancies),
                cost: None,
                min_swaps: None,
            })
            .unwrap()
        };
        prop_assert!(feasible(e));
        prop_assert!(e == 0 || !feasible(e - 1));
    }

    #[test]
    fn feasibility_is_monotone_in_the_teleport_bound(seed in any::<u64>(), t in 0usize..8) {
        let inst = random_instance(&mut rng(seed), 4, 3, 5);
        let at = |teleports| {
            oracle_feasible(&inst.circuit, &inst.net, &inst.initial, OracleBounds {
                teleports,
                vacancies: None,
                cost: None,
                min_swaps: None,
            })
            .unwrap()
        };
        prop_assert!(!at(t) || at(t + 1));
    }
}
