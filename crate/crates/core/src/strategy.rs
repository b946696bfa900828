//! Threshold search and subproblem orchestration.
//!
//! Each window of layers is solved for its least feasible teleport bound
//! `T*`, then optionally refined with `T*` pinned: least vacancy total,
//! then least weighted cost, then most pairwise swaps. Windows run in order,
//! each starting from the previous window's final placement.

use std::collections::VecDeque;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::AssignmentSequence;
use crate::circuit::CircuitGraph;
use crate::encode::{decode, encode, Bounds, DecisionInstance, EncodeError};
use crate::network::{Allocation, NetworkSpec};
use crate::sat::{solve, SatConfig, SatError, SatStatus};

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("window {window}: no teleport bound up to {cap} is satisfiable")]
    Infeasible { window: usize, cap: u32 },
    #[error("bound {hi} is unsatisfiable; optimum lies above [{lo}, {hi}]")]
    RangeExcludesOptimum { lo: u32, hi: u32 },
    #[error("fragment {fragment} does not start where fragment {} ends", fragment - 1)]
    SeamMismatch { fragment: usize },
    #[error("decoded sequence violates constraints: {0}")]
    InvalidSolution(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Strategy {
    Linear,
    Binary,
    History { length: usize },
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::History {
            length: DEFAULT_HISTORY,
        }
    }
}

pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_HISTORY: usize = 10;

/// Secondary objectives, applied in this order after teleports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objectives {
    pub balance: bool,
    pub weighted_cost: bool,
    pub prefer_swaps: bool,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub sat: SatConfig,
    pub strategy: Strategy,
    pub objectives: Objectives,
    pub window_size: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            sat: SatConfig::default(),
            strategy: Strategy::default(),
            objectives: Objectives {
                prefer_swaps: true,
                ..Objectives::default()
            },
            window_size: DEFAULT_WINDOW,
        }
    }
}

/// Contiguous window of layers and the placement it starts from.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub id: usize,
    pub layers: Range<usize>,
    pub window: CircuitGraph,
    pub initial: Allocation,
}

impl Subproblem {
    pub fn new(id: usize, circuit: &CircuitGraph, layers: Range<usize>, initial: Allocation) -> Self {
        Subproblem {
            id,
            window: circuit.window(layers.clone()),
            layers,
            initial,
        }
    }

    /// Every qubit moving at every transition.
    pub fn teleport_cap(&self) -> u32 {
        (self.window.qubit_count * self.window.layer_count()) as u32
    }
}

/// The last `capacity` window optima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchHistory {
    capacity: usize,
    values: VecDeque<u32>,
}

impl SearchHistory {
    pub fn new(capacity: usize) -> Self {
        SearchHistory {
            capacity: capacity.max(1),
            values: VecDeque::new(),
        }
    }

    pub fn push(&mut self, value: u32) {
        if self.values.len() == self.capacity {
            self.values.pop_front();
        }
        self.values.push_back(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(min, max)` of the stored optima.
    pub fn range(&self) -> Option<(u32, u32)> {
        let min = *self.values.iter().min()?;
        let max = *self.values.iter().max()?;
        Some((min, max))
    }
}

/// Result of a threshold search on one window.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub optimum: u32,
    pub sequence: AssignmentSequence,
    pub probes: usize,
}

/// Runs decision probes against one subproblem and counts them.
pub struct Prober<'a> {
    sub: &'a Subproblem,
    net: &'a NetworkSpec,
    sat: &'a SatConfig,
    probes: usize,
    /// Largest teleport bound seen UNSAT (with no other bounds).
    unsat_max: Option<u32>,
}

impl<'a> Prober<'a> {
    pub fn new(sub: &'a Subproblem, net: &'a NetworkSpec, sat: &'a SatConfig) -> Self {
        Prober {
            sub,
            net,
            sat,
            probes: 0,
            unsat_max: None,
        }
    }

    pub fn probes(&self) -> usize {
        self.probes
    }

    /// One SAT call. Returns the decoded, verified sequence when feasible.
    pub fn probe(&mut self, bounds: Bounds) -> Result<Option<AssignmentSequence>, StrategyError> {
        self.probes += 1;
        let inst = DecisionInstance {
            window: &self.sub.window,
            net: self.net,
            initial: &self.sub.initial,
            bounds,
        };
        let enc = encode(&inst)?;
        let result = solve(&enc.formula, self.sat)?;
        match result.status {
            SatStatus::Unsat => {
                if bounds == Bounds::teleports(bounds.teleports) {
                    self.unsat_max = Some(self.unsat_max.map_or(bounds.teleports, |u| u.max(bounds.teleports)));
                }
                Ok(None)
            }
            SatStatus::Sat => {
                let seq = decode(&enc, result.model.as_ref().expect("SAT carries a model"))?;
                seq.verify(&self.sub.window, self.net)
                    .map_err(StrategyError::InvalidSolution)?;
                if seq.total_moves() > bounds.teleports as usize {
                    return Err(StrategyError::InvalidSolution(format!(
                        "{} moves exceed bound {}",
                        seq.total_moves(),
                        bounds.teleports
                    )));
                }
                Ok(Some(seq))
            }
        }
    }

    fn probe_teleports(&mut self, t: u32) -> Result<Option<AssignmentSequence>, StrategyError> {
        self.probe(Bounds::teleports(t))
    }

    fn certified(&self, optimum: u32) -> bool {
        optimum == 0 || self.unsat_max.is_some_and(|u| u + 1 >= optimum)
    }
}

/// Least `T` with a feasible sequence, trying `T = 0, 1, 2, ...`.
pub fn search_linear(sub: &Subproblem, net: &NetworkSpec, sat: &SatConfig) -> Result<SearchOutcome, StrategyError> {
    let mut prober = Prober::new(sub, net, sat);
    let cap = sub.teleport_cap();
    for t in 0..=cap {
        if let Some(sequence) = prober.probe_teleports(t)? {
            return Ok(SearchOutcome {
                optimum: t,
                sequence,
                probes: prober.probes(),
            });
        }
    }
    Err(StrategyError::Infeasible { window: sub.id, cap })
}

/// Bisection for the least feasible `T` in `[lo, hi]`, assuming every bound
/// below `lo` is infeasible. A feasible probe lowers `hi` to the move count
/// actually used.
pub fn search_binary(
    sub: &Subproblem,
    net: &NetworkSpec,
    sat: &SatConfig,
    lo: u32,
    hi: u32,
) -> Result<SearchOutcome, StrategyError> {
    let mut prober = Prober::new(sub, net, sat);
    let (optimum, sequence) = bisect(&mut prober, lo, hi)?;
    Ok(SearchOutcome {
        optimum,
        sequence,
        probes: prober.probes(),
    })
}

fn bisect(prober: &mut Prober<'_>, mut lo: u32, mut hi: u32) -> Result<(u32, AssignmentSequence), StrategyError> {
    assert!(lo <= hi, "empty search range [{lo}, {hi}]");
    let (orig_lo, orig_hi) = (lo, hi);
    let mut best: Option<AssignmentSequence> = None;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match prober.probe_teleports(mid)? {
            Some(seq) => {
                hi = seq.total_moves() as u32;
                lo = lo.min(hi);
                best = Some(seq);
            }
            None => lo = mid + 1,
        }
    }
    if let Some(seq) = best.filter(|s| s.total_moves() as u32 == lo) {
        return Ok((lo, seq));
    }
    match prober.probe_teleports(lo)? {
        Some(seq) => Ok((seq.total_moves() as u32, seq)),
        None => Err(StrategyError::RangeExcludesOptimum {
            lo: orig_lo,
            hi: orig_hi,
        }),
    }
}

/// Bisection seeded with the min/max of recent window optima. Falls back to
/// the full range when the history range misses the optimum, and always
/// certifies minimality with an infeasible probe at `T* - 1`.
pub fn search_history_binary(
    sub: &Subproblem,
    net: &NetworkSpec,
    sat: &SatConfig,
    history: &mut SearchHistory,
) -> Result<SearchOutcome, StrategyError> {
    let cap = sub.teleport_cap();
    let mut prober = Prober::new(sub, net, sat);
    let (optimum, sequence) = match history.range() {
        None => bisect(&mut prober, 0, cap)?,
        Some((min, max)) => {
            let (lo, hi) = (min.min(cap), max.min(cap));
            match bisect(&mut prober, lo, hi) {
                Ok((t, seq)) => {
                    if prober.certified(t) {
                        (t, seq)
                    } else {
                        match prober.probe_teleports(t - 1)? {
                            None => (t, seq),
                            Some(lower) => {
                                let below = lower.total_moves() as u32;
                                let (t2, s2) = bisect(&mut prober, 0, below)?;
                                (t2, s2)
                            }
                        }
                    }
                }
                Err(StrategyError::RangeExcludesOptimum { .. }) if hi < cap => bisect(&mut prober, hi + 1, cap)?,
                Err(e) => return Err(e),
            }
        }
    };
    history.push(optimum);
    Ok(SearchOutcome {
        optimum,
        sequence,
        probes: prober.probes(),
    })
}

/// An infeasible bound at the teleport cap means the window has no solution at all.
fn capped(e: StrategyError, sub: &Subproblem) -> StrategyError {
    let cap = sub.teleport_cap();
    match e {
        StrategyError::RangeExcludesOptimum { hi, .. } if hi >= cap => {
            StrategyError::Infeasible { window: sub.id, cap }
        }
        other => other,
    }
}

/// Minimizes `measure` over sequences feasible under `bounds_for(v)`,
/// starting from a known feasible `seed`.
fn minimize_secondary(
    prober: &mut Prober<'_>,
    seed: AssignmentSequence,
    measure: impl Fn(&AssignmentSequence) -> u32,
    bounds_for: impl Fn(u32) -> Bounds,
) -> Result<(u32, AssignmentSequence), StrategyError> {
    let mut best = seed;
    let (mut lo, mut hi) = (0u32, measure(&best));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match prober.probe(bounds_for(mid))? {
            Some(seq) => {
                hi = measure(&seq).min(mid);
                best = seq;
            }
            None => lo = mid + 1,
        }
    }
    Ok((hi, best))
}

/// Secondary optima of a window with teleports pinned at `t_star`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub vacancy: Option<u32>,
    pub cost: Option<u32>,
    pub swaps: Option<u32>,
    /// True when `swaps` is certified maximal; false when the swap search was
    /// off or stopped at the time limit with its best so far.
    #[serde(default)]
    pub swaps_proven: bool,
}

/// Lexicographic refinement: vacancies, then weighted cost, then swaps
/// (maximized), each with the earlier optima pinned.
pub fn lexicographic_refine(
    prober: &mut Prober<'_>,
    t_star: u32,
    seed: AssignmentSequence,
    objectives: Objectives,
) -> Result<(AssignmentSequence, Refinement), StrategyError> {
    let net = prober.net;
    let k = net.machine_count();
    let mut pinned = Bounds::teleports(t_star);
    let mut best = seed;
    let mut refinement = Refinement::default();

    if objectives.balance {
        let (e, seq) = minimize_secondary(
            prober,
            best,
            |s| s.vacancy_total(k) as u32,
            |e| Bounds {
                vacancies: Some(e),
                ..pinned
            },
        )?;
        pinned.vacancies = Some(e);
        refinement.vacancy = Some(e);
        best = seq;
    }
    if objectives.weighted_cost {
        let (w, seq) = minimize_secondary(
            prober,
            best,
            |s| s.weighted_cost(net) as u32,
            |w| Bounds {
                cost: Some(w),
                ..pinned
            },
        )?;
        pinned.cost = Some(w);
        refinement.cost = Some(w);
        best = seq;
    }
    if objectives.prefer_swaps {
        let swaps = |s: &AssignmentSequence| s.swaps_per_transition(k).iter().sum::<usize>() as u32;
        let mut lo = swaps(&best);
        let mut hi = t_star / 2;
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            let probe = prober.probe(Bounds {
                min_swaps: Some(mid),
                ..pinned
            });
            match probe {
                Ok(Some(seq)) => {
                    lo = swaps(&seq).max(mid);
                    best = seq;
                }
                Ok(None) => hi = mid - 1,
                // swaps only break ties, so a slow probe ends the search
                Err(StrategyError::Sat(SatError::TimeLimitExceeded(_))) => break,
                Err(e) => return Err(e),
            }
        }
        refinement.swaps = Some(lo);
        refinement.swaps_proven = lo >= hi;
    }
    Ok((best, refinement))
}

/// One solved window.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub window: usize,
    pub layers: Range<usize>,
    pub sequence: AssignmentSequence,
    pub teleport_optimum: u32,
    pub refinement: Refinement,
    pub probes: usize,
}

/// `ceil(L / window_size)` contiguous layer ranges.
pub fn split_subproblems(layer_count: usize, window_size: usize) -> Vec<Range<usize>> {
    assert!(window_size >= 1, "window size must be positive");
    (0..layer_count)
        .step_by(window_size)
        .map(|start| start..(start + window_size).min(layer_count))
        .collect()
}

fn solve_window(
    sub: &Subproblem,
    net: &NetworkSpec,
    cfg: &SolveConfig,
    history: &mut SearchHistory,
) -> Result<Fragment, StrategyError> {
    let outcome = match cfg.strategy {
        Strategy::Linear => search_linear(sub, net, &cfg.sat),
        Strategy::Binary => search_binary(sub, net, &cfg.sat, 0, sub.teleport_cap()),
        Strategy::History { .. } => search_history_binary(sub, net, &cfg.sat, history),
    }
    .map_err(|e| capped(e, sub))?;
    let mut prober = Prober::new(sub, net, &cfg.sat);
    let (sequence, refinement) = lexicographic_refine(&mut prober, outcome.optimum, outcome.sequence, cfg.objectives)?;
    Ok(Fragment {
        window: sub.id,
        layers: sub.layers.clone(),
        sequence,
        teleport_optimum: outcome.optimum,
        refinement,
        probes: outcome.probes + prober.probes(),
    })
}

/// Whole-circuit assignment with its accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub assignments: AssignmentSequence,
    pub moves_per_transition: Vec<usize>,
    pub swaps_per_transition: Vec<usize>,
    pub num_tele: usize,
    pub swap_count: usize,
    pub adjusted_tele: usize,
    pub vacancy_total: Option<usize>,
    pub weighted_cost: Option<u64>,
}

/// `(swap_count, adjusted_tele)` where each pairwise exchange counts once.
pub fn count_swaps(sequence: &AssignmentSequence, machine_count: usize) -> (usize, usize) {
    let swaps: usize = sequence.swaps_per_transition(machine_count).iter().sum();
    (swaps, sequence.total_moves() - swaps)
}

/// Concatenates window fragments into one sequence.
pub fn stitch(
    fragments: &[AssignmentSequence],
    net: &NetworkSpec,
    objectives: Objectives,
) -> Result<Solution, StrategyError> {
    let first = fragments.first().ok_or(StrategyError::SeamMismatch { fragment: 0 })?;
    let mut states = vec![first.initial().clone()];
    for (i, frag) in fragments.iter().enumerate() {
        if frag.initial() != states.last().expect("non-empty") {
            return Err(StrategyError::SeamMismatch { fragment: i });
        }
        states.extend(frag.states()[1..].iter().cloned());
    }
    Ok(solution_from(AssignmentSequence::new(states), net, objectives))
}

fn solution_from(seq: AssignmentSequence, net: &NetworkSpec, objectives: Objectives) -> Solution {
    let k = net.machine_count();
    let (swap_count, adjusted_tele) = count_swaps(&seq, k);
    Solution {
        moves_per_transition: seq.moves_per_transition(),
        swaps_per_transition: seq.swaps_per_transition(k),
        num_tele: seq.total_moves(),
        swap_count,
        adjusted_tele,
        vacancy_total: objectives.balance.then(|| seq.vacancy_total(k)),
        weighted_cost: (objectives.weighted_cost || net.cost_matrix().is_some()).then(|| seq.weighted_cost(net)),
        assignments: seq,
    }
}

/// Full solve: windows in order, each refined, then stitched.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub solution: Solution,
    pub fragments: Vec<Fragment>,
}

pub fn solve_circuit(
    circuit: &CircuitGraph,
    net: &NetworkSpec,
    initial: &Allocation,
    cfg: &SolveConfig,
) -> Result<SolveOutput, StrategyError> {
    if let Err(diags) = net.validate(circuit) {
        let text: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(EncodeError::InstanceInvalid(text.join("; ")).into());
    }
    if circuit.layer_count() == 0 {
        let seq = AssignmentSequence::new(vec![initial.clone()]);
        return Ok(SolveOutput {
            solution: solution_from(seq, net, cfg.objectives),
            fragments: Vec::new(),
        });
    }
    let history_len = match cfg.strategy {
        Strategy::History { length } => length,
        _ => DEFAULT_HISTORY,
    };
    let mut history = SearchHistory::new(history_len);
    let mut start = initial.clone();
    let mut fragments = Vec::new();
    for (id, range) in split_subproblems(circuit.layer_count(), cfg.window_size)
        .into_iter()
        .enumerate()
    {
        let sub = Subproblem::new(id, circuit, range, start);
        let frag = solve_window(&sub, net, cfg, &mut history)?;
        start = frag.sequence.last().clone();
        fragments.push(frag);
    }
    let seqs: Vec<AssignmentSequence> = fragments.iter().map(|f| f.sequence.clone()).collect();
    let solution = stitch(&seqs, net, cfg.objectives)?;
    Ok(SolveOutput { solution, fragments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn g(ops: &[usize]) -> Gate {
        Gate::new(ops.iter().copied())
    }

    fn alloc(v: &[usize]) -> Allocation {
        Allocation::from_vec_unchecked(v.to_vec())
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_subproblems(22, 10), vec![0..10, 10..20, 20..22]);
        assert_eq!(split_subproblems(10, 10), vec![0..10]);
        assert_eq!(split_subproblems(1252, 10).len(), 126);
        assert!(split_subproblems(0, 10).is_empty());
    }

    #[test]
    fn history_ring_buffer() {
        let mut h = SearchHistory::new(3);
        assert_eq!(h.range(), None);
        for v in [5, 1, 7, 4] {
            h.push(v);
        }
        assert_eq!(h.len(), 3);
        assert_eq!(h.range(), Some((1, 7)));
    }

    #[test]
    fn swap_counting() {
        let seq = AssignmentSequence::new(vec![
            alloc(&[0, 0, 1, 1]),
            alloc(&[0, 1, 0, 1]),
            alloc(&[0, 1, 0, 1]),
            alloc(&[1, 1, 0, 0]),
        ]);
        assert_eq!(count_swaps(&seq, 2), (2, 2));
        let constant = AssignmentSequence::new(vec![alloc(&[0, 1]); 3]);
        assert_eq!(count_swaps(&constant, 2), (0, 0));
        // a 3-cycle over three machines is not a swap
        let cycle = AssignmentSequence::new(vec![alloc(&[0, 1, 2]), alloc(&[1, 2, 0])]);
        assert_eq!(count_swaps(&cycle, 3), (0, 3));
    }

    #[test]
    fn stitch_checks_seams() {
        let a = AssignmentSequence::new(vec![alloc(&[0, 1]), alloc(&[0, 0])]);
        let b = AssignmentSequence::new(vec![alloc(&[0, 0]), alloc(&[1, 0])]);
        let net = NetworkSpec::homogeneous(2, 2).unwrap();
        let single = stitch(std::slice::from_ref(&a), &net, Objectives::default()).unwrap();
        assert_eq!(single.assignments, a);
        let both = stitch(&[a.clone(), b.clone()], &net, Objectives::default()).unwrap();
        assert_eq!(both.assignments.state_count(), 3);
        assert_eq!(both.num_tele, 2);
        assert!(matches!(
            stitch(&[b, a], &net, Objectives::default()),
            Err(StrategyError::SeamMismatch { fragment: 1 })
        ));
    }

    fn chain_problem() -> (CircuitGraph, NetworkSpec, Allocation) {
        let c = CircuitGraph::from_layers(
            4,
            vec![
                vec![g(&[0, 2]), g(&[1, 3])],
                vec![g(&[0, 1]), g(&[2, 3])],
                vec![g(&[0, 3]), g(&[1, 2])],
            ],
        );
        let net = NetworkSpec::homogeneous(2, 2).unwrap();
        (c, net, alloc(&[0, 0, 1, 1]))
    }

    #[test]
    fn strategies_agree_on_small_problem() {
        let (c, net, init) = chain_problem();
        let sub = Subproblem::new(0, &c, 0..3, init);
        let sat = SatConfig::default();
        let lin = search_linear(&sub, &net, &sat).unwrap();
        let bin = search_binary(&sub, &net, &sat, 0, sub.teleport_cap()).unwrap();
        let mut h = SearchHistory::new(10);
        let hist = search_history_binary(&sub, &net, &sat, &mut h).unwrap();
        assert_eq!(lin.optimum, bin.optimum);
        assert_eq!(lin.optimum, hist.optimum);
        assert_eq!(h.range(), Some((lin.optimum, lin.optimum)));
        for out in [&lin, &bin, &hist] {
            assert_eq!(out.sequence.total_moves() as u32, out.optimum);
        }
    }

    #[test]
    fn history_range_expansion() {
        let (c, net, init) = chain_problem();
        let sub = Subproblem::new(0, &c, 0..3, init);
        let sat = SatConfig::default();
        let truth = search_linear(&sub, &net, &sat).unwrap().optimum;
        assert!(truth >= 2);
        // history above the optimum: must certify by probing below
        let mut h = SearchHistory::new(10);
        for v in [truth + 3, truth + 5] {
            h.push(v);
        }
        assert_eq!(search_history_binary(&sub, &net, &sat, &mut h).unwrap().optimum, truth);
        // history below the optimum: expansion upward
        let mut h = SearchHistory::new(10);
        h.push(0);
        h.push(truth - 1);
        assert_eq!(search_history_binary(&sub, &net, &sat, &mut h).unwrap().optimum, truth);
    }

    #[test]
    fn binary_range_below_optimum_is_reported() {
        let (c, net, init) = chain_problem();
        let sub = Subproblem::new(0, &c, 0..3, init);
        let sat = SatConfig::default();
        let truth = search_linear(&sub, &net, &sat).unwrap().optimum;
        assert!(matches!(
            search_binary(&sub, &net, &sat, 0, truth - 1),
            Err(StrategyError::RangeExcludesOptimum { .. })
        ));
        let zero = CircuitGraph::from_layers(4, vec![vec![g(&[0, 1])]]);
        let local = Subproblem::new(0, &zero, 0..1, alloc(&[0, 0, 1, 1]));
        let out = search_binary(&local, &net, &sat, 0, 0).unwrap();
        assert_eq!((out.optimum, out.probes), (0, 1));
    }

    #[test]
    fn empty_circuit_solution() {
        let c = CircuitGraph::from_layers(3, vec![]);
        let net = NetworkSpec::homogeneous(2, 2).unwrap();
        let out = solve_circuit(&c, &net, &alloc(&[0, 0, 1]), &SolveConfig::default()).unwrap();
        assert_eq!(out.solution.num_tele, 0);
        assert_eq!(out.solution.assignments.state_count(), 1);
    }
}
