//! C ABI over the `teledist` solver.
//!
//! Circuits, networks and solutions are opaque heap handles released with
//! their `_free` function. Every fallible call returns a [`TdStatus`]; the
//! message for the last failure on the calling thread is available from
//! [`td_last_error`]. Strings returned to the caller are released with
//! [`td_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use teledist::alloy::{emit_model, AlloyBounds, AlloyOptions};
use teledist::circuit::normalize;
use teledist::network::allocate_in_order;
use teledist::sat::{Backend, SatConfig};
use teledist::strategy::{Objectives, DEFAULT_HISTORY, DEFAULT_WINDOW};
use teledist::tfc::parse_tfc;
use teledist::{solve_circuit, Allocation, CircuitGraph, CostMatrix, NetworkSpec, Solution, SolveConfig, Strategy};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Network = 5,
    Solver = 6,
    Search = 7,
    Alloy = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStrategy {
    Linear = 0,
    Binary = 1,
    History = 2,
}

/// Solve options. Start from [`td_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TdOptions {
    /// Layers per subproblem, at least 1.
    pub window_size: usize,
    pub strategy: TdStrategy,
    /// History length for [`TdStrategy::History`], at least 1.
    pub history_length: usize,
    pub balance: bool,
    /// Minimize weighted teleport cost; needs a cost matrix on the network.
    pub weighted_cost: bool,
    pub prefer_swaps: bool,
    /// Seed for the embedded solver's branching perturbation; 0 is unperturbed.
    pub solver_seed: u64,
    /// Milliseconds allowed per SAT call; 0 means unlimited.
    pub time_limit_ms: u64,
}

pub struct TdCircuit(CircuitGraph);

pub struct TdNetwork(NetworkSpec);

pub struct TdSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (TdStatus, String);

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TdStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TdStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or((TdStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut *mut T) -> Result<&'static mut *mut T, Failure> {
    // SAFETY: a non-null out-pointer must be valid for one write.
    unsafe { p.as_mut() }.ok_or((TdStatus::NullPointer, "output pointer is null".into()))
}

fn utf8<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((TdStatus::NullPointer, "text is null".into()));
    }
    // SAFETY: non-null and documented as a nul-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| (TdStatus::InvalidUtf8, e.to_string()))
}

fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err((TdStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and documented to hold `len` elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

fn initial_allocation(circuit: &CircuitGraph, net: &NetworkSpec, initial: *const usize) -> Result<Allocation, Failure> {
    let n = circuit.qubit_count;
    let network_error = |e: teledist::network::NetworkError| (TdStatus::Network, e.to_string());
    if initial.is_null() {
        allocate_in_order(net, n).map_err(network_error)
    } else {
        Allocation::new(slice(initial, n, "initial")?.to_vec(), net).map_err(network_error)
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn td_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses `.tfc` text, drops single-qubit gates and packs the rest into layers.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn td_circuit_from_tfc(text: *const c_char, out: *mut *mut TdCircuit) -> TdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let doc = parse_tfc(utf8(text)?).map_err(|e| (TdStatus::Parse, e.to_string()))?;
        let (n, gates) = doc.to_gate_list();
        *out = Box::into_raw(Box::new(TdCircuit(normalize(gates, n))));
        Ok(())
    })
}

/// Parses a layer listing (`qubits N` then `layer i: (q1,q2)...` lines).
///
/// # Safety
/// `text` must be a nul-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn td_circuit_from_layers(text: *const c_char, out: *mut *mut TdCircuit) -> TdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let circuit = CircuitGraph::parse_layer_text(utf8(text)?).map_err(|e| (TdStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(TdCircuit(circuit)));
        Ok(())
    })
}

/// Qubit count, or 0 for null.
///
/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_circuit_qubit_count(circuit: *const TdCircuit) -> usize {
    non_null(circuit, "circuit").map_or(0, |c| c.0.qubit_count)
}

/// Layer count, or 0 for null.
///
/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_circuit_layer_count(circuit: *const TdCircuit) -> usize {
    non_null(circuit, "circuit").map_or(0, |c| c.0.layer_count())
}

/// # Safety
/// `circuit` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_circuit_free(circuit: *mut TdCircuit) {
    if !circuit.is_null() {
        drop(unsafe { Box::from_raw(circuit) });
    }
}

/// Network of `machines` machines with the given capacities.
///
/// # Safety
/// `capacities` must hold `machines` values and `out` be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn td_network_new(
    capacities: *const usize,
    machines: usize,
    out: *mut *mut TdNetwork,
) -> TdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let caps = slice(capacities, machines, "capacities")?.to_vec();
        let net = NetworkSpec::new(caps).map_err(|e| (TdStatus::Network, e.to_string()))?;
        *out = Box::into_raw(Box::new(TdNetwork(net)));
        Ok(())
    })
}

/// Attaches a row-major `k x k` teleport cost matrix, row = source machine.
///
/// # Safety
/// `network` must be a live handle and `costs` hold `k * k` values.
#[no_mangle]
pub unsafe extern "C" fn td_network_set_costs(network: *mut TdNetwork, costs: *const u32) -> TdStatus {
    guard(|| {
        // SAFETY: a non-null handle comes from td_network_new.
        let net = unsafe { network.as_mut() }.ok_or((TdStatus::NullPointer, "network is null".into()))?;
        let k = net.0.machine_count();
        let flat = slice(costs, k * k, "costs")?;
        let rows = flat.chunks(k).map(<[u32]>::to_vec).collect();
        let matrix = CostMatrix::new(rows).map_err(|e| (TdStatus::Network, e.to_string()))?;
        net.0 = net
            .0
            .clone()
            .with_cost_matrix(matrix)
            .map_err(|e| (TdStatus::Network, e.to_string()))?;
        Ok(())
    })
}

/// # Safety
/// `network` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_network_free(network: *mut TdNetwork) {
    if !network.is_null() {
        drop(unsafe { Box::from_raw(network) });
    }
}

/// History-seeded binary search over windows of 10 layers, swap preference
/// on, no time limit.
#[no_mangle]
pub extern "C" fn td_options_default() -> TdOptions {
    TdOptions {
        window_size: DEFAULT_WINDOW,
        strategy: TdStrategy::History,
        history_length: DEFAULT_HISTORY,
        balance: false,
        weighted_cost: false,
        prefer_swaps: true,
        solver_seed: 0,
        time_limit_ms: 0,
    }
}

fn solve_config(o: &TdOptions) -> Result<SolveConfig, Failure> {
    if o.window_size == 0 {
        return Err((TdStatus::InvalidArgument, "window_size must be at least 1".into()));
    }
    let strategy = match o.strategy {
        TdStrategy::Linear => Strategy::Linear,
        TdStrategy::Binary => Strategy::Binary,
        TdStrategy::History if o.history_length == 0 => {
            return Err((TdStatus::InvalidArgument, "history_length must be at least 1".into()))
        }
        TdStrategy::History => Strategy::History {
            length: o.history_length,
        },
    };
    Ok(SolveConfig {
        sat: SatConfig {
            backend: Backend::Embedded { seed: o.solver_seed },
            time_limit: (o.time_limit_ms > 0).then(|| Duration::from_millis(o.time_limit_ms)),
        },
        strategy,
        objectives: Objectives {
            balance: o.balance,
            weighted_cost: o.weighted_cost,
            prefer_swaps: o.prefer_swaps,
        },
        window_size: o.window_size,
    })
}

/// Distributes the circuit's qubits over the network with minimum teleports.
/// `initial` holds one 0-based machine per qubit; null means in-order
/// filling. `options` may be null for the defaults.
///
/// # Safety
/// Handles must be live, `initial` null or `qubit_count` long, `options`
/// null or valid, and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn td_solve(
    circuit: *const TdCircuit,
    network: *const TdNetwork,
    initial: *const usize,
    options: *const TdOptions,
    out: *mut *mut TdSolution,
) -> TdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let circuit = &non_null(circuit, "circuit")?.0;
        let net = &non_null(network, "network")?.0;
        let defaults = td_options_default();
        // SAFETY: non-null options point at a caller-owned struct.
        let options = unsafe { options.as_ref() }.unwrap_or(&defaults);
        let cfg = solve_config(options)?;
        if cfg.objectives.weighted_cost && net.cost_matrix().is_none() {
            return Err((TdStatus::InvalidArgument, "weighted_cost needs a cost matrix".into()));
        }
        let start = initial_allocation(circuit, net, initial)?;
        let output = solve_circuit(circuit, net, &start, &cfg).map_err(|e| {
            use teledist::strategy::StrategyError;
            let status = match e {
                StrategyError::Encode(_) => TdStatus::InvalidArgument,
                StrategyError::Sat(_) => TdStatus::Solver,
                _ => TdStatus::Search,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(TdSolution(output.solution)));
        Ok(())
    })
}

/// Total teleports, or 0 for null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_solution_teleports(solution: *const TdSolution) -> usize {
    non_null(solution, "solution").map_or(0, |s| s.0.num_tele)
}

/// Pairwise exchanges among the teleports, or 0 for null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_solution_swaps(solution: *const TdSolution) -> usize {
    non_null(solution, "solution").map_or(0, |s| s.0.swap_count)
}

/// Teleports with each exchange counted once, or 0 for null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_solution_adjusted_teleports(solution: *const TdSolution) -> usize {
    non_null(solution, "solution").map_or(0, |s| s.0.adjusted_tele)
}

/// Number of placement states: layers plus one.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_solution_state_count(solution: *const TdSolution) -> usize {
    non_null(solution, "solution").map_or(0, |s| s.0.assignments.state_count())
}

/// Machine of `qubit` in `state`; state 0 is the initial placement.
///
/// # Safety
/// `solution` must be a live handle and `machine` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn td_solution_machine(
    solution: *const TdSolution,
    state: usize,
    qubit: usize,
    machine: *mut usize,
) -> TdStatus {
    guard(|| {
        let s = &non_null(solution, "solution")?.0;
        // SAFETY: non-null out-pointer must be valid for one write.
        let machine = unsafe { machine.as_mut() }.ok_or((TdStatus::NullPointer, "machine is null".into()))?;
        let alloc = s
            .assignments
            .states()
            .get(state)
            .ok_or((TdStatus::InvalidArgument, format!("state {state} out of range")))?;
        if qubit >= alloc.qubit_count() {
            return Err((TdStatus::InvalidArgument, format!("qubit {qubit} out of range")));
        }
        *machine = alloc.machine_of(qubit);
        Ok(())
    })
}

/// Solution as JSON. Free the string with [`td_string_free`].
///
/// # Safety
/// `solution` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn td_solution_to_json(solution: *const TdSolution, out: *mut *mut c_char) -> TdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let s = &non_null(solution, "solution")?.0;
        let json = serde_json::to_string(s).map_err(|e| (TdStatus::Panic, e.to_string()))?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_solution_free(solution: *mut TdSolution) {
    if !solution.is_null() {
        drop(unsafe { Box::from_raw(solution) });
    }
}

/// Alloy model of the whole circuit with teleport bound `teleports`.
/// Negative `vacancies`/`cost` leave that objective out; a cost bound needs a
/// cost matrix on the network. Free the string with [`td_string_free`].
///
/// # Safety
/// Handles must be live, `initial` null or `qubit_count` long, and `out`
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn td_alloy_model(
    circuit: *const TdCircuit,
    network: *const TdNetwork,
    initial: *const usize,
    teleports: u32,
    vacancies: i64,
    cost: i64,
    out: *mut *mut c_char,
) -> TdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let circuit = &non_null(circuit, "circuit")?.0;
        let net = &non_null(network, "network")?.0;
        let start = initial_allocation(circuit, net, initial)?;
        let bound = |v: i64| u32::try_from(v).ok();
        let bounds = AlloyBounds {
            teleports,
            vacancies: bound(vacancies),
            cost: bound(cost),
        };
        let options = AlloyOptions {
            balance: bounds.vacancies.is_some(),
            hetero: bounds.cost.is_some(),
        };
        let model = emit_model(circuit, net, &start, bounds, options).map_err(|e| (TdStatus::Alloy, e.to_string()))?;
        *out = into_c_string(model.text);
        Ok(())
    })
}
