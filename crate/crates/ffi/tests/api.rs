use std::ffi::{CStr, CString};
use std::ptr;

use teledist_ffi::*;

const CIRCUIT1: &str = include_str!("../../core/tests/data/circuit1.layers");
const ADDER: &str = include_str!("../../core/tests/data/adder.tfc");

fn last_error() -> String {
    let p = td_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn circuit(text: &str) -> *mut TdCircuit {
    let text = CString::new(text).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { td_circuit_from_layers(text.as_ptr(), &mut c) }, TdStatus::Ok);
    c
}

fn network(caps: &[usize]) -> *mut TdNetwork {
    let mut n = ptr::null_mut();
    assert_eq!(
        unsafe { td_network_new(caps.as_ptr(), caps.len(), &mut n) },
        TdStatus::Ok
    );
    n
}

#[test]
fn circuit1_through_the_c_api() {
    let c = circuit(CIRCUIT1);
    let net = network(&[3, 3]);
    let initial = [0usize, 0, 1, 1];
    let mut options = td_options_default();
    options.window_size = usize::MAX;
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(td_circuit_qubit_count(c), 4);
        assert_eq!(td_circuit_layer_count(c), 10);
        assert_eq!(td_solve(c, net, initial.as_ptr(), &options, &mut sol), TdStatus::Ok);
        assert!(td_last_error().is_null());
        assert_eq!(td_solution_teleports(sol), 6);
        assert_eq!(td_solution_adjusted_teleports(sol), 5);
        assert_eq!(td_solution_swaps(sol), 1);
        assert_eq!(td_solution_state_count(sol), 11);
        let mut m = usize::MAX;
        assert_eq!(td_solution_machine(sol, 0, 2, &mut m), TdStatus::Ok);
        assert_eq!(m, 1);
        assert_eq!(td_solution_machine(sol, 11, 0, &mut m), TdStatus::InvalidArgument);
        assert!(last_error().contains("state 11"));

        let mut json = ptr::null_mut();
        assert_eq!(td_solution_to_json(sol, &mut json), TdStatus::Ok);
        let value: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(value["num_tele"], 6);
        assert_eq!(value["adjusted_tele"], 5);
        td_string_free(json);

        td_solution_free(sol);
        td_network_free(net);
        td_circuit_free(c);
    }
}

#[test]
fn tfc_input_and_alloy_text() {
    let text = CString::new(ADDER).unwrap();
    let mut c = ptr::null_mut();
    let net = network(&[2, 2]);
    unsafe {
        assert_eq!(td_circuit_from_tfc(text.as_ptr(), &mut c), TdStatus::Ok);
        assert_eq!(td_circuit_qubit_count(c), 4);
        let mut model = ptr::null_mut();
        assert_eq!(td_alloy_model(c, net, ptr::null(), 2, -1, -1, &mut model), TdStatus::Ok);
        let model_text = CStr::from_ptr(model).to_str().unwrap().to_owned();
        assert!(model_text.contains("circGraph"));
        assert!(model_text.contains("run finalLayer"));
        td_string_free(model);
        td_circuit_free(c);
        td_network_free(net);
    }
}

#[test]
fn cost_matrix_and_weighted_objective() {
    let c = circuit(CIRCUIT1);
    let net = network(&[3, 3]);
    let costs = [0u32, 2, 1, 0];
    let initial = [0usize, 0, 1, 1];
    let mut options = td_options_default();
    options.weighted_cost = true;
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(td_network_set_costs(net, costs.as_ptr()), TdStatus::Ok);
        assert_eq!(td_solve(c, net, initial.as_ptr(), &options, &mut sol), TdStatus::Ok);
        assert_eq!(td_solution_teleports(sol), 6);
        td_solution_free(sol);

        let bad = [1u32, 2, 1, 0];
        assert_eq!(td_network_set_costs(net, bad.as_ptr()), TdStatus::Network);
        assert!(last_error().contains("diagonal"));
        td_network_free(net);
        td_circuit_free(c);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    let mut c = ptr::null_mut();
    let mut net = ptr::null_mut();
    let mut sol = ptr::null_mut();
    let bad = CString::new(".v a,b\nBEGIN\nt2 a,z\nEND\n").unwrap();
    unsafe {
        assert_eq!(td_circuit_from_tfc(ptr::null(), &mut c), TdStatus::NullPointer);
        assert_eq!(td_circuit_from_tfc(bad.as_ptr(), &mut c), TdStatus::Parse);
        assert!(!last_error().is_empty());
        assert!(c.is_null());

        let invalid = [0xffu8, 0];
        assert_eq!(
            td_circuit_from_layers(invalid.as_ptr().cast(), &mut c),
            TdStatus::InvalidUtf8
        );
        assert_eq!(td_network_new([0usize].as_ptr(), 1, &mut net), TdStatus::Network);
        assert_eq!(td_network_new(ptr::null(), 0, &mut net), TdStatus::Network);

        // a three-qubit gate cannot fit on machines of capacity two
        let wide = circuit("qubits 3\nlayer 0: (q1,q2,q3)\n");
        let small = network(&[2, 2]);
        assert_eq!(
            td_solve(wide, small, ptr::null(), ptr::null(), &mut sol),
            TdStatus::InvalidArgument
        );
        assert!(sol.is_null());

        let mut options = td_options_default();
        options.window_size = 0;
        let big = network(&[3, 3]);
        assert_eq!(
            td_solve(wide, big, ptr::null(), &options, &mut sol),
            TdStatus::InvalidArgument
        );
        assert!(last_error().contains("window_size"));
        options = td_options_default();
        options.weighted_cost = true;
        assert_eq!(
            td_solve(wide, big, ptr::null(), &options, &mut sol),
            TdStatus::InvalidArgument
        );
        let overfull = [0usize, 0, 0];
        assert_eq!(
            td_solve(wide, small, overfull.as_ptr(), ptr::null(), &mut sol),
            TdStatus::Network
        );

        assert_eq!(
            td_solve(wide, big, ptr::null(), ptr::null(), ptr::null_mut()),
            TdStatus::NullPointer
        );
        assert_eq!(td_solution_teleports(ptr::null()), 0);
        td_solution_free(ptr::null_mut());
        td_string_free(ptr::null_mut());

        td_circuit_free(wide);
        td_network_free(small);
        td_network_free(big);
    }
}
