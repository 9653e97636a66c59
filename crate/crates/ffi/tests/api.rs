use std::ffi::{CStr, CString};
use std::ptr;

use hypermotif_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { hm_string_free(p) };
    s
}

fn last_error() -> String {
    let p = hm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(hm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn cycle_census_through_handles() {
    let (src, dst) = ([0u32, 1, 2, 3], [1u32, 2, 0, 3]);
    let mut g = ptr::null_mut();
    let st = unsafe { hm_graph_from_edges(4, src.as_ptr(), dst.as_ptr(), 4, &mut g) };
    assert_eq!(st, HmStatus::Ok);
    assert_eq!(unsafe { hm_graph_node_count(g) }, 4);
    assert_eq!(unsafe { hm_graph_edge_count(g) }, 4);
    let mut counts = [0u64; HM_TRIAD_CLASSES];
    let mut loops = 0u64;
    assert_eq!(unsafe { hm_graph_triad_census(g, counts.as_mut_ptr(), &mut loops) }, HmStatus::Ok);
    assert_eq!(loops, 1);
    let loop3 = (0..HM_TRIAD_CLASSES)
        .position(|i| unsafe { CStr::from_ptr(hm_triad_class_name(i)) }.to_bytes() == b"030C")
        .unwrap();
    assert_eq!(counts[loop3], 1);
    // Four triples of four nodes: one 3-cycle, three holding one cycle edge each.
    assert_eq!(counts.iter().sum::<u64>(), 4);
    unsafe { hm_graph_free(g) };
}

#[test]
fn parse_errors_are_data_errors() {
    let text = CString::new("a b\nlonely\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { hm_graph_parse(text.as_ptr(), true, &mut g) }, HmStatus::DataError);
    assert!(g.is_null());
    assert!(last_error().contains("line 2"));
    let empty = CString::new("").unwrap();
    assert_eq!(unsafe { hm_graph_parse(empty.as_ptr(), true, &mut g) }, HmStatus::DataError);
}

#[test]
fn null_and_range_checks() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { hm_graph_parse(ptr::null(), true, &mut g) }, HmStatus::NullPointer);
    assert!(last_error().contains("text"));
    let (src, dst) = ([0u32], [5u32]);
    assert_eq!(
        unsafe { hm_graph_from_edges(2, src.as_ptr(), dst.as_ptr(), 1, &mut g) },
        HmStatus::InvalidArgument
    );
    let mut counts = [0u64; HM_TRIAD_CLASSES];
    assert_eq!(unsafe { hm_graph_triad_census(ptr::null(), counts.as_mut_ptr(), ptr::null_mut()) }, HmStatus::NullPointer);
    unsafe {
        hm_graph_free(ptr::null_mut());
        hm_circuit_free(ptr::null_mut());
        hm_trajectory_free(ptr::null_mut());
        hm_string_free(ptr::null_mut());
    }
}

#[test]
fn combinatorics_counts() {
    let ffl = CString::new("FFL").unwrap();
    let mut n = 0usize;
    assert_eq!(unsafe { hm_combination_count(ffl.as_ptr(), ffl.as_ptr(), &mut n) }, HmStatus::Ok);
    assert_eq!(n, 12);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hm_combinations_json(ffl.as_ptr(), ffl.as_ptr(), &mut out) }, HmStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);
    assert_eq!(unsafe { hm_interaction_count(3, 3, true, &mut out) }, HmStatus::Ok);
    assert_eq!(take_string(out), "262144");
    let bad = CString::new("PENTAGON").unwrap();
    assert_eq!(unsafe { hm_combination_count(bad.as_ptr(), ffl.as_ptr(), &mut n) }, HmStatus::InvalidArgument);
}

#[test]
fn toggle_switch_simulation() {
    let id = CString::new("m4-5").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { hm_circuit_from_catalog(id.as_ptr(), &mut c) }, HmStatus::Ok);
    assert_eq!(unsafe { hm_circuit_dim(c) }, 2);

    let mut d = [0.0; 2];
    assert_eq!(unsafe { hm_circuit_rhs(c, [0.0, 0.0].as_ptr(), d.as_mut_ptr(), 2) }, HmStatus::Ok);
    assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-12));

    let mut t = ptr::null_mut();
    assert_eq!(unsafe { hm_simulate(c, [0.9, 0.1].as_ptr(), 2, 50.0, 0.01, &mut t) }, HmStatus::Ok);
    let len = unsafe { hm_trajectory_len(t) };
    assert_eq!(len, 5001);
    let (mut time, mut x) = (0.0, [0.0; 2]);
    assert_eq!(unsafe { hm_trajectory_state(t, len - 1, &mut time, x.as_mut_ptr(), 2) }, HmStatus::Ok);
    assert!((time - 50.0).abs() < 1e-9);
    assert!(x[0] > 0.9 && x[1] < 0.1);
    assert_eq!(unsafe { hm_trajectory_state(t, len, &mut time, x.as_mut_ptr(), 2) }, HmStatus::InvalidArgument);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hm_trajectory_classify_json(c, t, &mut out) }, HmStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["variables"][0]["class"], "ON");
    assert_eq!(v["variables"][1]["class"], "INTERMEDIATE");

    assert_eq!(unsafe { hm_trajectory_csv(t, &mut out) }, HmStatus::Ok);
    assert!(take_string(out).starts_with("t,X,Y\n0,0.9,0.1\n"));

    assert_eq!(unsafe { hm_circuit_fixed_points_json(c, 0, &mut out) }, HmStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    let stable = v.as_array().unwrap().iter().filter(|p| p["stability"] == "stable").count();
    assert_eq!(stable, 2);

    unsafe {
        hm_trajectory_free(t);
        hm_circuit_free(c);
    }
}

#[test]
fn circuit_parameters_and_json_topology() {
    let json = CString::new(r#"{"variables":["X"],"edges":[{"from":"X","to":"X","sign":"+","n":3,"k":0.3}]}"#).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { hm_circuit_from_json(json.as_ptr(), &mut c) }, HmStatus::Ok);
    let name = CString::new("n_xx").unwrap();
    assert_eq!(unsafe { hm_circuit_set_parameter(c, name.as_ptr(), 1.0) }, HmStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hm_circuit_fixed_points_json(c, 0, &mut out) }, HmStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    let stable: Vec<_> = v.as_array().unwrap().iter().filter(|p| p["stability"] == "stable").collect();
    assert_eq!(stable.len(), 1);
    assert!((stable[0]["point"][0].as_f64().unwrap() - 0.7).abs() < 1e-9);

    let bad = CString::new("q_xx").unwrap();
    assert_eq!(unsafe { hm_circuit_set_parameter(c, bad.as_ptr(), 1.0) }, HmStatus::InvalidArgument);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { hm_simulate(c, [0.1].as_ptr(), 1, 1.0, 0.0, &mut t) }, HmStatus::InvalidArgument);
    assert!(t.is_null());
    unsafe { hm_circuit_free(c) };

    let broken = CString::new("{").unwrap();
    assert_eq!(unsafe { hm_circuit_from_json(broken.as_ptr(), &mut c) }, HmStatus::DataError);
}

#[test]
fn detect_returns_json_report() {
    let text = CString::new("a b\nb c\na c\nc a\nb a\nd a\nd b\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { hm_graph_parse(text.as_ptr(), true, &mut g) }, HmStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hm_detect_json(g, 2, 0.05, 1, &mut out) }, HmStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert!(v["results"].is_array());
    assert_eq!(unsafe { hm_detect_json(g, 2, 1.5, 1, &mut out) }, HmStatus::InvalidArgument);
    unsafe { hm_graph_free(g) };
}

#[test]
fn threads_keep_separate_errors() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { hm_graph_parse(ptr::null(), true, &mut g) }, HmStatus::NullPointer);
    std::thread::spawn(|| assert!(hm_last_error().is_null())).join().unwrap();
    assert!(!hm_last_error().is_null());
}
