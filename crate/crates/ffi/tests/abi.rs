use std::ffi::{CStr, CString};
use std::ptr;

use cmlhdc_ffi::*;

fn last_error() -> String {
    let p = cmlhdc_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { cmlhdc_string_free(p) };
    s
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { cmlhdc_string_free(p) };
    s
}

#[test]
fn hypervector_round_trip() {
    unsafe {
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(cmlhdc_hv_random(1000, 1, 0, &mut a), CmlhdcStatus::Ok);
        assert_eq!(cmlhdc_hv_random(1000, 1, 1, &mut b), CmlhdcStatus::Ok);
        assert_eq!(cmlhdc_hv_dim(a), 1000);

        let mut ab = ptr::null_mut();
        assert_eq!(cmlhdc_hv_bind(a, b, &mut ab), CmlhdcStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(cmlhdc_hv_bind(ab, b, &mut back), CmlhdcStatus::Ok);
        let mut sim = 0.0;
        assert_eq!(cmlhdc_hv_similarity(a, back, &mut sim), CmlhdcStatus::Ok);
        assert_eq!(sim, 1.0);

        let mut buf = vec![0i8; 1000];
        assert_eq!(cmlhdc_hv_elements(a, buf.as_mut_ptr(), buf.len()), CmlhdcStatus::Ok);
        let mut copy = ptr::null_mut();
        assert_eq!(cmlhdc_hv_from_elements(buf.as_ptr(), buf.len(), &mut copy), CmlhdcStatus::Ok);
        assert_eq!(cmlhdc_hv_similarity(a, copy, &mut sim), CmlhdcStatus::Ok);
        assert_eq!(sim, 1.0);

        for h in [a, b, ab, back, copy] {
            cmlhdc_hv_free(h);
        }
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(cmlhdc_hv_random(0, 1, 0, &mut h), CmlhdcStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(last_error().contains("dimension"));

        let bad = [1i8, 0, -1];
        assert_eq!(cmlhdc_hv_from_elements(bad.as_ptr(), 3, &mut h), CmlhdcStatus::InvalidArgument);

        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        cmlhdc_hv_random(10, 1, 0, &mut a);
        cmlhdc_hv_random(11, 1, 0, &mut b);
        let mut sim = 0.0;
        assert_eq!(cmlhdc_hv_similarity(a, b, &mut sim), CmlhdcStatus::DimensionMismatch);
        assert_eq!(cmlhdc_hv_similarity(a, ptr::null(), &mut sim), CmlhdcStatus::NullPointer);
        assert_eq!(last_error(), "b is null");
        cmlhdc_hv_free(a);
        cmlhdc_hv_free(b);
        cmlhdc_hv_free(ptr::null_mut());
        cmlhdc_string_free(ptr::null_mut());
    }
}

#[test]
fn last_error_is_per_thread() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(cmlhdc_hv_random(0, 1, 0, &mut h), CmlhdcStatus::InvalidArgument);
    }
    std::thread::spawn(|| assert!(cmlhdc_last_error().is_null())).join().unwrap();
    assert!(!last_error().is_empty());
}

#[test]
fn graph_model_lifecycle() {
    unsafe {
        let json = CString::new(r#"{"n": 6, "edges": [[0,1],[1,2],[2,3],[3,4],[4,5],[5,0],[0,3]]}"#).unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(cmlhdc_graph_from_json(json.as_ptr(), &mut g), CmlhdcStatus::Ok);
        assert_eq!(cmlhdc_graph_node_count(g), 6);
        let mut dist = 0;
        assert_eq!(cmlhdc_graph_distance(g, 1, 4, &mut dist), CmlhdcStatus::Ok);
        assert_eq!(dist, 3);
        let mut s = ptr::null_mut();
        assert_eq!(cmlhdc_graph_to_json(g, &mut s), CmlhdcStatus::Ok);
        assert!(take_string(s).contains("\"n\":6"));

        let mut m = ptr::null_mut();
        assert_eq!(cmlhdc_model_train(g, 500, 300, 3, &mut m), CmlhdcStatus::Ok);
        let mut ok = false;
        assert_eq!(cmlhdc_model_evaluate(m, 4, &mut ok), CmlhdcStatus::Ok);
        assert!(ok);
        let (mut reached, mut steps) = (false, 0);
        assert_eq!(cmlhdc_model_traverse(m, 1, 4, 0, &mut reached, &mut steps), CmlhdcStatus::Ok);
        assert!(reached && steps >= 3);
        assert_eq!(cmlhdc_model_traverse(m, 1, 40, 0, &mut reached, &mut steps), CmlhdcStatus::OutOfRange);

        let mut text = ptr::null_mut();
        assert_eq!(cmlhdc_model_to_json(m, &mut text), CmlhdcStatus::Ok);
        let mut m2 = ptr::null_mut();
        assert_eq!(cmlhdc_model_from_json(text, &mut m2), CmlhdcStatus::Ok);
        cmlhdc_string_free(text);
        let (mut reached2, mut steps2) = (false, 0);
        cmlhdc_model_traverse(m2, 1, 4, 0, &mut reached2, &mut steps2);
        assert_eq!((reached2, steps2), (true, steps));

        let broken = CString::new("{").unwrap();
        let mut m3 = ptr::null_mut();
        assert_eq!(cmlhdc_model_from_json(broken.as_ptr(), &mut m3), CmlhdcStatus::Parse);

        cmlhdc_model_free(m);
        cmlhdc_model_free(m2);
        cmlhdc_graph_free(g);
    }
}

#[test]
fn experiment_via_json() {
    unsafe {
        let cfg = CString::new(r#"{"experiment": "noise-floor", "d": 256, "trials": 50, "seed": 8}"#).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(cmlhdc_run_experiment(cfg.as_ptr(), &mut out), CmlhdcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v["summary"]["samples"], 50);

        let bad = CString::new(r#"{"experiment": "nope"}"#).unwrap();
        assert_eq!(cmlhdc_run_experiment(bad.as_ptr(), &mut out), CmlhdcStatus::Parse);
        let zero = CString::new(r#"{"experiment": "noise-floor", "trials": 0}"#).unwrap();
        assert_eq!(cmlhdc_run_experiment(zero.as_ptr(), &mut out), CmlhdcStatus::InvalidArgument);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/cmlhdc.h")).unwrap();
    for name in ["cmlhdc_last_error", "cmlhdc_string_free", "cmlhdc_hv_bind", "cmlhdc_model_traverse", "cmlhdc_run_experiment", "CMLHDC_STATUS_OK"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
