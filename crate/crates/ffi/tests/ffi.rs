use std::ffi::{CStr, CString};
use std::ptr;

use heffter_ffi::*;

const H9: &str = include_str!("../../core/fixtures/h9_11_9.arr");

fn parse(text: &str) -> (HeffterStatus, *mut HeffterArray) {
    let c = CString::new(text).unwrap();
    let mut a = ptr::null_mut();
    let s = unsafe { heffter_array_parse(c.as_ptr(), &mut a) };
    (s, a)
}

fn last_error() -> String {
    let p = heffter_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { heffter_string_free(p) };
    s
}

fn orientation() -> (Vec<i8>, Vec<i8>) {
    let mut c = vec![1i8; 11];
    c[0] = -1;
    (vec![1; 11], c)
}

#[test]
fn array_round_trip() {
    let (s, a) = parse(H9);
    assert_eq!(s, HeffterStatus::Ok);
    assert!(heffter_last_error().is_null());
    let (mut rows, mut cols, mut v, mut t) = (0, 0, 0, 0);
    let (mut pass, mut simple) = (false, false);
    unsafe {
        assert_eq!(heffter_array_dims(a, &mut rows, &mut cols, &mut v, &mut t), HeffterStatus::Ok);
        assert_eq!(heffter_array_validate(a, &mut pass), HeffterStatus::Ok);
        assert_eq!(heffter_array_globally_simple(a, &mut simple), HeffterStatus::Ok);
        heffter_array_free(a);
    }
    assert_eq!((rows, cols, v, t), (11, 11, 207, 9));
    assert!(pass && simple);
}

#[test]
fn tour_and_embedding() {
    let (_, a) = parse(H9);
    let (r, c) = orientation();
    let mut ok = false;
    let mut e = ptr::null_mut();
    let mut genus = 0i64;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(heffter_tour_is_solution(a, r.as_ptr(), 11, c.as_ptr(), 11, &mut ok), HeffterStatus::Ok);
        assert!(ok);
        assert_eq!(heffter_embedding_build(a, r.as_ptr(), 11, c.as_ptr(), 11, &mut e), HeffterStatus::Ok);
        assert_eq!(heffter_embedding_genus(a, e, &mut genus), HeffterStatus::Ok);
        assert_eq!(heffter_embedding_report_json(a, e, &mut json), HeffterStatus::Ok);
        heffter_embedding_free(e);
        heffter_array_free(a);
    }
    assert_eq!(genus, 7867);
    let rep: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(rep["faces"], 4554);
    assert_eq!(rep["pass"], true);
}

#[test]
fn incompatible_pair_reports_status() {
    let (_, a) = parse(H9);
    let ones = [1i8; 11];
    let mut e = ptr::null_mut();
    let s = unsafe { heffter_embedding_build(a, ones.as_ptr(), 11, ones.as_ptr(), 11, &mut e) };
    assert_eq!(s, HeffterStatus::NotCompatible);
    assert!(e.is_null());
    assert!(last_error().contains("not compatible"));
    let mut ok = true;
    let s = unsafe { heffter_tour_is_solution(a, ones.as_ptr(), 3, ones.as_ptr(), 11, &mut ok) };
    assert_eq!(s, HeffterStatus::InvalidArgument);
    unsafe { heffter_array_free(a) };
}

#[test]
fn errors_and_null_handling() {
    let (s, a) = parse("not an array");
    assert_eq!(s, HeffterStatus::Parse);
    assert!(a.is_null());
    assert!(!last_error().is_empty());
    let mut pass = false;
    assert_eq!(unsafe { heffter_array_validate(ptr::null(), &mut pass) }, HeffterStatus::NullPointer);
    assert_eq!(unsafe { heffter_array_parse(ptr::null(), ptr::null_mut()) }, HeffterStatus::NullPointer);
    unsafe {
        heffter_array_free(ptr::null_mut());
        heffter_embedding_free(ptr::null_mut());
        heffter_string_free(ptr::null_mut());
    }
}

#[test]
fn bounds_and_genus_formula() {
    let name = CString::new("CDY").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { heffter_bounds_json(name.as_ptr(), 13, 11, 0, &mut out) }, HeffterStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["exact"], "11");
    assert_eq!(unsafe { heffter_bounds_json(name.as_ptr(), 13, 7, 0, &mut out) }, HeffterStatus::Domain);
    let bogus = CString::new("NoSuchTheorem").unwrap();
    assert_ne!(unsafe { heffter_bounds_json(bogus.as_ptr(), 13, 11, 0, &mut out) }, HeffterStatus::Ok);
    let mut g = 0;
    assert_eq!(unsafe { heffter_genus_formula(11, 11, 9, 9, &mut g) }, HeffterStatus::Ok);
    assert_eq!(g, 7867);
    assert_eq!(unsafe { heffter_genus_formula(3, 3, 2, 1, &mut g) }, HeffterStatus::Domain);
}
