use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use branched_rough::path::PLPath;
use branched_rough::rde::{lift_bv, p_variation, solve_euler};
use branched_rough_ffi::*;

const POINTS: [f64; 8] = [0.0, 0.0, 0.5, 0.25, -0.25, 0.75, 0.125, 0.5];

fn field_json() -> CString {
    CString::new(
        r#"{"e": 2, "d": 2, "box": [[-3, 3], [-3, 3]], "components": [
            {"monomials": [{"exponents": [0, 0], "coeff": [1, 0]}, {"exponents": [0, 1], "coeff": [0, 0.5]}]},
            {"monomials": [{"exponents": [1, 0], "coeff": [-0.5, 0]}, {"exponents": [0, 0], "coeff": [0, 1]}]}
        ]}"#,
    )
    .unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(brp_last_error()) }.to_string_lossy().into_owned()
}

fn lifted() -> *mut BrpRoughPath {
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { brp_lift(ptr::null(), POINTS.as_ptr(), 4, 2, 2.5, &mut x) }, BrpStatus::Ok);
    x
}

#[test]
fn lift_and_p_variation_match_the_library() {
    let x = lifted();
    let incs: Vec<Vec<f64>> = POINTS.chunks(2).collect::<Vec<_>>().windows(2).map(|w| vec![w[1][0] - w[0][0], w[1][1] - w[0][1]]).collect();
    let direct = lift_bv(&PLPath::from_increments(2, &incs), 2.5).unwrap();
    let mut v = 0.0;
    unsafe {
        assert_eq!(brp_rough_path_len(x), 4);
        assert_eq!(brp_p_variation(x, 2.5, &mut v), BrpStatus::Ok);
    }
    assert_eq!(v, p_variation(&direct, 2.5, 0, 3));
    unsafe { brp_rough_path_free(x) };
}

#[test]
fn json_round_trip_and_euler_solve() {
    let x = lifted();
    let mut text = ptr::null_mut();
    let mut y = ptr::null_mut();
    let mut f = ptr::null_mut();
    let mut end = [0.0; 3];
    let xi = [0.1, -0.2];
    unsafe {
        assert_eq!(brp_rough_path_to_json(x, &mut text), BrpStatus::Ok);
        assert_eq!(brp_rough_path_from_json(text, &mut y), BrpStatus::Ok);
        assert_eq!(brp_field_from_json(field_json().as_ptr(), &mut f), BrpStatus::Ok);
        assert_eq!(brp_solve_euler(y, f, xi.as_ptr(), 2, end.as_mut_ptr(), 3), BrpStatus::Ok);
        assert_eq!(brp_solve_euler(y, f, xi.as_ptr(), 2, end.as_mut_ptr(), 1), BrpStatus::BufferTooSmall);

        let rv = serde_json::from_str(CStr::from_ptr(text).to_str().unwrap()).unwrap();
        let rp = branched_rough::rde::BranchedRoughPath::<f64>::from_json(&rv).unwrap();
        let fv = serde_json::from_str(field_json().to_str().unwrap()).unwrap();
        let field = branched_rough::fields::PolyVectorField::<f64>::from_json(&fv).unwrap();
        assert_eq!(&end[..2], solve_euler(&rp, &field, &xi, &[]).unwrap().end());

        brp_string_free(text);
        brp_rough_path_free(x);
        brp_rough_path_free(y);
        brp_field_free(f);
    }
}

#[test]
fn failures_set_status_and_message() {
    let mut x = ptr::null_mut();
    let bad = CString::new("{not json").unwrap();
    unsafe {
        assert_eq!(brp_rough_path_from_json(bad.as_ptr(), &mut x), BrpStatus::Parse);
        assert!(x.is_null());
        assert_eq!(brp_rough_path_from_json(ptr::null(), &mut x), BrpStatus::NullPointer);
        assert_eq!(last_error(), "json is null");
        assert_eq!(brp_lift(ptr::null(), POINTS.as_ptr(), 4, 2, 0.5, &mut x), BrpStatus::InvalidArgument);
        let mut pass = -1;
        assert_eq!(brp_check_algebra(9, 2, 0, &mut pass, ptr::null_mut()), BrpStatus::InvalidArgument);
        assert!(last_error().contains("check-algebra supports"));
        brp_rough_path_free(ptr::null_mut());
        brp_string_free(ptr::null_mut());
    }
}

#[test]
fn check_algebra_reports_json() {
    let mut pass = 0;
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(brp_check_algebra(3, 2, 1, &mut pass, &mut report), BrpStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert!(v["checks"].as_array().unwrap().len() >= 10);
        brp_string_free(report);
    }
    assert_eq!(pass, 1);
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/branched_rough.h")).unwrap();
    for name in [
        "brp_last_error",
        "brp_lift",
        "brp_rough_path_from_json",
        "brp_rough_path_to_json",
        "brp_rough_path_len",
        "brp_p_variation",
        "brp_field_from_json",
        "brp_solve_euler",
        "brp_check_algebra",
        "brp_rough_path_free",
        "brp_field_free",
        "brp_string_free",
        "BRP_STATUS_BUFFER_TOO_SMALL = 6",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libbranched_rough_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("4 "));
}
