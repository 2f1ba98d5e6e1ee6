use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use tdgen_ffi::*;

const BUBBLE: &str = include_str!("../../../subjects/bubble_sort.tp");
const BUBBLE_SCHEMA: &str = include_str!("../../../subjects/bubble_sort.schema.json");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tdg_last_error()) }
        .to_string_lossy()
        .into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    tdg_string_free(s);
    out
}

fn bubble() -> *mut TdgProgram {
    let mut p = ptr::null_mut();
    let status = unsafe { tdg_program_parse(c(BUBBLE).as_ptr(), &mut p) };
    assert_eq!(status, TdgStatus::Ok, "{}", last_error());
    p
}

#[test]
fn parse_and_run() {
    let p = bubble();
    unsafe {
        assert_eq!(tdg_program_decision_count(p), 3);
        let mut out = ptr::null_mut();
        let input = c(r#"{"b":[2,4,3],"n":3}"#);
        assert_eq!(
            tdg_program_run(p, input.as_ptr(), 10_000, &mut out),
            TdgStatus::Ok
        );
        assert_eq!(take(out), "a b -c b c -b a b -c -b -a");
        assert_eq!(last_error(), "");
        tdg_program_free(p);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(
            tdg_program_parse(c("").as_ptr(), &mut p),
            TdgStatus::ParseError
        );
        assert!(p.is_null());
        assert!(last_error().starts_with("1:1"), "{}", last_error());

        let src = c("fn f(n: int) { m = 1; }");
        assert_eq!(
            tdg_program_parse(src.as_ptr(), &mut p),
            TdgStatus::SemanticError
        );
        assert_eq!(
            tdg_program_parse(ptr::null(), &mut p),
            TdgStatus::NullArgument
        );

        let p = bubble();
        let mut out = ptr::null_mut();
        let input = c(r#"{"b":[1]}"#);
        assert_eq!(
            tdg_program_run(p, input.as_ptr(), 100, &mut out),
            TdgStatus::InputError
        );
        assert!(out.is_null());
        let input = c(r#"{"b":[5,4,3,2,1],"n":5}"#);
        assert_eq!(
            tdg_program_run(p, input.as_ptr(), 10, &mut out),
            TdgStatus::BudgetExceeded
        );
        let input = c(r#"{"b":[1],"n":3}"#);
        assert_eq!(
            tdg_program_run(p, input.as_ptr(), 1000, &mut out),
            TdgStatus::RuntimeError
        );
        assert!(last_error().contains("runtime error"), "{}", last_error());
        tdg_program_free(p);
        tdg_program_free(ptr::null_mut());
        tdg_string_free(ptr::null_mut());
    }
}

#[test]
fn predict_fills_the_struct() {
    let mut h = TdgHeuristic::default();
    unsafe {
        let dims = [10u64];
        assert_eq!(
            tdg_predict(c("linear").as_ptr(), dims.as_ptr(), 1, &mut h),
            TdgStatus::Ok
        );
        assert_eq!((h.k_l, h.k_s, h.has_k_s, h.l_max), (10, 11, true, 21));
        let dims = [3u64];
        assert_eq!(
            tdg_predict(c("merge").as_ptr(), dims.as_ptr(), 1, &mut h),
            TdgStatus::Ok
        );
        assert_eq!((h.k_l, h.has_k_s, h.l_max), (6, false, 14));
        assert_eq!(
            tdg_predict(c("heap").as_ptr(), dims.as_ptr(), 1, &mut h),
            TdgStatus::UnknownConstruct
        );
    }
}

#[test]
fn campaign_outputs_match_across_workers() {
    let p = bubble();
    let schema = c(BUBBLE_SCHEMA);
    let config =
        c(r#"{"max_size": 4, "seed": 3, "stop_rule": {"type": "saturation", "window": 3}}"#);
    let run = |workers| unsafe {
        let mut camp = ptr::null_mut();
        let st = tdg_campaign_run(
            p,
            schema.as_ptr(),
            config.as_ptr(),
            workers,
            true,
            &mut camp,
        );
        assert_eq!(st, TdgStatus::Ok, "{}", last_error());
        let mut csv = ptr::null_mut();
        let mut suite = ptr::null_mut();
        assert_eq!(tdg_campaign_report_csv(camp, &mut csv), TdgStatus::Ok);
        assert_eq!(tdg_campaign_suite_json(camp, &mut suite), TdgStatus::Ok);
        let out = (
            tdg_campaign_k_longest(camp),
            tdg_campaign_k_saturation(camp),
            tdg_campaign_path_count(camp),
            take(csv),
            take(suite),
        );
        tdg_campaign_free(camp);
        out
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one.0, 6);
    assert!(one.3.starts_with("k,test_cases,ufp,nfp,llp,etime_ms\n"));
    let suite: serde_json::Value = serde_json::from_str(&one.4).unwrap();
    assert_eq!(suite["entries"].as_array().unwrap().len(), one.2);

    unsafe {
        let mut camp = ptr::null_mut();
        let bad = c(r#"{"batch": 0}"#);
        let st = tdg_campaign_run(p, schema.as_ptr(), bad.as_ptr(), 1, true, &mut camp);
        assert_eq!(st, TdgStatus::ConfigError);
        let bad_schema = c(r#"{"params": []}"#);
        let st = tdg_campaign_run(p, bad_schema.as_ptr(), ptr::null(), 1, true, &mut camp);
        assert_eq!(st, TdgStatus::SchemaError);
        assert!(camp.is_null());
        assert_eq!(tdg_campaign_k_longest(ptr::null()), -1);
        tdg_program_free(p);
    }
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libtdgen_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let subjects = manifest.join("../../subjects");
    let out = Command::new(&exe)
        .arg(subjects.join("bubble_sort.tp"))
        .arg(subjects.join("bubble_sort.schema.json"))
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "{stdout}\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("path=a b -c -b -a\n"), "{stdout}");
    assert!(stdout.contains("error=1:"), "{stdout}");
    assert!(stdout.contains("predict=64 65 105\n"), "{stdout}");
    assert!(stdout.contains("k_L=3 "), "{stdout}");
    assert!(
        stdout.contains("header=k,test_cases,ufp,nfp,llp,etime_ms\n"),
        "{stdout}"
    );
}
