use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hytw_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    hytw_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(hytw_last_error()).to_string_lossy().into_owned()
}

#[test]
fn normalize_returns_canonical_forms() {
    unsafe {
        let mut out = ptr::null_mut();
        let src = c("((lam (f (-> 0 0)) (f 3)) (lam (y 0) (succ y)))\n(lam (x 0) ((lam (y 0) y) x))\n");
        assert_eq!(hytw_normalize(src.as_ptr(), 0, &mut out), HytwStatus::Ok);
        assert_eq!(take(out), "4\n(lam (v0 0) v0)\n");
        assert_eq!(hytw_normalize(c("(+ 1").as_ptr(), 0, &mut out), HytwStatus::Syntax);
        assert_eq!(hytw_normalize(c("(succ (lam (x 0) x))").as_ptr(), 0, &mut out), HytwStatus::Type);
        assert!(last_error().starts_with("TypeMismatch"));
    }
}

#[test]
fn ordinals() {
    unsafe {
        let mut cmp = 9;
        assert_eq!(hytw_ordinal_compare(c("w*2").as_ptr(), c("w+5").as_ptr(), &mut cmp), HytwStatus::Ok);
        assert_eq!(cmp, 1);
        let mut out = ptr::null_mut();
        assert_eq!(hytw_ordinal_add(c("w+5").as_ptr(), c("w^2").as_ptr(), &mut out), HytwStatus::Ok);
        assert_eq!(take(out), "w^2");
        assert_eq!(hytw_ordinal_add(c("w+").as_ptr(), c("1").as_ptr(), &mut out), HytwStatus::Syntax);
    }
}

#[test]
fn games() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(hytw_game_parse(c(".\n0\n1\n1 0\n").as_ptr(), &mut g), HytwStatus::Ok);
        assert_eq!(hytw_game_node_count(g), 4);
        let (mut w, mut r) = (0u8, 0u64);
        assert_eq!(hytw_game_solve(g, 0, &mut w, &mut r), HytwStatus::Ok);
        assert_eq!((w, r), (1, 2));
        assert_eq!(hytw_game_solve(g, 2, &mut w, &mut r), HytwStatus::Budget);
        hytw_game_free(g);
        assert_eq!(hytw_game_parse(c("0 0\n").as_ptr(), &mut g), HytwStatus::Domain);
        assert!(last_error().starts_with("NotPrefixClosed"));
    }
}

#[test]
fn conditions_and_retagging() {
    unsafe {
        let mut q = ptr::null_mut();
        assert_eq!(hytw_condition_parse(c(". inf inf\n0 w+1 inf\n").as_ptr(), &mut q), HytwStatus::Ok);
        let mut r = ptr::null_mut();
        let rs = c(". inf inf\n0 w+1 inf\n0.0 w+1 5\n0.0.0 2 5\n");
        assert_eq!(hytw_condition_parse(rs.as_ptr(), &mut r), HytwStatus::Ok);
        let mut p = ptr::null_mut();
        assert_eq!(hytw_condition_project(q, c("w").as_ptr(), &mut p), HytwStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(hytw_condition_print(p, &mut text), HytwStatus::Ok);
        assert_eq!(take(text), ". inf inf\n0 inf inf\n");

        let mut out = ptr::null_mut();
        assert_eq!(hytw_retag(p, q, r, c("w").as_ptr(), c("1").as_ptr(), &mut out), HytwStatus::Ok);
        let mut bad = 1;
        assert_eq!(hytw_condition_violations(out, &mut bad), HytwStatus::Ok);
        assert_eq!(bad, 0);
        assert_eq!(hytw_retag(q, q, q, c("4").as_ptr(), c("3").as_ptr(), &mut out), HytwStatus::Domain);
        for h in [p, q, r, out] {
            hytw_condition_free(h);
        }
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(hytw_normalize(ptr::null(), 0, &mut out), HytwStatus::NullArgument);
        assert_eq!(hytw_normalize(c("1").as_ptr(), 0, ptr::null_mut()), HytwStatus::NullArgument);
        assert_eq!(hytw_game_solve(ptr::null(), 0, &mut 0, &mut 0), HytwStatus::NullArgument);
        assert_eq!(hytw_game_node_count(ptr::null()), 0);
        hytw_game_free(ptr::null_mut());
        hytw_string_free(ptr::null_mut());
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_links_from_c() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libhytw_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let bin = target_dir().join(format!("hytw-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    let _ = std::fs::remove_file(&bin);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
