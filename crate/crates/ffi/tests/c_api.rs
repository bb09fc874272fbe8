use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use glblocks_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { glb_string_free(s) };
    out
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn block(m: usize, n: usize, key: &str) -> *mut GlbBlock {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { glb_block_new(m, n, c(key).as_ptr(), &mut h) }, GlbStatus::Ok);
    h
}

#[test]
fn cartan_entries_through_handles() {
    let b = block(1, 1, "mu=0;nu=0;t=1");
    assert_eq!(unsafe { glb_block_atypicality(b) }, 1);
    let mut out = ptr::null_mut();
    let (l, k) = (c("0:1"), c("1:1"));
    assert_eq!(unsafe { glb_cartan_entry(b, l.as_ptr(), l.as_ptr(), &mut out) }, GlbStatus::Ok);
    assert_eq!(take(out), "2");
    assert_eq!(unsafe { glb_cartan_entry(b, l.as_ptr(), k.as_ptr(), &mut out) }, GlbStatus::Ok);
    assert_eq!(take(out), "1");
    assert_eq!(unsafe { glb_graded_cartan(b, l.as_ptr(), l.as_ptr(), &mut out) }, GlbStatus::Ok);
    assert_eq!(take(out), r#"{"0":"1","2":"1"}"#);
    unsafe { glb_block_free(b) };
}

#[test]
fn h_and_dual_canonical() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { glb_h_count(c("offset=0;parts=1").as_ptr(), &mut out) }, GlbStatus::Ok);
    assert_eq!(take(out), "3");
    let status = unsafe { glb_dual_canonical(2, c("+-").as_ptr(), c("2;2").as_ptr(), &mut out) };
    assert_eq!(status, GlbStatus::Ok);
    assert_eq!(take(out), r#"{"terms":[{"key":[2,2],"coeff":{"0":"1"}},{"key":[1,1],"coeff":{"1":"-1"}}]}"#);
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    let status = unsafe { glb_block_new(2, 1, c("mu=0;nu=0;t=1").as_ptr(), &mut h) };
    assert_eq!(status, GlbStatus::InvalidInput);
    assert!(h.is_null());
    assert!(take(glb_last_error()).contains("m <= n"));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { glb_h_count(ptr::null(), &mut out) }, GlbStatus::NullPointer);
    assert_eq!(unsafe { glb_h_count(c("0:1").as_ptr(), ptr::null_mut()) }, GlbStatus::NullPointer);
    assert_eq!(unsafe { glb_cartan_entry(ptr::null(), c("0").as_ptr(), c("0").as_ptr(), &mut out) }, GlbStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { glb_h_count(bad.as_ptr() as *const c_char, &mut out) }, GlbStatus::InvalidUtf8);
    assert_eq!(unsafe { glb_block_atypicality(ptr::null()) }, -1);
    unsafe {
        glb_string_free(ptr::null_mut());
        glb_block_free(ptr::null_mut());
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/glblocks.h")).unwrap();
    for name in [
        "glb_block_new",
        "glb_block_free",
        "glb_cartan_entry",
        "glb_graded_cartan",
        "glb_h_count",
        "glb_dual_canonical",
        "glb_verify",
        "glb_string_free",
        "glb_last_error",
        "typedef struct GlbBlock GlbBlock",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "glblocks.h"

int main(void) {
    GlbBlock *b = NULL;
    char *out = NULL;
    if (glb_block_new(1, 1, "mu=0;nu=0;t=1", &b) != GLB_STATUS_OK) return 1;
    if (glb_cartan_entry(b, "0:1", "0:1", &out) != GLB_STATUS_OK) return 2;
    int ok = strcmp(out, "2") == 0;
    glb_string_free(out);
    glb_block_free(b);
    if (glb_block_new(1, 1, "garbage", &b) != GLB_STATUS_INVALID_INPUT) return 3;
    char *err = glb_last_error();
    if (err == NULL) return 4;
    glb_string_free(err);
    puts(ok ? "ok" : "mismatch");
    return ok ? 0 : 5;
}
"#;

/// Compiles a C client against the generated header and the static library.
#[test]
fn c_client_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    // the test binary lives in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libglblocks_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to build");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C client exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
