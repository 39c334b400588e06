use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use tlemma_ffi::*;

const EX: &str = "(declare-fun x () Real)(assert (or (= x 0) (= x 1)))";

fn parse(text: &str) -> *mut TlemmaInstance {
    let c = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { tlemma_instance_parse(c.as_ptr(), &mut inst) }, TlemmaStatus::Ok);
    inst
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tlemma_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn enumerate_inspect_render_verify() {
    let inst = parse(EX);
    assert_eq!(unsafe { tlemma_instance_num_atoms(inst) }, 2);
    let mut set = ptr::null_mut();
    let strategy = CString::new("baseline").unwrap();
    assert_eq!(unsafe { tlemma_enumerate(inst, strategy.as_ptr(), ptr::null(), &mut set) }, TlemmaStatus::Ok);
    assert_eq!(unsafe { tlemma_lemmas_len(set) }, 1);
    let mut len = 0;
    assert_eq!(unsafe { tlemma_lemma_len(set, 0, &mut len) }, TlemmaStatus::Ok);
    assert_eq!(len, 2);
    let (mut atom, mut positive) = (9u32, true);
    for (i, expected) in [0u32, 1].into_iter().enumerate() {
        assert_eq!(unsafe { tlemma_lemma_literal(set, 0, i, &mut atom, &mut positive) }, TlemmaStatus::Ok);
        assert_eq!((atom, positive), (expected, false));
    }
    assert_eq!(unsafe { tlemma_lemma_literal(set, 0, 2, &mut atom, &mut positive) }, TlemmaStatus::OutOfRange);
    assert_eq!(unsafe { tlemma_lemma_len(set, 5, &mut len) }, TlemmaStatus::OutOfRange);

    let text = unsafe { tlemma_lemmas_render(inst, set) };
    assert!(!text.is_null());
    let s = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    unsafe { tlemma_string_free(text) };
    assert!(s.contains("(assert (or (not (= x 0.0)) (not (= x 1.0))))"));

    let mut v = TlemmaVerdict::default();
    assert_eq!(unsafe { tlemma_verify(inst, set, 20, &mut v) }, TlemmaStatus::Ok);
    assert!(v.rules_out && v.lemmas_valid && v.atoms_in_theory && v.abstraction_equivalent);
    assert_eq!((v.n_ctta, v.n_itta), (2, 1));
    assert_eq!(unsafe { tlemma_verify(inst, set, 1, &mut v) }, TlemmaStatus::CapExceeded);
    unsafe {
        tlemma_lemmas_free(set);
        tlemma_instance_free(inst);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { tlemma_instance_parse(ptr::null(), &mut inst) }, TlemmaStatus::NullPointer);
    let bad = CString::new("(assert (and").unwrap();
    assert_eq!(unsafe { tlemma_instance_parse(bad.as_ptr(), &mut inst) }, TlemmaStatus::Parse);
    assert!(inst.is_null());
    assert!(!last_error().is_empty());
    let unsupported = CString::new("(declare-fun x () Real)(push 1)(assert (<= x 0))").unwrap();
    assert_eq!(unsafe { tlemma_instance_parse(unsupported.as_ptr(), &mut inst) }, TlemmaStatus::Unsupported);
    let invalid = [0xffu8, 0];
    assert_eq!(unsafe { tlemma_instance_parse(invalid.as_ptr().cast(), &mut inst) }, TlemmaStatus::InvalidUtf8);

    let inst = parse(EX);
    let mut set = ptr::null_mut();
    let name = CString::new("fastest").unwrap();
    assert_eq!(unsafe { tlemma_enumerate(inst, name.as_ptr(), ptr::null(), &mut set) }, TlemmaStatus::UnknownStrategy);
    assert!(last_error().contains("dnc-proj-part"));
    assert!(set.is_null());

    let opts = TlemmaOptions {
        oracle_cmd: c"/nonexistent/solver".as_ptr(),
        ..tlemma_options_default()
    };
    let name = CString::new("baseline").unwrap();
    assert_eq!(unsafe { tlemma_enumerate(inst, name.as_ptr(), &opts, &mut set) }, TlemmaStatus::Oracle);

    let opts = TlemmaOptions {
        budget_secs: 1e-9,
        ..tlemma_options_default()
    };
    assert_eq!(unsafe { tlemma_enumerate(inst, name.as_ptr(), &opts, &mut set) }, TlemmaStatus::BudgetExceeded);
    assert!(!set.is_null());
    unsafe {
        tlemma_lemmas_free(set);
        tlemma_instance_free(inst);
        tlemma_instance_free(ptr::null_mut());
        tlemma_lemmas_free(ptr::null_mut());
        tlemma_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { tlemma_lemmas_len(ptr::null()) }, 0);
}

#[test]
fn foreign_lemma_set_is_not_rendered() {
    let big = parse("(declare-fun x () Real)(declare-fun y () Real)(assert (and (or (= x 0) (= x 1)) (or (= y 0) (= y 1))))");
    let small = parse("(declare-fun z () Real)(assert (<= z 0))");
    let mut set = ptr::null_mut();
    let name = CString::new("dnc-proj-part").unwrap();
    let opts = TlemmaOptions {
        workers: 2,
        ..tlemma_options_default()
    };
    assert_eq!(unsafe { tlemma_enumerate(big, name.as_ptr(), &opts, &mut set) }, TlemmaStatus::Ok);
    assert_eq!(unsafe { tlemma_lemmas_len(set) }, 2);
    assert!(unsafe { tlemma_lemmas_render(small, set) }.is_null());
    unsafe {
        tlemma_lemmas_free(set);
        tlemma_instance_free(big);
        tlemma_instance_free(small);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tlemma.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "tlemma_instance_parse",
        "tlemma_instance_free",
        "tlemma_enumerate",
        "tlemma_lemmas_render",
        "tlemma_verify",
        "tlemma_last_error",
        "TLEMMA_STATUS_BUDGET_EXCEEDED = 6",
        "typedef struct TlemmaInstance TlemmaInstance;",
    ] {
        assert!(h.contains(f), "header lacks {f}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "tlemma.h"

int main(void) {
    TlemmaInstance *inst = NULL;
    if (tlemma_instance_parse("(declare-fun x () Real)(assert (or (= x 0) (= x 1)))", &inst) != TLEMMA_STATUS_OK) return 2;
    TlemmaOptions opts = tlemma_options_default();
    opts.workers = 2;
    TlemmaLemmaSet *set = NULL;
    if (tlemma_enumerate(inst, "dnc-proj-part", &opts, &set) != TLEMMA_STATUS_OK) return 3;
    TlemmaVerdict v;
    if (tlemma_verify(inst, set, 20, &v) != TLEMMA_STATUS_OK || !v.rules_out) return 4;
    char *text = tlemma_lemmas_render(inst, set);
    printf("%zu %s", tlemma_lemmas_len(set), text);
    tlemma_string_free(text);
    if (tlemma_enumerate(inst, "nope", &opts, &set) != TLEMMA_STATUS_UNKNOWN_STRATEGY) return 5;
    if (strlen(tlemma_last_error()) == 0) return 6;
    tlemma_lemmas_free(set);
    tlemma_instance_free(inst);
    return 0;
}
"#;

fn cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = cc() else { return };
    // target/<profile>/deps/<test binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libtlemma_ffi.a");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let bin = dir.path().join("main");
    if !lib.exists() {
        // Without the archive, at least check the header compiles.
        let o = Command::new(cc).arg("-fsyntax-only").arg("-I").arg(&include).arg(&src).output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        return;
    }
    let o = Command::new(cc)
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let out = String::from_utf8(run.stdout).unwrap();
    assert!(out.starts_with("1 (set-logic QF_LRA)"), "{out}");
}
