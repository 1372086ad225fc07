use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use levelcross_ffi::*;

fn last_error() -> String {
    let p = lc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn witness_json(w: *const LcWitness) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { lc_witness_to_json(w, &mut s) }, LcStatus::Ok);
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { lc_string_free(s) };
    out
}

#[test]
fn diagonal_board_round_trip() {
    let doc = CString::new(r#"{"n":2,"k":2,"d":1,"values":[[1],[2],[2],[1]]}"#).unwrap();
    let mut l = ptr::null_mut();
    assert_eq!(
        unsafe { lc_labeling_parse(doc.as_ptr(), &mut l) },
        LcStatus::Ok
    );
    let (mut n, mut k, mut d) = (0, 0, 0);
    assert_eq!(
        unsafe { lc_labeling_shape(l, &mut n, &mut k, &mut d) },
        LcStatus::Ok
    );
    assert_eq!((n, k, d), (2, 2, 1));

    let mut w = ptr::null_mut();
    assert_eq!(unsafe { lc_find_crossing(l, &mut w) }, LcStatus::Ok);
    assert_eq!(unsafe { lc_witness_cell_count(w) }, 2);
    let json = witness_json(w);
    assert!(
        json.starts_with(r#"{"kind":"chessboard","n":2,"k":2,"#),
        "{json}"
    );
    assert!(lc_last_error().is_null());
    unsafe {
        lc_witness_free(w);
        lc_labeling_free(l);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut l = ptr::null_mut();
    let bad = CString::new(r#"{"n":2,"k":2,"d":1,"values":[[1]]}"#).unwrap();
    assert_eq!(
        unsafe { lc_labeling_parse(bad.as_ptr(), &mut l) },
        LcStatus::Schema
    );
    assert!(l.is_null());
    assert!(last_error().contains("values"));

    let junk = CString::new("{").unwrap();
    assert_eq!(
        unsafe { lc_labeling_parse(junk.as_ptr(), &mut l) },
        LcStatus::Schema
    );

    assert_eq!(
        unsafe { lc_labeling_parse(ptr::null(), &mut l) },
        LcStatus::NullPointer
    );
    assert!(last_error().contains("json"));

    let mut c = 0;
    assert_eq!(
        unsafe { lc_color([0i64, 0].as_ptr(), 2, 0, &mut c) },
        LcStatus::InvalidInput
    );

    let name = CString::new("no-such-fn").unwrap();
    let mut w = ptr::null_mut();
    assert_ne!(
        unsafe { lc_levelset(name.as_ptr(), 2, 0.1, &mut w) },
        LcStatus::Ok
    );
    assert!(w.is_null());
    assert_eq!(unsafe { lc_witness_axis(ptr::null()) }, 0);
    unsafe {
        lc_witness_free(ptr::null_mut());
        lc_labeling_free(ptr::null_mut());
        lc_string_free(ptr::null_mut());
    }
}

#[test]
fn discrete_and_continuous_witnesses() {
    let doc = CString::new(r#"{"n":2,"k":3,"d":1,"values":[[1],[1],[2],[1],[2],[2],[2],[3],[3]]}"#)
        .unwrap();
    let mut l = ptr::null_mut();
    assert_eq!(
        unsafe { lc_labeling_parse(doc.as_ptr(), &mut l) },
        LcStatus::Ok
    );
    let mut w = ptr::null_mut();
    assert_eq!(
        unsafe { lc_solve_discrete(l, 0, false, &mut w) },
        LcStatus::InvalidInput
    );
    assert_eq!(
        unsafe { lc_solve_discrete(l, 1, true, &mut w) },
        LcStatus::Ok
    );
    assert!(witness_json(w).contains(r#""kind":"discrete""#));
    unsafe {
        lc_witness_free(w);
        lc_labeling_free(l);
    }

    let name = CString::new("projection").unwrap();
    let mut w = ptr::null_mut();
    assert_eq!(
        unsafe { lc_levelset(name.as_ptr(), 2, 0.25, &mut w) },
        LcStatus::Ok
    );
    assert!(unsafe { lc_witness_axis(w) } >= 1);
    assert!(witness_json(w).contains(r#""epsilon":"#));
    unsafe { lc_witness_free(w) };
}

#[test]
fn random_coloring_is_seeded() {
    let run = |seed| {
        let mut l = ptr::null_mut();
        assert_eq!(
            unsafe { lc_labeling_random(3, 4, seed, &mut l) },
            LcStatus::Ok
        );
        let mut w = ptr::null_mut();
        assert_eq!(unsafe { lc_find_crossing(l, &mut w) }, LcStatus::Ok);
        let s = witness_json(w);
        unsafe {
            lc_witness_free(w);
            lc_labeling_free(l);
        }
        s
    };
    assert_eq!(run(11), run(11));
}

#[test]
fn color_matches_core() {
    use levelcross::coloring::{color, ColoringParams};
    use levelcross::lattice::LatticePoint;
    let params = ColoringParams::new(3, 2).unwrap();
    for t in [[0i64, 0, 0], [-5, 3, 7], [11, -2, 0]] {
        let mut c = 0;
        assert_eq!(unsafe { lc_color(t.as_ptr(), 3, 2, &mut c) }, LcStatus::Ok);
        assert_eq!(c, color(&LatticePoint(t.to_vec()), params).unwrap());
    }
}

/// Compiles a small C program against the generated header and static library.
#[test]
fn c_program_links_against_header() {
    let Ok(cc) = which_cc() else { return };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let target_dir = exe.parent().unwrap().parent().unwrap();
    let lib = target_dir.join("liblevelcross_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "levelcross.h"
int main(void) {
    LcLabeling *l = NULL;
    LcWitness *w = NULL;
    char *json = NULL;
    if (lc_labeling_parse("{\"n\":2,\"k\":2,\"d\":1,\"values\":[[1],[2],[2],[1]]}", &l) != LC_STATUS_OK) return 3;
    if (lc_find_crossing(l, &w) != LC_STATUS_OK) return 4;
    if (lc_witness_to_json(w, &json) != LC_STATUS_OK) return 5;
    puts(json);
    lc_string_free(json);
    lc_witness_free(w);
    lc_labeling_free(l);
    if (lc_labeling_parse("[]", &l) != LC_STATUS_SCHEMA || l != NULL) return 6;
    if (strlen(lc_last_error()) == 0) return 7;
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(r#"{"kind":"chessboard""#), "{text}");
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
