use std::ffi::{c_char, CStr, CString};
use std::ptr;

use mcmrep_ffi::*;
use serde_json::Value;

const NODAL: &str = "../../examples_problems/nodal.toml";

fn take(s: *mut c_char) -> Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { mcm_string_free(s) };
    v
}

fn last_error() -> Value {
    let p = mcm_last_error();
    assert!(!p.is_null());
    serde_json::from_str(unsafe { CStr::from_ptr(p) }.to_str().unwrap()).unwrap()
}

fn nodal() -> *mut McmProblem {
    let path = CString::new(NODAL).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { mcm_problem_from_file(path.as_ptr(), &mut h) },
        McmStatus::Ok
    );
    h
}

#[test]
fn tangent_and_ext_through_handles() {
    let h = nodal();
    assert_eq!(unsafe { mcm_problem_module_count(h) }, 4);
    let m = CString::new("MXplusMY").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mcm_tangent_json(h, m.as_ptr(), true, &mut out) },
        McmStatus::Ok
    );
    let v = take(out);
    assert_eq!(v["schema"], "mcmrep.tangent/1");
    assert_eq!(v["field"], 32003);
    let r = &v["result"];
    let dims: Vec<u64> = [
        "dim_end_a_0",
        "dim_end_r_0",
        "dim_tangent",
        "dim_ext1_0_via_sequence",
    ]
    .iter()
    .map(|k| r[*k].as_u64().unwrap())
    .collect();
    assert_eq!(dims, [2, 4, 2, 0]);

    let (x, y) = (CString::new("MX").unwrap(), CString::new("MY").unwrap());
    assert_eq!(
        unsafe { mcm_ext1_json(h, x.as_ptr(), y.as_ptr(), -5, 5, &mut out) },
        McmStatus::Ok
    );
    let v = take(out);
    assert_eq!(v["schema"], "mcmrep.ext/1");
    let dims: Vec<(i64, u64)> = serde_json::from_value(v["result"]["dims"].clone()).unwrap();
    assert_eq!(dims.len(), 11);
    for (d, k) in dims {
        assert_eq!(k, u64::from(d == -1), "degree {d}");
    }
    unsafe { mcm_problem_free(h) };
}

#[test]
fn classify_stats_split_equations() {
    let h = nodal();
    let mut out = ptr::null_mut();
    let k2 = CString::new("k2").unwrap();
    assert_eq!(
        unsafe { mcm_classify_json(h, k2.as_ptr(), 5, 7, &mut out) },
        McmStatus::Ok
    );
    let v = take(out);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["result"]["classes"].as_array().unwrap().len(), 3);

    assert_eq!(
        unsafe { mcm_equations_json(h, k2.as_ptr(), &mut out) },
        McmStatus::Ok
    );
    assert_eq!(take(out)["result"]["num_equations"], 4);

    let a = CString::new("A").unwrap();
    assert_eq!(
        unsafe { mcm_stats_json(h, a.as_ptr(), &mut out) },
        McmStatus::Ok
    );
    let v = take(out);
    assert_eq!(v["result"]["stats"]["rank"], 2);
    assert_eq!(v["result"]["dual"]["g_max"], 0);

    assert_eq!(
        unsafe { mcm_split_json(h, a.as_ptr(), &mut out) },
        McmStatus::Ok
    );
    assert_eq!(take(out)["result"]["gap"], false);
    unsafe { mcm_problem_free(h) };
}

#[test]
fn errors_are_structured() {
    let h = nodal();
    let mut out = ptr::null_mut();
    let bad = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { mcm_stats_json(h, bad.as_ptr(), &mut out) },
        McmStatus::Input
    );
    assert!(out.is_null());
    let e = last_error();
    assert_eq!(e["schema"], "mcmrep.error/1");
    assert_eq!(e["kind"], "input");
    assert_eq!(
        unsafe { mcm_stats_json(h, ptr::null(), &mut out) },
        McmStatus::NullArgument
    );
    assert_eq!(
        unsafe { mcm_stats_json(ptr::null(), bad.as_ptr(), &mut out) },
        McmStatus::NullArgument
    );
    unsafe { mcm_problem_free(h) };

    let src = CString::new("[field]\np = 32003\n[ring]\nvariables = [\"t\"]\nweights = [1]\n[algebra]\ngenerators = [\"x\"]\nshifts = [-1]\n[algebra.products]\n\"x*x\" = \"1\"\n").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { mcm_problem_from_str(src.as_ptr(), &mut h) },
        McmStatus::Input
    );
    assert!(h.is_null());
    assert!(last_error()["message"]
        .as_str()
        .unwrap()
        .contains("inhomogeneous structure constant"));

    // A successful call clears the error slot.
    let h = nodal();
    assert!(mcm_last_error().is_null());
    unsafe { mcm_problem_free(h) };
    unsafe { mcm_problem_free(ptr::null_mut()) };
    unsafe { mcm_string_free(ptr::null_mut()) };
}

#[test]
fn ade_text_parses_back() {
    let name = CString::new("A").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mcm_ade_problem_toml(name.as_ptr(), 3, 32003, 1, &mut out) },
        McmStatus::Ok
    );
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { mcm_problem_from_str(out, &mut h) }, McmStatus::Ok);
    assert_eq!(unsafe { mcm_problem_module_count(h) }, 3);
    unsafe {
        mcm_string_free(out);
        mcm_problem_free(h);
    }
    let bad = CString::new("Q").unwrap();
    assert_ne!(
        unsafe { mcm_ade_problem_toml(bad.as_ptr(), 3, 32003, 1, &mut out) },
        McmStatus::Ok
    );
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(mcm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mcmrep.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ McmProblem *p = 0; char *s = 0; \
             return (int)mcm_stats_json(p, \"M\", &s) + (mcm_version() == 0); }}\n"
        ),
    )
    .unwrap();
    let status = match std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(_) => return, // no C compiler on this host
    };
    assert!(status.success());
}
