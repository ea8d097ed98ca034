use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use axired_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = axired_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn catalog(name: &str, params: &[(&str, f64)]) -> Result<*mut AxiredMetric, AxiredStatus> {
    let names: Vec<CString> = params.iter().map(|p| cstr(p.0)).collect();
    let ptrs: Vec<*const c_char> = names.iter().map(|n| n.as_ptr()).collect();
    let values: Vec<f64> = params.iter().map(|p| p.1).collect();
    let mut out = ptr::null_mut();
    let st = unsafe {
        axired_metric_catalog(cstr(name).as_ptr(), ptrs.as_ptr(), values.as_ptr(), params.len(), &mut out)
    };
    if st == AxiredStatus::Ok {
        Ok(out)
    } else {
        Err(st)
    }
}

#[test]
fn kerr_is_vacuum_and_reduces() {
    let m = catalog("kerr", &[("M", 1.0), ("a", 0.5)]).unwrap();
    let (mut ric, mut red) = (f64::NAN, f64::NAN);
    unsafe {
        assert_eq!(axired_metric_dim(m), 4);
        assert_eq!(axired_ricci_max_abs(m, 10, 42, &mut ric), AxiredStatus::Ok);
        assert_eq!(axired_reduced_residual_max_abs(m, 10, 42, &mut red), AxiredStatus::Ok);
        axired_metric_free(m);
    }
    assert!(ric < 1e-7 && red < 1e-7, "{} {}", ric, red);
}

#[test]
fn reduced_minkowski_energy_is_log() {
    let m = catalog("minkowski", &[]).unwrap();
    let mut e = 0.0;
    let st = unsafe { axired_energy_cutoff(m, ptr::null(), 1.0, 100.0, std::f64::consts::FRAC_PI_4, &mut e) };
    unsafe { axired_metric_free(m) };
    assert_eq!(st, AxiredStatus::Ok);
    assert!((e - 100f64.ln()).abs() < 1e-6 * e);
}

#[test]
fn field_on_a_four_metric_is_rejected() {
    let m = catalog("minkowski", &[]).unwrap();
    let mut e = 0.0;
    let f = cstr("r");
    let st = unsafe { axired_energy_cutoff(m, f.as_ptr(), 1.0, 10.0, 0.5, &mut e) };
    unsafe { axired_metric_free(m) };
    assert_eq!(st, AxiredStatus::InvalidInput);
}

#[test]
fn text_round_trip() {
    let m = catalog("schwarzschild", &[("m", 1.5)]).unwrap();
    let mut text = ptr::null_mut();
    unsafe {
        assert_eq!(axired_metric_to_text(m, &mut text), AxiredStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(axired_metric_parse(text, &mut back), AxiredStatus::Ok);
        let mut ric = f64::NAN;
        assert_eq!(axired_ricci_max_abs(back, 5, 1, &mut ric), AxiredStatus::Ok);
        assert!(ric < 1e-7);
        assert!(CStr::from_ptr(text).to_str().unwrap().contains("param m=1.5"));
        axired_string_free(text);
        axired_metric_free(back);
        axired_metric_free(m);
    }
}

#[test]
fn errors_carry_status_and_message() {
    assert_eq!(catalog("nosuch", &[]), Err(AxiredStatus::InvalidInput));
    assert!(last_error().contains("nosuch"));
    assert_eq!(catalog("minkowski", &[("m", 1.0)]), Err(AxiredStatus::InvalidInput));

    let mut out = ptr::null_mut();
    let st = unsafe { axired_metric_catalog(ptr::null(), ptr::null(), ptr::null(), 0, &mut out) };
    assert_eq!(st, AxiredStatus::NullPointer);
    let bad = [0xffu8, 0];
    let st = unsafe { axired_metric_parse(bad.as_ptr().cast(), &mut out) };
    assert_eq!(st, AxiredStatus::InvalidUtf8);
    let mut x = 0.0;
    assert_eq!(unsafe { axired_adm_mass(ptr::null(), &mut x) }, AxiredStatus::NullPointer);

    // A later success clears the message.
    let m = catalog("minkowski", &[]).unwrap();
    assert!(axired_last_error().is_null());
    unsafe { axired_metric_free(m) };
}

#[test]
fn growing_metric_is_non_convergent() {
    let text = cstr(
        "dim 3 coords x y z signature riemannian\nbox x 3 10\nbox y 3 10\nbox z 3 10\n\
         0 0 := 1 + (x^2+y^2+z^2)^(1/4)\n1 1 := 1 + (x^2+y^2+z^2)^(1/4)\n2 2 := 1 + (x^2+y^2+z^2)^(1/4)\n",
    );
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(axired_metric_parse(text.as_ptr(), &mut m), AxiredStatus::Ok);
        let mut mass = 0.0;
        assert_eq!(axired_adm_mass(m, &mut mass), AxiredStatus::NonConvergence);
        axired_metric_free(m);
    }
}

#[test]
fn constraint_handle() {
    let (p, t) = (cstr("gaussian_bump"), cstr("sphere"));
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(axired_constraint_solve(p.as_ptr(), 3.0, 1.0, t.as_ptr(), &mut c), AxiredStatus::Ok);
        let mut s = std::mem::zeroed::<AxiredConstraintSummary>();
        assert_eq!(axired_constraint_summary(c, &mut s), AxiredStatus::Ok);
        assert!(!s.subcritical && s.r_star > 0.0 && s.m_av.is_nan());
        let mut r = vec![0.0; s.grid_len];
        let mut chi = vec![0.0; s.grid_len];
        let mut n = 0;
        assert_eq!(
            axired_constraint_profile(c, r.as_mut_ptr(), chi.as_mut_ptr(), s.grid_len, &mut n),
            AxiredStatus::Ok
        );
        assert_eq!(n, s.grid_len);
        assert_eq!(r[0], 0.0);
        assert_eq!(chi[0], 1.0);
        assert!(chi.windows(2).all(|w| w[1] <= w[0]));
        assert!(*r.last().unwrap() <= s.r_star + 1e-9);
        axired_constraint_free(c);
    }
}

fn run(args: &[&str]) -> (AxiredStatus, Option<serde_json::Value>) {
    let owned: Vec<CString> = args.iter().map(|a| cstr(a)).collect();
    let ptrs: Vec<*const c_char> = owned.iter().map(|a| a.as_ptr()).collect();
    let mut json = ptr::null_mut();
    let st = unsafe { axired_run(ptrs.len(), ptrs.as_ptr(), &mut json) };
    let v = (!json.is_null()).then(|| {
        let v = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
        unsafe { axired_string_free(json) };
        v
    });
    (st, v)
}

#[test]
fn run_returns_reports() {
    let (st, rep) = run(&["adm", "--metric", "schwarzschild-spatial", "--m", "2", "--expect", "2"]);
    assert_eq!(st, AxiredStatus::Ok);
    assert_eq!(rep.unwrap()["pass"], true);

    let (st, rep) = run(&["energy", "--metric", "minkowski", "--expect", "convergent"]);
    assert_eq!(st, AxiredStatus::CheckFailed);
    assert_eq!(rep.unwrap()["pass"], false);

    assert_eq!(run(&["verify", "--nope"]), (AxiredStatus::InvalidInput, None));
    assert_eq!(run(&["suite", "--out", "/tmp/x.json"]).0, AxiredStatus::InvalidInput);
}

/// Compiles `tests/c/smoke.c` against the generated header and the shared
/// library cargo built for this test run.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    assert!(lib_dir.join("libaxired_ffi.so").exists() || lib_dir.join("libaxired_ffi.dylib").exists());
    let exe = tempfile_path("axired_c_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-laxired_ffi", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe)
        .env("LD_LIBRARY_PATH", &lib_dir)
        .env("DYLD_LIBRARY_PATH", &lib_dir)
        .output()
        .unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{}_{}", stem, std::process::id()))
}
