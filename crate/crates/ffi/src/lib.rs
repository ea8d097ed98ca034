//! C ABI over `axired`.
//!
//! Metrics and constraint solutions cross the boundary as opaque handles
//! that the caller frees. Every function returns an [`AxiredStatus`]; on
//! failure [`axired_last_error`] describes it. Strings handed out by the
//! library are freed with [`axired_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use axired::catalog::{by_name, equivariant_profile, parse_metric, write_metric, ProfileKind, TargetSurface};
use axired::cli::{run_args, EXIT_CHECK_FAILED, EXIT_NONCONVERGENCE, EXIT_OK};
use axired::energetics::{
    adm_mass, energy_cutoff, reduced_energy_density, solve_constraint, ConstraintOptions,
    ConstraintSolution, ConstraintStatus, CutoffOptions, EnergyDensity, WaveMapField,
};
use axired::geometry::{ricci, MetricSpec};
use axired::reduction::reduced_vacuum_residuals;
use axired::symexpr::{parse, Expr};
use axired::Error;

/// Status codes. The first four match the exit codes of the `axired` binary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiredStatus {
    Ok = 0,
    /// A report was produced but one of its checks failed.
    CheckFailed = 2,
    InvalidInput = 3,
    NonConvergence = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// A metric with its chart, parameters and sampling box.
pub struct AxiredMetric(MetricSpec);

/// Solution of the equivariant Hamiltonian constraint.
pub struct AxiredConstraint(ConstraintSolution);

/// Scalar summary of an [`AxiredConstraint`]. Fields that do not apply to
/// the status are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AxiredConstraintSummary {
    pub subcritical: bool,
    /// Radius where `chi` reaches zero (supercritical data only).
    pub r_star: f64,
    pub chi_inf: f64,
    pub m_av: f64,
    pub angle_deficit: f64,
    pub energy: f64,
    pub grid_len: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> AxiredStatus {
    match e {
        Error::QuadratureNonConvergence(_) | Error::NonDecayingMetric(_) => AxiredStatus::NonConvergence,
        _ => AxiredStatus::InvalidInput,
    }
}

struct Fail(AxiredStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type Out<T> = Result<T, Fail>;

/// Runs `f`, recording the error message and converting panics.
fn guard(f: impl FnOnce() -> Out<()>) -> AxiredStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AxiredStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {}", msg));
            AxiredStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Out<&'a str> {
    if p.is_null() {
        return Err(Fail(AxiredStatus::NullPointer, format!("`{}` is null", what)));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AxiredStatus::InvalidUtf8, format!("`{}` is not UTF-8", what)))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Out<&'a T> {
    p.as_ref()
        .ok_or_else(|| Fail(AxiredStatus::NullPointer, format!("`{}` is null", what)))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Out<()> {
    if out.is_null() {
        return Err(Fail(AxiredStatus::NullPointer, format!("`{}` is null", what)));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior NUL").into_raw()
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn axired_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn axired_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn axired_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Catalog metric by name (`minkowski`, `schwarzschild`, `kerr`,
/// `schwarzschild-spatial`) with `n_params` named parameter overrides.
///
/// # Safety
/// `name` is a NUL-terminated string; `param_names` and `param_values` point
/// to `n_params` entries each (they may be NULL when `n_params` is 0); `out`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_metric_catalog(
    name: *const c_char,
    param_names: *const *const c_char,
    param_values: *const f64,
    n_params: usize,
    out: *mut *mut AxiredMetric,
) -> AxiredStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let mut params = Vec::with_capacity(n_params);
        if n_params > 0 {
            if param_names.is_null() || param_values.is_null() {
                return Err(Fail(AxiredStatus::NullPointer, "parameter arrays are null".into()));
            }
            for i in 0..n_params {
                let k = str_arg(*param_names.add(i), "param_names[i]")?;
                params.push((k.to_string(), *param_values.add(i)));
            }
        }
        let entry = by_name(name, &params)?;
        for (k, _) in &params {
            if entry.metric.chart().param(k).is_none() {
                return Err(Fail(
                    AxiredStatus::InvalidInput,
                    format!("`{}` is not a parameter of `{}`", k, name),
                ));
            }
        }
        write_out(out, Box::into_raw(Box::new(AxiredMetric(entry.metric))), "out")
    })
}

/// Metric from the plain-text catalog format.
///
/// # Safety
/// `text` is a NUL-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_metric_parse(text: *const c_char, out: *mut *mut AxiredMetric) -> AxiredStatus {
    guard(|| {
        let m = parse_metric(str_arg(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(AxiredMetric(m))), "out")
    })
}

/// # Safety
/// `m` is NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn axired_metric_free(m: *mut AxiredMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the metric, 0 for NULL.
///
/// # Safety
/// `m` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn axired_metric_dim(m: *const AxiredMetric) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// The metric in the plain-text format; free with [`axired_string_free`].
///
/// # Safety
/// `m` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_metric_to_text(m: *const AxiredMetric, out: *mut *mut c_char) -> AxiredStatus {
    guard(|| {
        let m = ref_arg(m, "metric")?;
        write_out(out, owned_string(write_metric(&m.0)), "out")
    })
}

/// Largest `|R_ab|` over `samples` points of the sampling box.
///
/// # Safety
/// `m` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_ricci_max_abs(
    m: *const AxiredMetric,
    samples: usize,
    seed: u64,
    out: *mut f64,
) -> AxiredStatus {
    guard(|| {
        let m = ref_arg(m, "metric")?;
        let v = ricci(&m.0)?.max_abs(samples, seed)?;
        write_out(out, v, "out")
    })
}

/// Largest residual over the three blocks of the reduced vacuum equations of
/// a 3+1 axisymmetric metric.
///
/// # Safety
/// `m` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_reduced_residual_max_abs(
    m: *const AxiredMetric,
    samples: usize,
    seed: u64,
    out: *mut f64,
) -> AxiredStatus {
    guard(|| {
        let m = ref_arg(m, "metric")?;
        let worst = reduced_vacuum_residuals(&m.0)?
            .summarize(samples, seed)?
            .iter()
            .map(|s| s.max_abs)
            .fold(0.0, f64::max);
        write_out(out, worst, "out")
    })
}

/// Cutoff energy `E(R, eps)` on `[r0, r_max] x [eps, pi - eps]`. A 3+1 metric
/// uses its reduced wave map and `field` must be NULL; a 2+1 metric needs a
/// scalar `field` expression.
///
/// # Safety
/// `m` is a live handle, `field` is NULL or a NUL-terminated string, `out`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_energy_cutoff(
    m: *const AxiredMetric,
    field: *const c_char,
    r0: f64,
    r_max: f64,
    eps: f64,
    out: *mut f64,
) -> AxiredStatus {
    guard(|| {
        let m = ref_arg(m, "metric")?;
        let d = if field.is_null() {
            reduced_energy_density(&m.0)?
        } else {
            let u = parse(str_arg(field, "field")?).map_err(Error::from)?;
            let f = WaveMapField::scalar("u", m.0.chart(), &u, Expr::one());
            EnergyDensity::new(&m.0, &[f])?
        };
        let e = energy_cutoff(&d, r0, r_max, eps, CutoffOptions::default())?;
        write_out(out, e, "out")
    })
}

/// ADM mass of an asymptotically flat Riemannian 3-metric in Cartesian
/// components.
///
/// # Safety
/// `m` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_adm_mass(m: *const AxiredMetric, out: *mut f64) -> AxiredStatus {
    guard(|| {
        let m = ref_arg(m, "metric")?;
        write_out(out, adm_mass(&m.0)?, "out")
    })
}

/// Solves the equivariant constraint for a catalog profile
/// (`gaussian_bump`, `compact_bump`) into a `sphere` or `hyperbolic` target.
///
/// # Safety
/// `profile` and `target` are NUL-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_constraint_solve(
    profile: *const c_char,
    amplitude: f64,
    width: f64,
    target: *const c_char,
    out: *mut *mut AxiredConstraint,
) -> AxiredStatus {
    guard(|| {
        let p = str_arg(profile, "profile")?;
        let t = str_arg(target, "target")?;
        let kind = ProfileKind::from_name(p)
            .ok_or_else(|| Fail(AxiredStatus::InvalidInput, format!("unknown profile `{}`", p)))?;
        let tgt = TargetSurface::from_name(t)
            .ok_or_else(|| Fail(AxiredStatus::InvalidInput, format!("unknown target `{}`", t)))?;
        let data = equivariant_profile(kind, amplitude, width, tgt)?;
        let sol = solve_constraint(&data, ConstraintOptions::default())?;
        write_out(out, Box::into_raw(Box::new(AxiredConstraint(sol))), "out")
    })
}

/// # Safety
/// `c` is NULL or a live constraint handle.
#[no_mangle]
pub unsafe extern "C" fn axired_constraint_free(c: *mut AxiredConstraint) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_constraint_summary(
    c: *const AxiredConstraint,
    out: *mut AxiredConstraintSummary,
) -> AxiredStatus {
    guard(|| {
        let s = &ref_arg(c, "constraint")?.0;
        let r_star = match s.status {
            ConstraintStatus::Supercritical { r_star } => r_star,
            ConstraintStatus::Subcritical => f64::NAN,
        };
        let summary = AxiredConstraintSummary {
            subcritical: s.is_subcritical(),
            r_star,
            chi_inf: s.chi_inf.unwrap_or(f64::NAN),
            m_av: s.m_av.unwrap_or(f64::NAN),
            angle_deficit: s.angle_deficit.unwrap_or(f64::NAN),
            energy: s.energy.unwrap_or(f64::NAN),
            grid_len: s.r.len(),
        };
        write_out(out, summary, "out")
    })
}

/// Copies up to `capacity` grid points `(r, chi)` and reports how many were
/// written. Call with `capacity` equal to `grid_len` from the summary.
///
/// # Safety
/// `c` is a live handle; `r` and `chi` hold `capacity` doubles; `written` is
/// writable.
#[no_mangle]
pub unsafe extern "C" fn axired_constraint_profile(
    c: *const AxiredConstraint,
    r: *mut f64,
    chi: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> AxiredStatus {
    guard(|| {
        let s = &ref_arg(c, "constraint")?.0;
        let n = s.r.len().min(capacity);
        if n > 0 && (r.is_null() || chi.is_null()) {
            return Err(Fail(AxiredStatus::NullPointer, "output arrays are null".into()));
        }
        if n > 0 {
            ptr::copy_nonoverlapping(s.r.as_ptr(), r, n);
            ptr::copy_nonoverlapping(s.chi.as_ptr(), chi, n);
        }
        write_out(written, n, "written")
    })
}

/// Runs a command-line invocation (without the program name) and returns
/// its JSON report. Returns `CHECK_FAILED` when the report was produced but
/// did not pass; `out_json` is set in that case too.
///
/// # Safety
/// `argv` holds `argc` NUL-terminated strings; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn axired_run(argc: usize, argv: *const *const c_char, out_json: *mut *mut c_char) -> AxiredStatus {
    let mut report_failed = false;
    let status = guard(|| {
        if out_json.is_null() {
            return Err(Fail(AxiredStatus::NullPointer, "`out_json` is null".into()));
        }
        out_json.write(ptr::null_mut());
        if argc > 0 && argv.is_null() {
            return Err(Fail(AxiredStatus::NullPointer, "`argv` is null".into()));
        }
        let mut args = vec!["axired".to_string()];
        for i in 0..argc {
            args.push(str_arg(*argv.add(i), "argv[i]")?.to_string());
        }
        if args.iter().any(|a| a == "--out" || a.starts_with("--out=")) {
            return Err(Fail(AxiredStatus::InvalidInput, "--out is not available here".into()));
        }
        let outcome = run_args(args).map_err(|(code, msg)| {
            let st = match code {
                EXIT_OK => AxiredStatus::Ok,
                EXIT_NONCONVERGENCE => AxiredStatus::NonConvergence,
                _ => AxiredStatus::InvalidInput,
            };
            Fail(st, msg)
        })?;
        report_failed = outcome.code == EXIT_CHECK_FAILED;
        out_json.write(owned_string(outcome.report.to_json()));
        Ok(())
    });
    if status == AxiredStatus::Ok && report_failed {
        set_error("a check in the report failed");
        AxiredStatus::CheckFailed
    } else {
        status
    }
}
