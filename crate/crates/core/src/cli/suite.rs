//! The acceptance suite behind `axired suite`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::commands::{self, relative_gap, Context};
use super::report::{Inputs, Report};
use super::{Check, MetricArgs};
use crate::catalog::{
    equivariant_profile, kerr, minkowski, schwarzschild, schwarzschild_spatial_cartesian,
    ProfileKind, TargetSurface,
};
use crate::energetics::{
    adm_mass, amplitude_sweep, divergence_fit, energy_cutoff_series, mass_identities,
    reduced_energy_density, solve_constraint, ConstraintOptions, ConstraintStatus, CutoffOptions,
    EnergyDensity, FitThresholds, Verdict,
};
use crate::error::Result;
use crate::geometry::{box_scalar, conformal_box, conformal_ricci, ricci, MetricSpec};
use crate::numeric::quadrature::{composite_simpson, gauss_legendre, observed_order};
use crate::reduction::{conformal_reduce, split_killing, TwistData, TwistWeight};
use crate::symexpr::{differentiate, parse, Expr, Tape};

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {}: {} ({:.1}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

type Check9 = fn(&Context) -> Result<(bool, String)>;

const CRITERIA: [(&str, Check9); 9] = [
    ("vacuum", vacuum),
    ("reduction residuals", reduction),
    ("conformal identities", conformal),
    ("twist sector", twist),
    ("wave-map residuals", wave_map),
    ("energy divergence", energy),
    ("ADM mass", adm),
    ("equivariant mass chain", mass_chain),
    ("numerical hygiene", hygiene),
];

/// Runs every criterion; a criterion that errors counts as failed.
pub fn run_suite(ctx: &Context) -> Result<(Report, String)> {
    let mut rep = Report::new(
        "suite",
        Inputs {
            seed: ctx.seed,
            samples: ctx.samples,
            ..Inputs::default()
        },
    );
    let mut lines = String::new();
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = f(ctx).unwrap_or_else(|e| (false, format!("error: {}", e)));
        let c = Criterion {
            id: i + 1,
            name,
            pass,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        };
        lines.push_str(&c.line());
        lines.push('\n');
        rep.flag(&format!("criterion_{}", c.id), json!(c), c.pass);
    }
    lines.push_str(&format!("suite: {}\n", if rep.pass { "PASS" } else { "FAIL" }));
    Ok((rep, lines))
}

fn catalog_args(name: &str) -> MetricArgs {
    MetricArgs {
        metric: Some(name.into()),
        metric_file: None,
        m: None,
        big_m: None,
        a: None,
    }
}

fn catalog_metrics() -> Result<Vec<(&'static str, MetricSpec)>> {
    Ok(vec![
        ("minkowski", minkowski().metric),
        ("schwarzschild", schwarzschild(1.0)?.metric),
        ("kerr", kerr(1.0, 0.5)?.metric),
    ])
}

const CATALOG: [&str; 3] = ["minkowski", "schwarzschild", "kerr"];

/// Largest residual row of a `verify` run and whether all rows passed.
fn verify_rows(ctx: &Context, name: &str, checks: &[Check], tol: Option<f64>) -> Result<(bool, String)> {
    let rep = commands::verify(ctx, &catalog_args(name), checks, tol)?;
    let worst = rep.residuals.iter().map(|r| r.max_abs).fold(0.0, f64::max);
    Ok((rep.pass, format!("{} {:.1e}", name, worst)))
}

fn join(parts: Vec<(bool, String)>) -> (bool, String) {
    let pass = parts.iter().all(|p| p.0);
    (pass, parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join(", "))
}

fn vacuum(ctx: &Context) -> Result<(bool, String)> {
    let parts = CATALOG
        .iter()
        .map(|n| verify_rows(ctx, n, &[Check::Vacuum], Some(1e-7)))
        .collect::<Result<Vec<_>>>()?;
    let (pass, d) = join(parts);
    Ok((pass, format!("max |R_ab| {}", d)))
}

fn reduction(ctx: &Context) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    for n in CATALOG {
        let (ok, d) = verify_rows(ctx, n, &[Check::Reduced], Some(1e-7))?;
        let rec = commands::reduce(ctx, &catalog_args(n), false, 1e-9)?;
        let res = rec
            .results
            .iter()
            .find(|e| e.name == "reconstruction_residual")
            .and_then(|e| e.value.as_f64())
            .unwrap_or(f64::NAN);
        parts.push((ok && rec.pass, format!("{} (reconstruction {:.1e})", d, res)));
    }
    Ok(join(parts))
}

fn conformal(ctx: &Context) -> Result<(bool, String)> {
    let metrics = catalog_metrics()?;
    let bases: Vec<(MetricSpec, Expr)> = metrics
        .iter()
        .map(|(_, m)| split_killing(m).map(|rd| (rd.g3().clone(), rd.u().clone())))
        .collect::<Result<_>>()?;
    let pairs = [
        (0, bases[0].1.clone()),
        (1, bases[1].1.clone()),
        (2, bases[2].1.clone()),
        (0, parse("t*r/(1 + r^2)")?),
        (1, parse("sin(theta)*cos(t)/r")?),
    ];
    let s = parse("r^2*cos(theta) + t")?;
    let mut worst = 0f64;
    for (i, psi) in &pairs {
        let g = &bases[*i].0;
        let gt = g.scaled(&(psi * &Expr::int(2)).exp());
        let mut formula = conformal_ricci(g, psi)?.components().to_vec();
        formula.push(conformal_box(g, psi, &s)?);
        formula.push(conformal_box(g, psi, psi)?);
        let mut direct = ricci(&gt)?.components().to_vec();
        direct.push(box_scalar(&gt, &s)?);
        direct.push(box_scalar(&gt, psi)?);
        worst = worst.max(relative_gap(&formula, &direct, g.chart(), 20, ctx.seed)?);
    }
    Ok((worst < 1e-8, format!("5 pairs, max relative gap {:.1e}", worst)))
}

fn twist(ctx: &Context) -> Result<(bool, String)> {
    let rep = commands::verify(ctx, &catalog_args("kerr"), &[Check::Twist], Some(1e-7))?;
    let get = |k: &str| rep.results.iter().find(|e| e.name == k).map(|e| e.value.clone()).unwrap_or_default();
    let num = |k: &str| get(k).as_f64().unwrap_or(f64::NAN);
    let dg = rep.residuals.iter().find(|r| r.name == "dG").map_or(f64::NAN, |r| r.max_abs);
    Ok((
        rep.pass,
        format!(
            "dF structural {}, |dG| {:.1e}, unit weight |dG| {:.1e}, path gap {:.1e}",
            get("dF_structurally_zero"),
            dg,
            num("dG_unit_weight"),
            num("potential_path_dependence")
        ),
    ))
}

fn wave_map(ctx: &Context) -> Result<(bool, String)> {
    let parts = vec![
        verify_rows(ctx, "minkowski", &[Check::Ewm], Some(1e-7))?,
        verify_rows(ctx, "schwarzschild", &[Check::Ewm], Some(1e-7))?,
        verify_rows(ctx, "kerr", &[Check::Ewm], Some(1e-6))?,
    ];
    Ok(join(parts))
}

fn log_radii(lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi - lo) / 0.5).round() as usize;
    (0..=n).map(|k| 10f64.powf(lo + 0.5 * k as f64)).collect()
}

fn energy(_: &Context) -> Result<(bool, String)> {
    let opts = CutoffOptions::default();
    let th = FitThresholds::default();
    let eps = FRAC_PI_4;
    let cot = 1.0 / eps.tan();

    let d = reduced_energy_density(&minkowski().metric)?;
    let radii = log_radii(1.0, 4.0);
    let r0 = 1.0;
    let samples = energy_cutoff_series(&d, r0, &radii, eps, opts)?;
    let closed = samples
        .iter()
        .map(|(r, e)| ((e - cot * (r / r0).ln()) / (cot * (r / r0).ln())).abs())
        .fold(0.0, f64::max);
    let fit = divergence_fit(&samples, th)?;
    let mut pass = closed < 1e-6 && fit.verdict == Verdict::LogDivergent && (fit.c1 - 1.0).abs() < 1e-3;
    let mut detail = format!(
        "minkowski closed-form gap {:.1e}, {:?} slope {:.6}",
        closed, fit.verdict, fit.c1
    );
    for (name, m) in [("schwarzschild", schwarzschild(1.0)?.metric), ("kerr", kerr(1.0, 0.5)?.metric)] {
        let d = reduced_energy_density(&m)?;
        let samples = energy_cutoff_series(&d, 3.0, &log_radii(2.0, 4.0), eps, opts)?;
        let fit = divergence_fit(&samples, th)?;
        pass &= matches!(fit.verdict, Verdict::LogDivergent | Verdict::PowerDivergent);
        detail.push_str(&format!(", {} {:?}", name, fit.verdict));
    }
    Ok((pass, detail))
}

fn adm(_: &Context) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    for m in [0.5, 1.0, 2.0] {
        let mass = adm_mass(&schwarzschild_spatial_cartesian(m)?)?;
        let rel = (mass - m).abs() / m;
        parts.push((rel < 1e-3, format!("m={} -> {:.6} ({:.1e})", m, mass, rel)));
    }
    Ok(join(parts))
}

fn gaussian(a: f64) -> Result<crate::energetics::EquivariantData> {
    equivariant_profile(ProfileKind::GaussianBump, a, 1.0, TargetSurface::Sphere)
}

fn mass_chain(_: &Context) -> Result<(bool, String)> {
    let opts = ConstraintOptions::default();
    let sol = solve_constraint(&gaussian(0.1)?, opts)?;
    let monotone = sol.is_subcritical() && sol.chi.windows(2).all(|w| w[1] <= w[0]);
    let id = mass_identities(&sol)?;
    let machine = id.deficit_gap <= 4.0 * f64::EPSILON * id.angle_deficit.abs().max(1.0);
    let energy_ok = id.energy_gap < 1e-6;
    let sweep = amplitude_sweep(gaussian, &[0.1, 0.5, 1.0, 2.0, 3.0], opts)?;
    let below: Vec<f64> = sweep.iter().filter_map(|p| p.energy).collect();
    let crossing = below.iter().all(|e| *e < 2.0 * PI)
        && below.windows(2).all(|w| w[1] > w[0])
        && matches!(sweep.last().map(|p| p.status), Some(ConstraintStatus::Supercritical { r_star }) if r_star.is_finite());
    let r_star = match sweep.last().map(|p| p.status) {
        Some(ConstraintStatus::Supercritical { r_star }) => r_star,
        _ => f64::NAN,
    };
    Ok((
        monotone && machine && energy_ok && id.m_av_in_range && crossing,
        format!(
            "gamma monotone {}, energy gap {:.1e}, deficit - pi m_AV {:.1e}, m_AV {:.6}, amp 3 supercritical at r* {:.4}",
            monotone, id.energy_gap, id.deficit_gap, id.m_av, r_star
        ),
    ))
}

/// Symbolic first derivatives against central differences at 20 points.
fn derivative_gap(exprs: &[Expr], chart: &crate::geometry::Chart, seed: u64) -> Result<f64> {
    let names = chart.input_names();
    let coords = chart.coords().to_vec();
    let mut worst = 0f64;
    let f = Tape::compile(exprs, &names)?;
    for (i, c) in coords.iter().enumerate() {
        let d: Vec<Expr> = exprs.iter().map(|e| differentiate(e, c)).collect();
        let dt = Tape::compile(&d, &names)?;
        for pt in chart.sample_points(20, seed)? {
            let h = 1e-5 * pt[i].abs().max(1.0);
            let (mut p, mut m) = (pt.clone(), pt.clone());
            p[i] += h;
            m[i] -= h;
            let (fp, fm) = (f.eval(&chart.inputs_at(&p))?, f.eval(&chart.inputs_at(&m))?);
            let exact = dt.eval(&chart.inputs_at(&pt))?;
            for k in 0..exprs.len() {
                let fd = (fp[k] - fm[k]) / (2.0 * h);
                worst = worst.max((exact[k] - fd).abs() / (1.0 + exact[k].abs()));
            }
        }
    }
    Ok(worst)
}

/// Observed order of composite Simpson on `f` over `[a, b]`, or infinity when
/// the coarse result is already exact to rounding.
fn simpson_order(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    let v: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| composite_simpson(&f, a, b, n))
        .collect::<Result<_>>()?;
    if (v[1] - v[2]).abs() <= 1e-14 * v[2].abs().max(1.0) {
        return Ok(f64::INFINITY);
    }
    Ok(observed_order(v[0], v[1], v[2]))
}

/// `∫ T(N,N) √q dθ` over `[ε, π−ε]` at radius `r`, by 32-point Gauss-Legendre.
fn theta_integral(d: &EnergyDensity, tape: &Tape, r: f64) -> Result<f64> {
    let (xs, ws) = gauss_legendre(32);
    let (lo, hi) = (FRAC_PI_4, PI - FRAC_PI_4);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let pt = d.point(0.0, r, mid + half * x);
        acc += w * tape.eval(&d.chart().inputs_at(&pt))?[0];
    }
    Ok(acc * half)
}

fn hygiene(ctx: &Context) -> Result<(bool, String)> {
    let mut worst = 0f64;
    for (_, m) in catalog_metrics()? {
        worst = worst.max(derivative_gap(m.components(), m.chart(), ctx.seed)?);
        let rd = conformal_reduce(&split_killing(&m)?)?;
        let mut fields = vec![rd.u().clone()];
        fields.extend(rd.a().components().iter().cloned());
        if !rd.is_static() {
            fields.extend(TwistData::new(&rd, TwistWeight::Standard)?.g.components().iter().cloned());
        }
        worst = worst.max(derivative_gap(&fields, rd.g3().chart(), ctx.seed)?);
    }
    let profile = gaussian(0.1)?.compile()?;
    for k in 0..20 {
        let r = 0.2 + 0.35 * k as f64;
        let h = 1e-5;
        let fd = (profile.at(r + h)?.u - profile.at(r - h)?.u) / (2.0 * h);
        let exact = profile.at(r)?.u_r;
        worst = worst.max((exact - fd).abs() / (1.0 + exact.abs()));
    }

    let mut orders = Vec::new();
    for (_, m) in catalog_metrics()? {
        let d = reduced_energy_density(&m)?;
        let tape = Tape::compile(std::slice::from_ref(&d.integrand), &d.chart().input_names())?;
        orders.push(simpson_order(|r| theta_integral(&d, &tape, r), 3.0, 30.0)?);
    }
    let sol = solve_constraint(&gaussian(0.1)?, ConstraintOptions::default())?;
    let prof = sol.profile();
    orders.push(simpson_order(|r| prof.density(r, sol.chi_at(r)), 0.0, sol.r_max())?);
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((
        worst < 1e-6 && min_order >= 2.0,
        format!("derivative gap {:.1e}, min observed order {:.2}", worst, min_order),
    ))
}
