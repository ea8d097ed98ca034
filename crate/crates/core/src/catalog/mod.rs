//! Built-in spacetimes and a plain-text metric format.

mod format;

pub use format::{load_metric, parse_metric, save_metric, write_metric};

use std::f64::consts::PI;

use serde::Serialize;

use crate::energetics::EquivariantData;
use crate::error::{Error, Result};
use crate::geometry::{Chart, MetricSpec, Signature};
use crate::symexpr::{parse, Expr};

/// Known properties of a catalog metric.
#[derive(Debug, Clone, Serialize)]
pub struct KnownFacts {
    pub vacuum: bool,
    /// Coordinates whose coordinate vector fields are Killing.
    pub killing: Vec<String>,
    /// True when `∂_φ` is hypersurface orthogonal, so the reduction has `A = 0`.
    pub static_reduction: bool,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub metric: MetricSpec,
    pub facts: KnownFacts,
}

impl CatalogEntry {
    pub fn params(&self) -> &[(String, f64)] {
        self.metric.chart().params()
    }
}

fn p(s: &str) -> Expr {
    parse(s).expect("catalog expressions are well formed")
}

/// Spherical chart `(t, r, θ, φ)` with the standard sampling box.
fn spherical_chart(scale: f64) -> Chart {
    Chart::new(&["t", "r", "theta", "phi"])
        .and_then(|c| c.with_box("t", 0.0, 1.0))
        .and_then(|c| c.with_box("r", 3.0 * scale, 10.0 * scale))
        .and_then(|c| c.with_box("theta", 0.3, PI - 0.3))
        .and_then(|c| c.with_box("phi", 0.0, 2.0 * PI))
        .expect("fixed chart")
}

pub fn minkowski() -> CatalogEntry {
    let metric = MetricSpec::diagonal(
        spherical_chart(1.0),
        vec![p("-1"), p("1"), p("r^2"), p("r^2*sin(theta)^2")],
        Signature::Lorentzian { time: 0 },
    )
    .expect("diagonal metric");
    CatalogEntry {
        name: "minkowski".into(),
        metric,
        facts: KnownFacts {
            vacuum: true,
            killing: vec!["t".into(), "phi".into()],
            static_reduction: true,
        },
    }
}

pub fn schwarzschild(m: f64) -> Result<CatalogEntry> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {}", m)));
    }
    let chart = spherical_chart(m).with_param("m", m)?;
    let metric = MetricSpec::diagonal(
        chart,
        vec![
            p("-(1 - 2*m/r)"),
            p("(1 - 2*m/r)^(-1)"),
            p("r^2"),
            p("r^2*sin(theta)^2"),
        ],
        Signature::Lorentzian { time: 0 },
    )?;
    Ok(CatalogEntry {
        name: "schwarzschild".into(),
        metric,
        facts: KnownFacts {
            vacuum: true,
            killing: vec!["t".into(), "phi".into()],
            static_reduction: true,
        },
    })
}

/// Kerr in Boyer-Lindquist coordinates. The matrix stores
/// `g_tφ = −2Mra sin²θ/A`, half the `dt dφ` coefficient of the line element.
pub fn kerr(mass: f64, a: f64) -> Result<CatalogEntry> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {}", mass)));
    }
    if !(0.0..mass).contains(&a) {
        return Err(Error::InvalidParameter(format!(
            "spin must satisfy 0 <= a < M, got a = {} with M = {}",
            a, mass
        )));
    }
    let chart = spherical_chart(mass).with_param("M", mass)?.with_param("a", a)?;
    let big_a = "(r^2 + a^2*cos(theta)^2)";
    let big_c = "(r^2 - 2*M*r + a^2)";
    let big_b = format!("((r^2 + a^2)^2 - {}*a^2*sin(theta)^2)", big_c);
    let entries = vec![
        (0, 0, p(&format!("-(1 - 2*M*r/{})", big_a))),
        (1, 1, p(&format!("{}/{}", big_a, big_c))),
        (2, 2, p(big_a)),
        (3, 0, p(&format!("-2*M*r*a*sin(theta)^2/{}", big_a))),
        (3, 3, p(&format!("{}*sin(theta)^2/{}", big_b, big_a))),
    ];
    let metric = MetricSpec::from_lower(chart, &entries, Signature::Lorentzian { time: 0 })?;
    Ok(CatalogEntry {
        name: "kerr".into(),
        metric,
        facts: KnownFacts {
            vacuum: true,
            killing: vec!["t".into(), "phi".into()],
            static_reduction: a == 0.0,
        },
    })
}

/// Spatial Schwarzschild slice in asymptotically Cartesian coordinates:
/// `q_ij = δ_ij + (1/f − 1) x_i x_j / r²` with `f = 1 − 2m/r`. `m = 0` gives
/// the flat metric.
pub fn schwarzschild_spatial_cartesian(m: f64) -> Result<MetricSpec> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be non-negative, got {}", m)));
    }
    let s = 3.0 * m.max(1.0);
    let mut chart = Chart::new(&["x", "y", "z"])?;
    for c in ["x", "y", "z"] {
        chart = chart.with_box(c, s, 10.0 * s / 3.0)?;
    }
    let chart = chart.with_param("m", m)?;
    let xs = ["x", "y", "z"];
    let coef = "(2*m/((x^2 + y^2 + z^2)^(1/2) - 2*m))/(x^2 + y^2 + z^2)";
    let mut entries = Vec::new();
    for i in 0..3 {
        for j in 0..=i {
            let delta = if i == j { "1 + " } else { "" };
            entries.push((i, j, p(&format!("{}{}*{}*{}", delta, coef, xs[i], xs[j]))));
        }
    }
    MetricSpec::from_lower(chart, &entries, Signature::Riemannian)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `u = a (r/w)² e^{−(r/w)²}`, cut at `r_max = 8w`.
    GaussianBump,
    /// `u = a s² (1 − s²)³` with `s = r/w`, supported on `r ≤ w`.
    CompactBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSurface {
    /// `f(u) = sin u`.
    Sphere,
    /// `f(u) = sinh u`.
    Hyperbolic,
}

impl ProfileKind {
    pub fn from_name(s: &str) -> Option<ProfileKind> {
        match s {
            "gaussian_bump" | "gaussian" => Some(ProfileKind::GaussianBump),
            "compact_bump" | "compact" => Some(ProfileKind::CompactBump),
            _ => None,
        }
    }
}

impl TargetSurface {
    pub fn from_name(s: &str) -> Option<TargetSurface> {
        match s {
            "sphere" => Some(TargetSurface::Sphere),
            "hyperbolic" => Some(TargetSurface::Hyperbolic),
            _ => None,
        }
    }
}

/// Time-symmetric (`p = 0`) equivariant data with `u(0) = 0`.
pub fn equivariant_profile(
    kind: ProfileKind,
    amplitude: f64,
    width: f64,
    target: TargetSurface,
) -> Result<EquivariantData> {
    if !(amplitude >= 0.0 && amplitude.is_finite() && width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need amplitude >= 0 and width > 0, got {} and {}",
            amplitude, width
        )));
    }
    let a = decimal(amplitude);
    let s2 = Expr::powi(&Expr::sym("r") * &decimal(width).recip(), 2);
    let (u, r_max) = match kind {
        ProfileKind::GaussianBump => (Expr::mul(vec![a, s2.clone(), s2.neg().exp()]), 8.0 * width),
        ProfileKind::CompactBump => (
            Expr::mul(vec![a, s2.clone(), Expr::powi(Expr::one() - s2, 3)]),
            width,
        ),
    };
    let f = match target {
        TargetSurface::Sphere => p("sin(u)"),
        TargetSurface::Hyperbolic => p("sinh(u)"),
    };
    let name = format!("{:?}({}, {}, {:?})", kind, amplitude, width, target);
    EquivariantData::new(&name, u, Expr::zero(), f, r_max)
}

/// The shortest decimal that round-trips to `x`, as an exact rational.
fn decimal(x: f64) -> Expr {
    p(&format!("{}", x))
}

/// Looks up a catalog metric by name with parameters taken from `params`
/// (missing ones use defaults `m = M = 1`, `a = 0.5`).
pub fn by_name(name: &str, params: &[(String, f64)]) -> Result<CatalogEntry> {
    let get = |k: &str, d: f64| params.iter().find(|(n, _)| n == k).map_or(d, |p| p.1);
    match name {
        "minkowski" => Ok(minkowski()),
        "schwarzschild" => schwarzschild(get("m", 1.0)),
        "kerr" => kerr(get("M", 1.0), get("a", 0.5)),
        "schwarzschild-spatial" => Ok(CatalogEntry {
            name: name.into(),
            metric: schwarzschild_spatial_cartesian(get("m", 1.0))?,
            facts: KnownFacts {
                vacuum: false,
                killing: vec![],
                static_reduction: false,
            },
        }),
        _ => Err(Error::InvalidParameter(format!("unknown catalog metric `{}`", name))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_max_abs;
    use crate::symexpr::evaluate;

    fn at(e: &Expr, vals: &[(&str, f64)]) -> f64 {
        evaluate(e, &vals.iter().map(|(k, v)| (k.to_string(), *v)).collect()).unwrap()
    }

    #[test]
    fn schwarzschild_gtt() {
        let s = schwarzschild(1.0).unwrap();
        assert!((at(s.metric.get(0, 0), &[("r", 4.0), ("m", 1.0)]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn kerr_cross_term() {
        let k = kerr(1.0, 0.5).unwrap();
        let v = at(
            k.metric.get(0, 3),
            &[("r", 4.0), ("theta", PI / 2.0), ("M", 1.0), ("a", 0.5)],
        );
        assert!((v + 0.25).abs() < 1e-15, "{}", v);
    }

    #[test]
    fn kerr_without_spin_is_schwarzschild() {
        let k = kerr(1.0, 0.0).unwrap();
        let s = schwarzschild(1.0).unwrap();
        let diffs: Vec<Expr> = k
            .metric
            .components()
            .iter()
            .zip(s.metric.components())
            .map(|(a, b)| a - &b.clone())
            .collect();
        // Both charts share coordinates; bind m and a as well.
        let chart = k.metric.chart().clone().with_param("m", 1.0).unwrap();
        assert!(sample_max_abs(&diffs, &chart, 20, 42).unwrap() < 1e-14);
    }

    #[test]
    fn parameter_ranges_enforced() {
        assert!(schwarzschild(0.0).is_err());
        assert!(kerr(1.0, 1.0).is_err());
        assert!(kerr(1.0, -0.1).is_err());
        assert!(kerr(-1.0, 0.0).is_err());
    }

    #[test]
    fn spatial_trace_at_ten() {
        let q = schwarzschild_spatial_cartesian(1.0).unwrap();
        let pt = [("x", 10.0), ("y", 0.0), ("z", 0.0), ("m", 1.0)];
        let tr: f64 = (0..3).map(|i| at(q.get(i, i), &pt)).sum();
        assert!((tr - 3.25).abs() < 1e-14);
        let flat = schwarzschild_spatial_cartesian(0.0).unwrap();
        let pt = [("x", 1.0), ("y", 2.0), ("z", 3.0), ("m", 0.0)];
        assert_eq!(at(flat.get(0, 0), &pt), 1.0);
        assert_eq!(at(flat.get(1, 0), &pt), 0.0);
    }

    #[test]
    fn entries_pass_signature_checks() {
        minkowski().metric.validate(20, 42).unwrap();
        schwarzschild(1.0).unwrap().metric.validate(20, 42).unwrap();
        kerr(1.0, 0.5).unwrap().metric.validate(20, 42).unwrap();
        schwarzschild_spatial_cartesian(1.0).unwrap().validate(20, 42).unwrap();
    }
}
