//! Field strength `F = dA`, twist one-form `G` and twist potential `v`.

use crate::error::{Error, Result};
use crate::geometry::{sample_max_abs, Chart, Geometry, Slot, TensorField};
use crate::numeric::quadrature::{adaptive_simpson, QuadOptions};
use crate::symexpr::{differentiate, Expr, Rational, Tape};

use super::ReducedData;

/// `F_μν = ∂_μ A_ν − ∂_ν A_μ` (the connection terms cancel).
pub fn faraday(rd: &ReducedData) -> TensorField {
    let a = rd.a();
    let chart = a.chart().clone();
    let n = chart.dim();
    let mut f = TensorField::zeros(vec![Slot::Down, Slot::Down], &chart);
    for mu in 0..n {
        for nu in (mu + 1)..n {
            let v = differentiate(a.get(&[nu]), &chart.coords()[mu])
                - differentiate(a.get(&[mu]), &chart.coords()[nu]);
            f.set(&[nu, mu], v.neg());
            f.set(&[mu, nu], v);
        }
    }
    f
}

/// Components `(dF)_λμν = ∂_λ F_μν + ∂_μ F_νλ + ∂_ν F_λμ` for `λ < μ < ν`.
pub fn exterior_derivative_2form(f: &TensorField) -> Vec<Expr> {
    let chart = f.chart();
    let n = chart.dim();
    let d = |e: &Expr, i: usize| differentiate(e, &chart.coords()[i]);
    let mut out = Vec::new();
    for l in 0..n {
        for m in (l + 1)..n {
            for k in (m + 1)..n {
                out.push(Expr::add(vec![
                    d(f.get(&[m, k]), l),
                    d(f.get(&[k, l]), m),
                    d(f.get(&[l, m]), k),
                ]));
            }
        }
    }
    out
}

/// Components `(dG)_μν = ∂_μ G_ν − ∂_ν G_μ` for `μ < ν`.
pub fn exterior_derivative_1form(g: &TensorField) -> Vec<Expr> {
    let chart = g.chart();
    let n = chart.dim();
    let mut out = Vec::new();
    for mu in 0..n {
        for nu in (mu + 1)..n {
            out.push(
                differentiate(g.get(&[nu]), &chart.coords()[mu])
                    - differentiate(g.get(&[mu]), &chart.coords()[nu]),
            );
        }
    }
    out
}

/// Prefactor of the dual field strength in the twist one-form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistWeight {
    /// `e^{3u}`, the weight that makes `G` closed on vacuum solutions.
    Standard,
    /// Weight 1; a negative control for the closure check.
    Unit,
}

fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// `G_μ = ½ w ε_μνσ F^νσ` with `w = e^{3u}` (or 1), `ε_{012} = +√|det g|`
/// times the chart orientation sign.
///
/// The Hodge dual is taken with the unrescaled metric `g`. In terms of
/// `g̃ = e^{2u} g` this is `G = e^{4u} *̃F`; this is the combination that the
/// mixed vacuum equations `∇_σ(e^{3u} F^σ_μ) = 0` make closed.
pub fn twist_one_form(rd: &ReducedData, f: &TensorField, weight: TwistWeight) -> Result<TensorField> {
    if !rd.is_conformal() {
        return Err(Error::NotConformal);
    }
    let g = rd.base_metric();
    let n = g.dim();
    if n != 3 {
        return Err(Error::Dimension {
            expected: "3".into(),
            got: n,
        });
    }
    let geo = Geometry::new(&g)?;
    // F^{νσ} = g^{να} g^{σβ} F_αβ
    let mut f_up = vec![Expr::zero(); 9];
    for nu in 0..3 {
        for s in (nu + 1)..3 {
            let mut terms = Vec::new();
            for a in 0..3 {
                for b in 0..3 {
                    let fab = f.get(&[a, b]);
                    if fab.is_zero_literal()
                        || geo.inv(nu, a).is_zero_literal()
                        || geo.inv(s, b).is_zero_literal()
                    {
                        continue;
                    }
                    terms.push(Expr::mul(vec![
                        geo.inv(nu, a).clone(),
                        geo.inv(s, b).clone(),
                        fab.clone(),
                    ]));
                }
            }
            let v = Expr::add(terms);
            f_up[s * 3 + nu] = v.neg();
            f_up[nu * 3 + s] = v;
        }
    }
    let orient = Expr::int(g.chart().orientation().sign() as i64);
    let vol = g.abs_determinant().sqrt();
    let w = match weight {
        TwistWeight::Standard => rd.exp_u(3),
        TwistWeight::Unit => Expr::one(),
    };
    let pref = Expr::mul(vec![orient, vol, w]).scale(Rational::new(1.into(), 2.into()));
    let comps: Vec<Expr> = (0..3)
        .map(|mu| {
            let mut terms = Vec::new();
            for nu in 0..3 {
                for s in 0..3 {
                    let eps = levi_civita(mu, nu, s);
                    if eps != 0 && !f_up[nu * 3 + s].is_zero_literal() {
                        terms.push(&Expr::int(eps) * &f_up[nu * 3 + s]);
                    }
                }
            }
            &pref * &Expr::add(terms)
        })
        .collect();
    TensorField::new(vec![Slot::Down], g.chart(), comps)
}

/// Line integral of the one-form `g` along a polyline. The first vertex is
/// the base point (where `v = 0`), the last is the target. Every vertex must
/// lie in the chart's sampling box; the box is convex, so whole segments do.
pub fn twist_potential(g: &TensorField, path: &[Vec<f64>]) -> Result<f64> {
    let chart = g.chart();
    let tape = Tape::compile(g.components(), &chart.input_names())?;
    line_integral(&tape, chart, path)
}

fn line_integral(tape: &Tape, chart: &Chart, path: &[Vec<f64>]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter("a path needs at least two vertices".into()));
    }
    for (i, p) in path.iter().enumerate() {
        if p.len() != chart.dim() || !chart.contains(p) {
            return Err(Error::PathOutsideDomain(i));
        }
    }
    let opts = QuadOptions {
        rel_tol: 1e-12,
        abs_floor: 1e-15,
        ..QuadOptions::default()
    };
    let mut total = 0.0;
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dx: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        total += adaptive_simpson(
            |s| {
                let x: Vec<f64> = a.iter().zip(&dx).map(|(x, d)| x + s * d).collect();
                let gv = tape.eval(&chart.inputs_at(&x))?;
                Ok(gv.iter().zip(&dx).map(|(g, d)| g * d).sum())
            },
            0.0,
            1.0,
            opts,
        )?;
    }
    Ok(total)
}

/// Field strength, twist one-form and closure diagnostics for one reduction.
#[derive(Debug, Clone)]
pub struct TwistData {
    pub f: TensorField,
    pub g: TensorField,
    pub weight: TwistWeight,
}

impl TwistData {
    pub fn new(rd: &ReducedData, weight: TwistWeight) -> Result<TwistData> {
        let f = faraday(rd);
        let g = twist_one_form(rd, &f, weight)?;
        Ok(TwistData { f, g, weight })
    }

    /// Largest `|dF|` component over `n` sample points.
    pub fn faraday_closure(&self, n: usize, seed: u64) -> Result<f64> {
        sample_max_abs(&exterior_derivative_2form(&self.f), self.f.chart(), n, seed)
    }

    /// Largest `|dG|` component over `n` sample points.
    pub fn twist_closure(&self, n: usize, seed: u64) -> Result<f64> {
        sample_max_abs(&exterior_derivative_1form(&self.g), self.g.chart(), n, seed)
    }

    pub fn potential(&self, path: &[Vec<f64>]) -> Result<f64> {
        twist_potential(&self.g, path)
    }

    /// `v` at each target, integrated along the straight segment from `base`.
    pub fn potential_grid(&self, base: &[f64], targets: &[Vec<f64>]) -> Result<Vec<f64>> {
        let chart = self.g.chart();
        let tape = Tape::compile(self.g.components(), &chart.input_names())?;
        targets
            .iter()
            .map(|t| line_integral(&tape, chart, &[base.to_vec(), t.clone()]))
            .collect()
    }
}
