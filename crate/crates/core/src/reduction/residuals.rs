//! Residuals of the reduced vacuum equations and of the wave-map system.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{sample_max_abs, Chart, Geometry, MetricSpec};
use crate::symexpr::{Expr, Rational};

use super::twist::TwistData;
use super::{split_killing, ReducedData};

/// A named list of symbolic residual components on a chart.
#[derive(Debug, Clone)]
pub struct Residual {
    pub name: String,
    pub components: Vec<Expr>,
    pub chart: Chart,
}

impl Residual {
    pub fn max_abs(&self, n: usize, seed: u64) -> Result<f64> {
        sample_max_abs(&self.components, &self.chart, n, seed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualSummary {
    pub name: String,
    pub max_abs: f64,
}

/// Sign convention for the `F F` term of the horizontal equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldStrengthSign {
    /// `− ½ e^{2u} F_μσ F^σ_ν`.
    AsPrinted,
    /// `− ½ e^{2u} F_μσ F_ν^σ`, the Kaluza-Klein form.
    KaluzaKlein,
}

/// Right-hand sides of the three blocks of `R̄ = 0`: horizontal `R̄_μν`
/// (upper triangle, row-major), mixed `R̄_μ3`, and Killing `R̄_33`.
#[derive(Debug, Clone)]
pub struct VacuumResiduals {
    pub horizontal: Residual,
    pub mixed: Residual,
    pub killing: Residual,
}

impl VacuumResiduals {
    pub fn all(&self) -> [&Residual; 3] {
        [&self.horizontal, &self.mixed, &self.killing]
    }

    pub fn summarize(&self, n: usize, seed: u64) -> Result<Vec<ResidualSummary>> {
        self.all()
            .iter()
            .map(|r| {
                Ok(ResidualSummary {
                    name: r.name.clone(),
                    max_abs: r.max_abs(n, seed)?,
                })
            })
            .collect()
    }
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Vacuum residuals with the Kaluza-Klein sign of the `F F` term.
pub fn reduced_vacuum_residuals(m4: &MetricSpec) -> Result<VacuumResiduals> {
    reduced_vacuum_residuals_with(m4, FieldStrengthSign::KaluzaKlein)
}

pub fn reduced_vacuum_residuals_with(
    m4: &MetricSpec,
    sign: FieldStrengthSign,
) -> Result<VacuumResiduals> {
    let rd = split_killing(m4)?;
    let g = rd.g3().clone();
    let chart = g.chart().clone();
    let n = g.dim();
    let mut geo = Geometry::new(&g)?;
    let u = rd.u().clone();
    let du = geo.gradient(&u);
    let hess = geo.hessian(&u);
    let ric = geo.ricci();
    let f = super::faraday(&rd);
    let e2u = rd.e2u().clone();

    // F^μ_ν-style contractions. ff[μ][ν] = F_μσ g^{σα} F_να.
    let f_row = |mu: usize| -> Vec<Expr> { (0..n).map(|s| f.get(&[mu, s]).clone()).collect() };
    let ff = |mu: usize, nu: usize| geo.dot_covectors(&f_row(mu), &f_row(nu));
    let ff_sign = match sign {
        FieldStrengthSign::AsPrinted => Expr::one(),
        FieldStrengthSign::KaluzaKlein => Expr::int(-1),
    };

    let mut horizontal = Vec::new();
    for mu in 0..n {
        for nu in mu..n {
            horizontal.push(Expr::add(vec![
                ric.get(&[mu, nu]).clone(),
                (&du[mu] * &du[nu]).neg(),
                hess.get(&[mu, nu]).neg(),
                Expr::mul(vec![ff_sign.clone(), e2u.clone(), ff(mu, nu)]).scale(half()),
            ]));
        }
    }

    // K^{σν} = e^{3u} F^{σν}.
    let e3u = rd.exp_u(3);
    let mut k_up = vec![vec![Expr::zero(); n]; n];
    for s in 0..n {
        for nu in 0..n {
            let mut terms = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if f.get(&[a, b]).is_zero_literal() {
                        continue;
                    }
                    terms.push(Expr::mul(vec![
                        geo.inv(s, a).clone(),
                        geo.inv(nu, b).clone(),
                        f.get(&[a, b]).clone(),
                    ]));
                }
            }
            k_up[s][nu] = &e3u * &Expr::add(terms);
        }
    }
    // For antisymmetric K the divergence on the first slot has the same
    // form as for a vector field.
    let div_up: Vec<Expr> = (0..n)
        .map(|nu| {
            let column: Vec<Expr> = k_up.iter().map(|row| row[nu].clone()).collect();
            geo.divergence(&column)
        })
        .collect();
    let neg_half_emu = rd.exp_u(-1).scale(-half());
    let mixed: Vec<Expr> = (0..n)
        .map(|mu| {
            let lowered =
                Expr::add((0..n).map(|nu| g.get(mu, nu) * &div_up[nu]).collect());
            &neg_half_emu * &lowered
        })
        .collect();

    // −e^{2u} (□u + |∇u|² − ¼ e^{2u} F_μν F^μν)
    let mut f2 = Vec::new();
    for mu in 0..n {
        for nu in 0..n {
            if !f.get(&[mu, nu]).is_zero_literal() {
                let up = Expr::add(
                    (0..n)
                        .flat_map(|a| (0..n).map(move |b| (a, b)))
                        .filter(|&(a, b)| !f.get(&[a, b]).is_zero_literal())
                        .map(|(a, b)| {
                            Expr::mul(vec![
                                geo.inv(mu, a).clone(),
                                geo.inv(nu, b).clone(),
                                f.get(&[a, b]).clone(),
                            ])
                        })
                        .collect(),
                );
                f2.push(f.get(&[mu, nu]) * &up);
            }
        }
    }
    let f2 = Expr::add(f2);
    let bu = geo.box_scalar(&u);
    let grad2 = geo.dot_covectors(&du, &du);
    let quarter = Rational::new(1.into(), 4.into());
    let killing = (&e2u * &Expr::add(vec![bu, grad2, (&e2u * &f2).scale(-quarter)])).neg();

    let mk = |name: &str, components: Vec<Expr>| Residual {
        name: name.into(),
        components,
        chart: chart.clone(),
    };
    Ok(VacuumResiduals {
        horizontal: mk("R_mu_nu", horizontal),
        mixed: mk("R_mu_3", mixed),
        killing: mk("R_33", vec![killing]),
    })
}

/// Residuals of the wave-map equations on `(M, g̃)` with target metric
/// `du² + ¼ e^{−4u} dv²`:
///
/// `□̃u + ½ e^{−4u} g̃^μν ∂_μv ∂_νv` and `□̃v − 4 g̃^μν ∂_μu ∂_νv`,
///
/// where `∂v` is taken to be the twist one-form `G` (zero when `twist` is
/// `None`).
#[derive(Debug, Clone)]
pub struct EwmResiduals {
    pub wave_u: Residual,
    pub wave_v: Residual,
}

pub fn ewm_residuals(rd: &ReducedData, twist: Option<&TwistData>) -> Result<EwmResiduals> {
    if !rd.is_conformal() {
        return Err(Error::NotConformal);
    }
    let gt = rd.g3().clone();
    let chart = gt.chart().clone();
    let n = gt.dim();
    let mut geo = Geometry::new(&gt)?;
    let u = rd.u().clone();
    let du = geo.gradient(&u);
    let dv: Vec<Expr> = match twist {
        Some(t) => t.g.components().to_vec(),
        None => vec![Expr::zero(); n],
    };
    let box_u = geo.box_scalar(&u);
    let e_m4u = rd.exp_u(-4);
    let wave_u = box_u + (&e_m4u * &geo.dot_covectors(&dv, &dv)).scale(half());

    // □̃v from the components of dv.
    let y = geo.raise(&dv);
    let box_v = geo.divergence(&y);
    let wave_v = box_v - (&Expr::int(4) * &geo.dot_covectors(&du, &dv));
    Ok(EwmResiduals {
        wave_u: Residual {
            name: "wave_u".into(),
            components: vec![wave_u],
            chart: chart.clone(),
        },
        wave_v: Residual {
            name: "wave_v".into(),
            components: vec![wave_v],
            chart,
        },
    })
}
