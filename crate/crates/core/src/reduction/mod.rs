//! Reduction of an axisymmetric 4-metric along its rotational Killing field
//! `∂_φ`:
//!
//! `ḡ = g + e^{2u} (dφ + A_ν dx^ν)²`, so `e^{2u} = ḡ_φφ`,
//! `A_ν = ḡ_νφ / ḡ_φφ` and `g_μν = ḡ_μν − e^{2u} A_μ A_ν`.

mod residuals;
mod twist;

pub use residuals::{
    ewm_residuals, reduced_vacuum_residuals, reduced_vacuum_residuals_with, EwmResiduals,
    FieldStrengthSign, Residual, ResidualSummary, VacuumResiduals,
};
pub use twist::{
    exterior_derivative_1form, exterior_derivative_2form, faraday, twist_one_form,
    twist_potential, TwistData, TwistWeight,
};

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::geometry::{sample_max_abs, MetricSpec, Signature, Slot, TensorField};
use crate::symexpr::{is_zero, Expr, Kind, Rational, Tape, ZeroStatus};

/// `(g, u, A)` from the Killing split, optionally with `g` replaced by
/// `g̃ = e^{2u} g`.
#[derive(Debug, Clone)]
pub struct ReducedData {
    g3: MetricSpec,
    u: Expr,
    e2u: Expr,
    a: TensorField,
    conformal: bool,
    killing: String,
}

impl ReducedData {
    /// Current 3-metric: `g`, or `g̃` once [`conformal_reduce`] has run.
    pub fn g3(&self) -> &MetricSpec {
        &self.g3
    }

    /// The unrescaled 3-metric `g`, whatever the conformal flag.
    pub fn base_metric(&self) -> MetricSpec {
        if self.conformal {
            self.g3.scaled(&self.e2u.recip())
        } else {
            self.g3.clone()
        }
    }

    pub fn u(&self) -> &Expr {
        &self.u
    }

    /// `e^{2u} = ḡ_φφ`.
    pub fn e2u(&self) -> &Expr {
        &self.e2u
    }

    /// `e^{ku}` as a power of `ḡ_φφ`.
    pub fn exp_u(&self, k: i64) -> Expr {
        Expr::pow(self.e2u.clone(), Rational::new(k.into(), 2.into()))
    }

    pub fn a(&self) -> &TensorField {
        &self.a
    }

    pub fn is_conformal(&self) -> bool {
        self.conformal
    }

    pub fn killing_coord(&self) -> &str {
        &self.killing
    }

    /// `A = 0` structurally (hypersurface-orthogonal Killing field).
    pub fn is_static(&self) -> bool {
        self.a.components().iter().all(Expr::is_zero_literal)
    }

    /// Rebuilds the 4-metric components `ḡ` in the coordinate order of the
    /// reduced chart with the Killing coordinate inserted at `phi_index`.
    pub fn reconstruct(&self, phi_index: usize) -> Vec<Vec<Expr>> {
        let g = self.base_metric();
        let n = g.dim();
        let full = n + 1;
        let red = |i: usize| if i < phi_index { i } else { i - 1 };
        let mut rows = vec![vec![Expr::zero(); full]; full];
        for i in 0..full {
            for j in 0..full {
                rows[i][j] = match (i == phi_index, j == phi_index) {
                    (true, true) => self.e2u.clone(),
                    (true, false) => &self.e2u * self.a.get(&[red(j)]),
                    (false, true) => &self.e2u * self.a.get(&[red(i)]),
                    (false, false) => {
                        let (x, y) = (red(i), red(j));
                        g.get(x, y)
                            + &Expr::mul(vec![
                                self.e2u.clone(),
                                self.a.get(&[x]).clone(),
                                self.a.get(&[y]).clone(),
                            ])
                    }
                };
            }
        }
        rows
    }

    /// Largest `|ḡ − reconstruct|` over `n` points of the 4-metric chart.
    pub fn reconstruction_residual(&self, m4: &MetricSpec, n: usize, seed: u64) -> Result<f64> {
        let phi = m4.chart().index_of(&self.killing)?;
        let rows = self.reconstruct(phi);
        let diffs: Vec<Expr> = (0..m4.dim())
            .flat_map(|i| (0..m4.dim()).map(move |j| (i, j)))
            .map(|(i, j)| m4.get(i, j) - &rows[i][j])
            .collect();
        sample_max_abs(&diffs, m4.chart(), n, seed)
    }
}

/// `u` with `e^{2u} = e2u`. A product of even integer powers is halved
/// factor by factor (`r^2 sin(θ)^2` gives `log(r*sin(θ))`); anything else
/// becomes `½ log(e2u)`.
fn half_log(e2u: &Expr) -> Expr {
    let factors: Vec<Expr> = match e2u.kind() {
        Kind::Mul(fs) => fs.clone(),
        _ => vec![e2u.clone()],
    };
    let mut halves = Vec::new();
    for f in &factors {
        let (base, p) = f.split_pow();
        let even = p.is_integer()
            && p.to_integer().to_i64().is_some_and(|k| k % 2 == 0 && k != 0);
        if !even || base.as_const().is_some() {
            return e2u.log().scale(Rational::new(1.into(), 2.into()));
        }
        halves.push(Expr::pow(base, p / Rational::from_integer(2.into())));
    }
    Expr::mul(halves).log()
}

/// Killing split along the coordinate named `phi`.
pub fn split_killing(m4: &MetricSpec) -> Result<ReducedData> {
    split_killing_along(m4, "phi")
}

pub fn split_killing_along(m4: &MetricSpec, coord: &str) -> Result<ReducedData> {
    if m4.dim() != 4 {
        return Err(Error::Dimension {
            expected: "4".into(),
            got: m4.dim(),
        });
    }
    let chart = m4.chart();
    let phi = chart.index_of(coord)?;
    for (k, c) in m4.components().iter().enumerate() {
        if c.symbols().iter().any(|s| s == coord) {
            return Err(Error::NotAxisymmetric(format!(
                "component ({}, {}) depends on {}",
                k / 4,
                k % 4,
                coord
            )));
        }
    }
    let gpp = m4.get(phi, phi).clone();
    if is_zero(&gpp, chart)? == ZeroStatus::ProvablyZero {
        return Err(Error::DegenerateKilling(format!("g_{0}{0} vanishes identically", coord)));
    }
    let tape = Tape::compile(std::slice::from_ref(&gpp), &chart.input_names())?;
    for p in chart.sample_points(20, 42)? {
        let v = tape.eval(&chart.inputs_at(&p))?[0];
        if v <= 0.0 {
            return Err(Error::DegenerateKilling(format!(
                "|∂_{}|² = {:.3e} at {:?}; sample box touches the axis",
                coord, v, p
            )));
        }
    }
    let rest: Vec<usize> = (0..4).filter(|&i| i != phi).collect();
    let inv_gpp = gpp.recip();
    let a: Vec<Expr> = rest.iter().map(|&i| m4.get(i, phi) * &inv_gpp).collect();
    let rows: Vec<Vec<Expr>> = rest
        .iter()
        .map(|&i| {
            rest.iter()
                .map(|&j| {
                    let cross = m4.get(i, phi) * m4.get(j, phi);
                    if cross.is_zero_literal() {
                        m4.get(i, j).clone()
                    } else {
                        m4.get(i, j) - &(&cross * &inv_gpp)
                    }
                })
                .collect()
        })
        .collect();
    let signature = match m4.signature() {
        Signature::Lorentzian { time } if time != phi => Signature::Lorentzian {
            time: if time < phi { time } else { time - 1 },
        },
        _ => {
            return Err(Error::InvalidMetric(
                "the reduced metric needs a Lorentzian 4-metric with a time coordinate other than the Killing one".into(),
            ))
        }
    };
    let chart3 = chart.without(coord)?;
    let g3 = MetricSpec::new(chart3.clone(), rows, signature)?;
    Ok(ReducedData {
        g3,
        u: half_log(&gpp),
        e2u: gpp,
        a: TensorField::new(vec![Slot::Down], &chart3, a)?,
        conformal: false,
        killing: coord.to_string(),
    })
}

/// `g ← e^{2u} g`.
pub fn conformal_reduce(rd: &ReducedData) -> Result<ReducedData> {
    if rd.conformal {
        return Err(Error::AlreadyConformal);
    }
    let mut out = rd.clone();
    out.g3 = rd.g3.scaled(&rd.e2u);
    out.conformal = true;
    Ok(out)
}
