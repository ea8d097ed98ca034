//! Wave-map stress-energy and the energy density seen by the slice normal.

use crate::error::{Error, Result};
use crate::geometry::{Chart, Geometry, MetricSpec, Signature, Slot, TensorField};
use crate::reduction::{conformal_reduce, split_killing, TwistData, TwistWeight};
use crate::symexpr::{differentiate, Expr, Rational};

/// One scalar component `U^A` of a wave map, given through its gradient,
/// together with the target-metric weight `h_AA` it carries.
#[derive(Debug, Clone)]
pub struct WaveMapField {
    pub name: String,
    pub gradient: Vec<Expr>,
    pub weight: Expr,
}

impl WaveMapField {
    pub fn scalar(name: &str, chart: &Chart, value: &Expr, weight: Expr) -> WaveMapField {
        WaveMapField {
            name: name.into(),
            gradient: chart.coords().iter().map(|c| differentiate(value, c)).collect(),
            weight,
        }
    }

    /// A component known only through its differential, e.g. `dv = G`.
    pub fn from_gradient(name: &str, gradient: Vec<Expr>, weight: Expr) -> WaveMapField {
        WaveMapField {
            name: name.into(),
            gradient,
            weight,
        }
    }
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// `T_μν = Σ w ∂_μU ∂_νU − ½ g_μν Σ w g^{αβ} ∂_αU ∂_βU`.
pub fn stress_energy(g: &MetricSpec, fields: &[WaveMapField]) -> Result<TensorField> {
    let n = g.dim();
    for f in fields {
        if f.gradient.len() != n {
            return Err(Error::Dimension {
                expected: format!("{} gradient components for `{}`", n, f.name),
                got: f.gradient.len(),
            });
        }
    }
    let geo = Geometry::new(g)?;
    let kinetic = Expr::add(
        fields
            .iter()
            .map(|f| &f.weight * &geo.dot_covectors(&f.gradient, &f.gradient))
            .collect(),
    );
    let mut t = TensorField::zeros(vec![Slot::Down, Slot::Down], g.chart());
    for mu in 0..n {
        for nu in mu..n {
            let mut terms: Vec<Expr> = fields
                .iter()
                .map(|f| Expr::mul(vec![f.weight.clone(), f.gradient[mu].clone(), f.gradient[nu].clone()]))
                .collect();
            terms.push((g.get(mu, nu) * &kinetic).scale(-half()));
            let v = Expr::add(terms);
            t.set(&[nu, mu], v.clone());
            t.set(&[mu, nu], v);
        }
    }
    Ok(t)
}

fn time_index(g: &MetricSpec) -> Result<usize> {
    match g.signature() {
        Signature::Lorentzian { time } => Ok(time),
        Signature::Riemannian => Err(Error::InvalidMetric(
            "a Lorentzian metric is needed for the slice normal".into(),
        )),
    }
}

/// Lapse of the constant-time slices, `(−g^{tt})^{−1/2}`.
pub fn lapse(g: &MetricSpec) -> Result<Expr> {
    let t = time_index(g)?;
    let geo = Geometry::new(g)?;
    Ok(Expr::pow(geo.inv(t, t).neg(), -half()))
}

/// `T(N,N)` for the unit normal `N^μ = −lapse · g^{μt}`.
pub fn t_nn(g: &MetricSpec, t: &TensorField, lapse: &Expr) -> Result<Expr> {
    let ti = time_index(g)?;
    let geo = Geometry::new(g)?;
    let n = g.dim();
    let mut terms = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let (ga, gb) = (geo.inv(a, ti), geo.inv(b, ti));
            if ga.is_zero_literal() || gb.is_zero_literal() || t.get(&[a, b]).is_zero_literal() {
                continue;
            }
            terms.push(Expr::mul(vec![ga.clone(), gb.clone(), t.get(&[a, b]).clone()]));
        }
    }
    Ok(&Expr::powi(lapse.clone(), 2) * &Expr::add(terms))
}

/// Energy integrand `T(N,N) √q` on a 2+1 metric with coordinates `t`, `r`,
/// `theta` (any order; the time coordinate is the signature's).
#[derive(Debug, Clone)]
pub struct EnergyDensity {
    pub t_nn: Expr,
    pub sqrt_q: Expr,
    pub integrand: Expr,
    chart: Chart,
    time: usize,
    radial: usize,
    angular: usize,
}

impl EnergyDensity {
    pub fn new(g: &MetricSpec, fields: &[WaveMapField]) -> Result<EnergyDensity> {
        if g.dim() != 3 {
            return Err(Error::Dimension {
                expected: "3".into(),
                got: g.dim(),
            });
        }
        let chart = g.chart().clone();
        let time = time_index(g)?;
        let radial = chart.index_of("r")?;
        let angular = chart.index_of("theta")?;
        if time == radial || time == angular {
            return Err(Error::InvalidChart("`r` and `theta` must be spatial".into()));
        }
        let t = stress_energy(g, fields)?;
        let t_nn = t_nn(g, &t, &lapse(g)?)?;
        let (i, j) = (radial, angular);
        let det_q = g.get(i, i) * g.get(j, j) - Expr::powi(g.get(i, j).clone(), 2);
        let sqrt_q = det_q.sqrt();
        let integrand = &t_nn * &sqrt_q;
        Ok(EnergyDensity {
            t_nn,
            sqrt_q,
            integrand,
            chart,
            time,
            radial,
            angular,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Chart point with the given `(t, r, θ)`.
    pub fn point(&self, t: f64, r: f64, theta: f64) -> Vec<f64> {
        let mut x = vec![0.0; 3];
        x[self.time] = t;
        x[self.radial] = r;
        x[self.angular] = theta;
        x
    }
}

/// Energy density of the wave map produced by reducing `m4` along `∂_φ`:
/// the metric is `g̃`, the fields are `u` (weight 1) and, when the Killing
/// field is twisting, `v` with `dv = G` (weight `¼ e^{−4u}`).
pub fn reduced_energy_density(m4: &MetricSpec) -> Result<EnergyDensity> {
    let rd = conformal_reduce(&split_killing(m4)?)?;
    let chart = rd.g3().chart().clone();
    let mut fields = vec![WaveMapField::scalar("u", &chart, rd.u(), Expr::one())];
    if !rd.is_static() {
        let tw = TwistData::new(&rd, TwistWeight::Standard)?;
        let w = rd.exp_u(-4).scale(Rational::new(1.into(), 4.into()));
        fields.push(WaveMapField::from_gradient("v", tw.g.components().to_vec(), w));
    }
    EnergyDensity::new(rd.g3(), &fields)
}
