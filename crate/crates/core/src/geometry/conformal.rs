//! Curvature and wave operator of `g̃ = e^{2ψ} g` in three dimensions,
//! expressed through quantities of `g`.

use super::curvature::Geometry;
use super::metric::MetricSpec;
use super::tensor::{Slot, TensorField};
use crate::error::{Error, Result};
use crate::symexpr::Expr;

fn require_3d(m: &MetricSpec) -> Result<()> {
    if m.dim() != 3 {
        return Err(Error::Dimension {
            expected: "3".into(),
            got: m.dim(),
        });
    }
    Ok(())
}

/// `□_g̃ s = e^{−2ψ} (□_g s + g^{μν} ∂_ν ψ ∂_μ s)`.
pub fn conformal_box(m: &MetricSpec, psi: &Expr, s: &Expr) -> Result<Expr> {
    require_3d(m)?;
    let mut geo = Geometry::new(m)?;
    let bx = geo.box_scalar(s);
    let dpsi = geo.gradient(psi);
    let ds = geo.gradient(s);
    let cross = geo.dot_covectors(&dpsi, &ds);
    Ok((psi * &Expr::int(-2)).exp() * (bx + cross))
}

/// `R̃_μν = R_μν − g_μν ∇^σ∇_σ ψ − ∇_μ∇_ν ψ + ∇_μψ ∇_νψ − g_μν ∇^σψ ∇_σψ`.
pub fn conformal_ricci(m: &MetricSpec, psi: &Expr) -> Result<TensorField> {
    require_3d(m)?;
    let mut geo = Geometry::new(m)?;
    let ric = geo.ricci();
    let hess = geo.hessian(psi);
    let dpsi = geo.gradient(psi);
    let lap = geo.box_scalar(psi);
    let grad2 = geo.dot_covectors(&dpsi, &dpsi);
    let trace_part = lap + grad2;
    let n = m.dim();
    let mut out = TensorField::zeros(vec![Slot::Down, Slot::Down], m.chart());
    for a in 0..n {
        for b in a..n {
            let v = Expr::add(vec![
                ric.get(&[a, b]).clone(),
                (m.get(a, b) * &trace_part).neg(),
                hess.get(&[a, b]).neg(),
                &dpsi[a] * &dpsi[b],
            ]);
            out.set(&[a, b], v.clone());
            out.set(&[b, a], v);
        }
    }
    Ok(out)
}
