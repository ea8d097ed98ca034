//! ADM mass of an asymptotically flat 3-metric in Cartesian components.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{MetricSpec, Signature};
use crate::numeric::quadrature::{gauss_legendre, richardson_limit};
use crate::symexpr::{simplify, Expr, Tape};

#[derive(Debug, Clone)]
pub struct AdmOptions {
    pub radii: Vec<f64>,
    /// Gauss-Legendre nodes in `cos θ`.
    pub n_theta: usize,
    /// Trapezoid nodes in `φ`.
    pub n_phi: usize,
    /// Finite-difference step as a fraction of the radius.
    pub fd_step: f64,
}

impl Default for AdmOptions {
    fn default() -> Self {
        AdmOptions {
            radii: vec![1e2, 1e3, 1e4],
            n_theta: 24,
            n_phi: 48,
            fd_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmResult {
    pub mass: f64,
    pub radii: Vec<f64>,
    /// Surface integral at each radius.
    pub surface_values: Vec<f64>,
}

/// `m = 1/16π lim ∮ (∂_k q_ik − ∂_i q_kk) n^i dS` with default options.
pub fn adm_mass(q3: &MetricSpec) -> Result<f64> {
    Ok(adm_mass_with(q3, &AdmOptions::default())?.mass)
}

/// Surface integrals at each radius, Richardson-extrapolated in `1/R`.
///
/// The flat part is subtracted symbolically before compiling, so the finite
/// differences act on `q − δ` and do not lose digits at large radii.
pub fn adm_mass_with(q3: &MetricSpec, opts: &AdmOptions) -> Result<AdmResult> {
    if q3.dim() != 3 {
        return Err(Error::Dimension {
            expected: "3".into(),
            got: q3.dim(),
        });
    }
    if q3.signature() != Signature::Riemannian {
        return Err(Error::InvalidMetric("ADM mass needs a Riemannian 3-metric".into()));
    }
    if opts.radii.len() < 2 || opts.radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParameter("need at least two positive radii".into()));
    }
    let chart = q3.chart();
    let h: Vec<Expr> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| {
            let e = if i == j { q3.get(i, j) - &Expr::one() } else { q3.get(i, j).clone() };
            simplify(&e)
        })
        .collect();
    let tape = Tape::compile(&h, &chart.input_names())?;

    let (xs, ws) = gauss_legendre(opts.n_theta);
    let mut values = Vec::with_capacity(opts.radii.len());
    for &radius in &opts.radii {
        let step = opts.fd_step * radius;
        let nodes: Vec<(f64, f64, f64)> = xs
            .iter()
            .zip(&ws)
            .flat_map(|(&c, &w)| {
                (0..opts.n_phi).map(move |k| (c, w, 2.0 * PI * k as f64 / opts.n_phi as f64))
            })
            .collect();
        let parts: Vec<Result<f64>> = nodes
            .par_iter()
            .map(|&(c, w, phi)| {
                let s = (1.0 - c * c).sqrt();
                let n = [s * phi.cos(), s * phi.sin(), c];
                let x: Vec<f64> = n.iter().map(|v| v * radius).collect();
                // dh[k][i*3 + j] = ∂_k h_ij, fourth-order central stencil.
                let mut dh = [[0.0; 9]; 3];
                for (k, row) in dh.iter_mut().enumerate() {
                    let at = |off: f64| -> Result<Vec<f64>> {
                        let mut y = x.clone();
                        y[k] += off;
                        Ok(tape.eval(&chart.inputs_at(&y))?)
                    };
                    let (p1, m1, p2, m2) = (at(step)?, at(-step)?, at(2.0 * step)?, at(-2.0 * step)?);
                    for c in 0..9 {
                        row[c] = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * step);
                    }
                }
                let mut flux = 0.0;
                for i in 0..3 {
                    let mut a = 0.0;
                    for k in 0..3 {
                        a += dh[k][i * 3 + k] - dh[i][k * 3 + k];
                    }
                    flux += a * n[i];
                }
                Ok(w * (2.0 * PI / opts.n_phi as f64) * radius * radius * flux)
            })
            .collect();
        let total: f64 = parts.into_iter().sum::<Result<f64>>()?;
        values.push(total / (16.0 * PI));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonDecayingMetric("surface integral is not finite".into()));
    }
    let k = values.len();
    let last = (values[k - 1] - values[k - 2]).abs();
    if k >= 3 {
        let prev = (values[k - 2] - values[k - 3]).abs();
        if last > 0.5 * prev && last > 1e-9 * (1.0 + values[k - 1].abs()) {
            return Err(Error::NonDecayingMetric(format!(
                "successive differences {:.3e} then {:.3e}",
                prev, last
            )));
        }
    }
    let hs: Vec<f64> = opts.radii.iter().map(|r| 1.0 / r).collect();
    Ok(AdmResult {
        mass: richardson_limit(&hs, &values),
        radii: opts.radii.clone(),
        surface_values: values,
    })
}
