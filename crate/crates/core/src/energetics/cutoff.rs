//! Cutoff energies `E(R, ε)` and the classification of their growth in `R`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::stress::EnergyDensity;
use crate::error::{Error, Result};
use crate::numeric::quadrature::{adaptive_simpson_2d, QuadOptions};
use crate::symexpr::Tape;

#[derive(Debug, Clone, Copy)]
pub struct CutoffOptions {
    /// Value of the time coordinate on the slice.
    pub t: f64,
    pub quad: QuadOptions,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        CutoffOptions {
            t: 0.0,
            quad: QuadOptions {
                rel_tol: 1e-11,
                abs_floor: 1e-14,
                max_depth: 40,
            },
        }
    }
}

/// `∫_{r0}^{R} ∫_{ε}^{π−ε} T(N,N) √q dθ dr`.
///
/// The radial integral runs in `s = ln r`, split into unit panels that are
/// integrated in parallel.
pub fn energy_cutoff(d: &EnergyDensity, r0: f64, r_max: f64, eps: f64, opts: CutoffOptions) -> Result<f64> {
    let tape = Tape::compile(std::slice::from_ref(&d.integrand), &d.chart().input_names())?;
    shell(d, &tape, r0, r_max, eps, opts)
}

/// `E(R_k, ε)` for increasing radii, accumulated shell by shell.
pub fn energy_cutoff_series(
    d: &EnergyDensity,
    r0: f64,
    radii: &[f64],
    eps: f64,
    opts: CutoffOptions,
) -> Result<Vec<(f64, f64)>> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    let tape = Tape::compile(std::slice::from_ref(&d.integrand), &d.chart().input_names())?;
    let mut out = Vec::with_capacity(radii.len());
    let (mut lo, mut acc) = (r0, 0.0);
    for &r in radii {
        acc += shell(d, &tape, lo, r, eps, opts)?;
        out.push((r, acc));
        lo = r;
    }
    Ok(out)
}

fn shell(d: &EnergyDensity, tape: &Tape, r0: f64, r_max: f64, eps: f64, opts: CutoffOptions) -> Result<f64> {
    if !(r0 > 0.0 && r_max > r0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r0 < R, got r0 = {}, R = {}",
            r0, r_max
        )));
    }
    if !(eps > 0.0 && eps < PI / 2.0) {
        return Err(Error::InvalidParameter(format!("need 0 < eps < pi/2, got {}", eps)));
    }
    let chart = d.chart();
    let (s0, s1) = (r0.ln(), r_max.ln());
    let panels = ((s1 - s0).ceil() as usize).max(1);
    let ds = (s1 - s0) / panels as f64;
    let parts: Vec<Result<f64>> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let a = s0 + ds * k as f64;
            let b = if k + 1 == panels { s1 } else { a + ds };
            adaptive_simpson_2d(
                |s, th| {
                    let r = s.exp();
                    let v = tape.eval(&chart.inputs_at(&d.point(opts.t, r, th)))?;
                    Ok(v[0] * r)
                },
                (a, b),
                (eps, PI - eps),
                opts.quad,
            )
        })
        .collect();
    parts.into_iter().sum()
}

const POWER_RATIO: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Convergent,
    LogDivergent,
    PowerDivergent,
    /// None of the rules applies (e.g. a log law with large finite-`R` corrections).
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitThresholds {
    /// Largest fit residual, relative to the fitted growth `c1 ln(R_max/R_min)`.
    pub residual: f64,
    /// Largest relative spread of `E` over the last decade of `R`.
    pub cauchy: f64,
}

impl Default for FitThresholds {
    fn default() -> Self {
        FitThresholds {
            residual: 1e-3,
            cauchy: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergySample {
    pub r: f64,
    pub energy: f64,
}

/// Least-squares fit `E ≈ c1 ln R + c0` and the resulting verdict.
///
/// Rules, in order: convergent if the Cauchy spread is below threshold;
/// log-divergent if `c1 > 0` and the relative fit residual is below
/// threshold; power-divergent if the increments `ΔE / Δln R` are positive
/// and each exceeds the previous one by a factor of at least 1.01 over the
/// last three intervals; otherwise inconclusive. A log law with `1/R`
/// corrections has increments that level off, so it is never classed as a
/// power law.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub samples: Vec<EnergySample>,
    pub c1: f64,
    pub c0: f64,
    pub fit_residual: f64,
    pub cauchy_spread: f64,
    pub thresholds: FitThresholds,
    pub verdict: Verdict,
}

pub fn divergence_fit(samples: &[(f64, f64)], th: FitThresholds) -> Result<EnergyReport> {
    let mut s: Vec<(f64, f64)> = samples.to_vec();
    if s.iter().any(|(r, e)| !(r.is_finite() && *r > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter("samples need finite E and R > 0".into()));
    }
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = s.len();
    if n < 5 {
        return Err(Error::InsufficientSamples(format!("{} samples, need at least 5", n)));
    }
    let (r_min, r_max) = (s[0].0, s[n - 1].0);
    if r_max / r_min < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientSamples(format!(
            "R spans {:.3} decades, need at least 2",
            (r_max / r_min).log10()
        )));
    }

    let xs: Vec<f64> = s.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = s.iter().map(|p| p.1).collect();
    let xm = xs.iter().sum::<f64>() / n as f64;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let c1 = sxy / sxx;
    let c0 = ym - c1 * xm;
    let max_resid = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - c1 * x - c0).abs())
        .fold(0.0, f64::max);
    let growth = (c1 * (xs[n - 1] - xs[0])).abs();
    let fit_residual = if growth > 0.0 { max_resid / growth } else { f64::INFINITY };

    let e_last = ys[n - 1];
    let spread = (0..n - 1)
        .filter(|&i| i == n - 2 || s[i].0 >= r_max / 10.0)
        .map(|i| (ys[i] - e_last).abs())
        .fold(0.0, f64::max);
    let cauchy_spread = if spread == 0.0 { 0.0 } else { spread / e_last.abs().max(1e-300) };

    let inc: Vec<f64> = (1..n).map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])).collect();
    let k = inc.len();
    let growing = inc[k - 3] > 0.0
        && inc[k - 2] > POWER_RATIO * inc[k - 3]
        && inc[k - 1] > POWER_RATIO * inc[k - 2];

    let verdict = if cauchy_spread < th.cauchy {
        Verdict::Convergent
    } else if c1 > 0.0 && fit_residual < th.residual {
        Verdict::LogDivergent
    } else if growing {
        Verdict::PowerDivergent
    } else {
        Verdict::Inconclusive
    };
    Ok(EnergyReport {
        samples: s.iter().map(|&(r, energy)| EnergySample { r, energy }).collect(),
        c1,
        c0,
        fit_residual,
        cauchy_spread,
        thresholds: th,
        verdict,
    })
}
