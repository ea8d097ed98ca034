//! Hamiltonian constraint of the equivariant 2+1 model.
//!
//! On a slice with metric `e^{2γ} dr² + r² dθ²` the constraint
//! `E(N,N) = T(N,N)` reads, for `χ = e^{−γ}`,
//!
//! `χ' = −(r / 2χ) (p² + χ² u_r² + f(u)²/r²)`, `χ(0) = 1`,
//!
//! with `p = e^{−Ω} ∂_t u`. Integrating, `1 − χ(r)` is the energy inside
//! radius `r` divided by `2π`, which gives `m_AV = 2(1 − χ_∞)`, the angle
//! deficit `2π(1 − χ_∞)` and `E = 2π(1 − χ_∞)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::quadrature::{adaptive_simpson, QuadOptions};
use crate::symexpr::{differentiate, Expr, Tape};

/// Radial data `(u, p)` and the generating function `f` of the target
/// surface of revolution. `u` and `p` are expressions in `r`, `f` in `u`.
/// Beyond `r_max` the profiles are treated as zero.
#[derive(Debug, Clone)]
pub struct EquivariantData {
    pub name: String,
    pub u: Expr,
    pub p: Expr,
    pub f: Expr,
    pub r_max: f64,
}

impl EquivariantData {
    pub fn new(name: &str, u: Expr, p: Expr, f: Expr, r_max: f64) -> Result<EquivariantData> {
        for (what, e, var) in [("u", &u, "r"), ("p", &p, "r"), ("f", &f, "u")] {
            if let Some(s) = e.symbols().into_iter().find(|s| s != var) {
                return Err(Error::UnknownSymbol(format!("{} (in the `{}` profile)", s, what)));
            }
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("r_max must be positive, got {}", r_max)));
        }
        Ok(EquivariantData {
            name: name.into(),
            u,
            p,
            f,
            r_max,
        })
    }

    pub fn compile(&self) -> Result<Profile> {
        let r = vec!["r".to_string()];
        let radial = Tape::compile(
            &[self.u.clone(), differentiate(&self.u, "r"), self.p.clone()],
            &r,
        )?;
        let target = Tape::compile(std::slice::from_ref(&self.f), &["u".to_string()])?;
        Ok(Profile { radial, target })
    }
}

/// Compiled profile.
#[derive(Debug, Clone)]
pub struct Profile {
    radial: Tape,
    target: Tape,
}

/// Pointwise values `(u, u_r, p, f(u))`.
#[derive(Debug, Clone, Copy)]
pub struct ProfileValues {
    pub u: f64,
    pub u_r: f64,
    pub p: f64,
    pub f: f64,
}

impl Profile {
    pub fn at(&self, r: f64) -> Result<ProfileValues> {
        let v = self.radial.eval(&[r])?;
        let f = self.target.eval(&[v[0]])?[0];
        Ok(ProfileValues {
            u: v[0],
            u_r: v[1],
            p: v[2],
            f,
        })
    }

    /// `T(N,N) = ½(p² + χ² u_r² + f²/r²)`; the axis value uses `f(u(0)) = 0`.
    pub fn density(&self, r: f64, chi: f64) -> Result<f64> {
        let v = self.at(r)?;
        let ang = if r == 0.0 { 0.0 } else { v.f * v.f / (r * r) };
        Ok(0.5 * (v.p * v.p + chi * chi * v.u_r * v.u_r + ang))
    }

    /// `r T(N,N)` without dividing by `r` at the axis.
    fn r_density(&self, r: f64, chi: f64) -> Result<f64> {
        let v = self.at(r)?;
        let ang = if r == 0.0 { 0.0 } else { v.f * v.f / r };
        Ok(0.5 * (r * (v.p * v.p + chi * chi * v.u_r * v.u_r) + ang))
    }

    /// Right-hand side `χ'`.
    pub fn rhs(&self, r: f64, chi: f64) -> Result<f64> {
        Ok(-self.r_density(r, chi)? / chi)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstraintOptions {
    /// Local error tolerance per step (absolute, on `χ ∈ (0, 1]`).
    pub tol: f64,
    /// Steps are halved when `|Δχ|` would exceed this.
    pub max_dchi: f64,
    pub initial_step: f64,
    /// Relative step floor; reaching it near `χ → 0` signals supercritical data.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for ConstraintOptions {
    fn default() -> Self {
        ConstraintOptions {
            tol: 1e-13,
            max_dchi: 1e-3,
            initial_step: 1e-3,
            min_step: 1e-13,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConstraintStatus {
    Subcritical,
    /// `χ` reaches zero at `r_star`.
    Supercritical { r_star: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintSolution {
    pub r: Vec<f64>,
    pub chi: Vec<f64>,
    /// `χ'` at each grid point (used for Hermite interpolation).
    pub dchi: Vec<f64>,
    pub status: ConstraintStatus,
    pub chi_inf: Option<f64>,
    pub gamma_inf: Option<f64>,
    pub m_av: Option<f64>,
    pub angle_deficit: Option<f64>,
    /// `2π(1 − χ_∞)`.
    pub energy: Option<f64>,
    #[serde(skip)]
    profile: Profile,
    #[serde(skip)]
    r_max: f64,
}

fn rk4(p: &Profile, r: f64, chi: f64, h: f64) -> Result<f64> {
    let k1 = p.rhs(r, chi)?;
    let k2 = p.rhs(r + 0.5 * h, chi + 0.5 * h * k1)?;
    let k3 = p.rhs(r + 0.5 * h, chi + 0.5 * h * k2)?;
    let k4 = p.rhs(r + h, chi + h * k3)?;
    Ok(chi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// One step-doubling trial: the two-half-step value with local
/// extrapolation, and the error estimate. `None` if a stage left `χ > 0`.
fn trial(p: &Profile, r: f64, chi: f64, h: f64) -> Option<(f64, f64)> {
    let full = rk4(p, r, chi, h).ok()?;
    let mid = rk4(p, r, chi, 0.5 * h).ok()?;
    if !(mid > 0.0) {
        return None;
    }
    let two = rk4(p, r + 0.5 * h, mid, 0.5 * h).ok()?;
    if !(full > 0.0 && two > 0.0 && two.is_finite()) {
        return None;
    }
    let err = (two - full).abs() / 15.0;
    Some((two + (two - full) / 15.0, err))
}

pub fn solve_constraint(data: &EquivariantData, opts: ConstraintOptions) -> Result<ConstraintSolution> {
    let profile = data.compile()?;
    let axis = profile.at(0.0)?;
    if axis.f.abs() > 1e-12 {
        return Err(Error::NonIntegrableAxis(format!(
            "f(u(0)) = {:.3e}, so f(u)²/r² is not integrable at r = 0",
            axis.f
        )));
    }
    let r_end = data.r_max;
    let (mut r, mut chi) = (0.0, 1.0);
    let mut h = opts.initial_step.min(r_end);
    let mut rs = vec![0.0];
    let mut chis = vec![1.0];
    let mut dchis = vec![profile.rhs(0.0, 1.0)?];
    let mut status = ConstraintStatus::Subcritical;
    let mut steps = 0;
    while r < r_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::QuadratureNonConvergence(format!(
                "constraint ODE exceeded {} steps at r = {}",
                opts.max_steps, r
            )));
        }
        h = h.min(r_end - r);
        let accepted = match trial(&profile, r, chi, h) {
            Some((next, err)) if err <= opts.tol && (next - chi).abs() <= opts.max_dchi => {
                Some((next, err))
            }
            Some((_, err)) if err > opts.tol => {
                h *= (0.9 * (opts.tol / err).powf(0.2)).clamp(0.1, 0.5);
                None
            }
            _ => {
                h *= 0.5;
                None
            }
        };
        match accepted {
            Some((next, err)) => {
                r = if h == r_end - r { r_end } else { r + h };
                chi = next;
                rs.push(r);
                chis.push(chi);
                dchis.push(profile.rhs(r, chi)?);
                let grow = if err == 0.0 { 2.0 } else { (0.9 * (opts.tol / err).powf(0.2)).min(2.0) };
                h *= grow.max(1.0);
            }
            None => {
                if h < opts.min_step * r.max(1.0) {
                    // χ² obeys a regular linear equation, so extrapolate it to zero.
                    let y = chi * chi;
                    let dy = -2.0 * profile.r_density(r, chi)?;
                    let r_star = if dy < 0.0 { r - y / dy } else { r };
                    status = ConstraintStatus::Supercritical { r_star };
                    break;
                }
            }
        }
    }
    let (chi_inf, gamma_inf, m_av, angle_deficit, energy) = match status {
        ConstraintStatus::Subcritical => (
            Some(chi),
            Some(-chi.ln()),
            Some(2.0 * (1.0 - chi)),
            Some(2.0 * PI * (1.0 - chi)),
            Some(2.0 * PI * (1.0 - chi)),
        ),
        ConstraintStatus::Supercritical { .. } => (None, None, None, None, None),
    };
    Ok(ConstraintSolution {
        r: rs,
        chi: chis,
        dchi: dchis,
        status,
        chi_inf,
        gamma_inf,
        m_av,
        angle_deficit,
        energy,
        profile,
        r_max: r_end,
    })
}

impl ConstraintSolution {
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Radius where the data end and the integration stops.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn is_subcritical(&self) -> bool {
        self.status == ConstraintStatus::Subcritical
    }

    pub fn gamma(&self) -> Vec<f64> {
        self.chi.iter().map(|c| -c.ln()).collect()
    }

    /// Cubic Hermite interpolation of `χ` between grid points.
    pub fn chi_at(&self, r: f64) -> f64 {
        let n = self.r.len();
        if r <= self.r[0] {
            return self.chi[0];
        }
        if r >= self.r[n - 1] {
            return self.chi[n - 1];
        }
        let k = self.r.partition_point(|x| *x <= r) - 1;
        let (r0, r1) = (self.r[k], self.r[k + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.chi[k]
            + (t3 - 2.0 * t2 + t) * h * self.dchi[k]
            + (-2.0 * t3 + 3.0 * t2) * self.chi[k + 1]
            + (t3 - t2) * h * self.dchi[k + 1]
    }

    /// `T(N,N)` at each grid point.
    pub fn energy_density(&self) -> Result<Vec<f64>> {
        self.r
            .iter()
            .zip(&self.chi)
            .map(|(&r, &c)| self.profile.density(r, c))
            .collect()
    }

    /// `∫ T(N,N) √q dr dθ` with `√q = e^{γ} r`, by adaptive Simpson over the
    /// interpolated solution (the θ-integral is the factor 2π).
    pub fn energy_quadrature(&self) -> Result<f64> {
        let opts = QuadOptions {
            rel_tol: 1e-11,
            abs_floor: 1e-16,
            max_depth: 40,
        };
        let panels = 16;
        let dr = self.r_max / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            total += adaptive_simpson(
                |r| {
                    let chi = self.chi_at(r);
                    Ok(self.profile.r_density(r, chi)? / chi)
                },
                dr * k as f64,
                dr * (k + 1) as f64,
                opts,
            )?;
        }
        Ok(2.0 * PI * total)
    }

    /// CSV with columns `r,chi,gamma,energy_density`.
    pub fn to_csv(&self) -> Result<String> {
        let dens = self.energy_density()?;
        let mut out = String::from("r,chi,gamma,energy_density\n");
        for i in 0..self.r.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.r[i],
                self.chi[i],
                -self.chi[i].ln(),
                dens[i]
            ));
        }
        Ok(out)
    }
}

/// Consistency of the three asymptotic quantities derived from `χ_∞`.
#[derive(Debug, Clone, Serialize)]
pub struct MassIdentities {
    pub m_av: f64,
    pub angle_deficit: f64,
    pub energy_ode: f64,
    pub energy_quadrature: f64,
    /// `|deficit − π m_AV|`.
    pub deficit_gap: f64,
    /// `|2π(1 − χ_∞) − E_quadrature| / E_quadrature` (0 when both vanish).
    pub energy_gap: f64,
    pub m_av_in_range: bool,
}

impl MassIdentities {
    pub fn holds(&self, energy_tol: f64) -> bool {
        self.deficit_gap <= 4.0 * f64::EPSILON * self.angle_deficit.abs().max(1.0)
            && self.energy_gap < energy_tol
            && self.m_av_in_range
    }
}

pub fn mass_identities(sol: &ConstraintSolution) -> Result<MassIdentities> {
    let (Some(m_av), Some(angle_deficit), Some(energy_ode)) = (sol.m_av, sol.angle_deficit, sol.energy)
    else {
        return Err(Error::InvalidParameter(
            "mass identities need a subcritical solution".into(),
        ));
    };
    let energy_quadrature = sol.energy_quadrature()?;
    let diff = (energy_ode - energy_quadrature).abs();
    let energy_gap = if diff == 0.0 { 0.0 } else { diff / energy_quadrature.abs() };
    Ok(MassIdentities {
        m_av,
        angle_deficit,
        energy_ode,
        energy_quadrature,
        deficit_gap: (angle_deficit - PI * m_av).abs(),
        energy_gap,
        m_av_in_range: (0.0..2.0).contains(&m_av),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub amplitude: f64,
    pub status: ConstraintStatus,
    pub m_av: Option<f64>,
    pub energy: Option<f64>,
}

/// Solves the constraint for each amplitude in `amps`.
pub fn amplitude_sweep<F>(make: F, amps: &[f64], opts: ConstraintOptions) -> Result<Vec<SweepPoint>>
where
    F: Fn(f64) -> Result<EquivariantData>,
{
    amps.iter()
        .map(|&a| {
            let sol = solve_constraint(&make(a)?, opts)?;
            Ok(SweepPoint {
                amplitude: a,
                status: sol.status,
                m_av: sol.m_av,
                energy: sol.energy,
            })
        })
        .collect()
}

/// Bisection for the amplitude at which the data turn supercritical,
/// starting from a subcritical `lo` and a supercritical `hi`.
pub fn critical_amplitude<F>(make: F, mut lo: f64, mut hi: f64, rel_tol: f64, opts: ConstraintOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<EquivariantData>,
{
    let sub = |a: f64| -> Result<bool> { Ok(solve_constraint(&make(a)?, opts)?.is_subcritical()) };
    if !sub(lo)? || sub(hi)? {
        return Err(Error::InvalidParameter(format!(
            "amplitudes {} and {} do not bracket the critical value",
            lo, hi
        )));
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if sub(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    fn data(u: &str) -> EquivariantData {
        EquivariantData::new("t", parse(u).unwrap(), Expr::zero(), parse("sin(u)").unwrap(), 8.0)
            .unwrap()
    }

    #[test]
    fn zero_data_is_flat() {
        let sol = solve_constraint(&data("0"), ConstraintOptions::default()).unwrap();
        assert!(sol.chi.iter().all(|c| *c == 1.0));
        assert_eq!(sol.m_av, Some(0.0));
        let id = mass_identities(&sol).unwrap();
        assert_eq!(id.energy_quadrature, 0.0);
        assert!(id.holds(1e-6));
    }

    #[test]
    fn axis_value_must_be_a_zero_of_f() {
        let r = solve_constraint(&data("1 + r^2"), ConstraintOptions::default());
        assert!(matches!(r, Err(Error::NonIntegrableAxis(_))));
    }

    #[test]
    fn profile_symbols_checked() {
        let r = EquivariantData::new("t", parse("x").unwrap(), Expr::zero(), parse("u").unwrap(), 1.0);
        assert!(matches!(r, Err(Error::UnknownSymbol(_))));
    }
}
