//! Levi-Civita connection and curvature of a [`MetricSpec`].
//!
//! Conventions: `Γ^a_bc = ½ g^ad (∂_b g_dc + ∂_c g_db − ∂_d g_bc)`,
//! `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`,
//! `R_bd = R^a_bad`. With signature (−,+,+,+) the sphere has positive
//! scalar curvature.

use super::metric::MetricSpec;
use super::tensor::{Slot, TensorField};
use crate::error::{Error, Result};
use crate::symexpr::{Differentiator, Expr, Tape};

use Slot::{Down, Up};

/// Caches the inverse metric, Christoffel symbols and one memoizing
/// differentiator per coordinate, so repeated curvature queries share work.
pub struct Geometry {
    metric: MetricSpec,
    diff: Vec<Differentiator>,
    inverse: TensorField,
    abs_det: Expr,
    gamma: Option<TensorField>,
    ricci: Option<TensorField>,
}

impl Geometry {
    pub fn new(metric: &MetricSpec) -> Result<Geometry> {
        let inverse = invert(metric)?;
        Ok(Geometry {
            diff: metric.chart().coords().iter().map(|c| Differentiator::new(c)).collect(),
            abs_det: metric.abs_determinant(),
            metric: metric.clone(),
            inverse,
            gamma: None,
            ricci: None,
        })
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `g^ab`.
    pub fn inverse(&self) -> &TensorField {
        &self.inverse
    }

    pub fn inv(&self, a: usize, b: usize) -> &Expr {
        self.inverse.get(&[a, b])
    }

    /// Partial derivative along coordinate `i`.
    pub fn partial(&mut self, e: &Expr, i: usize) -> Expr {
        self.diff[i].run(e)
    }

    pub fn gradient(&mut self, s: &Expr) -> Vec<Expr> {
        (0..self.dim()).map(|i| self.partial(s, i)).collect()
    }

    /// `g^ab X_a Y_b` for covector component lists.
    pub fn dot_covectors(&self, x: &[Expr], y: &[Expr]) -> Expr {
        let n = self.dim();
        let mut terms = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let g = self.inv(a, b);
                if g.is_zero_literal() || x[a].is_zero_literal() || y[b].is_zero_literal() {
                    continue;
                }
                terms.push(Expr::mul(vec![g.clone(), x[a].clone(), y[b].clone()]));
            }
        }
        Expr::add(terms)
    }

    /// Raises the index of a covector: `X^a = g^ab X_b`.
    pub fn raise(&self, x: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        (0..n)
            .map(|a| {
                Expr::add(
                    (0..n)
                        .filter(|&b| !self.inv(a, b).is_zero_literal() && !x[b].is_zero_literal())
                        .map(|b| self.inv(a, b) * &x[b])
                        .collect(),
                )
            })
            .collect()
    }

    /// `Γ^a_bc`, symmetric in `b, c` by construction (shared components).
    pub fn christoffel(&mut self) -> TensorField {
        if let Some(g) = &self.gamma {
            return g.clone();
        }
        let n = self.dim();
        // dg[c][a*n+b] = ∂_c g_ab
        let comps = self.metric.components().to_vec();
        let dg: Vec<Vec<Expr>> = (0..n)
            .map(|c| comps.iter().map(|e| self.partial(e, c)).collect())
            .collect();
        let mut gamma = TensorField::zeros(vec![Up, Down, Down], self.metric.chart());
        for b in 0..n {
            for c in b..n {
                let first_kind: Vec<Expr> = (0..n)
                    .map(|d| {
                        Expr::add(vec![
                            dg[b][d * n + c].clone(),
                            dg[c][d * n + b].clone(),
                            dg[d][b * n + c].neg(),
                        ])
                        .scale(half())
                    })
                    .collect();
                for a in 0..n {
                    let e = Expr::add(
                        (0..n)
                            .filter(|&d| {
                                !self.inv(a, d).is_zero_literal()
                                    && !first_kind[d].is_zero_literal()
                            })
                            .map(|d| self.inv(a, d) * &first_kind[d])
                            .collect(),
                    );
                    gamma.set(&[a, b, c], e.clone());
                    gamma.set(&[a, c, b], e);
                }
            }
        }
        self.gamma = Some(gamma.clone());
        gamma
    }

    /// `R^a_bcd`, antisymmetric in `c, d` by construction.
    pub fn riemann(&mut self) -> TensorField {
        let gamma = self.christoffel();
        let n = self.dim();
        let mut r = TensorField::zeros(vec![Up, Down, Down, Down], self.metric.chart());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in (c + 1)..n {
                        let mut terms = vec![
                            self.partial(gamma.get(&[a, d, b]), c),
                            self.partial(gamma.get(&[a, c, b]), d).neg(),
                        ];
                        for e in 0..n {
                            terms.push(gamma.get(&[a, c, e]) * gamma.get(&[e, d, b]));
                            terms.push((gamma.get(&[a, d, e]) * gamma.get(&[e, c, b])).neg());
                        }
                        let v = Expr::add(terms);
                        r.set(&[a, b, d, c], v.neg());
                        r.set(&[a, b, c, d], v);
                    }
                }
            }
        }
        r
    }

    /// `R_bd = R^a_bad`, computed directly from the connection.
    pub fn ricci(&mut self) -> TensorField {
        if let Some(r) = &self.ricci {
            return r.clone();
        }
        let gamma = self.christoffel();
        let n = self.dim();
        // Contracted symbols Γ^a_ab.
        let trace: Vec<Expr> = (0..n)
            .map(|b| Expr::add((0..n).map(|a| gamma.get(&[a, a, b]).clone()).collect()))
            .collect();
        let mut ric = TensorField::zeros(vec![Down, Down], self.metric.chart());
        for b in 0..n {
            for d in b..n {
                let mut terms = Vec::new();
                for a in 0..n {
                    terms.push(self.partial(gamma.get(&[a, d, b]), a));
                }
                terms.push(self.partial(&trace[b], d).neg());
                for e in 0..n {
                    terms.push(&trace[e] * gamma.get(&[e, d, b]));
                    for a in 0..n {
                        terms.push((gamma.get(&[a, d, e]) * gamma.get(&[e, a, b])).neg());
                    }
                }
                let v = Expr::add(terms);
                ric.set(&[b, d], v.clone());
                ric.set(&[d, b], v);
            }
        }
        self.ricci = Some(ric.clone());
        ric
    }

    pub fn ricci_scalar(&mut self) -> Expr {
        let ric = self.ricci();
        let n = self.dim();
        let mut terms = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let g = self.inv(a, b);
                if !g.is_zero_literal() {
                    terms.push(g * ric.get(&[a, b]));
                }
            }
        }
        Expr::add(terms)
    }

    /// `E_ab = R_ab − ½ R g_ab`.
    pub fn einstein(&mut self) -> TensorField {
        let ric = self.ricci();
        let half_r = self.ricci_scalar().scale(half());
        let n = self.dim();
        let mut e = TensorField::zeros(vec![Down, Down], self.metric.chart());
        for a in 0..n {
            for b in a..n {
                let v = ric.get(&[a, b]) - &(&half_r * self.metric.get(a, b));
                e.set(&[a, b], v.clone());
                e.set(&[b, a], v);
            }
        }
        e
    }

    /// Covariant Hessian `∇_a ∇_b s = ∂_a ∂_b s − Γ^c_ab ∂_c s`.
    pub fn hessian(&mut self, s: &Expr) -> TensorField {
        let gamma = self.christoffel();
        let ds = self.gradient(s);
        let n = self.dim();
        let mut h = TensorField::zeros(vec![Down, Down], self.metric.chart());
        for a in 0..n {
            for b in a..n {
                let mut terms = vec![self.partial(&ds[b], a)];
                for c in 0..n {
                    if !ds[c].is_zero_literal() {
                        terms.push((gamma.get(&[c, a, b]) * &ds[c]).neg());
                    }
                }
                let v = Expr::add(terms);
                h.set(&[a, b], v.clone());
                h.set(&[b, a], v);
            }
        }
        h
    }

    /// Divergence `∇_ν X^ν = ∂_ν X^ν + X^ν ∂_ν|g| / (2|g|)` of a vector field.
    pub fn divergence(&mut self, x: &[Expr]) -> Expr {
        let det = self.abs_det.clone();
        let inv_2det = det.recip().scale(half());
        let mut terms = Vec::new();
        for (nu, xn) in x.iter().enumerate() {
            if xn.is_zero_literal() {
                continue;
            }
            terms.push(self.partial(xn, nu));
            let dd = self.partial(&det, nu);
            if !dd.is_zero_literal() {
                terms.push(Expr::mul(vec![xn.clone(), dd, inv_2det.clone()]));
            }
        }
        Expr::add(terms)
    }

    /// Covariant wave operator `|g|^(-1/2) ∂_ν (|g|^(1/2) g^μν ∂_μ s)`.
    pub fn box_scalar(&mut self, s: &Expr) -> Expr {
        let ds = self.gradient(s);
        let x = self.raise(&ds);
        self.divergence(&x)
    }

    /// Covariant divergence of a symmetric (0,2) tensor `T`, evaluated
    /// numerically: `∇_μ T^μ_ν`, with the partial derivatives of the mixed
    /// components taken by a fourth-order central difference of step `h`.
    /// Returns the largest component magnitude over `n` chart points.
    pub fn divergence_fd(&mut self, t: &TensorField, n: usize, seed: u64, h: f64) -> Result<f64> {
        let dim = self.dim();
        let gamma = self.christoffel();
        let mixed: Vec<Expr> = (0..dim)
            .flat_map(|mu| (0..dim).map(move |nu| (mu, nu)))
            .map(|(mu, nu)| {
                Expr::add(
                    (0..dim)
                        .filter(|&a| !self.inv(mu, a).is_zero_literal())
                        .map(|a| self.inv(mu, a) * t.get(&[a, nu]))
                        .collect(),
                )
            })
            .collect();
        let chart = self.metric.chart().clone();
        let names = chart.input_names();
        let mixed_tape = Tape::compile(&mixed, &names)?;
        let gamma_tape = Tape::compile(gamma.components(), &names)?;
        let mut worst: f64 = 0.0;
        for p in chart.sample_points(n, seed)? {
            let base = chart.inputs_at(&p);
            let m0 = mixed_tape.eval(&base)?;
            let g0 = gamma_tape.eval(&base)?;
            let gam = |a: usize, b: usize, c: usize| g0[(a * dim + b) * dim + c];
            let tm = |mu: usize, nu: usize| m0[mu * dim + nu];
            // dm[k][mu*dim+nu] = ∂_k T^mu_nu
            let mut dm = Vec::with_capacity(dim);
            for k in 0..dim {
                let at = |s: f64| -> Result<Vec<f64>> {
                    let mut x = base.clone();
                    x[k] += s * h;
                    Ok(mixed_tape.eval(&x)?)
                };
                let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
                dm.push(
                    (0..dim * dim)
                        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
                        .collect::<Vec<f64>>(),
                );
            }
            for nu in 0..dim {
                let mut acc = 0.0;
                for mu in 0..dim {
                    acc += dm[mu][mu * dim + nu];
                    for l in 0..dim {
                        acc += gam(mu, mu, l) * tm(l, nu);
                        acc -= gam(l, mu, nu) * tm(mu, l);
                    }
                }
                worst = worst.max(acc.abs());
            }
        }
        Ok(worst)
    }
}

fn half() -> crate::symexpr::Rational {
    crate::symexpr::Rational::new(1.into(), 2.into())
}

/// Inverse via adjugate, block by block: coordinates coupled through nonzero
/// off-diagonal components are inverted together.
fn invert(m: &MetricSpec) -> Result<TensorField> {
    let n = m.dim();
    let mut block = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if block[i] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![i];
        block[i] = id;
        let mut k = 0;
        while k < members.len() {
            let a = members[k];
            for b in 0..n {
                if block[b] == usize::MAX && !m.get(a, b).is_zero_literal() {
                    block[b] = id;
                    members.push(b);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        blocks.push(members);
    }
    let mut inv = TensorField::zeros(vec![Up, Up], m.chart());
    for members in &blocks {
        let k = members.len();
        let sub: Vec<Expr> = members
            .iter()
            .flat_map(|&i| members.iter().map(move |&j| m.get(i, j).clone()))
            .collect();
        let det = sub_det(&sub, k);
        if det.is_zero_literal() {
            return Err(Error::SingularMetric(format!(
                "block {:?} has zero determinant",
                members
            )));
        }
        let inv_det = det.recip();
        for (x, &i) in members.iter().enumerate() {
            for (y, &j) in members.iter().enumerate().skip(x) {
                let e = if k == 1 {
                    inv_det.clone()
                } else {
                    sub_cofactor(&sub, k, y, x) * inv_det.clone()
                };
                inv.set(&[i, j], e.clone());
                inv.set(&[j, i], e);
            }
        }
    }
    Ok(inv)
}

fn sub_det(m: &[Expr], n: usize) -> Expr {
    let idx: Vec<usize> = (0..n).collect();
    minor(m, n, &idx, &idx)
}

fn sub_cofactor(m: &[Expr], n: usize, i: usize, j: usize) -> Expr {
    let rows: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let cols: Vec<usize> = (0..n).filter(|&k| k != j).collect();
    let v = minor(m, n, &rows, &cols);
    if (i + j).is_multiple_of(2) {
        v
    } else {
        v.neg()
    }
}

fn minor(m: &[Expr], n: usize, rows: &[usize], cols: &[usize]) -> Expr {
    if rows.is_empty() {
        return Expr::one();
    }
    let r0 = rows[0];
    let mut terms = Vec::new();
    for (k, &c) in cols.iter().enumerate() {
        let entry = &m[r0 * n + c];
        if entry.is_zero_literal() {
            continue;
        }
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let t = entry * &minor(m, n, &rows[1..], &sub_cols);
        terms.push(if k % 2 == 0 { t } else { t.neg() });
    }
    Expr::add(terms)
}

/// `g^ab`.
pub fn inverse_metric(m: &MetricSpec) -> Result<TensorField> {
    invert(m)
}

/// `Γ^a_bc`.
pub fn christoffel(m: &MetricSpec) -> Result<TensorField> {
    Ok(Geometry::new(m)?.christoffel())
}

/// `R^a_bcd`.
pub fn riemann(m: &MetricSpec) -> Result<TensorField> {
    Ok(Geometry::new(m)?.riemann())
}

/// `R_ab`.
pub fn ricci(m: &MetricSpec) -> Result<TensorField> {
    Ok(Geometry::new(m)?.ricci())
}

pub fn ricci_scalar(m: &MetricSpec) -> Result<Expr> {
    Ok(Geometry::new(m)?.ricci_scalar())
}

/// `E_ab = R_ab − ½ R g_ab`.
pub fn einstein_tensor(m: &MetricSpec) -> Result<TensorField> {
    Ok(Geometry::new(m)?.einstein())
}

/// Covariant wave operator applied to a scalar.
pub fn box_scalar(m: &MetricSpec, s: &Expr) -> Result<Expr> {
    Ok(Geometry::new(m)?.box_scalar(s))
}

/// First Bianchi combination `R^a_bcd + R^a_cdb + R^a_dbc`, one entry per
/// index tuple.
pub fn first_bianchi(riem: &TensorField) -> Vec<Expr> {
    let n = riem.dim();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out.push(Expr::add(vec![
                        riem.get(&[a, b, c, d]).clone(),
                        riem.get(&[a, c, d, b]).clone(),
                        riem.get(&[a, d, b, c]).clone(),
                    ]));
                }
            }
        }
    }
    out
}
