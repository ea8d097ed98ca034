use serde::{Deserialize, Serialize};

use super::chart::Chart;
use super::tensor::{Slot, TensorField};
use crate::error::{Error, Result};
use crate::symexpr::{is_zero, Expr, Tape, ZeroStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signature {
    Riemannian,
    /// Mostly-plus Lorentzian signature with the given time index.
    Lorentzian { time: usize },
}

/// Symmetric matrix of symbolic components on a chart.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    dim: usize,
    comps: Vec<Expr>,
    signature: Signature,
    chart: Chart,
}

impl MetricSpec {
    /// Builds a metric from a full component matrix. The matrix must be
    /// structurally symmetric and match the chart dimension (2, 3 or 4).
    pub fn new(chart: Chart, rows: Vec<Vec<Expr>>, signature: Signature) -> Result<MetricSpec> {
        let n = chart.dim();
        if !(2..=4).contains(&n) {
            return Err(Error::Dimension {
                expected: "2, 3 or 4".into(),
                got: n,
            });
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: format!("{}x{} component matrix", n, n),
                got: rows.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidMetric(format!(
                        "components ({},{}) and ({},{}) differ",
                        i, j, j, i
                    )));
                }
            }
        }
        if let Signature::Lorentzian { time } = signature {
            if time >= n {
                return Err(Error::InvalidMetric(format!("time index {} out of range", time)));
            }
        }
        Ok(MetricSpec {
            dim: n,
            comps: rows.into_iter().flatten().collect(),
            signature,
            chart,
        })
    }

    pub fn diagonal(chart: Chart, diag: Vec<Expr>, signature: Signature) -> Result<MetricSpec> {
        let n = diag.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { diag[i].clone() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        MetricSpec::new(chart, rows, signature)
    }

    /// Builds from lower-triangle entries `(i, j, expr)` with `i >= j`;
    /// missing entries are zero.
    pub fn from_lower(
        chart: Chart,
        entries: &[(usize, usize, Expr)],
        signature: Signature,
    ) -> Result<MetricSpec> {
        let n = chart.dim();
        let mut rows = vec![vec![Expr::zero(); n]; n];
        for (i, j, e) in entries {
            if *i >= n || *j >= n {
                return Err(Error::Dimension {
                    expected: format!("indices below {}", n),
                    got: (*i).max(*j),
                });
            }
            rows[*i][*j] = e.clone();
            rows[*j][*i] = e.clone();
        }
        MetricSpec::new(chart, rows, signature)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i * self.dim + j]
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        self.comps.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Same components on a different chart (e.g. with another sampling box).
    pub fn with_chart(&self, chart: Chart) -> Result<MetricSpec> {
        MetricSpec::new(chart, self.rows(), self.signature)
    }

    /// `factor * g`, componentwise.
    pub fn scaled(&self, factor: &Expr) -> MetricSpec {
        MetricSpec {
            dim: self.dim,
            comps: self.comps.iter().map(|c| factor * c).collect(),
            signature: self.signature,
            chart: self.chart.clone(),
        }
    }

    pub fn as_tensor(&self) -> TensorField {
        TensorField::new(vec![Slot::Down, Slot::Down], &self.chart, self.comps.clone())
            .expect("shape matches chart")
    }

    pub fn determinant(&self) -> Expr {
        let idx: Vec<usize> = (0..self.dim).collect();
        det_minor(&self.comps, self.dim, &idx, &idx)
    }

    /// Cofactor `C_ij = (-1)^(i+j) * minor_ij`.
    pub fn cofactor(&self, i: usize, j: usize) -> Expr {
        let rows: Vec<usize> = (0..self.dim).filter(|&k| k != i).collect();
        let cols: Vec<usize> = (0..self.dim).filter(|&k| k != j).collect();
        let m = det_minor(&self.comps, self.dim, &rows, &cols);
        if (i + j).is_multiple_of(2) {
            m
        } else {
            m.neg()
        }
    }

    /// `|det g|`, oriented by the signature tag.
    pub fn abs_determinant(&self) -> Expr {
        match self.signature {
            Signature::Riemannian => self.determinant(),
            Signature::Lorentzian { .. } => self.determinant().neg(),
        }
    }

    /// Checks that the determinant is not identically zero and that its sign
    /// matches the signature tag at `n` sample points.
    pub fn validate(&self, n: usize, seed: u64) -> Result<()> {
        let det = self.determinant();
        if is_zero(&det, &self.chart)? == ZeroStatus::ProvablyZero {
            return Err(Error::SingularMetric("determinant simplifies to 0".into()));
        }
        let tape = Tape::compile(&[det], &self.chart.input_names())?;
        for p in self.chart.sample_points(n, seed)? {
            let d = tape.eval(&self.chart.inputs_at(&p))?[0];
            let ok = match self.signature {
                Signature::Riemannian => d > 0.0,
                Signature::Lorentzian { .. } => d < 0.0,
            };
            if !ok {
                return Err(Error::InvalidMetric(format!(
                    "determinant {:.6e} at {:?} contradicts signature {:?}",
                    d, p, self.signature
                )));
            }
        }
        Ok(())
    }
}

fn det_minor(m: &[Expr], n: usize, rows: &[usize], cols: &[usize]) -> Expr {
    match rows.len() {
        0 => Expr::one(),
        1 => m[rows[0] * n + cols[0]].clone(),
        2 => {
            let a = &m[rows[0] * n + cols[0]];
            let b = &m[rows[0] * n + cols[1]];
            let c = &m[rows[1] * n + cols[0]];
            let d = &m[rows[1] * n + cols[1]];
            a * d - b * c
        }
        _ => {
            let r0 = rows[0];
            let sub_rows = &rows[1..];
            let mut terms = Vec::new();
            for (k, &c) in cols.iter().enumerate() {
                let entry = &m[r0 * n + c];
                if entry.is_zero_literal() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det_minor(m, n, sub_rows, &sub_cols);
                let t = entry * &minor;
                terms.push(if k % 2 == 0 { t } else { t.neg() });
            }
            Expr::add(terms)
        }
    }
}
