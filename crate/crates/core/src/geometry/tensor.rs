use serde::{Deserialize, Serialize};

use super::chart::Chart;
use crate::error::{Error, Result};
use crate::symexpr::{Expr, Tape};

/// Index position of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    Up,
    Down,
}

/// Tensor with symbolic components, stored row-major over its slots.
#[derive(Debug, Clone)]
pub struct TensorField {
    valence: Vec<Slot>,
    dim: usize,
    data: Vec<Expr>,
    chart: Chart,
}

impl TensorField {
    pub fn new(valence: Vec<Slot>, chart: &Chart, data: Vec<Expr>) -> Result<TensorField> {
        let dim = chart.dim();
        let expected = dim.pow(valence.len() as u32);
        if data.len() != expected {
            return Err(Error::Dimension {
                expected: format!("{} components", expected),
                got: data.len(),
            });
        }
        Ok(TensorField {
            valence,
            dim,
            data,
            chart: chart.clone(),
        })
    }

    pub fn zeros(valence: Vec<Slot>, chart: &Chart) -> TensorField {
        let n = chart.dim().pow(valence.len() as u32);
        TensorField {
            valence,
            dim: chart.dim(),
            data: vec![Expr::zero(); n],
            chart: chart.clone(),
        }
    }

    /// Build from a function of the multi-index.
    pub fn from_fn<F>(valence: Vec<Slot>, chart: &Chart, mut f: F) -> TensorField
    where
        F: FnMut(&[usize]) -> Expr,
    {
        let mut t = TensorField::zeros(valence, chart);
        let mut idx = vec![0; t.rank()];
        for k in 0..t.data.len() {
            t.unflatten(k, &mut idx);
            t.data[k] = f(&idx);
        }
        t
    }

    pub fn scalar(chart: &Chart, e: Expr) -> TensorField {
        TensorField {
            valence: vec![],
            dim: chart.dim(),
            data: vec![e],
            chart: chart.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> &[Slot] {
        &self.valence
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.data
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    fn unflatten(&self, mut k: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = k % self.dim;
            k /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], e: Expr) {
        let k = self.flat(idx);
        self.data[k] = e;
    }

    /// True when swapping slots `a` and `b` leaves every component
    /// structurally unchanged.
    pub fn is_symmetric(&self, a: usize, b: usize) -> bool {
        self.check_pair(a, b, |x, y| x == y)
    }

    /// True when swapping slots `a` and `b` negates every component
    /// structurally.
    pub fn is_antisymmetric(&self, a: usize, b: usize) -> bool {
        self.check_pair(a, b, |x, y| *x == y.neg())
    }

    fn check_pair(&self, a: usize, b: usize, same: impl Fn(&Expr, &Expr) -> bool) -> bool {
        let mut idx = vec![0; self.rank()];
        for k in 0..self.data.len() {
            self.unflatten(k, &mut idx);
            let mut j = idx.clone();
            j.swap(a, b);
            if !same(&self.data[k], self.get(&j)) {
                return false;
            }
        }
        true
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> TensorField {
        TensorField {
            valence: self.valence.clone(),
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
            chart: self.chart.clone(),
        }
    }

    /// Componentwise difference; valences must agree.
    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        if self.valence != other.valence || self.dim != other.dim {
            return Err(Error::Dimension {
                expected: format!("valence {:?}", self.valence),
                got: other.rank(),
            });
        }
        Ok(TensorField {
            valence: self.valence.clone(),
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            chart: self.chart.clone(),
        })
    }

    /// Largest component magnitude over `n` quasi-random chart points.
    pub fn max_abs(&self, n: usize, seed: u64) -> Result<f64> {
        sample_max_abs(&self.data, &self.chart, n, seed)
    }
}

/// Largest magnitude of any of `exprs` over `n` quasi-random chart points.
pub fn sample_max_abs(exprs: &[Expr], chart: &Chart, n: usize, seed: u64) -> Result<f64> {
    let tape = Tape::compile(exprs, &chart.input_names())?;
    let mut worst: f64 = 0.0;
    for p in chart.sample_points(n, seed)? {
        for v in tape.eval(&chart.inputs_at(&p))? {
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}
