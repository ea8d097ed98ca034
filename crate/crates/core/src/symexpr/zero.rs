//! Three-way zero test: symbolic first, then sampling on a chart.

use serde::{Deserialize, Serialize};

use super::eval::Tape;
use super::expr::{Expr, Kind};
use super::simplify::simplify;
use crate::error::Result;
use crate::geometry::Chart;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroStatus {
    ProvablyZero,
    NumericallyZero,
    Nonzero,
}

impl ZeroStatus {
    pub fn is_zero(self) -> bool {
        !matches!(self, ZeroStatus::Nonzero)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroTest {
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
    /// Expressions with more DAG nodes than this skip `simplify` and go
    /// straight to sampling.
    pub simplify_node_limit: usize,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            samples: 20,
            seed: 42,
            rel_tol: 1e-9,
            simplify_node_limit: 4000,
        }
    }
}

/// Zero test with default settings (20 points, seed 42, tolerance 1e-9).
pub fn is_zero(e: &Expr, chart: &Chart) -> Result<ZeroStatus> {
    is_zero_with(e, chart, ZeroTest::default())
}

/// A sample passes when `|e| < rel_tol * (1 + scale)`, where `scale` is the
/// sum of magnitudes of the top-level terms of `e` at that point: the size of
/// the quantities that are supposed to cancel.
pub fn is_zero_with(e: &Expr, chart: &Chart, cfg: ZeroTest) -> Result<ZeroStatus> {
    let points = chart.sample_points(cfg.samples, cfg.seed)?;
    if e.is_zero_literal() {
        return Ok(ZeroStatus::ProvablyZero);
    }
    let e = if e.dag_size() <= cfg.simplify_node_limit {
        let s = simplify(e);
        if s.is_zero_literal() {
            return Ok(ZeroStatus::ProvablyZero);
        }
        s
    } else {
        e.clone()
    };
    let terms: Vec<Expr> = match e.kind() {
        Kind::Add(ts) => ts.clone(),
        _ => vec![],
    };
    let mut outs = vec![e.clone()];
    outs.extend(terms.iter().cloned());
    let tape = Tape::compile(&outs, &chart.input_names())?;
    for p in &points {
        let v = tape.eval(&chart.inputs_at(p))?;
        let scale: f64 = v[1..].iter().map(|x| x.abs()).sum();
        if v[0].abs() >= cfg.rel_tol * (1.0 + scale) {
            return Ok(ZeroStatus::Nonzero);
        }
    }
    Ok(ZeroStatus::NumericallyZero)
}
