//! Floating-point evaluation.
//!
//! [`evaluate`] walks the DAG once per call with a pointer-keyed memo, so
//! shared subtrees are evaluated once. For repeated evaluation of the same
//! expressions at many points, [`Tape`] flattens a set of expressions into a
//! straight-line program over a fixed variable order.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::expr::{Expr, Func, Kind, Rational};

/// Values for the free symbols of an expression.
pub type Binding = HashMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

fn rat_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn pow_real(base: f64, e: &Rational) -> Result<f64, EvalError> {
    if base == 0.0 && e.is_negative() {
        return Err(EvalError::Domain("zero raised to a negative power".into()));
    }
    if e.is_integer() {
        if let Some(n) = e.numer().to_i32() {
            return Ok(base.powi(n));
        }
    }
    let ef = rat_f64(e);
    if base < 0.0 {
        // Real odd roots of negative numbers.
        let q_odd = e.denom() % 2u32 == 1u32.into();
        if !q_odd {
            return Err(EvalError::Domain(format!("even root of negative value {}", base)));
        }
        let mag = (-base).powf(ef);
        let p_odd = e.numer() % 2 != 0.into();
        return Ok(if p_odd { -mag } else { mag });
    }
    Ok(base.powf(ef))
}

pub(crate) fn apply_func(f: Func, x: f64) -> Result<f64, EvalError> {
    if f == Func::Log && x <= 0.0 {
        return Err(EvalError::Domain(format!("log of non-positive value {}", x)));
    }
    Ok(f.apply(x))
}

fn check(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain("non-finite intermediate value".into()))
    }
}

/// Evaluate `e` under `b`.
pub fn evaluate(e: &Expr, b: &Binding) -> Result<f64, EvalError> {
    let mut memo = HashMap::new();
    eval_memo(e, b, &mut memo)
}

fn eval_memo(e: &Expr, b: &Binding, memo: &mut HashMap<usize, f64>) -> Result<f64, EvalError> {
    if let Some(v) = memo.get(&e.ptr_id()) {
        return Ok(*v);
    }
    let v = match e.kind() {
        Kind::Const(c) => rat_f64(c),
        Kind::Sym(s) => *b.get(&**s).ok_or_else(|| EvalError::Unbound(s.to_string()))?,
        Kind::Add(xs) => {
            let mut acc = 0.0;
            for x in xs {
                acc += eval_memo(x, b, memo)?;
            }
            acc
        }
        Kind::Mul(xs) => {
            let mut acc = 1.0;
            for x in xs {
                acc *= eval_memo(x, b, memo)?;
            }
            acc
        }
        Kind::Pow(base, p) => pow_real(eval_memo(base, b, memo)?, p)?,
        Kind::Func(f, a) => apply_func(*f, eval_memo(a, b, memo)?)?,
    };
    let v = check(v)?;
    memo.insert(e.ptr_id(), v);
    Ok(v)
}

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Var(usize),
    Add(Vec<usize>),
    Mul(Vec<usize>),
    Pow(usize, Rational),
    Func(Func, usize),
}

/// Straight-line program evaluating several expressions over fixed inputs.
#[derive(Debug, Clone)]
pub struct Tape {
    vars: Vec<String>,
    ops: Vec<Op>,
    outputs: Vec<usize>,
}

impl Tape {
    /// Compile `exprs` with inputs in the order of `vars`. Symbols not listed
    /// in `vars` produce [`EvalError::Unbound`].
    pub fn compile(exprs: &[Expr], vars: &[String]) -> Result<Tape, EvalError> {
        let index: HashMap<&str, usize> =
            vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut ops = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut by_value: HashMap<Expr, usize> = HashMap::new();
        let mut outputs = Vec::with_capacity(exprs.len());
        for e in exprs {
            outputs.push(Self::emit(e, &index, &mut ops, &mut slot, &mut by_value)?);
        }
        Ok(Tape {
            vars: vars.to_vec(),
            ops,
            outputs,
        })
    }

    fn emit(
        e: &Expr,
        index: &HashMap<&str, usize>,
        ops: &mut Vec<Op>,
        slot: &mut HashMap<usize, usize>,
        by_value: &mut HashMap<Expr, usize>,
    ) -> Result<usize, EvalError> {
        // Iterative post-order to stay clear of deep recursion on large trees.
        let mut stack: Vec<(Expr, bool)> = vec![(e.clone(), false)];
        while let Some((node, ready)) = stack.pop() {
            if slot.contains_key(&node.ptr_id()) {
                continue;
            }
            // Structurally equal subtrees built separately share one register.
            if let Some(&k) = by_value.get(&node) {
                slot.insert(node.ptr_id(), k);
                continue;
            }
            let children: Vec<Expr> = match node.kind() {
                Kind::Add(xs) | Kind::Mul(xs) => xs.clone(),
                Kind::Pow(b, _) => vec![b.clone()],
                Kind::Func(_, a) => vec![a.clone()],
                _ => vec![],
            };
            if !ready {
                stack.push((node.clone(), true));
                for c in children.iter().rev() {
                    if !slot.contains_key(&c.ptr_id()) {
                        stack.push((c.clone(), false));
                    }
                }
                continue;
            }
            let s = |x: &Expr| slot[&x.ptr_id()];
            let op = match node.kind() {
                Kind::Const(c) => Op::Const(rat_f64(c)),
                Kind::Sym(name) => Op::Var(
                    *index
                        .get(&**name)
                        .ok_or_else(|| EvalError::Unbound(name.to_string()))?,
                ),
                Kind::Add(xs) => Op::Add(xs.iter().map(s).collect()),
                Kind::Mul(xs) => Op::Mul(xs.iter().map(s).collect()),
                Kind::Pow(b, p) => Op::Pow(s(b), p.clone()),
                Kind::Func(f, a) => Op::Func(*f, s(a)),
            };
            ops.push(op);
            slot.insert(node.ptr_id(), ops.len() - 1);
            by_value.insert(node.clone(), ops.len() - 1);
        }
        Ok(slot[&e.ptr_id()])
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Evaluate all outputs at `inputs` (same order as `vars`).
    pub fn eval(&self, inputs: &[f64]) -> Result<Vec<f64>, EvalError> {
        let mut reg = vec![0.0f64; self.ops.len()];
        for (i, op) in self.ops.iter().enumerate() {
            let v = match op {
                Op::Const(c) => *c,
                Op::Var(k) => inputs[*k],
                Op::Add(xs) => xs.iter().map(|&j| reg[j]).sum(),
                Op::Mul(xs) => xs.iter().map(|&j| reg[j]).product(),
                Op::Pow(b, p) => pow_real(reg[*b], p)?,
                Op::Func(f, a) => apply_func(*f, reg[*a])?,
            };
            reg[i] = check(v)?;
        }
        Ok(self.outputs.iter().map(|&o| reg[o]).collect())
    }

    /// Evaluate with inputs looked up by name.
    pub fn eval_binding(&self, b: &Binding) -> Result<Vec<f64>, EvalError> {
        let inputs = self
            .vars
            .iter()
            .map(|v| b.get(v).copied().ok_or_else(|| EvalError::Unbound(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        self.eval(&inputs)
    }
}
