//! Symbolic partial derivatives.

use std::collections::HashMap;

use num_traits::One;

use super::expr::{sym_bit, Expr, Func, Kind};

/// Partial derivative of `e` with respect to the symbol `var`; every other
/// symbol is held constant.
pub fn differentiate(e: &Expr, var: &str) -> Expr {
    let mut d = Differentiator::new(var);
    d.run(e)
}

/// Differentiates many expressions against one variable, sharing a memo so
/// common subtrees are differentiated once.
pub struct Differentiator {
    var: String,
    bit: u64,
    memo: HashMap<usize, (Expr, Expr)>,
}

impl Differentiator {
    pub fn new(var: &str) -> Self {
        Differentiator {
            var: var.to_string(),
            bit: sym_bit(var),
            memo: HashMap::new(),
        }
    }

    pub fn run(&mut self, e: &Expr) -> Expr {
        if e.sym_mask() & self.bit == 0 {
            return Expr::zero();
        }
        if let Some((_, d)) = self.memo.get(&e.ptr_id()) {
            return d.clone();
        }
        let d = match e.kind() {
            Kind::Const(_) => Expr::zero(),
            Kind::Sym(s) => {
                if **s == *self.var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Kind::Add(xs) => Expr::add(xs.iter().map(|x| self.run(x)).collect()),
            Kind::Mul(xs) => {
                let mut terms = Vec::new();
                for i in 0..xs.len() {
                    let di = self.run(&xs[i]);
                    if di.is_zero_literal() {
                        continue;
                    }
                    let mut fs: Vec<Expr> = Vec::with_capacity(xs.len());
                    for (j, x) in xs.iter().enumerate() {
                        if j != i {
                            fs.push(x.clone());
                        }
                    }
                    fs.push(di);
                    terms.push(Expr::mul(fs));
                }
                Expr::add(terms)
            }
            Kind::Pow(b, p) => {
                let db = self.run(b);
                let p1 = p - super::expr::Rational::one();
                Expr::mul(vec![
                    Expr::constant(p.clone()),
                    Expr::pow(b.clone(), p1),
                    db,
                ])
            }
            Kind::Func(f, a) => {
                let da = self.run(a);
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().neg(),
                    Func::Tan => Expr::powi(a.cos(), -2),
                    Func::Exp => e.clone(),
                    Func::Log => a.recip(),
                    Func::Sinh => Expr::func(Func::Cosh, a.clone()),
                    Func::Cosh => Expr::func(Func::Sinh, a.clone()),
                };
                Expr::mul(vec![outer, da])
            }
        };
        // Keep `e` alive alongside its derivative so the pointer key stays valid.
        self.memo.insert(e.ptr_id(), (e.clone(), d.clone()));
        d
    }
}
