//! Heavier rewriting on top of the constructor canonical form.
//!
//! One pass rebuilds the tree bottom-up and
//! - distributes products over sums (bounded by `expand_limit` result terms),
//! - expands small positive integer powers of sums,
//! - replaces `c*M*sin(x)^2 + c*M*cos(x)^2` by `c*M`, and
//!   `c*M*cosh(x)^2 - c*M*sinh(x)^2` by `c*M`.
//!
//! Passes repeat until the tree stops changing, so the result is a fixed point
//! and `simplify` is idempotent. The rewriting is incomplete on purpose;
//! semantic zero tests fall back to sampling (see [`super::zero`]).

use std::collections::{HashMap, HashSet};

use num_traits::ToPrimitive;

use super::expr::{Expr, Func, Kind, Rational};

#[derive(Debug, Clone, Copy)]
pub struct SimplifyOptions {
    /// Largest number of terms a single distribution may produce.
    pub expand_limit: usize,
    /// Upper bound on the number of rebuild passes.
    pub max_passes: usize,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions {
            expand_limit: 256,
            max_passes: 12,
        }
    }
}

pub fn simplify(e: &Expr) -> Expr {
    simplify_with(e, SimplifyOptions::default())
}

pub fn simplify_with(e: &Expr, opts: SimplifyOptions) -> Expr {
    let mut cur = e.clone();
    for _ in 0..opts.max_passes {
        let mut pass = Pass {
            opts,
            memo: HashMap::new(),
        };
        let next = pass.run(&cur);
        if next == cur {
            return next;
        }
        cur = next;
    }
    cur
}

struct Pass {
    opts: SimplifyOptions,
    memo: HashMap<usize, (Expr, Expr)>,
}

impl Pass {
    fn run(&mut self, e: &Expr) -> Expr {
        if let Some((_, s)) = self.memo.get(&e.ptr_id()) {
            return s.clone();
        }
        let out = match e.kind() {
            Kind::Const(_) | Kind::Sym(_) => e.clone(),
            Kind::Add(xs) => {
                let parts: Vec<Expr> = xs.iter().map(|x| self.run(x)).collect();
                pythagorean(Expr::add(parts))
            }
            Kind::Mul(xs) => {
                let parts: Vec<Expr> = xs.iter().map(|x| self.run(x)).collect();
                self.distribute(parts)
            }
            Kind::Pow(b, p) => {
                let b = self.run(b);
                self.expand_pow(b, p)
            }
            Kind::Func(f, a) => Expr::func(*f, self.run(a)),
        };
        self.memo.insert(e.ptr_id(), (e.clone(), out.clone()));
        out
    }

    fn distribute(&self, factors: Vec<Expr>) -> Expr {
        let (sums, rest): (Vec<Expr>, Vec<Expr>) =
            factors.into_iter().partition(|f| matches!(f.kind(), Kind::Add(_)));
        if sums.is_empty() {
            return Expr::mul(rest);
        }
        let mut count: usize = 1;
        for s in &sums {
            if let Kind::Add(ts) = s.kind() {
                count = count.saturating_mul(ts.len());
            }
        }
        if count > self.opts.expand_limit {
            let mut all = rest;
            all.extend(sums);
            return Expr::mul(all);
        }
        let mut acc: Vec<Expr> = vec![Expr::mul(rest)];
        for s in sums {
            let ts = match s.kind() {
                Kind::Add(ts) => ts.clone(),
                _ => unreachable!(),
            };
            let mut next = Vec::with_capacity(acc.len() * ts.len());
            for a in &acc {
                for t in &ts {
                    next.push(Expr::mul(vec![a.clone(), t.clone()]));
                }
            }
            acc = next;
        }
        pythagorean(Expr::add(acc))
    }

    fn expand_pow(&self, b: Expr, p: &Rational) -> Expr {
        let n = match (p.is_integer(), p.numer().to_usize()) {
            (true, Some(n)) if n >= 2 => n,
            _ => return Expr::pow(b, p.clone()),
        };
        let len = match b.kind() {
            Kind::Add(ts) => ts.len(),
            _ => return Expr::pow(b, p.clone()),
        };
        let count = (len as f64).powi(n as i32);
        if count > self.opts.expand_limit as f64 {
            return Expr::pow(b, p.clone());
        }
        let mut acc = b.clone();
        for _ in 1..n {
            acc = self.distribute(vec![acc, b.clone()]);
        }
        acc
    }
}

/// Split a term into its coefficient and the multiset of `(base, exponent)` factors.
fn factor_map(t: &Expr) -> (Rational, Vec<(Expr, Rational)>) {
    let (c, rest) = t.split_coeff();
    let fs = match rest.kind() {
        Kind::Mul(xs) => xs.iter().map(|x| x.split_pow()).collect(),
        Kind::Const(_) => vec![],
        _ => vec![rest.split_pow()],
    };
    (c, fs)
}

fn rebuild(c: &Rational, fs: &[(Expr, Rational)]) -> Expr {
    let mut v = vec![Expr::constant(c.clone())];
    for (b, e) in fs {
        v.push(Expr::pow(b.clone(), e.clone()));
    }
    Expr::mul(v)
}

/// Replace `(f, k)` by `(f, k-2)` and add `(g, 2)`; returns the rebuilt term.
fn swap_square(c: &Rational, fs: &[(Expr, Rational)], idx: usize, g: Expr, sign: i64) -> Expr {
    let mut v: Vec<(Expr, Rational)> = fs.to_vec();
    let two = Rational::from_integer(2.into());
    v[idx].1 = &v[idx].1 - &two;
    v.push((g, two));
    let c = c * Rational::from_integer(sign.into());
    rebuild(&c, &v)
}

fn reduced(c: &Rational, fs: &[(Expr, Rational)], idx: usize) -> Expr {
    let mut v: Vec<(Expr, Rational)> = fs.to_vec();
    v[idx].1 = &v[idx].1 - Rational::from_integer(2.into());
    rebuild(c, &v)
}

/// Apply `sin^2 + cos^2 = 1` and `cosh^2 - sinh^2 = 1` to the terms of a sum.
fn pythagorean(e: Expr) -> Expr {
    let terms = match e.kind() {
        Kind::Add(ts) => ts.clone(),
        _ => return e,
    };
    let mut present: HashMap<Expr, usize> = HashMap::new();
    for (i, t) in terms.iter().enumerate() {
        present.insert(t.clone(), i);
    }
    let mut consumed: HashSet<usize> = HashSet::new();
    let mut out: Vec<Option<Expr>> = terms.iter().cloned().map(Some).collect();
    let two = Rational::from_integer(2.into());
    for (i, t) in terms.iter().enumerate() {
        if consumed.contains(&i) {
            continue;
        }
        let (c, fs) = factor_map(t);
        for (k, (b, p)) in fs.iter().enumerate() {
            if !(p.is_integer() && *p >= two) {
                continue;
            }
            let partner = match b.kind() {
                Kind::Func(Func::Sin, a) => swap_square(&c, &fs, k, a.cos(), 1),
                Kind::Func(Func::Cosh, a) => {
                    swap_square(&c, &fs, k, Expr::func(Func::Sinh, a.clone()), -1)
                }
                _ => continue,
            };
            if let Some(&j) = present.get(&partner) {
                if j != i && !consumed.contains(&j) {
                    consumed.insert(i);
                    consumed.insert(j);
                    out[i] = Some(reduced(&c, &fs, k));
                    out[j] = None;
                    break;
                }
            }
        }
    }
    if consumed.is_empty() {
        return e;
    }
    let out: Vec<Expr> = out.into_iter().flatten().collect();
    let next = Expr::add(out);
    if next == e {
        e
    } else {
        pythagorean(next)
    }
}
