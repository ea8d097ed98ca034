//! Canonical expression trees.
//!
//! Every `Expr` is built through the constructors in this file, which keep
//! the tree in a light canonical form: n-ary sums and products are flattened,
//! numeric constants are folded exactly, like terms and like bases are
//! collected, and children are sorted by [`canonical_cmp`]. Quotients never
//! appear as nodes; `a/b` is `a * b^(-1)`.
//!
//! Heavier rewriting (expansion, the Pythagorean identity) lives in
//! [`crate::symexpr::simplify`].

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for constants and exponents.
pub type Rational = BigRational;

/// Elementary functions. `sqrt` is not listed: it is stored as `x^(1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
        }
    }
}

/// Node payload. Read-only: new nodes are only made through the
/// canonicalizing constructors on [`Expr`].
#[derive(Debug)]
pub enum Kind {
    Const(Rational),
    Sym(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Rational),
    Func(Func, Expr),
}

#[derive(Debug)]
pub(crate) struct Node {
    kind: Kind,
    hash: u64,
    /// Bloom mask of the free symbols below this node.
    sym_mask: u64,
}

/// Immutable, shareable symbolic expression.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

fn rank(k: &Kind) -> u8 {
    match k {
        Kind::Const(_) => 0,
        Kind::Sym(_) => 1,
        Kind::Func(..) => 2,
        Kind::Pow(..) => 3,
        Kind::Mul(_) => 4,
        Kind::Add(_) => 5,
    }
}

pub(crate) fn sym_bit(name: &str) -> u64 {
    let mut h = DefaultHasher::new();
    name.hash(&mut h);
    1u64 << (h.finish() % 64)
}

impl Expr {
    fn from_kind(kind: Kind) -> Expr {
        let mut h = DefaultHasher::new();
        rank(&kind).hash(&mut h);
        let mut mask = 0u64;
        match &kind {
            Kind::Const(c) => c.hash(&mut h),
            Kind::Sym(s) => {
                s.hash(&mut h);
                mask = sym_bit(s);
            }
            Kind::Add(xs) | Kind::Mul(xs) => {
                xs.len().hash(&mut h);
                for x in xs {
                    x.0.hash.hash(&mut h);
                    mask |= x.0.sym_mask;
                }
            }
            Kind::Pow(b, e) => {
                b.0.hash.hash(&mut h);
                e.hash(&mut h);
                mask = b.0.sym_mask;
            }
            Kind::Func(f, a) => {
                f.hash(&mut h);
                a.0.hash.hash(&mut h);
                mask = a.0.sym_mask;
            }
        }
        Expr(Arc::new(Node {
            kind,
            hash: h.finish(),
            sym_mask: mask,
        }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub(crate) fn sym_mask(&self) -> u64 {
        self.0.sym_mask
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    // ---- leaves -------------------------------------------------------

    pub fn constant(c: Rational) -> Expr {
        Expr::from_kind(Kind::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::constant(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::from_kind(Kind::Sym(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.kind() {
            Kind::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self.kind() {
            Kind::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self.kind(), Kind::Const(c) if c.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self.kind(), Kind::Const(c) if c.is_one())
    }

    /// Cheap test whether `name` can occur in the tree (false means it does not).
    pub fn may_contain(&self, name: &str) -> bool {
        self.0.sym_mask & sym_bit(name) != 0
    }

    // ---- compound constructors -----------------------------------------

    pub fn add(terms: Vec<Expr>) -> Expr {
        build_add(terms)
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        build_mul(factors)
    }

    pub fn pow(base: Expr, exp: Rational) -> Expr {
        build_pow(base, exp)
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        build_pow(base, Rational::from_integer(BigInt::from(n)))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        build_func(f, arg)
    }

    pub fn neg(&self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self.clone()])
    }

    pub fn recip(&self) -> Expr {
        Expr::powi(self.clone(), -1)
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self.clone(), Rational::new(BigInt::from(1), BigInt::from(2)))
    }

    pub fn scale(&self, c: Rational) -> Expr {
        Expr::mul(vec![Expr::constant(c), self.clone()])
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self.clone())
    }
    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self.clone())
    }
    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self.clone())
    }
    pub fn log(&self) -> Expr {
        Expr::func(Func::Log, self.clone())
    }

    /// Split into `(coefficient, rest)` with `self == coefficient * rest`.
    pub fn split_coeff(&self) -> (Rational, Expr) {
        match self.kind() {
            Kind::Const(c) => (c.clone(), Expr::one()),
            Kind::Mul(fs) => match fs[0].kind() {
                Kind::Const(c) => {
                    let rest = if fs.len() == 2 {
                        fs[1].clone()
                    } else {
                        Expr::from_kind(Kind::Mul(fs[1..].to_vec()))
                    };
                    (c.clone(), rest)
                }
                _ => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Split into `(base, exponent)` with `self == base^exponent`.
    pub fn split_pow(&self) -> (Expr, Rational) {
        match self.kind() {
            Kind::Pow(b, e) => (b.clone(), e.clone()),
            _ => (self.clone(), Rational::one()),
        }
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            match e.kind() {
                Kind::Add(xs) | Kind::Mul(xs) => stack.extend(xs.iter().cloned()),
                Kind::Pow(b, _) => stack.push(b.clone()),
                Kind::Func(_, a) => stack.push(a.clone()),
                _ => {}
            }
        }
        seen.len()
    }

    /// Free symbols in lexicographic order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = std::collections::BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            match e.kind() {
                Kind::Sym(s) => {
                    out.insert(s.to_string());
                }
                Kind::Add(xs) | Kind::Mul(xs) => stack.extend(xs.iter().cloned()),
                Kind::Pow(b, _) => stack.push(b.clone()),
                Kind::Func(_, a) => stack.push(a.clone()),
                Kind::Const(_) => {}
            }
        }
        out.into_iter().collect()
    }
}

// ---- equality, hashing, ordering -----------------------------------------

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) => a == b,
            (Kind::Sym(a), Kind::Sym(b)) => a == b,
            (Kind::Add(a), Kind::Add(b)) | (Kind::Mul(a), Kind::Mul(b)) => a == b,
            (Kind::Pow(a, x), Kind::Pow(b, y)) => x == y && a == b,
            (Kind::Func(f, a), Kind::Func(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

/// Fixed total order used to sort the children of sums and products.
/// Symbols compare lexicographically.
pub fn canonical_cmp(a: &Expr, b: &Expr) -> Ordering {
    if Arc::ptr_eq(&a.0, &b.0) {
        return Ordering::Equal;
    }
    let (ra, rb) = (rank(a.kind()), rank(b.kind()));
    if ra != rb {
        return ra.cmp(&rb);
    }
    match (a.kind(), b.kind()) {
        (Kind::Const(x), Kind::Const(y)) => x.cmp(y),
        (Kind::Sym(x), Kind::Sym(y)) => x.cmp(y),
        (Kind::Func(f, x), Kind::Func(g, y)) => f.cmp(g).then_with(|| canonical_cmp(x, y)),
        (Kind::Pow(x, p), Kind::Pow(y, q)) => canonical_cmp(x, y).then_with(|| p.cmp(q)),
        (Kind::Add(xs), Kind::Add(ys)) | (Kind::Mul(xs), Kind::Mul(ys)) => {
            for (x, y) in xs.iter().zip(ys) {
                let o = canonical_cmp(x, y);
                if o != Ordering::Equal {
                    return o;
                }
            }
            xs.len().cmp(&ys.len())
        }
        _ => unreachable!("rank mismatch"),
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(self, other)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

// ---- canonical constructors ----------------------------------------------

/// Order used for terms of a sum: by the non-numeric part, then by coefficient.
fn term_cmp(a: &Expr, b: &Expr) -> Ordering {
    let (ca, ra) = a.split_coeff();
    let (cb, rb) = b.split_coeff();
    canonical_cmp(&ra, &rb).then_with(|| ca.cmp(&cb))
}

/// Order used for factors of a product: by base, then exponent.
fn factor_cmp(a: &Expr, b: &Expr) -> Ordering {
    let (ba, ea) = a.split_pow();
    let (bb, eb) = b.split_pow();
    canonical_cmp(&ba, &bb).then_with(|| ea.cmp(&eb))
}

fn build_add(terms: Vec<Expr>) -> Expr {
    let mut constant = Rational::zero();
    // Preserve first-seen order for determinism before the final sort.
    let mut order: Vec<Expr> = Vec::new();
    let mut coeffs: HashMap<Expr, Rational> = HashMap::new();

    let mut stack: Vec<Expr> = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        match t.kind() {
            Kind::Const(c) => constant += c,
            Kind::Add(xs) => {
                for x in xs.iter().rev() {
                    stack.push(x.clone());
                }
            }
            _ => {
                let (c, rest) = t.split_coeff();
                match coeffs.get_mut(&rest) {
                    Some(acc) => *acc += c,
                    None => {
                        order.push(rest.clone());
                        coeffs.insert(rest, c);
                    }
                }
            }
        }
    }

    let mut out: Vec<Expr> = Vec::with_capacity(order.len() + 1);
    for rest in order {
        let c = coeffs.remove(&rest).unwrap();
        if c.is_zero() {
            continue;
        }
        out.push(attach_coeff(c, rest));
    }
    out.sort_by(term_cmp);
    if !constant.is_zero() {
        out.insert(0, Expr::constant(constant));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::from_kind(Kind::Add(out)),
    }
}

/// `c * rest` where `rest` is already a canonical non-constant product or atom.
fn attach_coeff(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    if c.is_zero() {
        return Expr::zero();
    }
    match rest.kind() {
        Kind::Const(r) => Expr::constant(c * r),
        Kind::Mul(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::constant(c));
            v.extend(fs.iter().cloned());
            Expr::from_kind(Kind::Mul(v))
        }
        _ => Expr::from_kind(Kind::Mul(vec![Expr::constant(c), rest])),
    }
}

fn build_mul(factors: Vec<Expr>) -> Expr {
    let mut coeff = Rational::one();
    let mut order: Vec<Expr> = Vec::new();
    let mut exps: HashMap<Expr, Rational> = HashMap::new();
    let mut exp_args: Vec<Expr> = Vec::new();

    let mut stack: Vec<Expr> = factors;
    stack.reverse();
    while let Some(f) = stack.pop() {
        match f.kind() {
            Kind::Const(c) => {
                if c.is_zero() {
                    return Expr::zero();
                }
                coeff *= c;
            }
            Kind::Mul(xs) => {
                for x in xs.iter().rev() {
                    stack.push(x.clone());
                }
            }
            Kind::Func(Func::Exp, a) => exp_args.push(a.clone()),
            _ => {
                let (b, e) = f.split_pow();
                match exps.get_mut(&b) {
                    Some(acc) => *acc += e,
                    None => {
                        order.push(b.clone());
                        exps.insert(b, e);
                    }
                }
            }
        }
    }

    let mut out: Vec<Expr> = Vec::with_capacity(order.len() + 1);
    let mut again = false;
    for b in order {
        let e = exps.remove(&b).unwrap();
        if e.is_zero() {
            continue;
        }
        let p = if e.is_one() { b } else { build_pow(b, e) };
        match p.kind() {
            Kind::Const(c) => {
                if c.is_zero() {
                    return Expr::zero();
                }
                coeff *= c;
            }
            Kind::Mul(_) | Kind::Func(Func::Exp, _) => {
                again = true;
                out.push(p);
            }
            _ => out.push(p),
        }
    }
    if exp_args.len() == 1 {
        out.push(Expr::from_kind(Kind::Func(Func::Exp, exp_args.pop().unwrap())));
    } else if !exp_args.is_empty() {
        let e = build_func(Func::Exp, build_add(exp_args));
        if !matches!(e.kind(), Kind::Func(Func::Exp, _)) {
            again = true;
        }
        out.push(e);
    }
    if again {
        out.push(Expr::constant(coeff));
        return build_mul(out);
    }

    out.sort_by(factor_cmp);
    if coeff.is_zero() {
        return Expr::zero();
    }
    if out.is_empty() {
        return Expr::constant(coeff);
    }
    if coeff.is_one() && out.len() == 1 {
        return out.pop().unwrap();
    }
    if !coeff.is_one() {
        out.insert(0, Expr::constant(coeff));
    }
    Expr::from_kind(Kind::Mul(out))
}

/// Exact `n`-th root of a non-negative big integer, if it exists.
fn exact_root(x: &BigInt, n: u32) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) == *x {
        Some(r)
    } else {
        None
    }
}

fn const_pow(c: &Rational, e: &Rational) -> Option<Rational> {
    let p = e.numer();
    let q = e.denom();
    if c.is_zero() {
        return if p.is_positive() {
            Some(Rational::zero())
        } else {
            None
        };
    }
    let q32 = q.to_u32()?;
    let base = if q32 == 1 {
        c.clone()
    } else {
        if c.is_negative() {
            return None;
        }
        let rn = exact_root(c.numer(), q32)?;
        let rd = exact_root(c.denom(), q32)?;
        Rational::new(rn, rd)
    };
    let pi = p.to_i32()?;
    if pi.unsigned_abs() > 4096 {
        return None;
    }
    Some(num_traits::pow::Pow::pow(&base, pi))
}

fn build_pow(base: Expr, exp: Rational) -> Expr {
    if exp.is_zero() {
        return Expr::one();
    }
    if exp.is_one() {
        return base;
    }
    let is_int = exp.is_integer();
    match base.kind() {
        Kind::Const(c) => match const_pow(c, &exp) {
            Some(v) => Expr::constant(v),
            None => Expr::from_kind(Kind::Pow(base, exp)),
        },
        Kind::Pow(b, e) if is_int => build_pow(b.clone(), e * &exp),
        Kind::Mul(fs) if is_int => {
            let parts = fs.iter().map(|f| build_pow(f.clone(), exp.clone())).collect();
            build_mul(parts)
        }
        Kind::Func(Func::Exp, a) => {
            build_func(Func::Exp, build_mul(vec![Expr::constant(exp), a.clone()]))
        }
        _ => Expr::from_kind(Kind::Pow(base, exp)),
    }
}

/// Leading sign of an argument for parity normalization of odd/even functions.
fn has_negative_lead(e: &Expr) -> bool {
    match e.kind() {
        Kind::Const(c) => c.is_negative(),
        Kind::Mul(fs) => matches!(fs[0].kind(), Kind::Const(c) if c.is_negative()),
        _ => false,
    }
}

fn build_func(f: Func, arg: Expr) -> Expr {
    if let Kind::Const(c) = arg.kind() {
        if c.is_zero() {
            return match f {
                Func::Sin | Func::Tan | Func::Sinh => Expr::zero(),
                Func::Cos | Func::Cosh | Func::Exp => Expr::one(),
                Func::Log => Expr::from_kind(Kind::Func(f, arg)),
            };
        }
        if c.is_one() && f == Func::Log {
            return Expr::zero();
        }
    }
    match f {
        Func::Sin | Func::Tan | Func::Sinh if has_negative_lead(&arg) => {
            return build_func(f, arg.neg()).neg();
        }
        Func::Cos | Func::Cosh if has_negative_lead(&arg) => {
            return build_func(f, arg.neg());
        }
        Func::Log => {
            if let Kind::Func(Func::Exp, x) = arg.kind() {
                return x.clone();
            }
        }
        Func::Exp => return build_exp(arg),
        _ => {}
    }
    Expr::from_kind(Kind::Func(f, arg))
}

/// `exp(arg)`, pulling out `c*log(x)` terms of the argument as `x^c`.
fn build_exp(arg: Expr) -> Expr {
    let log_part = |t: &Expr| -> Option<(Rational, Expr)> {
        let (c, rest) = t.split_coeff();
        match rest.kind() {
            Kind::Func(Func::Log, x) => Some((c, x.clone())),
            _ => None,
        }
    };
    let terms: Vec<Expr> = match arg.kind() {
        Kind::Add(xs) => xs.clone(),
        _ => vec![arg.clone()],
    };
    let mut powers = Vec::new();
    let mut rest = Vec::new();
    for t in terms {
        match log_part(&t) {
            Some((c, x)) => powers.push(build_pow(x, c)),
            None => rest.push(t),
        }
    }
    if powers.is_empty() {
        return Expr::from_kind(Kind::Func(Func::Exp, arg));
    }
    let rest = build_add(rest);
    if !rest.is_zero_literal() {
        powers.push(Expr::from_kind(Kind::Func(Func::Exp, rest)));
    }
    build_mul(powers)
}

// ---- operator sugar --------------------------------------------------------

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs.neg()])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs.recip()])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl<'a> std::ops::Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(vec![self.clone(), rhs.clone()])
    }
}

impl<'a> std::ops::Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::add(vec![self.clone(), rhs.neg()])
    }
}

impl<'a> std::ops::Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(vec![self.clone(), rhs.clone()])
    }
}

impl<'a> std::ops::Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::mul(vec![self.clone(), rhs.recip()])
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}
