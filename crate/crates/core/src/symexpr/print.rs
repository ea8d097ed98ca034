//! Text form of canonical expressions. The output is accepted by
//! [`crate::symexpr::parse`] and reparses to a structurally equal tree.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::expr::{Expr, Kind, Rational};

fn write_rational(out: &mut String, c: &Rational) {
    if c.is_integer() {
        write!(out, "{}", c.numer()).unwrap();
    } else {
        write!(out, "{}/{}", c.numer(), c.denom()).unwrap();
    }
}

fn write_exponent(out: &mut String, e: &Rational) {
    if e.is_integer() && !e.is_negative() {
        write!(out, "^{}", e.numer()).unwrap();
    } else {
        out.push_str("^(");
        write_rational(out, e);
        out.push(')');
    }
}

/// Write `e` as a factor of a product: sums get parentheses.
fn write_factor(out: &mut String, e: &Expr) {
    match e.kind() {
        Kind::Add(_) => {
            out.push('(');
            write_expr(out, e);
            out.push(')');
        }
        _ => write_expr(out, e),
    }
}

fn write_pow_base(out: &mut String, b: &Expr) {
    let plain = match b.kind() {
        Kind::Sym(_) | Kind::Func(..) => true,
        Kind::Const(c) => c.is_integer() && !c.is_negative(),
        _ => false,
    };
    if plain {
        write_expr(out, b);
    } else {
        out.push('(');
        write_expr(out, b);
        out.push(')');
    }
}

fn write_product(out: &mut String, factors: &[Expr]) {
    let (coeff, rest) = match factors[0].kind() {
        Kind::Const(c) => (Some(c), &factors[1..]),
        _ => (None, factors),
    };
    if let Some(c) = coeff {
        if (-c.clone()).is_one() {
            out.push('-');
        } else {
            write_rational(out, c);
            out.push('*');
        }
    }
    for (i, f) in rest.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write_factor(out, f);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e.kind() {
        Kind::Const(c) => write_rational(out, c),
        Kind::Sym(s) => out.push_str(s),
        Kind::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a);
            out.push(')');
        }
        Kind::Pow(b, p) => {
            write_pow_base(out, b);
            write_exponent(out, p);
        }
        Kind::Mul(fs) => write_product(out, fs),
        Kind::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (c, _) = t.split_coeff();
                if i == 0 {
                    write_expr(out, t);
                } else if c.is_negative() {
                    out.push_str(" - ");
                    write_factor(out, &t.neg());
                } else {
                    out.push_str(" + ");
                    write_expr(out, t);
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}
