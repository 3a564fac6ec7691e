use std::f64::consts::PI;
use std::fmt::Write;

use super::Expr;

/// Fully parenthesised canonical text: every unary and binary node is
/// wrapped in parentheses, so `parse(render(e)) == e` for any tree the
/// parser can produce. `π` is written as `pi`.
///
/// Constants are written with the shortest decimal that round-trips. A
/// negative constant (which the parser never produces) comes out as a
/// parenthesised negation.
pub fn render(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_const(out: &mut String, v: f64) {
    if v == PI {
        out.push_str("pi");
    } else if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        out.push_str("(-");
        write_const(out, -v);
        out.push(')');
    } else {
        write!(out, "{v}").expect("write to String");
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Const(v) => write_const(out, *v),
        Expr::Var(v) => out.push_str(v.name()),
        Expr::Neg(inner) => {
            out.push_str("(-");
            write_expr(out, inner);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            out.push('(');
            write_expr(out, l);
            out.push(op.symbol());
            write_expr(out, r);
            out.push(')');
        }
        Expr::Call(f, arg) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, arg);
            out.push(')');
        }
    }
}
