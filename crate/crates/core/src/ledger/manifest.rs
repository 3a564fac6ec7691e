//! Claim manifest text format, version 1.
//!
//! ```text
//! version 1
//! claim <id>
//! desc <text>
//! cite <text>
//! tol <real>
//! param <var>=<real> [<var>=<real> ...]      repeatable, one set per line
//! let <name> <quantity>                      named term for `combo`
//! lhs <quantity>
//! rhs <quantity>
//! also <quantity>                            optional extra right sides
//! end
//! ```
//!
//! Quantities:
//!
//! ```text
//! int1d <var> <lower> <upper|inf> [split <p1> <p2> ...] :: <expr>
//! int2d <outer-var> <inner-var> <outer-domain> <inner-domain> [order inner-first|outer-first] :: <expr>
//! series odd|altodd <s> [scale <expr>]
//! closed :: <expr>
//! moment <k> <p>                              integer or parameter name each
//! combo <c1> * <name> + <c2> * <name> ...
//! ```
//!
//! Domains in `int2d` are written `[a,b]` or `[a,inf)`, optionally followed
//! by `:p1,p2` split points. Coefficients and scales are expressions
//! without whitespace. Blank lines and lines starting with `#` are ignored.

use std::collections::HashSet;
use std::fmt::Write;

use crate::expr::{parse, Bindings, Expr, Var};
use crate::quad::{DomainKind, IntegrationDomain};
use crate::quad2d::IterationOrder;
use crate::series::{SeriesFamily, SeriesSpec};

use super::{Claim, LedgerError, MomentArg, Quantity, DEFAULT_TOLERANCE};

pub const MANIFEST_VERSION: u32 = 1;

fn syntax(line: usize, message: impl Into<String>) -> LedgerError {
    LedgerError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct ClaimBuilder {
    id: String,
    line: usize,
    description: String,
    citation: String,
    tolerance: Option<f64>,
    params: Vec<Bindings<f64>>,
    lets: Vec<(String, Quantity)>,
    lhs: Option<Quantity>,
    rhs: Option<Quantity>,
    also: Vec<Quantity>,
}

impl ClaimBuilder {
    fn finish(self, line: usize) -> Result<Claim, LedgerError> {
        let lhs = self
            .lhs
            .ok_or_else(|| syntax(line, format!("claim {} has no lhs", self.id)))?;
        let rhs = self
            .rhs
            .ok_or_else(|| syntax(line, format!("claim {} has no rhs", self.id)))?;
        let claim = Claim {
            id: self.id,
            description: self.description,
            params: self.params,
            lhs,
            rhs,
            also: self.also,
            tolerance: self.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            citation: self.citation,
        };
        claim.validate()?;
        Ok(claim)
    }
}

/// Parses manifest text into claims, in file order.
pub fn load_manifest(text: &str) -> Result<Vec<Claim>, LedgerError> {
    let mut claims = Vec::new();
    let mut ids = HashSet::new();
    let mut current: Option<ClaimBuilder> = None;
    let mut seen_claim = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (word, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((w, r)) => (w, r.trim()),
            None => (trimmed, ""),
        };
        match (word, current.as_mut()) {
            ("version", None) => {
                if seen_claim {
                    return Err(syntax(line, "version must precede all claims"));
                }
                let v: u32 = rest
                    .parse()
                    .map_err(|_| syntax(line, "version needs an integer"))?;
                if v != MANIFEST_VERSION {
                    return Err(syntax(line, format!("unsupported manifest version {v}")));
                }
            }
            ("claim", None) => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(syntax(line, "claim needs a single id"));
                }
                if !ids.insert(rest.to_string()) {
                    return Err(LedgerError::DuplicateId(rest.to_string()));
                }
                seen_claim = true;
                current = Some(ClaimBuilder {
                    id: rest.to_string(),
                    line,
                    ..Default::default()
                });
            }
            ("claim", Some(b)) => {
                return Err(syntax(line, format!("claim {} is missing `end`", b.id)));
            }
            ("end", Some(_)) => {
                let b = current.take().expect("open claim");
                claims.push(b.finish(line)?);
            }
            (_, None) => return Err(syntax(line, format!("unexpected {word:?} outside a claim"))),
            ("desc", Some(b)) => b.description = rest.to_string(),
            ("cite", Some(b)) => b.citation = rest.to_string(),
            ("tol", Some(b)) => {
                b.tolerance = Some(
                    rest.parse()
                        .map_err(|_| syntax(line, format!("bad tolerance {rest:?}")))?,
                );
            }
            ("param", Some(b)) => b.params.push(parse_param(rest, line)?),
            ("let", Some(b)) => {
                let (name, q) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(line, "let needs a name and a quantity"))?;
                if b.lets.iter().any(|(n, _)| n == name) {
                    return Err(syntax(line, format!("{name:?} already defined")));
                }
                let q = parse_quantity(q.trim(), line, &b.lets)?;
                b.lets.push((name.to_string(), q));
            }
            ("lhs", Some(b)) => set_once(
                &mut b.lhs,
                parse_quantity(rest, line, &b.lets)?,
                "lhs",
                line,
            )?,
            ("rhs", Some(b)) => set_once(
                &mut b.rhs,
                parse_quantity(rest, line, &b.lets)?,
                "rhs",
                line,
            )?,
            ("also", Some(b)) => b.also.push(parse_quantity(rest, line, &b.lets)?),
            (other, Some(_)) => return Err(syntax(line, format!("unknown directive {other:?}"))),
        }
    }
    if let Some(b) = current {
        return Err(syntax(b.line, format!("claim {} is missing `end`", b.id)));
    }
    Ok(claims)
}

fn set_once(
    slot: &mut Option<Quantity>,
    q: Quantity,
    what: &str,
    line: usize,
) -> Result<(), LedgerError> {
    if slot.is_some() {
        return Err(syntax(line, format!("{what} given twice")));
    }
    *slot = Some(q);
    Ok(())
}

fn parse_var(tok: &str, line: usize) -> Result<Var, LedgerError> {
    Var::from_name(tok).ok_or_else(|| syntax(line, format!("expected x, y or z, got {tok:?}")))
}

fn parse_real(tok: &str, line: usize) -> Result<f64, LedgerError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(syntax(
            line,
            format!("expected a finite number, got {tok:?}"),
        )),
    }
}

fn parse_expr(src: &str, line: usize) -> Result<Expr, LedgerError> {
    parse(src.trim()).map_err(|error| LedgerError::Expr { line, error })
}

fn parse_param(rest: &str, line: usize) -> Result<Bindings<f64>, LedgerError> {
    let mut b = Bindings::new();
    for item in rest.split_whitespace() {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected var=value, got {item:?}")))?;
        let var = parse_var(name, line)?;
        if b.get(var).is_some() {
            return Err(syntax(line, format!("{var} bound twice")));
        }
        b.set(var, parse_real(value, line)?);
    }
    if b.iter().next().is_none() {
        return Err(syntax(line, "param needs at least one binding"));
    }
    Ok(b)
}

fn domain_error(line: usize) -> impl Fn(crate::quad::QuadError) -> LedgerError {
    move |e| syntax(line, e.to_string())
}

/// `[a,b]`, `[a,inf)`, each optionally followed by `:p1,p2,...`.
fn parse_domain(tok: &str, line: usize) -> Result<IntegrationDomain<f64>, LedgerError> {
    let (interval, splits) = match tok.split_once(':') {
        Some((i, s)) => (i, Some(s)),
        None => (tok, None),
    };
    let bad = || {
        syntax(
            line,
            format!("bad domain {tok:?}, expected [a,b] or [a,inf)"),
        )
    };
    let body = interval.strip_prefix('[').ok_or_else(bad)?;
    let domain = if let Some(b) = body.strip_suffix(')') {
        let (lower, upper) = b.split_once(',').ok_or_else(bad)?;
        if upper != "inf" {
            return Err(bad());
        }
        IntegrationDomain::semi_infinite(parse_real(lower, line)?)
    } else {
        let b = body.strip_suffix(']').ok_or_else(bad)?;
        let (lower, upper) = b.split_once(',').ok_or_else(bad)?;
        IntegrationDomain::finite(parse_real(lower, line)?, parse_real(upper, line)?)
    }
    .map_err(domain_error(line))?;
    match splits {
        None => Ok(domain),
        Some(s) => {
            let points = s
                .split(',')
                .map(|p| parse_real(p, line))
                .collect::<Result<Vec<_>, _>>()?;
            domain.with_splits(points).map_err(domain_error(line))
        }
    }
}

fn parse_moment_arg(tok: &str, line: usize) -> Result<MomentArg, LedgerError> {
    if let Some(v) = Var::from_name(tok) {
        return Ok(MomentArg::Param(v));
    }
    tok.parse().map(MomentArg::Literal).map_err(|_| {
        syntax(
            line,
            format!("moment argument must be an integer or variable, got {tok:?}"),
        )
    })
}

fn parse_quantity(
    text: &str,
    line: usize,
    lets: &[(String, Quantity)],
) -> Result<Quantity, LedgerError> {
    let (head, expr_src) = match text.split_once("::") {
        Some((h, e)) => (h.trim(), Some(e)),
        None => (text.trim(), None),
    };
    let words: Vec<&str> = head.split_whitespace().collect();
    let Some((&kind, args)) = words.split_first() else {
        return Err(syntax(line, "missing quantity"));
    };
    let need_expr =
        || expr_src.ok_or_else(|| syntax(line, format!("{kind} needs `:: <expression>`")));
    let no_expr = || match expr_src {
        Some(_) => Err(syntax(line, format!("{kind} takes no `::` expression"))),
        None => Ok(()),
    };
    match kind {
        "int1d" => {
            let integrand = parse_expr(need_expr()?, line)?;
            let [var, lower, upper, rest @ ..] = args else {
                return Err(syntax(line, "int1d needs <var> <lower> <upper>"));
            };
            let variable = parse_var(var, line)?;
            let lower = parse_real(lower, line)?;
            let kind = if *upper == "inf" {
                DomainKind::SemiInfinite { lower }
            } else {
                DomainKind::Finite {
                    lower,
                    upper: parse_real(upper, line)?,
                }
            };
            let splits = match rest {
                [] => Vec::new(),
                ["split", points @ ..] if !points.is_empty() => points
                    .iter()
                    .map(|p| parse_real(p, line))
                    .collect::<Result<_, _>>()?,
                _ => return Err(syntax(line, "expected `split <p1> ...` after the bounds")),
            };
            let domain = IntegrationDomain::new(kind, splits).map_err(domain_error(line))?;
            Ok(Quantity::Integral1D {
                integrand,
                variable,
                domain,
            })
        }
        "int2d" => {
            let integrand = parse_expr(need_expr()?, line)?;
            let [outer, inner, od, id, rest @ ..] = args else {
                return Err(syntax(
                    line,
                    "int2d needs <outer> <inner> <outer-domain> <inner-domain>",
                ));
            };
            let order = match rest {
                [] | ["order", "inner-first"] => IterationOrder::InnerFirst,
                ["order", "outer-first"] => IterationOrder::OuterFirst,
                _ => return Err(syntax(line, "expected `order inner-first|outer-first`")),
            };
            Ok(Quantity::Integral2D {
                integrand,
                outer: parse_var(outer, line)?,
                inner: parse_var(inner, line)?,
                outer_domain: parse_domain(od, line)?,
                inner_domain: parse_domain(id, line)?,
                order,
            })
        }
        "series" => {
            no_expr()?;
            let (family, s, rest) = match args {
                [f, s, rest @ ..] => (*f, *s, rest),
                _ => return Err(syntax(line, "series needs <odd|altodd> <s>")),
            };
            let family = match family {
                "odd" => SeriesFamily::OddPower,
                "altodd" => SeriesFamily::AlternatingOddPower,
                other => return Err(syntax(line, format!("unknown series family {other:?}"))),
            };
            let s: u32 = s.parse().map_err(|_| {
                syntax(
                    line,
                    format!("series exponent must be an integer, got {s:?}"),
                )
            })?;
            let spec = SeriesSpec::new(family, s).map_err(|e| syntax(line, e.to_string()))?;
            let scale = match rest {
                [] => Expr::Const(1.0),
                ["scale", e] => parse_expr(e, line)?,
                _ => return Err(syntax(line, "expected `scale <expr>`")),
            };
            Ok(Quantity::Series { spec, scale })
        }
        "closed" => {
            if !args.is_empty() {
                return Err(syntax(line, "closed takes only `:: <expression>`"));
            }
            Ok(Quantity::ClosedForm(parse_expr(need_expr()?, line)?))
        }
        "moment" => {
            no_expr()?;
            let [k, p] = args else {
                return Err(syntax(line, "moment needs <k> <p>"));
            };
            Ok(Quantity::Moment {
                k: parse_moment_arg(k, line)?,
                p: parse_moment_arg(p, line)?,
            })
        }
        "combo" => {
            no_expr()?;
            let mut terms = Vec::new();
            let mut rest = args;
            loop {
                let [coef, "*", name, tail @ ..] = rest else {
                    return Err(syntax(line, "expected `<coefficient> * <name>`"));
                };
                let q = lets
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, q)| q.clone())
                    .ok_or_else(|| {
                        syntax(line, format!("{name:?} is not defined by a prior let"))
                    })?;
                terms.push((parse_expr(coef, line)?, q));
                match tail {
                    [] => break,
                    ["+", more @ ..] => rest = more,
                    _ => return Err(syntax(line, "expected `+` between combo terms")),
                }
            }
            Ok(Quantity::LinearCombo(terms))
        }
        other => Err(syntax(line, format!("unknown quantity kind {other:?}"))),
    }
}

fn fmt_domain(d: &IntegrationDomain<f64>) -> String {
    let mut s = match d.upper() {
        Some(u) => format!("[{},{}]", d.lower(), u),
        None => format!("[{},inf)", d.lower()),
    };
    if !d.split_points().is_empty() {
        let pts: Vec<String> = d.split_points().iter().map(f64::to_string).collect();
        write!(s, ":{}", pts.join(",")).expect("write to String");
    }
    s
}

fn fmt_moment_arg(a: &MomentArg) -> String {
    match a {
        MomentArg::Literal(n) => n.to_string(),
        MomentArg::Param(v) => v.name().to_string(),
    }
}

/// Writes `q`; combination terms are emitted as `let` lines into `lets`.
fn fmt_quantity(q: &Quantity, lets: &mut Vec<String>, counter: &mut usize) -> String {
    match q {
        Quantity::Integral1D {
            integrand,
            variable,
            domain,
        } => {
            let upper = domain.upper().map_or("inf".to_string(), |u| u.to_string());
            let mut s = format!("int1d {variable} {} {upper}", domain.lower());
            if !domain.split_points().is_empty() {
                s.push_str(" split");
                for p in domain.split_points() {
                    write!(s, " {p}").expect("write to String");
                }
            }
            write!(s, " :: {integrand}").expect("write to String");
            s
        }
        Quantity::Integral2D {
            integrand,
            outer,
            inner,
            outer_domain,
            inner_domain,
            order,
        } => {
            let order = match order {
                IterationOrder::InnerFirst => "inner-first",
                IterationOrder::OuterFirst => "outer-first",
            };
            format!(
                "int2d {outer} {inner} {} {} order {order} :: {integrand}",
                fmt_domain(outer_domain),
                fmt_domain(inner_domain)
            )
        }
        Quantity::Series { spec, scale } => {
            let family = match spec.family() {
                SeriesFamily::OddPower => "odd",
                SeriesFamily::AlternatingOddPower => "altodd",
            };
            format!("series {family} {} scale {scale}", spec.exponent())
        }
        Quantity::ClosedForm(e) => format!("closed :: {e}"),
        Quantity::Moment { k, p } => format!("moment {} {}", fmt_moment_arg(k), fmt_moment_arg(p)),
        Quantity::LinearCombo(terms) => {
            let parts: Vec<String> = terms
                .iter()
                .map(|(c, q)| {
                    *counter += 1;
                    let name = format!("t{counter}");
                    let body = fmt_quantity(q, lets, counter);
                    lets.push(format!("let {name} {body}"));
                    format!("{c} * {name}")
                })
                .collect();
            format!("combo {}", parts.join(" + "))
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Serialises claims so that [`load_manifest`] reads them back equal.
pub fn to_manifest(claims: &[Claim]) -> String {
    let mut out = format!("version {MANIFEST_VERSION}\n");
    for c in claims {
        let mut lets = Vec::new();
        let mut counter = 0;
        let lhs = fmt_quantity(&c.lhs, &mut lets, &mut counter);
        let rhs = fmt_quantity(&c.rhs, &mut lets, &mut counter);
        let also: Vec<String> = c
            .also
            .iter()
            .map(|q| fmt_quantity(q, &mut lets, &mut counter))
            .collect();
        writeln!(out, "\nclaim {}", c.id).ok();
        if !c.description.is_empty() {
            writeln!(out, "desc {}", one_line(&c.description)).ok();
        }
        if !c.citation.is_empty() {
            writeln!(out, "cite {}", one_line(&c.citation)).ok();
        }
        for set in &c.params {
            let items: Vec<String> = set.iter().map(|(v, x)| format!("{v}={x}")).collect();
            writeln!(out, "param {}", items.join(" ")).ok();
        }
        for l in &lets {
            writeln!(out, "{l}").ok();
        }
        writeln!(out, "lhs {lhs}").ok();
        writeln!(out, "rhs {rhs}").ok();
        for a in &also {
            writeln!(out, "also {a}").ok();
        }
        writeln!(out, "tol {}", c.tolerance).ok();
        writeln!(out, "end").ok();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
version 1
# a comment
claim A-1
desc log kernel
cite unit interval
lhs int1d y 0 1 :: ln(y)/(1-y^2)
rhs closed :: -pi^2/8
tol 1e-9
end

claim A-2
param z=0.5
param z=2
let a int1d x 0 inf :: 1/((1+x^2)*(x+z))
let b int2d x y [0,inf) [0,1]:0.5 order outer-first :: x*y
lhs combo 2 * a + -1/2 * b
rhs series altodd 3 scale pi
also moment 1 z
end
";

    #[test]
    fn parses_all_quantity_kinds() {
        let claims = load_manifest(SMALL).unwrap();
        assert_eq!(claims.len(), 2);
        assert_eq!(claims[0].tolerance, 1e-9);
        assert_eq!(claims[1].tolerance, DEFAULT_TOLERANCE);
        assert_eq!(claims[1].params.len(), 2);
        match &claims[1].lhs {
            Quantity::LinearCombo(terms) => {
                assert_eq!(terms.len(), 2);
                match &terms[1].1 {
                    Quantity::Integral2D {
                        order,
                        inner_domain,
                        ..
                    } => {
                        assert_eq!(*order, IterationOrder::OuterFirst);
                        assert_eq!(inner_domain.split_points(), &[0.5]);
                    }
                    other => panic!("{other:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let claims = load_manifest(SMALL).unwrap();
        let text = to_manifest(&claims);
        assert_eq!(load_manifest(&text).unwrap(), claims);
    }

    #[test]
    fn duplicate_id() {
        let text = "claim A\nlhs closed :: 1\nrhs closed :: 1\nend\nclaim A\nlhs closed :: 1\nrhs closed :: 1\nend\n";
        assert_eq!(
            load_manifest(text),
            Err(LedgerError::DuplicateId("A".into()))
        );
    }

    #[test]
    fn malformed_expression_carries_inner_position() {
        let text = "claim A\nlhs closed :: 1 + * 2\nrhs closed :: 1\nend\n";
        match load_manifest(text) {
            Err(LedgerError::Expr { line, error }) => {
                assert_eq!(line, 2);
                assert_eq!(error.position, 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors_have_line_numbers() {
        let cases: &[(&str, usize)] = &[
            ("claim A\nlhs closed :: 1\nend\n", 3),
            ("claim A\nlhs closed :: 1\nrhs closed :: 1\n", 1),
            ("lhs closed :: 1\n", 1),
            ("claim A\nlhs int1d y 1 0 :: y\nrhs closed :: 1\nend\n", 2),
            ("claim A\nlhs series odd 1\nrhs closed :: 1\nend\n", 2),
            ("claim A\nlhs combo 2 * nope\nrhs closed :: 1\nend\n", 2),
            ("claim A\nfoo bar\nend\n", 2),
            (
                "claim A\nlhs int2d x y [0,1) [0,1] :: x\nrhs closed :: 1\nend\n",
                2,
            ),
            ("version 2\n", 1),
        ];
        for &(text, want) in cases {
            match load_manifest(text) {
                Err(LedgerError::Syntax { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn undeclared_variable_rejected() {
        let text = "claim A\nlhs int1d y 0 1 :: x*y\nrhs closed :: 1\nend\n";
        assert!(matches!(
            load_manifest(text),
            Err(LedgerError::InvalidClaim { .. })
        ));
    }
}
