use std::f64::consts::PI;

use super::lexer::{tokenize, Token, TokenKind};
use super::{BinaryOp, Expr, Func, ParseError, Var};

/// Parses integrand text into an [`Expr`].
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(
            ParseError::new(t.position, format!("unexpected {:?}", t.text))
                .expecting("operator or end of input"),
        );
    }
    Ok(e)
}

struct Parser<'t, 's> {
    tokens: &'t [Token<'s>],
    pos: usize,
    end: usize,
}

impl<'s> Parser<'_, 's> {
    fn peek(&self) -> Option<&Token<'s>> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn bump(&mut self) -> Option<Token<'s>> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token<'s>, ParseError> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.bump().expect("peeked")),
            Some(t) => Err(
                ParseError::new(t.position, format!("unexpected {:?}", t.text))
                    .expecting(kind.describe()),
            ),
            None => {
                Err(ParseError::new(self.end, "unexpected end of input").expecting(kind.describe()))
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinaryOp::Add,
                Some(TokenKind::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinaryOp::Mul,
                Some(TokenKind::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_kind() == Some(TokenKind::Minus) {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek_kind() == Some(TokenKind::Caret) {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        let Some(tok) = self.bump() else {
            return Err(ParseError::new(at, "unexpected end of input").expecting("operand"));
        };
        match tok.kind {
            TokenKind::Number => tok
                .text
                .parse::<f64>()
                .map(Expr::Const)
                .map_err(|_| ParseError::new(at, format!("invalid number {:?}", tok.text))),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Identifier => {
                if tok.text == "pi" {
                    return Ok(Expr::Const(PI));
                }
                if let Some(v) = Var::from_name(tok.text) {
                    return Ok(Expr::Var(v));
                }
                if let Some(f) = Func::from_name(tok.text) {
                    self.expect(TokenKind::LParen)?;
                    let arg = self.expr()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(Expr::call(f, arg));
                }
                Err(
                    ParseError::new(at, format!("unknown identifier {:?}", tok.text))
                        .expecting("x, y, z, pi, ln, exp, sqrt or abs"),
                )
            }
            _ => {
                Err(ParseError::new(at, format!("unexpected {:?}", tok.text)).expecting("operand"))
            }
        }
    }
}
