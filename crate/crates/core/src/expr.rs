//! Scalar expression language.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' primary)*            left associative
//! primary := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func    := exp | ln | abs | sqrt | min | max | norm2
//! ```
//!
//! Variables are `x1..xn` for real fields. Complex fields on C^n use
//! `x1..xn` for real parts and `y1..yn` for imaginary parts, laid out as
//! `(x1..xn, y1..yn)` in R^{2n}.

use std::fmt;

use crate::error::{Error, EvalError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStyle {
    /// `x1..x{dim}`.
    Real { dim: usize },
    /// `x1..x{n}` followed by `y1..y{n}`.
    Complex { n: usize },
}

impl VarStyle {
    pub fn dim(self) -> usize {
        match self {
            VarStyle::Real { dim } => dim,
            VarStyle::Complex { n } => 2 * n,
        }
    }

    fn resolve(self, name: &str) -> Option<usize> {
        let (prefix, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return None;
        }
        let index: usize = digits.parse().ok()?;
        match (self, prefix) {
            (VarStyle::Real { dim }, "x") if index <= dim => Some(index - 1),
            (VarStyle::Complex { n }, "x") if index <= n => Some(index - 1),
            (VarStyle::Complex { n }, "y") if index <= n => Some(n + index - 1),
            _ => None,
        }
    }

    fn name(self, index: usize) -> String {
        match self {
            VarStyle::Complex { n } if index >= n => format!("y{}", index - n + 1),
            _ => format!("x{}", index + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Abs,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaryOp {
    Min,
    Max,
    Norm2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Nary(NaryOp, Vec<Expr>),
}

/// Parses `source` as a real expression over `x1..x{dimension}`.
pub fn parse_expr(source: &str, dimension: usize) -> Result<Expr> {
    parse_with(source, VarStyle::Real { dim: dimension })
}

/// Parses `source` as an expression over `x1..xn, y1..yn` (C^n realified).
pub fn parse_complex_expr(source: &str, n: usize) -> Result<Expr> {
    parse_with(source, VarStyle::Complex { n })
}

pub fn parse_with(source: &str, style: VarStyle) -> Result<Expr> {
    if style.dim() == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        style,
        end: source.len(),
    };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some(tok) => Err(Error::Syntax {
            offset: tok.offset,
            message: format!("unexpected {}", tok.kind),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Sym(char),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Number(v) => write!(f, "number {v}"),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                } else {
                    return Err(Error::Syntax {
                        offset: i,
                        message: "malformed exponent".into(),
                    });
                }
            }
            let value: f64 = src[start..i].parse().map_err(|_| Error::Syntax {
                offset: start,
                message: "malformed number".into(),
            })?;
            out.push(Token {
                kind: TokenKind::Number(value),
                offset: start,
            });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident(src[start..i].to_string()),
                offset: start,
            });
        } else if b"+-*/^(),".contains(&c) {
            out.push(Token {
                kind: TokenKind::Sym(c as char),
                offset: i,
            });
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(Error::Syntax {
                offset: i,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    style: VarStyle,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_sym(&self) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Sym(c),
                ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expect(&mut self, sym: char) -> Result<()> {
        if self.peek_sym() == Some(sym) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expected `{sym}`"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_sym() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut lhs = self.primary()?;
        while self.peek_sym() == Some('^') {
            self.pos += 1;
            let rhs = self.primary()?;
            lhs = Expr::Binary(BinOp::Pow, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax {
                offset,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Number(v) => Ok(Expr::Const(v)),
            TokenKind::Sym('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if self.peek_sym() == Some('(') {
                    self.call(&name, offset)
                } else {
                    self.style
                        .resolve(&name)
                        .map(Expr::Var)
                        .ok_or_else(|| self.variable_error(name, offset))
                }
            }
            kind => Err(Error::Syntax {
                offset,
                message: format!("unexpected {kind}"),
            }),
        }
    }

    fn variable_error(&self, name: String, offset: usize) -> Error {
        let looks_like_var = matches!(name.as_bytes().first(), Some(b'x' | b'y'))
            && name.len() > 1
            && name[1..].bytes().all(|b| b.is_ascii_digit());
        if looks_like_var {
            Error::UnknownVariable {
                name,
                offset,
                dim: self.style.dim(),
            }
        } else {
            Error::Syntax {
                offset,
                message: format!("unknown identifier `{name}`"),
            }
        }
    }

    fn call(&mut self, name: &str, offset: usize) -> Result<Expr> {
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.peek_sym() == Some(',') {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(')')?;
        let unary = |f: Func, mut args: Vec<Expr>| {
            if args.len() != 1 {
                return Err(Error::Syntax {
                    offset,
                    message: format!("`{name}` takes exactly one argument"),
                });
            }
            Ok(Expr::Call(f, Box::new(args.pop().unwrap())))
        };
        match name {
            "exp" => unary(Func::Exp, args),
            "ln" => unary(Func::Ln, args),
            "abs" => unary(Func::Abs, args),
            "sqrt" => unary(Func::Sqrt, args),
            "min" => Ok(Expr::Nary(NaryOp::Min, args)),
            "max" => Ok(Expr::Nary(NaryOp::Max, args)),
            "norm2" => Ok(Expr::Nary(NaryOp::Norm2, args)),
            _ => Err(Error::Syntax {
                offset,
                message: format!("unknown function `{name}`"),
            }),
        }
    }
}

fn check(op: &'static str, arg: f64, value: f64) -> std::result::Result<f64, EvalError> {
    if value.is_nan() {
        Err(EvalError::NonReal { op, arg })
    } else {
        Ok(value)
    }
}

impl Expr {
    /// Evaluates at `x`. `-inf` is a legal value; `+inf` and NaN are errors.
    pub fn eval(&self, x: &[f64]) -> std::result::Result<f64, EvalError> {
        let v = self.eval_raw(x)?;
        if v.is_nan() || v == f64::INFINITY {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }

    fn eval_raw(&self, x: &[f64]) -> std::result::Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval_raw(x)?,
            Expr::Call(f, e) => {
                let a = e.eval_raw(x)?;
                match f {
                    Func::Exp => check("exp", a, a.exp())?,
                    Func::Abs => check("abs", a, a.abs())?,
                    Func::Ln => {
                        if a < 0.0 {
                            return Err(EvalError::NonReal { op: "ln", arg: a });
                        }
                        check("ln", a, a.ln())?
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::NonReal { op: "sqrt", arg: a });
                        }
                        check("sqrt", a, a.sqrt())?
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval_raw(x)?;
                let b = r.eval_raw(x)?;
                match op {
                    BinOp::Add => check("+", a, a + b)?,
                    BinOp::Sub => check("-", a, a - b)?,
                    BinOp::Mul => check("*", a, a * b)?,
                    BinOp::Div => check("/", a, a / b)?,
                    BinOp::Pow => check("^", a, a.powf(b))?,
                }
            }
            Expr::Nary(op, args) => {
                let mut acc = match op {
                    NaryOp::Min => f64::INFINITY,
                    NaryOp::Max => f64::NEG_INFINITY,
                    NaryOp::Norm2 => 0.0,
                };
                for arg in args {
                    let v = arg.eval_raw(x)?;
                    if v.is_nan() {
                        return Err(EvalError::NonReal { op: "min/max", arg: v });
                    }
                    acc = match op {
                        NaryOp::Min => acc.min(v),
                        NaryOp::Max => acc.max(v),
                        NaryOp::Norm2 => acc + v * v,
                    };
                }
                if *op == NaryOp::Norm2 {
                    acc.sqrt()
                } else {
                    acc
                }
            }
        })
    }

    /// Largest variable index referenced plus one (0 for constants).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(e) | Expr::Call(_, e) => e.arity(),
            Expr::Binary(_, l, r) => l.arity().max(r.arity()),
            Expr::Nary(_, args) => args.iter().map(Expr::arity).max().unwrap_or(0),
        }
    }

    /// Fully parenthesised source text that parses back to `self`.
    pub fn to_source(&self, style: VarStyle) -> String {
        let mut out = String::new();
        self.write_source(style, &mut out);
        out
    }

    fn write_source(&self, style: VarStyle, out: &mut String) {
        match self {
            Expr::Const(c) => {
                if c.is_infinite() {
                    out.push_str("1e999");
                } else {
                    out.push_str(&format!("{c:?}"));
                }
            }
            Expr::Var(i) => out.push_str(&style.name(*i)),
            Expr::Neg(e) => {
                out.push_str("(-");
                e.write_source(style, out);
                out.push(')');
            }
            Expr::Call(f, e) => {
                out.push_str(match f {
                    Func::Exp => "exp(",
                    Func::Ln => "ln(",
                    Func::Abs => "abs(",
                    Func::Sqrt => "sqrt(",
                });
                e.write_source(style, out);
                out.push(')');
            }
            Expr::Binary(op, l, r) => {
                out.push('(');
                l.write_source(style, out);
                out.push_str(match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    BinOp::Div => " / ",
                    BinOp::Pow => "^",
                });
                r.write_source(style, out);
                out.push(')');
            }
            Expr::Nary(op, args) => {
                out.push_str(match op {
                    NaryOp::Min => "min(",
                    NaryOp::Max => "max(",
                    NaryOp::Norm2 => "norm2(",
                });
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    a.write_source(style, out);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dim = self.arity().max(1);
        f.write_str(&self.to_source(VarStyle::Real { dim }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(i: usize) -> Box<Expr> {
        Box::new(Expr::Var(i))
    }

    #[test]
    fn negated_square_binds_power_first() {
        let e = parse_expr("-x1^2", 2).unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Binary(BinOp::Pow, var(0), Box::new(Expr::Const(2.0)))))
        );
    }

    #[test]
    fn single_variable() {
        assert_eq!(parse_expr("x1", 1).unwrap(), Expr::Var(0));
    }

    #[test]
    fn nary_min() {
        match parse_expr("min(1-x1, x1)", 1).unwrap() {
            Expr::Nary(NaryOp::Min, args) => assert_eq!(args.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let x = [0.0];
        assert_eq!(parse_expr("2^3^2", 1).unwrap().eval(&x).unwrap(), 64.0);
        assert_eq!(parse_expr("8/4/2", 1).unwrap().eval(&x).unwrap(), 1.0);
        assert_eq!(parse_expr("1-2-3", 1).unwrap().eval(&x).unwrap(), -4.0);
        assert_eq!(parse_expr("2+3*4", 1).unwrap().eval(&x).unwrap(), 14.0);
        assert_eq!(parse_expr("-2^2", 1).unwrap().eval(&x).unwrap(), -4.0);
        assert_eq!(parse_expr("2*-3", 1).unwrap().eval(&x).unwrap(), -6.0);
    }

    #[test]
    fn eval_examples() {
        let f = parse_expr("-x1^2-x2^2", 2).unwrap();
        assert_eq!(f.eval(&[1.0, 1.0]).unwrap(), -2.0);
        assert_eq!(parse_expr("ln(abs(x1))", 1).unwrap().eval(&[1.0]).unwrap(), 0.0);
        assert_eq!(parse_expr("exp(x1)", 1).unwrap().eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(parse_expr("norm2(3, 4)", 1).unwrap().eval(&[0.0]).unwrap(), 5.0);
    }

    #[test]
    fn negative_infinity_is_a_value() {
        let f = parse_expr("min(ln(x1), 0) + 1", 1).unwrap();
        assert_eq!(f.eval(&[0.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn non_real_is_an_error() {
        let f = parse_expr("ln(x1)", 1).unwrap();
        assert!(matches!(f.eval(&[-1.0]), Err(EvalError::NonReal { op: "ln", .. })));
        let g = parse_expr("sqrt(x1)", 1).unwrap();
        assert!(matches!(g.eval(&[-1.0]), Err(EvalError::NonReal { .. })));
        let h = parse_expr("-ln(x1)", 1).unwrap();
        assert_eq!(h.eval(&[0.0]), Err(EvalError::NonFinite));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_expr("x1 + * 2", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_expr("(x1", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("x1 $", 1), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expr("foo(x1)", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("exp(x1, x1)", 1), Err(Error::Syntax { .. })));
    }

    #[test]
    fn variable_beyond_dimension() {
        match parse_expr("x1 + x3", 2) {
            Err(Error::UnknownVariable { name, offset, dim }) => {
                assert_eq!((name.as_str(), offset, dim), ("x3", 5, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expr("y1", 1).is_err());
        assert_eq!(parse_complex_expr("x1^2-y1^2", 1).unwrap().arity(), 2);
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "-x1^2",
            "min(1-x1, x1)",
            "exp(-x1*x2)/2",
            "2^3^2",
            "norm2(x1, x2, 1e-7)",
        ] {
            let e = parse_expr(src, 2).unwrap();
            let printed = e.to_source(VarStyle::Real { dim: 2 });
            assert_eq!(parse_expr(&printed, 2).unwrap(), e, "{printed}");
        }
    }
}
