//! Scalar expression DSL used for metric components, structure components and
//! warping functions.
//!
//! Grammar: `+ - * / ^` with standard precedence (`^` right-associative and
//! binding tighter than unary minus), parentheses, one-argument function
//! application for `sin cos tan exp log sqrt sinh cosh`, decimal literals and
//! declared variable names. Parsed expressions are immutable and evaluation
//! is pure, so they are safe to share across threads.

use crate::jet::Jet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    const SYNTHETIC: Span = Span { start: 0, end: 0 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug)]
enum Node {
    Number(f64),
    Var { index: usize, name: Arc<str> },
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Integer exponent, evaluated by repeated multiplication.
    PowInt(Box<Expr>, i32),
    /// General exponent, evaluated as exp(b*log(a)).
    Pow(Box<Expr>, Box<Expr>),
    Apply(Func, Box<Expr>),
}

#[derive(Clone, Debug)]
struct Expr {
    node: Node,
    span: Span,
}

/// A parsed scalar expression over declared variables.
#[derive(Clone, Debug)]
pub struct ScalarExpr {
    root: Arc<Expr>,
    /// Number of variables the expression was parsed against (0 for
    /// combinator-built constants, which work in any arity).
    arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdent { offset: usize, name: String },
    #[error("`{name}` expects 1 argument, got {got} (at byte {offset})")]
    Arity { offset: usize, name: String, got: usize },
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{op} of non-positive value {value:.6e} in `{snippet}` (bytes {start}..{end})")]
    Domain { op: &'static str, value: f64, snippet: String, start: usize, end: usize },
    #[error("division by zero in `{snippet}` (bytes {start}..{end})")]
    DivByZero { snippet: String, start: usize, end: usize },
    #[error("non-finite result in `{snippet}` (bytes {start}..{end})")]
    NonFinite { snippet: String, start: usize, end: usize },
    #[error("expression expects {expected} variables, got {got}")]
    VarCount { expected: usize, got: usize },
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                break;
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => { lx.pos += 1; Tok::Plus }
                b'-' => { lx.pos += 1; Tok::Minus }
                b'*' => { lx.pos += 1; Tok::Star }
                b'/' => { lx.pos += 1; Tok::Slash }
                b'^' => { lx.pos += 1; Tok::Caret }
                b'(' => { lx.pos += 1; Tok::LParen }
                b')' => { lx.pos += 1; Tok::RParen }
                b',' => { lx.pos += 1; Tok::Comma }
                b'0'..=b'9' => lx.number()?,
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => lx.ident(),
                other => {
                    return Err(ParseError::Syntax {
                        offset: start,
                        msg: format!("unexpected character `{}`", other as char),
                    })
                }
            };
            out.push((tok, Span::new(start, lx.pos)));
        }
        Ok(out)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `e` belongs to an identifier following the number; back off.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map(Tok::Num).map_err(|_| ParseError::Syntax {
            offset: start,
            msg: format!("invalid number literal `{text}`"),
        })
    }

    fn ident(&mut self) -> Tok {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    vars: &'a [&'a str],
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, Span)> {
        self.toks.get(self.pos)
    }

    fn next_tok(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Span, ParseError> {
        match self.next_tok() {
            Some((t, s)) if t == want => Ok(s),
            Some((t, s)) => Err(ParseError::Syntax {
                offset: s.start,
                msg: format!("expected {what}, found {t:?}"),
            }),
            None => Err(ParseError::Syntax {
                offset: self.src_len,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some((Tok::Plus, _)) => BinOp::Add,
                Some((Tok::Minus, _)) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            lhs = Expr { node: Node::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some((Tok::Star, _)) => BinOp::Mul,
                Some((Tok::Slash, _)) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            lhs = Expr { node: Node::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some((Tok::Minus, s)) = self.peek() {
            let start = s.start;
            self.pos += 1;
            let inner = self.unary()?;
            let span = Span::new(start, inner.span.end);
            return Ok(Expr { node: Node::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.pos += 1;
            // Right-associative; exponent may carry a unary minus.
            let exp = self.unary()?;
            let span = Span::new(base.span.start, exp.span.end);
            let node = match integer_literal(&exp) {
                Some(n) => Node::PowInt(Box::new(base), n),
                None => Node::Pow(Box::new(base), Box::new(exp)),
            };
            return Ok(Expr { node, span });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.next_tok() {
            Some((Tok::Num(v), span)) => Ok(Expr { node: Node::Number(v), span }),
            Some((Tok::LParen, span)) => {
                let inner = self.sum()?;
                let close = self.expect(Tok::RParen, "`)`")?;
                Ok(Expr { node: inner.node, span: Span::new(span.start, close.end) })
            }
            Some((Tok::Ident(name), span)) => self.ident_expr(name, span),
            Some((t, s)) => Err(ParseError::Syntax {
                offset: s.start,
                msg: format!("expected a value, found {t:?}"),
            }),
            None => Err(ParseError::Syntax {
                offset: self.src_len,
                msg: "expected a value, found end of input".into(),
            }),
        }
    }

    fn ident_expr(&mut self, name: String, span: Span) -> Result<Expr, ParseError> {
        let is_call = matches!(self.peek(), Some((Tok::LParen, _)));
        if is_call {
            self.pos += 1;
            let mut args = vec![self.sum()?];
            while let Some((Tok::Comma, _)) = self.peek() {
                self.pos += 1;
                args.push(self.sum()?);
            }
            let close = self.expect(Tok::RParen, "`)`")?;
            let func = Func::from_name(&name).ok_or(ParseError::UnknownIdent {
                offset: span.start,
                name: name.clone(),
            })?;
            if args.len() != 1 {
                return Err(ParseError::Arity { offset: span.start, name, got: args.len() });
            }
            let arg = args.pop().unwrap();
            return Ok(Expr {
                node: Node::Apply(func, Box::new(arg)),
                span: Span::new(span.start, close.end),
            });
        }
        match self.vars.iter().position(|v| *v == name) {
            Some(index) => Ok(Expr {
                node: Node::Var { index, name: Arc::from(name.as_str()) },
                span,
            }),
            None => Err(ParseError::UnknownIdent { offset: span.start, name }),
        }
    }
}

fn integer_literal(e: &Expr) -> Option<i32> {
    match &e.node {
        Node::Number(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => Some(*v as i32),
        Node::Neg(inner) => integer_literal(inner).map(|n| -n),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Evaluation and printing
// ---------------------------------------------------------------------------

impl ScalarExpr {
    /// Parse `src` against the declared variable names.
    pub fn parse(src: &str, vars: &[&str]) -> Result<ScalarExpr, ParseError> {
        let toks = Lexer::tokens(src)?;
        if toks.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut p = Parser { toks, pos: 0, vars, src_len: src.len() };
        let root = p.sum()?;
        if let Some((t, s)) = p.peek() {
            return Err(ParseError::Syntax {
                offset: s.start,
                msg: format!("unexpected trailing {t:?}"),
            });
        }
        Ok(ScalarExpr { root: Arc::new(root), arity: vars.len() })
    }

    /// Evaluate on jet-valued coordinates. Exact chain rule to the seeded order.
    pub fn eval(&self, vars: &[Jet]) -> Result<Jet, EvalError> {
        if self.arity > vars.len() {
            return Err(EvalError::VarCount { expected: self.arity, got: vars.len() });
        }
        let out = eval_node(&self.root, vars)?;
        if !out.is_finite() {
            return Err(non_finite(&self.root));
        }
        Ok(out)
    }

    /// Evaluate at a plain point.
    pub fn eval_values(&self, point: &[f64]) -> Result<f64, EvalError> {
        let jets: Vec<Jet> = point.iter().map(|&x| Jet::constant(x, 0)).collect();
        Ok(self.eval(&jets)?.value())
    }

    pub fn constant(value: f64) -> ScalarExpr {
        ScalarExpr {
            root: Arc::new(Expr { node: Node::Number(value), span: Span::SYNTHETIC }),
            arity: 0,
        }
    }

    pub fn var(index: usize, name: &str) -> ScalarExpr {
        ScalarExpr {
            root: Arc::new(Expr {
                node: Node::Var { index, name: Arc::from(name) },
                span: Span::SYNTHETIC,
            }),
            arity: index + 1,
        }
    }

    fn combine(self, op: BinOp, rhs: ScalarExpr) -> ScalarExpr {
        let arity = self.arity.max(rhs.arity);
        ScalarExpr {
            root: Arc::new(Expr {
                node: Node::Bin(op, Box::new(self.unwrap()), Box::new(rhs.unwrap())),
                span: Span::SYNTHETIC,
            }),
            arity,
        }
    }

    pub fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        self.combine(BinOp::Add, rhs)
    }

    pub fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        self.combine(BinOp::Sub, rhs)
    }

    pub fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        self.combine(BinOp::Mul, rhs)
    }

    pub fn div(self, rhs: ScalarExpr) -> ScalarExpr {
        self.combine(BinOp::Div, rhs)
    }

    pub fn neg(self) -> ScalarExpr {
        let arity = self.arity;
        ScalarExpr {
            root: Arc::new(Expr { node: Node::Neg(Box::new(self.unwrap())), span: Span::SYNTHETIC }),
            arity,
        }
    }

    pub fn powi(self, n: i32) -> ScalarExpr {
        let arity = self.arity;
        ScalarExpr {
            root: Arc::new(Expr {
                node: Node::PowInt(Box::new(self.unwrap()), n),
                span: Span::SYNTHETIC,
            }),
            arity,
        }
    }

    /// True when the expression is a bare numeric literal.
    pub fn as_constant(&self) -> Option<f64> {
        match &self.root.node {
            Node::Number(v) => Some(*v),
            Node::Neg(inner) => match &inner.node {
                Node::Number(v) => Some(-v),
                _ => None,
            },
            _ => None,
        }
    }

    fn unwrap(self) -> Expr {
        Arc::try_unwrap(self.root).unwrap_or_else(|arc| (*arc).clone())
    }
}

fn snippet(e: &Expr) -> (String, usize, usize) {
    (format!("{}", PrintExpr(e)), e.span.start, e.span.end)
}

fn non_finite(e: &Expr) -> EvalError {
    let (snippet, start, end) = snippet(e);
    EvalError::NonFinite { snippet, start, end }
}

fn eval_node(e: &Expr, vars: &[Jet]) -> Result<Jet, EvalError> {
    let order = vars.first().map(|j| j.order()).unwrap_or(0);
    Ok(match &e.node {
        Node::Number(v) => Jet::constant(*v, order),
        Node::Var { index, .. } => vars[*index],
        Node::Neg(inner) => -eval_node(inner, vars)?,
        Node::Bin(op, a, b) => {
            let ja = eval_node(a, vars)?;
            let jb = eval_node(b, vars)?;
            match op {
                BinOp::Add => ja + jb,
                BinOp::Sub => ja - jb,
                BinOp::Mul => ja * jb,
                BinOp::Div => {
                    if jb.value() == 0.0 {
                        let (snippet, start, end) = snippet(e);
                        return Err(EvalError::DivByZero { snippet, start, end });
                    }
                    ja / jb
                }
            }
        }
        Node::PowInt(base, n) => {
            let jb = eval_node(base, vars)?;
            if *n < 0 && jb.value() == 0.0 {
                let (snippet, start, end) = snippet(e);
                return Err(EvalError::DivByZero { snippet, start, end });
            }
            jb.powi(*n)
        }
        Node::Pow(base, exp) => {
            let jb = eval_node(base, vars)?;
            let je = eval_node(exp, vars)?;
            if jb.value() <= 0.0 {
                let (snippet, start, end) = snippet(e);
                return Err(EvalError::Domain {
                    op: "power with non-integer exponent",
                    value: jb.value(),
                    snippet,
                    start,
                    end,
                });
            }
            jb.powf(&je)
        }
        Node::Apply(func, arg) => {
            let ja = eval_node(arg, vars)?;
            let domain_err = |op: &'static str| {
                let (snippet, start, end) = snippet(e);
                EvalError::Domain { op, value: ja.value(), snippet, start, end }
            };
            match func {
                Func::Sin => ja.sin(),
                Func::Cos => ja.cos(),
                Func::Tan => {
                    if ja.value().cos() == 0.0 {
                        return Err(domain_err("tan at a pole"));
                    }
                    ja.tan()
                }
                Func::Exp => ja.exp(),
                Func::Log => {
                    if ja.value() <= 0.0 {
                        return Err(domain_err("log"));
                    }
                    ja.ln()
                }
                Func::Sqrt => {
                    if ja.value() <= 0.0 {
                        return Err(domain_err("sqrt"));
                    }
                    ja.sqrt()
                }
                Func::Sinh => ja.sinh(),
                Func::Cosh => ja.cosh(),
            }
        }
    })
}

struct PrintExpr<'a>(&'a Expr);

impl fmt::Display for PrintExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print_prec(self.0, 0, f)
    }
}

// Precedence levels: 0 sum, 1 term, 2 unary, 3 power, 4 atom.
fn print_prec(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match &e.node {
        Node::Number(v) if *v < 0.0 => 2,
        Node::Number(_) | Node::Var { .. } | Node::Apply(..) => 4,
        Node::Neg(_) => 2,
        Node::Bin(BinOp::Add | BinOp::Sub, ..) => 0,
        Node::Bin(BinOp::Mul | BinOp::Div, ..) => 1,
        Node::PowInt(..) | Node::Pow(..) => 3,
    };
    let parens = prec < min;
    if parens {
        write!(f, "(")?;
    }
    match &e.node {
        Node::Number(v) => write!(f, "{v}")?,
        Node::Var { name, .. } => write!(f, "{name}")?,
        Node::Neg(inner) => {
            write!(f, "-")?;
            print_prec(inner, 3, f)?;
        }
        Node::Bin(op, a, b) => {
            let (sym, lp, rp) = match op {
                BinOp::Add => ("+", 0, 0),
                BinOp::Sub => ("-", 0, 1),
                BinOp::Mul => ("*", 1, 1),
                BinOp::Div => ("/", 1, 2),
            };
            print_prec(a, lp, f)?;
            write!(f, " {sym} ")?;
            print_prec(b, rp, f)?;
        }
        Node::PowInt(base, n) => {
            print_prec(base, 4, f)?;
            if *n < 0 {
                write!(f, "^({n})")?;
            } else {
                write!(f, "^{n}")?;
            }
        }
        Node::Pow(base, exp) => {
            print_prec(base, 4, f)?;
            write!(f, "^")?;
            print_prec(exp, 4, f)?;
        }
        Node::Apply(func, arg) => {
            write!(f, "{}(", func.name())?;
            print_prec(arg, 0, f)?;
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print_prec(&self.root, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const XY: &[&str] = &["x1", "x2"];

    fn at(src: &str, point: &[f64]) -> f64 {
        ScalarExpr::parse(src, XY).unwrap().eval_values(point).unwrap()
    }

    #[test]
    fn constant_zero() {
        assert_eq!(at("0", &[1.0, 2.0]), 0.0);
    }

    #[test]
    fn pythagorean_identity() {
        let v = at("sin(x1)^2 + cos(x1)^2", &[0.7, 0.0]);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rational_value() {
        // Hand evaluation: 1/(1+1+1) = 1/3.
        assert_relative_eq!(at("1/(1+x1^2+x2^2)", &[1.0, 1.0]), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn product_rule_jets() {
        let e = ScalarExpr::parse("x1*x2", XY).unwrap();
        let jets = [Jet::seeded(2.0, 1.0, 1), Jet::constant(3.0, 1)];
        let out = e.eval(&jets).unwrap();
        assert_eq!(out.value(), 6.0);
        assert_eq!(out.deriv(1), 3.0);
    }

    #[test]
    fn exp_taylor() {
        let e = ScalarExpr::parse("exp(x1)", XY).unwrap();
        let out = e.eval(&[Jet::seeded(0.0, 1.0, 2), Jet::constant(0.0, 2)]).unwrap();
        assert_eq!((out.value(), out.deriv(1), out.deriv(2)), (1.0, 1.0, 1.0));
    }

    #[test]
    fn cube_third_derivative() {
        let e = ScalarExpr::parse("x1^3", XY).unwrap();
        let out = e.eval(&[Jet::seeded(2.0, 1.0, 3), Jet::constant(0.0, 3)]).unwrap();
        assert_eq!(out.deriv(3), 6.0);
        // Independent finite-difference check of the same derivative.
        let f = |x: f64| x.powi(3);
        let h = 1e-3;
        let fd = (f(2.0 + 2.0 * h) - 2.0 * f(2.0 + h) + 2.0 * f(2.0 - h) - f(2.0 - 2.0 * h))
            / (2.0 * h * h * h);
        assert_relative_eq!(out.deriv(3), fd, max_relative = 1e-6);
    }

    #[test]
    fn precedence() {
        assert_eq!(at("2 + 3 * 4", &[0.0, 0.0]), 14.0);
        assert_eq!(at("-x1^2", &[3.0, 0.0]), -9.0); // ^ binds tighter than unary minus
        assert_relative_eq!(at("2^3^2", &[0.0, 0.0]), 512.0, max_relative = 1e-14); // right-assoc
        assert_eq!(at("x1^-2", &[2.0, 0.0]), 0.25);
        assert_eq!(at("6 - 2 - 1", &[0.0, 0.0]), 3.0);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match ScalarExpr::parse("1 + * 2", XY) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match ScalarExpr::parse("1 + y7", XY) {
            Err(ParseError::UnknownIdent { offset, name }) => {
                assert_eq!((offset, name.as_str()), (4, "y7"));
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
        match ScalarExpr::parse("sin(x1, x2)", XY) {
            Err(ParseError::Arity { name, got, .. }) => assert_eq!((name.as_str(), got), ("sin", 2)),
            other => panic!("expected arity error, got {other:?}"),
        }
        assert!(matches!(ScalarExpr::parse("", XY), Err(ParseError::Empty)));
    }

    #[test]
    fn domain_error_points_at_subexpression() {
        let e = ScalarExpr::parse("1 + log(x1 - 4)", XY).unwrap();
        match e.eval_values(&[1.0, 0.0]) {
            Err(EvalError::Domain { op, start, .. }) => {
                assert_eq!(op, "log");
                assert_eq!(start, 4);
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        let e = ScalarExpr::parse("x2 / x1", XY).unwrap();
        assert!(matches!(e.eval_values(&[0.0, 1.0]), Err(EvalError::DivByZero { .. })));
    }

    #[test]
    fn display_round_trip() {
        let srcs = [
            "1/(1+x1^2+x2^2)",
            "-x1^2 + sin(x2)*cos(x1)/(2 - x2)",
            "sqrt(1 + x1^2)^-3",
            "x1 - (x2 - 1)",
        ];
        for src in srcs {
            let e = ScalarExpr::parse(src, XY).unwrap();
            let printed = format!("{e}");
            let e2 = ScalarExpr::parse(&printed, XY).unwrap();
            for k in 0..20 {
                let p = [0.1 + 0.05 * k as f64, -0.4 + 0.07 * k as f64];
                assert_relative_eq!(
                    e.eval_values(&p).unwrap(),
                    e2.eval_values(&p).unwrap(),
                    epsilon = 1e-14
                );
            }
        }
    }
}
