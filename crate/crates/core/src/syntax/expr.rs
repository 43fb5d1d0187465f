//! Expressions in the real coordinates `x_k, y_k, t`.
//!
//! Grammar, loosest first:
//! `sum := product (('+' | '-') product)*`,
//! `product := unary (('*' | '/') unary)*`,
//! `unary := '-' unary | power`,
//! `power := atom ('^' integer)?` with `integer := '-'? digits | '(' '-'? digits ')'`,
//! `atom := number | 'i' | var | func '(' sum ')' | '(' sum ')'`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// `x_k`, `k ≥ 1`
    X(usize),
    Y(usize),
    T,
}

impl Var {
    /// Coordinate index in `(x_1..x_n, y_1..y_n, t)`.
    pub fn index(self, n: usize) -> usize {
        match self {
            Var::X(k) => k - 1,
            Var::Y(k) => n + k - 1,
            Var::T => 2 * n,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(k) => write!(f, "x{k}"),
            Var::Y(k) => write!(f, "y{k}"),
            Var::T => write!(f, "t"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    /// `|a|² = a · conj(a)`
    Abs2,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        match s {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            "abs2" => Some(Func::Abs2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs2 => "abs2",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Var { var: Var, offset: usize },
    Num(BigRational),
    I,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i64),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn var(var: Var) -> Node {
        Node::Var { var, offset: 0 }
    }

    pub fn num(r: BigRational) -> Node {
        Node::Num(r)
    }

    pub fn int(v: i64) -> Node {
        Node::Num(BigRational::from_integer(v.into()))
    }

    pub fn call(f: Func, a: Node) -> Node {
        Node::Call(f, Box::new(a))
    }

    pub fn visit_vars(&self, out: &mut impl FnMut(Var, usize)) {
        match self {
            Node::Var { var, offset } => out(*var, *offset),
            Node::Num(_) | Node::I => {}
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.visit_vars(out),
        }
    }

    /// Largest variable index `k` among `x_k, y_k`.
    pub fn max_index(&self) -> usize {
        let mut m = 0;
        self.visit_vars(&mut |v, _| {
            if let Var::X(k) | Var::Y(k) = v {
                m = m.max(k);
            }
        });
        m
    }

    /// Rejects variables beyond dimension `n`.
    pub fn check_dimension(&self, n: usize) -> Result<(), ParseError> {
        let mut err = None;
        self.visit_vars(&mut |v, offset| {
            if let Var::X(k) | Var::Y(k) = v {
                if k > n && err.is_none() {
                    err = Some(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier,
                        offset,
                        message: format!("variable {v} exceeds dimension n = {n}"),
                    });
                }
            }
        });
        err.map_or(Ok(()), Err)
    }
}

impl std::ops::Add for Node {
    type Output = Node;
    fn add(self, rhs: Node) -> Node {
        Node::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Node {
    type Output = Node;
    fn sub(self, rhs: Node) -> Node {
        Node::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Node {
    type Output = Node;
    fn mul(self, rhs: Node) -> Node {
        Node::Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Node {
    type Output = Node;
    fn div(self, rhs: Node) -> Node {
        Node::Div(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Node {
    type Output = Node;
    fn neg(self) -> Node {
        Node::Neg(Box::new(self))
    }
}

fn prec(n: &Node) -> u8 {
    match n {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Pow(..) => 4,
        Node::Num(r) if !r.is_integer() => 2,
        Node::Num(r) if r < &BigRational::zero() => 3,
        _ => 5,
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, n: &Node, min: u8) -> fmt::Result {
    if prec(n) < min {
        write!(f, "({n})")
    } else {
        write!(f, "{n}")
    }
}

/// Prints an expression that parses back to the same tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Var { var, .. } => write!(f, "{var}"),
            Node::Num(r) => {
                if r < &BigRational::zero() {
                    write!(f, "-")?;
                }
                let a = r.abs();
                if a.is_integer() {
                    write!(f, "{}", a.numer())
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())
                }
            }
            Node::I => write!(f, "i"),
            Node::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            Node::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " - ")?;
                wrap(f, b, 2)
            }
            Node::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "*")?;
                wrap(f, b, 3)
            }
            Node::Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "/")?;
                wrap(f, b, 3)
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 3)
            }
            Node::Pow(a, k) => {
                wrap(f, a, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind:?} error at byte {offset}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError { kind: ParseErrorKind::Syntax, offset, message: message.into() }
    }
}

/// Nesting limit; deeper input is rejected instead of overflowing the stack.
const MAX_DEPTH: usize = 200;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected '{}'", c as char)))
        }
    }

    fn unexpected(&mut self, what: &str) -> ParseError {
        match self.peek() {
            None => ParseError::syntax(self.pos, format!("{what}, found end of input")),
            Some(c) => ParseError::syntax(self.pos, format!("{what}, found '{}'", char_at(self.src, self.pos, c))),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::syntax(self.pos, "expression nested too deeply"));
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let mut lhs = self.product()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs + self.product()?;
            } else if self.eat(b'-') {
                lhs = lhs - self.product()?;
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs * self.unary()?;
            } else if self.eat(b'/') {
                lhs = lhs / self.unary()?;
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat(b'-') {
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(-inner);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let k = if self.eat(b'(') {
            let k = self.integer()?;
            self.expect(b')')?;
            k
        } else {
            self.integer()?
        };
        if self.peek() == Some(b'^') {
            return Err(ParseError::syntax(self.pos, "chained powers need parentheses"));
        }
        Ok(Node::Pow(Box::new(base), k))
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected("expected an integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: i64 = text.parse().map_err(|_| ParseError::syntax(start, "exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = &self.src[start..self.pos];
        let mut frac_part: &[u8] = &[];
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac_part = &self.src[fs..self.pos];
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(ParseError::syntax(start, "malformed number"));
            }
        }
        let digits = [int_part, frac_part].concat();
        let num: BigInt = std::str::from_utf8(&digits).unwrap().parse().unwrap_or_default();
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Node::Num(BigRational::new(num, den)))
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            _ => Err(self.unexpected("expected a number, variable, function or '('")),
        }
    }

    fn identifier(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(func) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(ParseError {
                    kind: ParseErrorKind::Arity,
                    offset: self.pos,
                    message: format!("{name} takes one parenthesized argument"),
                });
            }
            if self.peek() == Some(b')') {
                return Err(ParseError {
                    kind: ParseErrorKind::Arity,
                    offset: self.pos,
                    message: format!("{name} takes exactly one argument, got none"),
                });
            }
            let arg = self.sum()?;
            if self.peek() == Some(b',') {
                return Err(ParseError {
                    kind: ParseErrorKind::Arity,
                    offset: self.pos,
                    message: format!("{name} takes exactly one argument"),
                });
            }
            self.expect(b')')?;
            return Ok(Node::call(func, arg));
        }
        let var = match name {
            "i" => return Ok(Node::I),
            "t" => Some(Var::T),
            _ => {
                let (head, tail) = name.split_at(1);
                match tail.parse::<usize>() {
                    Ok(k) if k >= 1 && !tail.starts_with('0') && head == "x" => Some(Var::X(k)),
                    Ok(k) if k >= 1 && !tail.starts_with('0') && head == "y" => Some(Var::Y(k)),
                    _ => None,
                }
            }
        };
        match var {
            Some(var) => Ok(Node::Var { var, offset: start }),
            None => Err(ParseError {
                kind: ParseErrorKind::UnknownIdentifier,
                offset: start,
                message: format!("unknown identifier `{name}`"),
            }),
        }
    }
}

fn char_at(src: &[u8], pos: usize, c: u8) -> char {
    std::str::from_utf8(&src[pos..])
        .ok()
        .and_then(|s| s.chars().next())
        .unwrap_or(c as char)
}

pub fn parse_expression(text: &str) -> Result<Node, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, depth: 0 };
    let node = p.sum()?;
    if p.peek().is_some() {
        return Err(p.unexpected("expected an operator or end of input"));
    }
    Ok(node)
}

/// `1` as an expression.
pub fn one() -> Node {
    Node::Num(BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> Var {
        Var::X(k)
    }

    #[test]
    fn precedence() {
        let e = parse_expression("x1 + y1 * t").unwrap();
        match e {
            Node::Add(a, b) => {
                assert!(matches!(*a, Node::Var { var: Var::X(1), .. }));
                assert!(matches!(*b, Node::Mul(..)));
            }
            _ => panic!("{e:?}"),
        }
        assert!(matches!(parse_expression("-x1^2").unwrap(), Node::Neg(_)));
        assert!(matches!(parse_expression("t^2 + x1*y1").unwrap(), Node::Add(..)));
        assert!(matches!(parse_expression("x1 - y1 - t").unwrap(), Node::Sub(a, _) if matches!(*a, Node::Sub(..))));
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_expression("(").unwrap_err();
        assert_eq!((e.kind, e.offset), (ParseErrorKind::Syntax, 1));
        let e = parse_expression("x1 + z").unwrap_err();
        assert_eq!((e.kind, e.offset), (ParseErrorKind::UnknownIdentifier, 5));
        assert_eq!(parse_expression("exp(x1, t)").unwrap_err().kind, ParseErrorKind::Arity);
        assert_eq!(parse_expression("log()").unwrap_err().kind, ParseErrorKind::Arity);
        assert_eq!(parse_expression("x1 x2").unwrap_err().offset, 3);
        assert!(parse_expression("x0").is_err());
        assert!(parse_expression("x1^2^3").is_err());
    }

    #[test]
    fn numbers_are_exact() {
        assert_eq!(parse_expression("0.25").unwrap(), Node::Num(BigRational::new(1.into(), 4.into())));
        assert_eq!(parse_expression("3").unwrap(), Node::int(3));
    }

    #[test]
    fn dimension_check() {
        let e = parse_expression("x1 + y3").unwrap();
        assert_eq!(e.max_index(), 3);
        assert!(e.check_dimension(3).is_ok());
        assert_eq!(e.check_dimension(2).unwrap_err().offset, 5);
        let _ = x(1);
    }

    #[test]
    fn display_round_trips() {
        for s in ["x1 + y1*t", "-(x1 + 1)^2", "exp(2*t)/(1 + abs2(x1 - i*y1))", "x1^(-2) - 1/3*t", "-x1*-y1"] {
            let e = parse_expression(s).unwrap();
            let again = parse_expression(&e.to_string()).unwrap();
            assert_eq!(strip(&e), strip(&again), "{s} -> {e}");
        }
    }

    fn strip(n: &Node) -> String {
        format!("{n}")
    }
}
