//! Text format for linear systems.
//!
//! ```text
//! system ex13 {
//!   indep: x1 x2;
//!   dep: u1 u2;
//!   eq: d(u1,2) - d(u2,1) + x2*u2 = 0;
//! }
//! ```
//!
//! `d(u, i, j, ...)` is the derivative of `u` along the listed axes, with
//! repetition for higher derivatives. Coefficients are rational expressions
//! in the independent variables. `#` starts a comment.

use std::fmt;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{Rat, RatFunc};
use crate::ore::{DiffOp, OpMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemFile {
    pub name: String,
    pub indep: Vec<String>,
    pub dep: Vec<String>,
    pub rows: Vec<Vec<DiffOp>>,
}

impl SystemFile {
    pub fn n(&self) -> usize {
        self.indep.len()
    }

    pub fn m(&self) -> usize {
        self.dep.len()
    }

    pub fn to_opmatrix(&self) -> OpMatrix {
        OpMatrix::from_rows(self.n(), self.m(), self.rows.clone())
            .expect("rows have one entry per unknown")
    }

    pub fn from_opmatrix(name: &str, d: &OpMatrix) -> Self {
        SystemFile {
            name: name.to_string(),
            indep: (1..=d.n()).map(|i| format!("x{i}")).collect(),
            dep: (1..=d.ncols()).map(|k| format!("u{k}")).collect(),
            rows: d.rows().to_vec(),
        }
    }
}

impl fmt::Display for SystemFile {
    /// Canonical rendering, always with `x1..xn` and `u1..um`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system {} {{", self.name)?;
        let xs: Vec<String> = (1..=self.n()).map(|i| format!("x{i}")).collect();
        let us: Vec<String> = (1..=self.m()).map(|k| format!("u{k}")).collect();
        writeln!(f, "  indep: {};", xs.join(" "))?;
        writeln!(f, "  dep: {};", us.join(" "))?;
        for row in &self.rows {
            writeln!(f, "  eq: {} = 0;", render_row(row))?;
        }
        write!(f, "}}")
    }
}

/// Renders one operator row as an expression in `u1..um`.
pub fn render_row(row: &[DiffOp]) -> String {
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (k, op) in row.iter().enumerate() {
        for (mu, c) in op.terms().rev() {
            let jet = if mu.is_zero() {
                format!("u{}", k + 1)
            } else {
                let axes: Vec<String> = mu.axes().iter().map(|a| a.to_string()).collect();
                format!("d(u{},{})", k + 1, axes.join(","))
            };
            let (neg, c) = match c.as_rat() {
                Some(r) if r < &Rat::zero() => (true, c.neg()),
                _ => (false, c.clone()),
            };
            let body = if c.is_one() {
                jet
            } else {
                format!("({c})*{jet}")
            };
            parts.push((neg, body));
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => s.push_str(&body),
            (0, true) => {
                s.push('-');
                s.push_str(&body);
            }
            (_, false) => {
                s.push_str(" + ");
                s.push_str(&body);
            }
            (_, true) => {
                s.push_str(" - ");
                s.push_str(&body);
            }
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(BigInt),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Num(s.parse().expect("digits")),
                    line: li + 1,
                    col,
                });
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: li + 1,
                    col,
                });
            } else if "+-*/^(),=;{}:".contains(c) {
                out.push(Token {
                    tok: Tok::Sym(c),
                    line: li + 1,
                    col,
                });
                i += 1;
            } else {
                return Err(Error::Malformed(format!(
                    "{}:{}: unexpected character '{c}'",
                    li + 1,
                    col
                )));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Val {
    Scalar(RatFunc),
    Lin(Vec<DiffOp>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    indep: Vec<String>,
    dep: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> String {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => format!("{}:{}", t.line, t.col),
            None => "1:1".into(),
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Malformed(format!("{}: {msg}", self.here())))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn n(&self) -> usize {
        self.indep.len()
    }

    fn zero_row(&self) -> Vec<DiffOp> {
        vec![DiffOp::zero(self.n()); self.dep.len()]
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    let r = self.term()?;
                    acc = self.add(acc, r)?;
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    let r = self.term()?;
                    acc = self.add(acc, negate(r))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn add(&self, a: Val, b: Val) -> Result<Val> {
        Ok(match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(x.add(&y)),
            (Val::Lin(x), Val::Lin(y)) => {
                Val::Lin(x.iter().zip(&y).map(|(p, q)| p.add(q)).collect())
            }
            (Val::Lin(x), Val::Scalar(s)) | (Val::Scalar(s), Val::Lin(x)) => {
                if !s.is_zero() {
                    return self.err("inhomogeneous term");
                }
                Val::Lin(x)
            }
        })
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.pos += 1;
                    let r = self.unary()?;
                    acc = match (acc, r) {
                        (Val::Scalar(a), Val::Scalar(b)) => Val::Scalar(a.mul(&b)),
                        (Val::Scalar(a), Val::Lin(l)) | (Val::Lin(l), Val::Scalar(a)) => {
                            Val::Lin(l.iter().map(|p| p.scale(&a)).collect())
                        }
                        (Val::Lin(_), Val::Lin(_)) => {
                            return self.err("product of dependent variables")
                        }
                    };
                }
                Some(Tok::Sym('/')) => {
                    self.pos += 1;
                    let r = self.unary()?;
                    let Val::Scalar(b) = r else {
                        return self.err("division by a dependent variable");
                    };
                    let inv = match b.inv() {
                        Ok(v) => v,
                        Err(_) => return self.err("division by zero"),
                    };
                    acc = match acc {
                        Val::Scalar(a) => Val::Scalar(a.mul(&inv)),
                        Val::Lin(l) => Val::Lin(l.iter().map(|p| p.scale(&inv)).collect()),
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Val> {
        match self.peek() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(negate(self.unary()?))
            }
            Some(Tok::Sym('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Val> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Sym('^')) {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Sym('-')) {
            self.pos += 1;
            true
        } else {
            false
        };
        let e = match self.next() {
            Some(Tok::Num(v)) => v,
            _ => {
                self.pos -= 1;
                return self.err("expected integer exponent");
            }
        };
        let Val::Scalar(b) = base else {
            return self.err("power of a dependent variable");
        };
        let e: u32 = match e.try_into() {
            Ok(v) => v,
            Err(_) => return self.err("exponent too large"),
        };
        let mut r = RatFunc::one();
        for _ in 0..e {
            r = r.mul(&b);
        }
        if neg {
            r = match r.inv() {
                Ok(v) => v,
                Err(_) => return self.err("division by zero"),
            };
        }
        Ok(Val::Scalar(r))
    }

    fn atom(&mut self) -> Result<Val> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Val::Scalar(RatFunc::constant(Rat::from_integer(v)))),
            Some(Tok::Sym('(')) => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Some(Tok::Ident(s)) if s == "d" && self.peek() == Some(&Tok::Sym('(')) => {
                self.pos += 1;
                let u = self.ident()?;
                let Some(k) = self.dep.iter().position(|d| *d == u) else {
                    self.pos -= 1;
                    return self.err(&format!("undeclared dependent variable '{u}'"));
                };
                let mut axes = Vec::new();
                while self.peek() == Some(&Tok::Sym(',')) {
                    self.pos += 1;
                    match self.next() {
                        Some(Tok::Num(a)) if a >= BigInt::one() && a <= BigInt::from(self.n()) => {
                            axes.push(usize::try_from(a).expect("small axis"))
                        }
                        _ => {
                            self.pos -= 1;
                            return self.err("axis index out of range");
                        }
                    }
                }
                self.expect_sym(')')?;
                let mut row = self.zero_row();
                row[k] = DiffOp::d(self.n(), &axes);
                Ok(Val::Lin(row))
            }
            Some(Tok::Ident(s)) => {
                if let Some(i) = self.indep.iter().position(|x| *x == s) {
                    Ok(Val::Scalar(RatFunc::var(self.n(), i + 1)))
                } else if let Some(k) = self.dep.iter().position(|x| *x == s) {
                    let mut row = self.zero_row();
                    row[k] = DiffOp::one(self.n());
                    Ok(Val::Lin(row))
                } else {
                    self.pos -= 1;
                    self.err(&format!("undeclared symbol '{s}'"))
                }
            }
            _ => {
                self.pos -= 1;
                self.err("expected expression")
            }
        }
    }
}

fn negate(v: Val) -> Val {
    match v {
        Val::Scalar(s) => Val::Scalar(s.neg()),
        Val::Lin(l) => Val::Lin(l.iter().map(|p| p.neg()).collect()),
    }
}

/// Parses a full `system NAME { ... }` description.
pub fn parse_system(text: &str) -> Result<SystemFile> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        indep: Vec::new(),
        dep: Vec::new(),
    };
    match p.next() {
        Some(Tok::Ident(s)) if s == "system" => {}
        _ => {
            p.pos = 0;
            return p.err("expected 'system'");
        }
    }
    let name = p.ident()?;
    p.expect_sym('{')?;
    let mut rows = Vec::new();
    loop {
        match p.peek() {
            Some(Tok::Sym('}')) => {
                p.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) if kw == "indep" || kw == "dep" => {
                let kw = kw.clone();
                if !rows.is_empty() {
                    return p.err("declarations must precede equations");
                }
                p.pos += 1;
                p.expect_sym(':')?;
                let mut names = Vec::new();
                while let Some(Tok::Ident(s)) = p.peek() {
                    names.push(s.clone());
                    p.pos += 1;
                }
                p.expect_sym(';')?;
                for s in &names {
                    if s == "d" || p.indep.contains(s) || p.dep.contains(s) {
                        return p.err(&format!("symbol '{s}' declared twice or reserved"));
                    }
                }
                if kw == "indep" {
                    p.indep.extend(names);
                } else {
                    p.dep.extend(names);
                }
            }
            Some(Tok::Ident(kw)) if kw == "eq" => {
                if p.indep.is_empty() || p.dep.is_empty() {
                    return p.err("equations need declared indep and dep variables");
                }
                p.pos += 1;
                p.expect_sym(':')?;
                let start = p.pos;
                let v = p.expr()?;
                p.expect_sym('=')?;
                match p.next() {
                    Some(Tok::Num(z)) if z.is_zero() => {}
                    _ => {
                        p.pos -= 1;
                        return p.err("right-hand side must be 0");
                    }
                }
                p.expect_sym(';')?;
                match v {
                    Val::Lin(row) => rows.push(row),
                    Val::Scalar(_) => {
                        p.pos = start;
                        return p.err("equation has no dependent variable");
                    }
                }
            }
            None => return p.err("unexpected end of input"),
            _ => return p.err("expected 'indep:', 'dep:', 'eq:' or '}'"),
        }
    }
    if p.pos < p.toks.len() {
        return p.err("trailing input after system");
    }
    if p.indep.is_empty() || p.dep.is_empty() {
        return p.err("system needs indep and dep declarations");
    }
    Ok(SystemFile {
        name,
        indep: p.indep,
        dep: p.dep,
        rows,
    })
}

/// Parses a rational expression in the variables `x1..xn`.
pub fn parse_coefficient(n: usize, text: &str) -> Result<RatFunc> {
    let toks = tokenize(text)?;
    let indep = (1..=n).map(|i| format!("x{i}")).collect();
    let mut p = Parser {
        toks,
        pos: 0,
        indep,
        dep: Vec::new(),
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input after expression");
    }
    match v {
        Val::Scalar(s) => Ok(s),
        Val::Lin(_) => p.err("expected a coefficient"),
    }
}

/// Parses a system and returns its operator matrix.
pub fn parse_opmatrix(text: &str) -> Result<OpMatrix> {
    Ok(parse_system(text)?.to_opmatrix())
}
