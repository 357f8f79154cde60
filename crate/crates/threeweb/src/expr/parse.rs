//! Line-oriented parser for web definitions.
//!
//! ```text
//! # comment
//! label Bol's web
//! param A = 1.5
//! u1 = x1 + y1
//! u2 = (x2 + y2)*(y1 - x1); domain x1 - y1 != 0
//! ```
//!
//! Statements end at a newline or `;`. `^` takes an integer literal exponent
//! (optionally negative) and binds tighter than unary minus.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Constraint, Expr, Relation, Var, WebDefinition, EULER};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredParameter(String),
    NonIntegerExponent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => f.write_str(m),
            ParseErrorKind::UndeclaredParameter(p) => write!(f, "undeclared parameter `{p}`"),
            ParseErrorKind::NonIntegerExponent => f.write_str("exponent must be an integer literal"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Assign,
    NotEq,
    Greater,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v, _) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Assign => "`=`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Greater => "`>`".into(),
            Tok::End => "end of statement".into(),
        }
    }
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Lexed, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |col: usize, m: String| ParseError { line, column: col, kind: ParseErrorKind::Syntax(m) };
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Assign),
            '>' => Some(Tok::Greater),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((t, col));
            i += 1;
        } else if c == '!' {
            if chars.get(i + 1) == Some(&'=') {
                toks.push((Tok::NotEq, col));
                i += 2;
            } else {
                return Err(err(col, "expected `!=`".into()));
            }
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut integral = true;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                if chars[i] == '.' {
                    integral = false;
                }
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| err(col, format!("malformed number `{s}`")))?;
            toks.push((Tok::Num(v, integral), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(err(col, format!("unexpected character `{c}`")));
        }
    }
    toks.push((Tok::End, col0 + chars.len()));
    Ok(Lexed { toks })
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    // parameter references with their columns, checked once all declarations are known
    refs: Vec<(String, usize)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.col(), kind }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(ParseErrorKind::Syntax(format!("expected {wanted}, found {}", self.peek().describe())))
    }

    fn expect(&mut self, t: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let k = self.exponent()?;
        if *self.peek() == Tok::Caret {
            return Err(self.error(ParseErrorKind::Syntax(
                "chained exponent; parenthesize the base".into(),
            )));
        }
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let k = match self.peek().clone() {
            Tok::Num(v, integral) => {
                if !integral || v > i32::MAX as f64 {
                    return Err(self.error(ParseErrorKind::NonIntegerExponent));
                }
                self.bump();
                v as i32
            }
            Tok::Ident(_) | Tok::LParen => return Err(self.error(ParseErrorKind::NonIntegerExponent)),
            _ => return Err(self.unexpected("integer exponent")),
        };
        if paren && self.bump() != Tok::RParen {
            return Err(self.error(ParseErrorKind::NonIntegerExponent));
        }
        Ok(if negative { -k } else { k })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        if matches!(self.peek(), Tok::End | Tok::RParen | Tok::Plus | Tok::Star | Tok::Slash | Tok::Caret)
            || matches!(self.peek(), Tok::Assign | Tok::NotEq | Tok::Greater)
        {
            return Err(self.unexpected("an operand"));
        }
        match self.bump() {
            Tok::Num(v, _) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(v) = Var::from_name(&name) {
                    return Ok(Expr::Var(v));
                }
                match name.as_str() {
                    "euler" => Ok(Expr::Const(EULER)),
                    "exp" | "ln" => {
                        self.expect(Tok::LParen, "`(` after function name")?;
                        let arg = Box::new(self.expr()?);
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(if name == "exp" { Expr::Exp(arg) } else { Expr::Ln(arg) })
                    }
                    _ if RESERVED.contains(&name.as_str()) => Err(ParseError {
                        line: self.line,
                        column: col,
                        kind: ParseErrorKind::Syntax(format!("`{name}` cannot be used in an expression")),
                    }),
                    _ => {
                        self.refs.push((name.clone(), col));
                        Ok(Expr::Param(name))
                    }
                }
            }
            _ => unreachable!("operand tokens are screened above"),
        }
    }
}

const RESERVED: [&str; 10] = ["x1", "x2", "y1", "y2", "euler", "exp", "ln", "u1", "u2", "domain"];
const KEYWORDS: [&str; 2] = ["param", "label"];

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// A statement with its line number and the column where it starts.
struct Stmt<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn statements(src: &str) -> (Vec<Stmt<'_>>, Option<String>) {
    let mut out = Vec::new();
    let mut label = None;
    for (ln, raw) in src.lines().enumerate() {
        let line = strip_comment(raw);
        let mut offset = 0;
        for piece in line.split(';') {
            let trimmed = piece.trim_start();
            let col = offset + (piece.len() - trimmed.len());
            if let Some(rest) = trimmed.strip_prefix("label") {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    label = Some(line[col + 5..].trim().to_string());
                    break;
                }
            }
            if !trimmed.trim().is_empty() {
                out.push(Stmt { text: trimmed, line: ln + 1, col: line[..col].chars().count() + 1 });
            }
            offset += piece.len() + 1;
        }
    }
    (out, label)
}

fn parse_stmt_expr(p: &mut Parser<'_>) -> Result<Expr, ParseError> {
    let e = p.expr()?;
    Ok(e)
}

/// Parses a web definition.
pub fn parse_web(src: &str) -> Result<WebDefinition, ParseError> {
    let (stmts, label) = statements(src);
    let mut u1 = None;
    let mut u2 = None;
    let mut constraints = Vec::new();
    let mut params = BTreeMap::new();
    let mut refs = Vec::new();
    for s in &stmts {
        let lexed = lex(s.text, s.line, s.col)?;
        let mut p = Parser { toks: &lexed.toks, pos: 0, line: s.line, refs: Vec::new() };
        let head_col = p.col();
        let head = match p.bump() {
            Tok::Ident(h) => h,
            _ => {
                return Err(ParseError {
                    line: s.line,
                    column: head_col,
                    kind: ParseErrorKind::Syntax("expected `u1`, `u2`, `domain`, `param` or `label`".into()),
                })
            }
        };
        match head.as_str() {
            "u1" | "u2" => {
                p.expect(Tok::Assign, "`=`")?;
                let e = parse_stmt_expr(&mut p)?;
                p.expect(Tok::End, "operator or end of statement")?;
                let slot = if head == "u1" { &mut u1 } else { &mut u2 };
                if slot.is_some() {
                    return Err(ParseError {
                        line: s.line,
                        column: head_col,
                        kind: ParseErrorKind::Syntax(format!("`{head}` defined twice")),
                    });
                }
                *slot = Some(e);
            }
            "domain" => {
                let e = parse_stmt_expr(&mut p)?;
                let relation = match p.peek() {
                    Tok::NotEq => Relation::NonZero,
                    Tok::Greater => Relation::Positive,
                    _ => return Err(p.unexpected("`!= 0` or `> 0`")),
                };
                p.bump();
                match p.peek() {
                    Tok::Num(v, _) if *v == 0.0 => {
                        p.bump();
                    }
                    _ => return Err(p.unexpected("`0`")),
                }
                p.expect(Tok::End, "end of statement")?;
                constraints.push(Constraint { expr: e, relation });
            }
            "param" => {
                let name_col = p.col();
                let name = match p.bump() {
                    Tok::Ident(n) if !RESERVED.contains(&n.as_str()) && !KEYWORDS.contains(&n.as_str()) => n,
                    _ => {
                        return Err(ParseError {
                            line: s.line,
                            column: name_col,
                            kind: ParseErrorKind::Syntax("expected a parameter name".into()),
                        })
                    }
                };
                p.expect(Tok::Assign, "`=`")?;
                let negative = *p.peek() == Tok::Minus;
                if negative {
                    p.bump();
                }
                let v = match p.peek() {
                    Tok::Num(v, _) => *v,
                    _ => return Err(p.unexpected("a number")),
                };
                p.bump();
                p.expect(Tok::End, "end of statement")?;
                params.insert(name, if negative { -v } else { v });
            }
            _ => {
                return Err(ParseError {
                    line: s.line,
                    column: head_col,
                    kind: ParseErrorKind::Syntax(format!(
                        "unknown statement `{head}`; expected `u1`, `u2`, `domain`, `param` or `label`"
                    )),
                })
            }
        }
        refs.extend(p.refs.into_iter().map(|(n, c)| (n, s.line, c)));
    }
    for (name, line, column) in refs {
        if !params.contains_key(&name) {
            return Err(ParseError { line, column, kind: ParseErrorKind::UndeclaredParameter(name) });
        }
    }
    let end = src.lines().count().max(1);
    let missing = |n: &str| ParseError {
        line: end,
        column: 1,
        kind: ParseErrorKind::Syntax(format!("missing definition of `{n}`")),
    };
    let u1 = u1.ok_or_else(|| missing("u1"))?;
    let u2 = u2.ok_or_else(|| missing("u2"))?;
    Ok(WebDefinition::new(u1, u2, constraints, params, label.unwrap_or_default())
        .expect("parameters were checked above"))
}

/// Parses a single expression; `params` lists the names allowed as parameters.
pub fn parse_expr(src: &str, params: &[&str]) -> Result<Expr, ParseError> {
    let lexed = lex(src, 1, 1)?;
    let mut p = Parser { toks: &lexed.toks, pos: 0, line: 1, refs: Vec::new() };
    let e = p.expr()?;
    p.expect(Tok::End, "operator or end of input")?;
    if let Some((name, col)) = p.refs.into_iter().find(|(n, _)| !params.contains(&n.as_str())) {
        return Err(ParseError { line: 1, column: col, kind: ParseErrorKind::UndeclaredParameter(name) });
    }
    Ok(e)
}
