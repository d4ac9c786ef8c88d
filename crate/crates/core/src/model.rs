//! Declarative model format: a line-oriented text syntax declaring
//! algebroids, tensors over them, and check requests, with a parser and a
//! round-tripping printer.
//!
//! Grammar sketch:
//!
//! ```text
//! algebroid H {
//!   coords = [x, y]
//!   frame = [e1, e2, e3]
//!   anchor e1 = x*d/dx + d/dy
//!   bracket [e1, e2] = e3
//! }
//! tensor pi : multivector(2) on H = (-1)*e1^e2
//! tensor eta : form(1) on H = e^3
//! tensor g : metric on H = [[1, 0], [0, 1]]
//! check contact(H, eta)
//! ```
//!
//! The caret is both the wedge and the power operator: `x^2` is a power
//! when `x` is a coordinate, and `e^1` names the first coframe element
//! when the frame contains `e1`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num::BigRational;

use crate::algebroid::{Algebroid, Section, Tensor, Variance};
use crate::coeff::{Poly, Scalar};
use crate::linalg::Matrix;
use crate::Error;

/// A named algebroid together with its declared coordinate and frame
/// names, kept for expression resolution and printing.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedAlgebroid {
    pub name: String,
    pub coords: Vec<String>,
    pub frame: Vec<String>,
    pub algebroid: Algebroid,
}

/// The payload of a tensor declaration.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorValue {
    Form(Tensor),
    Multivector(Tensor),
    Metric(Matrix),
    Endo(Matrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub base: String,
    pub value: TensorValue,
}

/// One `check name(args...)` request, in declaration order. The source
/// line is kept for reporting but ignored by equality.
#[derive(Clone, Debug)]
pub struct CheckRequest {
    pub name: String,
    pub args: Vec<String>,
    pub line: usize,
}

impl PartialEq for CheckRequest {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.args == other.args
    }
}

/// A parsed model file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    pub algebroids: Vec<NamedAlgebroid>,
    pub tensors: Vec<NamedTensor>,
    pub checks: Vec<CheckRequest>,
}

impl Model {
    pub fn algebroid(&self, name: &str) -> Result<&NamedAlgebroid, Error> {
        self.algebroids
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::UnknownName {
                name: name.into(),
                line: 0,
            })
    }

    pub fn tensor(&self, name: &str) -> Result<&NamedTensor, Error> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::UnknownName {
                name: name.into(),
                line: 0,
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Partial(String),
    Punct(char),
    Newline,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let bytes: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                let word: String = bytes[start..i].iter().collect();
                // `d/name` is a chart partial-derivative token
                if word == "d" && i + 1 < bytes.len() && bytes[i] == '/' && bytes[i + 1].is_ascii_alphabetic()
                {
                    i += 1;
                    let vstart = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                        i += 1;
                    }
                    let var: String = bytes[vstart..i].iter().collect();
                    out.push(Token {
                        tok: Tok::Partial(var),
                        line,
                        col,
                    });
                } else {
                    out.push(Token {
                        tok: Tok::Ident(word),
                        line,
                        col,
                    });
                }
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let word: String = bytes[start..i].iter().collect();
                let v = word.parse::<i64>().map_err(|_| Error::Syntax {
                    line,
                    col,
                    msg: "integer literal out of range".into(),
                })?;
                out.push(Token {
                    tok: Tok::Int(v),
                    line,
                    col,
                });
                continue;
            }
            if "{}[]()=,+-*/^:".contains(c) {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line,
                    col,
                });
                i += 1;
                continue;
            }
            return Err(Error::Syntax {
                line,
                col,
                msg: format!("unexpected character '{}'", c),
            });
        }
        out.push(Token {
            tok: Tok::Newline,
            line,
            col: bytes.len() + 1,
        });
    }
    Ok(out)
}

/// An expression value: a scalar, a tensor, or a chart vector field (the
/// latter only inside anchor declarations).
#[derive(Clone, Debug)]
enum Value {
    S(Scalar),
    T(Tensor),
    C(Vec<Scalar>),
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

/// Resolution scope of expressions: the coordinate names, the frame
/// names, and the chart/rank dimensions of the enclosing algebroid.
struct Scope<'a> {
    coords: &'a [String],
    frame: &'a [String],
    rank: usize,
    nv: usize,
}

impl Scope<'_> {
    fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    fn frame_index(&self, name: &str) -> Option<usize> {
        self.frame.iter().position(|c| c == name)
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        self.toks
            .get(self.pos)
            .map(|t| &t.tok)
            .unwrap_or(&Tok::Newline)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| (t.line, t.col))
            .unwrap_or((0, 0))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        let (line, col) = self.here();
        Err(Error::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn eat_punct(&mut self, c: char) -> Result<(), Error> {
        if *self.peek() == Tok::Punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c))
        }
    }

    fn eat_newlines(&mut self) {
        while self.pos < self.toks.len() && *self.peek() == Tok::Newline {
            self.pos += 1;
        }
    }

    fn eat_line_end(&mut self) -> Result<(), Error> {
        match self.peek() {
            Tok::Newline => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err("expected end of line"),
        }
    }

    fn ident(&mut self) -> Result<String, Error> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            _ => {
                self.pos -= 1;
                self.err("expected a name")
            }
        }
    }

    fn name_list(&mut self) -> Result<Vec<String>, Error> {
        self.eat_punct('[')?;
        let mut out = Vec::new();
        if *self.peek() != Tok::Punct(']') {
            loop {
                out.push(self.ident()?);
                if *self.peek() == Tok::Punct(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.eat_punct(']')?;
        Ok(out)
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self, sc: &Scope) -> Result<Value, Error> {
        let mut acc = self.term(sc)?;
        loop {
            match self.peek() {
                Tok::Punct('+') => {
                    self.pos += 1;
                    let rhs = self.term(sc)?;
                    acc = self.combine_add(acc, rhs, false)?;
                }
                Tok::Punct('-') => {
                    self.pos += 1;
                    let rhs = self.term(sc)?;
                    acc = self.combine_add(acc, rhs, true)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*'|'/'|'^') factor)*
    fn term(&mut self, sc: &Scope) -> Result<Value, Error> {
        let mut acc = self.factor(sc)?;
        loop {
            match self.peek() {
                Tok::Punct('*') => {
                    self.pos += 1;
                    let rhs = self.factor(sc)?;
                    acc = self.combine_mul(acc, rhs)?;
                }
                Tok::Punct('/') => {
                    self.pos += 1;
                    let rhs = self.factor(sc)?;
                    acc = self.combine_div(acc, rhs)?;
                }
                Tok::Punct('^') => {
                    self.pos += 1;
                    let rhs = self.factor(sc)?;
                    acc = self.combine_wedge(acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self, sc: &Scope) -> Result<Value, Error> {
        if *self.peek() == Tok::Punct('-') {
            self.pos += 1;
            let v = self.factor(sc)?;
            return Ok(match v {
                Value::S(s) => Value::S(-&s),
                Value::T(t) => Value::T(t.neg()),
                Value::C(v) => Value::C(v.iter().map(|s| -s).collect()),
            });
        }
        self.atom(sc)
    }

    fn atom(&mut self, sc: &Scope) -> Result<Value, Error> {
        match self.bump() {
            Tok::Int(v) => Ok(Value::S(Scalar::from_int(sc.nv, v))),
            Tok::Punct('(') => {
                let v = self.expr(sc)?;
                self.eat_punct(')')?;
                Ok(v)
            }
            Tok::Partial(name) => {
                let (line, _) = self.here();
                // `d/dx` and `d/x` both denote the partial along x
                let i = sc
                    .coord_index(&name)
                    .or_else(|| name.strip_prefix('d').and_then(|n| sc.coord_index(n)))
                    .ok_or(Error::UnknownName {
                        name: format!("d/{}", name),
                        line,
                    })?;
                let mut v = vec![Scalar::zero(sc.nv); sc.nv];
                v[i] = Scalar::one(sc.nv);
                Ok(Value::C(v))
            }
            Tok::Ident(name) => self.resolve_ident(sc, name),
            _ => {
                self.pos -= 1;
                self.err("expected an expression")
            }
        }
    }

    /// Resolves a bare name, handling the caret dichotomy: `x^2` is a
    /// power of a coordinate, `e^1` a coframe element.
    fn resolve_ident(&mut self, sc: &Scope, name: String) -> Result<Value, Error> {
        let caret_int = matches!(
            (self.toks.get(self.pos).map(|t| &t.tok), self.toks.get(self.pos + 1).map(|t| &t.tok)),
            (Some(Tok::Punct('^')), Some(Tok::Int(_)))
        );
        if let Some(i) = sc.coord_index(&name) {
            let base = Scalar::var(sc.nv, i);
            if caret_int {
                self.pos += 1;
                if let Tok::Int(k) = self.bump() {
                    if k < 0 {
                        return self.err("negative powers are not supported");
                    }
                    return Ok(Value::S(base.pow(k as u32)));
                }
                unreachable!();
            }
            return Ok(Value::S(base));
        }
        if let Some(i) = sc.frame_index(&name) {
            return Ok(Value::T(Tensor::basis(
                Variance::Multivector,
                sc.rank,
                sc.nv,
                i,
            )));
        }
        if caret_int {
            // coframe element: the prefix plus the index names a frame
            // element, e.g. `e^1` for frame name `e1`
            if let Some(Tok::Int(k)) = self.toks.get(self.pos + 1).map(|t| &t.tok) {
                let full = format!("{}{}", name, k);
                if let Some(i) = sc.frame_index(&full) {
                    self.pos += 2;
                    return Ok(Value::T(Tensor::basis(Variance::Form, sc.rank, sc.nv, i)));
                }
            }
        }
        let (line, _) = self.here();
        Err(Error::UnknownName { name, line })
    }

    fn combine_add(&self, a: Value, b: Value, sub: bool) -> Result<Value, Error> {
        let b = if sub {
            match b {
                Value::S(s) => Value::S(-&s),
                Value::T(t) => Value::T(t.neg()),
                Value::C(v) => Value::C(v.iter().map(|s| -s).collect()),
            }
        } else {
            b
        };
        match (a, b) {
            (Value::S(x), Value::S(y)) => Ok(Value::S(&x + &y)),
            (Value::T(x), Value::T(y)) => {
                let (line, _) = self.here();
                x.add(&y).map(Value::T).map_err(|_| Error::Shape {
                    line,
                    msg: "added tensors of different kinds".into(),
                })
            }
            (Value::C(x), Value::C(y)) => Ok(Value::C(
                x.iter().zip(&y).map(|(u, v)| u + v).collect(),
            )),
            _ => {
                let (line, _) = self.here();
                Err(Error::Shape {
                    line,
                    msg: "added values of different kinds".into(),
                })
            }
        }
    }

    fn combine_mul(&self, a: Value, b: Value) -> Result<Value, Error> {
        match (a, b) {
            (Value::S(x), Value::S(y)) => Ok(Value::S(&x * &y)),
            (Value::S(x), Value::T(t)) | (Value::T(t), Value::S(x)) => Ok(Value::T(t.scale(&x))),
            (Value::S(x), Value::C(v)) | (Value::C(v), Value::S(x)) => {
                Ok(Value::C(v.iter().map(|s| s * &x).collect()))
            }
            _ => {
                let (line, _) = self.here();
                Err(Error::Shape {
                    line,
                    msg: "multiplied two non-scalar values".into(),
                })
            }
        }
    }

    fn combine_div(&self, a: Value, b: Value) -> Result<Value, Error> {
        let (line, _) = self.here();
        let y = match b {
            Value::S(y) => y,
            _ => {
                return Err(Error::Shape {
                    line,
                    msg: "division by a non-scalar".into(),
                })
            }
        };
        let inv = y.inverse().map_err(|_| Error::Shape {
            line,
            msg: "division by zero".into(),
        })?;
        self.combine_mul(a, Value::S(inv))
    }

    fn combine_wedge(&self, a: Value, b: Value) -> Result<Value, Error> {
        match (a, b) {
            (Value::T(x), Value::T(y)) => {
                let (line, _) = self.here();
                x.wedge(&y).map(Value::T).map_err(|_| Error::Shape {
                    line,
                    msg: "wedged tensors of different variances".into(),
                })
            }
            (a, b) => self.combine_mul(a, b),
        }
    }
}

fn tensor_from_value(v: Value, variance: Variance, degree: usize, sc: &Scope, line: usize) -> Result<Tensor, Error> {
    match v {
        Value::T(t) => {
            if t.variance() == variance && t.degree() == degree {
                Ok(t)
            } else if t.is_zero() {
                Ok(Tensor::zero(variance, degree, sc.rank, sc.nv))
            } else {
                Err(Error::Shape {
                    line,
                    msg: "tensor expression does not match the declared kind".into(),
                })
            }
        }
        Value::S(s) => {
            if degree == 0 {
                Ok(Tensor::scalar(variance, sc.rank, s))
            } else if s.is_zero() {
                Ok(Tensor::zero(variance, degree, sc.rank, sc.nv))
            } else {
                Err(Error::Shape {
                    line,
                    msg: "scalar expression where a tensor was declared".into(),
                })
            }
        }
        Value::C(_) => Err(Error::Shape {
            line,
            msg: "chart vector expression outside an anchor declaration".into(),
        }),
    }
}

fn section_from_value(v: Value, sc: &Scope, line: usize) -> Result<Section, Error> {
    let t = tensor_from_value(v, Variance::Multivector, 1, sc, line)?;
    Ok((0..sc.rank).map(|i| t.component(&[i])).collect())
}

/// Parses a model file; the first syntax error is reported with its line
/// and column.
pub fn parse_model(text: &str) -> Result<Model, Error> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
    };
    let mut model = Model::default();
    loop {
        p.eat_newlines();
        if p.pos >= p.toks.len() {
            break;
        }
        let kw = p.ident()?;
        match kw.as_str() {
            "algebroid" => parse_algebroid(&mut p, &mut model)?,
            "tensor" => parse_tensor(&mut p, &mut model)?,
            "check" => parse_check(&mut p, &mut model)?,
            _ => {
                p.pos -= 1;
                return p.err(format!("unknown statement '{}'", kw));
            }
        }
    }
    Ok(model)
}

fn parse_algebroid(p: &mut Parser, model: &mut Model) -> Result<(), Error> {
    let name = p.ident()?;
    p.eat_punct('{')?;
    p.eat_line_end()?;
    let mut coords: Vec<String> = Vec::new();
    let mut frame: Vec<String> = Vec::new();
    let mut anchors: Vec<(String, usize)> = Vec::new();
    let mut brackets: Vec<(String, String, usize)> = Vec::new();
    // body positions are recorded first so anchors and brackets can be
    // evaluated once the frame and coordinates are known
    let close_pos;
    loop {
        p.eat_newlines();
        if *p.peek() == Tok::Punct('}') {
            close_pos = p.pos;
            p.pos += 1;
            break;
        }
        let kw = p.ident()?;
        match kw.as_str() {
            "coords" => {
                p.eat_punct('=')?;
                coords = p.name_list()?;
                p.eat_line_end()?;
            }
            "frame" => {
                p.eat_punct('=')?;
                frame = p.name_list()?;
                p.eat_line_end()?;
            }
            "anchor" => {
                let sec = p.ident()?;
                p.eat_punct('=')?;
                anchors.push((sec, p.pos));
                skip_to_line_end(p)?;
            }
            "bracket" => {
                p.eat_punct('[')?;
                let a = p.ident()?;
                p.eat_punct(',')?;
                let b = p.ident()?;
                p.eat_punct(']')?;
                p.eat_punct('=')?;
                brackets.push((a, b, p.pos));
                skip_to_line_end(p)?;
            }
            _ => {
                p.pos -= 1;
                return p.err(format!("unknown algebroid field '{}'", kw));
            }
        }
    }
    if frame.is_empty() {
        return p.err("algebroid block without a frame declaration");
    }
    let rank = frame.len();
    let nv = coords.len();
    let sc = Scope {
        coords: &coords,
        frame: &frame,
        rank,
        nv,
    };
    let mut anchor_rows = Algebroid::zero_anchor(rank, nv);
    for (sec, pos) in &anchors {
        let line = p.toks[*pos].line;
        let i = sc.frame_index(sec).ok_or(Error::UnknownName {
            name: sec.clone(),
            line,
        })?;
        p.pos = *pos;
        let v = p.expr(&sc)?;
        p.eat_line_end()?;
        anchor_rows[i] = match v {
            Value::C(row) => row,
            Value::S(s) if s.is_zero() && nv == 0 => Vec::new(),
            _ => {
                return Err(Error::Shape {
                    line,
                    msg: "anchor value is not a chart vector field".into(),
                })
            }
        };
    }
    let mut a = Algebroid::new(rank, nv, anchor_rows);
    for (x, y, pos) in &brackets {
        let line = p.toks[*pos].line;
        let i = sc.frame_index(x).ok_or(Error::UnknownName {
            name: x.clone(),
            line,
        })?;
        let j = sc.frame_index(y).ok_or(Error::UnknownName {
            name: y.clone(),
            line,
        })?;
        if i == j {
            return Err(Error::Shape {
                line,
                msg: "bracket of a frame element with itself".into(),
            });
        }
        p.pos = *pos;
        let v = p.expr(&sc)?;
        p.eat_line_end()?;
        let sec = section_from_value(v, &sc, line)?;
        if i < j {
            a.set_bracket(i, j, sec);
        } else {
            a.set_bracket(j, i, sec.iter().map(|s| -s).collect());
        }
    }
    // resume after the closing brace
    p.pos = close_pos + 1;
    model.algebroids.push(NamedAlgebroid {
        name,
        coords,
        frame,
        algebroid: a,
    });
    Ok(())
}

fn skip_to_line_end(p: &mut Parser) -> Result<(), Error> {
    while !matches!(p.peek(), Tok::Newline) {
        if p.pos >= p.toks.len() {
            return p.err("unexpected end of input");
        }
        p.pos += 1;
    }
    p.pos += 1;
    Ok(())
}

fn parse_tensor(p: &mut Parser, model: &mut Model) -> Result<(), Error> {
    let name = p.ident()?;
    p.eat_punct(':')?;
    let kind = p.ident()?;
    let degree = if kind == "form" || kind == "multivector" {
        p.eat_punct('(')?;
        let d = match p.bump() {
            Tok::Int(v) if v >= 0 => v as usize,
            _ => {
                p.pos -= 1;
                return p.err("expected a degree");
            }
        };
        p.eat_punct(')')?;
        d
    } else {
        0
    };
    let on = p.ident()?;
    if on != "on" {
        p.pos -= 1;
        return p.err("expected 'on'");
    }
    let base = p.ident()?;
    let (line, _) = p.here();
    let named = model.algebroid(&base).map_err(|_| Error::UnknownName {
        name: base.clone(),
        line,
    })?;
    let sc = Scope {
        coords: &named.coords,
        frame: &named.frame,
        rank: named.algebroid.rank(),
        nv: named.algebroid.chart_dim(),
    };
    p.eat_punct('=')?;
    let value = match kind.as_str() {
        "form" => {
            let v = p.expr(&sc)?;
            TensorValue::Form(tensor_from_value(v, Variance::Form, degree, &sc, line)?)
        }
        "multivector" => {
            let v = p.expr(&sc)?;
            TensorValue::Multivector(tensor_from_value(
                v,
                Variance::Multivector,
                degree,
                &sc,
                line,
            )?)
        }
        "metric" => TensorValue::Metric(parse_matrix(p, &sc)?),
        "endo" => TensorValue::Endo(parse_matrix(p, &sc)?),
        _ => {
            return Err(Error::Shape {
                line,
                msg: format!("unknown tensor kind '{}'", kind),
            })
        }
    };
    p.eat_line_end()?;
    model.tensors.push(NamedTensor { name, base, value });
    Ok(())
}

fn parse_matrix(p: &mut Parser, sc: &Scope) -> Result<Matrix, Error> {
    p.eat_punct('[')?;
    let mut rows = Vec::new();
    loop {
        p.eat_punct('[')?;
        let mut row = Vec::new();
        loop {
            let v = p.expr(sc)?;
            let (line, _) = p.here();
            match v {
                Value::S(s) => row.push(s),
                _ => {
                    return Err(Error::Shape {
                        line,
                        msg: "matrix entries must be scalars".into(),
                    })
                }
            }
            if *p.peek() == Tok::Punct(',') {
                p.pos += 1;
            } else {
                break;
            }
        }
        p.eat_punct(']')?;
        rows.push(row);
        if *p.peek() == Tok::Punct(',') {
            p.pos += 1;
        } else {
            break;
        }
    }
    p.eat_punct(']')?;
    let (line, _) = p.here();
    if rows.len() != sc.rank || rows.iter().any(|r| r.len() != sc.rank) {
        return Err(Error::Shape {
            line,
            msg: "matrix shape does not match the frame rank".into(),
        });
    }
    Ok(rows)
}

fn parse_check(p: &mut Parser, model: &mut Model) -> Result<(), Error> {
    let (line, _) = p.here();
    let name = p.ident()?;
    p.eat_punct('(')?;
    let mut args = Vec::new();
    if *p.peek() != Tok::Punct(')') {
        loop {
            args.push(p.ident()?);
            if *p.peek() == Tok::Punct(',') {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.eat_punct(')')?;
    p.eat_line_end()?;
    model.checks.push(CheckRequest { name, args, line });
    Ok(())
}

fn rational_string(r: &BigRational) -> String {
    format!("{}", r)
}

fn poly_string(p: &Poly, coords: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (mono, coeff) in p.terms() {
        let mut factors = Vec::new();
        let c = rational_string(coeff);
        if c != "1" || mono.is_constant() {
            factors.push(c);
        }
        for (i, &e) in mono.0.iter().enumerate() {
            if e == 1 {
                factors.push(coords[i].clone());
            } else if e > 1 {
                factors.push(format!("{}^{}", coords[i], e));
            }
        }
        parts.push(factors.join("*"));
    }
    parts.join(" + ")
}

/// Prints a scalar as a re-parseable expression.
pub fn scalar_string(s: &Scalar, coords: &[String]) -> String {
    if s.denominator().is_constant() {
        poly_string(s.numerator(), coords)
    } else {
        format!(
            "({})/({})",
            poly_string(s.numerator(), coords),
            poly_string(s.denominator(), coords)
        )
    }
}

fn tensor_string(t: &Tensor, frame: &[String], coords: &[String]) -> String {
    if t.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (idx, c) in t.components() {
        let coeff = format!("({})", scalar_string(c, coords));
        let factors: Vec<String> = idx
            .iter()
            .map(|&i| match t.variance() {
                Variance::Multivector => frame[i].clone(),
                Variance::Form => {
                    // frame names are `<prefix><index>`; split for e^k form
                    let name = &frame[i];
                    let split = name.find(|ch: char| ch.is_ascii_digit()).unwrap_or(name.len());
                    format!("{}^{}", &name[..split], &name[split..])
                }
            })
            .collect();
        parts.push(if idx.is_empty() {
            coeff
        } else {
            format!("{}*{}", coeff, factors.join("^"))
        });
    }
    parts.join(" + ")
}

fn matrix_string(m: &Matrix, coords: &[String]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|v| scalar_string(v, coords)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Prints a model in the input syntax; parsing the output reproduces the
/// model exactly.
pub fn print_model(m: &Model) -> String {
    let mut out = String::new();
    let mut frames: HashMap<&str, (&Vec<String>, &Vec<String>)> = HashMap::new();
    for a in &m.algebroids {
        frames.insert(&a.name, (&a.frame, &a.coords));
        let _ = writeln!(out, "algebroid {} {{", a.name);
        if !a.coords.is_empty() {
            let _ = writeln!(out, "  coords = [{}]", a.coords.join(", "));
        }
        let _ = writeln!(out, "  frame = [{}]", a.frame.join(", "));
        for (i, row) in a.algebroid.anchor_matrix().iter().enumerate() {
            if row.iter().all(Scalar::is_zero) {
                continue;
            }
            let terms: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_zero())
                .map(|(j, s)| format!("({})*d/{}", scalar_string(s, &a.coords), a.coords[j]))
                .collect();
            let _ = writeln!(out, "  anchor {} = {}", a.frame[i], terms.join(" + "));
        }
        let r = a.algebroid.rank();
        for i in 0..r {
            for j in (i + 1)..r {
                let sec = a.algebroid.structure_function(i, j);
                if sec.iter().all(Scalar::is_zero) {
                    continue;
                }
                let terms: Vec<String> = sec
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| !s.is_zero())
                    .map(|(k, s)| format!("({})*{}", scalar_string(s, &a.coords), a.frame[k]))
                    .collect();
                let _ = writeln!(
                    out,
                    "  bracket [{}, {}] = {}",
                    a.frame[i],
                    a.frame[j],
                    terms.join(" + ")
                );
            }
        }
        let _ = writeln!(out, "}}");
    }
    for t in &m.tensors {
        let (frame, coords) = frames
            .get(t.base.as_str())
            .copied()
            .expect("tensor bases resolve in a valid model");
        let (kind, body) = match &t.value {
            TensorValue::Form(x) => (
                format!("form({})", x.degree()),
                tensor_string(x, frame, coords),
            ),
            TensorValue::Multivector(x) => (
                format!("multivector({})", x.degree()),
                tensor_string(x, frame, coords),
            ),
            TensorValue::Metric(x) => ("metric".into(), matrix_string(x, coords)),
            TensorValue::Endo(x) => ("endo".into(), matrix_string(x, coords)),
        };
        let _ = writeln!(out, "tensor {} : {} on {} = {}", t.name, kind, t.base, body);
    }
    for c in &m.checks {
        let _ = writeln!(out, "check {}({})", c.name, c.args.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Scalar;

    const HEIS: &str = "
# rank-3 frame over a point
algebroid H {
  frame = [e1, e2, e3]
  bracket [e1, e2] = e3
}
tensor pi : multivector(2) on H = -1*e1^e2
tensor eta : form(1) on H = e^3
tensor g : metric on H = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
check contact(H, eta)
";

    #[test]
    fn parses_rank3_model() {
        let m = parse_model(HEIS).unwrap();
        assert_eq!(m.algebroids.len(), 1);
        let a = &m.algebroids[0].algebroid;
        assert_eq!(a.rank(), 3);
        assert_eq!(a.chart_dim(), 0);
        assert_eq!(a.structure_function(0, 1)[2], Scalar::one(0));
        assert_eq!(m.tensors.len(), 3);
        match &m.tensor("pi").unwrap().value {
            TensorValue::Multivector(t) => {
                assert_eq!(t.component(&[0, 1]), Scalar::from_int(0, -1))
            }
            _ => panic!("expected a multivector"),
        }
        match &m.tensor("eta").unwrap().value {
            TensorValue::Form(t) => assert_eq!(t.component(&[2]), Scalar::one(0)),
            _ => panic!("expected a form"),
        }
        assert_eq!(m.checks.len(), 1);
        assert_eq!(m.checks[0].name, "contact");
        assert_eq!(m.checks[0].args, vec!["H", "eta"]);
    }

    #[test]
    fn parses_chart_model_with_anchor() {
        let text = "
algebroid T {
  coords = [x, y]
  frame = [e1, e2]
  anchor e1 = d/dx
  anchor e2 = x^2*d/dx + d/dy
}
tensor omega : form(2) on T = (x + 1)*e^1^e^2
";
        let m = parse_model(text).unwrap();
        let a = &m.algebroids[0].algebroid;
        assert_eq!(a.anchor_matrix()[0][0], Scalar::one(2));
        assert_eq!(a.anchor_matrix()[1][0], Scalar::var(2, 0).pow(2));
        assert_eq!(a.anchor_matrix()[1][1], Scalar::one(2));
        match &m.tensor("omega").unwrap().value {
            TensorValue::Form(t) => {
                let want = &Scalar::var(2, 0) + &Scalar::one(2);
                assert_eq!(t.component(&[0, 1]), want);
            }
            _ => panic!("expected a form"),
        }
    }

    #[test]
    fn unknown_name_is_located() {
        let text = "
algebroid H {
  frame = [e1, e2, e3]
  bracket [e1, e9] = e3
}
";
        match parse_model(text) {
            Err(Error::UnknownName { name, line }) => {
                assert_eq!(name, "e9");
                assert_eq!(line, 4);
            }
            other => panic!("expected an unknown-name error, got {:?}", other),
        }
    }

    #[test]
    fn syntax_error_is_located() {
        let text = "algebroid H {\n  frame = e1\n}\n";
        match parse_model(text) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a syntax error, got {:?}", other),
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let m = parse_model(HEIS).unwrap();
        let printed = print_model(&m);
        let again = parse_model(&printed).unwrap();
        assert_eq!(m, again);

        let chart = "
algebroid T {
  coords = [x, y]
  frame = [e1, e2]
  anchor e1 = d/dx + x*d/dy
  bracket [e1, e2] = x^2*e1 + e2
}
tensor s : form(0) on T = x^2 + 1/2
tensor q : multivector(2) on T = e1^e2
tensor g : metric on T = [[1, 0], [0, x^2 + 1]]
check poisson(T, q)
";
        let m2 = parse_model(chart).unwrap();
        let again2 = parse_model(&print_model(&m2)).unwrap();
        assert_eq!(m2, again2);
    }

    #[test]
    fn rational_scalar_round_trips() {
        let text = "
algebroid T {
  coords = [x]
  frame = [e1]
}
tensor f : form(0) on T = (x + 1)/(x^2 + 1)
";
        let m = parse_model(text).unwrap();
        let again = parse_model(&print_model(&m)).unwrap();
        assert_eq!(m, again);
    }
}
