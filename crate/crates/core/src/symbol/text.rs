//! Line-oriented text format for symbols.
//!
//! ```text
//! # winding generator
//! order 0
//! depth 3
//! component 0
//! plus: exp(i*1*x)
//! minus: 1
//! ```
//!
//! Headers are `order <real>`, `depth <int>`, then optional `matrix <int>`.
//! Each `component <j>` block (degree = order - j) carries `plus:` and
//! `minus:` expression lines; missing components and branches are zero.
//! A matrix expression is `[ row ; row ]` with comma-separated entries;
//! scalars may omit the brackets. Expressions are sums of products of
//! decimal numbers, `i`, `exp(i*K*x)`, `exp(-i*K*x)`, `cos(K*x)` and
//! `sin(K*x)`, with parentheses.

use super::{ClassicalSymbol, CoeffMatrix, HomComponent, SymbolError};
use crate::fourier::CoeffFn;
use num_complex::Complex64;

pub fn parse_symbol(input: &str) -> Result<ClassicalSymbol, SymbolError> {
    Parser::new(input).parse()
}

pub fn render_symbol(sym: &ClassicalSymbol) -> String {
    let mut out = String::new();
    out.push_str(&format!("order {}\n", fmt_f64(sym.order())));
    out.push_str(&format!("depth {}\n", sym.depth()));
    if sym.dim() > 1 {
        out.push_str(&format!("matrix {}\n", sym.dim()));
    }
    for (j, comp) in sym.components().iter().enumerate() {
        if comp.is_zero(0.0) {
            continue;
        }
        out.push_str(&format!("component {j}\n"));
        if !comp.plus.is_zero(0.0) {
            out.push_str(&format!("plus: {}\n", render_matrix(&comp.plus)));
        }
        if !comp.minus.is_zero(0.0) {
            out.push_str(&format!("minus: {}\n", render_matrix(&comp.minus)));
        }
    }
    out
}

fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format!("{v:?}")
    }
}

fn render_matrix(m: &CoeffMatrix) -> String {
    if m.dim() == 1 {
        return render_fn(m.at(0, 0));
    }
    let rows: Vec<String> = (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| render_fn(m.at(i, j)))
                .collect::<Vec<_>>()
                .join(" , ")
        })
        .collect();
    format!("[ {} ]", rows.join(" ; "))
}

fn render_complex(c: Complex64) -> String {
    let re = if c.re == 0.0 { 0.0 } else { c.re };
    let im = if c.im == 0.0 { 0.0 } else { c.im };
    if im == 0.0 {
        fmt_f64(re)
    } else if re == 0.0 {
        format!("{}*i", fmt_f64(im))
    } else if im < 0.0 {
        format!("({}-{}*i)", fmt_f64(re), fmt_f64(-im))
    } else {
        format!("({}+{}*i)", fmt_f64(re), fmt_f64(im))
    }
}

fn render_fn(f: &CoeffFn) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in f.iter() {
        let coeff = render_complex(c);
        let term = if k == 0 {
            coeff
        } else if k > 0 {
            format!("{coeff}*exp(i*{k}*x)")
        } else {
            format!("{coeff}*exp(-i*{}*x)", -k)
        };
        if out.is_empty() {
            out = term;
        } else if let Some(rest) = term.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(term.as_str());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Sym(char),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>, // token, line, col
    pos: usize,
    line_of_eof: usize,
}

impl Lexer {
    fn new(line: &str, line_no: usize) -> Result<Self, SymbolError> {
        let mut toks = Vec::new();
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                break;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<f64>().map_err(|_| SymbolError::Parse {
                    line: line_no,
                    col,
                    message: format!("bad number `{text}`"),
                })?;
                toks.push((Tok::Number(value), line_no, col));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(text), line_no, col));
            } else if "+-*(),;:[]".contains(c) {
                toks.push((Tok::Sym(c), line_no, col));
                i += 1;
            } else {
                return Err(SymbolError::Parse {
                    line: line_no,
                    col,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        Ok(Lexer {
            toks,
            pos: 0,
            line_of_eof: line_no,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((self.line_of_eof, 0))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), SymbolError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Tok::Sym(got)) if got == c => Ok(()),
            other => Err(SymbolError::Parse {
                line,
                col,
                message: format!("expected `{c}`, found {other:?}"),
            }),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SymbolError> {
        let (line, col) = self.here();
        Err(SymbolError::Parse {
            line,
            col,
            message: message.into(),
        })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    cursor: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        let lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let trimmed = l.trim();
                !trimmed.is_empty() && !trimmed.starts_with('#')
            })
            .collect();
        Parser { lines, cursor: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.cursor).copied();
        self.cursor += 1;
        item
    }

    fn peek_keyword(&self) -> Option<String> {
        self.lines.get(self.cursor).map(|(_, l)| {
            l.trim_start()
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                .collect()
        })
    }

    fn parse(&mut self) -> Result<ClassicalSymbol, SymbolError> {
        let order = self.header_number("order")?;
        let depth = self.header_number("depth")? as usize;
        if depth == 0 {
            return Err(SymbolError::Parse {
                line: 0,
                col: 0,
                message: "depth must be positive".into(),
            });
        }
        let dim = if self.peek_keyword().as_deref() == Some("matrix") {
            let d = self.header_number("matrix")? as usize;
            if d == 0 {
                return Err(SymbolError::Parse {
                    line: 0,
                    col: 0,
                    message: "matrix size must be positive".into(),
                });
            }
            d
        } else {
            1
        };
        let mut sym = ClassicalSymbol::zero(order, depth, dim);
        while let Some((line_no, line)) = self.next_line() {
            let mut lex = Lexer::new(line, line_no)?;
            match lex.next() {
                Some(Tok::Ident(w)) if w == "component" => {
                    let j = match lex.next() {
                        Some(Tok::Number(n)) if n >= 0.0 && n.fract() == 0.0 => n as usize,
                        _ => {
                            return Err(SymbolError::Parse {
                                line: line_no,
                                col: 1,
                                message: "component needs a nonnegative integer index".into(),
                            })
                        }
                    };
                    if j >= depth {
                        return Err(SymbolError::Parse {
                            line: line_no,
                            col: 1,
                            message: format!("component index {j} >= depth {depth}"),
                        });
                    }
                    let comp = self.parse_component(order - j as f64, dim)?;
                    *sym.component_mut(j) = comp;
                }
                other => {
                    return Err(SymbolError::Parse {
                        line: line_no,
                        col: 1,
                        message: format!("expected `component <j>`, found {other:?}"),
                    })
                }
            }
        }
        Ok(sym)
    }

    fn header_number(&mut self, keyword: &str) -> Result<f64, SymbolError> {
        match self.next_line() {
            Some((line_no, line)) => {
                let mut lex = Lexer::new(line, line_no)?;
                match lex.next() {
                    Some(Tok::Ident(w)) if w == keyword => {}
                    other => {
                        return Err(SymbolError::Parse {
                            line: line_no,
                            col: 1,
                            message: format!("expected `{keyword} <value>`, found {other:?}"),
                        })
                    }
                }
                let sign = if lex.peek() == Some(&Tok::Sym('-')) {
                    lex.next();
                    -1.0
                } else {
                    1.0
                };
                match lex.next() {
                    Some(Tok::Number(n)) if lex.at_end() => Ok(sign * n),
                    _ => Err(SymbolError::Parse {
                        line: line_no,
                        col: 1,
                        message: format!("malformed `{keyword}` line"),
                    }),
                }
            }
            None => Err(SymbolError::Parse {
                line: 0,
                col: 0,
                message: format!("missing `{keyword}` header"),
            }),
        }
    }

    fn parse_component(&mut self, degree: f64, dim: usize) -> Result<HomComponent, SymbolError> {
        let mut comp = HomComponent::zero(degree, dim);
        while let Some(word) = self.peek_keyword() {
            if word != "plus" && word != "minus" {
                break;
            }
            let (line_no, line) = self.next_line().unwrap();
            let mut lex = Lexer::new(line, line_no)?;
            let branch = match lex.next() {
                Some(Tok::Ident(w)) => w,
                _ => unreachable!(),
            };
            lex.expect_sym(':')?;
            let matrix = parse_matrix(&mut lex, dim)?;
            if !lex.at_end() {
                return lex.err("trailing tokens after expression");
            }
            if branch == "plus" {
                comp.plus = matrix;
            } else {
                comp.minus = matrix;
            }
        }
        Ok(comp)
    }
}

fn parse_matrix(lex: &mut Lexer, dim: usize) -> Result<CoeffMatrix, SymbolError> {
    if lex.peek() == Some(&Tok::Sym('[')) {
        lex.next();
        let mut rows: Vec<Vec<CoeffFn>> = Vec::new();
        loop {
            let mut row = vec![parse_expr(lex)?];
            while lex.peek() == Some(&Tok::Sym(',')) {
                lex.next();
                row.push(parse_expr(lex)?);
            }
            rows.push(row);
            match lex.next() {
                Some(Tok::Sym(';')) => continue,
                Some(Tok::Sym(']')) => break,
                _ => return lex.err("expected `;` or `]` in matrix"),
            }
        }
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return lex.err(format!("matrix shape must be {dim}x{dim}"));
        }
        Ok(CoeffMatrix::from_entries(
            dim,
            rows.into_iter().flatten().collect(),
        ))
    } else {
        if dim != 1 {
            return lex.err(format!("matrix symbol of size {dim} needs `[ ... ]`"));
        }
        Ok(CoeffMatrix::scalar(parse_expr(lex)?))
    }
}

fn parse_expr(lex: &mut Lexer) -> Result<CoeffFn, SymbolError> {
    let mut negate = false;
    if lex.peek() == Some(&Tok::Sym('-')) {
        lex.next();
        negate = true;
    }
    let mut acc = parse_term(lex)?;
    if negate {
        acc = acc.scale(Complex64::new(-1.0, 0.0));
    }
    while let Some(Tok::Sym(op)) = lex.peek() {
        let op = *op;
        if op != '+' && op != '-' {
            break;
        }
        lex.next();
        let rhs = parse_term(lex)?;
        acc = if op == '+' {
            acc.add(&rhs)
        } else {
            acc.sub(&rhs)
        };
    }
    Ok(acc)
}

fn parse_term(lex: &mut Lexer) -> Result<CoeffFn, SymbolError> {
    let mut acc = parse_factor(lex)?;
    while lex.peek() == Some(&Tok::Sym('*')) {
        lex.next();
        acc = acc.mul(&parse_factor(lex)?);
    }
    Ok(acc)
}

fn parse_factor(lex: &mut Lexer) -> Result<CoeffFn, SymbolError> {
    match lex.next() {
        Some(Tok::Number(n)) => Ok(CoeffFn::constant(Complex64::new(n, 0.0))),
        Some(Tok::Ident(w)) if w == "i" => Ok(CoeffFn::constant(Complex64::new(0.0, 1.0))),
        Some(Tok::Ident(w)) if w == "exp" => {
            lex.expect_sym('(')?;
            let mut sign = 1i64;
            if lex.peek() == Some(&Tok::Sym('-')) {
                lex.next();
                sign = -1;
            }
            match lex.next() {
                Some(Tok::Ident(w)) if w == "i" => {}
                _ => return lex.err("expected `i` in exp(i*K*x)"),
            }
            lex.expect_sym('*')?;
            let k = parse_int(lex)?;
            lex.expect_sym('*')?;
            expect_x(lex)?;
            lex.expect_sym(')')?;
            Ok(CoeffFn::monomial(sign * k))
        }
        Some(Tok::Ident(w)) if w == "cos" || w == "sin" => {
            lex.expect_sym('(')?;
            let k = parse_int(lex)?;
            lex.expect_sym('*')?;
            expect_x(lex)?;
            lex.expect_sym(')')?;
            Ok(if w == "cos" {
                CoeffFn::cosine(k)
            } else {
                CoeffFn::sine(k)
            })
        }
        Some(Tok::Sym('(')) => {
            let inner = parse_expr(lex)?;
            lex.expect_sym(')')?;
            Ok(inner)
        }
        other => lex.err(format!("expected a factor, found {other:?}")),
    }
}

fn parse_int(lex: &mut Lexer) -> Result<i64, SymbolError> {
    match lex.next() {
        Some(Tok::Number(n)) if n.fract() == 0.0 => Ok(n as i64),
        _ => lex.err("expected an integer"),
    }
}

fn expect_x(lex: &mut Lexer) -> Result<(), SymbolError> {
    match lex.next() {
        Some(Tok::Ident(w)) if w == "x" => Ok(()),
        _ => lex.err("expected `x`"),
    }
}
