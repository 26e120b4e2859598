//! Mapping description files.
//!
//! ```text
//! # comment
//! dim 3
//! F1 = x1
//! F2 = x2
//! F3 = x1*x2*x3
//! ```
//!
//! Expressions use `+ - * / ^`, integer exponents, rational literals `a/b`,
//! the imaginary unit `i` and parentheses. Division is only allowed by a
//! nonzero constant.

use std::fmt;

use num_traits::Zero;

use crate::poly::{Degree, GaussianRational, Polynomial, PolynomialMapping};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownVariable(String),
    ComponentOutOfRange { index: usize, dim: usize },
    DuplicateComponent(usize),
    MissingComponents(Vec<usize>),
    DimensionHeader(String),
    DegreeTooHigh { degree: u32, max: u32 },
}

/// A diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ParseErrorKind::ComponentOutOfRange { index, dim } => {
                write!(f, "component F{index} out of range for dim {dim}")
            }
            ParseErrorKind::DuplicateComponent(i) => write!(f, "duplicate component F{i}"),
            ParseErrorKind::MissingComponents(v) => {
                let names: Vec<String> = v.iter().map(|i| format!("F{i}")).collect();
                write!(f, "missing components {}", names.join(", "))
            }
            ParseErrorKind::DimensionHeader(m) => write!(f, "dimension header: {m}"),
            ParseErrorKind::DegreeTooHigh { degree, max } => {
                write!(f, "degree {degree} exceeds the maximum {max}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub max_degree: Option<u32>,
}

/// The raw, unvalidated content of a mapping file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSource {
    pub raw_text: String,
    pub declared_dim: usize,
    /// `(component index, expression, line, column of the expression)`.
    pub assignments: Vec<(usize, String, usize, usize)>,
}

impl MappingSource {
    pub fn scan(text: &str) -> Result<Self, ParseError> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut dim: Option<usize> = None;
        let mut assignments: Vec<(usize, String, usize, usize)> = Vec::new();
        for (ln, raw_line) in text.split('\n').enumerate() {
            let line_no = ln + 1;
            let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
            let content = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            };
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.chars().take_while(|c| c.is_whitespace()).count() + 1;
            let Some(n) = dim else {
                let mut parts = trimmed.split_whitespace();
                let (Some("dim"), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(ParseError {
                        line: line_no,
                        column: indent,
                        kind: ParseErrorKind::DimensionHeader(
                            "first non-comment line must be `dim <n>`".into(),
                        ),
                    });
                };
                let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or(ParseError {
                    line: line_no,
                    column: indent,
                    kind: ParseErrorKind::DimensionHeader(format!("invalid dimension `{v}`")),
                })?;
                dim = Some(n);
                continue;
            };
            let Some(eq) = trimmed.find('=') else {
                return Err(ParseError {
                    line: line_no,
                    column: indent,
                    kind: ParseErrorKind::Syntax("expected `F<j> = <expr>`".into()),
                });
            };
            let lhs = trimmed[..eq].trim();
            let idx = lhs
                .strip_prefix('F')
                .filter(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| ParseError {
                    line: line_no,
                    column: indent,
                    kind: ParseErrorKind::Syntax(format!("expected a component name, found `{lhs}`")),
                })?;
            if idx == 0 || idx > n {
                return Err(ParseError {
                    line: line_no,
                    column: indent,
                    kind: ParseErrorKind::ComponentOutOfRange { index: idx, dim: n },
                });
            }
            if assignments.iter().any(|(j, ..)| *j == idx) {
                return Err(ParseError {
                    line: line_no,
                    column: indent,
                    kind: ParseErrorKind::DuplicateComponent(idx),
                });
            }
            let rhs_offset = content.find('=').expect("found above") + 1;
            let col = content[..rhs_offset].chars().count() + 1;
            assignments.push((idx, content[rhs_offset..].to_string(), line_no, col));
        }
        let Some(declared_dim) = dim else {
            return Err(ParseError {
                line: 1,
                column: 1,
                kind: ParseErrorKind::DimensionHeader("missing `dim <n>` header".into()),
            });
        };
        let missing: Vec<usize> = (1..=declared_dim)
            .filter(|j| !assignments.iter().any(|(i, ..)| i == j))
            .collect();
        if !missing.is_empty() {
            let line = text.lines().count().max(1);
            return Err(ParseError {
                line,
                column: 1,
                kind: ParseErrorKind::MissingComponents(missing),
            });
        }
        Ok(Self {
            raw_text: text.to_string(),
            declared_dim,
            assignments,
        })
    }

    pub fn build(&self, opts: ParseOptions) -> Result<PolynomialMapping, ParseError> {
        let n = self.declared_dim;
        let mut comps = vec![Polynomial::zero(n); n];
        for (idx, expr, line, col) in &self.assignments {
            let p = parse_expression(expr, n).map_err(|mut e| {
                if e.line == 1 {
                    e.column += col - 1;
                }
                e.line += line - 1;
                e
            })?;
            if let (Some(max), Degree::Finite(d)) = (opts.max_degree, p.degree()) {
                if d > max {
                    return Err(ParseError {
                        line: *line,
                        column: *col,
                        kind: ParseErrorKind::DegreeTooHigh { degree: d, max },
                    });
                }
            }
            comps[idx - 1] = p;
        }
        Ok(PolynomialMapping::new(comps).expect("components share the declared dimension"))
    }
}

pub fn parse_mapping(text: &str) -> Result<PolynomialMapping, ParseError> {
    parse_mapping_with(text, ParseOptions::default())
}

pub fn parse_mapping_with(text: &str, opts: ParseOptions) -> Result<PolynomialMapping, ParseError> {
    MappingSource::scan(text)?.build(opts)
}

/// Canonical text; `parse_mapping(render_mapping(f)) == f`.
pub fn render_mapping(f: &PolynomialMapping) -> String {
    let mut out = format!("dim {}", f.n());
    for (j, p) in f.components().iter().enumerate() {
        out.push_str(&format!("\nF{} = {p}", j + 1));
    }
    out
}

/// Parses a single expression in variables `x1..x{num_vars}`.
pub fn parse_expression(src: &str, num_vars: usize) -> Result<Polynomial, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = ExprParser {
        tokens,
        pos: 0,
        num_vars,
        src_len: src.chars().count(),
    };
    let e = p.expr()?;
    if let Some(t) = p.tokens.get(p.pos) {
        return Err(p.error_at(t.col, format!("unexpected `{}`", t.kind)));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Int(num_bigint::BigInt),
    Ident(String),
    Op(char),
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Int(v) => write!(f, "{v}"),
            TokKind::Ident(s) => write!(f, "{s}"),
            TokKind::Op(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = col;
        if c.is_ascii_digit() {
            let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
            i += s.len();
            col += s.len();
            if chars.get(i) == Some(&'.') {
                return Err(ParseError {
                    line,
                    column: col,
                    kind: ParseErrorKind::Syntax("floating-point literals are not allowed".into()),
                });
            }
            out.push(Token {
                kind: TokKind::Int(s.parse().expect("digits")),
                line,
                col: start,
            });
        } else if c.is_alphabetic() {
            let s: String = chars[i..]
                .iter()
                .take_while(|c| c.is_alphanumeric() || **c == '_')
                .collect();
            let len = s.chars().count();
            i += len;
            col += len;
            out.push(Token {
                kind: TokKind::Ident(s),
                line,
                col: start,
            });
        } else if "+-*/^()".contains(c) {
            i += 1;
            col += 1;
            out.push(Token {
                kind: TokKind::Op(c),
                line,
                col: start,
            });
        } else {
            return Err(ParseError {
                line,
                column: col,
                kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
            });
        }
    }
    Ok(out)
}

struct ExprParser {
    tokens: Vec<Token>,
    pos: usize,
    num_vars: usize,
    src_len: usize,
}

impl ExprParser {
    fn error_at(&self, col: usize, msg: String) -> ParseError {
        let line = self.tokens.get(self.pos).map_or(1, |t| t.line);
        ParseError {
            line,
            column: col,
            kind: ParseErrorKind::Syntax(msg),
        }
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos).map(|t| &t.kind) {
            Some(TokKind::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn end_col(&self) -> usize {
        self.src_len + 1
    }

    // expr := ['-'|'+'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                -self.term()?
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            let op_col = self.tokens[self.pos].col;
            self.pos += 1;
            let rhs = self.unary()?;
            if op == '*' {
                acc = &acc * &rhs;
            } else {
                let c = rhs
                    .constant_value()
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| self.error_at(op_col, "division only by a nonzero constant".into()))?;
                acc = acc.scale(&c.inv().expect("nonzero"));
            }
        }
        Ok(acc)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    // power := atom ('^' int)?
    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token {
                    kind: TokKind::Int(v),
                    col,
                    ..
                }) => {
                    let col = *col;
                    let e: u32 = v
                        .try_into()
                        .ok()
                        .filter(|&e: &u32| e <= 64)
                        .ok_or_else(|| self.error_at(col, "exponent too large".into()))?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                Some(t) => {
                    let col = t.col;
                    return Err(self.error_at(col, "expected a non-negative integer exponent".into()));
                }
                None => {
                    return Err(self.error_at(self.end_col(), "expected an exponent".into()));
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let Some(tok) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error_at(self.end_col(), "unexpected end of expression".into()));
        };
        self.pos += 1;
        match tok.kind {
            TokKind::Int(v) => Ok(Polynomial::constant(
                self.num_vars,
                GaussianRational::from(num_rational::BigRational::from_integer(v)),
            )),
            TokKind::Ident(name) => {
                if name == "i" {
                    return Ok(Polynomial::constant(self.num_vars, GaussianRational::i()));
                }
                let idx = name
                    .strip_prefix('x')
                    .filter(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&j| j >= 1 && j <= self.num_vars);
                match idx {
                    Some(j) => Ok(Polynomial::var(self.num_vars, j - 1)),
                    None => Err(ParseError {
                        line: tok.line,
                        column: tok.col,
                        kind: ParseErrorKind::UnknownVariable(name),
                    }),
                }
            }
            TokKind::Op('(') => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    let col = self.tokens.get(self.pos).map_or(self.end_col(), |t| t.col);
                    return Err(self.error_at(col, "expected `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            TokKind::Op(c) => Err(ParseError {
                line: tok.line,
                column: tok.col,
                kind: ParseErrorKind::Syntax(format!("unexpected `{c}`")),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_product_mapping() {
        let f = parse_mapping("dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3").unwrap();
        let x = |i| Polynomial::var(3, i);
        assert_eq!(f.component(2), &(&(&x(0) * &x(1)) * &x(2)));
        assert_eq!(render_mapping(&f), "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3");
    }

    #[test]
    fn missing_component_is_reported() {
        let err = parse_mapping("dim 3\nF1 = x1\nF2 = x1").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingComponents(vec![3]));
    }

    #[test]
    fn duplicate_component_is_reported() {
        let err = parse_mapping("dim 2\nF1 = x1\nF1 = x2\nF2 = x1").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateComponent(1));
        assert_eq!(err.line, 3);
    }

    #[test]
    fn gaussian_coefficient_round_trip() {
        let src = "dim 3\nF1 = (1/2+i)*x1^2 - x2\nF2 = x3\nF3 = x1";
        let f = parse_mapping(src).unwrap();
        let c = f.component(0).coefficient(&crate::poly::Monomial(vec![2, 0, 0]));
        assert_eq!(c, GaussianRational::from_parts(1, 2, 1, 1));
        assert_eq!(parse_mapping(&render_mapping(&f)).unwrap(), f);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_mapping("dim 2\nF1 = x1 + y\nF2 = x2").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownVariable("y".into()));
        assert_eq!((err.line, err.column), (2, 11));

        let err = parse_mapping("dim 2\nF1 = x3\nF2 = x2").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnknownVariable(_)));

        let err = parse_mapping("dim 2\nF3 = x1\nF2 = x2").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ComponentOutOfRange { index: 3, dim: 2 });

        let err = parse_mapping("F1 = x1").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::DimensionHeader(_)));

        let err = parse_mapping("dim 1\nF1 = (x1").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));

        let err = parse_mapping("dim 1\nF1 = 1.5*x1").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn comments_crlf_and_order() {
        let src = "# header\r\ndim 2 # two\r\nF2 = x1 # second\r\n\r\nF1 = -x2^2\r\n";
        let f = parse_mapping(src).unwrap();
        assert_eq!(f.component(0).to_string(), "-x2^2");
        assert_eq!(f.component(1).to_string(), "x1");
    }

    #[test]
    fn precedence() {
        let p = parse_expression("-x1^2 + 2*x1*x2/4 - (x2 - 1)", 2).unwrap();
        assert_eq!(p.to_string(), "-x1^2 + 1/2*x1*x2 - x2 + 1");
    }

    #[test]
    fn max_degree_is_enforced() {
        let opts = ParseOptions { max_degree: Some(2) };
        let err = parse_mapping_with("dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3", opts).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DegreeTooHigh { degree: 3, max: 2 });
    }

    #[test]
    fn zero_component_renders_as_zero() {
        let f = parse_mapping("dim 2\nF1 = x1\nF2 = x2 - x2").unwrap();
        assert!(render_mapping(&f).ends_with("F2 = 0"));
    }
}
