//! Recursive-descent parser for the expression grammar, shared by the scalar
//! and functional dialects. Errors carry the byte offset into the source and
//! a description of what was expected there.

use super::{BinaryOp, Component, Expr, Func, FunctionalAtom, Params, ScalarVar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("point-evaluation abscissa {value} at byte {offset} lies outside [0,1]")]
    AbscissaOutOfRange { value: f64, offset: usize },
    #[error("the time variable t is not allowed in functional expressions (byte {offset})")]
    FreeTimeVariable { offset: usize },
}

/// Parses a scalar expression in the variables `t`, `x`, `y`.
pub fn parse_scalar(src: &str) -> Result<Expr<ScalarVar>, ParseError> {
    Parser::new(src)?.parse_to_end()
}

/// Parses a functional expression over point evaluations, integrals and sup
/// norms of `x` and `y`.
pub fn parse_functional(src: &str) -> Result<Expr<FunctionalAtom>, ParseError> {
    Parser::new(src)?.parse_to_end()
}

#[derive(Debug, Clone, PartialEq)]
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

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("name `{s}`"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

struct Token {
    tok: Tok,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' | b',' => {
                let tok = match c {
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'/' => Tok::Slash,
                    b'^' => Tok::Caret,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                tokens.push(Token { tok, offset: i });
                i += 1;
            }
            b'0'..=b'9' => {
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
                // Exponent only when it is actually well formed; otherwise
                // the `e` lexes as the start of a name.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "a decimal number".into(),
                    found: format!("`{text}`"),
                })?;
                tokens.push(Token {
                    tok: Tok::Num(value),
                    offset: start,
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: "a number, name, operator, or parenthesis".into(),
                    found: format!("`{}`", &src[i..i + utf8_len(c)]),
                });
            }
        }
    }
    Ok(tokens)
}

fn utf8_len(first_byte: u8) -> usize {
    match first_byte {
        0x00..=0x7f => 1,
        0xc0..=0xdf => 2,
        0xe0..=0xef => 3,
        _ => 4,
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(src)?;
        Ok(Self {
            tokens,
            pos: 0,
            end_offset: src.len(),
        })
    }

    fn parse_to_end<A: AtomSyntax>(mut self) -> Result<Expr<A>, ParseError> {
        let expr = self.parse_expr()?;
        if let Some(t) = self.tokens.get(self.pos) {
            return Err(ParseError::Syntax {
                offset: t.offset,
                expected: "end of input".into(),
                found: t.tok.describe(),
            });
        }
        Ok(expr)
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn current_offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.offset)
            .unwrap_or(self.end_offset)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let found = self
            .tokens
            .get(self.pos)
            .map(|t| t.tok.describe())
            .unwrap_or_else(|| "end of input".into());
        ParseError::Syntax {
            offset: self.current_offset(),
            expected: expected.into(),
            found,
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<usize, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) if t.tok == tok => {
                let offset = t.offset;
                self.pos += 1;
                Ok(offset)
            }
            _ => Err(self.error_here(expected)),
        }
    }

    fn parse_expr<A: AtomSyntax>(&mut self) -> Result<Expr<A>, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_term<A: AtomSyntax>(&mut self) -> Result<Expr<A>, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_factor<A: AtomSyntax>(&mut self) -> Result<Expr<A>, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.parse_factor()?)));
        }
        self.parse_power()
    }

    fn parse_power<A: AtomSyntax>(&mut self) -> Result<Expr<A>, ParseError> {
        let base = self.parse_atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.advance();
            let exp = self.parse_factor()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn parse_atom<A: AtomSyntax>(&mut self) -> Result<Expr<A>, ParseError> {
        match self.peek() {
            Some(Tok::Num(_)) => {
                let Some(Token { tok: Tok::Num(v), .. }) = self.advance() else {
                    unreachable!()
                };
                Ok(Expr::Literal(*v))
            }
            Some(Tok::LParen) => {
                self.advance();
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(_)) => {
                let Some(Token {
                    tok: Tok::Ident(name),
                    offset,
                }) = self.advance()
                else {
                    unreachable!()
                };
                let (name, offset) = (name.clone(), *offset);
                A::resolve_name(self, &name, offset)
            }
            _ => Err(self.error_here("a number, name, or '('")),
        }
    }

    fn peek_is_lparen(&self) -> bool {
        matches!(self.peek(), Some(Tok::LParen))
    }

    /// Argument list of a built-in function, with arity enforcement.
    fn parse_call<A: AtomSyntax>(
        &mut self,
        func: Func,
        name_offset: usize,
    ) -> Result<Expr<A>, ParseError> {
        self.expect(Tok::LParen, &format!("'(' after `{}`", func.name()))?;
        let mut args = vec![self.parse_expr()?];
        while matches!(self.peek(), Some(Tok::Comma)) {
            self.advance();
            args.push(self.parse_expr()?);
        }
        self.expect(Tok::RParen, "')'")?;
        if args.len() != func.arity() {
            return Err(ParseError::Syntax {
                offset: name_offset,
                expected: format!("{} argument(s) to {}", func.arity(), func.name()),
                found: format!("{} argument(s)", args.len()),
            });
        }
        Ok(Expr::Call(func, args))
    }

    /// `( x )` or `( y )` for the whole-grid atoms `int` and `supnorm`.
    fn parse_component_argument(&mut self) -> Result<Component, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let comp = match self.peek() {
            Some(Tok::Ident(name)) if name == "x" => Component::X,
            Some(Tok::Ident(name)) if name == "y" => Component::Y,
            _ => return Err(self.error_here("a bare `x` or `y`")),
        };
        self.advance();
        self.expect(Tok::RParen, "')'")?;
        Ok(comp)
    }

    /// Constant sub-expression (no variables, parameters, or atoms), folded
    /// at parse time; used for point-evaluation abscissae.
    fn parse_constant(&mut self) -> Result<(f64, usize), ParseError> {
        let offset = self.current_offset();
        let expr: Expr<NoAtoms> = self.parse_expr()?;
        let value = expr
            .eval_const()
            .ok_or_else(|| ParseError::Syntax {
                offset,
                expected: "a constant abscissa".into(),
                found: "an expression that does not fold to a constant".into(),
            })?;
        Ok((value, offset))
    }
}

/// Atom alphabet with no inhabitants; parsing one is always an error. Used
/// for constant-folded sub-expressions.
#[derive(Debug, Clone, PartialEq)]
enum NoAtoms {}

impl Expr<NoAtoms> {
    fn eval_const(&self) -> Option<f64> {
        self.eval_with(&|a| match *a {}, &Params::new()).ok()
    }
}

impl AtomSyntax for NoAtoms {
    fn resolve_name(_p: &mut Parser, name: &str, offset: usize) -> Result<Expr<Self>, ParseError> {
        Err(ParseError::Syntax {
            offset,
            expected: "a constant abscissa".into(),
            found: format!("name `{name}`"),
        })
    }
}

/// Resolution of bare names, the only place the two dialects differ.
trait AtomSyntax: Sized + PartialEq {
    fn resolve_name(p: &mut Parser, name: &str, offset: usize) -> Result<Expr<Self>, ParseError>;
}

fn resolve_shared<A: AtomSyntax>(
    p: &mut Parser,
    name: &str,
    offset: usize,
) -> Result<Expr<A>, ParseError> {
    if let Some(func) = Func::from_name(name) {
        return p.parse_call(func, offset);
    }
    if p.peek_is_lparen() {
        // A call to something that is not a built-in function.
        return Err(ParseError::UnknownIdentifier {
            name: name.to_string(),
            offset,
        });
    }
    Ok(Expr::Param(name.to_string()))
}

impl AtomSyntax for ScalarVar {
    fn resolve_name(p: &mut Parser, name: &str, offset: usize) -> Result<Expr<Self>, ParseError> {
        let var = match name {
            "t" => Some(ScalarVar::Time),
            "x" => Some(ScalarVar::X),
            "y" => Some(ScalarVar::Y),
            _ => None,
        };
        if let Some(var) = var {
            if p.peek_is_lparen() {
                return Err(ParseError::Syntax {
                    offset,
                    expected: "no argument list after a variable (point \
                               evaluation exists only in functionals)"
                        .into(),
                    found: "'('".into(),
                });
            }
            return Ok(Expr::Atom(var));
        }
        resolve_shared(p, name, offset)
    }
}

impl AtomSyntax for FunctionalAtom {
    fn resolve_name(p: &mut Parser, name: &str, offset: usize) -> Result<Expr<Self>, ParseError> {
        match name {
            "t" => Err(ParseError::FreeTimeVariable { offset }),
            "x" | "y" => {
                let comp = if name == "x" { Component::X } else { Component::Y };
                if !p.peek_is_lparen() {
                    return Err(ParseError::Syntax {
                        offset,
                        expected: "a point evaluation like x(0.25)".into(),
                        found: "a bare component name".into(),
                    });
                }
                p.advance(); // consume '('
                let (value, value_offset) = p.parse_constant()?;
                p.expect(Tok::RParen, "')'")?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(ParseError::AbscissaOutOfRange {
                        value,
                        offset: value_offset,
                    });
                }
                Ok(Expr::Atom(FunctionalAtom::PointEval(comp, value)))
            }
            "int" => Ok(Expr::Atom(FunctionalAtom::Integral(
                p.parse_component_argument()?,
            ))),
            "supnorm" => Ok(Expr::Atom(FunctionalAtom::SupNorm(
                p.parse_component_argument()?,
            ))),
            _ => resolve_shared(p, name, offset),
        }
    }
}
