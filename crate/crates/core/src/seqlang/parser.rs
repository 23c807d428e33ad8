//! Recursive-descent parser for the family grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := prefix (('*' | '/') prefix)*
//! prefix := '-' prefix | power
//! power  := atom ('^' prefix)?        exponent must fold to a rational
//! atom   := number | 'n' | fn '(' expr ')' | '(' expr ')'
//! fn     := abs | exp | log1p | alt
//! ```
//!
//! `abs` and `alt` accept only the bare variable `n`; exponents must be
//! rational constants (integers, decimals, or arithmetic thereof).

use super::{FamilyExpr, ParseError, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, Option<Rational>),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some((off, tok)) = lx.next_token()? {
            out.push((off, tok));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => {
                let mut seen_dot = false;
                while self.pos < self.src.len() {
                    match self.src[self.pos] {
                        b'0'..=b'9' => self.pos += 1,
                        b'.' if !seen_dot => {
                            seen_dot = true;
                            self.pos += 1;
                        }
                        _ => break,
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("invalid number literal `{text}`"),
                })?;
                (text != ".")
                    .then_some(())
                    .ok_or_else(|| ParseError::Syntax {
                        offset: start,
                        message: "invalid number literal `.`".into(),
                    })?;
                Tok::Num(value, literal_rational(text))
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Ident(name.to_string())
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((start, tok)))
    }
}

/// Exact rational value of a decimal literal, when it fits `i64`.
fn literal_rational(text: &str) -> Option<Rational> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.len() + frac_part.len() > 15 {
        return None;
    }
    let digits: i64 = format!("{int_part}{frac_part}").parse().ok()?;
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    Some(Rational::new(digits, denom))
}

/// Parsed subtree plus its exact rational value when it is constant.
struct Node {
    expr: FamilyExpr,
    rat: Option<Rational>,
    offset: usize,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    len: usize,
}

pub(super) fn parse(text: &str) -> Result<FamilyExpr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty input".into(),
        });
    }
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        len: text.len(),
    };
    let node = p.expr()?;
    if let Some((off, _)) = p.peek() {
        return Err(ParseError::Syntax {
            offset: off,
            message: "trailing input".into(),
        });
    }
    Ok(node.expr)
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Tok)> {
        self.toks.get(self.idx).map(|(o, t)| (*o, t))
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn end_offset(&self) -> usize {
        self.len
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some((_, tok)) = self.peek() {
            let plus = match tok {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            let rat = combine_rat(lhs.rat, rhs.rat, |a, b| {
                Some(if plus { a + b } else { a - b })
            });
            lhs = Node {
                expr: if plus {
                    FamilyExpr::Add(Box::new(lhs.expr), Box::new(rhs.expr))
                } else {
                    FamilyExpr::Sub(Box::new(lhs.expr), Box::new(rhs.expr))
                },
                rat,
                offset: lhs.offset,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some((_, tok)) = self.peek() {
            let mul = match tok {
                Tok::Star => true,
                Tok::Slash => false,
                _ => break,
            };
            self.bump();
            let rhs = self.prefix()?;
            let rat = combine_rat(lhs.rat, rhs.rat, |a, b| {
                if mul {
                    Some(a * b)
                } else if b != Rational::from_integer(0) {
                    Some(a / b)
                } else {
                    None
                }
            });
            lhs = Node {
                expr: if mul {
                    FamilyExpr::Mul(Box::new(lhs.expr), Box::new(rhs.expr))
                } else {
                    FamilyExpr::Div(Box::new(lhs.expr), Box::new(rhs.expr))
                },
                rat,
                offset: lhs.offset,
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Node, ParseError> {
        if let Some((off, Tok::Minus)) = self.peek() {
            self.bump();
            let inner = self.prefix()?;
            // unary minus desugars to (-1) * x
            return Ok(Node {
                rat: inner.rat.map(|r| -r),
                expr: FamilyExpr::Mul(Box::new(FamilyExpr::Const(-1.0)), Box::new(inner.expr)),
                offset: off,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if let Some((_, Tok::Caret)) = self.peek() {
            self.bump();
            let exp_off = self.peek().map(|(o, _)| o).unwrap_or(self.end_offset());
            let exponent = self.prefix()?;
            // (-1)^n is the alternation leaf
            if exponent.expr == FamilyExpr::Var && base.rat == Some(Rational::from_integer(-1)) {
                return Ok(Node {
                    expr: FamilyExpr::Alt,
                    rat: None,
                    offset: base.offset,
                });
            }
            let r = exponent.rat.ok_or_else(|| ParseError::Syntax {
                offset: exp_off,
                message: "exponent must be a rational constant".into(),
            })?;
            let rat = base.rat.and_then(|b| rational_pow(b, r));
            return Ok(Node {
                expr: FamilyExpr::Pow(Box::new(base.expr), r),
                rat,
                offset: base.offset,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let (off, tok) = self.bump().ok_or_else(|| ParseError::Syntax {
            offset: self.end_offset(),
            message: "unexpected end of input".into(),
        })?;
        match tok {
            Tok::Num(v, rat) => Ok(Node {
                expr: FamilyExpr::Const(v),
                rat,
                offset: off,
            }),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(Node {
                    offset: off,
                    ..inner
                })
            }
            Tok::Ident(name) => match name.as_str() {
                "n" => Ok(Node {
                    expr: FamilyExpr::Var,
                    rat: None,
                    offset: off,
                }),
                "abs" | "alt" => {
                    self.expect_lparen()?;
                    let (arg_off, arg) = self.bump().ok_or_else(|| ParseError::Syntax {
                        offset: self.end_offset(),
                        message: format!("{name} expects the variable n"),
                    })?;
                    if arg != Tok::Ident("n".into()) {
                        return Err(ParseError::Syntax {
                            offset: arg_off,
                            message: format!("{name} expects the variable n"),
                        });
                    }
                    self.expect_rparen()?;
                    Ok(Node {
                        expr: if name == "abs" {
                            FamilyExpr::AbsVar
                        } else {
                            FamilyExpr::Alt
                        },
                        rat: None,
                        offset: off,
                    })
                }
                "exp" | "log1p" => {
                    self.expect_lparen()?;
                    let inner = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Node {
                        expr: if name == "exp" {
                            FamilyExpr::Exp(Box::new(inner.expr))
                        } else {
                            FamilyExpr::Log1p(Box::new(inner.expr))
                        },
                        rat: None,
                        offset: off,
                    })
                }
                _ => Err(ParseError::UnknownIdentifier { offset: off, name }),
            },
            other => Err(ParseError::Syntax {
                offset: off,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        match self.bump() {
            Some((_, Tok::LParen)) => Ok(()),
            Some((off, _)) => Err(ParseError::Syntax {
                offset: off,
                message: "expected `(`".into(),
            }),
            None => Err(ParseError::Syntax {
                offset: self.end_offset(),
                message: "expected `(`".into(),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.bump() {
            Some((_, Tok::RParen)) => Ok(()),
            Some((off, _)) => Err(ParseError::Syntax {
                offset: off,
                message: "expected `)`".into(),
            }),
            None => Err(ParseError::Syntax {
                offset: self.end_offset(),
                message: "expected `)`".into(),
            }),
        }
    }
}

fn combine_rat(
    a: Option<Rational>,
    b: Option<Rational>,
    op: impl FnOnce(Rational, Rational) -> Option<Rational>,
) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => op(a, b),
        _ => None,
    }
}

fn rational_pow(base: Rational, exp: Rational) -> Option<Rational> {
    if !exp.is_integer() {
        return None;
    }
    let e = *exp.numer();
    if e.unsigned_abs() > 16 {
        return None;
    }
    let mut acc = Rational::from_integer(1);
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        if acc == Rational::from_integer(0) {
            return None;
        }
        acc = Rational::from_integer(1) / acc;
    }
    Some(acc)
}
