//! Polynomial text syntax: identifiers, integer literals (reduced mod p),
//! `+`, `-`, `*`, `^` with a nonnegative integer exponent, parentheses.
//! Juxtaposition is rejected; products must be written with `*`.

use crate::error::{Error, Result};
use crate::field::Prime;
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer;

impl Lexer {
    fn run(text: &str) -> Result<Vec<(Tok, usize)>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    i += 1;
                }
                '+' => {
                    out.push((Tok::Plus, col));
                    i += 1;
                }
                '-' => {
                    out.push((Tok::Minus, col));
                    i += 1;
                }
                '*' => {
                    out.push((Tok::Star, col));
                    i += 1;
                }
                '^' => {
                    out.push((Tok::Caret, col));
                    i += 1;
                }
                '(' => {
                    out.push((Tok::LParen, col));
                    i += 1;
                }
                ')' => {
                    out.push((Tok::RParen, col));
                    i += 1;
                }
                d if d.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push((Tok::Num(chars[start..i].iter().collect()), col));
                }
                a if a.is_ascii_alphabetic() || a == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                        i += 1;
                    }
                    out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                }
                other => {
                    return Err(Error::Parse { line: 1, col, msg: format!("unexpected character `{other}`") });
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    names: &'a [String],
    prime: Prime,
}

impl Parser<'_> {
    fn err<T>(&self, col: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: 1, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn n(&self) -> usize {
        self.names.len()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let t = self.unary()?;
                    acc = &acc * &t;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    return self.err(self.col(), "juxtaposition is not allowed; write products with `*`");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let t = self.unary()?;
                Ok(-&t)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let col = self.col();
            match self.peek().cloned() {
                Some(Tok::Num(s)) => {
                    self.pos += 1;
                    let e: u64 = s.parse().map_err(|_| Error::Parse { line: 1, col, msg: "exponent too large".into() })?;
                    Ok(base.pow(e))
                }
                Some(Tok::Minus) => Err(Error::NegativeExponent(-1)),
                _ => self.err(col, "expected an integer exponent after `^`"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let p = self.prime.value();
                let v = s.bytes().fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p);
                Ok(Poly::constant(self.prime, self.n(), v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.names.iter().position(|x| *x == name) {
                    Some(i) => Ok(Poly::var(self.prime, self.n(), i)),
                    None => self.err(col, format!("unknown variable `{name}`")),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err(self.col(), "expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(t) => self.err(col, format!("unexpected token {t:?}")),
            None => self.err(col, "unexpected end of polynomial"),
        }
    }
}

/// Parse `text` as a polynomial in the named variables over F_p.
/// Errors carry 1-based columns relative to `text`.
pub fn parse_poly(text: &str, names: &[String], prime: Prime) -> Result<Poly> {
    let toks = Lexer::run(text)?;
    let end_col = text.chars().count() + 1;
    if toks.is_empty() {
        return Err(Error::Parse { line: 1, col: 1, msg: "empty polynomial".into() });
    }
    let mut p = Parser { toks, pos: 0, end_col, names, prime };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err(p.col(), "trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["u", "v", "w"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_hsurface() {
        let p = Prime::new(7).unwrap();
        let f = parse_poly("u*v*w - v^2 - w^2", &names(), p).unwrap();
        assert_eq!(f.display(&names()), "u*v*w - v^2 - w^2");
        let g = parse_poly("(u^2 - 4)^3", &names(), p).unwrap();
        assert_eq!(g.total_degree(), Some(6));
        let h = parse_poly("15*u", &names(), p).unwrap();
        assert_eq!(h.display(&names()), "u");
    }

    #[test]
    fn rejects_juxtaposition() {
        let p = Prime::new(5).unwrap();
        let e = parse_poly("2u", &names(), p).unwrap_err();
        assert!(matches!(e, Error::Parse { col: 2, .. }), "{e:?}");
        assert!(parse_poly("u v", &names(), p).is_err());
    }

    #[test]
    fn reports_unknown_variable_position() {
        let p = Prime::new(5).unwrap();
        let e = parse_poly("u*v + wx", &names(), p).unwrap_err();
        match e {
            Error::Parse { col, msg, .. } => {
                assert_eq!(col, 7);
                assert!(msg.contains("wx"));
            }
            other => panic!("{other:?}"),
        }
    }
}
