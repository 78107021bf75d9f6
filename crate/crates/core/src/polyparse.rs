//! Parser for polynomial strings in problem files.
//!
//! ```text
//! expr   := sign? term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := atom ("^" integer)?
//! atom   := integer | ident | "(" expr ")"
//! ```
//!
//! Coefficients are integers reduced mod `p`; identifiers must be declared.

use crate::exactla::PrimeField;
use crate::gradedcore::{Monomial, Poly};

/// A parse failure with a 1-based column inside the string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyError {
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for PolyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    names: &'a [String],
    field: PrimeField,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        let col = src[..at].chars().count() + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut v = String::new();
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                v.push(chars[i].1);
                i += 1;
            }
            out.push((col, Tok::Num(v)));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                s.push(chars[i].1);
                i += 1;
            }
            out.push((col, Tok::Ident(s)));
        } else if "+-*^()".contains(c) {
            out.push((col, Tok::Op(c)));
            i += 1;
        } else {
            return Err(PolyError {
                column: col,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError {
            column: self.col(),
            message: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let f = self.field;
        let mut acc = Poly::zero();
        let mut sign = match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 {
                acc.sub(&t, f)
            } else {
                acc.add(&t, f)
            };
            match self.peek() {
                Some(Tok::Op('+')) => sign = 1,
                Some(Tok::Op('-')) => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Op('*')) = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.factor()?, self.field);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let Some(Tok::Num(digits)) = self.peek().cloned() else {
                return self.err("expected an integer exponent");
            };
            let e: u32 = match digits.parse() {
                Ok(e) => e,
                Err(_) => return self.err("exponent too large"),
            };
            self.pos += 1;
            return Ok(base.pow(e, self.names.len(), self.field));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        let n = self.names.len();
        match self.peek().cloned() {
            Some(Tok::Num(digits)) => {
                self.pos += 1;
                let f = self.field;
                let v = digits.bytes().fold(0, |acc, b| {
                    f.add(f.mul(acc, 10 % f.p()), (b - b'0') as u64 % f.p())
                });
                Ok(Poly::constant(v, n))
            }
            Some(Tok::Ident(s)) => {
                let Some(i) = self.names.iter().position(|x| *x == s) else {
                    return self.err(format!("unknown name '{s}'"));
                };
                self.pos += 1;
                Ok(Poly::term(1, Monomial::var(n, i, 1)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected {t:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses `src` as a polynomial in the variables `names` (in that order).
pub fn parse_poly(src: &str, names: &[String], field: PrimeField) -> Result<Poly, PolyError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        names,
        field,
        end: src.chars().count() + 1,
    };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["t".into(), "x".into()]
    }

    fn f() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn basic_forms() {
        let p = parse_poly("t*x", &names(), f()).unwrap();
        assert_eq!(p, Poly::term(1, Monomial(vec![1, 1])));
        let q = parse_poly("-2*t^2 + 3 - (t - x)*(t + x)", &names(), f()).unwrap();
        let expect = Poly::term(f().from_i64(-3), Monomial(vec![2, 0]))
            .add(&Poly::constant(3, 2), f())
            .add(&Poly::term(1, Monomial(vec![0, 2])), f());
        assert_eq!(q, expect);
        assert_eq!(parse_poly("0", &names(), f()).unwrap(), Poly::zero());
        assert_eq!(parse_poly("202*t", &names(), f()).unwrap(), Poly::zero());
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_poly("t + y", &names(), f()).unwrap_err();
        assert_eq!(e.column, 5);
        assert!(e.message.contains("unknown name"));
        assert!(parse_poly("t +", &names(), f()).is_err());
        assert!(parse_poly("(t", &names(), f()).is_err());
        assert!(parse_poly("t $ x", &names(), f()).is_err());
        assert!(parse_poly("", &names(), f()).is_err());
        assert!(parse_poly("t^x", &names(), f()).is_err());
        // Exponents are not reduced mod p.
        let p3 = PrimeField::new(3).unwrap();
        assert_eq!(
            parse_poly("t^5", &names(), p3).unwrap(),
            Poly::term(1, Monomial(vec![5, 0]))
        );
    }
}
