//! Text syntax for polynomials and rational functions over `F_{p^ν}`.
//!
//! ```text
//! expr  := side ("/" side)?
//! side  := poly | "(" poly ")"
//! poly  := term ("+" term)*
//! term  := coeff | coeff "*"? mono | mono
//! mono  := "X" ("^" nat)?
//! coeff := nat | "[" nat ("," nat)* "]"
//! ```
//!
//! Integer coefficients are reduced into the prime field; bracketed
//! coefficients list the `ν` coordinates of an element of `F_{p^ν}`
//! low-to-high in the basis of powers of the modulus root.

use kfield_core::ffield::{FFElement, FiniteField};
use kfield_core::funcfield::{Poly, PolyError, RationalFunction};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("coefficient at position {position} is not in the field: {message}")]
    CoefficientOutOfField { position: usize, message: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Poly(Poly),
    Rational(RationalFunction),
}

impl Expr {
    pub fn into_rational(self) -> Result<RationalFunction, ParseError> {
        match self {
            Expr::Poly(p) => Ok(RationalFunction::from_poly(p)),
            Expr::Rational(r) => Ok(r),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a FiniteField,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
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
            Err(self.syntax(format!("expected '{}'", c as char)))
        }
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax {
            position: self.pos,
            message,
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected a natural number".into()));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse().map_err(|_| ParseError::Syntax {
            position: start,
            message: format!("number {digits} is too large"),
        })
    }

    fn coeff(&mut self) -> Result<FFElement, ParseError> {
        let start = self.pos;
        if !self.eat(b'[') {
            let n = self.nat()?;
            return Ok(self.field.from_int((n % self.field.p()) as i64));
        }
        let mut coords = vec![self.nat()?];
        while self.eat(b',') {
            coords.push(self.nat()?);
        }
        self.expect(b']')?;
        let out_of_field = |message: String| ParseError::CoefficientOutOfField {
            position: start,
            message,
        };
        if coords.len() != self.field.deg() as usize {
            return Err(out_of_field(format!(
                "expected {} coordinates, found {}",
                self.field.deg(),
                coords.len()
            )));
        }
        self.field
            .from_coeffs(&coords)
            .map_err(|e| out_of_field(e.to_string()))
    }

    /// Parses `"X" ("^" nat)?`, returning the exponent.
    fn mono(&mut self) -> Result<usize, ParseError> {
        if !(self.eat(b'X') || self.eat(b'x')) {
            return Err(self.syntax("expected 'X'".into()));
        }
        if self.eat(b'^') {
            let e = self.nat()?;
            usize::try_from(e)
                .ok()
                .filter(|&e| e <= 1 << 20)
                .ok_or_else(|| self.syntax(format!("exponent {e} is too large")))
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<(FFElement, usize), ParseError> {
        match self.peek() {
            Some(b'X' | b'x') => Ok((self.field.one(), self.mono()?)),
            Some(b'0'..=b'9' | b'[') => {
                let c = self.coeff()?;
                if self.eat(b'*') || matches!(self.peek(), Some(b'X' | b'x')) {
                    Ok((c, self.mono()?))
                } else {
                    Ok((c, 0))
                }
            }
            _ => Err(self.syntax("expected a term".into())),
        }
    }

    fn poly(&mut self) -> Result<Poly, ParseError> {
        let mut coeffs: Vec<FFElement> = Vec::new();
        loop {
            let (c, e) = self.term()?;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, self.field.zero());
            }
            coeffs[e] = self.field.add(coeffs[e], c);
            if !self.eat(b'+') {
                break;
            }
        }
        Ok(Poly::new(self.field, coeffs))
    }

    fn side(&mut self) -> Result<Poly, ParseError> {
        if self.eat(b'(') {
            let p = self.poly()?;
            self.expect(b')')?;
            Ok(p)
        } else {
            self.poly()
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let num = self.side()?;
        let out = if self.eat(b'/') {
            let den = self.side()?;
            Expr::Rational(RationalFunction::new(num, den)?)
        } else {
            Expr::Poly(num)
        };
        if self.peek().is_some() {
            return Err(self.syntax("unexpected trailing input".into()));
        }
        Ok(out)
    }
}

/// Parses a polynomial or a quotient of polynomials over `field`.
pub fn parse_poly(text: &str, field: &FiniteField) -> Result<Expr, ParseError> {
    Parser {
        src: text.as_bytes(),
        pos: 0,
        field,
    }
    .expr()
}

/// Parses and always returns a rational function.
pub fn parse_rational(text: &str, field: &FiniteField) -> Result<RationalFunction, ParseError> {
    parse_poly(text, field)?.into_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use kfield_core::ffield::make_field;

    fn poly(text: &str, field: &FiniteField) -> Poly {
        match parse_poly(text, field).unwrap() {
            Expr::Poly(p) => p,
            other => panic!("expected a polynomial, got {other:?}"),
        }
    }

    #[test]
    fn prime_field_examples() {
        let f2 = make_field(2, 1).unwrap();
        let p = poly("X^2+X+1", &f2);
        assert_eq!(p, Poly::from_ints(&f2, &[1, 1, 1]));
        assert!(p.is_irreducible());
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(poly("2*X+1", &f3), Poly::from_ints(&f3, &[1, 2]));
        assert_eq!(poly("2X + 4", &f3), Poly::from_ints(&f3, &[1, 2]));
        assert_eq!(poly("X+X+X", &f3), Poly::zero(&f3));
    }

    #[test]
    fn extension_field_coefficients() {
        let f4 = make_field(2, 2).unwrap();
        let p = poly("[1,1]*X+[0,1]", &f4);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(f4.coeffs(p.coeff(1)), vec![1, 1]);
        assert_eq!(f4.coeffs(p.coeff(0)), vec![0, 1]);
        assert_eq!(p.coeff(0), f4.root());
        assert!(matches!(
            parse_poly("[1,1,1]*X", &f4),
            Err(ParseError::CoefficientOutOfField { position: 0, .. })
        ));
        assert!(matches!(
            parse_poly("X+[2,0]", &f4),
            Err(ParseError::CoefficientOutOfField { position: 2, .. })
        ));
    }

    #[test]
    fn rational_functions() {
        let f2 = make_field(2, 1).unwrap();
        let r = parse_rational("1/(X^2+X+1)", &f2).unwrap();
        assert_eq!(r.den(), &Poly::from_ints(&f2, &[1, 1, 1]));
        let r = parse_rational("X^2+X/X", &f2).unwrap();
        assert_eq!(r.num(), &Poly::from_ints(&f2, &[1, 1]));
        assert!(matches!(parse_rational("X/0", &f2), Err(ParseError::Poly(PolyError::DivisionByZero))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let f3 = make_field(3, 1).unwrap();
        let cases = [("X^", 2), ("X++1", 2), ("", 0), ("X 1", 2), ("(X+1", 4), ("Y", 0)];
        for (text, pos) in cases {
            match parse_poly(text, &f3) {
                Err(ParseError::Syntax { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_round_trips() {
        let f9 = make_field(3, 2).unwrap();
        let texts = ["[2,1]*X^3+[0,1]*X+1", "X^4+2", "0", "[1,2]"];
        for t in texts {
            let p = poly(t, &f9);
            assert_eq!(poly(&p.to_string(), &f9), p);
        }
        let f5 = make_field(5, 1).unwrap();
        let r = parse_rational("(3*X^2+1)/(2*X+4)", &f5).unwrap();
        assert_eq!(parse_rational(&r.to_string(), &f5).unwrap(), r);
    }
}
