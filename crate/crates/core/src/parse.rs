//! Recursive-descent parser for the germ grammar.
//!
//! ```text
//! expr     := ['-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := primary ('^' uint)*
//! primary  := rational | 'i' | 'z1' | 'z2' | '(' expr ')'
//! rational := int ('/' uint)?
//! ```
//!
//! Whitespace is insignificant. The optional leading minus is accepted so
//! that printed germs parse back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::germ::{Germ, Var};

/// Resource caps applied while parsing untrusted input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseLimits {
    /// Largest literal exponent accepted after `^`.
    pub max_exponent: u32,
    /// Largest total degree of any intermediate result.
    pub max_degree: u32,
    /// Largest bit size of any intermediate coefficient.
    pub max_coeff_bits: u64,
    /// Maximum parenthesis nesting.
    pub max_depth: usize,
}

impl Default for ParseLimits {
    fn default() -> Self {
        Self {
            max_exponent: 64,
            max_degree: 128,
            max_coeff_bits: 1 << 14,
            max_depth: 64,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent {exponent} at byte {pos} exceeds cap {cap}")]
    ExponentCap { pos: usize, exponent: String, cap: u32 },
    #[error("degree {degree} at byte {pos} exceeds cap {cap}")]
    DegreeCap { pos: usize, degree: u64, cap: u32 },
    #[error("coefficient at byte {pos} exceeds {cap} bits")]
    CoefficientSize { pos: usize, cap: u64 },
    #[error("nesting deeper than {cap} at byte {pos}")]
    NestingDepth { pos: usize, cap: usize },
}

/// Parses with [`ParseLimits::default`].
pub fn parse_germ(text: &str) -> Result<Germ, ParseError> {
    parse_germ_with(text, ParseLimits::default())
}

pub fn parse_germ_with(text: &str, limits: ParseLimits) -> Result<Germ, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
        limits,
    };
    let g = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(g)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
    limits: ParseLimits,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn check(&self, g: Germ, start: usize) -> Result<Germ, ParseError> {
        if let Some(d) = g.total_degree() {
            if d > self.limits.max_degree {
                return Err(ParseError::DegreeCap {
                    pos: start,
                    degree: u64::from(d),
                    cap: self.limits.max_degree,
                });
            }
        }
        if g.max_coeff_bits() > self.limits.max_coeff_bits {
            return Err(ParseError::CoefficientSize {
                pos: start,
                cap: self.limits.max_coeff_bits,
            });
        }
        Ok(g)
    }

    /// Degree of a product, checked before it is formed.
    fn check_product_degree(&self, a: &Germ, b: &Germ, pos: usize) -> Result<(), ParseError> {
        let d = u64::from(a.total_degree().unwrap_or(0)) + u64::from(b.total_degree().unwrap_or(0));
        if d > u64::from(self.limits.max_degree) {
            return Err(ParseError::DegreeCap {
                pos,
                degree: d,
                cap: self.limits.max_degree,
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Germ, ParseError> {
        let start = self.pos;
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                acc = self.check(&acc + &t, start)?;
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = self.check(&acc - &t, start)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Germ, ParseError> {
        let start = self.pos;
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            self.check_product_degree(&acc, &f, start)?;
            acc = self.check(&acc * &f, start)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Germ, ParseError> {
        let start = self.pos;
        let mut base = self.primary()?;
        while self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let digits = self.digits().ok_or_else(|| self.syntax("expected exponent"))?;
            let exponent = digits
                .parse::<u32>()
                .ok()
                .filter(|e| *e <= self.limits.max_exponent)
                .ok_or(ParseError::ExponentCap {
                    pos: at,
                    exponent: digits.clone(),
                    cap: self.limits.max_exponent,
                })?;
            let d = u64::from(base.total_degree().unwrap_or(0)) * u64::from(exponent);
            if d > u64::from(self.limits.max_degree) {
                return Err(ParseError::DegreeCap {
                    pos: start,
                    degree: d,
                    cap: self.limits.max_degree,
                });
            }
            let bits = base.max_coeff_bits().saturating_mul(u64::from(exponent));
            if bits > self.limits.max_coeff_bits.saturating_mul(2) {
                return Err(ParseError::CoefficientSize {
                    pos: start,
                    cap: self.limits.max_coeff_bits,
                });
            }
            base = self.check(base.pow(exponent), start)?;
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn primary(&mut self) -> Result<Germ, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.depth += 1;
                if self.depth > self.limits.max_depth {
                    return Err(ParseError::NestingDepth {
                        pos: self.pos,
                        cap: self.limits.max_depth,
                    });
                }
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.depth -= 1;
                Ok(inner)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Germ::constant(GaussianRational::i()))
            }
            Some(b'z') => {
                self.pos += 1;
                match self.src.get(self.pos) {
                    Some(b'1') => {
                        self.pos += 1;
                        Ok(Germ::var(Var::Z1))
                    }
                    Some(b'2') => {
                        self.pos += 1;
                        Ok(Germ::var(Var::Z2))
                    }
                    _ => Err(self.syntax("expected variable z1 or z2")),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits().expect("at least one digit");
                let mut den = String::from("1");
                if self.eat(b'/') {
                    self.skip_ws();
                    den = self.digits().ok_or_else(|| self.syntax("expected denominator"))?;
                }
                let bits = (num.len() + den.len()) as u64 * 4;
                if bits > self.limits.max_coeff_bits {
                    return Err(ParseError::CoefficientSize {
                        pos: start,
                        cap: self.limits.max_coeff_bits,
                    });
                }
                let n: BigInt = num.parse().expect("ascii digits");
                let d: BigInt = den.parse().expect("ascii digits");
                if d.is_zero() {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: "zero denominator".into(),
                    });
                }
                Ok(Germ::constant(GaussianRational::real(BigRational::new(n, d))))
            }
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}
