//! Canonical text form of differential polynomials.
//!
//! ```text
//! poly     := "0" | ["-"] term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := rational | pairing ["^" int] | vector | wedge
//! rational := int ["/" int]
//! pairing  := "<u" int ",u" int ">"          inner product <u_i,u_j>
//! vector   := "u" int                          the x-derivative u_k
//! wedge    := "[u" int ",u" int "]"          u_k u_l^T - u_l u_k^T
//! ```
//!
//! Scalar terms have no vector or wedge factor, vector terms exactly one vector factor,
//! bivector terms exactly one wedge. Whitespace is ignored on input. Output is
//! deterministic: vector terms by descending derivative order, bivector terms by
//! descending index pair, and within each the pairing monomials in ascending order.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::bivector::BivectorPoly;
use super::monomial::{Monomial, Pairing};
use super::scalar::{Coeff, ScalarPoly};
use super::vector::VectorPoly;
use crate::error::{Error, Result};

fn write_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (&'a Coeff, Vec<String>)>,
{
    let mut first = true;
    for (c, factors) in terms {
        let negative = c.is_negative();
        let mag = c.abs();
        match (first, negative) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        first = false;
        let mut parts = Vec::with_capacity(factors.len() + 1);
        if !mag.is_one() || factors.is_empty() {
            parts.push(mag.to_string());
        }
        parts.extend(factors);
        write!(f, "{}", parts.join("*"))?;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

fn monomial_factors(m: &Monomial) -> Vec<String> {
    if m.is_one() {
        Vec::new()
    } else {
        vec![m.to_string()]
    }
}

impl fmt::Display for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms().map(|(m, c)| (c, monomial_factors(m))))
    }
}

impl fmt::Display for VectorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms().rev().flat_map(|(k, c)| {
                c.terms().map(move |(m, x)| {
                    let mut fs = monomial_factors(m);
                    fs.push(format!("u{k}"));
                    (x, fs)
                })
            }),
        )
    }
}

impl fmt::Display for BivectorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms().rev().flat_map(|((k, l), c)| {
                c.terms().map(move |(m, x)| {
                    let mut fs = monomial_factors(m);
                    fs.push(format!("[u{k},u{l}]"));
                    (x, fs)
                })
            }),
        )
    }
}

#[derive(Debug, Default)]
struct ParsedTerm {
    coeff: Coeff,
    pairings: Vec<Pairing>,
    vectors: Vec<u32>,
    wedges: Vec<(u32, u32)>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { src: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
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

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", b as char))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small_int(&mut self) -> Result<u32> {
        let at = self.pos;
        let v = self.int()?;
        u32::try_from(v).map_err(|_| Error::Parse { pos: at, msg: "index too large".into() })
    }

    fn u_index(&mut self) -> Result<u32> {
        self.expect(b'u')?;
        self.small_int()
    }

    fn factor(&mut self, term: &mut ParsedTerm) -> Result<()> {
        match self.peek() {
            Some(b'<') => {
                self.pos += 1;
                let i = self.u_index()?;
                self.expect(b',')?;
                let j = self.u_index()?;
                self.expect(b'>')?;
                let power = if self.eat(b'^') { self.small_int()? } else { 1 };
                for _ in 0..power {
                    term.pairings.push(Pairing::new(i, j));
                }
            }
            Some(b'[') => {
                self.pos += 1;
                let k = self.u_index()?;
                self.expect(b',')?;
                let l = self.u_index()?;
                self.expect(b']')?;
                term.wedges.push((k, l));
            }
            Some(b'u') => term.vectors.push(self.u_index()?),
            Some(c) if c.is_ascii_digit() => {
                let num = self.int()?;
                let den = if self.eat(b'/') { self.int()? } else { BigInt::one() };
                if den.is_zero() {
                    return self.err("zero denominator");
                }
                term.coeff *= Coeff::new(num, den);
            }
            _ => return self.err("expected a factor"),
        }
        Ok(())
    }

    fn poly(mut self) -> Result<Vec<ParsedTerm>> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(b'-') { -Coeff::one() } else { Coeff::one() };
        loop {
            let mut term = ParsedTerm { coeff: sign.clone(), ..Default::default() };
            self.factor(&mut term)?;
            while self.eat(b'*') {
                self.factor(&mut term)?;
            }
            terms.push(term);
            if self.eat(b'+') {
                sign = Coeff::one();
            } else if self.eat(b'-') {
                sign = -Coeff::one();
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(terms)
    }
}

fn kind_error(what: &str) -> Error {
    Error::Parse { pos: 0, msg: format!("term is not a {what} term") }
}

impl FromStr for ScalarPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = ScalarPoly::zero();
        for t in Parser::new(s).poly()? {
            if !t.vectors.is_empty() || !t.wedges.is_empty() {
                return Err(kind_error("scalar"));
            }
            out.add_assign_ref(&ScalarPoly::term(Monomial::from_pairings(t.pairings), t.coeff));
        }
        Ok(out)
    }
}

impl FromStr for VectorPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = VectorPoly::zero();
        for t in Parser::new(s).poly()? {
            if t.coeff.is_zero() && t.vectors.is_empty() {
                continue;
            }
            if t.vectors.len() != 1 || !t.wedges.is_empty() {
                return Err(kind_error("vector"));
            }
            let c = ScalarPoly::term(Monomial::from_pairings(t.pairings), t.coeff);
            out.add_assign_ref(&VectorPoly::term(t.vectors[0], c));
        }
        Ok(out)
    }
}

impl FromStr for BivectorPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = BivectorPoly::zero();
        for t in Parser::new(s).poly()? {
            if t.coeff.is_zero() && t.wedges.is_empty() {
                continue;
            }
            if t.wedges.len() != 1 || !t.vectors.is_empty() {
                return Err(kind_error("bivector"));
            }
            let (k, l) = t.wedges[0];
            let c = ScalarPoly::term(Monomial::from_pairings(t.pairings), t.coeff);
            out.add_wedge(k, l, &c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffalg::scalar::rat;

    #[test]
    fn vmkdv_flow_text() {
        let flow = &(-&VectorPoly::u(3)) - &(ScalarPoly::pairing(0, 0).scale(&rat(3, 2)) * VectorPoly::u(1));
        assert_eq!(flow.to_string(), "-u3 - 3/2*<u0,u0>*u1");
    }

    #[test]
    fn zero_prints_as_zero() {
        assert_eq!(VectorPoly::zero().to_string(), "0");
        assert_eq!("0".parse::<VectorPoly>().unwrap(), VectorPoly::zero());
        assert_eq!("0".parse::<BivectorPoly>().unwrap(), BivectorPoly::zero());
    }

    #[test]
    fn parse_round_trip() {
        let src = "u5 + 5/2*<u0,u0>*u3 + 5*<u0,u1>*u2 + 15/8*<u0,u0>^2*u1 + 5*<u0,u2>*u1 + 5/2*<u1,u1>*u1";
        let v: VectorPoly = src.parse().unwrap();
        assert_eq!(v.to_string(), src);
        let b: BivectorPoly = "-1/2*<u0,u0>*[u1,u0] + [u0,u2]".parse().unwrap();
        assert_eq!(b.to_string(), "[u0,u2] + 1/2*<u0,u0>*[u0,u1]");
        let s: ScalarPoly = " 1 - <u1 , u0>".parse().unwrap();
        assert_eq!(s.to_string(), "1 - <u0,u1>");
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        assert!("<u0,u0>".parse::<VectorPoly>().is_err());
        assert!("u1".parse::<ScalarPoly>().is_err());
        assert!("u1*u2".parse::<VectorPoly>().is_err());
        assert!("<u0,u0> +".parse::<ScalarPoly>().is_err());
        assert!("1/0".parse::<ScalarPoly>().is_err());
    }
}
