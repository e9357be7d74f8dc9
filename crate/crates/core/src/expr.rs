//! Text grammar for series and the JSON result schema.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! series   := [ '-' ] term ( ('+' | '-') term )*
//! term     := coeff [ '*' var [ '^' exponent ] ] | var [ '^' exponent ]
//! coeff    := rational | decimal | complex
//! rational := int [ '/' uint ]
//! decimal  := int '.' digits
//! complex  := '(' float ',' float ')'        (decimal big-float parts)
//! exponent := int | '(' int [ '/' uint ] ')'
//! var      := 'z' | 'zeta' | 'zhat' | 'zetahat'
//! ```
//!
//! Fractional exponents must be parenthesized ("z^(-3/2)"); integer exponents
//! may appear bare ("z^-1"). Rational data round-trips exactly through
//! `format_series` / `parse_series`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Pow, Signed, Zero};

use crate::classes::CanonicalClass;
use crate::error::{Error, Result};
use crate::puiseux::{exp, Exp, PuiseuxSeries, VarTag};
use crate::scalar::{BigComplex, Scalar, DEFAULT_PREC};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn digits(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'a'..=b'z') | Some(b'A'..=b'Z')) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
        }
    }

    /// Signed integer literal as BigInt.
    fn int(&mut self) -> Result<BigInt> {
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let d = self.digits()?;
        let mut v: BigInt = d.parse().unwrap();
        if neg {
            v = -v;
        }
        Ok(v)
    }

    /// Rational or decimal number.
    fn rational(&mut self) -> Result<BigRational> {
        let num = self.int()?;
        if self.eat(b'/') {
            let den = self.int()?;
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            return Ok(BigRational::new(num, den));
        }
        if self.eat(b'.') {
            let frac = self.digits()?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let fpart: BigInt = frac.parse().unwrap();
            let signed = if num.is_negative() {
                num * &scale - fpart
            } else {
                num * &scale + fpart
            };
            return Ok(BigRational::new(signed, scale));
        }
        Ok(BigRational::from_integer(num))
    }

    /// A decimal float (with optional exponent part) for complex components.
    fn float_token(&mut self) -> Result<&'a str> {
        let start = self.pos;
        self.eat(b'-');
        self.eat(b'+');
        let _ = self.digits()?;
        if self.eat(b'.') {
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            self.eat(b'-');
            self.eat(b'+');
            let _ = self.digits()?;
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn complex(&mut self, prec: usize) -> Result<Scalar> {
        // caller consumed '('
        self.skip_ws();
        let re = self.float_token()?;
        self.skip_ws();
        if !self.eat(b',') {
            return Err(self.err("expected ',' in complex literal"));
        }
        self.skip_ws();
        let im = self.float_token()?;
        self.skip_ws();
        if !self.eat(b')') {
            return Err(self.err("expected ')' in complex literal"));
        }
        let rm = astro_float::RoundingMode::ToEven;
        let mut cc = astro_float::Consts::new().expect("constant cache");
        let re = astro_float::BigFloat::parse(re, astro_float::Radix::Dec, prec, rm, &mut cc);
        let im = astro_float::BigFloat::parse(im, astro_float::Radix::Dec, prec, rm, &mut cc);
        Ok(Scalar::Cx(BigComplex::new(re, im, prec)))
    }

    /// Exponent: bare integer or parenthesized rational.
    fn exponent(&mut self) -> Result<Exp> {
        self.skip_ws();
        if self.eat(b'(') {
            self.skip_ws();
            let r = self.rational()?;
            self.skip_ws();
            if !self.eat(b')') {
                return Err(self.err("expected ')' after exponent"));
            }
            return to_exp(&r).ok_or(Error::ExponentNotRational);
        }
        let i = self.int()?;
        to_exp(&BigRational::from_integer(i)).ok_or(Error::ExponentNotRational)
    }
}

fn to_exp(r: &BigRational) -> Option<Exp> {
    use num::traits::ToPrimitive;
    Some(exp(r.numer().to_i64()?, r.denom().to_i64()?))
}

/// Parse a series expression. Variables named in the text must all agree;
/// `default_var` applies when the expression is purely numeric.
pub fn parse_series(text: &str, default_var: VarTag) -> Result<PuiseuxSeries> {
    parse_series_with(text, default_var, DEFAULT_PREC)
}

/// As `parse_series`, with an explicit precision for complex literals.
pub fn parse_series_with(text: &str, default_var: VarTag, prec: usize) -> Result<PuiseuxSeries> {
    let mut cur = Cursor::new(text);
    let mut var: Option<VarTag> = None;
    let mut terms: Vec<(Exp, Scalar)> = Vec::new();

    cur.skip_ws();
    if cur.at_end() {
        return Err(cur.err("empty expression"));
    }
    let mut pending_sign = if cur.eat(b'-') {
        -1
    } else {
        let _ = cur.eat(b'+');
        1
    };

    loop {
        cur.skip_ws();
        // one term: [coeff] [* var [^ exp]] | var [^ exp]
        let mut coeff: Option<Scalar> = None;
        let mut exp_val: Option<Exp> = None;
        let mut term_var: Option<VarTag> = None;

        match cur.peek() {
            Some(b'(') => {
                cur.bump();
                coeff = Some(cur.complex(prec)?);
            }
            Some(b'0'..=b'9') => {
                coeff = Some(Scalar::Rat(cur.rational()?));
            }
            Some(b'a'..=b'z') | Some(b'A'..=b'Z') => {}
            _ => return Err(cur.err("expected a coefficient or variable")),
        }

        cur.skip_ws();
        if coeff.is_some() {
            cur.eat(b'*');
            cur.skip_ws();
        }
        if matches!(cur.peek(), Some(b'a'..=b'z') | Some(b'A'..=b'Z')) {
            let at = cur.pos;
            let name = cur.ident().unwrap();
            let v = VarTag::parse(name).ok_or_else(|| Error::Syntax {
                offset: at,
                message: format!("unknown variable '{name}'"),
            })?;
            term_var = Some(v);
            cur.skip_ws();
            if cur.eat(b'^') {
                exp_val = Some(cur.exponent()?);
            } else {
                exp_val = Some(exp(1, 1));
            }
        }

        let c = coeff.unwrap_or_else(Scalar::one);
        let c = if pending_sign < 0 { c.neg() } else { c };
        let e = exp_val.unwrap_or_else(|| exp(0, 1));
        if let Some(v) = term_var {
            match var {
                None => var = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::VariableMismatch(prev.name(), v.name()))
                }
                _ => {}
            }
        }
        terms.push((e, c));

        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(b'+') => {
                cur.bump();
                pending_sign = 1;
            }
            Some(b'-') => {
                cur.bump();
                pending_sign = -1;
            }
            _ => return Err(cur.err("expected '+', '-', or end of expression")),
        }
        cur.skip_ws();
        if cur.at_end() {
            return Err(cur.err("dangling operator"));
        }
    }

    Ok(PuiseuxSeries::from_terms(var.unwrap_or(default_var), terms))
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

fn format_exp(e: &Exp) -> String {
    if e.denom() == &1 {
        format!("{}", e.numer())
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

fn format_coeff(c: &Scalar) -> String {
    format!("{c}")
}

/// Deterministic ascending-exponent rendering; inverse of the parser on
/// rational data.
pub fn format_series(f: &PuiseuxSeries) -> String {
    if f.is_zero_known() {
        return "0".to_string();
    }
    let var = f.var().name();
    let mut out = String::new();
    for (i, (e, c)) in f.terms().enumerate() {
        // split a leading minus off rational coefficients so terms join as
        // "a - b" rather than "a + -b"
        let (neg, mag) = match c {
            Scalar::Rat(r) if r.is_negative() => (true, Scalar::Rat(-r)),
            _ => (false, c.clone()),
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let is_const = e.is_zero();
        let coeff_str = format_coeff(&mag);
        if is_const {
            out.push_str(&coeff_str);
        } else {
            if !mag.is_one() || matches!(mag, Scalar::Cx(_)) {
                out.push_str(&coeff_str);
                out.push('*');
            }
            out.push_str(var);
            if *e != exp(1, 1) {
                out.push('^');
                out.push_str(&format_exp(e));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

fn rational_string(e: &Exp) -> String {
    if e.denom() == &1 {
        format!("{}", e.numer())
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

fn terms_json(f: &PuiseuxSeries) -> serde_json::Value {
    serde_json::Value::Array(
        f.terms()
            .map(|(e, c)| {
                serde_json::json!({
                    "exp": rational_string(e),
                    "coeff": format_coeff(c),
                })
            })
            .collect(),
    )
}

/// JSON for a bare series (all values carried as exact strings).
pub fn series_to_json(f: &PuiseuxSeries) -> serde_json::Value {
    serde_json::json!({
        "variable": f.var().name(),
        "ramification": f.ram(),
        "terms": terms_json(f),
    })
}

/// JSON for a canonical class, with the optional jordan size of its summand.
pub fn class_to_json(c: &CanonicalClass, jordan: Option<u32>) -> serde_json::Value {
    let mut v = serde_json::json!({
        "variable": c.var().name(),
        "ramification": c.q(),
        "slope": rational_string(&c.slope()),
        "terms": terms_json(c.rep()),
    });
    if let Some(m) = jordan {
        v["jordan"] = serde_json::json!(m);
    }
    v
}
