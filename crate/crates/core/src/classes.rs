//! Canonical classes: series data for rank-one connections modulo
//! positive-exponent terms, (1/q) Z constants, and the Galois action.

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::puiseux::{exp, exp_int, Bound, Exp, PuiseuxSeries, VarTag};
use crate::scalar::{Backend, Scalar, DEFAULT_PREC};

/// Integer window for matching irrational constants against the (1/q) Z coset.
const COSET_SEARCH_BOUND: i64 = 64;

/// A representative of the quotient class: ramification q, and a series with
/// exponents <= 0 whose rational constant term lies in [0, 1/q).
#[derive(Clone, Debug)]
pub struct CanonicalClass {
    q: i64,
    rep: PuiseuxSeries,
}

/// Reduce a rational constant modulo 1/q into [0, 1/q).
fn reduce_constant(c: &BigRational, q: i64) -> BigRational {
    let step = BigRational::new(BigInt::from(1), BigInt::from(q));
    let k = (c / &step).floor();
    c - k * step
}

impl CanonicalClass {
    /// Quotient a series: drop positive exponents, reduce the constant.
    /// Requires the input to be exact through exponent zero.
    pub fn normalize(f: &PuiseuxSeries, q: i64) -> Result<CanonicalClass> {
        assert!(q >= 1);
        if f.trunc() <= Bound::At(exp_int(0)) || !f.window().lo.is_neg_inf() {
            return Err(Error::InsufficientPrecision(
                "class normalization needs exactness through exponent 0".into(),
            ));
        }
        let mut terms: Vec<(Exp, Scalar)> = Vec::new();
        for (e, c) in f.terms() {
            if e.is_positive() {
                continue;
            }
            if (*e * exp_int(q)).denom() != &1 {
                return Err(Error::RamificationMismatch(q));
            }
            if e.is_zero() {
                match c {
                    Scalar::Rat(r) => {
                        let red = reduce_constant(r, q);
                        if !red.is_zero() {
                            terms.push((*e, Scalar::Rat(red)));
                        }
                    }
                    Scalar::Cx(_) => terms.push((*e, c.clone())),
                }
            } else {
                terms.push((*e, c.clone()));
            }
        }
        let rep = PuiseuxSeries::from_terms(f.var(), terms).with_ram(q)?;
        Ok(CanonicalClass { q, rep })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn rep(&self) -> &PuiseuxSeries {
        &self.rep
    }

    pub fn var(&self) -> VarTag {
        self.rep.var()
    }

    /// Relabel the coordinate (used when feeding one transform's output into
    /// another chart).
    pub fn retag(&self, var: VarTag) -> CanonicalClass {
        CanonicalClass {
            q: self.q,
            rep: self.rep.with_var(var),
        }
    }

    /// The zero class: no terms, or only a constant lying in (1/q) Z.
    pub fn is_zero_class(&self) -> bool {
        for (e, c) in self.rep.terms() {
            if !e.is_zero() {
                return false;
            }
            let scaled = c.mul(&Scalar::from_i64(self.q));
            if scaled.near_integer(COSET_SEARCH_BOUND * self.q).is_none() {
                return false;
            }
        }
        true
    }

    /// Slope: `max(0, -ord(rep))`.
    pub fn slope(&self) -> Exp {
        match self.rep.ord() {
            Ok(Bound::At(e)) if e.is_negative() => -e,
            _ => exp_int(0),
        }
    }

    /// Minimal-ramification test for the carried q: the gcd of q with all
    /// nonzero-exponent numerators must be 1.
    pub fn is_irreducible(&self) -> bool {
        let mut g = self.q;
        for (e, _) in self.rep.terms() {
            if e.is_zero() {
                continue;
            }
            let n = (*e * exp_int(self.q)).to_integer();
            g = g.gcd(&n.abs());
        }
        g == 1
    }

    /// Galois twist: coefficient at n/q picks up the factor `eta^(n k)` for a
    /// primitive q-th root of unity eta. The rational backend only supports
    /// q <= 2; larger q needs complex coefficients.
    pub fn galois_twist(&self, k: i64) -> Result<CanonicalClass> {
        let k = k.rem_euclid(self.q);
        if k == 0 {
            return Ok(self.clone());
        }
        let backend = if self.rep.terms().all(|(_, c)| c.is_rational()) {
            Backend::Rational
        } else {
            let prec = self
                .rep
                .terms()
                .filter_map(|(_, c)| c.prec())
                .max()
                .unwrap_or(DEFAULT_PREC);
            Backend::Complex { prec }
        };
        let eta = Scalar::root_of_unity(self.q, backend)?;
        let mut terms = Vec::new();
        for (e, c) in self.rep.terms() {
            let n = (*e * exp_int(self.q)).to_integer();
            let pw = (n * k).rem_euclid(self.q);
            terms.push((*e, c.mul(&eta.pow_i64(pw)?)));
        }
        let rep = PuiseuxSeries::from_terms(self.var(), terms).with_ram(self.q)?;
        Ok(CanonicalClass { q: self.q, rep })
    }

    /// Twist factor `eta^pw` expressed exactly when it is rational, so that
    /// rational classes compare without ever materializing eta.
    fn rational_twist_factor(q: i64, pw: i64) -> Option<i64> {
        let pw = pw.rem_euclid(q);
        if pw == 0 {
            Some(1)
        } else if q % 2 == 0 && pw == q / 2 {
            Some(-1)
        } else {
            None
        }
    }

    fn constants_in_same_coset(&self, other: &CanonicalClass) -> bool {
        let c1 = self.rep.coeff(exp_int(0));
        let c2 = other.rep.coeff(exp_int(0));
        if c1.is_zero() && c2.is_zero() {
            return true;
        }
        let diff = c1.sub(&c2).mul(&Scalar::from_i64(self.q));
        diff.near_integer(COSET_SEARCH_BOUND * self.q).is_some()
    }

    fn twist_matches(&self, k: i64, other: &CanonicalClass) -> Result<bool> {
        let q = self.q;
        let keys: std::collections::BTreeSet<Exp> = self
            .rep
            .terms()
            .map(|(e, _)| *e)
            .chain(other.rep.terms().map(|(e, _)| *e))
            .filter(|e| !e.is_zero())
            .collect();
        let mut eta: Option<Scalar> = None;
        for e in keys {
            let a = self.rep.coeff(e);
            let b = other.rep.coeff(e);
            let n = (e * exp_int(q)).to_integer();
            let pw = (n * k).rem_euclid(q);
            let matched = match Self::rational_twist_factor(q, pw) {
                Some(f) => a.mul(&Scalar::from_i64(f)).approx_eq(&b),
                None => {
                    if a.is_rational() && b.is_rational() {
                        // a nonzero rational times an irrational phase can never
                        // be rational, and the zero cases share support
                        a.is_zero() && b.is_zero()
                    } else {
                        let prec = a.prec().or(b.prec()).unwrap_or(DEFAULT_PREC);
                        if eta.is_none() {
                            eta = Some(Scalar::root_of_unity(q, Backend::Complex { prec })?);
                        }
                        let f = eta.as_ref().unwrap().pow_i64(pw)?;
                        a.mul(&f).approx_eq(&b)
                    }
                }
            };
            if !matched {
                return Ok(false);
            }
        }
        Ok(self.constants_in_same_coset(other))
    }

    /// Orbit equality: same q and some Galois twist matches termwise, with
    /// constants compared modulo (1/q) Z.
    pub fn classes_equal(&self, other: &CanonicalClass) -> Result<bool> {
        if self.var() != other.var() {
            return Err(Error::VariableMismatch(
                self.var().name(),
                other.var().name(),
            ));
        }
        if self.q != other.q {
            return Ok(false);
        }
        for k in 0..self.q {
            if self.twist_matches(k, other)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Deterministic display representative: the lexicographically least
    /// twist under (re, im) coefficient ordering by ascending exponent.
    /// Falls back to the stored representative when twists are unavailable.
    pub fn display_rep(&self) -> PuiseuxSeries {
        let mut best: Option<PuiseuxSeries> = None;
        for k in 0..self.q {
            let tw = match self.galois_twist(k) {
                Ok(t) => t.rep,
                Err(_) => return self.rep.clone(),
            };
            best = Some(match best {
                None => tw,
                Some(b) => {
                    if series_lex_less(&tw, &b) {
                        tw
                    } else {
                        b
                    }
                }
            });
        }
        best.unwrap_or_else(|| self.rep.clone())
    }
}

fn series_lex_less(a: &PuiseuxSeries, b: &PuiseuxSeries) -> bool {
    let keys: std::collections::BTreeSet<Exp> = a
        .terms()
        .map(|(e, _)| *e)
        .chain(b.terms().map(|(e, _)| *e))
        .collect();
    for e in keys {
        let ca = a.coeff(e);
        let cb = b.coeff(e);
        match ca.cmp_re_im(&cb) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

impl std::fmt::Display for CanonicalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::expr::format_series(&self.display_rep()))
    }
}
