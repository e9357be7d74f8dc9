//! Coefficient field: exact rationals and arbitrary-precision complex floats.
//!
//! Two backends cover everything the transforms need. The rational backend is
//! exact and is the default; it can take n-th roots only when they are again
//! rational. The complex backend carries a per-value binary precision and
//! supplies principal n-th roots and primitive roots of unity for everything
//! else. Equality on the complex backend is tolerance-based with a relative
//! epsilon of `2^-(prec/2)`; values smaller than `2^-(3 prec/4)` are treated
//! as zero so accumulated rounding noise never survives as a spurious term.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num::bigint::BigInt;
use num::integer::Roots;
use num::rational::{BigRational, Ratio};
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Default binary precision for the complex backend.
pub const DEFAULT_PREC: usize = 256;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Backend selector used where a scalar must be built from scratch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Rational,
    Complex { prec: usize },
}

// ---------------------------------------------------------------------------
// BigComplex
// ---------------------------------------------------------------------------

/// Complex number with `prec`-bit real and imaginary parts.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
    prec: usize,
}

fn bf_from_bigint(i: &BigInt, p: usize) -> BigFloat {
    with_consts(|cc| BigFloat::parse(&i.to_string(), Radix::Dec, p, RM, cc))
}

fn bf_from_rational(r: &BigRational, p: usize) -> BigFloat {
    let n = bf_from_bigint(r.numer(), p + 32);
    let d = bf_from_bigint(r.denom(), p + 32);
    n.div(&d, p, RM)
}

/// Binary exponent of |x|, or None when x = 0.
fn bf_mag_exponent(x: &BigFloat) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.exponent().map(|e| e as i64)
    }
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat, prec: usize) -> Self {
        BigComplex { re, im, prec }
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        BigComplex::new(BigFloat::from_f64(re, prec), BigFloat::from_f64(im, prec), prec)
    }

    pub fn from_rational(r: &BigRational, prec: usize) -> Self {
        BigComplex::new(bf_from_rational(r, prec), BigFloat::from_f64(0.0, prec), prec)
    }

    pub fn zero(prec: usize) -> Self {
        BigComplex::from_f64(0.0, 0.0, prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prec.max(other.prec);
        BigComplex::new(self.re.add(&other.re, p, RM), self.im.add(&other.im, p, RM), p)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.prec.max(other.prec);
        BigComplex::new(self.re.sub(&other.re, p, RM), self.im.sub(&other.im, p, RM), p)
    }

    pub fn neg(&self) -> Self {
        BigComplex::new(self.re.neg(), self.im.neg(), self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prec.max(other.prec);
        let ac = self.re.mul(&other.re, p, RM);
        let bd = self.im.mul(&other.im, p, RM);
        let ad = self.re.mul(&other.im, p, RM);
        let bc = self.im.mul(&other.re, p, RM);
        BigComplex::new(ac.sub(&bd, p, RM), ad.add(&bc, p, RM), p)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let p = self.prec.max(other.prec);
        let den = other
            .re
            .mul(&other.re, p, RM)
            .add(&other.im.mul(&other.im, p, RM), p, RM);
        let ac = self.re.mul(&other.re, p, RM);
        let bd = self.im.mul(&other.im, p, RM);
        let bc = self.im.mul(&other.re, p, RM);
        let ad = self.re.mul(&other.im, p, RM);
        Ok(BigComplex::new(
            ac.add(&bd, p, RM).div(&den, p, RM),
            bc.sub(&ad, p, RM).div(&den, p, RM),
        p,
        ))
    }

    fn norm_sqr(&self) -> BigFloat {
        let p = self.prec;
        self.re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    /// Magnitude below the pruning threshold `2^-(3 prec / 4)`.
    pub fn is_zero(&self) -> bool {
        match bf_mag_exponent(&self.norm_sqr()) {
            None => true,
            Some(e) => e <= -(3 * self.prec as i64) / 2,
        }
    }

    /// Tolerance equality with relative epsilon `2^-(prec/2)`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let p = self.prec.min(other.prec);
        let d = self.sub(other).norm_sqr();
        let de = match bf_mag_exponent(&d) {
            None => return true,
            Some(e) => e,
        };
        let scale = bf_mag_exponent(&self.norm_sqr())
            .unwrap_or(0)
            .max(bf_mag_exponent(&other.norm_sqr()).unwrap_or(0))
            .max(0);
        de - scale <= -(p as i64)
    }

    fn atan2(y: &BigFloat, x: &BigFloat, p: usize) -> BigFloat {
        with_consts(|cc| {
            let pi = cc.pi(p, RM);
            if x.is_zero() {
                let half = pi.div(&BigFloat::from_f64(2.0, p), p, RM);
                return if y.is_negative() { half.neg() } else { half };
            }
            let base = y.div(x, p, RM).atan(p, RM, cc);
            if x.is_negative() {
                if y.is_negative() {
                    base.sub(&pi, p, RM)
                } else {
                    base.add(&pi, p, RM)
                }
            } else {
                base
            }
        })
    }

    /// Principal n-th root via polar form: argument lands in `(-pi/n, pi/n]`.
    pub fn nth_root(&self, n: i64) -> Result<Self> {
        assert!(n >= 1);
        if n == 1 {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(BigComplex::zero(self.prec));
        }
        let p = self.prec + 64;
        let nf = BigFloat::from_f64(n as f64, p);
        let r2 = self
            .re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM);
        let r = r2.sqrt(p, RM);
        let theta = Self::atan2(&self.im, &self.re, p);
        let (rho, c, s) = with_consts(|cc| {
            let rho = r.ln(p, RM, cc).div(&nf, p, RM).exp(p, RM, cc);
            let phi = theta.div(&nf, p, RM);
            (rho, phi.cos(p, RM, cc), phi.sin(p, RM, cc))
        });
        let prec = self.prec;
        Ok(BigComplex::new(
            rho.mul(&c, prec, RM),
            rho.mul(&s, prec, RM),
            prec,
        ))
    }

    /// The primitive n-th root of unity `exp(2 pi i / n)`.
    pub fn root_of_unity(n: i64, prec: usize) -> Self {
        assert!(n >= 1);
        let p = prec + 64;
        let theta = with_consts(|cc| {
            cc.pi(p, RM)
                .mul(&BigFloat::from_f64(2.0, p), p, RM)
                .div(&BigFloat::from_f64(n as f64, p), p, RM)
        });
        let (c, s) = with_consts(|cc| (theta.cos(p, RM, cc), theta.sin(p, RM, cc)));
        let one = BigFloat::from_f64(1.0, prec);
        BigComplex::new(c.mul(&one, prec, RM), s.mul(&one, prec, RM), prec)
    }

    pub fn pow_i64(&self, m: i64) -> Result<Self> {
        if m == 0 {
            return Ok(BigComplex::from_f64(1.0, 0.0, self.prec));
        }
        let base = if m < 0 {
            BigComplex::from_f64(1.0, 0.0, self.prec).div(self)?
        } else {
            self.clone()
        };
        let mut acc = BigComplex::from_f64(1.0, 0.0, self.prec);
        let mut b = base;
        let mut k = m.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Ordering by (re, im); used only for the deterministic display twist.
    pub fn cmp_re_im(&self, other: &Self) -> Ordering {
        let c = self.re.cmp(&other.re).unwrap_or(0);
        if c != 0 {
            return if c < 0 { Ordering::Less } else { Ordering::Greater };
        }
        let c = self.im.cmp(&other.im).unwrap_or(0);
        match c {
            x if x < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.re, self.im)
    }
}

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

/// Exact rational n-th root, if one exists.
fn rational_nth_root(x: &BigRational, n: i64) -> Option<BigRational> {
    assert!(n >= 1);
    if n == 1 {
        return Some(x.clone());
    }
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    if x.is_negative() && n % 2 == 0 {
        return None;
    }
    let neg = x.is_negative();
    let num = x.numer().abs();
    let den = x.denom().abs();
    let rn = num.nth_root(n as u32);
    let rd = den.nth_root(n as u32);
    if num != rn.clone().pow(n as u32) || den != rd.clone().pow(n as u32) {
        return None;
    }
    let mut root = BigRational::new(rn, rd);
    if neg {
        root = -root;
    }
    Some(root)
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

/// An element of the coefficient field, in one of the two backends.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rat(BigRational),
    Cx(BigComplex),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(BigRational::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_exp(e: Ratio<i64>) -> Self {
        Scalar::from_ratio(*e.numer(), *e.denom())
    }

    pub fn complex_from_f64(re: f64, im: f64, prec: usize) -> Self {
        Scalar::Cx(BigComplex::from_f64(re, im, prec))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Cx(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&BigComplex> {
        match self {
            Scalar::Cx(c) => Some(c),
            Scalar::Rat(_) => None,
        }
    }

    /// Promote to the complex backend at the given precision.
    pub fn to_complex(&self, prec: usize) -> BigComplex {
        match self {
            Scalar::Rat(r) => BigComplex::from_rational(r, prec),
            Scalar::Cx(c) => c.clone(),
        }
    }

    pub fn prec(&self) -> Option<usize> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Cx(c) => Some(c.prec()),
        }
    }

    fn promote(a: &Scalar, b: &Scalar) -> Option<(BigComplex, BigComplex)> {
        match (a, b) {
            (Scalar::Rat(_), Scalar::Rat(_)) => None,
            _ => {
                let p = a.prec().unwrap_or(0).max(b.prec().unwrap_or(0)).max(DEFAULT_PREC.min(
                    a.prec().or(b.prec()).unwrap_or(DEFAULT_PREC),
                ));
                Some((a.to_complex(p), b.to_complex(p)))
            }
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match Scalar::promote(self, other) {
            None => match (self, other) {
                (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
                _ => unreachable!(),
            },
            Some((a, b)) => Scalar::Cx(a.add(&b)),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Cx(c) => Scalar::Cx(c.neg()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match Scalar::promote(self, other) {
            None => match (self, other) {
                (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
                _ => unreachable!(),
            },
            Some((a, b)) => Scalar::Cx(a.mul(&b)),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        match Scalar::promote(self, other) {
            None => match (self, other) {
                (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a / b)),
                _ => unreachable!(),
            },
            Some((a, b)) => Ok(Scalar::Cx(a.div(&b)?)),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        Scalar::one().div(self)
    }

    pub fn mul_rat(&self, r: &BigRational) -> Scalar {
        self.mul(&Scalar::Rat(r.clone()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Cx(c) => c.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.approx_eq(&Scalar::one())
    }

    /// Exact equality on rationals; tolerance equality once complex is involved.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a == b,
            _ => {
                let (a, b) = Scalar::promote(self, other).expect("mixed promote");
                a.approx_eq(&b)
            }
        }
    }

    /// Principal n-th root. Deterministic branch: positive root for positive
    /// rationals, the real root for odd n, principal argument on the complex
    /// backend.
    pub fn nth_root(&self, n: i64) -> Result<Scalar> {
        assert!(n >= 1, "root degree must be positive");
        match self {
            Scalar::Rat(r) => match rational_nth_root(r, n) {
                Some(root) => Ok(Scalar::Rat(root)),
                None => Err(Error::root_unavailable(self, n, true)),
            },
            Scalar::Cx(c) => Ok(Scalar::Cx(c.nth_root(n)?)),
        }
    }

    /// Primitive n-th root of unity for the requested backend.
    pub fn root_of_unity(n: i64, backend: Backend) -> Result<Scalar> {
        assert!(n >= 1);
        match backend {
            Backend::Rational => match n {
                1 => Ok(Scalar::one()),
                2 => Ok(Scalar::from_i64(-1)),
                _ => Err(Error::root_unavailable("1", n, true)),
            },
            Backend::Complex { prec } => match n {
                1 => Ok(Scalar::complex_from_f64(1.0, 0.0, prec)),
                2 => Ok(Scalar::complex_from_f64(-1.0, 0.0, prec)),
                _ => Ok(Scalar::Cx(BigComplex::root_of_unity(n, prec))),
            },
        }
    }

    pub fn pow_i64(&self, m: i64) -> Result<Scalar> {
        match self {
            Scalar::Rat(r) => {
                if m == 0 {
                    return Ok(Scalar::one());
                }
                if r.is_zero() && m < 0 {
                    return Err(Error::ZeroDivisor);
                }
                let p = r.pow(m.unsigned_abs() as u32 as i32);
                Ok(Scalar::Rat(if m < 0 { p.recip() } else { p }))
            }
            Scalar::Cx(c) => Ok(Scalar::Cx(c.pow_i64(m)?)),
        }
    }

    /// `self^e` for rational e, via the principal root of the base.
    pub fn pow_exp(&self, e: Ratio<i64>) -> Result<Scalar> {
        if e.is_zero() {
            return Ok(Scalar::one());
        }
        if *e.denom() == 1 {
            return self.pow_i64(*e.numer());
        }
        self.nth_root(*e.denom())?.pow_i64(*e.numer())
    }

    /// Ordering key used only by the deterministic display representative.
    pub fn cmp_re_im(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a.cmp(b),
            _ => {
                let (a, b) = Scalar::promote(self, other).expect("mixed promote");
                a.cmp_re_im(&b)
            }
        }
    }

    /// Nearest integer t with |self - t| within tolerance, searched over
    /// |t| <= bound. Exact test on rationals.
    pub fn near_integer(&self, bound: i64) -> Option<i64> {
        match self {
            Scalar::Rat(r) => {
                if r.is_integer() {
                    r.to_integer().to_i64().filter(|t| t.abs() <= bound)
                } else {
                    None
                }
            }
            Scalar::Cx(c) => {
                for t in -bound..=bound {
                    let ti = BigComplex::from_f64(t as f64, 0.0, c.prec());
                    if c.approx_eq(&ti) {
                        return Some(t);
                    }
                }
                None
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Cx(c) => write!(f, "{}", c),
        }
    }
}
