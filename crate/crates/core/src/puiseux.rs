//! Truncated Puiseux series over the scalar field.
//!
//! A series stores finitely many exact terms together with an exactness
//! window `(lo, hi)`: every coefficient at an exponent strictly inside the
//! window is known exactly, everything outside is unknown. Ordinary series
//! have `lo = -inf`; a finite `hi` is the truncation order. Reciprocal
//! substitution flips the window, which is why both ends are tracked.
//! Every operation documents how it propagates the window, so "exact below
//! the truncation" is a checked contract rather than a convention.

use std::collections::BTreeMap;
use std::fmt;

use num::integer::lcm;
use num::rational::Ratio;
use num::traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponents are exact rationals with small numerator and denominator.
pub type Exp = Ratio<i64>;

pub fn exp(num: i64, den: i64) -> Exp {
    Ratio::new(num, den)
}

pub fn exp_int(n: i64) -> Exp {
    Ratio::from_integer(n)
}

/// One of the four coordinates: z at the origin, zeta = 1/z at infinity, and
/// their transform-side counterparts zhat and zetahat = 1/zhat.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarTag {
    Z,
    Zeta,
    Zhat,
    Zetahat,
}

impl VarTag {
    pub fn reciprocal(self) -> VarTag {
        match self {
            VarTag::Z => VarTag::Zeta,
            VarTag::Zeta => VarTag::Z,
            VarTag::Zhat => VarTag::Zetahat,
            VarTag::Zetahat => VarTag::Zhat,
        }
    }

    /// True for the coordinates centered at the point at infinity.
    pub fn at_infinity(self) -> bool {
        matches!(self, VarTag::Zeta | VarTag::Zetahat)
    }

    pub fn name(self) -> &'static str {
        match self {
            VarTag::Z => "z",
            VarTag::Zeta => "zeta",
            VarTag::Zhat => "zhat",
            VarTag::Zetahat => "zetahat",
        }
    }

    pub fn parse(s: &str) -> Option<VarTag> {
        match s {
            "z" => Some(VarTag::Z),
            "zeta" => Some(VarTag::Zeta),
            "zhat" => Some(VarTag::Zhat),
            "zetahat" => Some(VarTag::Zetahat),
            _ => None,
        }
    }
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Extended exponent value for window ends and orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    NegInf,
    At(Exp),
    PosInf,
}

impl Bound {
    pub fn finite(self) -> Option<Exp> {
        match self {
            Bound::At(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, Bound::PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, Bound::NegInf)
    }

    /// Sum with the convention that an infinite summand dominates.
    /// `NegInf + PosInf` is a programming error and panics.
    pub fn add(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::At(a), Bound::At(b)) => Bound::At(a + b),
            (Bound::PosInf, Bound::NegInf) | (Bound::NegInf, Bound::PosInf) => {
                panic!("indeterminate bound sum")
            }
            (Bound::PosInf, _) | (_, Bound::PosInf) => Bound::PosInf,
            (Bound::NegInf, _) | (_, Bound::NegInf) => Bound::NegInf,
        }
    }

    pub fn add_exp(self, e: Exp) -> Bound {
        self.add(Bound::At(e))
    }

    /// Multiply a finite bound by a nonzero rational, flipping ends for
    /// negative factors at the call site.
    pub fn scale(self, f: Exp) -> Bound {
        assert!(!f.is_zero());
        match self {
            Bound::At(e) => Bound::At(e * f),
            Bound::PosInf => {
                if f.is_positive() {
                    Bound::PosInf
                } else {
                    Bound::NegInf
                }
            }
            Bound::NegInf => {
                if f.is_positive() {
                    Bound::NegInf
                } else {
                    Bound::PosInf
                }
            }
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::At(e) => write!(f, "{}", e),
            Bound::PosInf => f.write_str("+inf"),
        }
    }
}

/// Open exactness interval `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Bound,
    pub hi: Bound,
}

impl Window {
    pub fn full() -> Window {
        Window {
            lo: Bound::NegInf,
            hi: Bound::PosInf,
        }
    }

    pub fn upto(hi: Bound) -> Window {
        Window {
            lo: Bound::NegInf,
            hi,
        }
    }

    pub fn is_full(&self) -> bool {
        self.lo.is_neg_inf() && self.hi.is_pos_inf()
    }

    pub fn contains(&self, e: Exp) -> bool {
        Bound::At(e) > self.lo && Bound::At(e) < self.hi
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    fn flip(&self) -> Window {
        Window {
            lo: self.hi.scale(exp_int(-1)),
            hi: self.lo.scale(exp_int(-1)),
        }
    }
}

/// A truncated Puiseux series: finitely many exact terms inside an exactness
/// window, with exponents in `(1/ram) Z`.
#[derive(Clone, Debug)]
pub struct PuiseuxSeries {
    var: VarTag,
    ram: i64,
    terms: BTreeMap<Exp, Scalar>,
    window: Window,
}

fn exp_den_lcm(acc: i64, e: &Exp) -> i64 {
    lcm(acc, *e.denom())
}

impl PuiseuxSeries {
    // -- constructors -------------------------------------------------------

    /// The exact zero series (full window).
    pub fn zero(var: VarTag) -> Self {
        PuiseuxSeries {
            var,
            ram: 1,
            terms: BTreeMap::new(),
            window: Window::full(),
        }
    }

    pub fn one(var: VarTag) -> Self {
        Self::constant(var, Scalar::one())
    }

    pub fn constant(var: VarTag, c: Scalar) -> Self {
        Self::monomial(var, exp_int(0), c)
    }

    pub fn monomial(var: VarTag, e: Exp, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        PuiseuxSeries {
            var,
            ram: *e.denom(),
            terms,
            window: Window::full(),
        }
    }

    /// Build an exact series from term pairs; coefficients at equal exponents
    /// are summed and zeros pruned.
    pub fn from_terms(var: VarTag, it: impl IntoIterator<Item = (Exp, Scalar)>) -> Self {
        let mut s = PuiseuxSeries::zero(var);
        for (e, c) in it {
            s.add_term(e, c);
        }
        s
    }

    fn add_term(&mut self, e: Exp, c: Scalar) {
        if !self.window.contains(e) {
            return;
        }
        let entry = match self.terms.remove(&e) {
            Some(prev) => prev.add(&c),
            None => c,
        };
        if !entry.is_zero() {
            self.ram = exp_den_lcm(self.ram, &e);
            self.terms.insert(e, entry);
        }
    }

    // -- accessors ----------------------------------------------------------

    pub fn var(&self) -> VarTag {
        self.var
    }

    pub fn ram(&self) -> i64 {
        self.ram
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// The truncation order: coefficients at exponents below it are exact.
    pub fn trunc(&self) -> Bound {
        self.window.hi
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: Exp) -> Scalar {
        self.terms.get(&e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero_known(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the series is exactly zero with nothing unknown.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.window.is_full()
    }

    /// Smallest denominator q with all exponents in (1/q) Z.
    pub fn minimal_ram(&self) -> i64 {
        self.terms.keys().fold(1, exp_den_lcm)
    }

    /// Retag the variable without touching terms (coordinate relabelling).
    pub fn with_var(&self, var: VarTag) -> Self {
        let mut s = self.clone();
        s.var = var;
        s
    }

    /// Declare a coarser ramification; errors when an exponent does not fit.
    pub fn with_ram(&self, q: i64) -> Result<Self> {
        assert!(q >= 1);
        for e in self.terms.keys() {
            if (*e * exp_int(q)).denom() != &1 {
                return Err(Error::RamificationMismatch(q));
            }
        }
        let mut s = self.clone();
        s.ram = q;
        Ok(s)
    }

    /// Shrink the window to `window ∩ other`, dropping terms that fall out.
    pub fn restricted(&self, w: Window) -> Result<Self> {
        let window = self.window.intersect(&w);
        if window.is_empty() {
            return Err(Error::InsufficientPrecision(
                "exactness window collapsed".into(),
            ));
        }
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| window.contains(**e))
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        Ok(PuiseuxSeries {
            var: self.var,
            ram: self.ram,
            terms,
            window,
        })
    }

    /// Cap the truncation end of the window at `hi`.
    pub fn truncated(&self, hi: Bound) -> Self {
        self.restricted(Window::upto(hi))
            .expect("upper truncation cannot collapse a valid window")
    }

    // -- order --------------------------------------------------------------

    /// Leading exponent. `PosInf` for the exact zero series; an error when
    /// unknown content could precede the first stored term.
    pub fn ord(&self) -> Result<Bound> {
        if !self.window.lo.is_neg_inf() {
            return Err(Error::IndeterminateOrder);
        }
        match self.terms.keys().next() {
            Some(e) => Ok(Bound::At(*e)),
            None => {
                if self.window.hi.is_pos_inf() {
                    Ok(Bound::PosInf)
                } else {
                    Err(Error::IndeterminateOrder)
                }
            }
        }
    }

    /// Leading exponent and coefficient; errors unless these are certain.
    pub fn leading(&self) -> Result<(Exp, Scalar)> {
        match self.ord()? {
            Bound::At(e) => Ok((e, self.coeff(e))),
            _ => Err(Error::ZeroDivisor),
        }
    }

    /// Lower bound on the order usable for window propagation. Requires
    /// `lo = -inf`; `PosInf` means the series is exactly zero.
    fn ord_lb(&self) -> Result<Bound> {
        if !self.window.lo.is_neg_inf() {
            return Err(Error::IndeterminateOrder);
        }
        match self.terms.keys().next() {
            Some(e) => Ok(Bound::At(*e)),
            None => Ok(self.window.hi),
        }
    }

    fn min_stored(&self) -> Option<Exp> {
        self.terms.keys().next().copied()
    }

    fn max_stored(&self) -> Option<Exp> {
        self.terms.keys().next_back().copied()
    }

    // -- ring operations ----------------------------------------------------

    fn check_var(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(self.var.name(), other.var.name()));
        }
        Ok(())
    }

    /// Termwise sum; window is the intersection.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let window = self.window.intersect(&other.window);
        if window.is_empty() {
            return Err(Error::InsufficientPrecision(
                "adding series with disjoint exactness windows".into(),
            ));
        }
        let mut out = PuiseuxSeries {
            var: self.var,
            ram: lcm(self.ram, other.ram),
            terms: BTreeMap::new(),
            window,
        };
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, c.neg()))
            .collect();
        PuiseuxSeries {
            var: self.var,
            ram: self.ram,
            terms,
            window: self.window,
        }
    }

    pub fn add_scalar(&self, c: &Scalar) -> Result<Self> {
        self.add(&PuiseuxSeries::constant(self.var, c.clone()))
    }

    pub fn mul_scalar(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            // scalar zero keeps the window: unknown content times zero is zero
            return PuiseuxSeries {
                var: self.var,
                ram: 1,
                terms: BTreeMap::new(),
                window: Window::full(),
            };
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, k)| (*e, k.mul(c)))
            .filter(|(_, k)| !k.is_zero())
            .collect();
        PuiseuxSeries {
            var: self.var,
            ram: self.ram,
            terms,
            window: self.window,
        }
    }

    /// Multiply by the monomial `c * v^e` (exact shift-and-scale).
    pub fn mul_monomial(&self, e: Exp, c: &Scalar) -> Self {
        if c.is_zero() {
            return PuiseuxSeries::zero(self.var);
        }
        let terms: BTreeMap<Exp, Scalar> = self
            .terms
            .iter()
            .map(|(k, v)| (*k + e, v.mul(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        PuiseuxSeries {
            var: self.var,
            ram: terms.keys().fold(lcm(self.ram, *e.denom()), exp_den_lcm),
            terms,
            window: Window {
                lo: self.window.lo.add_exp(e),
                hi: self.window.hi.add_exp(e),
            },
        }
    }

    /// Product with sound window propagation. With `U_f` the unknown region
    /// of f and `S_f` its stored support, the product is unknown on
    /// `U_f + S_g`, `S_f + U_g` and `U_f + U_g`; the result window is the
    /// interval that remains.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(PuiseuxSeries::zero(self.var));
        }

        let f = self;
        let g = other;
        // mixed low/high truncation smears the unknown region over everything
        let f_lo_open = !f.window.lo.is_neg_inf();
        let g_lo_open = !g.window.lo.is_neg_inf();
        let f_hi_open = !f.window.hi.is_pos_inf();
        let g_hi_open = !g.window.hi.is_pos_inf();
        if (f_lo_open && g_hi_open) || (g_lo_open && f_hi_open) {
            return Err(Error::InsufficientPrecision(
                "product of low-truncated and high-truncated series has no exact window".into(),
            ));
        }

        let mut hi = Bound::PosInf;
        if f_hi_open {
            if let Some(m) = g.min_stored() {
                hi = hi.min(f.window.hi.add_exp(m));
            }
            if g_hi_open {
                hi = hi.min(f.window.hi.add(g.window.hi));
            } else if g.terms.is_empty() {
                // g is exactly zero handled above, so g has terms or full hi
            }
        }
        if g_hi_open {
            if let Some(m) = f.min_stored() {
                hi = hi.min(g.window.hi.add_exp(m));
            }
        }
        let mut lo = Bound::NegInf;
        if f_lo_open {
            if let Some(m) = g.max_stored() {
                lo = lo.max(f.window.lo.add_exp(m));
            }
            if g_lo_open {
                lo = lo.max(f.window.lo.add(g.window.lo));
            }
        }
        if g_lo_open {
            if let Some(m) = f.max_stored() {
                lo = lo.max(g.window.lo.add_exp(m));
            }
        }

        let window = Window { lo, hi };
        if window.is_empty() {
            return Err(Error::InsufficientPrecision(
                "product window collapsed".into(),
            ));
        }
        let mut out = PuiseuxSeries {
            var: self.var,
            ram: lcm(self.ram, other.ram),
            terms: BTreeMap::new(),
            window,
        };
        for (ef, cf) in f.terms.iter() {
            for (eg, cg) in g.terms.iter() {
                out.add_term(*ef + *eg, cf.mul(cg));
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse computed to the requested truncation. The
    /// propagated window is `trunc(f) - 2 ord(f)`, capped at `req`.
    pub fn mul_inverse(&self, req: Bound) -> Result<Self> {
        let (l, a) = match self.leading() {
            Ok(x) => x,
            Err(Error::ZeroDivisor) => return Err(Error::ZeroDivisor),
            Err(e) => return Err(e),
        };
        let a_inv = a.inv()?;
        // f = a v^l (1 + u); 1/f = a^-1 v^-l sum (-u)^k
        let lead_inv = PuiseuxSeries::monomial(self.var, -l, a_inv.clone());
        let u = self.mul_monomial(-l, &a_inv).add_scalar(&Scalar::one().neg())?;
        let target = req.min(self.window.hi.add_exp(-l - l));
        if matches!(target, Bound::NegInf) {
            return Err(Error::InsufficientPrecision("inverse window empty".into()));
        }
        // truncate u for efficiency; the window math keeps this sound
        let u_eff = u.truncated(target.add_exp(l).min(u.window.hi));
        let ord_u = match u_eff.ord_lb()? {
            Bound::PosInf => {
                // pure monomial: inverse is exact
                return Ok(lead_inv);
            }
            Bound::At(e) => e,
            Bound::NegInf => unreachable!(),
        };
        debug_assert!(ord_u.is_positive());
        let mut acc = PuiseuxSeries::one(self.var).truncated(target.add_exp(l));
        let mut pw = PuiseuxSeries::one(self.var);
        let mut k: i64 = 0;
        loop {
            k += 1;
            if Bound::At(ord_u * exp_int(k)) >= target.add_exp(l) {
                break;
            }
            pw = pw.mul(&u_eff)?.neg();
            let capped = pw.truncated(target.add_exp(l).min(pw.window.hi));
            acc = acc.add(&capped)?;
        }
        let out = acc.mul(&lead_inv)?;
        Ok(out.truncated(target.min(out.window.hi)))
    }

    /// Integer power with truncation propagation; `req` bounds the expansion
    /// work for negative exponents.
    pub fn pow_int(&self, m: i64, req: Bound) -> Result<Self> {
        if m == 0 {
            return Ok(PuiseuxSeries::one(self.var));
        }
        if m < 0 {
            let (l, _) = self.leading()?;
            // the |m|-th power of the inverse loses (|m|-1) * ord(inverse)
            let inv_req = req.add_exp(l * exp_int(m.abs() - 1));
            let inv = self.mul_inverse(inv_req)?;
            return inv.pow_int(-m, req);
        }
        let mut acc: Option<PuiseuxSeries> = None;
        let mut base = self.clone();
        let mut k = m;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(acc.unwrap())
    }

    /// Formal derivative with respect to the series variable.
    pub fn derivative(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms.iter() {
            let factor = Scalar::from_exp(*e);
            let nc = c.mul(&factor);
            if !nc.is_zero() {
                terms.insert(*e - exp_int(1), nc);
            }
        }
        let window = Window {
            lo: self.window.lo.add_exp(exp_int(-1)),
            hi: self.window.hi.add_exp(exp_int(-1)),
        };
        PuiseuxSeries {
            var: self.var,
            ram: terms.keys().fold(1, exp_den_lcm),
            terms,
            window,
        }
    }

    /// Rewrite in the reciprocal coordinate: `c v^e` becomes `c w^-e` and the
    /// exactness window flips sign.
    pub fn substitute_reciprocal(&self) -> Self {
        let terms: BTreeMap<Exp, Scalar> = self
            .terms
            .iter()
            .map(|(e, c)| (-*e, c.clone()))
            .collect();
        PuiseuxSeries {
            var: self.var.reciprocal(),
            ram: self.ram,
            terms,
            window: self.window.flip(),
        }
    }

    /// Termwise equality of the stored coefficients (windows are ignored).
    pub fn terms_approx_eq(&self, other: &Self) -> bool {
        if self.var != other.var {
            return false;
        }
        let keys: std::collections::BTreeSet<Exp> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        keys.into_iter()
            .all(|e| self.coeff(e).approx_eq(&other.coeff(e)))
    }

    /// Largest coefficient magnitude as f64 (diagnostics and residual tests).
    pub fn max_coeff_mag(&self) -> f64 {
        self.terms
            .values()
            .map(|c| match c {
                Scalar::Rat(r) => {
                    let n = r.numer().to_string().len() as f64;
                    let d = r.denom().to_string().len() as f64;
                    10f64.powf(n - d + 1.0)
                }
                Scalar::Cx(cx) => {
                    let e = cx
                        .re()
                        .exponent()
                        .unwrap_or(i32::MIN)
                        .max(cx.im().exponent().unwrap_or(i32::MIN));
                    if e == i32::MIN {
                        0.0
                    } else {
                        2f64.powi(e)
                    }
                }
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::format_series(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(var: VarTag, terms: &[(i64, i64, i64)]) -> PuiseuxSeries {
        // (num, den, coeff) triples with integer coefficients
        PuiseuxSeries::from_terms(
            var,
            terms
                .iter()
                .map(|&(n, d, c)| (exp(n, d), Scalar::from_i64(c))),
        )
    }

    #[test]
    fn ord_reads_leading_exponent() {
        let f = s(VarTag::Z, &[(-3, 2, 3), (1, 1, 1)]);
        assert_eq!(f.ord().unwrap(), Bound::At(exp(-3, 2)));
    }

    #[test]
    fn ord_of_exact_zero_is_infinite() {
        assert_eq!(PuiseuxSeries::zero(VarTag::Z).ord().unwrap(), Bound::PosInf);
    }

    #[test]
    fn ord_of_truncated_zero_is_indeterminate() {
        let f = PuiseuxSeries::zero(VarTag::Z).truncated(Bound::At(exp_int(-1)));
        assert_eq!(f.ord().unwrap_err().name(), "IndeterminateOrder");
    }

    #[test]
    fn additive_inverse_cancels() {
        let f = s(VarTag::Z, &[(-1, 1, 1)]);
        let g = f.neg();
        let sum = f.add(&g).unwrap();
        assert!(sum.is_zero_known());
        assert!(sum.window().is_full());
    }

    #[test]
    fn half_powers_multiply_to_ram_two() {
        let h = s(VarTag::Z, &[(1, 2, 1)]);
        let p = h.mul(&h).unwrap();
        assert!(p.terms_approx_eq(&s(VarTag::Z, &[(1, 1, 1)])));
        assert_eq!(p.ram(), 2);
    }

    #[test]
    fn mul_propagates_truncation() {
        // (1 + z) * (1 - z) with both factors truncated at 2 keeps only the
        // constant: z^2 is outside the propagated window
        let f = s(VarTag::Z, &[(0, 1, 1), (1, 1, 1)]).truncated(Bound::At(exp_int(2)));
        let g = s(VarTag::Z, &[(0, 1, 1), (1, 1, -1)]).truncated(Bound::At(exp_int(2)));
        let p = f.mul(&g).unwrap();
        assert_eq!(p.trunc(), Bound::At(exp_int(2)));
        assert!(p.terms_approx_eq(&s(VarTag::Z, &[(0, 1, 1)])));
    }

    #[test]
    fn variable_mismatch_is_rejected() {
        let f = s(VarTag::Z, &[(0, 1, 1)]);
        let g = s(VarTag::Zeta, &[(0, 1, 1)]);
        assert_eq!(f.add(&g).unwrap_err().name(), "VariableMismatch");
    }

    #[test]
    fn inverse_of_scaled_monomial() {
        let f = s(VarTag::Z, &[(1, 1, 2)]);
        let inv = f.mul_inverse(Bound::PosInf).unwrap();
        let expect = PuiseuxSeries::monomial(VarTag::Z, exp_int(-1), Scalar::from_ratio(1, 2));
        assert!(inv.terms_approx_eq(&expect));
    }

    #[test]
    fn inverse_of_one_minus_z_is_geometric() {
        let f = s(VarTag::Z, &[(0, 1, 1), (1, 1, -1)]);
        let inv = f.mul_inverse(Bound::At(exp_int(4))).unwrap();
        assert!(inv.terms_approx_eq(&s(VarTag::Z, &[(0, 1, 1), (1, 1, 1), (2, 1, 1), (3, 1, 1)])));
        // oracle: the product is 1 below the propagated window
        let prod = f.mul(&inv).unwrap();
        assert_eq!(prod.trunc(), Bound::At(exp_int(4)));
        assert!(prod.terms_approx_eq(&PuiseuxSeries::one(VarTag::Z)));
    }

    #[test]
    fn inverse_of_zero_fails() {
        let z = PuiseuxSeries::zero(VarTag::Z);
        assert_eq!(z.mul_inverse(Bound::PosInf).unwrap_err().name(), "ZeroDivisor");
    }

    #[test]
    fn binomial_square_with_half_power() {
        let f = s(VarTag::Z, &[(1, 2, 1), (0, 1, 1)]);
        let sq = f.pow_int(2, Bound::PosInf).unwrap();
        assert!(sq.terms_approx_eq(&s(VarTag::Z, &[(1, 1, 1), (1, 2, 2), (0, 1, 1)])));
    }

    #[test]
    fn zeroth_power_is_one() {
        let f = s(VarTag::Z, &[(2, 1, 5)]);
        assert!(f
            .pow_int(0, Bound::PosInf)
            .unwrap()
            .terms_approx_eq(&PuiseuxSeries::one(VarTag::Z)));
    }

    #[test]
    fn negative_power_of_monomial() {
        let f = s(VarTag::Z, &[(-2, 1, 2)]);
        let p = f.pow_int(-1, Bound::PosInf).unwrap();
        let expect = PuiseuxSeries::monomial(VarTag::Z, exp_int(2), Scalar::from_ratio(1, 2));
        assert!(p.terms_approx_eq(&expect));
    }

    #[test]
    fn reciprocal_substitution_examples() {
        let f = s(VarTag::Zhat, &[(2, 1, 1)]);
        let r = f.substitute_reciprocal();
        assert_eq!(r.var(), VarTag::Zetahat);
        assert!(r.terms_approx_eq(&s(VarTag::Zetahat, &[(-2, 1, 1)])));

        let z = PuiseuxSeries::zero(VarTag::Z).substitute_reciprocal();
        assert!(z.is_exact_zero());

        let g = s(VarTag::Z, &[(-1, 2, 1), (0, 1, 1)]);
        let rg = g.substitute_reciprocal();
        assert!(rg.terms_approx_eq(&s(VarTag::Zeta, &[(1, 2, 1), (0, 1, 1)])));
    }

    #[test]
    fn reciprocal_flips_window() {
        let f = s(VarTag::Z, &[(1, 1, 1)]).truncated(Bound::At(exp_int(3)));
        let r = f.substitute_reciprocal();
        assert_eq!(r.window().lo, Bound::At(exp_int(-3)));
        assert_eq!(r.window().hi, Bound::PosInf);
    }

    #[test]
    fn low_truncated_times_high_truncated_collapses() {
        let f = s(VarTag::Z, &[(1, 1, 1)])
            .truncated(Bound::At(exp_int(3)))
            .substitute_reciprocal()
            .with_var(VarTag::Z);
        let g = s(VarTag::Z, &[(0, 1, 1)]).truncated(Bound::At(exp_int(5)));
        assert_eq!(
            f.mul(&g).unwrap_err().name(),
            "InsufficientPrecision"
        );
    }

    #[test]
    fn derivative_shifts_and_scales() {
        let f = s(VarTag::Z, &[(3, 1, 1), (0, 1, 7)]);
        let d = f.derivative();
        assert!(d.terms_approx_eq(&s(VarTag::Z, &[(2, 1, 3)])));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_series() -> impl Strategy<Value = PuiseuxSeries> {
            proptest::collection::vec(((-6i64..6), (1i64..4), (-5i64..5)), 0..6).prop_map(|v| {
                PuiseuxSeries::from_terms(
                    VarTag::Z,
                    v.into_iter()
                        .map(|(n, d, c)| (exp(n, d), Scalar::from_i64(c))),
                )
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn mul_commutes(f in arb_series(), g in arb_series()) {
                let fg = f.mul(&g).unwrap();
                let gf = g.mul(&f).unwrap();
                prop_assert!(fg.terms_approx_eq(&gf));
            }

            #[test]
            fn mul_associates(f in arb_series(), g in arb_series(), h in arb_series()) {
                let a = f.mul(&g).unwrap().mul(&h).unwrap();
                let b = f.mul(&g.mul(&h).unwrap()).unwrap();
                prop_assert!(a.terms_approx_eq(&b));
            }

            #[test]
            fn mul_distributes(f in arb_series(), g in arb_series(), h in arb_series()) {
                let a = f.mul(&g.add(&h).unwrap()).unwrap();
                let b = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
                prop_assert!(a.terms_approx_eq(&b));
            }

            #[test]
            fn ord_is_additive(f in arb_series(), g in arb_series()) {
                prop_assume!(!f.is_zero_known() && !g.is_zero_known());
                let (lf, _) = f.leading().unwrap();
                let (lg, _) = g.leading().unwrap();
                let p = f.mul(&g).unwrap();
                prop_assert_eq!(p.ord().unwrap(), Bound::At(lf + lg));
            }

            #[test]
            fn inverse_multiplies_to_one(f in arb_series()) {
                prop_assume!(!f.is_zero_known());
                let req = Bound::At(exp_int(8));
                let inv = f.mul_inverse(req).unwrap();
                let prod = f.mul(&inv).unwrap();
                prop_assert!(prod.terms_approx_eq(&PuiseuxSeries::one(VarTag::Z)));
            }

            #[test]
            fn truncation_is_metamorphically_sound(f in arb_series(), g in arb_series(), noise in -5i64..5) {
                // pipeline on truncated inputs must not see content above trunc
                prop_assume!(!f.is_zero_known());
                let t = Bound::At(exp_int(2));
                let f_t = f.truncated(t);
                let g_t = g.truncated(t);
                let base = f_t.mul(&g_t).unwrap().add(&f_t).unwrap();

                // perturb f above its truncation and rerun
                let noisy = f.add(&PuiseuxSeries::monomial(VarTag::Z, exp_int(3), Scalar::from_i64(noise))).unwrap();
                let noisy_t = noisy.truncated(t);
                let pert = noisy_t.mul(&g_t).unwrap().add(&noisy_t).unwrap();

                let w = base.window().intersect(&pert.window());
                for (e, c) in base.terms() {
                    if w.contains(*e) {
                        prop_assert!(c.approx_eq(&pert.coeff(*e)));
                    }
                }
                for (e, c) in pert.terms() {
                    if w.contains(*e) {
                        prop_assert!(c.approx_eq(&base.coeff(*e)));
                    }
                }
            }
        }
    }
}
