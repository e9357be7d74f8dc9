//! The three local Fourier transforms on canonical classes, and their lift
//! to direct sums.
//!
//! Each transform is computed at series level: solve the defining coordinate
//! equation for the input coordinate in terms of the output one, substitute
//! into the class representative, and add the constant `s / (2 q_out)`. The
//! integer-valued operator term that also appears at exponent zero is killed
//! by the (1/q) Z coset quotient, so it never needs to be materialized here;
//! the operator route lives in `oplab` as verification.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::classes::CanonicalClass;
use crate::compose::{comp_inverse_with_branch, compose, required_inner_trunc};
use crate::connection::ConnectionObject;
use crate::error::{Error, Result};
use crate::puiseux::{exp, exp_int, Bound, PuiseuxSeries, VarTag};
use crate::scalar::Scalar;

/// The three functors, named by source and target point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    ZeroToInf,
    InfToZero,
    InfToInf,
}

impl TransformKind {
    pub fn cli_name(self) -> &'static str {
        match self {
            TransformKind::ZeroToInf => "0-inf",
            TransformKind::InfToZero => "inf-0",
            TransformKind::InfToInf => "inf-inf",
        }
    }

    pub fn from_cli_name(s: &str) -> Option<Self> {
        match s {
            "0-inf" => Some(TransformKind::ZeroToInf),
            "inf-0" => Some(TransformKind::InfToZero),
            "inf-inf" => Some(TransformKind::InfToInf),
            _ => None,
        }
    }

    /// Coordinate the input classes must be written in.
    pub fn input_var(self) -> VarTag {
        match self {
            TransformKind::ZeroToInf => VarTag::Z,
            _ => VarTag::Zeta,
        }
    }

    /// Coordinate of the transformed classes.
    pub fn output_var(self) -> VarTag {
        match self {
            TransformKind::InfToZero => VarTag::Zhat,
            _ => VarTag::Zetahat,
        }
    }
}

/// Slope data (r, s): r is the carried ramification, s = -ord * r >= 0.
fn rs_data(f: &CanonicalClass) -> (i64, i64) {
    let r = f.q();
    let s = match f.rep().ord() {
        Ok(Bound::At(e)) => (-e * exp_int(r)).to_integer(),
        _ => 0,
    };
    (r, s.max(0))
}

fn validate(f: &CanonicalClass, kind: TransformKind) -> Result<(i64, i64)> {
    if f.var() != kind.input_var() {
        return Err(Error::WrongPoint);
    }
    if f.is_zero_class() {
        return Err(Error::ZeroClass);
    }
    if !f.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let (r, s) = rs_data(f);
    match kind {
        TransformKind::ZeroToInf => {}
        TransformKind::InfToZero => {
            if s >= r {
                return Err(Error::SlopeViolation(format!(
                    "slope {s}/{r} is not below one"
                )));
            }
        }
        TransformKind::InfToInf => {
            if s <= r {
                return Err(Error::SlopeViolation(format!(
                    "slope {s}/{r} is not above one"
                )));
            }
        }
    }
    Ok((r, s))
}

/// Ramification of the transformed class.
fn output_ram(kind: TransformKind, r: i64, s: i64) -> i64 {
    match kind {
        TransformKind::ZeroToInf => r + s,
        TransformKind::InfToZero => r - s,
        TransformKind::InfToInf => s - r,
    }
}

/// The coordinate series defined by the transform's system of equations:
/// the input coordinate expressed in the output coordinate, exact through
/// `target_trunc`.
///
/// * 0 -> inf: solves `zhat = -f(z)/z`, giving z in powers of
///   `zetahat^(1/(r+s))`.
/// * inf -> 0: solves `zhat = zeta f(zeta)`, giving zeta in powers of
///   `zhat^(1/(r-s))`.
/// * inf -> inf: the same equation with `(r-s) < 0`, giving zeta in powers
///   of `zetahat^(1/(s-r))`.
pub fn solve_coordinate(
    f: &CanonicalClass,
    kind: TransformKind,
    target_trunc: Bound,
) -> Result<PuiseuxSeries> {
    solve_coordinate_with_branch(f, kind, target_trunc, 0)
}

fn defining_series(f: &CanonicalClass, kind: TransformKind) -> PuiseuxSeries {
    match kind {
        TransformKind::ZeroToInf => f
            .rep()
            .mul_monomial(exp_int(-1), &Scalar::from_i64(-1)),
        _ => f.rep().mul_monomial(exp_int(1), &Scalar::one()),
    }
}

fn solve_coordinate_with_branch(
    f: &CanonicalClass,
    kind: TransformKind,
    target_trunc: Bound,
    branch: i64,
) -> Result<PuiseuxSeries> {
    validate(f, kind)?;
    let j = defining_series(f, kind);
    comp_inverse_with_branch(&j, VarTag::Zhat, target_trunc, branch)
}

fn transform_series(f: &CanonicalClass, kind: TransformKind, branch: i64) -> Result<PuiseuxSeries> {
    let (r, s) = validate(f, kind)?;
    let q_out = output_ram(kind, r, s);
    let req_g = Bound::At(exp_int(1));
    let raw = transform_series_at(f, kind, branch, r, s, q_out, req_g)?;
    #[cfg(debug_assertions)]
    {
        // stability: one extra order of inner truncation must not move any
        // exponent <= 0 coefficient
        let finer = transform_series_at(f, kind, branch, r, s, q_out, Bound::At(exp_int(2)))?;
        for (e, c) in raw.terms() {
            if !e.is_positive() {
                debug_assert!(
                    c.approx_eq(&finer.coeff(*e)),
                    "transform output unstable at exponent {e}"
                );
            }
        }
    }
    Ok(raw)
}

fn transform_series_at(
    f: &CanonicalClass,
    kind: TransformKind,
    branch: i64,
    r: i64,
    s: i64,
    q_out: i64,
    req_g: Bound,
) -> Result<PuiseuxSeries> {
    // chain rule: ord of the solved coordinate in the output variable
    let ord_x = exp(r, q_out);
    let req_x = required_inner_trunc(f.rep(), ord_x, req_g);
    let x = solve_coordinate_with_branch(f, kind, req_x, branch)?;
    let composed = compose(f.rep(), &x, req_g)?;
    let signed = match kind {
        TransformKind::ZeroToInf => composed,
        _ => composed.neg(),
    };
    signed.add_scalar(&Scalar::from_ratio(s, 2 * q_out))
}

/// Transformed class before quotienting: the raw series in the output
/// coordinate, exact through exponent zero. Its constant term is the
/// pre-reduction constant of the transform.
pub fn transform_raw(f: &CanonicalClass, kind: TransformKind) -> Result<PuiseuxSeries> {
    transform_series(f, kind, 0)
}

/// Apply one local Fourier transform to an irreducible class.
pub fn transform_class(f: &CanonicalClass, kind: TransformKind) -> Result<CanonicalClass> {
    transform_class_with_branch(f, kind, 0)
}

/// Test hook: run the transform with a non-principal root branch. All
/// branches land in one Galois orbit, so `classes_equal` must accept any
/// pair of outputs.
pub fn transform_class_with_branch(
    f: &CanonicalClass,
    kind: TransformKind,
    branch: i64,
) -> Result<CanonicalClass> {
    let (r, s) = validate(f, kind)?;
    let raw = transform_series(f, kind, branch)?;
    CanonicalClass::normalize(&raw, output_ram(kind, r, s))
}

pub fn fourier_0_inf(f: &CanonicalClass) -> Result<CanonicalClass> {
    transform_class(f, TransformKind::ZeroToInf)
}

pub fn fourier_inf_0(f: &CanonicalClass) -> Result<CanonicalClass> {
    transform_class(f, TransformKind::InfToZero)
}

pub fn fourier_inf_inf(f: &CanonicalClass) -> Result<CanonicalClass> {
    transform_class(f, TransformKind::InfToInf)
}

/// Summand-wise transform of a direct sum; jordan sizes are preserved and
/// errors carry the index of the first failing summand.
pub fn transform_connection(
    e: &ConnectionObject,
    kind: TransformKind,
) -> Result<ConnectionObject> {
    let work = |(i, s): (usize, &crate::connection::Summand)| {
        transform_class(&s.class, kind)
            .map(|c| (c, s.jordan))
            .map_err(|err| Error::Summand {
                index: i,
                source: Box::new(err),
            })
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Result<(CanonicalClass, u32)>> = e
        .summands()
        .par_iter()
        .enumerate()
        .map(work)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(CanonicalClass, u32)>> =
        e.summands().iter().enumerate().map(work).collect();

    let mut parts = Vec::with_capacity(results.len());
    for r in results {
        parts.push(r?);
    }
    ConnectionObject::new(parts)
}

/// Sequential batch transform (baseline for the benchmarks).
pub fn transform_batch_seq(
    fs: &[CanonicalClass],
    kind: TransformKind,
) -> Vec<Result<CanonicalClass>> {
    fs.iter().map(|f| transform_class(f, kind)).collect()
}

/// Batch transform over independent classes; data-parallel when the
/// `parallel` feature is enabled, with deterministic output order.
pub fn transform_batch(fs: &[CanonicalClass], kind: TransformKind) -> Vec<Result<CanonicalClass>> {
    #[cfg(feature = "parallel")]
    {
        fs.par_iter().map(|f| transform_class(f, kind)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        transform_batch_seq(fs, kind)
    }
}
