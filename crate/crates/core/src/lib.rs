//! laft-core: exact Puiseux-series arithmetic and local Fourier transforms of
//! rank-one formal connections, with an operator lab for the supporting
//! expansion identities.

pub mod classes;
pub mod compose;
pub mod connection;
pub mod error;
pub mod expr;
pub mod fourier;
pub mod puiseux;
pub mod scalar;

pub use classes::CanonicalClass;
pub use connection::{ConnectionObject, SlopeCat, Summand};
pub use fourier::TransformKind;
pub use error::{Error, Result};
pub use puiseux::{exp, exp_int, Bound, Exp, PuiseuxSeries, VarTag, Window};
pub use scalar::{Backend, BigComplex, Scalar, DEFAULT_PREC};
