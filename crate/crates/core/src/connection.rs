//! Connections as formal direct sums of irreducible classes with Jordan
//! sizes. The functors act summand-wise, so nothing beyond the list is kept.

use crate::classes::CanonicalClass;
use crate::error::{Error, Result};
use crate::puiseux::{exp_int, VarTag};

#[derive(Clone, Debug)]
pub struct Summand {
    pub class: CanonicalClass,
    pub jordan: u32,
}

/// Which slope subcategory at infinity a connection is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeCat {
    LessThanOne,
    GreaterThanOne,
}

#[derive(Clone, Debug)]
pub struct ConnectionObject {
    summands: Vec<Summand>,
}

impl ConnectionObject {
    /// Validates the decomposition invariants: nonempty, matching variables,
    /// irreducible classes, jordan >= 1.
    pub fn new(parts: impl IntoIterator<Item = (CanonicalClass, u32)>) -> Result<Self> {
        let summands: Vec<Summand> = parts
            .into_iter()
            .map(|(class, jordan)| Summand { class, jordan })
            .collect();
        if summands.is_empty() {
            return Err(Error::EmptyConnection);
        }
        let var = summands[0].class.var();
        for (i, s) in summands.iter().enumerate() {
            if s.jordan == 0 {
                return Err(Error::Summand {
                    index: i,
                    source: Box::new(Error::InvalidJordan),
                });
            }
            if s.class.var() != var {
                return Err(Error::Summand {
                    index: i,
                    source: Box::new(Error::VariableMismatch(
                        var.name(),
                        s.class.var().name(),
                    )),
                });
            }
            if !s.class.is_irreducible() {
                return Err(Error::Summand {
                    index: i,
                    source: Box::new(Error::NotIrreducible),
                });
            }
        }
        Ok(ConnectionObject { summands })
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn var(&self) -> VarTag {
        self.summands[0].class.var()
    }

    /// All slopes strictly below (resp. above) one. Only meaningful at the
    /// point at infinity.
    pub fn in_slope_subcategory(&self, which: SlopeCat) -> Result<bool> {
        if !self.var().at_infinity() {
            return Err(Error::WrongPoint);
        }
        Ok(self.summands.iter().all(|s| {
            let sl = s.class.slope();
            match which {
                SlopeCat::LessThanOne => sl < exp_int(1),
                SlopeCat::GreaterThanOne => sl > exp_int(1),
            }
        }))
    }

    /// A horizontal section exists exactly when some summand is the zero
    /// class.
    pub fn has_horizontal_sections(&self) -> bool {
        self.summands.iter().any(|s| s.class.is_zero_class())
    }
}
