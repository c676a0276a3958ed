//! Transformations that add auxiliary variables while keeping the input
//! function recoverable by forgetting them.

use thiserror::Error;

use crate::cnf::{Cnf, CnfError, Lit};

mod bva;
mod extension;
mod tseitin;

pub use bva::{bva, bva_step, bva_trace, BvaMatch};
pub use extension::{extend, extend_general};
pub use tseitin::{gate_count, tseitin, tseitin_into};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("literal {lit} is outside the universe of {universe} variables")]
    LiteralOutOfRange { lit: Lit, universe: u32 },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

fn check_lit(cnf: &Cnf, lit: Lit) -> Result<(), TransformError> {
    if lit.var().index() > cnf.universe() {
        return Err(TransformError::LiteralOutOfRange {
            lit,
            universe: cnf.universe(),
        });
    }
    Ok(())
}
