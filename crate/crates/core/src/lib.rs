//! Explicit Hilbert symbol computations on local and two-dimensional local
//! fields of characteristic 0, via the Vostokov residue formula, with the
//! classical Kummer / Artin-Hasse / Sen formulas and a norm-group test as
//! independent cross-checks.

pub mod error;
pub mod field;
pub mod oracles;
pub mod pairing;
pub mod sample;
pub mod series;
pub mod shafarevich;
pub mod suites;
pub mod witt;

pub use error::{CoreError, Result};
pub use witt::{frobenius, make_ring, teichmuller, trace_wzp, WittElement, WittRingSpec};
