//! Numerical verification engine for the twisted first moment of
//! Rankin-Selberg central values.
//!
//! The degree-one case (level one forms over the rationals) is computed end to
//! end: eigenforms, harmonic weights, central values by the approximate
//! functional equation, and the diagonal/off-diagonal split obtained from the
//! Petersson formula. Over the real quadratic fields of discriminant 5 and 8
//! only form-independent quantities are computed: Kloosterman sums, the
//! trace-formula right-hand side and the totally positive unit sums.

pub mod error;
pub mod exec;
pub mod modforms;
pub mod moments;
pub mod numfield;
pub mod rankin;
pub mod specialfn;
pub mod sum;
pub mod tracefmla;

pub use error::{Error, Result};
pub use exec::Exec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
