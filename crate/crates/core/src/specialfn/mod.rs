//! Special functions in double precision: complex log-gamma, digamma,
//! integer-order J-Bessel, Riemann and Dedekind zeta values with their
//! Laurent data at s = 1.

mod bessel;
mod gamma;
mod zeta;

pub use bessel::{
    bessel_j, bessel_j_bound, bessel_j_mellin_barnes, bessel_j_orders, UNDERFLOW_FLOOR,
};
pub use gamma::{digamma, gamma_quotient_check, lgamma_c, ln_gamma, log_gamma, EULER_GAMMA};
pub use zeta::{
    field_l, laurent_constant_numeric, riemann_zeta, zeta_laurent_at_center, zeta_norm_sum,
    zeta_partial,
};

use crate::error::{Error, Result};

/// Precision settings passed to the numeric kernels.
///
/// The kernels run in IEEE double precision; `working_bits` records the
/// requested precision for manifests and for the exact embeddings in
/// [`crate::numfield`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    pub working_bits: u32,
    pub target_rel_tol: f64,
}

impl PrecisionContext {
    pub fn new(working_bits: u32, target_rel_tol: f64) -> Result<Self> {
        if working_bits < 64 {
            return Err(Error::Domain(format!("working_bits {working_bits} < 64")));
        }
        if !(target_rel_tol > 0.0) {
            return Err(Error::Domain(format!("target_rel_tol {target_rel_tol} <= 0")));
        }
        Ok(PrecisionContext { working_bits, target_rel_tol })
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { working_bits: 64, target_rel_tol: 1e-12 }
    }
}
