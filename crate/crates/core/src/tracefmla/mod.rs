//! Kloosterman sums, the Petersson trace-formula right-hand side and the
//! totally positive unit sums.

mod hilbert;
mod kloosterman;
mod petersson;

pub use hilbert::{
    modulus_representatives, petersson_rhs_nf, trace_constant, unit_sum_tail, NfTraceValue,
    TraceRhsParams, UnitSum,
};
pub use kloosterman::{
    inverse_mod, kloosterman_nf, kloosterman_nf_capped, kloosterman_q, kloosterman_q_complex,
    kloosterman_units, Coords, IntegerRing, KloostermanQuery, KloostermanTable, ResidueRing,
    DEFAULT_NORM_CAP,
};
pub use petersson::{
    c_max_for, folded_constant, log_bessel_c_tail, petersson_rhs_q, petersson_rhs_q_auto,
    TraceValue,
};
