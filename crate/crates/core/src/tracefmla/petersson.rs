//! Petersson formula right-hand side for level one over Q:
//! delta(m, n) + 2 pi (-1)^{k/2} sum_{c >= 1} S(m, n; c)/c J_{k-1}(4 pi sqrt(mn)/c).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specialfn::{bessel_j, ln_gamma};
use crate::sum::Compensated;

use super::kloosterman::kloosterman_q;

/// A truncated trace-formula value with its certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub value: f64,
    /// Bound on the omitted c-tail.
    pub tail_bound: f64,
    /// Bound on accumulated floating-point error.
    pub rounding_bound: f64,
    pub c_max: u64,
}

impl TraceValue {
    pub fn certificate(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// (-1)^{k/2} 2 pi: the paper's constant with n = 1, d_F = 1, doubled by
/// folding c and -c.
pub fn folded_constant(k: u32) -> f64 {
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * 2.0 * PI
}

/// ln of the bound on sum_{c > c_max} |S(m,n;c)|/c |J_{k-1}(4 pi sqrt(mn)/c)|
/// times 2 pi, from |S| <= c and J_{k-1}(x) <= (x/2)^{k-1}/(k-1)!.
pub fn log_bessel_c_tail(mn: f64, k: u32, c_max: u64) -> f64 {
    assert!(k >= 3);
    let nu = (k - 1) as f64;
    let a = 2.0 * PI * mn.sqrt();
    // sum_{c > C} c^{-nu} <= C^{1-nu}/(nu-1)
    (2.0 * PI).ln() + nu * a.ln() - ln_gamma(nu + 1.0) + (1.0 - nu) * (c_max as f64).ln()
        - (nu - 1.0).ln()
}

/// Smallest c_max whose certified tail is at most tol.
pub fn c_max_for(m: u64, n: u64, k: u32, tol: f64) -> u64 {
    let mn = (m * n) as f64;
    let target = tol.ln();
    let mut c = 1u64;
    while log_bessel_c_tail(mn, k, c) > target {
        c *= 2;
    }
    let (mut lo, mut hi) = (c / 2, c);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if log_bessel_c_tail(mn, k, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.max(1)
}

/// The right-hand side truncated at c <= c_max. Errors when the certified
/// tail exceeds tol.
pub fn petersson_rhs_q(m: u64, n: u64, k: u32, c_max: u64, tol: f64) -> Result<TraceValue> {
    if k < 12 || k % 2 == 1 {
        return Err(Error::Domain(format!("weight {k} must be even and >= 12")));
    }
    if m == 0 || n == 0 || c_max == 0 {
        return Err(Error::Domain("m, n, c_max must be positive".into()));
    }
    let tail = log_bessel_c_tail((m * n) as f64, k, c_max).exp();
    if tail > tol {
        return Err(Error::Uncertified {
            what: "Bessel c-tail".into(),
            bound: tail,
        });
    }
    let x0 = 4.0 * PI * ((m * n) as f64).sqrt();
    let mut acc = Compensated::new();
    let mut abs = 0.0;
    for c in 1..=c_max {
        let j = bessel_j(k - 1, x0 / c as f64);
        if j == 0.0 {
            continue;
        }
        let term = kloosterman_q(m as i64, n as i64, c) / c as f64 * j;
        acc.add(term);
        abs += term.abs() * (c as f64 + 16.0);
    }
    let cst = folded_constant(k);
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok(TraceValue {
        value: delta + cst * acc.value(),
        tail_bound: tail,
        rounding_bound: 2.0 * PI * abs * 8.0 * f64::EPSILON + 4.0 * f64::EPSILON,
        c_max,
    })
}

/// The right-hand side with c_max chosen so that the tail is at most tol.
pub fn petersson_rhs_q_auto(m: u64, n: u64, k: u32, tol: f64) -> Result<TraceValue> {
    petersson_rhs_q(m, n, k, c_max_for(m, n, k, tol), tol)
}
