//! Point evaluation of q-expansions with a certified truncation bound.

use num_complex::Complex64;

use super::basis::QExpansion;
use super::eigen::Eigenform;
use crate::error::{Error, Result};

/// |a(n)| <= constant * n^exponent for every n >= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBound {
    pub constant: f64,
    pub exponent: f64,
}

impl CoefficientBound {
    /// Deligne with d(n) <= 2 sqrt(n): |a(n)| <= 2 n^{k/2}.
    pub fn eigenform(k: u32) -> Self {
        CoefficientBound { constant: 2.0, exponent: k as f64 / 2.0 }
    }

    /// Crude bound for any cusp form read off the stored coefficients:
    /// |a(n)| <= A n^{k/2} with A the largest observed ratio, doubled.
    pub fn from_coeffs(coeffs: &[f64], k: u32) -> Self {
        let e = k as f64 / 2.0;
        let a = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c.abs() / (n as f64).powf(e))
            .fold(0.0, f64::max);
        CoefficientBound { constant: 2.0 * a.max(1.0), exponent: e }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// Bound on the neglected tail plus floating-point rounding.
    pub bound: f64,
}

/// sum_{n < len} a(n) e^{2 pi i n z}.
///
/// Fails with "truncation not certified" when the tail bound
/// A M^e r^M / (1 - ((M+1)/M)^e r), r = e^{-2 pi Im z}, exceeds `tol` or the
/// ratio is not below one.
pub fn evaluate(coeffs: &[f64], bound: CoefficientBound, z: Complex64, tol: f64) -> Result<Evaluation> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("Im z = {} must be positive", z.im)));
    }
    let m = coeffs.len().max(1) as f64;
    let r = (-2.0 * std::f64::consts::PI * z.im).exp();
    let rho = ((m + 1.0) / m).powf(bound.exponent) * r;
    let tail = if rho < 1.0 {
        bound.constant * (m.ln() * bound.exponent - 2.0 * std::f64::consts::PI * z.im * m).exp() / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    if !(tail <= tol) {
        return Err(Error::TruncationNotCertified(tail));
    }
    let q = (Complex64::i() * 2.0 * std::f64::consts::PI * z).exp();
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut qn = Complex64::new(1.0, 0.0);
    for (n, a) in coeffs.iter().enumerate() {
        if n > 0 {
            qn *= q;
        }
        value += qn * *a;
        abs_sum += a.abs() * qn.norm();
    }
    let rounding = 8.0 * coeffs.len() as f64 * f64::EPSILON * abs_sum;
    Ok(Evaluation { value, bound: tail + rounding })
}

pub fn evaluate_expansion(f: &QExpansion, z: Complex64, tol: f64) -> Result<Evaluation> {
    let c = f.to_f64();
    evaluate(&c, CoefficientBound::from_coeffs(&c, f.weight), z, tol)
}

impl Eigenform {
    pub fn evaluate(&self, z: Complex64, tol: f64) -> Result<Evaluation> {
        evaluate(&self.a, CoefficientBound::eigenform(self.weight), z, tol)
    }
}
