use num_complex::Complex64;

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2j} for j = 1..=10.
const BERNOULLI_2J: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Radius beyond which the Stirling series is used directly.
const STIRLING_RADIUS: f64 = 16.0;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor()
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut corr = Complex64::new(0.0, 0.0);
    for (j, b) in BERNOULLI_2J.iter().enumerate() {
        let m = 2.0 * (j as f64 + 1.0);
        corr += pow * (b / (m * (m - 1.0)));
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + corr
}

/// Principal branch of log Gamma on the complex plane cut along (-inf, 0].
///
/// Arguments with small modulus are shifted right with the recurrence; the sum
/// of principal logarithms keeps the branch continuous off the negative axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("log_gamma({z})")));
    }
    if is_pole(z) {
        return Err(Error::GammaPole(format!("{}", z.re)));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.5 || w.norm() < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

/// Same as [`log_gamma`] for callers that have already excluded the poles.
#[inline]
pub fn lgamma_c(z: Complex64) -> Complex64 {
    log_gamma(z).expect("log_gamma argument at a pole")
}

/// log Gamma(x) for real x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    let mut w = x;
    let mut shift = 0.0;
    while w < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut corr = 0.0;
    for (j, b) in BERNOULLI_2J.iter().enumerate() {
        let m = 2.0 * (j as f64 + 1.0);
        corr += pow * (b / (m * (m - 1.0)));
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + corr - shift
}

/// Digamma psi(a) = Gamma'(a)/Gamma(a) for real a > 0.
pub fn digamma(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("digamma requires a > 0, got {a}")));
    }
    let mut w = a;
    let mut shift = 0.0;
    while w < STIRLING_RADIUS {
        shift += 1.0 / w;
        w += 1.0;
    }
    let inv2 = 1.0 / (w * w);
    let mut pow = inv2;
    let mut corr = 0.0;
    for (j, b) in BERNOULLI_2J.iter().enumerate() {
        let m = 2.0 * (j as f64 + 1.0);
        corr += b / m * pow;
        pow *= inv2;
    }
    Ok(w.ln() - 0.5 / w - corr - shift)
}

/// |Gamma(A+c+it) / Gamma(A+it)| / |A+it|^c, the ratio bounded uniformly in
/// the gamma-quotient lemma when |c| < A/2.
pub fn gamma_quotient_check(a: f64, c: f64, t: f64) -> Result<f64> {
    if !(a > 0.0) || !(c.abs() < a / 2.0) {
        return Err(Error::Domain(format!(
            "gamma quotient needs A > 0 and |c| < A/2, got A = {a}, c = {c}"
        )));
    }
    let num = lgamma_c(Complex64::new(a + c, t));
    let den = lgamma_c(Complex64::new(a, t));
    let modulus = Complex64::new(a, t).norm();
    Ok((num.re - den.re - c * modulus.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_integers() {
        assert!(log_gamma(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        let l5 = log_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((l5.re - 24f64.ln()).abs() < 1e-14 && l5.im.abs() < 1e-15);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn poles_rejected() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(
                log_gamma(Complex64::new(x, 0.0)),
                Err(Error::GammaPole(_))
            ));
        }
        assert!(log_gamma(Complex64::new(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-15);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        assert!(digamma(0.0).is_err());
    }
}
