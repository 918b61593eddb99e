use num_complex::Complex64;

use super::gamma::EULER_GAMMA;
use super::PrecisionContext;
use crate::error::{Error, Result};
use crate::numfield::FieldDescriptor;

/// B_{2j} / (2j)! for j = 1..=12.
const B2J_OVER_FACT: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
    77683.0 / 14_101_100_039_391_805_440_000.0,
    -236_364_091.0 / 1_693_824_136_731_743_669_452_800_000.0,
];

/// Hurwitz zeta(s, a) by Euler-Maclaurin with `n` explicit terms.
fn hurwitz(s: Complex64, a: f64, n: usize) -> Complex64 {
    let x = n as f64 + a;
    hurwitz_regular(s, a, n) + (-s * x.ln()).exp() * x / (s - 1.0)
}

fn expm1_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        z * (1.0 + z * (0.5 + z / 6.0))
    } else {
        z.exp() - 1.0
    }
}

/// (x^{1-s} - 1) / (s - 1), continuous at s = 1.
fn pole_part(s: Complex64, x: f64) -> Complex64 {
    let w = s - 1.0;
    if w.norm() == 0.0 {
        return Complex64::new(-x.ln(), 0.0);
    }
    expm1_c(-w * x.ln()) / w
}

/// Euler-Maclaurin for zeta(s, a) without the x^{1-s}/(s-1) term.
fn hurwitz_regular(s: Complex64, a: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        acc += (-s * (j as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let x_s = (-s * lx).exp();
    acc += 0.5 * x_s;
    // rising product s (s+1) ... (s+2j-2) times x^{-s-2j+1}
    let mut rising = s;
    let mut xp = x_s / x;
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        acc += rising * xp * *c;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xp /= x * x;
    }
    acc
}

fn em_terms(s: Complex64) -> usize {
    (30.0 + s.im.abs()).ceil() as usize
}

/// Riemann zeta for s != 1 with Re(s) > 0 (Euler-Maclaurin).
pub fn riemann_zeta(s: Complex64) -> Complex64 {
    hurwitz(s, 1.0, em_terms(s))
}

/// L(s, chi) for the field character (the Riemann zeta over Q).
pub fn field_l(field: &FieldDescriptor, s: Complex64) -> Complex64 {
    if field.degree == 1 {
        return riemann_zeta(s);
    }
    let d = field.discriminant;
    let n = em_terms(s);
    let mut acc = Complex64::new(0.0, 0.0);
    // The pole terms cancel because the character sums to zero, so each is
    // replaced by its regular part (x^{1-s} - 1)/(s - 1).
    for a in 1..d {
        let chi = field.kronecker(a);
        if chi != 0 {
            let af = a as f64 / d as f64;
            let reg = hurwitz_regular(s, af, n) + pole_part(s, n as f64 + af);
            acc += reg * chi as f64;
        }
    }
    acc * (-s * (d as f64).ln()).exp()
}

fn euler_removal(field: &FieldDescriptor, s: Complex64, removed: &[u64]) -> Complex64 {
    let mut f = Complex64::new(1.0, 0.0);
    for &p in removed {
        let ps = (-s * (p as f64).ln()).exp();
        f *= Complex64::new(1.0, 0.0) - ps;
        if field.degree == 2 {
            f *= Complex64::new(1.0, 0.0) - ps * field.kronecker(p) as f64;
        }
    }
    f
}

/// zeta_F(s) with the Euler factors of every prime ideal above the listed
/// rational primes removed. Degree two uses zeta_F = zeta * L(chi).
pub fn zeta_partial(
    field: &FieldDescriptor,
    s: Complex64,
    removed: &[u64],
    _ctx: &PrecisionContext,
) -> Result<Complex64> {
    if !(s.re > 1.0) {
        return Err(Error::OutsideConvergence(s.re));
    }
    Ok(unchecked_partial(field, s, removed))
}

fn unchecked_partial(field: &FieldDescriptor, s: Complex64, removed: &[u64]) -> Complex64 {
    let mut z = riemann_zeta(s);
    if field.degree == 2 {
        z *= field_l(field, s);
    }
    z * euler_removal(field, s, removed)
}

/// Direct summation of sum_m a(m) m^{-s} over ideal norms m <= terms, with
/// a rigorous tail bound from a(m) <= d(m) <= 2 sqrt(m). Requires Re(s) > 3/2.
pub fn zeta_norm_sum(field: &FieldDescriptor, s: Complex64, terms: u64) -> Result<(Complex64, f64)> {
    if !(s.re > 1.5) {
        return Err(Error::OutsideConvergence(s.re));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=terms {
        let a = field.ideals_of_norm(m);
        if a != 0 {
            acc += (-s * (m as f64).ln()).exp() * a as f64;
        }
    }
    let e = s.re - 0.5;
    let tail = 2.0 * (terms as f64).powf(1.0 - e) / (e - 1.0);
    Ok((acc, tail))
}

/// (gamma_{-1}, gamma_0) with zeta_F^n(2u+1) = gamma_{-1}/(2u) + gamma_0 + O(u).
pub fn zeta_laurent_at_center(field: &FieldDescriptor, removed: &[u64]) -> (f64, f64) {
    let mut e0 = 1.0;
    let mut dlog = 0.0;
    for &p in removed {
        let pf = p as f64;
        e0 *= 1.0 - 1.0 / pf;
        dlog += pf.ln() / (pf - 1.0);
        if field.degree == 2 {
            let chi = field.kronecker(p) as f64;
            e0 *= 1.0 - chi / pf;
            if chi != 0.0 {
                dlog += chi * pf.ln() / (pf - chi);
            }
        }
    }
    let gm1 = field.zeta_residue * e0;
    if field.degree == 1 {
        return (gm1, EULER_GAMMA * e0 + e0 * dlog);
    }
    (gm1, laurent_constant_numeric(field, removed, gm1))
}

/// lim_{u -> 0} zeta_F^n(1 + 2u) - gamma_{-1}/(2u) by three-level Richardson
/// extrapolation on u = h, h/2, h/4.
pub fn laurent_constant_numeric(field: &FieldDescriptor, removed: &[u64], gm1: f64) -> f64 {
    let f = |u: f64| -> f64 {
        unchecked_partial(field, Complex64::new(1.0 + 2.0 * u, 0.0), removed).re - gm1 / (2.0 * u)
    };
    let h = 1e-3;
    let (f1, f2, f3) = (f(h), f(h / 2.0), f(h / 4.0));
    let r1 = 2.0 * f2 - f1;
    let r2 = 2.0 * f3 - f2;
    (4.0 * r2 - r1) / 3.0
}
