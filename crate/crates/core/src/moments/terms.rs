//! Diagonal and off-diagonal terms of the twisted first moment over Q:
//!
//! M = 2 C_g(p)/sqrt(p) sum_d V(y p d^2)/d,
//! E = 4 pi (-1)^{k/2} sum_nu C_g(nu)/sqrt(nu) W(nu) sum_c S(nu, p; c)/c J_{k-1}(4 pi sqrt(nu p)/c),
//! W(nu) = sum_d V(y nu d^2)/d, with y = 4 pi^2 / N and d coprime to the
//! level N of g throughout.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::modforms::NewformRecord;
use crate::numfield::FieldDescriptor;
use crate::rankin::VFunction;
use crate::specialfn::{bessel_j, digamma, ln_gamma, zeta_laurent_at_center};
use crate::sum::{pairwise, Compensated};
use crate::tracefmla::KloostermanTable;

/// A truncated sum with its total error bound and the cutoff used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermValue {
    pub value: f64,
    pub certificate: f64,
    pub cutoff: usize,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..p).take_while(|r| r * r <= p).all(|r| p % r != 0)
}

/// p must be 1 or a prime not dividing the level of g.
pub(crate) fn check_twist(g: &NewformRecord, p: u64) -> Result<()> {
    if p == 1 || (is_prime(p) && g.level % p != 0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} must be 1 or a prime not dividing the level {}", g.level)))
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest n >= 1 with pred(n), for pred monotone in n.
pub(crate) fn first_true(mut pred: impl FnMut(usize) -> bool) -> usize {
    if pred(1) {
        return 1;
    }
    let mut hi = 2usize;
    while !pred(hi) {
        hi *= 2;
        assert!(hi < 1 << 40, "cutoff search diverged");
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// sum_{d coprime to N} V(y0 d^2)/d truncated where the tail is below tol.
pub fn diagonal_sum(vf: &VFunction, y0: f64, level: u64, tol: f64) -> TermValue {
    let cutoff = first_true(|d| vf.square_tail(y0, d) <= tol);
    let mut acc = Compensated::new();
    let mut err = 0.0;
    for d in 1..=cutoff as u64 {
        if gcd(d, level) != 1 {
            continue;
        }
        let v = vf.eval(y0 * (d * d) as f64);
        acc.add(v.value / d as f64);
        err += v.bound / d as f64;
    }
    TermValue {
        value: acc.value(),
        certificate: err + vf.square_tail(y0, cutoff) + 4.0 * f64::EPSILON * acc.value().abs(),
        cutoff,
    }
}

fn c_of(g: &NewformRecord, p: u64) -> Result<f64> {
    g.require(p as usize)?;
    Ok(g.coeffs[p as usize])
}

/// M by direct summation over d.
pub fn m_term_direct(vf: &VFunction, g: &NewformRecord, p: u64, tol: f64) -> Result<TermValue> {
    check_twist(g, p)?;
    let cp = c_of(g, p)?;
    let s = diagonal_sum(vf, vf.params().y_scale() * p as f64, g.level, tol);
    let f = 2.0 * cp / (p as f64).sqrt();
    Ok(TermValue { value: f * s.value, certificate: f.abs() * s.certificate, cutoff: s.cutoff })
}

/// M from the residue at u = 0 of the shifted contour, without the
/// remaining integral on Re u = -1/2:
/// 2 C_g(p)/sqrt(p) [gamma_0 + (gamma_{-1}/2)(psi(a1) + psi(a2) - log(4 pi^2 p / N))].
pub fn m_term_residue(g: &NewformRecord, p: u64, k: u32) -> Result<f64> {
    check_twist(g, p)?;
    let l = g.weight;
    if k <= l {
        return Err(Error::WeightConstraint { k, l });
    }
    let cp = c_of(g, p)?;
    let (gm1, g0) = zeta_laurent_at_center(&FieldDescriptor::rationals(), &prime_divisors(g.level));
    let a1 = (k as f64 - l as f64 + 1.0) / 2.0;
    let a2 = (k as f64 + l as f64 - 1.0) / 2.0;
    let y = 4.0 * PI * PI * p as f64 / g.level as f64;
    let bracket = g0 + 0.5 * gm1 * (digamma(a1)? + digamma(a2)? - y.ln());
    Ok(2.0 * cp / (p as f64).sqrt() * bracket)
}

/// Truncation controls for [`e_term`]: cutoffs are derived from `tol` and
/// then scaled by the factors (both at least 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ETruncation {
    pub tol: f64,
    pub nu_factor: f64,
    pub c_factor: f64,
}

impl ETruncation {
    pub fn new(tol: f64) -> Self {
        ETruncation { tol, nu_factor: 1.0, c_factor: 1.0 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        ETruncation { nu_factor: self.nu_factor * factor, c_factor: self.c_factor * factor, ..self }
    }
}

/// ln of sum_{c > C} (X/c)^n / n!, bounded by X^n / n! C^{1-n} / (n-1).
fn log_c_tail(x: f64, n: u32, c: f64) -> f64 {
    let nf = n as f64;
    nf * x.ln() - ln_gamma(nf + 1.0) + (1.0 - nf) * c.ln() - (nf - 1.0).ln()
}

/// Bound on the inner c-sum of E for a given nu, independent of the
/// truncation: sum_c min(1, (X/c)^n / n!) <= a n/(n-1) + 1 with
/// a = X / (n!)^{1/n} <= e X / n.
fn log_kernel_size_coeff(p: u64, n: u32) -> f64 {
    let nf = n as f64;
    // a(nu) = [2 pi sqrt(p) / (n!)^{1/n}] sqrt(nu)
    (2.0 * PI * (p as f64).sqrt()).ln() - ln_gamma(nf + 1.0) / nf + (nf / (nf - 1.0)).ln()
}

/// E by direct summation over nu, d and c.
pub fn e_term(vf: &VFunction, g: &NewformRecord, p: u64, k: u32, trunc: &ETruncation, exec: Exec) -> Result<TermValue> {
    check_twist(g, p)?;
    let l = g.weight;
    if k <= l {
        return Err(Error::WeightConstraint { k, l });
    }
    if k != vf.params().k_vec[0] || l != vf.params().l_vec[0] {
        return Err(Error::Domain("V parameters do not match (k, l)".into()));
    }
    if !(trunc.tol > 0.0 && trunc.nu_factor >= 1.0 && trunc.c_factor >= 1.0) {
        return Err(Error::Domain("invalid E truncation".into()));
    }
    let n = k - 1;
    let ys = vf.params().y_scale();
    let a_coeff = log_kernel_size_coeff(p, n).exp();
    // |C_g(nu)| <= d(nu) and the per-nu c-sum is at most a sqrt(nu) + 1, so
    // the pairs with nu d^2 > M cost at most 4 pi (a T_0(M) + T_{1/2}(M)).
    let nu_tail = |m: usize| 4.0 * PI * (a_coeff * vf.dirichlet_tail(m, 0.0) + vf.dirichlet_tail(m, 0.5));
    let m0 = first_true(|m| nu_tail(m) <= trunc.tol / 2.0);
    let m_cut = (m0 as f64 * trunc.nu_factor).ceil() as usize;
    g.require(m_cut)?;

    let vm = exec.map_range(1, m_cut + 1, |m| vf.eval(ys * m as f64));
    let level = g.level;
    // W(nu), its error, and the weight C_g(nu)/sqrt(nu).
    let mut w = vec![(0.0, 0.0); m_cut + 1];
    for (nu, slot) in w.iter_mut().enumerate().skip(1) {
        let mut acc = Compensated::new();
        let mut err = 0.0;
        let mut d = 1usize;
        while nu * d * d <= m_cut {
            if gcd(d as u64, level) == 1 {
                let v = vm[nu * d * d - 1];
                acc.add(v.value / d as f64);
                err += v.bound / d as f64;
            }
            d += 1;
        }
        *slot = (acc.value(), err);
    }
    let s_abs: f64 = (1..=m_cut)
        .map(|nu| g.coeffs[nu].abs() / (nu as f64).sqrt() * (w[nu].0.abs() + w[nu].1))
        .sum();
    let log_tau = (trunc.tol / (4.0 * 4.0 * PI * s_abs.max(1e-300))).ln();
    let c_cut: Vec<u64> = (0..=m_cut)
        .map(|nu| {
            if nu == 0 {
                return 0;
            }
            let x = 2.0 * PI * ((nu as u64 * p) as f64).sqrt();
            let c = first_true(|c| log_c_tail(x, n, c as f64) <= log_tau);
            (c as f64 * trunc.c_factor).ceil() as u64
        })
        .collect();
    let c_max = c_cut.iter().copied().max().unwrap_or(1);
    let tables: Vec<KloostermanTable> = exec.map_range(1, c_max as usize + 1, |c| KloostermanTable::new(p as i64, c as u64));

    // Per nu: (inner c-sum, its c-tail, its rounding).
    let inner: Vec<(f64, f64, f64)> = exec.map_range(1, m_cut + 1, |nu| {
        let x = 2.0 * PI * ((nu as u64 * p) as f64).sqrt();
        let cc = c_cut[nu];
        let mut acc = Compensated::new();
        let mut abs = 0.0;
        for c in 1..=cc {
            let j = bessel_j(n, 2.0 * x / c as f64);
            if j == 0.0 {
                continue;
            }
            let t = tables[c as usize - 1].get(nu as u64) / c as f64 * j;
            acc.add(t);
            abs += t.abs() * (c as f64 + 16.0);
        }
        (acc.value(), log_c_tail(x, n, cc as f64).exp(), 8.0 * f64::EPSILON * abs)
    });

    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut terms = Vec::with_capacity(m_cut);
    let mut c_tail = 0.0;
    let mut v_err = 0.0;
    let mut round = 0.0;
    for nu in 1..=m_cut {
        let cg = g.coeffs[nu] / (nu as f64).sqrt();
        let (wv, we) = w[nu];
        let (pv, pt, pr) = inner[nu - 1];
        terms.push(cg * wv * pv);
        c_tail += cg.abs() * (wv.abs() + we) * pt;
        v_err += cg.abs() * we * (pv.abs() + pt);
        round += cg.abs() * (wv.abs() + we) * pr;
    }
    let sum = pairwise(&terms);
    let f = 4.0 * PI;
    let abs_sum: f64 = terms.iter().map(|t| t.abs()).sum();
    Ok(TermValue {
        value: f * sign * sum,
        certificate: nu_tail(m_cut) + f * (c_tail + v_err + round + 8.0 * f64::EPSILON * abs_sum),
        cutoff: m_cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_true_finds_threshold() {
        assert_eq!(first_true(|n| n >= 1), 1);
        assert_eq!(first_true(|n| n >= 37), 37);
        assert_eq!(first_true(|n| n * n >= 1_000_000), 1000);
    }

    #[test]
    fn c_tail_dominates_sum() {
        let (x, n) = (30.0f64, 15u32);
        let direct: f64 = (41..100_000)
            .map(|c| ((n as f64) * (x / c as f64).ln() - ln_gamma(n as f64 + 1.0)).exp())
            .sum();
        assert!(direct <= log_c_tail(x, n, 40.0).exp());
    }
}
