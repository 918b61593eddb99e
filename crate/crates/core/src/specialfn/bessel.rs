use num_complex::Complex64;

use super::gamma::{lgamma_c, ln_gamma};
use crate::sum::Compensated;

/// Values below this are reported as zero.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

const RESCALE_AT: f64 = 1e250;

/// Whether the ascending series is cancellation-free for (n, x).
#[inline]
fn series_regime(n: u32, x: f64) -> bool {
    x * x <= 4.0 * (n as f64 + 1.0)
}

fn series(n: u32, x: f64) -> f64 {
    let log_pre = n as f64 * (0.5 * x).ln() - ln_gamma(n as f64 + 1.0);
    if log_pre < -745.0 {
        return 0.0;
    }
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut acc = Compensated::new();
    acc.add(1.0);
    let mut j = 1.0;
    loop {
        term *= q / (j * (n as f64 + j));
        acc.add(term);
        if term.abs() <= 1e-17 * acc.value().abs() {
            break;
        }
        j += 1.0;
    }
    acc.value() * log_pre.exp()
}

fn miller_start(nmax: u32, x: f64) -> usize {
    let big = (nmax as f64).max(x);
    let m = (big + 20.0 + 10.0 * big.cbrt()).ceil() as usize;
    m + (m & 1)
}

/// J_0(x), ..., J_nmax(x) by backward recurrence normalised with
/// J_0 + 2 sum J_{2k} = 1.
fn miller(nmax: u32, x: f64) -> Vec<f64> {
    let nmax = nmax as usize;
    let m = miller_start(nmax as u32, x);
    let mut out = vec![0.0; nmax + 1];
    let two_over_x = 2.0 / x;
    let mut jp = 0.0f64;
    let mut j = 1e-30f64;
    let mut norm = Compensated::new();
    if m <= nmax {
        out[m] = j;
    }
    let mut k = m;
    while k > 0 {
        let jm = k as f64 * two_over_x * j - jp;
        jp = j;
        j = jm;
        k -= 1;
        if k <= nmax {
            out[k] = j;
        }
        if k > 0 && k % 2 == 0 {
            norm.add(2.0 * j);
        }
        if j.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            j *= s;
            jp *= s;
            let v = norm.value() * s;
            norm = Compensated::new();
            norm.add(v);
            for o in out.iter_mut().skip(k) {
                *o *= s;
            }
        }
    }
    norm.add(j);
    let scale = 1.0 / norm.value();
    for o in out.iter_mut() {
        *o *= scale;
        if o.abs() < UNDERFLOW_FLOOR {
            *o = 0.0;
        }
    }
    out
}

/// J_n(x) for integer n >= 0 and real x >= 0.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0 && x.is_finite(), "bessel_j needs finite x >= 0");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if series_regime(n, x) {
        series(n, x)
    } else {
        miller(n, x)[n as usize]
    }
}

/// J_0(x), ..., J_nmax(x).
pub fn bessel_j_orders(nmax: u32, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel_j needs finite x >= 0");
    if x == 0.0 {
        let mut v = vec![0.0; nmax as usize + 1];
        v[0] = 1.0;
        return v;
    }
    if series_regime(0, x) {
        (0..=nmax).map(|n| series(n, x)).collect()
    } else {
        miller(nmax, x)
    }
}

/// Rigorous majorant min(1, (x/2)^n / n!) of |J_n(x)|.
pub fn bessel_j_bound(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let l = n as f64 * (0.5 * x).ln() - ln_gamma(n as f64 + 1.0);
    l.min(0.0).exp()
}

/// Mellin-Barnes form
/// J_n(x) = (1/4 pi) int Gamma((n-s)/2) / Gamma((n+s)/2 + 1) (x/2)^s dt,
/// s = sigma + i t, 0 < sigma < n. Slow; used as a cross-check.
pub fn bessel_j_mellin_barnes(n: u32, x: f64, sigma: f64, tol: f64) -> f64 {
    assert!(n >= 1 && sigma > 0.0 && sigma < n as f64 && x > 0.0);
    let nf = n as f64;
    let lx = (0.5 * x).ln();
    let f = |t: f64| -> Complex64 {
        let s = Complex64::new(sigma, t);
        let l = lgamma_c((nf - s) * 0.5) - lgamma_c((nf + s) * 0.5 + 1.0) + s * lx;
        l.exp()
    };
    // |integrand| ~ |t/2|^(-sigma-1) (x/2)^sigma for large |t|.
    let scale = (sigma * lx).exp().max(1e-300);
    let tmax = ((2.0 * scale / (sigma * tol)).powf(1.0 / sigma) * 2.0).max(40.0);
    let h = 0.05;
    let steps = (tmax / h).ceil() as usize;
    let mut acc = Compensated::new();
    acc.add(0.5 * f(0.0).re);
    for j in 1..=steps {
        acc.add(f(j as f64 * h).re);
    }
    2.0 * h * acc.value() / (4.0 * std::f64::consts::PI)
}
