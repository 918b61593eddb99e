//! Rankin-Selberg coefficients and central values by the approximate
//! functional equation L(f x g, 1/2) = 2 sum_m b_m m^{-1/2} V(y_scale m).

mod cheb;
mod vfunc;

pub use cheb::ChebyshevSum;
pub use vfunc::{log_d4_tail, log_envelope, v_function, VFunction, VParams, VValue};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::modforms::{Eigenform, NewformRecord};
use crate::sum::Compensated;

/// b_m for 1 <= m <= M (index 0 unused).
#[derive(Debug, Clone, PartialEq)]
pub struct RankinSeries {
    pub b: Vec<f64>,
    pub k: u32,
    pub l: u32,
    pub level: u64,
}

impl RankinSeries {
    pub fn len(&self) -> usize {
        self.b.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// b_m = sum_{d^2 | m, gcd(d, N) = 1} C_f(m/d^2) C_g(m/d^2).
pub fn b_coefficients(f: &Eigenform, g: &NewformRecord, m_max: usize) -> Result<RankinSeries> {
    let have = f.c.len().saturating_sub(1).min(g.max_index());
    if have < m_max {
        return Err(Error::InsufficientCoefficients { need: m_max, have });
    }
    let prod: Vec<f64> = (0..=m_max).map(|m| if m == 0 { 0.0 } else { f.c[m] * g.coeffs[m] }).collect();
    let mut b = prod.clone();
    let mut d = 2usize;
    while d * d <= m_max {
        if gcd(d as u64, g.level) == 1 {
            let d2 = d * d;
            for n in 1..=m_max / d2 {
                b[n * d2] += prod[n];
            }
        }
        d += 1;
    }
    Ok(RankinSeries { b, k: f.weight, l: g.weight, level: g.level })
}

/// Which evaluation of sum_m w_m V(y_scale m) to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AfeRoute {
    /// Every term evaluated by quadrature.
    Direct,
    /// Piecewise Chebyshev interpolation of V in ln y beyond the first terms.
    Chebyshev,
    /// Direct below 2^17 terms, Chebyshev above.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeOptions {
    pub c_g: f64,
    /// Fixed contour Re u = sigma; automatic choice per y when None.
    pub sigma: Option<f64>,
    /// Target for the truncation tail.
    pub tol: f64,
    /// Use the available coefficients when fewer than the cutoff, reporting
    /// the larger tail bound instead of failing.
    pub allow_truncated: bool,
    pub route: AfeRoute,
}

impl Default for AfeOptions {
    fn default() -> Self {
        AfeOptions { c_g: 1.0, sigma: None, tol: 1e-10, allow_truncated: false, route: AfeRoute::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralValue {
    pub value: f64,
    pub terms: usize,
    /// Certified tail beyond `terms`.
    pub truncation_bound: f64,
    /// Accumulated quadrature and interpolation error of the V values.
    pub evaluation_bound: f64,
}

impl CentralValue {
    pub fn certificate(&self) -> f64 {
        self.truncation_bound + self.evaluation_bound
    }
}

pub fn v_function_for(params: VParams, sigma: Option<f64>) -> Result<VFunction> {
    match sigma {
        Some(s) => VFunction::with_sigma(params, s),
        None => VFunction::new(params),
    }
}

/// sum_{m=1}^{M} w_m V(y_scale m) with an error bound, w given from index 1.
pub fn weighted_v_sum(w: &[f64], vf: &VFunction, route: AfeRoute, exec: Exec) -> VValue {
    let m_max = w.len().saturating_sub(1);
    let use_cheb = match route {
        AfeRoute::Direct => false,
        AfeRoute::Chebyshev => true,
        AfeRoute::Auto => m_max > 1 << 17,
    };
    if use_cheb {
        return ChebyshevSum::new(w, vf.params().y_scale(), exec).apply(vf);
    }
    let scale = vf.params().y_scale();
    let terms: Vec<(f64, f64)> = exec.map_range(1, m_max + 1, |m| {
        let v = vf.eval(scale * m as f64);
        (w[m] * v.value, w[m].abs() * v.bound)
    });
    let mut acc = Compensated::new();
    let mut err = 0.0;
    for (t, e) in terms {
        acc.add(t);
        err += e;
    }
    VValue { value: acc.value(), bound: err + 4.0 * f64::EPSILON * acc.value().abs() }
}

/// L(f x g, 1/2) from the series b by the approximate functional equation.
pub fn central_value_series(series: &RankinSeries, vf: &VFunction, opts: &AfeOptions, exec: Exec) -> Result<CentralValue> {
    let cutoff = vf.effective_cutoff(opts.tol);
    let terms = if series.len() >= cutoff {
        cutoff
    } else if opts.allow_truncated {
        series.len()
    } else {
        return Err(Error::InsufficientCoefficients { need: cutoff, have: series.len() });
    };
    let w: Vec<f64> = (0..=terms)
        .map(|m| if m == 0 { 0.0 } else { series.b[m] / (m as f64).sqrt() })
        .collect();
    let s = weighted_v_sum(&w, vf, opts.route, exec);
    Ok(CentralValue {
        value: 2.0 * s.value,
        terms,
        truncation_bound: vf.afe_tail(terms),
        evaluation_bound: 2.0 * s.bound,
    })
}

/// L(f x g, 1/2) for a level-one eigenform f and the fixed form g.
pub fn central_value(f: &Eigenform, g: &NewformRecord, opts: &AfeOptions, exec: Exec) -> Result<CentralValue> {
    let params = VParams::degree_one(f.weight, g.weight, g.level as f64, opts.c_g)?;
    let vf = v_function_for(params, opts.sigma)?;
    let m = vf.effective_cutoff(opts.tol);
    let avail = f.c.len().saturating_sub(1).min(g.max_index());
    let m = if avail < m && opts.allow_truncated { avail } else { m };
    let series = b_coefficients(f, g, m)?;
    central_value_series(&series, &vf, opts, exec)
}
