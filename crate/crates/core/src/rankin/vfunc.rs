//! The weight function V(y) = (1/2 pi i) int_(sigma) y^-u gamma(1/2, u) G(u) du/u
//! by trapezoidal quadrature on vertical lines.
//!
//! Each contour stores the kernel gamma G / u at the nodes t_j = j h, so that
//! V(y) for a new y costs one pass over the nodes. Contours left of the origin
//! add the residue 1 at u = 0. Error terms per evaluation:
//! - tail beyond |t| = T from |Gamma(x + it)| <= Gamma(x) and the Gaussian;
//! - discretisation 4 max(y^-s E(s), s = sigma +- d) / (e^{2 pi d / h} - 1) for
//!   a kernel analytic in the strip of half-width d;
//! - rounding, proportional to the absolute sum of the terms.
//! E(s) = (1/2 pi) int |gamma(1/2, s+it) G(s+it) / (s+it)| dt is the envelope,
//! so |V(y)| <= y^-s E(s) for every s > 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specialfn::{lgamma_c, ln_gamma};

/// Parameters of V: weights of f and g per embedding, the conductor Q of the
/// argument 4^n pi^{2n} m / Q, and the scale c_G of G(u) = exp(c_G u^2).
#[derive(Debug, Clone, PartialEq)]
pub struct VParams {
    pub k_vec: Vec<u32>,
    pub l_vec: Vec<u32>,
    pub conductor: f64,
    pub c_g: f64,
}

impl VParams {
    pub fn new(k_vec: Vec<u32>, l_vec: Vec<u32>, conductor: f64, c_g: f64) -> Result<Self> {
        if k_vec.is_empty() || k_vec.len() != l_vec.len() {
            return Err(Error::Domain("k_vec and l_vec must have equal nonzero length".into()));
        }
        for (&k, &l) in k_vec.iter().zip(&l_vec) {
            if k <= l {
                return Err(Error::WeightConstraint { k, l });
            }
            if k % 2 == 1 || l % 2 == 1 {
                return Err(Error::Domain(format!("weights must be even, got ({k}, {l})")));
            }
        }
        if !(conductor >= 1.0) {
            return Err(Error::Domain(format!("conductor {conductor} < 1")));
        }
        if !(c_g > 0.0) || !c_g.is_finite() {
            return Err(Error::Domain(format!("c_G = {c_g} must be positive")));
        }
        Ok(VParams { k_vec, l_vec, conductor, c_g })
    }

    pub fn degree_one(k: u32, l: u32, conductor: f64, c_g: f64) -> Result<Self> {
        Self::new(vec![k], vec![l], conductor, c_g)
    }

    pub fn degree(&self) -> usize {
        self.k_vec.len()
    }

    /// Gamma shifts (k-l+1)/2 and (k+l-1)/2 for every embedding.
    pub fn shifts(&self) -> Vec<f64> {
        self.k_vec
            .iter()
            .zip(&self.l_vec)
            .flat_map(|(&k, &l)| {
                let (k, l) = (k as f64, l as f64);
                [(k - l + 1.0) / 2.0, (k + l - 1.0) / 2.0]
            })
            .collect()
    }

    pub fn min_shift(&self) -> f64 {
        self.shifts().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// y = y_scale * m with y_scale = (4 pi^2)^n / Q.
    pub fn y_scale(&self) -> f64 {
        (4.0 * std::f64::consts::PI.powi(2)).powi(self.degree() as i32) / self.conductor
    }

    /// log gamma(1/2, u) on the half-plane Re u > -min_shift.
    pub fn log_gamma_ratio(&self, u: Complex64) -> Complex64 {
        self.shifts()
            .iter()
            .map(|&a| lgamma_c(u + a) - ln_gamma(a))
            .sum()
    }

    /// log of gamma(1/2, u) G(u) / u.
    pub fn log_kernel(&self, u: Complex64) -> Complex64 {
        self.log_gamma_ratio(u) + self.c_g * u * u - u.ln()
    }

    /// log of the pointwise bound |gamma(1/2, s+it) G(s+it)/(s+it)| <= gamma(s) e^{c s^2}/|s|.
    fn log_kernel_bound(&self, s: f64) -> f64 {
        self.log_gamma_ratio(Complex64::new(s, 0.0)).re + self.c_g * s * s - s.abs().ln()
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// log E(s), by the trapezoid rule on |kernel|, inflated by 1e-3 for the
/// quadrature error of a smooth positive integrand.
pub fn log_envelope(p: &VParams, s: f64) -> f64 {
    let peak = p.log_kernel_bound(s);
    // Gaussian factor alone reaches e^-50 relative to the peak at t_max.
    let t_max = (50.0 / p.c_g).sqrt() + 1.0;
    let n = 800;
    let h = t_max / n as f64;
    let mut terms: Vec<f64> = (0..=n)
        .map(|j| {
            let t = j as f64 * h;
            let w: f64 = if j == 0 || j == n { 0.5 } else { 1.0 };
            p.log_kernel(Complex64::new(s, t)).re + w.ln()
        })
        .collect();
    // Tail beyond t_max.
    terms.push(peak - p.c_g * t_max * t_max - (2.0 * p.c_g * t_max).ln() - h.ln());
    // (1/2 pi) * 2 * h * sum
    log_sum_exp(&terms) + (h / std::f64::consts::PI).ln() + 1e-3
}

#[derive(Debug, Clone)]
struct Contour {
    sigma: f64,
    h: f64,
    /// kernel(sigma + i t_j) e^{-log_scale}, the j = 0 node halved.
    nodes: Vec<Complex64>,
    log_scale: f64,
    /// log of (h / pi) sum |kernel|, so y^-sigma times this bounds the terms.
    log_abs: f64,
    /// Largest |log kernel| at the nodes, for the rounding term.
    max_log: f64,
    d: f64,
    log_env_lo: f64,
    log_env_hi: f64,
    /// log of the tail bound at y = 1.
    log_tail: f64,
    residue: f64,
}

/// ln y range that the step sizes are designed for.
const LN_Y_RANGE: (f64, f64) = (-5.0, 40.0);
/// Target for the relative size of the per-contour discretisation and tail errors.
const LOG_TARGET: f64 = -40.0;

impl Contour {
    fn new(p: &VParams, sigma: f64) -> Result<Self> {
        let amin = p.min_shift();
        if sigma == 0.0 || sigma <= -amin {
            return Err(Error::Domain(format!("contour Re u = {sigma} crosses a pole")));
        }
        let d = if sigma > 0.0 { (sigma / 2.0).min(1.0) } else { sigma.abs().min(sigma + amin) / 2.0 };
        let log_env = log_envelope(p, sigma);
        let log_env_lo = log_envelope(p, sigma - d);
        let log_env_hi = log_envelope(p, sigma + d);
        let ratio = [LN_Y_RANGE.0, LN_Y_RANGE.1]
            .iter()
            .map(|&ly| (log_env_lo + d * ly).max(log_env_hi - d * ly) - log_env)
            .fold(f64::NEG_INFINITY, f64::max);
        let h = 2.0 * std::f64::consts::PI * d / (-LOG_TARGET + ratio.max(0.0) + 2.0);
        let peak = p.log_kernel_bound(sigma);
        let c = p.c_g;
        // Smallest T with peak - c T^2 - log(2 c T pi) <= log_env + LOG_TARGET.
        let mut t_max = ((peak - log_env - LOG_TARGET).max(1.0) / c).sqrt();
        let log_tail = |t: f64| peak - c * t * t - (2.0 * c * t * std::f64::consts::PI).ln();
        while log_tail(t_max) > log_env + LOG_TARGET {
            t_max *= 1.1;
        }
        let n = (t_max / h).ceil() as usize;
        let t_max = n as f64 * h;
        let logs: Vec<Complex64> = (0..=n).map(|j| p.log_kernel(Complex64::new(sigma, j as f64 * h))).collect();
        let log_scale = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        let nodes: Vec<Complex64> = logs
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let v = (l - log_scale).exp();
                if j == 0 {
                    v * 0.5
                } else {
                    v
                }
            })
            .collect();
        let abs_sum: f64 = nodes.iter().map(|z| z.norm()).sum();
        let max_log = logs.iter().map(|l| l.norm()).fold(0.0, f64::max);
        Ok(Contour {
            sigma,
            h,
            nodes,
            log_scale,
            log_abs: log_scale + (abs_sum * h / std::f64::consts::PI).ln(),
            max_log,
            d,
            log_env_lo,
            log_env_hi,
            log_tail: log_tail(t_max),
            residue: if sigma < 0.0 { 1.0 } else { 0.0 },
        })
    }

    /// ln of the absolute-sum scale at this y; the contour with the smallest
    /// value has the least cancellation.
    fn log_magnitude(&self, ln_y: f64) -> f64 {
        self.log_abs - self.sigma * ln_y
    }

    fn eval(&self, ln_y: f64) -> VValue {
        // sum_j node_j e^{-i t_j ln y}, with the rotation re-anchored every 32 steps.
        let step = Complex64::from_polar(1.0, -self.h * ln_y);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut rot = Complex64::new(1.0, 0.0);
        for (j, g) in self.nodes.iter().enumerate() {
            if j % 32 == 0 {
                rot = Complex64::from_polar(1.0, -(j as f64) * self.h * ln_y);
            }
            acc += g * rot;
            rot *= step;
        }
        let scale = (self.log_scale - self.sigma * ln_y).exp() * self.h / std::f64::consts::PI;
        let value = self.residue + scale * acc.re;
        let disc_log = (self.log_env_lo - (self.sigma - self.d) * ln_y).max(self.log_env_hi - (self.sigma + self.d) * ln_y);
        let disc = 4.0 * disc_log.exp() / (2.0 * std::f64::consts::PI * self.d / self.h).exp_m1();
        let tail = (self.log_tail - self.sigma * ln_y).exp();
        let magnitude = self.log_magnitude(ln_y).exp();
        let rounding = (64.0 + 2.0 * self.max_log) * f64::EPSILON * (magnitude + self.residue);
        VValue { value, bound: disc + tail + rounding }
    }
}

/// A value with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VValue {
    pub value: f64,
    pub bound: f64,
}

/// Geometric grid of right contours used for envelopes and evaluation.
fn right_grid() -> Vec<f64> {
    let mut v = Vec::new();
    let mut s = 0.25;
    while s < 120.0 {
        v.push(s);
        s *= 1.25;
    }
    v
}

fn left_grid(amin: f64) -> Vec<f64> {
    let lo = amin - 0.25;
    let mut v = Vec::new();
    let mut s = 0.25f64;
    while s < lo {
        v.push(-s);
        s *= 1.6;
    }
    v.push(-lo.max(0.125));
    v.dedup();
    v
}

/// V for fixed parameters, with precomputed contours.
#[derive(Debug, Clone)]
pub struct VFunction {
    params: VParams,
    contours: Vec<Contour>,
    /// (s, log E(s)) on the right grid.
    envelope_grid: Vec<(f64, f64)>,
}

impl VFunction {
    /// Chooses, for each y, the contour with the smallest absolute-sum scale.
    pub fn new(params: VParams) -> Result<Self> {
        let amin = params.min_shift();
        let mut sigmas = left_grid(amin);
        sigmas.extend(right_grid().into_iter().filter(|&s| s <= 80.0));
        Self::with_sigmas(params, &sigmas)
    }

    /// A single contour at Re u = sigma.
    pub fn with_sigma(params: VParams, sigma: f64) -> Result<Self> {
        Self::with_sigmas(params, &[sigma])
    }

    fn with_sigmas(params: VParams, sigmas: &[f64]) -> Result<Self> {
        let contours = sigmas.iter().map(|&s| Contour::new(&params, s)).collect::<Result<Vec<_>>>()?;
        let envelope_grid = right_grid().into_iter().map(|s| (s, log_envelope(&params, s))).collect();
        Ok(VFunction { params, contours, envelope_grid })
    }

    pub fn params(&self) -> &VParams {
        &self.params
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.contours.iter().map(|c| c.sigma).collect()
    }

    pub fn eval(&self, y: f64) -> VValue {
        assert!(y > 0.0, "V(y) needs y > 0");
        let ly = y.ln();
        let best = self
            .contours
            .iter()
            .min_by(|a, b| a.log_magnitude(ly).total_cmp(&b.log_magnitude(ly)))
            .expect("at least one contour");
        best.eval(ly)
    }

    /// min over the right grid of y^-s E(s), an upper bound for |V(y)|.
    pub fn envelope(&self, y: f64) -> f64 {
        self.log_envelope_at(y.ln()).exp()
    }

    fn log_envelope_at(&self, ln_y: f64) -> f64 {
        self.envelope_grid
            .iter()
            .map(|&(s, le)| le - s * ln_y)
            .fold(f64::INFINITY, f64::min)
    }

    /// Bound on 2 sum_{m > cutoff} beta(m) m^{-1/2} |V(y_scale m)|, where
    /// beta(m) = sum_{d^2 | m} d(m/d^2)^2 = d_4(m) dominates |b_m| by Deligne.
    pub fn afe_tail(&self, cutoff: usize) -> f64 {
        2.0 * self.dirichlet_tail(cutoff, 0.5)
    }

    /// Bound on sum_{m > cutoff} d_4(m) m^{-sigma} |V(y_scale m)|.
    pub fn dirichlet_tail(&self, cutoff: usize, sigma: f64) -> f64 {
        let ln_scale = self.params.y_scale().ln();
        let m = cutoff.max(1) as f64;
        self.envelope_grid
            .iter()
            .map(|&(s, le)| le - s * ln_scale + log_d4_tail(m, sigma + s))
            .fold(f64::INFINITY, f64::min)
            .exp()
    }

    /// Bound on sum_{d > cutoff} |V(y0 d^2)| / d, from
    /// sum_{d > D} d^{-1-2s} <= D^{-2s} / (2s).
    pub fn square_tail(&self, y0: f64, cutoff: usize) -> f64 {
        let ly = y0.ln();
        let ld = (cutoff.max(1) as f64).ln();
        self.envelope_grid
            .iter()
            .map(|&(s, le)| le - s * ly - 2.0 * s * ld - (2.0 * s).ln())
            .fold(f64::INFINITY, f64::min)
            .exp()
    }

    /// Smallest M with afe_tail(M) < tol (1 when tol is infinite).
    pub fn effective_cutoff(&self, tol: f64) -> usize {
        if tol.is_infinite() || self.afe_tail(1) < tol {
            return 1;
        }
        let mut hi = 2usize;
        while self.afe_tail(hi) >= tol {
            hi *= 2;
            if hi > 1 << 40 {
                return hi;
            }
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.afe_tail(mid) < tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// ln of an upper bound for sum_{m > M} d_4(m) m^-s, s > 1, from
/// D_4(x) <= x (ln x + 3)^3 / 6 and partial summation.
pub fn log_d4_tail(m: f64, s: f64) -> f64 {
    if s <= 1.0 {
        return f64::INFINITY;
    }
    let a = s - 1.0;
    let v0 = m.max(1.0).ln() + 3.0;
    let poly = v0.powi(3) / a + 3.0 * v0 * v0 / (a * a) + 6.0 * v0 / a.powi(3) + 6.0 / a.powi(4);
    (s / 6.0).ln() - a * m.max(1.0).ln() + poly.ln()
}

/// V(y) with an error bound, failing when the bound exceeds tol max(1, |V|).
pub fn v_function(y: f64, params: &VParams, tol: f64) -> Result<VValue> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("V(y) needs y > 0, got {y}")));
    }
    let v = VFunction::new(params.clone())?.eval(y);
    if v.bound > tol * v.value.abs().max(1.0) {
        return Err(Error::Quadrature(v.bound));
    }
    Ok(v)
}
