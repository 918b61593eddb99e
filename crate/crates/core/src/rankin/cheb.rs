//! sum_m w_m V(y_scale m) for long sums: V is interpolated in ln y on
//! intervals of width 1/2 by Chebyshev polynomials of degree < 40, and the
//! weights are reduced once to Chebyshev moments per interval. The moments
//! do not depend on V, so one reduction serves every test function and
//! contour.

use super::vfunc::{VFunction, VValue};
use crate::exec::Exec;
use crate::sum::Compensated;

const DEGREE: usize = 40;
const WIDTH: f64 = 0.5;
/// Terms up to this index are evaluated directly.
const HEAD: usize = 4096;

#[derive(Debug, Clone)]
struct Interval {
    /// ln m at the ends.
    lo: f64,
    hi: f64,
    moments: Vec<f64>,
    abs_weight: f64,
}

#[derive(Debug, Clone)]
pub struct ChebyshevSum {
    head: Vec<f64>,
    intervals: Vec<Interval>,
    y_scale: f64,
}

impl ChebyshevSum {
    /// Weights w_m for m >= 1 (index 0 ignored).
    pub fn new(w: &[f64], y_scale: f64, exec: Exec) -> Self {
        let m_max = w.len().saturating_sub(1);
        let head_end = m_max.min(HEAD);
        let head = w[..=head_end].to_vec();
        let mut bounds = Vec::new();
        if m_max > head_end {
            let lo = (head_end as f64 + 0.5).ln();
            let hi = (m_max as f64 + 0.5).ln();
            let n = ((hi - lo) / WIDTH).ceil().max(1.0) as usize;
            let step = (hi - lo) / n as f64;
            for i in 0..n {
                bounds.push((lo + i as f64 * step, lo + (i + 1) as f64 * step));
            }
        }
        let intervals = exec.map_slice(&bounds, |&(lo, hi)| {
            let first = lo.exp().ceil() as usize;
            let last = (hi.exp().floor() as usize).min(m_max);
            let mut moments = vec![Compensated::new(); DEGREE];
            let mut abs_weight = 0.0;
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for m in first.max(head_end + 1)..=last {
                let x = ((m as f64).ln() - mid) / half;
                let wm = w[m];
                abs_weight += wm.abs();
                let (mut t0, mut t1) = (1.0, x);
                moments[0].add(wm);
                moments[1].add(wm * x);
                for mo in moments.iter_mut().skip(2) {
                    let t2 = 2.0 * x * t1 - t0;
                    mo.add(wm * t2);
                    t0 = t1;
                    t1 = t2;
                }
            }
            Interval { lo, hi, moments: moments.iter().map(|c| c.value()).collect(), abs_weight }
        });
        ChebyshevSum { head, intervals, y_scale }
    }

    pub fn apply(&self, vf: &VFunction) -> VValue {
        let mut acc = Compensated::new();
        let mut err = 0.0;
        for (m, w) in self.head.iter().enumerate().skip(1) {
            let v = vf.eval(self.y_scale * m as f64);
            acc.add(w * v.value);
            err += w.abs() * v.bound;
        }
        let ln_scale = self.y_scale.ln();
        for iv in &self.intervals {
            let mid = 0.5 * (iv.lo + iv.hi);
            let half = 0.5 * (iv.hi - iv.lo);
            let mut vals = [0.0; DEGREE];
            let mut val_err: f64 = 0.0;
            for (i, v) in vals.iter_mut().enumerate() {
                let x = (std::f64::consts::PI * (i as f64 + 0.5) / DEGREE as f64).cos();
                let r = vf.eval((ln_scale + mid + half * x).exp());
                *v = r.value;
                val_err = val_err.max(r.bound);
            }
            let mut coef = [0.0; DEGREE];
            for (j, c) in coef.iter_mut().enumerate() {
                let mut s = 0.0;
                for (i, v) in vals.iter().enumerate() {
                    let th = std::f64::consts::PI * (i as f64 + 0.5) / DEGREE as f64;
                    s += v * (j as f64 * th).cos();
                }
                *c = s * 2.0 / DEGREE as f64;
            }
            coef[0] *= 0.5;
            for (c, mo) in coef.iter().zip(&iv.moments) {
                acc.add(c * mo);
            }
            let trailing = coef[DEGREE - 1].abs() + coef[DEGREE - 2].abs() + coef[DEGREE - 3].abs();
            let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            err += iv.abs_weight * (2.0 * trailing + 4.0 * val_err + 64.0 * f64::EPSILON * scale);
        }
        VValue { value: acc.value(), bound: err }
    }
}
