//! Trace-formula right-hand side over a real quadratic field with h+ = 1, and
//! the totally positive unit sums that control its unit translates.
//!
//! Totally positive units are eta_t = e^{2t} (e the fundamental unit, of norm
//! -1 for both supported fields). Moduli run over c in O_F \ {0} modulo
//! O^{x+}, represented by the generators with |sigma_1(c)| / |N(c)|^{1/2} in
//! [1, e^2); each ideal contributes the four classes c, -c, e c, -e c.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numfield::{FieldDescriptor, FieldElement};
use crate::specialfn::{bessel_j, ln_gamma};
use crate::sum::{pairwise, Compensated};

use super::kloosterman::{kloosterman_units, Coords, IntegerRing, ResidueRing, DEFAULT_NORM_CAP};

/// Truncation parameters for the degree-two right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRhsParams {
    pub weights: Vec<u32>,
    /// Moduli with |N(c)| above this bound are dropped (and certified).
    pub c_norm_bound: f64,
    /// Units with max_j |log sigma_j(eta)| above log of this are dropped.
    pub unit_height_bound: f64,
    pub tol: f64,
}

/// Result of [`petersson_rhs_nf`].
#[derive(Debug, Clone, PartialEq)]
pub struct NfTraceValue {
    pub value: f64,
    pub c_tail: f64,
    pub eta_tail: f64,
    pub rounding: f64,
    pub c_classes: usize,
    pub units: usize,
}

impl NfTraceValue {
    pub fn certificate(&self) -> f64 {
        self.c_tail + self.eta_tail + self.rounding
    }
}

fn fundamental_unit(field: &FieldDescriptor) -> Result<(Coords, f64)> {
    if field.degree != 2 || field.fundamental_unit_norm != -1 {
        return Err(Error::UnsupportedField(field.id.name().into()));
    }
    let u = field.fundamental_unit.expect("degree two");
    let e = field.embed_f64(&field.elem(u.0, u.1))[0];
    debug_assert!(e > 1.0);
    Ok((u, e))
}

fn sigma(field: &FieldDescriptor, x: Coords) -> [f64; 2] {
    let sd = (field.poly_disc() as f64).sqrt();
    let t = field.trace_w as f64;
    let (a, b) = (x.0 as f64, x.1 as f64);
    [a + b * (t + sd) / 2.0, a + b * (t - sd) / 2.0]
}

/// Representatives of (O_F \ {0}) / O^{x+} with |N(c)| <= bound, ordered by
/// norm and then coordinates.
pub fn modulus_representatives(field: &FieldDescriptor, bound: u64) -> Result<Vec<Coords>> {
    let (u, e) = fundamental_unit(field)?;
    let ring = IntegerRing::of(field);
    let uc = ring.conj(u);
    let inv_sq = ring.mul(uc, uc);
    // |sigma_1(x)| >= |sigma_2(x)| iff b Tr(x) >= 0.
    let dominant = |x: Coords| x.1 as i128 * ring.trace(x) as i128 >= 0;
    let sd = (field.poly_disc() as f64).sqrt();
    let s2 = (field.trace_w as f64 - sd) / 2.0;
    let rx = (bound as f64).sqrt();
    let bmax = ((e * e + 1.0) * rx / sd).ceil() as i64 + 1;
    let mut out = Vec::new();
    for b in -bmax..=bmax {
        let lo = (-rx - b as f64 * s2).floor() as i64 - 1;
        let hi = (rx - b as f64 * s2).ceil() as i64 + 1;
        for a in lo..=hi {
            let c = (a, b);
            let n = ring.norm(c).unsigned_abs();
            if n == 0 || n > bound {
                continue;
            }
            if dominant(c) && !dominant(ring.mul(c, inv_sq)) {
                out.push(c);
            }
        }
    }
    out.sort_by_key(|&c| (ring.norm(c).unsigned_abs(), c));
    Ok(out)
}

/// Terms whose Bessel majorant falls below this are skipped and certified.
const NEGLIGIBLE: f64 = 1e-40;

fn log_power_bound(m: u32, x: f64) -> f64 {
    m as f64 * (0.5 * x).ln() - ln_gamma(m as f64 + 1.0)
}

fn sat_bound(m: u32, x: f64) -> f64 {
    log_power_bound(m, x).min(0.0).exp()
}

/// Bound on sum_t prod_j |J_{m_j}(x_j(t))| for every modulus of norm n, where
/// x_1(t) <= a1 e^t / sqrt(n) and x_2(t) <= a2 e^{2-t} / sqrt(n).
fn unit_translate_bound(a: [f64; 2], m: [u32; 2], e: f64, n: f64) -> f64 {
    const T: i32 = 160;
    let u = a[0] / n.sqrt();
    let v = a[1] * e * e / n.sqrt();
    let mut acc = 0.0;
    for t in -T..=T {
        let et = e.powi(t);
        acc += sat_bound(m[0], u * et) * sat_bound(m[1], v / et);
    }
    let geo = |mj: u32| 1.0 / (1.0 - e.powi(-(mj as i32)));
    acc + log_power_bound(m[1], v / e.powi(T + 1)).exp() * geo(m[1])
        + log_power_bound(m[0], u / e.powi(T + 1)).exp() * geo(m[0])
}

/// Bound on the moduli with |N(c)| > bound (before the constant C).
fn modulus_tail(field: &FieldDescriptor, a: [f64; 2], m: [u32; 2], e: f64, bound: u64) -> f64 {
    let mmin = m[0].min(m[1]);
    let fits = |n: f64| {
        let w = (a[0] * a[1]).sqrt() * e / n.sqrt();
        log_power_bound(m[0], w) <= 0.0 && log_power_bound(m[1], w) <= 0.0
    };
    let mut end = 16 * bound.max(1);
    while !fits(end as f64) {
        end *= 2;
    }
    let mut acc = Compensated::new();
    for n in bound + 1..=end {
        let ideals = field.ideals_of_norm(n);
        if ideals > 0 {
            acc.add(4.0 * ideals as f64 * unit_translate_bound(a, m, e, n as f64));
        }
    }
    let b_end = unit_translate_bound(a, m, e, end as f64);
    let rem = 8.0 * b_end * (end as f64).powf(1.5) / ((mmin as f64 - 3.0) / 2.0);
    acc.value() + rem
}

/// prod_j (-1)^{k_j/2} (2 pi)^n / (2 sqrt(d_F)).
pub fn trace_constant(field: &FieldDescriptor, weights: &[u32]) -> f64 {
    let flips = weights.iter().filter(|&&k| (k / 2) % 2 == 1).count();
    let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
    sign * (2.0 * PI).powi(weights.len() as i32) / (2.0 * (field.discriminant as f64).sqrt())
}

fn is_unit_multiple(field: &FieldDescriptor, nu: &FieldElement, xi: &FieldElement) -> bool {
    let q = nu.clone() * xi.inverse();
    q.as_ints().is_some() && {
        let n = q.norm();
        n == num_rational::BigRational::from_integer(1.into())
            || n == num_rational::BigRational::from_integer((-1).into())
    } && field.is_totally_positive(&q).unwrap_or(false)
}

/// 1_{nu = xi unit} + C sum_c sum_eta Kl(eta nu, xi; c)/|N(c)|
///   prod_j J_{k_j - 1}(4 pi sqrt(sigma_j(eta nu xi)) / |sigma_j(c)|).
pub fn petersson_rhs_nf(
    field: &FieldDescriptor,
    nu: &FieldElement,
    xi: &FieldElement,
    params: &TraceRhsParams,
    exec: Exec,
) -> Result<NfTraceValue> {
    let (u, e) = fundamental_unit(field)?;
    if params.weights.len() != 2 {
        return Err(Error::Domain("weight vector must have two entries".into()));
    }
    if params.weights.iter().any(|&k| k < 12 || k % 2 == 1) {
        return Err(Error::Domain(format!("weights {:?} must be even and >= 12", params.weights)));
    }
    if !(params.c_norm_bound >= 1.0 && params.unit_height_bound >= 1.0) {
        return Err(Error::Domain("truncation bounds must be >= 1".into()));
    }
    for x in [nu, xi] {
        if !field.is_totally_positive(x)? {
            return Err(Error::Domain(format!("{x} is not totally positive")));
        }
    }
    let ring = IntegerRing::of(field);
    let nu_c = nu
        .as_ints()
        .ok_or_else(|| Error::Domain(format!("{nu} is not integral")))?;
    let xi_c = xi
        .as_ints()
        .ok_or_else(|| Error::Domain(format!("{xi} is not integral")))?;
    let m = [params.weights[0] - 1, params.weights[1] - 1];
    let nx = sigma(field, ring.mul(nu_c, xi_c));
    let a = [4.0 * PI * nx[0].sqrt(), 4.0 * PI * nx[1].sqrt()];

    // eta_t = e^{2t}, |t| <= T.
    let tmax = (params.unit_height_bound.ln() / (2.0 * e.ln()) * (1.0 + 1e-12)).floor() as i64;
    let sq = ring.mul(u, u);
    let sq_inv = {
        let uc = ring.conj(u);
        ring.mul(uc, uc)
    };
    let ts: Vec<i64> = (-tmax..=tmax).collect();

    let bound = params.c_norm_bound.floor() as u64;
    let reps = modulus_representatives(field, bound)?;
    let cst = trace_constant(field, &params.weights);
    let geo = |mj: u32| 1.0 / (1.0 - e.powi(-(mj as i32)));

    let per_c: Vec<Result<(f64, f64, f64)>> = exec.map_slice(&reps, |&c| {
        let rr = ResidueRing::new(ring, c, DEFAULT_NORM_CAP)?;
        let units = rr.units_with_inverses();
        let nc = rr.norm() as f64;
        let sc = sigma(field, c);
        let nu_r = rr.reduce(nu_c);
        let xi_r = rr.reduce(xi_c);
        let (sq_r, inv_r) = (rr.reduce(sq), rr.reduce(sq_inv));
        let mut terms = Vec::with_capacity(ts.len());
        let mut abs = 0.0;
        let mut skipped = 0.0;
        for &t in &ts {
            let et = e.powi(t as i32);
            let x1 = a[0] * et / sc[0].abs();
            let x2 = a[1] / et / sc[1].abs();
            let majorant = sat_bound(m[0], x1) * sat_bound(m[1], x2);
            if majorant < NEGLIGIBLE {
                skipped += majorant;
                terms.push(0.0);
                continue;
            }
            let j = bessel_j(m[0], x1) * bessel_j(m[1], x2);
            let base = if t < 0 { inv_r } else { sq_r };
            let mut eta = rr.reduce((1, 0));
            for _ in 0..t.unsigned_abs() {
                eta = rr.mul(eta, base);
            }
            let kl = kloosterman_units(&rr, &units, rr.mul(eta, nu_r), xi_r);
            let term = kl / nc * j;
            abs += term.abs() * (nc + 16.0);
            terms.push(term);
        }
        let t1 = (tmax + 1) as f64;
        let x2_next = a[1] / e.powf(t1) / sc[1].abs();
        let x1_next = a[0] / e.powf(t1) / sc[0].abs();
        let eta_tail = log_power_bound(m[1], x2_next).exp() * geo(m[1])
            + log_power_bound(m[0], x1_next).exp() * geo(m[0])
            + skipped;
        Ok((pairwise(&terms), eta_tail, abs))
    });
    let mut sums = Vec::with_capacity(per_c.len());
    let mut eta_tail = 0.0;
    let mut abs = 0.0;
    for r in per_c {
        let (s, et, ab) = r?;
        sums.push(s);
        eta_tail += et;
        abs += ab;
    }
    let delta = if is_unit_multiple(field, nu, xi) { 1.0 } else { 0.0 };
    let c_tail = cst.abs() * modulus_tail(field, a, m, e, bound);
    let out = NfTraceValue {
        value: delta + cst * pairwise(&sums),
        c_tail,
        eta_tail: cst.abs() * eta_tail,
        rounding: cst.abs() * abs * 8.0 * f64::EPSILON + 4.0 * f64::EPSILON,
        c_classes: reps.len(),
        units: ts.len(),
    };
    if out.c_tail + out.eta_tail > params.tol {
        return Err(Error::Uncertified {
            what: format!("c-tail {:e} and eta-tail", out.c_tail),
            bound: out.eta_tail,
        });
    }
    Ok(out)
}

/// Partial sum of prod_{|sigma_j(eta)| > 1} |sigma_j(eta)|^{-lambda0} over
/// totally positive units of height at most B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSum {
    pub partial: f64,
    /// Geometric bound on the omitted units; infinite for lambda0 = 0.
    pub tail_bound: f64,
    pub terms: usize,
}

pub fn unit_sum_tail(field: &FieldDescriptor, lambda0: f64, bound: f64) -> Result<UnitSum> {
    let (_, e) = fundamental_unit(field)?;
    if !(lambda0 >= 0.0) {
        return Err(Error::Domain(format!("lambda0 = {lambda0} must be >= 0")));
    }
    let units = field.totally_positive_units(bound)?;
    let mut acc = Compensated::new();
    for eta in &units {
        let w: f64 = field
            .embed_f64(eta)
            .iter()
            .filter(|s| s.abs() > 1.0)
            .map(|s| s.abs().powf(-lambda0))
            .product();
        acc.add(w);
    }
    let tmax = (units.len() as i32 - 1) / 2;
    let tail_bound = if lambda0 == 0.0 {
        f64::INFINITY
    } else {
        let rho = e.powf(-2.0 * lambda0);
        2.0 * rho.powi(tmax + 1) / (1.0 - rho)
    };
    Ok(UnitSum {
        partial: acc.value(),
        tail_bound,
        terms: units.len(),
    })
}
