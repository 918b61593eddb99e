//! Kloosterman sums over Z and over the ring of integers of a real quadratic
//! field with narrow class number one.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::numfield::{FieldDescriptor, FieldElement};
use crate::sum::Compensated;

/// Default cap on N(c) for residue enumeration.
pub const DEFAULT_NORM_CAP: u64 = 10_000;

/// x^{-1} mod c for gcd(x, c) = 1.
pub fn inverse_mod(x: u64, c: u64) -> Option<u64> {
    if c == 1 {
        return Some(0);
    }
    let e = (x as i128).extended_gcd(&(c as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(c as i128) as u64)
}

fn cos_table(c: u64) -> Vec<f64> {
    (0..c).map(|j| (TAU * j as f64 / c as f64).cos()).collect()
}

fn sin_table(c: u64) -> Vec<f64> {
    (0..c).map(|j| (TAU * j as f64 / c as f64).sin()).collect()
}

/// S(m, n; c) as a complex number; the imaginary part vanishes up to rounding.
pub fn kloosterman_q_complex(m: i64, n: i64, c: u64) -> Complex64 {
    assert!(c >= 1, "Kloosterman modulus must be positive");
    let cos = cos_table(c);
    let sin = sin_table(c);
    let mr = m.rem_euclid(c as i64) as u128;
    let nr = n.rem_euclid(c as i64) as u128;
    let (mut re, mut im) = (Compensated::new(), Compensated::new());
    for x in 0..c {
        let Some(xi) = inverse_mod(x, c) else { continue };
        let j = ((mr * x as u128 + nr * xi as u128) % c as u128) as usize;
        re.add(cos[j]);
        im.add(sin[j]);
    }
    Complex64::new(re.value(), im.value())
}

/// S(m, n; c) = sum over x mod c, gcd(x, c) = 1, of e((m x + n xbar) / c).
pub fn kloosterman_q(m: i64, n: i64, c: u64) -> f64 {
    assert!(c >= 1, "Kloosterman modulus must be positive");
    let cos = cos_table(c);
    let mr = m.rem_euclid(c as i64) as u128;
    let nr = n.rem_euclid(c as i64) as u128;
    let mut acc = Compensated::new();
    for x in 0..c {
        let Some(xi) = inverse_mod(x, c) else { continue };
        let j = ((mr * x as u128 + nr * xi as u128) % c as u128) as usize;
        acc.add(cos[j]);
    }
    acc.value()
}

/// S(r, n; c) for all r mod c with n and c fixed.
#[derive(Debug, Clone)]
pub struct KloostermanTable {
    pub n: i64,
    pub c: u64,
    values: Vec<f64>,
}

impl KloostermanTable {
    pub fn new(n: i64, c: u64) -> Self {
        assert!(c >= 1);
        let cos = cos_table(c);
        let nr = n.rem_euclid(c as i64) as u64;
        let units: Vec<(u64, u64)> = (0..c)
            .filter_map(|x| inverse_mod(x, c).map(|xi| (x, xi)))
            .collect();
        let mut acc = vec![Compensated::new(); c as usize];
        for &(x, xi) in &units {
            // j_r = r x + n xbar mod c, stepped in r.
            let mut j = ((nr as u128 * xi as u128) % c as u128) as u64;
            for a in acc.iter_mut() {
                a.add(cos[j as usize]);
                j += x;
                if j >= c {
                    j -= c;
                }
            }
        }
        let values = acc.iter().map(Compensated::value).collect();
        KloostermanTable { n, c, values }
    }

    /// S(m, n; c).
    pub fn get(&self, m: u64) -> f64 {
        self.values[(m % self.c) as usize]
    }
}

/// Integer arithmetic in Z[omega], omega^2 = t omega - n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegerRing {
    pub t: i64,
    pub n: i64,
}

pub type Coords = (i64, i64);

impl IntegerRing {
    pub fn of(field: &FieldDescriptor) -> Self {
        IntegerRing {
            t: field.trace_w,
            n: field.norm_w,
        }
    }

    pub fn mul(&self, x: Coords, y: Coords) -> Coords {
        let bd = x.1 * y.1;
        (x.0 * y.0 - bd * self.n, x.0 * y.1 + x.1 * y.0 + bd * self.t)
    }

    pub fn conj(&self, x: Coords) -> Coords {
        (x.0 + x.1 * self.t, -x.1)
    }

    pub fn norm(&self, x: Coords) -> i64 {
        x.0 * x.0 + x.0 * x.1 * self.t + x.1 * x.1 * self.n
    }

    pub fn trace(&self, x: Coords) -> i64 {
        2 * x.0 + x.1 * self.t
    }

    /// Whether y divides x.
    pub fn divides(&self, y: Coords, x: Coords) -> bool {
        let ny = self.norm(y);
        let z = self.mul(x, self.conj(y));
        z.0 % ny == 0 && z.1 % ny == 0
    }
}

/// A complete residue system of O_F / (c) from the Hermite normal form of
/// the lattice c O_F in the basis (1, omega).
#[derive(Debug, Clone)]
pub struct ResidueRing {
    pub ring: IntegerRing,
    pub c: Coords,
    /// Rows (a, b) and (0, d) spanning c O_F, with a d = |N(c)|.
    row1: Coords,
    d: i64,
}

impl ResidueRing {
    pub fn new(ring: IntegerRing, c: Coords, cap: u64) -> Result<Self> {
        let norm = ring.norm(c).unsigned_abs();
        if norm == 0 {
            return Err(Error::ZeroElement);
        }
        if norm > cap {
            return Err(Error::EnumerationOverflow { norm, cap });
        }
        let v1 = c;
        let v2 = ring.mul(c, (0, 1));
        let (row1, d) = if v1.0 == 0 && v2.0 == 0 {
            unreachable!("c O_F has full rank")
        } else {
            let e = v1.0.extended_gcd(&v2.0);
            let g = e.gcd;
            let r1 = (e.x * v1.0 + e.y * v2.0, e.x * v1.1 + e.y * v2.1);
            let r2y = (v2.0 / g) * v1.1 - (v1.0 / g) * v2.1;
            (r1, r2y.abs())
        };
        debug_assert_eq!((row1.0 * d) as u64, norm);
        Ok(ResidueRing { ring, c, row1, d })
    }

    pub fn norm(&self) -> u64 {
        (self.row1.0 * self.d) as u64
    }

    pub fn reduce(&self, x: Coords) -> Coords {
        let q = x.0.div_euclid(self.row1.0);
        let y = x.1 - q * self.row1.1;
        (x.0 - q * self.row1.0, y.rem_euclid(self.d))
    }

    pub fn mul(&self, x: Coords, y: Coords) -> Coords {
        self.reduce(self.ring.mul(x, y))
    }

    pub fn reps(&self) -> impl Iterator<Item = Coords> + '_ {
        (0..self.row1.0).flat_map(move |a| (0..self.d).map(move |b| (a, b)))
    }

    /// x O_F + c O_F = O_F, tested by the gcd of the 2x2 minors of the
    /// generators x, x omega, c, c omega.
    pub fn is_unit(&self, x: Coords) -> bool {
        let gens = [
            x,
            self.ring.mul(x, (0, 1)),
            self.c,
            self.ring.mul(self.c, (0, 1)),
        ];
        let mut g = 0i128;
        for i in 0..4 {
            for j in i + 1..4 {
                let m = gens[i].0 as i128 * gens[j].1 as i128 - gens[i].1 as i128 * gens[j].0 as i128;
                g = g.gcd(&m);
                if g == 1 {
                    return true;
                }
            }
        }
        g == 1
    }

    fn pow(&self, x: Coords, mut e: u64) -> Coords {
        let mut base = self.reduce(x);
        let mut acc = self.reduce((1, 0));
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Units of O_F / (c) paired with their inverses.
    pub fn units_with_inverses(&self) -> Vec<(Coords, Coords)> {
        let units: Vec<Coords> = self.reps().filter(|&x| self.is_unit(x)).collect();
        let phi = units.len() as u64;
        units
            .into_iter()
            .map(|x| (x, self.pow(x, phi - 1)))
            .collect()
    }

    /// Tr(z / c) mod 1 as a numerator over |N(c)|.
    pub fn trace_phase(&self, z: Coords) -> u64 {
        let nc = self.ring.norm(self.c);
        let w = self.ring.mul(z, self.ring.conj(self.c));
        let tr = self.ring.trace(w) as i128 * nc.signum() as i128;
        tr.rem_euclid(nc.unsigned_abs() as i128) as u64
    }
}

/// Data for a number-field Kloosterman sum.
#[derive(Debug, Clone)]
pub struct KloostermanQuery {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub c: FieldElement,
    /// Totally positive unit standing for the ideal scaling; 1 when every
    /// ideal is principal with its fixed generator.
    pub scaling: FieldElement,
}

impl KloostermanQuery {
    pub fn new(alpha: FieldElement, beta: FieldElement, c: FieldElement) -> Self {
        let scaling = FieldElement::from_ints(alpha.field, 1, 0);
        KloostermanQuery {
            alpha,
            beta,
            c,
            scaling,
        }
    }
}

fn integral(x: &FieldElement) -> Result<Coords> {
    x.as_ints()
        .ok_or_else(|| Error::Domain(format!("{x} is not an integral element")))
}

/// Kl(alpha, beta; c) = sum over x in (O_F/c)^x of e(Tr((alpha x + beta xbar)/c)).
pub fn kloosterman_nf(field: &FieldDescriptor, q: &KloostermanQuery) -> Result<f64> {
    kloosterman_nf_capped(field, q, DEFAULT_NORM_CAP)
}

pub fn kloosterman_nf_capped(field: &FieldDescriptor, q: &KloostermanQuery, cap: u64) -> Result<f64> {
    for (name, x) in [("alpha", &q.alpha), ("beta", &q.beta)] {
        if !field.is_totally_positive(x)? {
            return Err(Error::Domain(format!("{name} = {x} is not totally positive")));
        }
    }
    if q.c.is_zero() {
        return Err(Error::ZeroElement);
    }
    let alpha = integral(&q.alpha)?;
    let beta = integral(&(q.beta.clone() * q.scaling.clone()))?;
    let c = integral(&q.c)?;
    if field.degree == 1 {
        let m = c.0.unsigned_abs();
        return Ok(kloosterman_q(alpha.0, beta.0, m));
    }
    let rr = ResidueRing::new(IntegerRing::of(field), c, cap)?;
    let (alpha, beta) = (rr.reduce(alpha), rr.reduce(beta));
    Ok(kloosterman_units(&rr, &rr.units_with_inverses(), alpha, beta))
}

/// The sum over precomputed units and inverses; alpha and beta must be
/// reduced mod c.
pub fn kloosterman_units(rr: &ResidueRing, units: &[(Coords, Coords)], alpha: Coords, beta: Coords) -> f64 {
    let nc = rr.norm();
    let cos = cos_table(nc);
    let mut acc = Compensated::new();
    for &(x, xi) in units {
        let ax = rr.ring.mul(alpha, x);
        let bx = rr.ring.mul(beta, xi);
        let j = rr.trace_phase((ax.0 + bx.0, ax.1 + bx.1));
        acc.add(cos[j as usize]);
    }
    acc.value()
}
