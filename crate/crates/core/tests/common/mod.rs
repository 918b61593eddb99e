//! Brute-force Kloosterman oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use tfm::numfield::{FieldDescriptor, FieldId};

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn divisors(c: u64) -> u64 {
    (1..=c).filter(|d| c % d == 0).count() as u64
}

/// S(m, n; c) with inverses found by search and phases reduced in i128.
pub fn kloosterman_brute(m: i64, n: i64, c: u64) -> f64 {
    let ci = c as i128;
    let mut s = 0.0;
    for x in 0..c as i128 {
        let Some(xi) = (0..ci).find(|y| (x * y).rem_euclid(ci) == 1 % ci) else { continue };
        let j = (m as i128 * x + n as i128 * xi).rem_euclid(ci);
        s += (TAU * j as f64 / c as f64).cos();
    }
    s
}

/// Z[w] with w^2 = t w - n, written independently of the library's ring.
#[derive(Clone, Copy)]
pub struct Quad {
    pub t: i64,
    pub n: i64,
}

impl Quad {
    pub fn of(f: &FieldDescriptor) -> Self {
        Quad { t: f.trace_w, n: f.norm_w }
    }
    pub fn mul(&self, x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
        // (a + b w)(c + d w) = ac + (ad + bc) w + bd (t w - n)
        (x.0 * y.0 - self.n * x.1 * y.1, x.0 * y.1 + x.1 * y.0 + self.t * x.1 * y.1)
    }
    pub fn conj(&self, x: (i64, i64)) -> (i64, i64) {
        // w' = t - w
        (x.0 + self.t * x.1, -x.1)
    }
    pub fn norm(&self, x: (i64, i64)) -> i64 {
        self.mul(x, self.conj(x)).0
    }
    pub fn trace(&self, x: (i64, i64)) -> i64 {
        2 * x.0 + self.t * x.1
    }
}

/// Residues mod c keyed by the coordinates of x c' mod N(c); x = y mod c iff
/// the keys agree.
pub struct Residues {
    pub q: Quad,
    pub c: (i64, i64),
    pub n: i64,
}

impl Residues {
    pub fn key(&self, x: (i64, i64)) -> (i64, i64) {
        let y = self.q.mul(x, self.q.conj(self.c));
        (y.0.rem_euclid(self.n), y.1.rem_euclid(self.n))
    }

    /// A full residue system taken from the box [0, |N|)^2.
    pub fn system(&self) -> Vec<(i64, i64)> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if seen.insert(self.key((a, b))) {
                    out.push((a, b));
                }
            }
        }
        assert_eq!(out.len() as i64, self.n);
        out
    }

    pub fn units_with_inverses(&self) -> Vec<((i64, i64), (i64, i64))> {
        let sys = self.system();
        let one = self.key((1, 0));
        let mut out = Vec::new();
        for &x in &sys {
            if let Some(&y) = sys.iter().find(|&&y| self.key(self.q.mul(x, y)) == one) {
                out.push((x, y));
            }
        }
        out
    }
}

pub fn kl_nf_brute(q: Quad, c: (i64, i64), alpha: (i64, i64), beta: (i64, i64)) -> f64 {
    let r = Residues { q, c, n: q.norm(c).abs() };
    let nc = q.norm(c) as f64;
    r.units_with_inverses()
        .iter()
        .map(|&(x, y)| {
            let z = q.mul(alpha, x);
            let w = q.mul(beta, y);
            // Tr(z / c) = Tr(z c') / N(c)
            let tr = q.trace(q.mul((z.0 + w.0, z.1 + w.1), q.conj(c))) as f64;
            (TAU * tr / nc).cos()
        })
        .sum()
}

pub const FIELDS: [FieldId; 2] = [FieldId::QSqrt5, FieldId::QSqrt2];

/// Totally positive (alpha, beta) for the given field.
pub fn tp_pairs(id: FieldId) -> [((i64, i64), (i64, i64)); 3] {
    match id {
        FieldId::QSqrt5 => [((1, 0), (1, 0)), ((1, 0), (1, 1)), ((2, 1), (3, 0))],
        _ => [((1, 0), (1, 0)), ((1, 0), (2, 1)), ((3, 1), (2, 0))],
    }
}

