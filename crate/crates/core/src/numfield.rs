//! Totally real fields of degree one or two with narrow class number one.
//!
//! Elements are stored exactly as a + b*omega with rational coordinates, where
//! omega is the second integral basis element. Embeddings are produced on
//! demand at a caller-chosen number of bits.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldId {
    Q,
    QSqrt5,
    QSqrt2,
    /// Q(sqrt 3): fundamental unit of norm +1, so h+ = 2. Only kept so the
    /// unsupported paths can be exercised.
    QSqrt3,
}

impl FieldId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(FieldId::Q),
            "Q_sqrt5" => Ok(FieldId::QSqrt5),
            "Q_sqrt2" => Ok(FieldId::QSqrt2),
            other => Err(Error::UnsupportedField(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldId::Q => "Q",
            FieldId::QSqrt5 => "Q_sqrt5",
            FieldId::QSqrt2 => "Q_sqrt2",
            FieldId::QSqrt3 => "Q_sqrt3",
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// omega is a root of x^2 - trace_w x + norm_w.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDescriptor {
    pub id: FieldId,
    pub degree: u32,
    pub discriminant: u64,
    pub trace_w: i64,
    pub norm_w: i64,
    /// Coordinates of the fundamental unit in the basis (1, omega).
    pub fundamental_unit: Option<(i64, i64)>,
    pub fundamental_unit_norm: i64,
    /// Res_{s=1} zeta_F(s).
    pub zeta_residue: f64,
}

impl FieldDescriptor {
    pub fn new(id: FieldId) -> Self {
        let (degree, disc, tw, nw, unit, unit_norm) = match id {
            FieldId::Q => (1, 1, 0, 0, None, 1),
            FieldId::QSqrt5 => (2, 5, 1, -1, Some((0, 1)), -1),
            FieldId::QSqrt2 => (2, 8, 0, -2, Some((1, 1)), -1),
            FieldId::QSqrt3 => (2, 12, 0, -3, Some((2, 1)), 1),
        };
        let mut fd = FieldDescriptor {
            id,
            degree,
            discriminant: disc,
            trace_w: tw,
            norm_w: nw,
            fundamental_unit: unit,
            fundamental_unit_norm: unit_norm,
            zeta_residue: 1.0,
        };
        if degree == 2 {
            let eps = fd.embed_f64(&fd.fundamental_unit_elem().unwrap())[0];
            // Class number one, two roots of unity.
            fd.zeta_residue = 2.0 * eps.ln() / (disc as f64).sqrt();
        }
        fd
    }

    pub fn rationals() -> Self {
        Self::new(FieldId::Q)
    }

    /// t^2 - 4n, the discriminant of the minimal polynomial of omega.
    pub fn poly_disc(&self) -> i64 {
        self.trace_w * self.trace_w - 4 * self.norm_w
    }

    pub fn elem(&self, a: i64, b: i64) -> FieldElement {
        FieldElement::from_ints(self.id, a, if self.degree == 1 { 0 } else { b })
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1, 0)
    }

    pub fn omega(&self) -> Result<FieldElement> {
        if self.degree == 1 {
            return Err(Error::Domain("omega undefined over Q".into()));
        }
        Ok(self.elem(0, 1))
    }

    pub fn fundamental_unit_elem(&self) -> Option<FieldElement> {
        self.fundamental_unit.map(|(a, b)| self.elem(a, b))
    }

    /// Kronecker symbol of the quadratic character attached to the field
    /// (trivial character for Q).
    pub fn kronecker(&self, n: u64) -> i64 {
        match self.discriminant {
            1 => 1,
            5 => match n % 5 {
                0 => 0,
                1 | 4 => 1,
                _ => -1,
            },
            8 => match n % 8 {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            },
            12 => match n % 12 {
                1 | 11 => 1,
                5 | 7 => -1,
                _ => 0,
            },
            d => panic!("no character table for discriminant {d}"),
        }
    }

    /// Number of integral ideals of norm m.
    pub fn ideals_of_norm(&self, m: u64) -> u64 {
        if self.degree == 1 {
            return u64::from(m >= 1);
        }
        let mut total = 0i64;
        let mut d = 1u64;
        while d * d <= m {
            if m % d == 0 {
                total += self.kronecker(d);
                if d * d != m {
                    total += self.kronecker(m / d);
                }
            }
            d += 1;
        }
        total as u64
    }

    /// Embeddings sigma_1(x), ..., sigma_n(x), each within (1 + |b|) 2^-prec.
    /// For degree two sigma_1 takes the positive square root.
    pub fn embed(&self, x: &FieldElement, prec: u32) -> Vec<BigRational> {
        if self.degree == 1 {
            return vec![x.a.clone()];
        }
        let scale = BigInt::one() << prec;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let center = &x.a + &x.b * BigRational::from_integer(self.trace_w.into()) * &half;
        let radius_coeff = &x.b * &half;
        // floor(sqrt(D) * 2^prec) with D the polynomial discriminant.
        let d = BigInt::from(self.poly_disc()) * (&scale * &scale);
        let sqrt_d = BigRational::new(d.sqrt(), scale);
        let r = radius_coeff * sqrt_d;
        vec![&center + &r, &center - &r]
    }

    pub fn embed_f64(&self, x: &FieldElement) -> Vec<f64> {
        self.embed(x, 80)
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Exact sign of each embedding: -1, 0 or 1.
    pub fn embedding_signs(&self, x: &FieldElement) -> Vec<i32> {
        let sgn = |r: &BigRational| -> i32 {
            if r.is_zero() {
                0
            } else if r.is_positive() {
                1
            } else {
                -1
            }
        };
        if self.degree == 1 {
            return vec![sgn(&x.a)];
        }
        // sigma = A +- B sqrt(D)
        let two = BigRational::from_integer(2.into());
        let a = &x.a + &x.b * BigRational::from_integer(self.trace_w.into()) / &two;
        let b = &x.b / &two;
        let disc = BigRational::from_integer(self.poly_disc().into());
        let sign_of = |s_b: i32| -> i32 {
            // sign of a + s_b * |b| sqrt(D)
            let bs = sgn(&b) * s_b;
            let sa = sgn(&a);
            if bs == 0 {
                return sa;
            }
            if sa == 0 || sa == bs {
                return if sa == 0 { bs } else { sa };
            }
            let lhs = &a * &a;
            let rhs = &b * &b * &disc;
            if lhs > rhs {
                sa
            } else if lhs < rhs {
                bs
            } else {
                0
            }
        };
        vec![sign_of(1), sign_of(-1)]
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.embedding_signs(x).iter().all(|&s| s > 0))
    }

    /// All eta in O_F^{x+} with max_j |log sigma_j(eta)| <= log B, ordered by
    /// exponent: eps0^{2t} for t = -T..=T.
    pub fn totally_positive_units(&self, bound: f64) -> Result<Vec<FieldElement>> {
        if !(bound >= 1.0) {
            return Err(Error::Domain(format!("unit height bound {bound} < 1")));
        }
        if self.degree == 1 {
            return Ok(vec![self.one()]);
        }
        let eps = self.fundamental_unit_elem().expect("degree two has a unit");
        let sq = if self.fundamental_unit_norm == -1 {
            eps.clone() * eps.clone()
        } else if self.is_totally_positive(&eps)? {
            eps.clone()
        } else {
            -eps.clone()
        };
        let log_b = bound.ln();
        let log_sq = self.unit_height(&sq);
        let tmax = if log_sq > 0.0 {
            (log_b / log_sq * (1.0 + 1e-12)).floor() as i64
        } else {
            0
        };
        let inv = sq.inverse();
        let mut out = Vec::new();
        for t in -tmax..=tmax {
            let base = if t < 0 { &inv } else { &sq };
            let mut u = self.one();
            for _ in 0..t.unsigned_abs() {
                u = u * base.clone();
            }
            out.push(u);
        }
        Ok(out)
    }

    /// max_j |log |sigma_j(u)||.
    pub fn unit_height(&self, u: &FieldElement) -> f64 {
        self.embed_f64(u)
            .iter()
            .map(|v| v.abs().ln().abs())
            .fold(0.0, f64::max)
    }

    /// Representatives of O^{x+} / O^{x 2}.
    pub fn unit_square_coset_reps(&self) -> Result<Vec<FieldElement>> {
        if self.degree == 1 || self.fundamental_unit_norm == -1 {
            Ok(vec![self.one()])
        } else {
            Err(Error::NontrivialEpsilonCoset)
        }
    }
}

/// a + b*omega in a fixed field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub field: FieldId,
    pub a: BigRational,
    pub b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn omega_data(id: FieldId) -> (i64, i64) {
    match id {
        FieldId::Q => (0, 0),
        FieldId::QSqrt5 => (1, -1),
        FieldId::QSqrt2 => (0, -2),
        FieldId::QSqrt3 => (0, -3),
    }
}

impl FieldElement {
    pub fn new(field: FieldId, a: BigRational, b: BigRational) -> Self {
        FieldElement { field, a, b }
    }

    pub fn from_ints(field: FieldId, a: i64, b: i64) -> Self {
        FieldElement::new(field, rat(a), rat(b))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Integer coordinates if the element is integral in the basis.
    pub fn as_ints(&self) -> Option<(i64, i64)> {
        if self.a.is_integer() && self.b.is_integer() {
            Some((self.a.to_integer().to_i64()?, self.b.to_integer().to_i64()?))
        } else {
            None
        }
    }

    pub fn norm(&self) -> BigRational {
        let (t, n) = omega_data(self.field);
        &self.a * &self.a + &self.a * &self.b * rat(t) + &self.b * &self.b * rat(n)
    }

    pub fn trace(&self) -> BigRational {
        let (t, _) = omega_data(self.field);
        let deg = if self.field == FieldId::Q { 1 } else { 2 };
        &self.a * rat(deg) + &self.b * rat(t)
    }

    /// Galois conjugate (identity over Q).
    pub fn conjugate(&self) -> Self {
        if self.field == FieldId::Q {
            return self.clone();
        }
        // omega' = t - omega
        let (t, _) = omega_data(self.field);
        FieldElement::new(self.field, &self.a + &self.b * rat(t), -self.b.clone())
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        let c = self.conjugate();
        FieldElement::new(self.field, &c.a / &n, &c.b / &n)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: FieldElement) -> FieldElement {
        debug_assert_eq!(self.field, o.field);
        FieldElement::new(self.field, self.a + o.a, self.b + o.b)
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: FieldElement) -> FieldElement {
        debug_assert_eq!(self.field, o.field);
        FieldElement::new(self.field, self.a - o.a, self.b - o.b)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(self.field, -self.a, -self.b)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, o: FieldElement) -> FieldElement {
        debug_assert_eq!(self.field, o.field);
        let (t, n) = omega_data(self.field);
        let bd = &self.b * &o.b;
        let a = &self.a * &o.a - &bd * rat(n);
        let b = &self.a * &o.b + &self.b * &o.a + &bd * rat(t);
        FieldElement::new(self.field, a, b)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field == FieldId::Q {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*w", self.a, self.b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues() {
        let f5 = FieldDescriptor::new(FieldId::QSqrt5);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((f5.zeta_residue - 2.0 * phi.ln() / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(FieldDescriptor::rationals().zeta_residue, 1.0);
    }

    #[test]
    fn unit_norms() {
        for id in [FieldId::QSqrt5, FieldId::QSqrt2] {
            let f = FieldDescriptor::new(id);
            let e = f.fundamental_unit_elem().unwrap();
            assert_eq!(e.norm(), rat(-1));
        }
    }

    #[test]
    fn ideal_counts() {
        let f5 = FieldDescriptor::new(FieldId::QSqrt5);
        // 5 ramified, 11 split, 2 inert.
        assert_eq!(f5.ideals_of_norm(5), 1);
        assert_eq!(f5.ideals_of_norm(11), 2);
        assert_eq!(f5.ideals_of_norm(2), 0);
        assert_eq!(f5.ideals_of_norm(4), 1);
    }
}
