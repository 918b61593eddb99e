//! Hecke eigenforms from the echelon basis: exact characteristic polynomial,
//! Sturm isolation of its real roots, eigenvectors in exact rational arithmetic
//! at a dyadic approximation of each eigenvalue.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::basis::{cusp_dim, hecke_matrix, miller_basis, QExpansion};
use super::qseries::dim_one_family;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Bits of the dyadic eigenvalue approximation.
const EIG_BITS: u32 = 256;

/// Dense polynomial, coefficient i multiplies x^i.
pub type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn eval(p: &Poly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative(p: &Poly) -> Poly {
    let mut d: Poly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(i.into()))
        .collect();
    if d.is_empty() {
        d.push(BigRational::zero());
    }
    d
}

fn rem(a: &Poly, b: &Poly) -> Poly {
    let mut b = b.clone();
    trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut r = a.clone();
    trim(&mut r);
    while r.len() > db && !is_zero_poly(&r) {
        let dr = r.len() - 1;
        let f = &r[dr] / &lead;
        for i in 0..=db {
            r[dr - db + i] = &r[dr - db + i] - &f * &b[i];
        }
        r.pop();
        if r.is_empty() {
            r.push(BigRational::zero());
        }
        trim(&mut r);
    }
    r
}

fn is_zero_poly(p: &Poly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn gcd_degree(a: &Poly, b: &Poly) -> usize {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !is_zero_poly(&y) {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    x.len() - 1
}

/// Characteristic polynomial det(x I - A) by Faddeev-LeVerrier.
pub fn charpoly(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = a.len();
    let mut coeffs = vec![BigInt::zero(); d + 1];
    coeffs[d] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for k in 1..=d {
        // M_k = A M_{k-1} + c_{d-k+1} I
        let mut next = vec![vec![BigInt::zero(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut s = BigInt::zero();
                for l in 0..d {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &coeffs[d - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = BigInt::zero();
        for i in 0..d {
            for l in 0..d {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs[d - k] = -tr / BigInt::from(k);
    }
    coeffs
}

fn sign_changes(seq: &[Poly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = 0i32;
    for p in seq {
        let v = eval(p, x);
        let s = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Real roots of a squarefree polynomial with only real roots, each as a
/// dyadic approximation within 2^-bits, in increasing order.
pub fn real_roots(p: &Poly, bits: u32) -> Vec<BigRational> {
    let mut p = p.clone();
    trim(&mut p);
    let deg = p.len() - 1;
    let lead = p[deg].abs();
    let bound = BigRational::one()
        + p[..deg]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    let mut sturm = vec![p.clone(), derivative(&p)];
    loop {
        let n = sturm.len();
        let r = rem(&sturm[n - 2], &sturm[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        sturm.push(r.into_iter().map(|c| -c).collect());
    }
    let count = |a: &BigRational, b: &BigRational| sign_changes(&sturm, a) - sign_changes(&sturm, b);
    let two = BigRational::from_integer(2.into());
    let mut stack = vec![(-bound.clone(), bound.clone())];
    let mut isolated = Vec::new();
    while let Some((a, b)) = stack.pop() {
        match count(&a, &b) {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = (&a + &b) / &two;
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
    }
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut roots: Vec<BigRational> = isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            // Root lies in (a, b]; P(b) may vanish.
            if eval(&p, &b).is_zero() {
                return b;
            }
            let sb = eval(&p, &b).is_positive();
            while &b - &a > eps {
                let mid = (&a + &b) / &two;
                let v = eval(&p, &mid);
                if v.is_zero() {
                    return mid;
                }
                if v.is_positive() == sb {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            (a + b) / two.clone()
        })
        .collect();
    roots.sort();
    roots
}

/// Coordinates c (c_1 = 1) with sum_i c_i M[i][j] = lambda c_j.
fn left_eigenvector(m: &[Vec<BigInt>], lambda: &BigRational) -> Vec<BigRational> {
    let d = m.len();
    if d == 1 {
        return vec![BigRational::one()];
    }
    let entry = |i: usize, j: usize| {
        let v = BigRational::from_integer(m[i][j].clone());
        if i == j {
            v - lambda
        } else {
            v
        }
    };
    // Equations j = 0..d in unknowns c_1..c_{d-1}: sum_{i>=1} c_i e(i,j) = -e(0,j).
    let mut rows: Vec<Vec<BigRational>> = (0..d)
        .map(|j| {
            let mut r: Vec<BigRational> = (1..d).map(|i| entry(i, j)).collect();
            r.push(-entry(0, j));
            r
        })
        .collect();
    let unknowns = d - 1;
    for col in 0..unknowns {
        let piv = (col..rows.len())
            .max_by(|&x, &y| rows[x][col].abs().cmp(&rows[y][col].abs()))
            .unwrap();
        rows.swap(col, piv);
        let p = rows[col][col].clone();
        for r in 0..rows.len() {
            if r != col && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &p;
                for c in col..=unknowns {
                    let v = &rows[col][c] * &f;
                    rows[r][c] = &rows[r][c] - v;
                }
            }
        }
    }
    let mut c = vec![BigRational::one()];
    for i in 0..unknowns {
        c.push(&rows[i][unknowns] / &rows[i][i]);
    }
    c
}

/// Normalized Hecke eigenform of level one.
#[derive(Debug, Clone)]
pub struct Eigenform {
    pub weight: u32,
    /// a_f(n) for n < len, a_f(1) = 1.
    pub a: Vec<f64>,
    /// C_f(n) = a_f(n) / n^{(k-1)/2}.
    pub c: Vec<f64>,
    /// Eigenvalue of the operator used to split the space.
    pub split_eigenvalue: f64,
    /// Harmonic weight, once computed.
    pub omega: Option<f64>,
}

impl Eigenform {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    fn from_normalized(weight: u32, c: Vec<f64>, split_eigenvalue: f64) -> Self {
        let half = (weight as f64 - 1.0) / 2.0;
        let a = c
            .iter()
            .enumerate()
            .map(|(n, x)| if n == 0 { 0.0 } else { x * (n as f64).powf(half) })
            .collect();
        Eigenform { weight, a, c, split_eigenvalue, omega: None }
    }
}

/// All normalized eigenforms of weight k with coefficients below len.
///
/// The space is split by T_2, falling back to T_3 and T_5 if the
/// characteristic polynomial has a repeated root.
pub fn eigenforms(k: u32, len: usize, exec: Exec) -> Result<Vec<Eigenform>> {
    let d = cusp_dim(k);
    if d == 0 {
        return Err(Error::EmptySpace(k));
    }
    if d == 1 {
        let c = dim_one_family(&[k], len.max(3), exec).remove(0);
        let t2 = c[2] * 2f64.powf((k as f64 - 1.0) / 2.0);
        let mut f = Eigenform::from_normalized(k, c, t2);
        f.c.truncate(len.max(2));
        f.a.truncate(len.max(2));
        return Ok(vec![f]);
    }
    let basis = miller_basis(k, len.max(5 * d + 1), exec)?;
    for m in [2u64, 3, 5] {
        let mat = hecke_matrix(&basis, m)?;
        let cp: Poly = charpoly(&mat).into_iter().map(BigRational::from_integer).collect();
        if gcd_degree(&cp, &derivative(&cp)) > 0 {
            continue;
        }
        let roots = real_roots(&cp, EIG_BITS);
        if roots.len() != d {
            return Err(Error::CannotSeparate(k));
        }
        let forms = roots
            .iter()
            .map(|lambda| combine(&basis, &left_eigenvector(&mat, lambda), k, len, lambda))
            .collect();
        return Ok(forms);
    }
    Err(Error::CannotSeparate(k))
}

/// Eigenforms for several weights with one-dimensional cusp space, sharing
/// the Delta computation.
pub fn dim_one_eigenforms(weights: &[u32], len: usize, exec: Exec) -> Vec<Eigenform> {
    dim_one_family(weights, len, exec)
        .into_iter()
        .zip(weights)
        .map(|(c, &k)| {
            let t2 = c[2] * 2f64.powf((k as f64 - 1.0) / 2.0);
            Eigenform::from_normalized(k, c, t2)
        })
        .collect()
}

fn combine(basis: &[QExpansion], coords: &[BigRational], k: u32, len: usize, lambda: &BigRational) -> Eigenform {
    let scale = BigInt::one() << EIG_BITS;
    let fixed: Vec<BigInt> = coords
        .iter()
        .map(|c| (c * BigRational::from_integer(scale.clone())).round().to_integer())
        .collect();
    let inv_scale = 2f64.powi(-(EIG_BITS as i32));
    let half = (k as f64 - 1.0) / 2.0;
    let n_out = len.min(basis[0].len());
    let c: Vec<f64> = (0..n_out)
        .map(|n| {
            if n == 0 {
                return 0.0;
            }
            let mut acc = BigInt::zero();
            for (f, b) in fixed.iter().zip(basis) {
                acc += f * &b.coeffs[n];
            }
            acc.to_f64().unwrap() * inv_scale / (n as f64).powf(half)
        })
        .collect();
    Eigenform::from_normalized(k, c, lambda.to_f64().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn roots_of_quadratic() {
        // x^2 - 2
        let r = real_roots(&vec![rat(-2), rat(0), rat(1)], 60);
        assert_eq!(r.len(), 2);
        assert!((r[1].to_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn charpoly_2x2() {
        let a = vec![vec![BigInt::from(1), BigInt::from(2)], vec![BigInt::from(3), BigInt::from(4)]];
        assert_eq!(charpoly(&a), vec![BigInt::from(-2), BigInt::from(-5), BigInt::from(1)]);
    }

    #[test]
    fn weight_16_and_24() {
        let f = eigenforms(16, 10, Exec::Sequential).unwrap();
        assert!((f[0].a[2] - 216.0).abs() < 1e-9);
        let fs = eigenforms(24, 10, Exec::Sequential).unwrap();
        let r = 12.0 * 144169f64.sqrt();
        assert!((fs[0].a[2] - (540.0 - r)).abs() < 1e-9);
        assert!((fs[1].a[2] - (540.0 + r)).abs() < 1e-9);
        let basis = miller_basis(24, 10, Exec::Sequential).unwrap();
        let t2 = hecke_matrix(&basis, 2).unwrap();
        assert_eq!(&t2[0][0] + &t2[1][1], BigInt::from(1080));
    }

    #[test]
    fn delta_normalized() {
        let f = eigenforms(12, 5, Exec::Sequential).unwrap();
        assert!((f[0].c[2] + 24.0 / 2f64.powf(5.5)).abs() < 1e-15);
    }
}
