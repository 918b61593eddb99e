use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::qseries::{monomial_exact, Monomial};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Exact q-expansion a(0), ..., a(len-1) of a weight-k form.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion {
    pub weight: u32,
    pub coeffs: Vec<BigInt>,
}

impl QExpansion {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// dim S_k for level one.
pub fn cusp_dim(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let d = (k / 12) as usize;
    if k % 12 == 2 {
        d - 1
    } else {
        d
    }
}

/// E4^a E6^b of weight w, b in {0, 1}.
fn eisenstein_part(w: u32) -> (u32, u32) {
    if w % 4 == 0 {
        (w / 4, 0)
    } else {
        ((w - 6) / 4, 1)
    }
}

/// Echelon basis of S_k: a_i(j) = delta_ij for 1 <= i, j <= dim.
pub fn miller_basis(k: u32, len: usize, exec: Exec) -> Result<Vec<QExpansion>> {
    let d = cusp_dim(k);
    if d == 0 {
        return Err(Error::EmptySpace(k));
    }
    let len = len.max(d + 1);
    let mut rows: Vec<Vec<BigInt>> = (1..=d as u32)
        .map(|j| {
            let (a, b) = eisenstein_part(k - 12 * j);
            monomial_exact(Monomial::new(j, a, b), len, exec)
        })
        .collect();
    // Row j has leading term q^j; clear the entries above the diagonal block
    // from the bottom row upwards.
    for j in (0..d).rev() {
        for jj in (j + 1)..d {
            let f = rows[j][jj + 1].clone();
            if f.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(jj);
            for (x, y) in head[j].iter_mut().zip(&tail[0]) {
                *x -= &f * y;
            }
        }
    }
    Ok(rows.into_iter().map(|coeffs| QExpansion { weight: k, coeffs }).collect())
}

/// a(T_m f)(n) = sum_{d | gcd(m, n)} d^{k-1} a(mn/d^2) for n < out_len.
pub fn hecke_apply(m: u64, f: &QExpansion, out_len: usize) -> Result<QExpansion> {
    assert!(m >= 1);
    let need = if out_len == 0 { 0 } else { m as usize * (out_len - 1) + 1 };
    if f.len() < need {
        return Err(Error::LengthUnderflow { need, have: f.len() });
    }
    let k1 = f.weight - 1;
    let divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
    let pows: Vec<BigInt> = divisors.iter().map(|&d| BigInt::from(d).pow(k1)).collect();
    let coeffs = (0..out_len as u64)
        .map(|n| {
            let mut acc = BigInt::zero();
            for (d, dp) in divisors.iter().zip(&pows) {
                if n == 0 {
                    acc += dp * &f.coeffs[0];
                } else if n % d == 0 {
                    acc += dp * &f.coeffs[(m * n / (d * d)) as usize];
                }
            }
            acc
        })
        .collect();
    Ok(QExpansion { weight: f.weight, coeffs })
}

/// Matrix of T_m on an echelon basis: row i holds the first dim coefficients
/// (indices 1..=dim) of T_m b_i, so T_m b_i = sum_j M[i][j] b_j.
pub fn hecke_matrix(basis: &[QExpansion], m: u64) -> Result<Vec<Vec<BigInt>>> {
    let d = basis.len();
    basis
        .iter()
        .map(|b| {
            let t = hecke_apply(m, b, d + 1)?;
            Ok(t.coeffs[1..=d].to_vec())
        })
        .collect()
}

/// sigma_{k}(n).
pub fn divisor_power_sum(n: u64, k: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            if d * d != n {
                s += BigInt::from(n / d).pow(k);
            }
        }
        d += 1;
    }
    if n == 0 {
        BigInt::one()
    } else {
        s
    }
}
