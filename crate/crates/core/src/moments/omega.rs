//! Harmonic weights omega_f from the Petersson formula on probe pairs, with
//! held-out cross-validation.

use crate::error::{Error, Result};
use crate::modforms::Eigenform;
use crate::tracefmla::petersson_rhs_q_auto;

use super::MomentConfig;

/// Pairs (m, n) checked after the solve.
pub const HELD_OUT_PAIRS: [(u64, u64); 4] = [(2, 3), (3, 5), (4, 9), (2, 8)];

/// Largest condition estimate accepted.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct HeldOutCheck {
    pub m: u64,
    pub n: u64,
    /// sum_f omega_f C_f(m) C_f(n).
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_certificate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaWeights {
    pub k: u32,
    pub omega: Vec<f64>,
    pub probe_set: Vec<u64>,
    /// ||A||_inf ||A^{-1}||_inf for the probe matrix A[i][f] = C_f(m_i).
    pub condition_estimate: f64,
    /// Bound on max_f |omega_f - exact omega_f|.
    pub solve_bound: f64,
    pub held_out: Vec<HeldOutCheck>,
}

impl OmegaWeights {
    pub fn total(&self) -> f64 {
        self.omega.iter().sum()
    }
}

/// 1 followed by the first d - 1 primes.
pub fn probe_indices(d: usize) -> Vec<u64> {
    let mut out = vec![1u64];
    let mut q = 2u64;
    while out.len() < d {
        if (2..q).take_while(|r| r * r <= q).all(|r| q % r != 0) {
            out.push(q);
        }
        q += 1;
    }
    out
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..d {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for j in 0..2 * d {
                        m[r][j] -= f * m[col][j];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[d..].to_vec()).collect())
}

fn inf_norm(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves sum_f omega_f C_f(m_i) = RHS(m_i, 1) on the probe indices and
/// validates the weights on [`HELD_OUT_PAIRS`].
pub fn omega_weights(forms: &[Eigenform], cfg: &MomentConfig) -> Result<OmegaWeights> {
    let d = forms.len();
    let k = forms.first().map(|f| f.weight).ok_or(Error::EmptySpace(0))?;
    let probes = probe_indices(d);
    let need = HELD_OUT_PAIRS
        .iter()
        .map(|&(m, n)| m.max(n))
        .chain(probes.iter().copied())
        .max()
        .unwrap_or(1) as usize;
    for f in forms {
        if f.c.len() <= need {
            return Err(Error::InsufficientCoefficients { need, have: f.c.len().saturating_sub(1) });
        }
    }
    let a: Vec<Vec<f64>> = probes
        .iter()
        .map(|&m| forms.iter().map(|f| f.c[m as usize]).collect())
        .collect();
    let rhs = probes
        .iter()
        .map(|&m| petersson_rhs_q_auto(m, 1, k, cfg.trace_tol))
        .collect::<Result<Vec<_>>>()?;
    let inv = invert(&a).ok_or(Error::IllConditioned(f64::INFINITY))?;
    let inv_norm = inf_norm(&inv);
    let condition_estimate = inf_norm(&a) * inv_norm;
    if !(condition_estimate <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition_estimate));
    }
    let omega: Vec<f64> = inv
        .iter()
        .map(|row| row.iter().zip(&rhs).map(|(x, r)| x * r.value).sum())
        .collect();
    if let Some(w) = omega.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Domain(format!("nonpositive harmonic weight {w} in weight {k}")));
    }
    let omega_max = omega.iter().copied().fold(0.0, f64::max);
    let rhs_err = rhs
        .iter()
        .map(|r| r.certificate() + 4.0 * f64::EPSILON * r.value.abs())
        .fold(0.0, f64::max);
    // Coefficients carry relative error below 1e-13; the elimination adds
    // d^2 eps per entry of the inverse.
    let coeff_err = 1e-13 * inf_norm(&a);
    let solve_bound = inv_norm * (rhs_err + coeff_err * omega_max)
        + (d * d) as f64 * f64::EPSILON * inv_norm * rhs.iter().map(|r| r.value.abs()).fold(0.0, f64::max);

    let mut held_out = Vec::new();
    for &(m, n) in &HELD_OUT_PAIRS {
        let r = petersson_rhs_q_auto(m, n, k, cfg.trace_tol)?;
        let lhs: f64 = forms
            .iter()
            .zip(&omega)
            .map(|(f, w)| w * f.c[m as usize] * f.c[n as usize])
            .sum();
        if (lhs - r.value).abs() > cfg.cv_tol * r.value.abs().max(1.0) {
            return Err(Error::TraceInconsistency { m, n, lhs, rhs: r.value });
        }
        held_out.push(HeldOutCheck { m, n, lhs, rhs: r.value, rhs_certificate: r.certificate() });
    }
    Ok(OmegaWeights { k, omega, probe_set: probes, condition_estimate, solve_bound, held_out })
}
