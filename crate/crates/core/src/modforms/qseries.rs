//! Exact q-expansions of the monomials Delta^j E4^a E6^b.
//!
//! Every coefficient is computed modulo several NTT primes and reconstructed
//! by Garner's algorithm. The number of primes comes from an explicit bound on
//! the coefficients: |tau(n)| <= d(n) n^{11/2} <= 2 n^6, |E4 coeff| <=
//! 240 zeta(3) n^3 < 289 n^3, |E6 coeff| <= 504 zeta(5) n^5 < 523 n^5, and a
//! product of factors bounded by A_i (n+1)^{e_i} is bounded by
//! prod A_i (n+1)^{sum e_i + #factors - 1}.

use num_bigint::BigInt;

use super::ntt::{primes, Garner, Multiplier, NttPrime};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub delta: u32,
    pub e4: u32,
    pub e6: u32,
}

impl Monomial {
    pub fn new(delta: u32, e4: u32, e6: u32) -> Self {
        Monomial { delta, e4, e6 }
    }

    pub fn weight(&self) -> u32 {
        12 * self.delta + 4 * self.e4 + 6 * self.e6
    }

    /// Bits needed for the signed coefficients of index < len.
    pub fn majorant_bits(&self, len: usize) -> f64 {
        let factors = self.delta + self.e4 + self.e6;
        let log_const = self.delta as f64 + self.e4 as f64 * 289f64.log2() + self.e6 as f64 * 523f64.log2();
        let exponent = 6 * self.delta + 3 * self.e4 + 5 * self.e6 + factors.saturating_sub(1);
        log_const + exponent as f64 * (len.max(2) as f64).log2() + 1.0
    }
}

/// sigma_3(n) and sigma_5(n) for n < len, exact (len <= 2^25 keeps sigma_5 in u128).
struct DivisorSums {
    s3: Vec<u128>,
    s5: Vec<u128>,
}

impl DivisorSums {
    fn new(len: usize, want5: bool) -> Self {
        let mut s3 = vec![0u128; len];
        let mut s5 = if want5 { vec![0u128; len] } else { Vec::new() };
        for d in 1..len {
            let d3 = (d as u128).pow(3);
            let d5 = if want5 { (d as u128).pow(5) } else { 0 };
            let mut m = d;
            while m < len {
                s3[m] += d3;
                if want5 {
                    s5[m] += d5;
                }
                m += d;
            }
        }
        DivisorSums { s3, s5 }
    }
}

/// Dense coefficients of prod (1 - q^n)^3 = sum (-1)^k (2k+1) q^{k(k+1)/2}.
fn eta_cubed(len: usize) -> Vec<i64> {
    let mut v = vec![0i64; len];
    let mut k = 0usize;
    loop {
        let e = k * (k + 1) / 2;
        if e >= len {
            break;
        }
        v[e] = if k % 2 == 0 { 2 * k as i64 + 1 } else { -(2 * k as i64 + 1) };
        k += 1;
    }
    v
}

fn pow_series(mul: &Multiplier, base: Vec<u64>, mut e: u32, len: usize) -> Vec<u64> {
    let mut result: Option<Vec<u64>> = None;
    let mut b = base;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => b.clone(),
                Some(r) => mul.mul(&r, &b, len),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        b = mul.square(&b, len);
    }
    result.expect("positive exponent")
}

/// Coefficients 0..len of the monomial modulo one prime (Montgomery form).
fn residues(m: Monomial, len: usize, q: &NttPrime, sums: &DivisorSums) -> Vec<u64> {
    let shift = m.delta as usize;
    if len <= shift {
        return vec![0; len];
    }
    let plen = len - shift;
    let mul = Multiplier::new(q, plen);
    let mut acc: Option<Vec<u64>> = None;
    if m.delta > 0 {
        let e3: Vec<u64> = eta_cubed(plen).iter().map(|&x| q.from_i128(x as i128)).collect();
        acc = Some(pow_series(&mul, e3, 8 * m.delta, plen));
    }
    let times = |acc: Option<Vec<u64>>, f: &[u64]| -> Option<Vec<u64>> {
        Some(match acc {
            None => f.to_vec(),
            Some(a) => mul.mul(&a, f, plen),
        })
    };
    if m.e4 > 0 {
        let e4: Vec<u64> = (0..plen)
            .map(|n| {
                if n == 0 {
                    q.to_mont(1)
                } else {
                    q.mul(q.from_u128(sums.s3[n]), q.to_mont(240))
                }
            })
            .collect();
        for _ in 0..m.e4 {
            acc = times(acc, &e4);
        }
    }
    if m.e6 > 0 {
        let e6: Vec<u64> = (0..plen)
            .map(|n| {
                if n == 0 {
                    q.to_mont(1)
                } else {
                    q.sub(0, q.mul(q.from_u128(sums.s5[n]), q.to_mont(504)))
                }
            })
            .collect();
        for _ in 0..m.e6 {
            acc = times(acc, &e6);
        }
    }
    let body = acc.unwrap_or_else(|| {
        let mut one = vec![0u64; plen];
        one[0] = q.to_mont(1);
        one
    });
    let mut out = vec![0u64; shift];
    out.extend(body.iter().map(|&x| q.from_mont(x)));
    out
}

fn all_residues(m: Monomial, len: usize, r: usize, exec: Exec) -> Vec<Vec<u64>> {
    let sums = DivisorSums::new(len, m.e6 > 0);
    exec.map_slice(&primes()[..r], |q| residues(m, len, q, &sums))
}

/// Exact coefficients a(0), ..., a(len-1). One extra prime re-checks every
/// reconstructed coefficient.
pub fn monomial_exact(m: Monomial, len: usize, exec: Exec) -> Vec<BigInt> {
    let r = Garner::primes_for_bits(m.majorant_bits(len));
    let res = all_residues(m, len, r + 1, exec);
    let g = Garner::new(r);
    let check = &primes()[r];
    let mut buf = vec![0u64; r];
    (0..len)
        .map(|n| {
            for (i, rv) in res[..r].iter().enumerate() {
                buf[i] = rv[n];
            }
            let x = g.to_bigint(&buf);
            let rem = (&x % BigInt::from(check.p) + BigInt::from(check.p)) % BigInt::from(check.p);
            assert_eq!(
                rem,
                BigInt::from(res[r][n]),
                "coefficient bound too small for {m:?} at n = {n}"
            );
            x
        })
        .collect()
}

/// Normalized coefficients C(n) = a(n) / n^{(k-1)/2} of a monomial that is a
/// Hecke eigenform (a one-dimensional cusp space), sized by Deligne's bound
/// |a(n)| <= d(n) n^{(k-1)/2} <= 2 n^{k/2}.
pub fn eigen_monomial_normalized(m: Monomial, len: usize, exec: Exec) -> Vec<f64> {
    assert!(m.delta == 1, "eigen path needs a cusp monomial with a simple zero");
    let k = m.weight() as f64;
    let bits = 0.5 * k * (len.max(2) as f64).log2() + 2.0;
    let r = Garner::primes_for_bits(bits);
    let res = all_residues(m, len, r, exec);
    let g = Garner::new(r);
    let half = 0.5 * (k - 1.0);
    let mut out = vec![0.0; len];
    let mut buf = vec![0u64; r];
    for n in 1..len {
        for (i, rv) in res.iter().enumerate() {
            buf[i] = rv[n];
        }
        out[n] = g.to_f64(&buf) / (n as f64).powf(half);
    }
    out
}

/// -2w / B_w, the coefficient scale of the Eisenstein series E_w.
fn eisenstein_scale(w: u32) -> Option<i64> {
    match w {
        4 => Some(240),
        6 => Some(-504),
        8 => Some(480),
        10 => Some(-264),
        14 => Some(-24),
        _ => None,
    }
}

/// Weights with a one-dimensional cusp space, f = Delta E_{k-12}.
pub fn is_dim_one_weight(k: u32) -> bool {
    matches!(k, 12 | 16 | 18 | 20 | 22 | 26)
}

/// E_w modulo q in Montgomery form, from a sieve of sigma_{w-1}.
fn eisenstein_residues(w: u32, len: usize, q: &NttPrime) -> Vec<u64> {
    let scale = eisenstein_scale(w).expect("supported Eisenstein weight");
    let mut s = vec![0u64; len];
    for d in 1..len {
        let dp = q.pow_mont(q.to_mont(d as u64), u64::from(w - 1));
        let mut m = d;
        while m < len {
            s[m] = q.add(s[m], dp);
            m += d;
        }
    }
    let c = q.from_i128(scale as i128);
    for x in s.iter_mut().skip(1) {
        *x = q.mul(*x, c);
    }
    if len > 0 {
        s[0] = q.to_mont(1);
    }
    s
}

/// Normalized coefficients C(n), n < len, of the eigenforms Delta E_{k-12}
/// for several weights with one-dimensional cusp space. Delta and its
/// transform are computed once per prime and shared by all weights.
pub fn dim_one_family(weights: &[u32], len: usize, exec: Exec) -> Vec<Vec<f64>> {
    assert!(weights.iter().all(|&k| is_dim_one_weight(k)));
    let len = len.max(3);
    let counts: Vec<usize> = weights
        .iter()
        .map(|&k| Garner::primes_for_bits(0.5 * k as f64 * (len as f64).log2() + 2.0))
        .collect();
    let rmax = counts.iter().copied().max().unwrap_or(0);
    let per_prime: Vec<Vec<Option<Vec<u64>>>> = exec.map_slice(&primes()[..rmax], |q| {
        let idx = primes().iter().position(|x| x.p == q.p).unwrap();
        let plen = len - 1;
        let mul = Multiplier::new(q, plen);
        let e3: Vec<u64> = eta_cubed(plen).iter().map(|&x| q.from_i128(x as i128)).collect();
        let body = pow_series(&mul, e3, 8, plen);
        let fdelta = mul.transform(&body, plen);
        weights
            .iter()
            .zip(&counts)
            .map(|(&k, &r)| {
                if idx >= r {
                    return None;
                }
                let prod = if k == 12 {
                    body.clone()
                } else {
                    mul.mul_transformed(&fdelta, &eisenstein_residues(k - 12, plen, q), plen)
                };
                let mut out = Vec::with_capacity(len);
                out.push(0);
                out.extend(prod.iter().map(|&x| q.from_mont(x)));
                Some(out)
            })
            .collect()
    });
    weights
        .iter()
        .enumerate()
        .map(|(wi, &k)| {
            let r = counts[wi];
            let g = Garner::new(r);
            let half = 0.5 * (k as f64 - 1.0);
            let mut buf = vec![0u64; r];
            let mut out = vec![0.0; len];
            for (n, o) in out.iter_mut().enumerate().skip(1) {
                for i in 0..r {
                    buf[i] = per_prime[i][wi].as_ref().unwrap()[n];
                }
                *o = g.to_f64(&buf) / (n as f64).powf(half);
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_head() {
        let d = monomial_exact(Monomial::new(1, 0, 0), 11, Exec::Sequential);
        let want = [0i64, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(d[n], BigInt::from(*w), "tau({n})");
        }
    }

    #[test]
    fn eisenstein_head() {
        let e4 = monomial_exact(Monomial::new(0, 1, 0), 4, Exec::Sequential);
        assert_eq!(e4, [1, 240, 2160, 6720].map(BigInt::from).to_vec());
        let e6 = monomial_exact(Monomial::new(0, 0, 1), 4, Exec::Sequential);
        assert_eq!(e6, [1, -504, -16632, -122976].map(BigInt::from).to_vec());
    }

    #[test]
    fn family_matches_monomials() {
        let fam = dim_one_family(&[12, 16, 22, 26], 60, Exec::Sequential);
        for (f, m) in fam.iter().zip([
            Monomial::new(1, 0, 0),
            Monomial::new(1, 1, 0),
            Monomial::new(1, 1, 1),
            Monomial::new(1, 2, 1),
        ]) {
            let want = eigen_monomial_normalized(m, 60, Exec::Sequential);
            for n in 1..60 {
                assert!((f[n] - want[n]).abs() <= 1e-15 * want[n].abs().max(1e-300), "{m:?} {n}");
            }
        }
    }
}
