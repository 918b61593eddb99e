//! Number-theoretic transforms over word-size primes p = c 2^28 + 1 < 2^62,
//! in Montgomery form, and Garner reconstruction across several primes.

use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::OnceLock;

const TWO_ADICITY: u32 = 28;

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, Clone, Copy)]
pub struct NttPrime {
    pub p: u64,
    /// Generator of the multiplicative group.
    pub g: u64,
    r2: u64,
    pinv_neg: u64,
}

impl NttPrime {
    fn new(p: u64) -> Self {
        let c = (p - 1) >> TWO_ADICITY;
        let mut factors = vec![2u64];
        let mut rest = c;
        let mut f = 2;
        while f * f <= rest {
            if rest % f == 0 {
                if !factors.contains(&f) {
                    factors.push(f);
                }
                rest /= f;
            } else {
                f += 1;
            }
        }
        if rest > 1 && !factors.contains(&rest) {
            factors.push(rest);
        }
        let g = (2..)
            .find(|&g| factors.iter().all(|&q| powmod(g, (p - 1) / q, p) != 1))
            .unwrap();
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        NttPrime { p, g, r2: mulmod(r, r, p), pinv_neg: inv.wrapping_neg() }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.pinv_neg);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        // Branch-free reduction; valid since every value stays below 2^63.
        u.min(u.wrapping_sub(self.p))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        s.min(s.wrapping_sub(self.p))
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let d = a.wrapping_sub(b);
        d.min(d.wrapping_add(self.p))
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn from_i128(&self, a: i128) -> u64 {
        let r = a.rem_euclid(self.p as i128) as u64;
        self.to_mont(r)
    }

    pub fn from_u128(&self, a: u128) -> u64 {
        self.to_mont((a % self.p as u128) as u64)
    }

    pub fn pow_mont(&self, a: u64, mut e: u64) -> u64 {
        let mut r = self.to_mont(1);
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Per-stage twiddles: entry h + j holds w_{2h}^j (Montgomery form).
    fn twiddles(&self, len: usize, inverse: bool) -> Vec<u64> {
        let mut t = vec![0u64; len.max(2)];
        let mut h = 1;
        while h < len {
            let e = (self.p - 1) / (2 * h as u64);
            let mut w = self.pow_mont(self.to_mont(self.g), e);
            if inverse {
                w = self.pow_mont(w, self.p - 2);
            }
            let mut cur = self.to_mont(1);
            for j in 0..h {
                t[h + j] = cur;
                cur = self.mul(cur, w);
            }
            h *= 2;
        }
        t
    }

    /// Decimation-in-frequency transform; output in bit-reversed order.
    fn forward(&self, a: &mut [u64], tw: &[u64]) {
        let n = a.len();
        let mut h = n / 2;
        while h >= 1 {
            for block in a.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                let w = &tw[h..2 * h];
                for j in 0..h {
                    let u = lo[j];
                    let v = hi[j];
                    lo[j] = self.add(u, v);
                    hi[j] = self.mul(self.sub(u, v), w[j]);
                }
            }
            h /= 2;
        }
    }

    /// Decimation-in-time inverse from bit-reversed input, scaled by 1/n.
    fn inverse(&self, a: &mut [u64], itw: &[u64]) {
        let n = a.len();
        let mut h = 1;
        while h < n {
            for block in a.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                let w = &itw[h..2 * h];
                for j in 0..h {
                    let u = lo[j];
                    let v = self.mul(hi[j], w[j]);
                    lo[j] = self.add(u, v);
                    hi[j] = self.sub(u, v);
                }
            }
            h *= 2;
        }
        let ninv = self.pow_mont(self.to_mont(n as u64), self.p - 2);
        for x in a.iter_mut() {
            *x = self.mul(*x, ninv);
        }
    }
}

/// Enough for coefficient bounds of about 2900 bits.
const PRIME_COUNT: usize = 48;

/// NTT primes in decreasing order.
pub fn primes() -> &'static [NttPrime] {
    static PRIMES: OnceLock<Vec<NttPrime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut c: u64 = (1u64 << (62 - TWO_ADICITY)) - 1;
        while out.len() < PRIME_COUNT {
            let p = (c << TWO_ADICITY) + 1;
            if is_prime_u64(p) {
                out.push(NttPrime::new(p));
            }
            c -= 1;
        }
        out
    })
}

/// Truncated product of two series in Montgomery form, reusing a cached
/// transform of `a` when given.
pub struct Multiplier<'a> {
    pub prime: &'a NttPrime,
    len: usize,
    tw: Vec<u64>,
    itw: Vec<u64>,
}

impl<'a> Multiplier<'a> {
    /// Plan for products whose operands and output are truncated to `out_len`.
    pub fn new(prime: &'a NttPrime, out_len: usize) -> Self {
        let len = (2 * out_len.max(1) - 1).next_power_of_two().max(2);
        assert!(len.trailing_zeros() <= TWO_ADICITY, "transform length too large");
        Multiplier { prime, len, tw: prime.twiddles(len, false), itw: prime.twiddles(len, true) }
    }

    fn padded(&self, a: &[u64], out_len: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.len];
        let n = a.len().min(out_len);
        v[..n].copy_from_slice(&a[..n]);
        v
    }

    pub fn mul(&self, a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
        let mut fa = self.padded(a, out_len);
        self.prime.forward(&mut fa, &self.tw);
        if std::ptr::eq(a, b) {
            for x in fa.iter_mut() {
                *x = self.prime.mul(*x, *x);
            }
        } else {
            let mut fb = self.padded(b, out_len);
            self.prime.forward(&mut fb, &self.tw);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = self.prime.mul(*x, *y);
            }
        }
        self.prime.inverse(&mut fa, &self.itw);
        fa.truncate(out_len);
        fa
    }

    pub fn square(&self, a: &[u64], out_len: usize) -> Vec<u64> {
        self.mul(a, a, out_len)
    }

    /// Forward transform of `a`, for repeated products with the same factor.
    pub fn transform(&self, a: &[u64], out_len: usize) -> Vec<u64> {
        let mut fa = self.padded(a, out_len);
        self.prime.forward(&mut fa, &self.tw);
        fa
    }

    pub fn mul_transformed(&self, fa: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
        let mut fb = self.padded(b, out_len);
        self.prime.forward(&mut fb, &self.tw);
        for (y, x) in fb.iter_mut().zip(fa) {
            *y = self.prime.mul(*x, *y);
        }
        self.prime.inverse(&mut fb, &self.itw);
        fb.truncate(out_len);
        fb
    }
}

/// Mixed-radix reconstruction from residues modulo the first `r` primes.
pub struct Garner {
    ps: Vec<u64>,
    /// inv[j][i] = p_i^{-1} mod p_j for i < j.
    inv: Vec<Vec<u64>>,
}

impl Garner {
    pub fn new(r: usize) -> Self {
        let ps: Vec<u64> = primes()[..r].iter().map(|q| q.p).collect();
        let inv = (0..r)
            .map(|j| (0..j).map(|i| powmod(ps[i] % ps[j], ps[j] - 2, ps[j])).collect())
            .collect();
        Garner { ps, inv }
    }

    /// Number of primes whose product exceeds 2^(bits + 1).
    pub fn primes_for_bits(bits: f64) -> usize {
        let mut acc = 0.0;
        for (i, q) in primes().iter().enumerate() {
            acc += (q.p as f64).log2();
            if acc > bits + 1.0 {
                return i + 1;
            }
        }
        panic!("coefficient bound of {bits} bits exceeds the prime table");
    }

    fn digits(&self, residues: &[u64]) -> Vec<u64> {
        let r = self.ps.len();
        let mut v = vec![0u64; r];
        for j in 0..r {
            let pj = self.ps[j];
            let mut x = residues[j];
            for i in 0..j {
                let vi = v[i] % pj;
                x = if x >= vi { x - vi } else { x + pj - vi };
                x = mulmod(x, self.inv[j][i], pj);
            }
            v[j] = x;
        }
        v
    }

    /// Balanced representative: returns (negative, digits of |x|) where the
    /// digits of |x| - [negative] are given in mixed radix.
    fn signed_digits(&self, residues: &[u64]) -> (bool, Vec<u64>) {
        let v = self.digits(residues);
        // floor(P/2) has every digit (p_i - 1)/2.
        let mut greater = false;
        for i in (0..v.len()).rev() {
            let h = (self.ps[i] - 1) / 2;
            if v[i] != h {
                greater = v[i] > h;
                break;
            }
        }
        if greater {
            // P - 1 - x, digitwise.
            (true, v.iter().zip(&self.ps).map(|(d, p)| p - 1 - d).collect())
        } else {
            (false, v)
        }
    }

    /// Signed integer with |x| < P/2 from its residues (canonical form).
    pub fn to_bigint(&self, residues: &[u64]) -> BigInt {
        let (neg, d) = self.signed_digits(residues);
        let mut x = BigInt::zero();
        for i in (0..d.len()).rev() {
            x = x * self.ps[i] + d[i];
        }
        if neg {
            -(x + 1u32)
        } else {
            x
        }
    }

    /// Same value rounded to f64.
    pub fn to_f64(&self, residues: &[u64]) -> f64 {
        let (neg, d) = self.signed_digits(residues);
        let mut x = 0.0f64;
        for i in (0..d.len()).rev() {
            x = x * self.ps[i] as f64 + d[i] as f64;
        }
        if neg {
            -(x + 1.0)
        } else {
            x
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_table() {
        let ps = primes();
        assert!(ps.len() >= 8);
        for q in ps {
            assert!(q.p < (1 << 62) && q.p > (1 << 61));
            assert_eq!((q.p - 1) % (1 << TWO_ADICITY), 0);
            assert_eq!(powmod(q.g, (q.p - 1) / 2, q.p), q.p - 1);
        }
    }

    #[test]
    fn montgomery_roundtrip() {
        let q = &primes()[0];
        for a in [0u64, 1, 2, 12345, q.p - 1] {
            assert_eq!(q.from_mont(q.to_mont(a)), a);
        }
        let (a, b) = (987654321987654321u64 % q.p, 123456789123456789u64 % q.p);
        assert_eq!(q.from_mont(q.mul(q.to_mont(a), q.to_mont(b))), mulmod(a, b, q.p));
    }

    #[test]
    fn convolution_matches_schoolbook() {
        let q = &primes()[1];
        let a: Vec<i128> = (0..37).map(|i| (i * i) as i128 - 50).collect();
        let b: Vec<i128> = (0..37).map(|i| 3 - (i as i128) * 7).collect();
        let n = 37;
        let m = Multiplier::new(q, n);
        let am: Vec<u64> = a.iter().map(|&x| q.from_i128(x)).collect();
        let bm: Vec<u64> = b.iter().map(|&x| q.from_i128(x)).collect();
        let c = m.mul(&am, &bm, n);
        for k in 0..n {
            let want: i128 = (0..=k).map(|i| a[i] * b[k - i]).sum();
            assert_eq!(q.from_mont(c[k]), want.rem_euclid(q.p as i128) as u64);
        }
    }

    #[test]
    fn garner_signed() {
        let g = Garner::new(3);
        for x in [0i128, 1, -1, 10i128.pow(30), -(10i128.pow(35)) + 17] {
            let res: Vec<u64> = primes()[..3]
                .iter()
                .map(|q| x.rem_euclid(q.p as i128) as u64)
                .collect();
            assert_eq!(g.to_bigint(&res), BigInt::from(x));
            assert!((g.to_f64(&res) - x as f64).abs() <= 1e-15 * (x as f64).abs());
        }
    }
}
