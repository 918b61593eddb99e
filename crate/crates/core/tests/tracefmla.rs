mod common;

use std::f64::consts::PI;

use common::*;

use proptest::prelude::*;
use tfm::numfield::{FieldDescriptor, FieldId};
use tfm::specialfn::bessel_j;
use tfm::tracefmla::*;
use tfm::Exec;

#[test]
fn q_matches_brute_force() {
    for c in 1..=200u64 {
        for (m, n) in [(1, 1), (1, 2), (3, 5), (0, 7), (-4, 9), (12, -1), (0, 0)] {
            let got = kloosterman_q(m, n, c);
            let want = kloosterman_brute(m, n, c);
            assert!((got - want).abs() < 1e-9, "S({m},{n};{c}) = {got} vs {want}");
        }
    }
    // Ramanujan sums: S(0, n; c) = mu(c) for gcd(n, c) = 1.
    assert!((kloosterman_q(0, 1, 30) + 1.0).abs() < 1e-12);
    assert!(kloosterman_q(0, 1, 12).abs() < 1e-12);
}

#[test]
fn weil_bound() {
    for c in 1..=500u64 {
        for m in 1..=10i64 {
            let t = KloostermanTable::new(m, c);
            for n in 1..=10u64 {
                let s = t.get(n);
                let g = gcd(gcd(m as u64, n), c) as f64;
                let env = divisors(c) as f64 * g.sqrt() * (c as f64).sqrt();
                assert!(s.abs() <= env + 1e-9, "S({n},{m};{c}) = {s} exceeds {env}");
            }
        }
    }
}

#[test]
fn q_crt_multiplicativity() {
    let mut pairs = Vec::new();
    'outer: for c1 in 2..40u64 {
        for c2 in (c1 + 1)..60 {
            if gcd(c1, c2) == 1 && (c1 * 7 + c2 * 3) % 5 == 0 {
                pairs.push((c1, c2));
                if pairs.len() == 50 {
                    break 'outer;
                }
            }
        }
    }
    assert_eq!(pairs.len(), 50);
    for (i, &(c1, c2)) in pairs.iter().enumerate() {
        let (m, n) = (1 + i as i64 % 7, 2 + (3 * i) as i64 % 11);
        let b2 = inverse_mod(c2, c1).unwrap() as i64;
        let b1 = inverse_mod(c1, c2).unwrap() as i64;
        let lhs = kloosterman_q(m, n, c1 * c2);
        let rhs = kloosterman_q(m, n * b2 * b2, c1) * kloosterman_q(m, n * b1 * b1, c2);
        assert!((lhs - rhs).abs() < 1e-9, "c = {c1} * {c2}: {lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn q_symmetric_and_real(m in -50i64..50, n in -50i64..50, c in 1u64..400) {
        let z = kloosterman_q_complex(m, n, c);
        prop_assert!(z.im.abs() < 1e-10);
        prop_assert!((z.re - kloosterman_q(m, n, c)).abs() < 1e-10);
        prop_assert!((kloosterman_q(m, n, c) - kloosterman_q(n, m, c)).abs() < 1e-10);
        // Invariance under m -> m a^2, n -> n a^{-2} for units a.
        let a = (2..c).find(|&a| gcd(a, c) == 1).unwrap_or(1);
        let ai = inverse_mod(a, c).unwrap() as i64;
        let a = a as i64;
        prop_assert!((kloosterman_q(m * a, n * ai, c) - kloosterman_q(m, n, c)).abs() < 1e-9);
    }
}

#[test]
fn nf_matches_brute_force() {
    for id in FIELDS {
        let f = FieldDescriptor::new(id);
        let q = Quad::of(&f);
        let reps = modulus_representatives(&f, 200).unwrap();
        let ideals: u64 = (1..=200).map(|n| f.ideals_of_norm(n)).sum();
        assert_eq!(reps.len() as u64, 4 * ideals);
        for &c in &reps {
            for (alpha, beta) in tp_pairs(id) {
                let query = KloostermanQuery::new(f.elem(alpha.0, alpha.1), f.elem(beta.0, beta.1), f.elem(c.0, c.1));
                let got = kloosterman_nf(&f, &query).unwrap();
                let want = kl_nf_brute(q, c, alpha, beta);
                assert!((got - want).abs() < 1e-9, "{id} c = {c:?}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn nf_crt_multiplicativity() {
    for id in FIELDS {
        let f = FieldDescriptor::new(id);
        let q = Quad::of(&f);
        let reps = modulus_representatives(&f, 60).unwrap();
        let mut checked = 0;
        for (i, &c1) in reps.iter().enumerate().step_by(3) {
            for &c2 in reps[i + 1..].iter().step_by(5) {
                let (n1, n2) = (q.norm(c1).unsigned_abs(), q.norm(c2).unsigned_abs());
                if n1 < 2 || n2 < 2 || gcd(n1, n2) != 1 || checked >= 25 {
                    continue;
                }
                // c2 * a = 1 mod c1 and c1 * b = 1 mod c2.
                let inv = |x: (i64, i64), m: (i64, i64)| {
                    let r = Residues { q, c: m, n: q.norm(m).abs() };
                    let one = r.key((1, 0));
                    r.system().into_iter().find(|&y| r.key(q.mul(x, y)) == one).unwrap()
                };
                let (a, b) = (inv(c2, c1), inv(c1, c2));
                let (alpha, beta) = tp_pairs(id)[2];
                let kl = |al: (i64, i64), be: (i64, i64), c: (i64, i64)| {
                    kloosterman_nf(&f, &KloostermanQuery::new(f.elem(al.0, al.1), f.elem(be.0, be.1), f.elem(c.0, c.1))).unwrap()
                };
                let lhs = kl(alpha, beta, q.mul(c1, c2));
                let rhs = kl(alpha, q.mul(beta, q.mul(a, a)), c1) * kl(alpha, q.mul(beta, q.mul(b, b)), c2);
                assert!((lhs - rhs).abs() < 1e-8, "{id} {c1:?} {c2:?}: {lhs} vs {rhs}");
                checked += 1;
            }
        }
        assert_eq!(checked, 25, "{id}");
    }
}

#[test]
fn nf_rejects_bad_input() {
    let f = FieldDescriptor::new(FieldId::QSqrt5);
    let q = KloostermanQuery::new(f.elem(0, 1), f.one(), f.elem(3, 0));
    assert!(kloosterman_nf(&f, &q).is_err());
    let q = KloostermanQuery::new(f.one(), f.one(), f.elem(0, 0));
    assert!(kloosterman_nf(&f, &q).is_err());
}

/// The level-one formula summed over c in Z \ {0} with constant (-1)^{k/2} pi.
fn rhs_signed(m: u64, n: u64, k: u32, c_max: i64) -> f64 {
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let x = 4.0 * PI * ((m * n) as f64).sqrt();
    let s: f64 = (-c_max..=c_max)
        .filter(|&c| c != 0)
        .map(|c| kloosterman_brute(m as i64, n as i64, c.unsigned_abs()) / c.abs() as f64 * bessel_j(k - 1, x / c.abs() as f64))
        .sum();
    f64::from(u8::from(m == n)) + sign * PI * s
}

#[test]
fn folded_sum_matches_signed_sum() {
    assert_eq!(folded_constant(12), 2.0 * PI);
    assert_eq!(folded_constant(14), -2.0 * PI);
    for (m, n, k) in [(1, 1, 12), (1, 2, 14), (2, 3, 18), (3, 5, 24), (4, 9, 30)] {
        let v = petersson_rhs_q(m, n, k, 120, 1.0).unwrap();
        let w = rhs_signed(m, n, k, 120);
        assert!((v.value - w).abs() < 1e-12, "({m},{n},{k}): {} vs {w}", v.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn petersson_doubling_within_certificate(m in 1u64..8, n in 1u64..8, k in (6u32..20).prop_map(|h| 2 * h)) {
        let c = c_max_for(m, n, k, 1e-10);
        let a = petersson_rhs_q(m, n, k, c, 1e-10).unwrap();
        let b = petersson_rhs_q(m, n, k, 2 * c, 1e-10).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.certificate() + b.rounding_bound);
        let s = petersson_rhs_q(n, m, k, c, 1e-10).unwrap();
        prop_assert!((a.value - s.value).abs() < 1e-12);
    }
}

fn nf_params(k: u32, c_norm: f64, height: f64) -> TraceRhsParams {
    TraceRhsParams { weights: vec![k, k], c_norm_bound: c_norm, unit_height_bound: height, tol: 1e-6 }
}

#[test]
fn nf_rhs_symmetries() {
    for id in FIELDS {
        let f = FieldDescriptor::new(id);
        let (nu, xi) = match id {
            FieldId::QSqrt5 => (f.elem(1, 1), f.elem(2, 0)),
            _ => (f.elem(2, 1), f.elem(3, 0)),
        };
        let p = nf_params(24, 60.0, 1e8);
        let a = petersson_rhs_nf(&f, &nu, &xi, &p, Exec::Parallel).unwrap();
        let b = petersson_rhs_nf(&f, &xi, &nu, &p, Exec::Sequential).unwrap();
        assert!((a.value - b.value).abs() < 1e-10, "{id}: {} vs {}", a.value, b.value);

        // Unit translates of nu give the same sum over eta.
        let eps = f.fundamental_unit_elem().unwrap();
        let eta = eps.clone() * eps;
        let c = petersson_rhs_nf(&f, &(eta * nu.clone()), &xi, &p, Exec::Parallel).unwrap();
        assert!((a.value - c.value).abs() <= a.certificate() + c.certificate(), "{id}");
    }
}

#[test]
fn nf_rhs_unit_truncation() {
    // At (30, 30) every unit translate past the identity is negligible.
    let f = FieldDescriptor::new(FieldId::QSqrt5);
    let one = f.one();
    let eps4 = f.embed_f64(&f.fundamental_unit_elem().unwrap())[0].powi(4);
    let a = petersson_rhs_nf(&f, &one, &one, &nf_params(30, 60.0, 1.0), Exec::Parallel).unwrap();
    let b = petersson_rhs_nf(&f, &one, &one, &nf_params(30, 60.0, eps4 * 1.0001), Exec::Parallel).unwrap();
    assert_eq!(a.units, 1);
    assert!(b.units > 1);
    assert!((a.value - b.value).abs() < 1e-8);
    assert!((a.value - 1.0).abs() < 0.1);
    let q = FieldDescriptor::new(FieldId::QSqrt2);
    assert!(petersson_rhs_nf(&q, &q.elem(0, 1), &q.one(), &nf_params(20, 10.0, 10.0), Exec::Parallel).is_err());
}

#[test]
fn unit_sums_are_geometric() {
    for id in FIELDS {
        let f = FieldDescriptor::new(id);
        let e = f.embed_f64(&f.fundamental_unit_elem().unwrap())[0];
        for lambda in [0.5, 1.0, 2.0] {
            for t in 1..6 {
                let h = e.powi(2 * t) * 1.0001;
                let s = unit_sum_tail(&f, lambda, h).unwrap();
                assert_eq!(s.terms, 2 * t as usize + 1);
                let rho = e.powf(-2.0 * lambda);
                let want = 1.0 + 2.0 * (1..=t).map(|j| rho.powi(j)).sum::<f64>();
                assert!((s.partial - want).abs() < 1e-13);
                let full = 1.0 + 2.0 * rho / (1.0 - rho);
                assert!(full - s.partial <= s.tail_bound + 1e-14);
            }
        }
        assert_eq!(unit_sum_tail(&f, 1.0, 1.0).unwrap().partial, 1.0);
        assert!(unit_sum_tail(&f, 0.0, 100.0).unwrap().tail_bound.is_infinite());
        assert!(unit_sum_tail(&f, -1.0, 100.0).is_err());
    }
}
