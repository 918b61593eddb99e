use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use tfm::modforms::{dim_one_eigenforms, Eigenform, NewformRecord};
use tfm::rankin::*;
use tfm::specialfn::{lgamma_c, ln_gamma};
use tfm::Exec;

/// V(y) on the line Re u = 1 by composite Simpson over |t| <= 12 / sqrt(c_G).
fn v_oracle(y: f64, k: u32, l: u32, c_g: f64) -> f64 {
    let a = [(k as f64 - l as f64 + 1.0) / 2.0, (k as f64 + l as f64 - 1.0) / 2.0];
    let f = |t: f64| {
        let u = Complex64::new(1.0, t);
        let lg: Complex64 = a.iter().map(|&x| lgamma_c(u + x) - ln_gamma(x)).sum();
        (lg - u * y.ln() + c_g * u * u - u.ln()).exp().re
    };
    let t_max = 12.0 / c_g.sqrt();
    let n = 20_000;
    let h = 2.0 * t_max / n as f64;
    let mut s = f(-t_max) + f(t_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(-t_max + i as f64 * h);
    }
    s * h / 3.0 / (2.0 * PI)
}

fn d4(mut m: u64) -> f64 {
    let mut out = 1.0;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        let e = e as f64;
        out *= (e + 1.0) * (e + 2.0) * (e + 3.0) / 6.0;
        p += 1;
    }
    if m > 1 {
        out *= 4.0;
    }
    out
}

fn forms() -> &'static (Vec<Eigenform>, NewformRecord) {
    static F: OnceLock<(Vec<Eigenform>, NewformRecord)> = OnceLock::new();
    F.get_or_init(|| {
        let fam = dim_one_eigenforms(&[12, 16, 22], (1 << 18) + 1, Exec::Parallel);
        let g = NewformRecord::from_eigenform(&fam[0]);
        (fam, g)
    })
}

#[test]
fn b_matches_double_loop() {
    let (fam, g) = forms();
    for f in fam {
        let s = b_coefficients(f, g, 400).unwrap();
        assert_eq!(s.b[1], 1.0);
        assert!((s.b[4] - (f.c[4] * g.coeffs[4] + 1.0)).abs() < 1e-15);
        for m in 1..=400usize {
            let mut want = 0.0;
            for d in 1..=m {
                for e in 1..=m {
                    if d * d * e == m {
                        want += f.c[e] * g.coeffs[e];
                    }
                }
            }
            assert!((s.b[m] - want).abs() < 1e-12, "m = {m}");
        }
    }
    assert!(b_coefficients(&fam[0], g, 300_000).is_err());
}

#[test]
fn v_matches_independent_quadrature() {
    for (k, l, c) in [(14u32, 12u32, 1.0), (16, 12, 1.0), (22, 12, 0.5), (30, 16, 0.25), (16, 12, 2.0)] {
        let vf = VFunction::new(VParams::degree_one(k, l, 1.0, c).unwrap()).unwrap();
        for y in [0.05, 1.0, 3.7, 40.0, 500.0, 5000.0] {
            let got = vf.eval(y);
            let want = v_oracle(y, k, l, c);
            assert!((got.value - want).abs() < 1e-10, "k={k} l={l} c={c} y={y}: {} vs {want}", got.value);
            assert!(got.bound < 1e-10);
        }
    }
}

#[test]
fn v_limits() {
    let p = VParams::degree_one(14, 12, 1.0, 1.0).unwrap();
    let v = v_function(1e-8, &p, 1e-12).unwrap();
    assert!((v.value - 1.0).abs() < 1e-4);
    let v = v_function(10.0 * 14.0 * 14.0, &p, 1e-12).unwrap();
    assert!(v.value.abs() <= 0.05);
    assert!(v_function(0.0, &p, 1e-12).is_err());
    assert!(matches!(VParams::degree_one(12, 12, 1.0, 1.0), Err(tfm::Error::WeightConstraint { k: 12, l: 12 })));
}

#[test]
fn cutoff_examples() {
    let vf = VFunction::new(VParams::degree_one(14, 12, 1.0, 1.0).unwrap()).unwrap();
    let m = vf.effective_cutoff(1e-8);
    assert!((1_000..100_000).contains(&m), "M = {m}");
    assert_eq!(vf.effective_cutoff(f64::INFINITY), 1);
    // Direct summation of the tail the cutoff is meant to bound.
    let ys = vf.params().y_scale();
    let direct: f64 = ((m + 1)..(8 * m))
        .map(|n| 2.0 * d4(n as u64) / (n as f64).sqrt() * vf.eval(ys * n as f64).value.abs())
        .sum();
    assert!(direct < 1e-8, "direct tail {direct:e}");
    assert!(vf.afe_tail(m) < 1e-8 && vf.afe_tail(m - 1) >= 1e-8);

    for (k1, k2) in [(20u32, 40u32), (30, 60)] {
        let a = VFunction::new(VParams::degree_one(k1, 12, 1.0, 1.0).unwrap()).unwrap().effective_cutoff(1e-8);
        let b = VFunction::new(VParams::degree_one(k2, 12, 1.0, 1.0).unwrap()).unwrap().effective_cutoff(1e-8);
        let r = b as f64 / a as f64;
        assert!((3.0..=6.0).contains(&r), "M({k2})/M({k1}) = {r}");
    }
}

#[test]
fn central_value_stability() {
    let (fam, g) = forms();
    let f = &fam[1];
    let base = AfeOptions { c_g: 1.0, sigma: None, tol: 1e-8, allow_truncated: false, route: AfeRoute::Direct };
    let cv = central_value(f, g, &base, Exec::Parallel).unwrap();
    let vf = VFunction::new(VParams::degree_one(16, 12, 1.0, 1.0).unwrap()).unwrap();
    let double = b_coefficients(f, g, 2 * cv.terms).unwrap();
    let opts = AfeOptions { tol: 1e-300, allow_truncated: true, ..base };
    let cv2 = central_value_series(&double, &vf, &opts, Exec::Parallel).unwrap();
    assert_eq!(cv2.terms, 2 * cv.terms);
    assert!((cv.value - cv2.value).abs() < 1e-8);
    assert!(cv.certificate() < 1e-8);

    let c2 = central_value(f, g, &AfeOptions { c_g: 2.0, tol: 1e-8, allow_truncated: true, ..base }, Exec::Parallel).unwrap();
    assert!((c2.value - cv.value).abs() < 1e-8, "{} vs {}", c2.value, cv.value);
}

#[test]
fn routes_agree() {
    let (fam, g) = forms();
    let f = &fam[2];
    let vf = VFunction::new(VParams::degree_one(22, 12, 1.0, 1.0).unwrap()).unwrap();
    let s = b_coefficients(f, g, 20_000).unwrap();
    let w: Vec<f64> = s.b.iter().enumerate().map(|(m, b)| if m == 0 { 0.0 } else { b / (m as f64).sqrt() }).collect();
    let d = weighted_v_sum(&w, &vf, AfeRoute::Direct, Exec::Parallel);
    let c = weighted_v_sum(&w, &vf, AfeRoute::Chebyshev, Exec::Parallel);
    assert!((d.value - c.value).abs() <= d.bound + c.bound);
    assert!((d.value - c.value).abs() < 1e-10);
    let seq = weighted_v_sum(&w, &vf, AfeRoute::Direct, Exec::Sequential);
    assert_eq!(seq.value, d.value);
}

#[test]
fn central_values_nonnegative_report() {
    let (fam, g) = forms();
    let opts = AfeOptions { c_g: 1.0, sigma: None, tol: 1e-9, allow_truncated: false, route: AfeRoute::Auto };
    for f in &fam[1..] {
        let cv = central_value(f, g, &opts, Exec::Parallel).unwrap();
        if cv.value < -1e-6 {
            eprintln!("warning: L(f x Delta, 1/2) = {} < 0 at k = {}", cv.value, f.weight);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn contour_independence(k in (7u32..25).prop_map(|h| 2 * h), ly in 3.6f64..12.0, c in 0.5f64..2.0) {
        // ln y >= ln(4 pi^2), the arguments of the level-one AFE.
        let p = VParams::degree_one(k, 12, 1.0, c).unwrap();
        let y = ly.exp();
        let auto = VFunction::new(p.clone()).unwrap().eval(y);
        for s in [1.0, 1.5, 2.0] {
            let v = VFunction::with_sigma(p.clone(), s).unwrap().eval(y);
            prop_assert!((v.value - auto.value).abs() < 1e-9 * auto.value.abs().max(1.0), "{} vs {}", v.value, auto.value);
        }
    }

    #[test]
    fn contours_agree_within_certificates(k in (7u32..25).prop_map(|h| 2 * h), ly in -3f64..12.0, c in 0.5f64..2.0) {
        let p = VParams::degree_one(k, 12, 1.0, c).unwrap();
        let y = ly.exp();
        let auto = VFunction::new(p.clone()).unwrap().eval(y);
        for s in [1.0, 1.5, 2.0] {
            let v = VFunction::with_sigma(p.clone(), s).unwrap().eval(y);
            prop_assert!((v.value - auto.value).abs() <= v.bound + auto.bound);
        }
    }

    #[test]
    fn v_tends_to_one_for_every_g(k in (8u32..20).prop_map(|h| 2 * h), c in 0.3f64..2.0) {
        let vf = VFunction::new(VParams::degree_one(k, 12, 1.0, c).unwrap()).unwrap();
        prop_assert!((vf.eval(1e-12).value - 1.0).abs() < 1e-5);
    }
}
