//! The twisted first moment sum_f omega_f C_f(p) L(f x g, 1/2) over level one
//! eigenforms f of weight k, its diagonal term M and off-diagonal term E, and
//! the recovery of C_g(p) from the identity LHS = M + E.

mod omega;
mod terms;

use std::fmt::Write as _;

pub use omega::{omega_weights, probe_indices, HeldOutCheck, OmegaWeights, HELD_OUT_PAIRS, MAX_CONDITION};
pub use terms::{diagonal_sum, e_term, m_term_direct, m_term_residue, ETruncation, TermValue};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::modforms::{cusp_dim, eigenforms, Eigenform, NewformRecord};
use crate::numfield::FieldDescriptor;
use crate::rankin::{b_coefficients, central_value_series, AfeOptions, AfeRoute, VFunction, VParams};
use crate::specialfn::zeta_laurent_at_center;

/// Numerical settings shared by every term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConfig {
    /// G(u) = exp(c_G u^2).
    pub c_g: f64,
    /// Truncation target per central value.
    pub l_tol: f64,
    /// Truncation target for E.
    pub e_tol: f64,
    /// Truncation target for the diagonal d-sum.
    pub m_tol: f64,
    /// Bessel c-tail target in the Petersson right-hand sides.
    pub trace_tol: f64,
    /// Relative tolerance of the held-out omega check.
    pub cv_tol: f64,
    pub route: AfeRoute,
    pub exec: Exec,
}

impl Default for MomentConfig {
    fn default() -> Self {
        MomentConfig {
            c_g: 0.25,
            l_tol: 1e-9,
            e_tol: 1e-9,
            m_tol: 1e-12,
            trace_tol: 1e-14,
            cv_tol: 1e-8,
            route: AfeRoute::Auto,
            exec: Exec::Parallel,
        }
    }
}

/// One central value in the moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormTerm {
    pub omega: f64,
    pub c_p: f64,
    pub l_value: f64,
    pub l_certificate: f64,
}

/// Everything for one weight k that does not depend on p.
#[derive(Debug, Clone)]
pub struct MomentSetup<'a> {
    pub g: &'a NewformRecord,
    pub k: u32,
    pub config: MomentConfig,
    pub vf: VFunction,
    pub forms: Vec<Eigenform>,
    /// None when S_k = 0.
    pub omega: Option<OmegaWeights>,
    /// Central values L(f x g, 1/2) with certificates, in the order of `forms`.
    pub l_values: Vec<(f64, f64)>,
}

impl<'a> MomentSetup<'a> {
    pub fn new(g: &'a NewformRecord, k: u32, config: MomentConfig) -> Result<Self> {
        let params = VParams::degree_one(k, g.weight, g.level as f64, config.c_g)?;
        if g.level != 1 {
            return Err(Error::Domain("the eigenform family is level one; g must have level 1".into()));
        }
        let vf = VFunction::new(params)?;
        let l_cut = vf.effective_cutoff(config.l_tol);
        let (forms, omega, l_values) = if cusp_dim(k) == 0 {
            (Vec::new(), None, Vec::new())
        } else {
            g.require(l_cut)?;
            let forms = eigenforms(k, (l_cut + 1).max(16), config.exec)?;
            let omega = omega_weights(&forms, &config)?;
            let opts = AfeOptions {
                c_g: config.c_g,
                sigma: None,
                tol: config.l_tol,
                allow_truncated: false,
                route: config.route,
            };
            let l_values = forms
                .iter()
                .map(|f| {
                    let series = b_coefficients(f, g, l_cut)?;
                    let cv = central_value_series(&series, &vf, &opts, config.exec)?;
                    Ok((cv.value, cv.certificate()))
                })
                .collect::<Result<Vec<_>>>()?;
            (forms, Some(omega), l_values)
        };
        Ok(MomentSetup { g, k, config, vf, forms, omega, l_values })
    }

    pub fn form_terms(&self, p: u64) -> Vec<FormTerm> {
        let Some(om) = &self.omega else { return Vec::new() };
        self.forms
            .iter()
            .zip(&om.omega)
            .zip(&self.l_values)
            .map(|((f, &w), &(l, lc))| FormTerm { omega: w, c_p: f.c[p as usize], l_value: l, l_certificate: lc })
            .collect()
    }

    /// sum_f omega_f C_f(p) L(f x g, 1/2); zero for an empty family.
    pub fn lhs(&self, p: u64) -> Result<TermValue> {
        terms::check_twist(self.g, p)?;
        let Some(om) = &self.omega else {
            return Ok(TermValue { value: 0.0, certificate: 0.0, cutoff: 0 });
        };
        let mut value = 0.0;
        let mut cert = 0.0;
        for t in self.form_terms(p) {
            value += t.omega * t.c_p * t.l_value;
            cert += t.c_p.abs() * (t.omega * t.l_certificate + om.solve_bound * (t.l_value.abs() + t.l_certificate));
        }
        cert += 4.0 * f64::EPSILON * value.abs();
        Ok(TermValue { value, certificate: cert, cutoff: self.forms.len() })
    }

    pub fn m_direct(&self, p: u64) -> Result<TermValue> {
        m_term_direct(&self.vf, self.g, p, self.config.m_tol)
    }

    pub fn m_residue(&self, p: u64) -> Result<f64> {
        m_term_residue(self.g, p, self.k)
    }

    pub fn e(&self, p: u64) -> Result<TermValue> {
        self.e_with(p, &ETruncation::new(self.config.e_tol))
    }

    pub fn e_with(&self, p: u64, trunc: &ETruncation) -> Result<TermValue> {
        e_term(&self.vf, self.g, p, self.k, trunc, self.config.exec)
    }

    pub fn report(&self, p: u64) -> Result<MomentReport> {
        let lhs = self.lhs(p)?;
        let m = self.m_direct(p)?;
        let m_res = self.m_residue(p)?;
        let e = self.e(p)?;
        let diag = diagonal_sum(&self.vf, self.vf.params().y_scale() * p as f64, self.g.level, self.config.m_tol);
        let rec = recover_from(p, &lhs, &e, &diag);
        let residual = lhs.value - (m.value + e.value);
        Ok(MomentReport {
            k: self.k,
            p,
            m_direct: m.value,
            m_direct_certificate: m.certificate,
            m_residue: m_res,
            e_value: e.value,
            e_certificate: e.certificate,
            e_cutoff: e.cutoff,
            lhs: lhs.value,
            lhs_certificate: lhs.certificate,
            identity_residual: residual,
            recovered_c: rec.as_ref().map(|r| r.value).unwrap_or(f64::NAN),
            recovered_certificate: rec.as_ref().map(|r| r.certificate).unwrap_or(f64::INFINITY),
            cert_total: lhs.certificate + m.certificate + e.certificate,
        })
    }
}

/// A recovered Hecke eigenvalue with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recovered {
    pub value: f64,
    pub certificate: f64,
}

/// C_g(p) = sqrt(p) (LHS - E) / (2 sum_d V(y p d^2)/d).
fn recover_from(p: u64, lhs: &TermValue, e: &TermValue, diag: &TermValue) -> Result<Recovered> {
    let den = 2.0 * diag.value / (p as f64).sqrt();
    if den.abs() < 1e-8 {
        return Err(Error::DegenerateRecovery(den));
    }
    let num = lhs.value - e.value;
    let value = num / den;
    let num_err = lhs.certificate + e.certificate;
    let den_err = 2.0 * diag.certificate / (p as f64).sqrt();
    let certificate = (num_err + value.abs() * den_err) / (den.abs() - den_err).max(f64::MIN_POSITIVE);
    Ok(Recovered { value, certificate })
}

/// Per-weight record of the moment identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub k: u32,
    pub p: u64,
    pub m_direct: f64,
    pub m_direct_certificate: f64,
    pub m_residue: f64,
    pub e_value: f64,
    pub e_certificate: f64,
    pub e_cutoff: usize,
    pub lhs: f64,
    pub lhs_certificate: f64,
    /// LHS - (M_direct + E).
    pub identity_residual: f64,
    pub recovered_c: f64,
    pub recovered_certificate: f64,
    pub cert_total: f64,
}

impl MomentReport {
    pub fn identity_holds(&self) -> bool {
        self.identity_residual.abs() <= self.cert_total
    }

    pub const CSV_HEADER: &'static str = "k,p,M_direct,M_residue,E,LHS,residual,recovered_C,cert_total";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.k,
            self.p,
            sig15(self.m_direct),
            sig15(self.m_residue),
            sig15(self.e_value),
            sig15(self.lhs),
            sig15(self.identity_residual),
            sig15(self.recovered_c),
            sig15(self.cert_total)
        )
    }
}

/// Decimal rendering with 15 significant digits, in the style of %.15g.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.14e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

/// One weight's MomentReport.
pub fn moment_report(g: &NewformRecord, p: u64, k: u32, cfg: &MomentConfig) -> Result<MomentReport> {
    MomentSetup::new(g, k, *cfg)?.report(p)
}

/// C_g(p) recovered from LHS - E at weight k. Fails when the identity
/// residual exceeds the combined certificate.
pub fn recover_coefficient(g: &NewformRecord, p: u64, k: u32, cfg: &MomentConfig) -> Result<Recovered> {
    let setup = MomentSetup::new(g, k, *cfg)?;
    let r = setup.report(p)?;
    if !r.identity_holds() {
        return Err(Error::Uncertified { what: "moment identity residual".into(), bound: r.identity_residual.abs() });
    }
    let lhs = setup.lhs(p)?;
    let e = setup.e(p)?;
    let diag = diagonal_sum(&setup.vf, setup.vf.params().y_scale() * p as f64, g.level, cfg.m_tol);
    recover_from(p, &lhs, &e, &diag)
}

/// Reports over several weights with the least-squares fit LHS ~ A log k + B.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub p: u64,
    pub reports: Vec<MomentReport>,
    pub slope: f64,
    pub intercept: f64,
    /// 2 C_g(p) gamma_{-1} / sqrt(p).
    pub theoretical_slope: f64,
    pub residuals: Vec<f64>,
}

impl ScanResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", MomentReport::CSV_HEADER);
        for r in &self.reports {
            let _ = writeln!(s, "{}", r.csv_row());
        }
        s
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, r| a.max(r.abs()))
    }
}

/// Least squares y ~ a x + b.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let a = sxy / sxx;
    (a, my - a * mx)
}

/// MomentReports for every k in `ks`, in the given order, with the fit.
pub fn asymptotic_scan(g: &NewformRecord, p: u64, ks: &[u32], cfg: &MomentConfig) -> Result<ScanResult> {
    if ks.len() < 2 {
        return Err(Error::Domain("a scan needs at least two weights".into()));
    }
    let reports = ks.iter().map(|&k| moment_report(g, p, k, cfg)).collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = reports.iter().map(|r| (r.k as f64).ln()).collect();
    let y: Vec<f64> = reports.iter().map(|r| r.lhs).collect();
    let (slope, intercept) = fit_line(&x, &y);
    let residuals = x.iter().zip(&y).map(|(a, b)| b - slope * a - intercept).collect();
    let (gm1, _) = zeta_laurent_at_center(&FieldDescriptor::rationals(), &[]);
    g.require(p as usize)?;
    let theoretical_slope = 2.0 * g.coeffs[p as usize] * gm1 / (p as f64).sqrt();
    Ok(ScanResult { p, reports, slope, intercept, theoretical_slope, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig15_format() {
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(1.0), "1");
        assert_eq!(sig15(-0.5303300858899106), "-0.530330085889911");
        assert_eq!(sig15(123456.789), "123456.789");
        assert_eq!(sig15(1.5e-9), "1.5e-09");
        assert_eq!(sig15(2.0e20), "2e+20");
    }

    #[test]
    fn line_fit_exact() {
        let x = [1.0, 2.0, 3.0];
        let y = [3.0, 5.0, 7.0];
        let (a, b) = fit_line(&x, &y);
        assert!((a - 2.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
    }
}
