//! One function per subcommand. Each returns the CSV text, the certificates
//! for the manifest and, when some number is not certified, the reason.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use tfm::modforms::{cusp_dim, eigenforms, load_newform, write_newform, NewformRecord};
use tfm::moments::{asymptotic_scan, probe_indices, recover_coefficient, sig15, MomentReport, MomentSetup, HELD_OUT_PAIRS};
use tfm::numfield::{FieldDescriptor, FieldElement};
use tfm::rankin::{central_value, v_function_for, AfeOptions, VParams};
use tfm::tracefmla::{
    kloosterman_nf, kloosterman_q, petersson_rhs_nf, petersson_rhs_q, unit_sum_tail, KloostermanQuery,
    TraceRhsParams,
};
use tfm::moments::omega_weights;

use crate::config::{parse_height, RunConfig};

#[derive(Debug, Default)]
pub struct Outcome {
    pub csv: String,
    /// One line per certified quantity, copied into the manifest.
    pub certificates: Vec<String>,
    /// Human-readable summary printed to stderr.
    pub notes: Vec<String>,
    pub failure: Option<String>,
}

impl Outcome {
    fn with_header(header: &str) -> Self {
        Outcome { csv: format!("{header}\n"), ..Default::default() }
    }

    fn row(&mut self, row: String) {
        self.csv.push_str(&row);
        self.csv.push('\n');
    }

    fn fail(&mut self, msg: String) {
        if self.failure.is_none() {
            self.failure = Some(msg);
        }
    }
}

/// `14:60:2`, `20,30` or `16`.
pub fn parse_weights(s: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = s.split(':').collect();
    let out: Vec<u32> = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step): (u32, u32, u32) = (a.parse()?, b.parse()?, step.parse()?);
            if step == 0 || a > b {
                bail!("bad weight range `{s}`");
            }
            (a..=b).step_by(step as usize).collect()
        }
        [a, b] => (a.parse::<u32>()?..=b.parse::<u32>()?).step_by(2).collect(),
        _ => s.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>()?,
    };
    if out.is_empty() {
        bail!("empty weight list `{s}`");
    }
    Ok(out)
}

/// `a` or `a,b` for a + b omega.
pub fn parse_element(field: &FieldDescriptor, s: &str) -> Result<FieldElement> {
    let coords: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| anyhow!("bad element `{s}`: expected a or a,b"))?;
    match coords.as_slice() {
        [a] => Ok(field.elem(*a, 0)),
        [a, b] if field.degree == 2 => Ok(field.elem(*a, *b)),
        _ => bail!("bad element `{s}` for field {}", field.id),
    }
}

fn element_label(x: &FieldElement) -> String {
    match x.as_ints() {
        Some((a, 0)) => a.to_string(),
        Some((a, b)) => format!("{a};{b}"),
        None => x.to_string(),
    }
}

pub fn load_g(cfg: &RunConfig) -> Result<NewformRecord> {
    let path = cfg.g_path()?;
    let g = load_newform(&path).with_context(|| format!("loading newform {}", path.display()))?;
    Ok(g)
}

pub fn trace_check(cfg: &RunConfig, weights: &[u32]) -> Result<Outcome> {
    let mcfg = cfg.moment_config()?;
    let mut out = Outcome::with_header("k,m,n,lhs,rhs,abs_diff,rhs_certificate,solve_bound,condition");
    for &k in weights {
        let d = cusp_dim(k);
        if d == 0 {
            out.notes.push(format!("k = {k}: S_k = 0, skipped"));
            continue;
        }
        let len = (*probe_indices(d).last().unwrap_or(&1) as usize).max(9) + 2;
        let forms = eigenforms(k, len, mcfg.exec)?;
        let om = match omega_weights(&forms, &mcfg) {
            Ok(om) => om,
            Err(e) => {
                out.fail(format!("k = {k}: {e}"));
                continue;
            }
        };
        for h in &om.held_out {
            let diff = (h.lhs - h.rhs).abs();
            out.row(format!(
                "{k},{},{},{},{},{},{},{},{}",
                h.m,
                h.n,
                sig15(h.lhs),
                sig15(h.rhs),
                sig15(diff),
                sig15(h.rhs_certificate),
                sig15(om.solve_bound),
                sig15(om.condition_estimate)
            ));
            out.certificates.push(format!("k={k} (m,n)=({},{}) rhs_certificate={:e}", h.m, h.n, h.rhs_certificate));
            if diff > mcfg.cv_tol * h.rhs.abs().max(1.0) {
                out.fail(format!("k = {k}, (m, n) = ({}, {}): |lhs - rhs| = {diff:e}", h.m, h.n));
            }
        }
        out.notes.push(format!(
            "k = {k}: dim {d}, sum omega = {}, {} held-out pairs checked",
            sig15(om.total()),
            HELD_OUT_PAIRS.len()
        ));
    }
    Ok(out)
}

pub fn afe(cfg: &RunConfig, k: u32, c_gs: &[f64], sigmas: &[Option<f64>]) -> Result<Outcome> {
    let g = load_g(cfg)?;
    let mcfg = cfg.moment_config()?;
    let tol = mcfg.l_tol;
    let mut need = 0usize;
    for &cg in c_gs {
        for &s in sigmas {
            let vf = v_function_for(VParams::degree_one(k, g.weight, g.level as f64, cg)?, s)?;
            need = need.max(vf.effective_cutoff(tol));
        }
    }
    g.require(need)?;
    let forms = eigenforms(k, need + 1, mcfg.exec)?;
    let mut out = Outcome::with_header("k,l,form,c_G,sigma,value,terms,certificate");
    for (i, f) in forms.iter().enumerate() {
        let mut values = Vec::new();
        for &cg in c_gs {
            for &s in sigmas {
                let opts = AfeOptions { c_g: cg, sigma: s, tol, allow_truncated: false, route: mcfg.route };
                let cv = central_value(f, &g, &opts, mcfg.exec)?;
                let sig = s.map(sig15).unwrap_or_else(|| "auto".into());
                out.row(format!(
                    "{k},{},{i},{},{sig},{},{},{}",
                    g.weight,
                    sig15(cg),
                    sig15(cv.value),
                    cv.terms,
                    sig15(cv.certificate())
                ));
                out.certificates.push(format!("form {i} c_G={cg} sigma={sig} certificate={:e}", cv.certificate()));
                if cv.certificate() > tol * cv.value.abs().max(1.0) {
                    out.fail(format!("form {i}, c_G = {cg}: certificate {:e} exceeds l_tol", cv.certificate()));
                }
                values.push(cv.value);
            }
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        out.notes.push(format!("form {i}: relative spread over G and contours {:.3e}", (hi - lo) / scale));
    }
    Ok(out)
}

pub fn kloosterman(cfg: &RunConfig, m: &str, n: &str, c: &str) -> Result<Outcome> {
    let field = cfg.field()?;
    let mut out = Outcome::with_header("field,m,n,c,value,rounding_bound");
    let (value, terms, labels) = if field.degree == 1 {
        let (m, n): (i64, i64) = (m.trim().parse()?, n.trim().parse()?);
        let c: u64 = c.trim().parse().map_err(|_| anyhow!("modulus must be a positive integer"))?;
        if c == 0 {
            bail!("modulus must be nonzero");
        }
        (kloosterman_q(m, n, c), c as f64, (m.to_string(), n.to_string(), c.to_string()))
    } else {
        let (a, b, cc) = (parse_element(&field, m)?, parse_element(&field, n)?, parse_element(&field, c)?);
        let norm = cc.norm().to_string().parse::<f64>().unwrap_or(f64::INFINITY).abs();
        let v = kloosterman_nf(&field, &KloostermanQuery::new(a.clone(), b.clone(), cc.clone()))?;
        (v, norm, (element_label(&a), element_label(&b), element_label(&cc)))
    };
    let rounding = 4.0 * terms * f64::EPSILON;
    out.row(format!("{},{},{},{},{},{}", field.id, labels.0, labels.1, labels.2, sig15(value), sig15(rounding)));
    out.certificates.push(format!("rounding_bound={rounding:e}"));
    Ok(out)
}

pub fn rhs_nf(cfg: &RunConfig, k: &str, nu: &str, xi: &str) -> Result<Outcome> {
    let field = cfg.field()?;
    let tol = cfg.rhs_tol()?;
    let cmax = cfg.cmax()?;
    let weights = parse_weights(k)?;
    let mut out = Outcome::with_header("field,k,nu,xi,cmax,B,value,c_tail,eta_tail,rounding,certificate");
    let klabel = weights.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
    if field.degree == 1 {
        let [k] = weights.as_slice() else { bail!("field Q takes a single weight") };
        let (m, n): (u64, u64) = (nu.trim().parse()?, xi.trim().parse()?);
        let r = petersson_rhs_q(m, n, *k, cmax as u64, tol)?;
        out.row(format!(
            "Q,{klabel},{m},{n},{},-,{},{},0,{},{}",
            r.c_max,
            sig15(r.value),
            sig15(r.tail_bound),
            sig15(r.rounding_bound),
            sig15(r.certificate())
        ));
        out.certificates.push(format!("c_tail={:e} rounding={:e}", r.tail_bound, r.rounding_bound));
        return Ok(out);
    }
    let height = cfg.unit_height(&field)?;
    let (a, b) = (parse_element(&field, nu)?, parse_element(&field, xi)?);
    let params = TraceRhsParams { weights, c_norm_bound: cmax, unit_height_bound: height, tol };
    let r = petersson_rhs_nf(&field, &a, &b, &params, cfg.exec()?)?;
    out.row(format!(
        "{},{klabel},{},{},{},{},{},{},{},{},{}",
        field.id,
        element_label(&a),
        element_label(&b),
        sig15(cmax),
        sig15(height),
        sig15(r.value),
        sig15(r.c_tail),
        sig15(r.eta_tail),
        sig15(r.rounding),
        sig15(r.certificate())
    ));
    out.certificates.push(format!("c_tail={:e} eta_tail={:e} rounding={:e}", r.c_tail, r.eta_tail, r.rounding));
    out.notes.push(format!("{} modulus classes, {} units", r.c_classes, r.units));
    Ok(out)
}

pub fn units(cfg: &RunConfig, lambda0: f64, heights: &[String]) -> Result<Outcome> {
    let field = cfg.field()?;
    let mut out = Outcome::with_header("field,lambda0,height,partial,tail_bound,terms");
    for h in heights {
        let b = parse_height(h, &field)?;
        let s = unit_sum_tail(&field, lambda0, b)?;
        out.row(format!(
            "{},{},{h},{},{},{}",
            field.id,
            sig15(lambda0),
            sig15(s.partial),
            sig15(s.tail_bound),
            s.terms
        ));
        out.certificates.push(format!("height {h}: tail_bound={:e}", s.tail_bound));
        if !s.tail_bound.is_finite() {
            out.fail(format!("height {h}: unit sum tail is not bounded (lambda0 = {lambda0})"));
        }
    }
    Ok(out)
}

fn push_report(out: &mut Outcome, r: &MomentReport) {
    out.row(r.csv_row());
    out.certificates.push(format!(
        "k={} p={} lhs={:e} M={:e} E={:e} total={:e} E_cutoff={}",
        r.k, r.p, r.lhs_certificate, r.m_direct_certificate, r.e_certificate, r.cert_total, r.e_cutoff
    ));
    if !r.identity_holds() {
        out.fail(format!(
            "k = {}, p = {}: identity residual {:e} exceeds certificate {:e}",
            r.k, r.p, r.identity_residual, r.cert_total
        ));
    }
}

pub fn moment(cfg: &RunConfig, k: u32, p: u64) -> Result<Outcome> {
    let g = load_g(cfg)?;
    let setup = MomentSetup::new(&g, k, cfg.moment_config()?)?;
    let r = setup.report(p)?;
    let mut out = Outcome::with_header(MomentReport::CSV_HEADER);
    push_report(&mut out, &r);
    Ok(out)
}

pub fn scan(cfg: &RunConfig, ks: &[u32], p: u64) -> Result<Outcome> {
    let g = load_g(cfg)?;
    let s = asymptotic_scan(&g, p, ks, &cfg.moment_config()?)?;
    let mut out = Outcome::with_header(MomentReport::CSV_HEADER);
    for r in &s.reports {
        push_report(&mut out, r);
    }
    out.notes.push(format!(
        "fit LHS = A log k + B: A = {}, B = {}, theoretical A = {}, max |residual| = {}",
        sig15(s.slope),
        sig15(s.intercept),
        sig15(s.theoretical_slope),
        sig15(s.max_abs_residual())
    ));
    let max_e = s.reports.iter().map(|r| r.e_value.abs()).fold(0.0, f64::max);
    out.notes.push(format!("max |E| = {}", sig15(max_e)));
    Ok(out)
}

pub fn recover(cfg: &RunConfig, ks: &[u32], p: u64, candidates: &[String]) -> Result<Outcome> {
    let g = load_g(cfg)?;
    let mcfg = cfg.moment_config()?;
    g.require(p as usize)?;
    let target = g.coeffs[p as usize];
    let mut cands = Vec::new();
    for path in candidates {
        let h = load_newform(path).with_context(|| format!("loading candidate {path}"))?;
        h.require(p as usize)?;
        cands.push((path.clone(), h.coeffs[p as usize]));
    }
    let mut out = Outcome::with_header("k,p,recovered_C,certificate,C_g");
    for &k in ks {
        let rec = recover_coefficient(&g, p, k, &mcfg)?;
        out.row(format!("{k},{p},{},{},{}", sig15(rec.value), sig15(rec.certificate), sig15(target)));
        out.certificates.push(format!("k={k} recovered certificate={:e}", rec.certificate));
        if cands.len() >= 2 {
            let mut d: Vec<(f64, &str)> = cands.iter().map(|(n, c)| ((rec.value - c).abs(), n.as_str())).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            out.notes.push(format!(
                "k = {k}: closest candidate {} (distance {}), margin {}",
                d[0].1,
                sig15(d[0].0),
                sig15(d[1].0 - d[0].0)
            ));
        }
    }
    Ok(out)
}

pub fn newform(cfg: &RunConfig, k: u32, len: usize, index: usize, path: &Path) -> Result<Outcome> {
    let forms = eigenforms(k, len + 1, cfg.exec()?)?;
    let f = forms
        .get(index)
        .ok_or_else(|| anyhow!("weight {k} has {} eigenforms, index {index} out of range", forms.len()))?;
    let rec = NewformRecord::from_eigenform(f);
    write_newform(path, &rec)?;
    let mut out = Outcome::with_header("k,index,count,C2,path");
    let c2 = rec.coeffs.get(2).copied().unwrap_or(f64::NAN);
    out.row(format!("{k},{index},{},{},{}", rec.max_index(), sig15(c2), path.display()));
    let mut note = String::new();
    let _ = write!(note, "wrote {} coefficients of eigenform {index} in S_{k}", rec.max_index());
    out.notes.push(note);
    Ok(out)
}
