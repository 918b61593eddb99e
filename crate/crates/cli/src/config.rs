//! Plain-text `key = value` run configuration.
//!
//! Precedence: built-in defaults, then the config file, then `--set` pairs,
//! then command flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use tfm::moments::MomentConfig;
use tfm::numfield::{FieldDescriptor, FieldId};
use tfm::rankin::AfeRoute;
use tfm::specialfn::PrecisionContext;
use tfm::Exec;

pub const KEYS: &[(&str, &str)] = &[
    ("field", "Q"),
    ("precision_bits", "64"),
    ("c_g", "0.25"),
    ("l_tol", "1e-9"),
    ("e_tol", "1e-9"),
    ("m_tol", "1e-12"),
    ("trace_tol", "1e-14"),
    ("cv_tol", "1e-8"),
    ("rhs_tol", "1e-8"),
    ("cmax", "20"),
    ("unit_height", "eps^16"),
    ("g", ""),
    ("out_dir", "tfm-out"),
    ("seed", "0"),
    ("exec", "parallel"),
    ("route", "auto"),
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { values: KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key = value", no + 1))?;
            self.set(k.trim(), v.trim().trim_matches('"'))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            bail!("unknown config key `{key}`");
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| anyhow!("expected key=value, got `{pair}`"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key).parse().map_err(|_| anyhow!("config key `{key}`: cannot parse `{}`", self.get(key)))
    }

    fn tol(&self, key: &str) -> Result<f64> {
        let v: f64 = self.num(key)?;
        if !(v > 0.0) {
            bail!("config key `{key}` must be > 0, got {v}");
        }
        Ok(v)
    }

    /// Checks every key once so that bad values fail before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.field()?;
        self.precision()?;
        self.moment_config()?;
        self.tol("rhs_tol")?;
        self.cmax()?;
        self.num::<u64>("seed")?;
        let field = self.field()?;
        if field.degree == 2 {
            self.unit_height(&field)?;
        }
        Ok(())
    }

    pub fn field(&self) -> Result<FieldDescriptor> {
        Ok(FieldDescriptor::new(FieldId::parse(self.get("field"))?))
    }

    pub fn precision(&self) -> Result<PrecisionContext> {
        Ok(PrecisionContext::new(self.num("precision_bits")?, self.tol("l_tol")?)?)
    }

    pub fn exec(&self) -> Result<Exec> {
        match self.get("exec") {
            "parallel" => Ok(Exec::Parallel),
            "sequential" => Ok(Exec::Sequential),
            other => bail!("exec must be parallel or sequential, got `{other}`"),
        }
    }

    pub fn moment_config(&self) -> Result<MomentConfig> {
        let route = match self.get("route") {
            "auto" => AfeRoute::Auto,
            "direct" => AfeRoute::Direct,
            "chebyshev" => AfeRoute::Chebyshev,
            other => bail!("route must be auto, direct or chebyshev, got `{other}`"),
        };
        Ok(MomentConfig {
            c_g: self.tol("c_g")?,
            l_tol: self.tol("l_tol")?,
            e_tol: self.tol("e_tol")?,
            m_tol: self.tol("m_tol")?,
            trace_tol: self.tol("trace_tol")?,
            cv_tol: self.tol("cv_tol")?,
            route,
            exec: self.exec()?,
        })
    }

    pub fn rhs_tol(&self) -> Result<f64> {
        self.tol("rhs_tol")
    }

    pub fn cmax(&self) -> Result<f64> {
        let v: f64 = self.num("cmax")?;
        if !(v >= 1.0) {
            bail!("cmax must be >= 1, got {v}");
        }
        Ok(v)
    }

    /// `eps^t` means the t-th power of the fundamental unit.
    pub fn unit_height(&self, field: &FieldDescriptor) -> Result<f64> {
        parse_height(self.get("unit_height"), field)
    }

    pub fn g_path(&self) -> Result<PathBuf> {
        match self.get("g") {
            "" => bail!("no newform file: pass --g or set g in the config"),
            p => Ok(PathBuf::from(p)),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out_dir"))
    }

    /// Echo in key order.
    pub fn echo(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

pub fn parse_height(s: &str, field: &FieldDescriptor) -> Result<f64> {
    if let Some(t) = s.strip_prefix("eps^") {
        let t: f64 = t.parse().map_err(|_| anyhow!("bad unit height `{s}`"))?;
        let unit = field
            .fundamental_unit_elem()
            .ok_or_else(|| anyhow!("field {} has no fundamental unit", field.id))?;
        let eps = field.embed_f64(&unit).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        return Ok(eps.powf(t));
    }
    let v: f64 = s.parse().map_err(|_| anyhow!("bad unit height `{s}`"))?;
    if !(v >= 1.0) {
        bail!("unit height must be >= 1, got {v}");
    }
    Ok(v)
}
