//! The fixed form g, read from a plain-text coefficient file:
//!
//! ```text
//! weight 12
//! level 1
//! count 3
//! 1 1
//! 2 -0.5303300858899106
//! 3 0.8283...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::eigen::Eigenform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NewformRecord {
    pub weight: u32,
    pub level: u64,
    /// C_g(m) at index m; index 0 is unused and set to 0.
    pub coeffs: Vec<f64>,
    /// Non-fatal findings from the invariant checks.
    pub warnings: Vec<String>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn num_divisors(m: u64) -> u64 {
    (1..=m).take_while(|d| d * d <= m).filter(|d| m % d == 0).map(|d| if d * d == m { 1 } else { 2 }).sum()
}

impl NewformRecord {
    /// Checks C(1) = 1 and records every m coprime to the level with
    /// |C(m)| > d(m) as a Ramanujan violation warning.
    pub fn new(weight: u32, level: u64, coeffs: Vec<f64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Parse("level must be positive".into()));
        }
        let c1 = coeffs.get(1).copied().unwrap_or(0.0);
        if (c1 - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(c1));
        }
        let mut warnings = Vec::new();
        for (m, c) in coeffs.iter().enumerate().skip(1) {
            let m = m as u64;
            if !c.is_finite() {
                return Err(Error::Parse(format!("C({m}) is not finite")));
            }
            if gcd(m, level) == 1 && c.abs() > num_divisors(m) as f64 + 1e-9 {
                warnings.push(format!("Ramanujan violation: |C({m})| = {} > d({m})", c.abs()));
            }
        }
        Ok(NewformRecord { weight, level, coeffs, warnings })
    }

    pub fn from_eigenform(f: &Eigenform) -> Self {
        NewformRecord { weight: f.weight, level: 1, coeffs: f.c.clone(), warnings: Vec::new() }
    }

    /// Largest m with C(m) available.
    pub fn max_index(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn require(&self, m: usize) -> Result<()> {
        if self.max_index() < m {
            return Err(Error::InsufficientCoefficients { need: m, have: self.max_index() });
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "weight {}", self.weight);
        let _ = writeln!(s, "level {}", self.level);
        let _ = writeln!(s, "count {}", self.max_index());
        for (m, c) in self.coeffs.iter().enumerate().skip(1) {
            let _ = writeln!(s, "{m} {c:e}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<u64> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing `{key}` line")))?;
            let mut it = line.split_whitespace();
            if it.next() != Some(key) {
                return Err(Error::Parse(format!("expected `{key} <value>`, got `{line}`")));
            }
            it.next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad value in `{line}`")))
        };
        let weight = header("weight")? as u32;
        let level = header("level")?;
        let count = header("count")? as usize;
        let mut coeffs = vec![f64::NAN; count + 1];
        coeffs[0] = 0.0;
        let mut seen = 0usize;
        for line in lines {
            let mut it = line.split_whitespace();
            let (m, c) = match (it.next(), it.next(), it.next()) {
                (Some(m), Some(c), None) => (m, c),
                _ => return Err(Error::Parse(format!("bad coefficient line `{line}`"))),
            };
            let m: usize = m.parse().map_err(|_| Error::Parse(format!("bad index `{m}`")))?;
            let c: f64 = c.parse().map_err(|_| Error::Parse(format!("bad value `{c}`")))?;
            if m == 0 || m > count {
                return Err(Error::Parse(format!("index {m} outside 1..={count}")));
            }
            coeffs[m] = c;
            seen += 1;
        }
        if seen != count || coeffs.iter().any(|c| c.is_nan()) {
            return Err(Error::Parse(format!("expected {count} distinct coefficient lines, got {seen}")));
        }
        NewformRecord::new(weight, level, coeffs)
    }
}

pub fn load_newform(path: impl AsRef<Path>) -> Result<NewformRecord> {
    let text = std::fs::read_to_string(path)?;
    NewformRecord::parse(&text)
}

pub fn write_newform(path: impl AsRef<Path>, rec: &NewformRecord) -> Result<()> {
    std::fs::write(path, rec.to_text())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let rec = NewformRecord::new(12, 1, vec![0.0, 1.0, -0.5303300858899106, 0.1]).unwrap();
        let back = NewformRecord::parse(&rec.to_text()).unwrap();
        assert_eq!(rec, back);
    }

    #[test]
    fn not_normalized() {
        let err = NewformRecord::parse("weight 12\nlevel 1\ncount 2\n1 0\n2 0.1\n").unwrap_err();
        assert!(err.to_string().contains("not normalized"));
    }

    #[test]
    fn ramanujan_warning() {
        let rec = NewformRecord::parse("weight 12\nlevel 1\ncount 2\n1 1\n2 5\n").unwrap();
        assert_eq!(rec.warnings.len(), 1);
        assert!(rec.warnings[0].contains("Ramanujan violation"));
    }

    #[test]
    fn missing_lines() {
        assert!(NewformRecord::parse("weight 12\nlevel 1\ncount 3\n1 1\n2 0\n").is_err());
    }
}
