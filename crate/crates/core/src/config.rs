//! Run configuration: defaults, `key = value` files and validation.
//!
//! ```text
//! # comments and blank lines are ignored
//! mu = 1
//! d = 2
//! seed = 7
//! tol.parseval = 1e-8
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::cutoff::Cutoff;
use crate::error::{Error, Result};

/// Pass thresholds used by the acceptance suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub orthonormality: f64,
    pub kernel: f64,
    pub reproduction: f64,
    pub cubature: f64,
    pub parseval: f64,
    pub reconstruction: f64,
    pub metric: f64,
    /// Allowed growth factor of normalized localization ratios between scales.
    pub growth: f64,
    /// Allowed relative drift of fitted constants across scales.
    pub drift: f64,
    pub norm_lower: f64,
    pub norm_upper: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthonormality: 1e-10,
            kernel: 1e-8,
            reproduction: 1e-8,
            cubature: 1e-8,
            parseval: 1e-8,
            reconstruction: 1e-8,
            metric: 1e-12,
            growth: 2.0,
            drift: 0.25,
            norm_lower: 0.05,
            norm_upper: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mu: f64,
    pub d: usize,
    /// Cubature degrees for the `cubature` checks.
    pub degrees: Vec<usize>,
    /// Highest needlet level.
    pub levels: usize,
    pub cutoff: Cutoff,
    /// Starting `δ` for cubature searches (`None`: 1).
    pub delta: Option<f64>,
    pub gamma: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub tol: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mu: 1.0,
            d: 2,
            degrees: vec![4, 8, 16, 32],
            levels: 6,
            cutoff: Cutoff::TypeB,
            delta: None,
            gamma: 1.0 / 3.0,
            seed: 20240601,
            output: None,
            tol: Tolerances::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for `{key}`")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.tol;
        match key {
            "mu" => self.mu = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "degrees" => {
                self.degrees = value
                    .split(',')
                    .map(|v| parse(key, v.trim()))
                    .collect::<Result<Vec<usize>>>()?
            }
            "levels" | "J" => self.levels = parse(key, value)?,
            "cutoff" => self.cutoff = parse(key, value)?,
            "delta" => self.delta = Some(parse(key, value)?),
            "gamma" => self.gamma = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "tol.orthonormality" => t.orthonormality = parse(key, value)?,
            "tol.kernel" => t.kernel = parse(key, value)?,
            "tol.reproduction" => t.reproduction = parse(key, value)?,
            "tol.cubature" => t.cubature = parse(key, value)?,
            "tol.parseval" => t.parseval = parse(key, value)?,
            "tol.reconstruction" => t.reconstruction = parse(key, value)?,
            "tol.metric" => t.metric = parse(key, value)?,
            "tol.growth" => t.growth = parse(key, value)?,
            "tol.drift" => t.drift = parse(key, value)?,
            "tol.norm_lower" => t.norm_lower = parse(key, value)?,
            "tol.norm_upper" => t.norm_upper = parse(key, value)?,
            "tol" => {
                // one value for every absolute tolerance
                let v: f64 = parse(key, value)?;
                t.orthonormality = v;
                t.kernel = v;
                t.reproduction = v;
                t.cubature = v;
                t.parseval = v;
                t.reconstruction = v;
                t.metric = v;
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Overrides from `key = value` lines.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be >= 0, got {}", self.mu));
        }
        if self.d < 2 {
            return bad(format!("d must be >= 2, got {}", self.d));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if let Some(delta) = self.delta {
            if !(delta > 0.0 && delta.is_finite()) {
                return bad(format!("delta must be positive, got {delta}"));
            }
        }
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return bad("degrees must be a non-empty list of positive integers".into());
        }
        let t = &self.tol;
        let named = [
            ("tol.orthonormality", t.orthonormality),
            ("tol.kernel", t.kernel),
            ("tol.reproduction", t.reproduction),
            ("tol.cubature", t.cubature),
            ("tol.parseval", t.parseval),
            ("tol.reconstruction", t.reconstruction),
            ("tol.metric", t.metric),
            ("tol.growth", t.growth),
            ("tol.drift", t.drift),
            ("tol.norm_lower", t.norm_lower),
            ("tol.norm_upper", t.norm_upper),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if t.norm_lower >= t.norm_upper {
            return bad("tol.norm_lower must be below tol.norm_upper".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn parses_file_text() {
        let mut c = RunConfig::default();
        c.apply_str("# run\nmu = 0.5\n d=3 \ndegrees = 4, 8\ncutoff = a\ntol.parseval = 1e-9 # tight\n")
            .unwrap();
        assert_eq!(c.mu, 0.5);
        assert_eq!(c.d, 3);
        assert_eq!(c.degrees, vec![4, 8]);
        assert_eq!(c.cutoff, Cutoff::TypeA);
        assert_eq!(c.tol.parseval, 1e-9);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_str("mu 1").is_err());
        assert!(c.apply_str("colour = red").is_err());
        assert!(c.apply_str("d = two").is_err());
        for text in ["tol = 0", "d = 1", "mu = -1", "tol.growth = -2", "degrees = 0"] {
            let mut c = RunConfig::default();
            c.apply_str(text).unwrap();
            assert!(c.validate().is_err(), "{text}");
        }
    }
}
