use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use berezin::domain::{DomainDescriptor, DomainKind, DomainModel};
use serde::{Deserialize, Serialize};

pub const QUAD_ORDER_VAR: &str = "BEREZIN_QUAD_ORDER";
pub const DEFAULT_QUAD_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckName {
    Lambda0,
    Nontrivial,
    Balanced,
    Diastasis,
    Hereditary,
    Pullback,
    Star,
    Separation,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lambda0 => "lambda0",
            Self::Nontrivial => "nontrivial",
            Self::Balanced => "balanced",
            Self::Diastasis => "diastasis",
            Self::Hereditary => "hereditary",
            Self::Pullback => "pullback",
            Self::Star => "star",
            Self::Separation => "separation",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainDescriptor,
    pub lambdas: Vec<f64>,
    pub checks: Vec<CheckName>,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.checks.is_empty() {
            bail!("no checks requested");
        }
        let unique: BTreeSet<_> = self.checks.iter().collect();
        if unique.len() != self.checks.len() {
            bail!("duplicate check names");
        }
        if self.lambdas.is_empty() {
            bail!("lambdas must not be empty");
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            bail!("lambda {l} is not a positive number");
        }
        if self.samples < 2 {
            bail!("samples must be at least 2");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            bail!("tol must be positive");
        }
        let model = self.model()?;
        if self.checks.contains(&CheckName::Star) && model.kind() != DomainKind::Disk {
            bail!("the star check needs operator quadrature and is available on the disk only");
        }
        Ok(())
    }

    pub fn model(&self) -> Result<DomainModel<f64>> {
        DomainModel::from_descriptor(&self.domain).context("invalid domain descriptor")
    }

    /// Checks in canonical execution order.
    pub fn ordered_checks(&self) -> Vec<CheckName> {
        let set: BTreeSet<_> = self.checks.iter().copied().collect();
        set.into_iter().collect()
    }
}

/// Quadrature order from `BEREZIN_QUAD_ORDER`, default 64.
pub fn quad_order() -> Result<usize> {
    match std::env::var(QUAD_ORDER_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => bail!("{QUAD_ORDER_VAR} must be a positive integer, got {v:?}"),
        },
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_QUAD_ORDER),
        Err(e) => bail!("{QUAD_ORDER_VAR}: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig> {
        let c: RunConfig = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    const BASE: &str = r#"{"domain": {"kind": "disk"}, "lambdas": [1.0], "checks": ["balanced"],
        "samples": 10, "tol": 1e-6, "seed": 1, "out_dir": "out"}"#;

    #[test]
    fn accepts_minimal_config() {
        let c = parse(BASE).unwrap();
        assert_eq!(c.model().unwrap().mu(), 2.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let swap = |from: &str, to: &str| BASE.replace(from, to);
        assert!(parse(&swap(r#"["balanced"]"#, r#"["balanced", "teleport"]"#)).is_err());
        assert!(parse(&swap(r#"["balanced"]"#, "[]")).is_err());
        assert!(parse(&swap(r#"["balanced"]"#, r#"["star", "star"]"#)).is_err());
        assert!(parse(&swap("[1.0]", "[-1.0]")).is_err());
        assert!(parse(&swap("[1.0]", "[]")).is_err());
        assert!(parse(&swap(r#""samples": 10"#, r#""samples": 1"#)).is_err());
        assert!(parse(&swap("1e-6", "0")).is_err());
        assert!(parse(&swap(r#""seed": 1"#, r#""seed": 1, "extra": 0"#)).is_err());
        assert!(parse(&swap(r#"{"kind": "disk"}"#, r#"{"kind": "ball", "n": 2}"#)).is_ok());
        let star_on_ball = BASE
            .replace(r#"{"kind": "disk"}"#, r#"{"kind": "ball", "n": 2}"#)
            .replace(r#"["balanced"]"#, r#"["star"]"#);
        assert!(parse(&star_on_ball).is_err());
        assert!(parse(&swap(r#"{"kind": "disk"}"#, r#"{"kind": "disk", "mu": -1}"#)).is_err());
    }

    #[test]
    fn checks_run_in_canonical_order() {
        let c = parse(&BASE.replace(r#"["balanced"]"#, r#"["star", "lambda0", "balanced"]"#)).unwrap();
        assert_eq!(
            c.ordered_checks(),
            vec![CheckName::Lambda0, CheckName::Balanced, CheckName::Star]
        );
    }
}
