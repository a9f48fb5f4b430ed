//! Run configuration: flat `key = value` files with flag overrides.

use std::path::Path;

use exphier::battery::BatteryConfig;
use exphier::decomp::DecompParams;
use exphier::dynhier::DynParams;
use exphier::rational::fmt_rational;
use exphier::{parse_rational, ratio, Rational};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha: Rational,
    pub phi: Rational,
    pub psi: u64,
    pub slack_base: u64,
    pub mlp_depth: u32,
    pub gamma_krv: Option<u64>,
    pub c1_mult: u64,
    pub theta3_mult: u64,
    pub max_depth: usize,
    pub seed: u64,
    pub audit: bool,
    /// Clusters up to this size are checked by enumeration.
    pub exhaustive_limit: usize,
    pub exact_threshold: usize,
    pub rounds_scale: f64,
    pub budget_scale: f64,
    pub rho: Option<f64>,
    pub strict_alpha: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: ratio(1, 16),
            phi: ratio(1, 64),
            psi: 4,
            slack_base: 38,
            mlp_depth: 1,
            gamma_krv: None,
            c1_mult: 16,
            theta3_mult: 80,
            max_depth: 64,
            seed: 0,
            audit: false,
            exhaustive_limit: 16,
            exact_threshold: 16,
            rounds_scale: 1.0,
            budget_scale: 1.0,
            rho: None,
            strict_alpha: false,
        }
    }
}

fn bad(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Usage(format!("config line {line}: {}", msg.into()))
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| bad(line, format!("invalid value {v:?} for {key}")))
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(bad(line, format!("invalid boolean {v:?} for {key}"))),
    }
}

impl RunConfig {
    /// Sets one key; `line` is 0 for command-line overrides.
    pub fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        let rational = |v: &str| parse_rational(v).map_err(|e| bad(line, e.to_string()));
        match key.as_str() {
            "alpha" => self.alpha = rational(v)?,
            "phi" => self.phi = rational(v)?,
            "psi" => self.psi = num(line, &key, v)?,
            "slack_base" => self.slack_base = num(line, &key, v)?,
            "mlp_depth" => self.mlp_depth = num(line, &key, v)?,
            "gamma_krv" => self.gamma_krv = Some(num(line, &key, v)?),
            "c1_mult" => self.c1_mult = num(line, &key, v)?,
            "theta3_mult" => self.theta3_mult = num(line, &key, v)?,
            "max_depth" | "depth_cap" => self.max_depth = num(line, &key, v)?,
            "seed" => self.seed = num(line, &key, v)?,
            "audit" => self.audit = boolean(line, &key, v)?,
            "exhaustive_limit" => self.exhaustive_limit = num(line, &key, v)?,
            "exact_threshold" => self.exact_threshold = num(line, &key, v)?,
            "rounds_scale" => self.rounds_scale = num(line, &key, v)?,
            "budget_scale" => self.budget_scale = num(line, &key, v)?,
            "rho" => self.rho = Some(num(line, &key, v)?),
            "strict_alpha" => self.strict_alpha = boolean(line, &key, v)?,
            _ => return Err(bad(line, format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(i + 1, format!("expected key = value, got {line:?}")))?;
            self.set(i + 1, k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Checks the preconditions shared by the decomposition and the pruner.
    pub fn validate(&self) -> Result<(), CliError> {
        if *self.phi.numer() != 1 {
            return Err(CliError::Usage(format!("phi must have the form 1/k, got {}", fmt_rational(self.phi))));
        }
        if self.max_depth == 0 {
            return Err(CliError::Usage("max-depth must be positive".into()));
        }
        if self.exhaustive_limit > exphier::oracle::ENUMERATION_LIMIT {
            return Err(CliError::Usage(format!(
                "exhaustive_limit must be at most {}",
                exphier::oracle::ENUMERATION_LIMIT
            )));
        }
        if !(self.rounds_scale > 0.0) {
            return Err(CliError::Usage("rounds_scale must be positive".into()));
        }
        self.dyn_params().validate().map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn decomp_params(&self) -> DecompParams {
        let mut p = DecompParams::new(self.alpha, self.phi);
        p.gamma_krv = self.gamma_krv;
        p.c1_mult = self.c1_mult;
        p.theta3_mult = self.theta3_mult;
        p.exact_threshold = self.exact_threshold;
        p.rounds_scale = self.rounds_scale;
        p.strict_alpha = self.strict_alpha;
        p.audit = self.audit;
        p
    }

    pub fn dyn_params(&self) -> DynParams {
        let mut p = DynParams::new(self.alpha, self.phi);
        p.decomp = self.decomp_params();
        p.psi = self.psi;
        p.slack_base = self.slack_base;
        p.mlp_depth = self.mlp_depth;
        p.rho_override = self.rho;
        p.budget_scale = self.budget_scale;
        p.depth_cap = self.max_depth;
        p.seed = self.seed;
        p
    }

    pub fn battery_config(&self) -> BatteryConfig {
        BatteryConfig { seed: self.seed, exhaustive_limit: self.exhaustive_limit, dynamic: self.dyn_params() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nalpha = 1/32\nphi=1/8\n\nslack-base = 12 # trailing\naudit = true\n").unwrap();
        assert_eq!(c.alpha, ratio(1, 32));
        assert_eq!(c.phi, ratio(1, 8));
        assert_eq!(c.slack_base, 12);
        assert!(c.audit);
        c.set(0, "phi", "1/16").unwrap();
        assert_eq!(c.phi, ratio(1, 16));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn errors_cite_lines() {
        let mut c = RunConfig::default();
        let e = c.apply_text("alpha = 1/32\nwhat = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = c.apply_text("psi 4\n").unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
    }

    #[test]
    fn preconditions() {
        let mut c = RunConfig::default();
        c.phi = ratio(2, 5);
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.psi = 1;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.alpha = ratio(4, 5);
        assert!(c.validate().is_err());
    }
}
