//! Experiment configuration: flat `key = value` files plus overrides.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::WindowSpec;
use crate::grid::window::DEFAULT_EPSILON;
use crate::ladder::LadderKind;
use crate::quad::QuadSpec;
use crate::rs::{LnFactorMode, RSConfig, SummationMode};

/// Budget constant for the mean-value error term κ·T^(1/6+ε): the largest
/// ratio found by `calibrate` over `CALIBRATION_HEIGHTS` with H = 1000,
/// ε = 0.05 (2.6075, at T = 10^5.75), rounded up.
pub const DEFAULT_KAPPA: f64 = 2.61;

/// Keys accepted in config files and as `--key value` flags.
pub const KEYS: &[&str] = &[
    "T",
    "eps",
    "H",
    "x",
    "y",
    "ladder",
    "rel-tol",
    "abs-tol",
    "max-depth",
    "correction-terms",
    "summation",
    "ln-mode",
    "kappa",
    "seed",
    "out",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "T")]
    pub t: f64,
    pub epsilon: f64,
    #[serde(rename = "H_override")]
    pub h_override: Option<f64>,
    pub x: f64,
    pub y: f64,
    pub ladder_kind: LadderKind,
    pub quad: QuadSpec,
    pub rs: RSConfig,
    pub ln_mode: LnFactorMode,
    pub kappa: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            t: 1e6,
            epsilon: DEFAULT_EPSILON,
            h_override: None,
            x: PI / 2.0,
            y: PI / 2.0,
            ladder_kind: LadderKind::Ode,
            quad: QuadSpec::default(),
            rs: RSConfig::default(),
            ln_mode: LnFactorMode::Plain,
            kappa: DEFAULT_KAPPA,
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|e| Error::Config(format!("{key} = {v:?}: {e}")))
}

/// A real number, or `pi/k` and `k*pi/m` style angles.
pub fn parse_angle(key: &str, v: &str) -> Result<f64> {
    let s = v.trim().to_ascii_lowercase();
    if let Some((num, den)) = s.split_once('/') {
        if let Some(k) = num.strip_suffix("pi") {
            let k = k.trim_end_matches('*');
            let k = if k.is_empty() { 1.0 } else { parse_f64(key, k)? };
            return Ok(k * PI / parse_f64(key, den)?);
        }
    }
    if s == "pi" {
        return Ok(PI);
    }
    parse_f64(key, &s)
}

impl ExperimentConfig {
    pub fn window(&self) -> Result<WindowSpec> {
        WindowSpec::new(self.t, self.epsilon, self.h_override)
    }

    pub fn h(&self) -> Result<f64> {
        Ok(self.window()?.h())
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        for (name, v) in [("x", self.x), ("y", self.y)] {
            if !(v > 0.0 && v <= PI / 2.0) {
                return Err(Error::Config(format!("{name} = {v} outside (0, π/2]")));
            }
        }
        if !matches!(self.ladder_kind, LadderKind::Asymptotic | LadderKind::Ode) {
            return Err(Error::Config(format!("ladder {} is not an experiment ladder", self.ladder_kind)));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::Config(format!("kappa {} must be positive", self.kappa)));
        }
        self.quad.validate()?;
        self.rs.validate()
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "T" => self.t = parse_f64(key, v)?,
            "eps" => self.epsilon = parse_f64(key, v)?,
            "H" => {
                self.h_override = match v {
                    "" | "none" | "natural" => None,
                    _ => Some(parse_f64(key, v)?),
                }
            }
            "x" => self.x = parse_angle(key, v)?,
            "y" => self.y = parse_angle(key, v)?,
            "ladder" => self.ladder_kind = v.parse()?,
            "rel-tol" => self.quad.rel_tol = parse_f64(key, v)?,
            "abs-tol" => self.quad.abs_tol = parse_f64(key, v)?,
            "max-depth" => {
                self.quad.max_depth = v.parse().map_err(|e| Error::Config(format!("{key} = {v:?}: {e}")))?
            }
            "correction-terms" => {
                self.rs.correction_terms = v.parse().map_err(|e| Error::Config(format!("{key} = {v:?}: {e}")))?
            }
            "summation" => {
                self.rs.summation_mode = match v {
                    "plain" => SummationMode::Plain,
                    "compensated" => SummationMode::Compensated,
                    _ => return Err(Error::Config(format!("summation = {v:?}: expected plain or compensated"))),
                }
            }
            "ln-mode" => {
                self.ln_mode = match v {
                    "plain" => LnFactorMode::Plain,
                    "mean-normalized" => LnFactorMode::MeanNormalized,
                    _ => return Err(Error::Config(format!("ln-mode = {v:?}: expected plain or mean-normalized"))),
                }
            }
            "kappa" => self.kappa = parse_f64(key, v)?,
            "seed" => self.seed = v.parse().map_err(|e| Error::Config(format!("{key} = {v:?}: {e}")))?,
            "out" => self.output_dir = PathBuf::from(v),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Apply a flat `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The config as a flat text that `from_text` reads back unchanged.
    pub fn to_text(&self) -> String {
        let h = self.h_override.map_or("none".to_string(), |h| format!("{h:?}"));
        let summation = match self.rs.summation_mode {
            SummationMode::Plain => "plain",
            SummationMode::Compensated => "compensated",
        };
        let ln_mode = match self.ln_mode {
            LnFactorMode::Plain => "plain",
            LnFactorMode::MeanNormalized => "mean-normalized",
        };
        format!(
            "T = {:?}\neps = {:?}\nH = {h}\nx = {:?}\ny = {:?}\nladder = {}\nrel-tol = {:?}\nabs-tol = {:?}\n\
             max-depth = {}\ncorrection-terms = {}\nsummation = {summation}\nln-mode = {ln_mode}\nkappa = {:?}\n\
             seed = {}\nout = {}\n",
            self.t,
            self.epsilon,
            self.x,
            self.y,
            self.ladder_kind,
            self.quad.rel_tol,
            self.quad.abs_tol,
            self.quad.max_depth,
            self.rs.correction_terms,
            self.kappa,
            self.seed,
            self.output_dir.display()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("T = 2.5e5\n# comment\nH = 123.25\nx = pi/3  # trailing\ny = 3*pi/8\nladder = asymptotic\n")
            .unwrap();
        assert_eq!(cfg.t, 2.5e5);
        assert_eq!(cfg.h_override, Some(123.25));
        assert_eq!(cfg.x, PI / 3.0);
        assert_eq!(cfg.y, 3.0 * PI / 8.0);
        assert_eq!(ExperimentConfig::from_text(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(ExperimentConfig::from_text("x = 2").is_err());
        assert!(ExperimentConfig::from_text("colour = red").is_err());
        assert!(ExperimentConfig::from_text("T = 10").is_err());
        assert!(ExperimentConfig::from_text("ladder = identity").is_err());
        assert!(ExperimentConfig::from_text("correction-terms = 9").is_err());
        assert!(ExperimentConfig::from_text("just words").is_err());
    }

    #[test]
    fn keys_are_all_settable() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_text();
        for key in KEYS {
            assert!(text.lines().any(|l| l.starts_with(&format!("{key} ="))), "{key}");
        }
    }
}
