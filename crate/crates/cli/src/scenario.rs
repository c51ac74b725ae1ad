//! Flat JSON scenario files.

use std::path::Path;

use duality_pricer::{ExerciseStyle, ModelParams, OptionKind, OptionSpec};
use serde::Deserialize;

use crate::CliError;

/// Environment fallback for the random seed.
pub const SEED_ENV: &str = "DUALITY_PRICER_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PATHS: usize = 1_000;
pub const DEFAULT_STEPS: usize = 100;

/// Every key a scenario may carry; which ones are required depends on `model`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: String,
    pub s0: Option<f64>,
    pub k: Option<f64>,
    #[serde(rename = "T", alias = "t")]
    pub maturity: Option<f64>,
    pub r: Option<f64>,
    pub sigma: Option<f64>,
    pub sigma_n: Option<f64>,
    pub a: Option<f64>,
    pub u: Option<f64>,
    pub d: Option<f64>,
    pub option: Option<String>,
    pub style: Option<String>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub steps: Option<usize>,
}

fn need<T: Copy>(value: Option<T>, key: &str, model: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("model `{model}` needs key `{key}`")))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad scenario: {e}")))
    }

    /// Parameters of the named model.
    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        let m = self.model.as_str();
        Ok(match m {
            "binomial" => ModelParams::Binomial {
                u: need(self.u, "u", m)?,
                d: need(self.d, "d", m)?,
                r: self.r.unwrap_or(0.0),
                steps: need(self.steps, "steps", m)?,
            },
            "bsm" => ModelParams::Bsm { r: need(self.r, "r", m)?, sigma: need(self.sigma, "sigma", m)? },
            "bachelier" => ModelParams::Bachelier { sigma_n: need(self.sigma_n, "sigma_n", m)? },
            "logistic" => ModelParams::Logistic { a: need(self.a, "a", m)? },
            other => {
                return Err(CliError::Usage(format!(
                    "unknown model `{other}`; expected binomial, bsm, bachelier or logistic"
                )))
            }
        })
    }

    pub fn option_spec(&self) -> Result<OptionSpec, CliError> {
        let m = self.model.as_str();
        let kind = match self.option.as_deref() {
            Some("call") => OptionKind::Call,
            Some("put") => OptionKind::Put,
            Some(other) => return Err(CliError::Usage(format!("option must be \"call\" or \"put\", got {other:?}"))),
            None => return Err(CliError::Usage("scenario needs key `option`".into())),
        };
        let style = match self.style.as_deref() {
            None | Some("european") => ExerciseStyle::European,
            Some("american") => ExerciseStyle::American,
            Some(other) => {
                return Err(CliError::Usage(format!("style must be \"european\" or \"american\", got {other:?}")))
            }
        };
        Ok(OptionSpec::new(kind, style, need(self.k, "k", m)?, need(self.maturity, "T", m)?, need(self.s0, "s0", m)?))
    }

    /// Every model the scenario has parameters for, the named one first.
    pub fn available_models(&self) -> Vec<ModelParams> {
        let mut out = Vec::new();
        if let Ok(p) = self.model_params() {
            out.push(p);
        }
        let extra = [
            self.sigma_n.map(|sigma_n| ModelParams::Bachelier { sigma_n }),
            self.a.map(|a| ModelParams::Logistic { a }),
            self.r.zip(self.sigma).map(|(r, sigma)| ModelParams::Bsm { r, sigma }),
            match (self.u, self.d, self.steps) {
                (Some(u), Some(d), Some(steps)) => {
                    Some(ModelParams::Binomial { u, d, r: self.r.unwrap_or(0.0), steps })
                }
                _ => None,
            },
        ];
        for p in extra.into_iter().flatten() {
            if !out.iter().any(|q| q.tag() == p.tag()) {
                out.push(p);
            }
        }
        out
    }

    pub fn paths(&self) -> usize {
        self.paths.unwrap_or(DEFAULT_PATHS)
    }

    /// Simulation steps; the lattice's own step count for the binomial model.
    pub fn steps(&self) -> usize {
        self.steps.unwrap_or(DEFAULT_STEPS)
    }
}

/// Seed precedence: command-line flag, then scenario, then environment, then default.
pub fn resolve_seed(flag: Option<u64>, scenario: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(scenario) {
        return Ok(s);
    }
    env_seed().map(|s| s.unwrap_or(DEFAULT_SEED))
}

/// Seed from the environment, if set.
pub fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}
