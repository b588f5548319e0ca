//! The flat JSON run configuration and its validation into core types.
//!
//! Keys are exactly the run-config field names; unknown keys are rejected so
//! that misspellings surface as errors (in particular, the fractional order
//! is spelled `theta` here — configs using the synonym `alpha` are refused
//! with a message naming the key).

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use fraclog_core::models::LogisticModel;
use fraclog_core::operators::FractionalOrder;
use fraclog_core::scheme::{SchemeKind, SolverConfig};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: Option<String>,
    pub r: Option<f64>,
    #[serde(rename = "K")]
    pub cap_k: Option<f64>,
    pub k: Option<f64>,
    pub m: Option<f64>,
    pub theta: Option<f64>,
    pub mu: Option<f64>,
    pub gamma: Option<f64>,
    pub b_theta: Option<f64>,
    pub x0: Option<X0>,
    pub t0: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<u64>,
    pub scheme: Option<String>,
    pub corrector_iterations: Option<u64>,
    pub corrector_tol: Option<f64>,
    pub output: Option<PathBuf>,
}

/// A single starting value or a list of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum X0 {
    One(f64),
    Many(Vec<f64>),
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn model(&self) -> Result<LogisticModel, CliError> {
        let kind = self.model.as_deref().ok_or_else(|| CliError::config("model", "missing"))?;
        let r = self.r.ok_or_else(|| CliError::config("r", "missing"))?;
        let build = match kind {
            "quadratic" => LogisticModel::quadratic(r),
            "quadratic_capacity" => {
                let cap = self.cap_k.ok_or_else(|| CliError::config("K", "missing for quadratic_capacity"))?;
                LogisticModel::quadratic_capacity(r, cap)
            }
            "cubic" => {
                let cap = self.k.ok_or_else(|| CliError::config("k", "missing for cubic"))?;
                let m = self.m.ok_or_else(|| CliError::config("m", "missing for cubic"))?;
                LogisticModel::cubic(r, cap, m)
            }
            other => {
                return Err(CliError::config(
                    "model",
                    format!("unknown kind `{other}` (expected quadratic, quadratic_capacity or cubic)"),
                ))
            }
        };
        build.map_err(|e| CliError::config("model", e.to_string()))
    }

    pub fn order(&self) -> Result<FractionalOrder, CliError> {
        let theta = self.theta.ok_or_else(|| CliError::config("theta", "missing"))?;
        let mu = self.mu.ok_or_else(|| CliError::config("mu", "missing"))?;
        let gamma = self.gamma.ok_or_else(|| CliError::config("gamma", "missing"))?;
        FractionalOrder::with_normalization(theta, mu, gamma, self.b_theta.unwrap_or(1.0))
            .map_err(|e| CliError::config("theta/mu/gamma/b_theta", e.to_string()))
    }

    /// Order with one field overridden by a sweep value.
    pub fn order_with(&self, param: &str, value: f64) -> Result<FractionalOrder, CliError> {
        let theta = if param == "theta" { value } else { self.theta.ok_or_else(|| CliError::config("theta", "missing"))? };
        let mu = if param == "mu" { value } else { self.mu.ok_or_else(|| CliError::config("mu", "missing"))? };
        let gamma = if param == "gamma" { value } else { self.gamma.ok_or_else(|| CliError::config("gamma", "missing"))? };
        FractionalOrder::with_normalization(theta, mu, gamma, self.b_theta.unwrap_or(1.0))
            .map_err(|e| CliError::config(param, e.to_string()))
    }

    pub fn x0_list(&self) -> Result<Vec<f64>, CliError> {
        match &self.x0 {
            Some(X0::One(v)) => Ok(vec![*v]),
            Some(X0::Many(vs)) if !vs.is_empty() => Ok(vs.clone()),
            Some(X0::Many(_)) => Err(CliError::config("x0", "list must not be empty")),
            None => Err(CliError::config("x0", "missing")),
        }
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let t0 = self.t0.unwrap_or(0.0);
        let t_end = self.t_end.ok_or_else(|| CliError::config("t_end", "missing"))?;
        let steps = self.steps.ok_or_else(|| CliError::config("steps", "missing"))?;
        if steps == 0 {
            return Err(CliError::config("steps", "must be at least 1"));
        }
        let mut cfg = SolverConfig::new(t0, t_end, steps as usize)
            .map_err(|e| CliError::config("t0/t_end/steps", e.to_string()))?;
        if let Some(ci) = self.corrector_iterations {
            cfg.corrector_iterations = ci as usize;
        }
        if let Some(tol) = self.corrector_tol {
            if !(tol > 0.0) {
                return Err(CliError::config("corrector_tol", "must be positive"));
            }
            cfg.corrector_tol = tol;
        }
        Ok(cfg)
    }

    pub fn scheme_kind(&self) -> Result<SchemeKind, CliError> {
        match self.scheme.as_deref() {
            None | Some("pece") => Ok(SchemeKind::Pece),
            Some("explicit") => Ok(SchemeKind::Explicit),
            Some(other) => Err(CliError::config(
                "scheme",
                format!("unknown scheme `{other}` (expected explicit or pece)"),
            )),
        }
    }

    /// Output directory: the --out flag wins over the config's `output` key,
    /// falling back to the current directory.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Parse `--sweep name=v1,v2,...`.
pub fn parse_sweep(arg: &str) -> Result<(String, Vec<f64>), CliError> {
    let (name, rest) = arg
        .split_once('=')
        .ok_or_else(|| CliError::config("sweep", "expected `name=v1,v2,...`"))?;
    if !matches!(name, "x0" | "theta" | "mu" | "gamma") {
        return Err(CliError::config(
            "sweep",
            format!("swept parameter must be one of x0, theta, mu, gamma; got `{name}`"),
        ));
    }
    let values: Result<Vec<f64>, _> = rest.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let values = values.map_err(|e| CliError::config("sweep", format!("bad value list: {e}")))?;
    if values.is_empty() {
        return Err(CliError::config("sweep", "value list must not be empty"));
    }
    Ok((name.to_string(), values))
}
