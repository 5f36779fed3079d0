//! Plain-text run configuration: `key = value` lines with `#` comments.
//!
//! Scalar keys cover a single solver run; list keys (comma-separated, with
//! commas inside parentheses left intact so tableau names survive) feed the
//! parameter sweeps. Unknown keys are errors so typos cannot silently fall
//! back to defaults.

use std::fmt;
use std::path::Path;

use crate::harness::HarnessError;
use crate::rrk::FinalTimeMode;

/// Which study a configuration is initialized for; selects the default
/// parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    Epsilon,
    Time,
    Space,
    Gamma,
    Dynamics,
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Study::Epsilon => "converge-eps",
            Study::Time => "converge-time",
            Study::Space => "converge-space",
            Study::Gamma => "gamma-study",
            Study::Dynamics => "dynamics",
        };
        f.write_str(s)
    }
}

/// A fully resolved run configuration (defaults overlaid with config-file
/// settings).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain_left: f64,
    pub domain_right: f64,
    pub n_points: usize,
    pub tau: f64,
    pub eps: f64,
    pub reg_order: u32,
    pub lambda: f64,
    pub tableau: String,
    pub final_time: f64,
    pub final_time_mode: FinalTimeMode,
    /// ε sweep for the regularization study and the temporal study.
    pub eps_list: Vec<f64>,
    /// Smoothness orders k for the regularization study.
    pub reg_order_list: Vec<u32>,
    /// Step sizes for the temporal and γ studies.
    pub tau_list: Vec<f64>,
    /// Grid sizes for the spatial study.
    pub n_list: Vec<usize>,
    /// Schemes for the temporal and γ studies.
    pub tableau_list: Vec<String>,
    /// Output times for the dynamics run.
    pub snapshot_times: Vec<f64>,
    /// Grid size for reference solutions.
    pub n_ref: usize,
    /// Step size for reference solutions.
    pub tau_ref: f64,
    /// Scheme used for reference solutions.
    pub ref_tableau: String,
}

const ALL_TABLEAUS: [&str; 4] = ["RK(1,2)", "RK(2,3)", "RK(6,4)", "RK(8,5)"];

impl RunConfig {
    /// Defaults for `study`. All studies share the Gausson benchmark setup
    /// (λ = −1 on [−10, 10]) except the dynamics run, which uses the wide
    /// two-Gausson domain [−40, 40].
    pub fn defaults(study: Study) -> Self {
        let mut cfg = RunConfig {
            domain_left: -10.0,
            domain_right: 10.0,
            n_points: 256,
            tau: 1e-2,
            eps: 1e-4,
            reg_order: 2,
            lambda: -1.0,
            tableau: "RK(2,3)".into(),
            final_time: 1.0,
            final_time_mode: FinalTimeMode::AdjustLastStep,
            eps_list: vec![1e-2, 1e-3, 1e-4, 1e-5],
            reg_order_list: vec![2, 10],
            tau_list: vec![5e-2, 2.5e-2, 1.25e-2, 6.25e-3, 3.125e-3],
            n_list: vec![12, 14, 16, 18, 20],
            tableau_list: ALL_TABLEAUS.iter().map(|s| s.to_string()).collect(),
            snapshot_times: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            n_ref: 512,
            tau_ref: 1e-5,
            ref_tableau: "RK(2,3)".into(),
        };
        match study {
            Study::Epsilon => {}
            Study::Time => {
                // Measure against the reference on the reference grid so the
                // comparison is purely temporal.
                cfg.n_points = 512;
                cfg.eps_list = vec![1e-4, 1e-8];
            }
            Study::Space => {
                cfg.tau = 1e-5;
                cfg.eps = 1e-6;
            }
            Study::Gamma => {
                cfg.eps_list = vec![1e-4];
            }
            Study::Dynamics => {
                cfg.domain_left = -40.0;
                cfg.domain_right = 40.0;
                cfg.n_points = 256;
                cfg.tau = 2e-3;
                cfg.final_time = 20.0;
                cfg.n_ref = 1024;
            }
        }
        cfg
    }

    /// Applies `key = value` lines from `text` on top of the current
    /// settings.
    pub fn apply_str(&mut self, text: &str) -> Result<(), HarnessError> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::Config {
                line: line_no,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            self.set(key.trim(), value.trim(), line_no)?;
        }
        Ok(())
    }

    /// Reads a config file and applies it on top of the current settings.
    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<(), HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::io(path.display().to_string(), e))?;
        self.apply_str(&text)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), HarnessError> {
        let bad = |msg: String| HarnessError::Config { line, msg };
        match key {
            "domain_left" => self.domain_left = parse_scalar(value, key, line)?,
            "domain_right" => self.domain_right = parse_scalar(value, key, line)?,
            "n_points" => self.n_points = parse_scalar(value, key, line)?,
            "tau" => self.tau = parse_scalar(value, key, line)?,
            "eps" => self.eps = parse_scalar(value, key, line)?,
            "reg_order" => self.reg_order = parse_scalar(value, key, line)?,
            "lambda" => self.lambda = parse_scalar(value, key, line)?,
            "tableau" => self.tableau = value.to_string(),
            "final_time" => self.final_time = parse_scalar(value, key, line)?,
            "final_time_mode" => {
                self.final_time_mode = match value {
                    "adjust_last_step" => FinalTimeMode::AdjustLastStep,
                    "overshoot_record" => FinalTimeMode::OvershootRecord,
                    other => {
                        return Err(bad(format!(
                            "final_time_mode must be 'adjust_last_step' or \
                             'overshoot_record', got '{other}'"
                        )))
                    }
                }
            }
            "eps_list" => self.eps_list = parse_list(value, key, line)?,
            "reg_order_list" => self.reg_order_list = parse_list(value, key, line)?,
            "tau_list" => self.tau_list = parse_list(value, key, line)?,
            "n_list" => self.n_list = parse_list(value, key, line)?,
            "tableau_list" => {
                self.tableau_list = split_list(value).map(|s| s.to_string()).collect();
                if self.tableau_list.is_empty() {
                    return Err(bad("tableau_list must not be empty".into()));
                }
            }
            "snapshot_times" => self.snapshot_times = parse_list(value, key, line)?,
            "n_ref" => self.n_ref = parse_scalar(value, key, line)?,
            "tau_ref" => self.tau_ref = parse_scalar(value, key, line)?,
            "ref_tableau" => self.ref_tableau = value.to_string(),
            other => return Err(bad(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

/// Splits a comma-separated list, keeping commas that sit inside
/// parentheses (tableau names like `RK(2,3)` contain one).
fn split_list(value: &str) -> impl Iterator<Item = &str> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in value.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                items.push(value[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(value[start..].trim());
    items.into_iter().filter(|s| !s.is_empty())
}

fn parse_scalar<T: std::str::FromStr>(
    value: &str,
    key: &str,
    line: usize,
) -> Result<T, HarnessError> {
    value.parse().map_err(|_| HarnessError::Config {
        line,
        msg: format!("could not parse '{value}' for key '{key}'"),
    })
}

fn parse_list<T: std::str::FromStr>(
    value: &str,
    key: &str,
    line: usize,
) -> Result<Vec<T>, HarnessError> {
    let items: Vec<T> = split_list(value)
        .map(|item| parse_scalar(item, key, line))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(HarnessError::Config {
            line,
            msg: format!("list for key '{key}' must not be empty"),
        });
    }
    Ok(items)
}
