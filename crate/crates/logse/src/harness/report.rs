//! Study results and their CSV rendering.
//!
//! Every study produces the same row schema so downstream tooling can
//! treat all sweeps uniformly:
//!
//! ```csv
//! param,error_e,error_ehat,error_rho,error_energy,observed_order,max_gamma_dev,t_final_achieved
//! ```
//!
//! Values are printed with 17 significant digits; columns that do not
//! apply to a study stay empty. Rendering is a pure function of the rows,
//! so rerunning a deterministic study rewrites byte-identical files.

use std::path::Path;

use crate::harness::reference::fmt_f64;
use crate::harness::HarnessError;

/// One sweep point. `param` is the value being varied (ε, τ, or N);
/// errors that a study does not measure are `None` and render as empty
/// CSV cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    /// Sweep parameter (ε, τ, or N).
    pub param: f64,
    /// ‖u_ref − u_num‖ against the fine-step reference.
    pub error_e: Option<f64>,
    /// ‖u_exact − u_ref‖: the regularization error carried by the
    /// reference itself.
    pub error_ehat: Option<f64>,
    /// Density error ‖|u_exact|² − |u_ref|²‖.
    pub error_rho: Option<f64>,
    /// Energy error of the regularized functional on the initial data.
    pub error_energy: Option<f64>,
    /// Pairwise observed order against the previous row.
    pub observed_order: Option<f64>,
    /// max |γ_n − 1| over the run behind this row.
    pub max_gamma_dev: Option<f64>,
    /// Relaxed time the run actually reached.
    pub t_final_achieved: f64,
}

impl StudyRow {
    /// A row with every optional column empty.
    pub fn empty(param: f64, t_final_achieved: f64) -> Self {
        StudyRow {
            param,
            error_e: None,
            error_ehat: None,
            error_rho: None,
            error_energy: None,
            observed_order: None,
            max_gamma_dev: None,
            t_final_achieved,
        }
    }
}

/// Norm description printed into every CSV: all error columns use the
/// discrete L² norm ‖v‖ = (h Σ_j |v_j|²)^{1/2}.
pub const NORM_DESCRIPTION: &str = "discrete L2, ||v|| = (h * sum_j |v_j|^2)^(1/2)";

/// A named table of study rows.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    /// Human-readable study description (first comment line).
    pub name: String,
    /// Canonical file stem, e.g. `time_rk23_eps1e-4`.
    pub file_stem: String,
    pub rows: Vec<StudyRow>,
}

impl StudyReport {
    pub fn new(name: impl Into<String>, file_stem: impl Into<String>) -> Self {
        StudyReport {
            name: name.into(),
            file_stem: file_stem.into(),
            rows: Vec::new(),
        }
    }

    /// Renders the report as CSV text.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# study: {}\n", self.name));
        out.push_str(&format!("# norm: {NORM_DESCRIPTION}\n"));
        out.push_str(
            "param,error_e,error_ehat,error_rho,error_energy,observed_order,\
             max_gamma_dev,t_final_achieved\n",
        );
        for row in &self.rows {
            let cell = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_f64(row.param),
                cell(row.error_e),
                cell(row.error_ehat),
                cell(row.error_rho),
                cell(row.error_energy),
                cell(row.observed_order),
                cell(row.max_gamma_dev),
                fmt_f64(row.t_final_achieved),
            ));
        }
        out
    }

    /// Writes the CSV under `dir` as `<file_stem>.csv` and returns the
    /// path.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<std::path::PathBuf, HarnessError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.display().to_string(), e))?;
        let path = dir.join(format!("{}.csv", self.file_stem));
        std::fs::write(&path, self.to_csv())
            .map_err(|e| HarnessError::io(path.display().to_string(), e))?;
        Ok(path)
    }
}

/// Lowercases a scheme name and strips punctuation for use in file names:
/// `RK(2,3)` becomes `rk23`.
pub(crate) fn tableau_slug(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Compact ε tag for file names: `1e-4` style.
pub(crate) fn eps_slug(eps: f64) -> String {
    format!("{eps:e}")
}
