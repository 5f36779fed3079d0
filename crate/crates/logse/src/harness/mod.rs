//! Experiment harness: exact solutions, reference-solution caching, the
//! convergence studies, the two-Gausson collision run, and CSV reporting.
//!
//! The studies mirror a standard benchmark set for the regularized
//! logarithmic Schrödinger equation:
//!
//! * [`study::study_epsilon`] — regularization error versus ε for two
//!   smoothness orders k, measured against the exact Gausson;
//! * [`study::study_time`] — temporal order of the relaxation schemes
//!   against a fine-step reference at the same ε;
//! * [`study::study_space`] — spectral accuracy of the Fourier
//!   discretization on very coarse grids;
//! * [`study::study_gamma`] — decay of max |γ_n − 1| with τ;
//! * [`dynamics::run_dynamics`] — two Gaussons colliding head-on, with the
//!   per-step mass-conservation record.
//!
//! Everything is deterministic: rerunning a study with the same
//! configuration produces byte-identical CSV files.

pub mod config;
pub mod dynamics;
pub mod gausson;
pub mod reference;
pub mod report;
pub mod study;

use thiserror::Error;

pub use config::{RunConfig, Study};
pub use dynamics::{density_centroid, run_dynamics, DynamicsOutput};
pub use gausson::{two_gausson_initial, GaussonComponent, GaussonParams, MultiGaussonInitialData};
pub use reference::{
    compute_reference, InitialCondition, ReferenceCache, ReferenceSolution, ReferenceSpec,
};
pub use report::{StudyReport, StudyRow};
pub use study::{study_epsilon, study_gamma, study_space, study_time, StudyContext};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error(
        "grid [{left}, {right}) does not cover the required interval [{need_left}, {need_right}]"
    )]
    DomainTooSmall {
        left: f64,
        right: f64,
        need_left: f64,
        need_right: f64,
    },
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
    #[error(transparent)]
    Reg(#[from] crate::logreg::RegError),
    #[error(transparent)]
    Tableau(#[from] crate::tableau::TableauError),
    #[error(transparent)]
    Solver(#[from] crate::rrk::SolverError),
    #[error("i/o error on '{path}': {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
