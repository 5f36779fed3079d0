//! Command-line front end for the solver's benchmark studies.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use logse::harness::{
    run_dynamics, study_epsilon, study_gamma, study_space, study_time, ReferenceCache, RunConfig,
    Study, StudyContext, StudyReport,
};
use logse::tableau::DoubleButcherTableau;

#[derive(Parser)]
#[command(
    name = "logse",
    version,
    about = "Mass-conservative relaxation solver for the regularized \
             logarithmic Schrödinger equation",
    after_help = "Each study starts from built-in defaults and applies the \
                  optional config file on top. CSV reports and the \
                  reference-solution cache land in the output directory."
)]
struct Cli {
    /// Config file with `key = value` overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV reports and the reference cache.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for independent sweep points.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regularization-error sweep over ε for each smoothness order k.
    ConvergeEps,
    /// Temporal-order sweep over τ for each scheme and ε.
    ConvergeTime,
    /// Spatial-accuracy sweep over the grid size N.
    ConvergeSpace,
    /// Sweep of max |γ_n − 1| over τ for each scheme.
    GammaStudy,
    /// Two-Gausson collision: snapshots plus the per-step mass record.
    Dynamics {
        /// Disable the relaxation correction (shows the mass drift of the
        /// plain IMEX scheme).
        #[arg(long)]
        no_relaxation: bool,
    },
    /// Check a scheme (built-in name or tableau file) against the order
    /// and structure conditions.
    ValidateTableau {
        /// Built-in name such as 'RK(2,3)' or a path to a tableau file.
        name: String,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::ConvergeEps => {
            let (cfg, ctx) = setup(Study::Epsilon, &cli)?;
            let reports = study_epsilon(&cfg, &ctx)?;
            write_reports(&reports, &cli.out)
        }
        Command::ConvergeTime => {
            let (cfg, ctx) = setup(Study::Time, &cli)?;
            let reports = study_time(&cfg, &ctx)?;
            write_reports(&reports, &cli.out)
        }
        Command::ConvergeSpace => {
            let (cfg, ctx) = setup(Study::Space, &cli)?;
            let report = study_space(&cfg, &ctx)?;
            write_reports(std::slice::from_ref(&report), &cli.out)
        }
        Command::GammaStudy => {
            let (cfg, ctx) = setup(Study::Gamma, &cli)?;
            let reports = study_gamma(&cfg, &ctx)?;
            write_reports(&reports, &cli.out)
        }
        Command::Dynamics { no_relaxation } => {
            let (cfg, _) = setup(Study::Dynamics, &cli)?;
            dynamics(&cfg, !no_relaxation, &cli.out)
        }
        Command::ValidateTableau { name } => validate_tableau(name),
    }
}

/// Study defaults overlaid with the config file, plus the study context
/// (cache directory under the output directory).
fn setup(study: Study, cli: &Cli) -> Result<(RunConfig, StudyContext)> {
    let mut cfg = RunConfig::defaults(study);
    if let Some(path) = &cli.config {
        cfg.apply_file(path)
            .with_context(|| format!("loading config '{}'", path.display()))?;
    }
    let cache = ReferenceCache::new(cli.out.join("cache"))?;
    Ok((cfg, StudyContext::new(cache).with_threads(cli.threads)))
}

fn write_reports(reports: &[StudyReport], out: &Path) -> Result<()> {
    for report in reports {
        let path = report.write_csv(out)?;
        println!(
            "{}: {} rows -> {}",
            report.name,
            report.rows.len(),
            path.display()
        );
        for row in &report.rows {
            let err = row
                .error_e
                .or(row.error_ehat)
                .or(row.max_gamma_dev)
                .map(|e| format!("{e:.3e}"))
                .unwrap_or_else(|| "-".into());
            let order = row
                .observed_order
                .map(|o| format!("{o:.2}"))
                .unwrap_or_else(|| "-".into());
            println!("  param {:<12.4e} error {err:<12} order {order}", row.param);
        }
    }
    Ok(())
}

fn dynamics(cfg: &RunConfig, relaxation: bool, out: &Path) -> Result<()> {
    let result = run_dynamics(cfg, relaxation)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating '{}'", out.display()))?;
    let tag = if relaxation { "" } else { "_norelax" };

    let mass_path = out.join(format!("dynamics_mass{tag}.csv"));
    std::fs::write(&mass_path, result.mass_csv())
        .with_context(|| format!("writing '{}'", mass_path.display()))?;
    println!(
        "mass record ({} steps) -> {}",
        result.mass_series.len() - 1,
        mass_path.display()
    );
    println!(
        "max relative mass error {:.3e}, max |gamma - 1| {:.3e}",
        result.max_rel_mass_err, result.max_gamma_dev
    );
    if result.landing_fallback {
        println!("note: a final-step landing fell back to a regular step");
    }

    for (i, (t, _)) in result.snapshots.iter().enumerate() {
        let path = out.join(format!("dynamics_snapshot_{i:02}{tag}.csv"));
        std::fs::write(&path, result.snapshot_csv(i))
            .with_context(|| format!("writing '{}'", path.display()))?;
        println!("snapshot t = {t:.6} -> {}", path.display());
    }
    Ok(())
}

fn validate_tableau(name: &str) -> Result<()> {
    let path = Path::new(name);
    let tableau = if path.is_file() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading '{}'", path.display()))?;
        DoubleButcherTableau::parse(&text)?
    } else {
        (*DoubleButcherTableau::load(name)?).clone()
    };
    let report = tableau.validate();
    println!("{report}");
    if !report.enforced_ok() {
        bail!("tableau '{}' failed validation", report.name);
    }
    Ok(())
}
