//! Reference solutions (fine-step, fine-grid runs) and their on-disk cache.
//!
//! Cache files are plain text: line 1 holds `key=value` metadata (the
//! pairs identifying the run, followed by result pairs such as the relaxed
//! time actually reached), and every following line is one grid node as
//! `x re(u) im(u)` with 17 significant digits — enough for a bit-exact
//! float round trip. A file whose identifying metadata does not match the
//! requested run byte-for-byte, or that fails to parse, is treated as
//! absent and recomputed with a warning.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use crate::grid::{Grid1D, SpectralField};
use crate::harness::gausson::{two_gausson_initial, GaussonParams};
use crate::harness::HarnessError;
use crate::logreg::{ModelParams, RegularizationParams};
use crate::rrk::{FinalTimeMode, RelaxationSolver, SolverConfig, SolverState};
use crate::tableau::DoubleButcherTableau;

/// Initial condition of a reference run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// A single Gausson sampled at t = 0.
    Gausson(GaussonParams),
    /// The standard two-Gausson collision data.
    TwoGausson,
}

impl InitialCondition {
    fn tag(&self) -> String {
        match self {
            InitialCondition::Gausson(g) => {
                format!("gausson(b={},zeta={})", fmt_f64(g.b()), fmt_f64(g.zeta()))
            }
            InitialCondition::TwoGausson => "two_gausson".to_string(),
        }
    }

    fn sample(&self, grid: &Arc<Grid1D>) -> Result<SpectralField, HarnessError> {
        match self {
            InitialCondition::Gausson(g) => Ok(g.sample(grid, 0.0)),
            InitialCondition::TwoGausson => two_gausson_initial(grid),
        }
    }
}

/// Everything that identifies a reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSpec {
    pub domain_left: f64,
    pub domain_right: f64,
    pub n: usize,
    pub tau: f64,
    pub t_end: f64,
    pub eps: f64,
    pub reg_order: u32,
    pub lambda: f64,
    pub tableau: String,
    pub initial: InitialCondition,
}

impl ReferenceSpec {
    /// The canonical metadata line; doubles as the cache key.
    pub fn metadata(&self) -> String {
        format!(
            "version=1 initial={} left={} right={} n={} tau={} t_end={} eps={} \
             reg_order={} lambda={} tableau={}",
            self.initial.tag(),
            fmt_f64(self.domain_left),
            fmt_f64(self.domain_right),
            self.n,
            fmt_f64(self.tau),
            fmt_f64(self.t_end),
            fmt_f64(self.eps),
            self.reg_order,
            fmt_f64(self.lambda),
            self.tableau,
        )
    }
}

/// A computed (or cache-loaded) reference solution.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub grid: Arc<Grid1D>,
    pub field: SpectralField,
    /// Relaxed time the run actually reached.
    pub achieved_time: f64,
    /// max |γ_n − 1| over the run; persisted in the cache so loads report
    /// the same value as the original computation.
    pub max_gamma_dev: f64,
    /// True if the final-step landing fell back to a regular step.
    pub landing_fallback: bool,
}

/// Runs the solver for `spec` from scratch.
pub fn compute_reference(spec: &ReferenceSpec) -> Result<ReferenceSolution, HarnessError> {
    let grid = Grid1D::new(spec.domain_left, spec.domain_right, spec.n)?;
    let u0 = spec.initial.sample(&grid)?;
    let tableau = DoubleButcherTableau::load(&spec.tableau)?;
    let cfg = SolverConfig::new(
        spec.tau,
        tableau,
        RegularizationParams::new(spec.eps, spec.reg_order)?,
        ModelParams::new(spec.lambda)?,
    )?
    .with_final_time_mode(FinalTimeMode::AdjustLastStep);
    let solver = RelaxationSolver::new(cfg);
    let mut state = SolverState::new(u0);
    let summary = solver.integrate_to(&mut state, spec.t_end, |_| {})?;
    if summary.landing_fallback {
        eprintln!(
            "warning: reference run '{}' used the landing fallback; final time {:.16e}",
            spec.metadata(),
            summary.final_time
        );
    }
    Ok(ReferenceSolution {
        grid,
        field: state.field().clone(),
        achieved_time: summary.final_time,
        max_gamma_dev: summary.max_gamma_dev,
        landing_fallback: summary.landing_fallback,
    })
}

/// Disk cache for reference solutions. With no directory configured every
/// request is computed fresh.
#[derive(Debug, Clone)]
pub struct ReferenceCache {
    dir: Option<PathBuf>,
}

impl ReferenceCache {
    /// A cache rooted at `dir` (created if missing).
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| HarnessError::io(dir.display().to_string(), e))?;
        Ok(ReferenceCache { dir: Some(dir) })
    }

    /// A cache that never stores anything.
    pub fn disabled() -> Self {
        ReferenceCache { dir: None }
    }

    /// Path a given spec would be stored under, if caching is enabled.
    pub fn path_for(&self, spec: &ReferenceSpec) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| {
            d.join(format!(
                "ref_{:016x}.dat",
                fnv1a64(spec.metadata().as_bytes())
            ))
        })
    }

    /// Loads `spec` from the cache, or computes and stores it. Corrupt or
    /// mismatching files are recomputed (with a warning on stderr), never
    /// trusted.
    pub fn get_or_compute(&self, spec: &ReferenceSpec) -> Result<ReferenceSolution, HarnessError> {
        let path = match self.path_for(spec) {
            Some(p) => p,
            None => return compute_reference(spec),
        };
        if path.exists() {
            match load_reference(&path, spec) {
                Ok(sol) => return Ok(sol),
                Err(msg) => {
                    eprintln!(
                        "warning: ignoring cache file '{}': {msg}; recomputing",
                        path.display()
                    );
                }
            }
        }
        let sol = compute_reference(spec)?;
        store_reference(&path, spec, &sol)?;
        Ok(sol)
    }
}

fn store_reference(
    path: &Path,
    spec: &ReferenceSpec,
    sol: &ReferenceSolution,
) -> Result<(), HarnessError> {
    let mut text = String::new();
    text.push_str(&format!(
        "{} achieved_time={} max_gamma_dev={} landing_fallback={}\n",
        spec.metadata(),
        fmt_f64(sol.achieved_time),
        fmt_f64(sol.max_gamma_dev),
        u8::from(sol.landing_fallback),
    ));
    let nodes = sol.grid.nodes();
    for (x, v) in nodes.iter().zip(sol.field.values()) {
        text.push_str(&format!(
            "{} {} {}\n",
            fmt_f64(*x),
            fmt_f64(v.re),
            fmt_f64(v.im)
        ));
    }
    // Write to a temporary sibling and rename so readers never observe a
    // half-written file.
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    fs::write(&tmp, &text).map_err(|e| HarnessError::io(tmp.display().to_string(), e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path.display().to_string(), e))?;
    Ok(())
}

/// Strict loader: any deviation from the expected layout is an `Err(msg)`
/// that makes the caller recompute.
fn load_reference(path: &Path, spec: &ReferenceSpec) -> Result<ReferenceSolution, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("read failed: {e}"))?;
    let mut lines = text.lines();
    let meta = lines.next().ok_or("empty file")?;
    let key = spec.metadata();
    let rest = meta
        .strip_prefix(&key)
        .and_then(|r| r.strip_prefix(" achieved_time="))
        .ok_or("metadata line does not match the requested run")?;
    let mut result_fields = rest.split_ascii_whitespace();
    let achieved: f64 = result_fields
        .next()
        .ok_or("missing achieved_time value")?
        .parse()
        .map_err(|e| format!("bad achieved_time: {e}"))?;
    let max_gamma_dev: f64 = result_fields
        .next()
        .and_then(|f| f.strip_prefix("max_gamma_dev="))
        .ok_or("missing max_gamma_dev")?
        .parse()
        .map_err(|e| format!("bad max_gamma_dev: {e}"))?;
    let landing_fallback = match result_fields
        .next()
        .and_then(|f| f.strip_prefix("landing_fallback="))
    {
        Some("0") => false,
        Some("1") => true,
        _ => return Err("missing or bad landing_fallback".into()),
    };
    if result_fields.next().is_some() {
        return Err("trailing metadata fields".into());
    }
    let grid = Grid1D::new(spec.domain_left, spec.domain_right, spec.n)
        .map_err(|e| format!("bad grid in spec: {e}"))?;
    let nodes = grid.nodes();
    let mut values = Vec::with_capacity(spec.n);
    for (j, line) in lines.enumerate() {
        let mut parts = line.split_ascii_whitespace();
        let x: f64 = parts
            .next()
            .ok_or_else(|| format!("row {j}: missing x"))?
            .parse()
            .map_err(|e| format!("row {j}: bad x: {e}"))?;
        let re: f64 = parts
            .next()
            .ok_or_else(|| format!("row {j}: missing re"))?
            .parse()
            .map_err(|e| format!("row {j}: bad re: {e}"))?;
        let im: f64 = parts
            .next()
            .ok_or_else(|| format!("row {j}: missing im"))?
            .parse()
            .map_err(|e| format!("row {j}: bad im: {e}"))?;
        if parts.next().is_some() {
            return Err(format!("row {j}: trailing fields"));
        }
        if j >= nodes.len() {
            return Err("more rows than grid nodes".into());
        }
        if x != nodes[j] {
            return Err(format!(
                "row {j}: node {x} is not the grid node {}",
                nodes[j]
            ));
        }
        values.push(Complex64::new(re, im));
    }
    if values.len() != nodes.len() {
        return Err(format!(
            "expected {} rows, found {}",
            nodes.len(),
            values.len()
        ));
    }
    let field = SpectralField::from_values(&grid, values).map_err(|e| format!("bad field: {e}"))?;
    Ok(ReferenceSolution {
        grid,
        field,
        achieved_time: achieved,
        max_gamma_dev,
        landing_fallback,
    })
}

/// 17-significant-digit float formatting; round-trips f64 exactly.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
