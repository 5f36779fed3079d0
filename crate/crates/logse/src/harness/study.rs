//! The four convergence studies.
//!
//! Each study sweeps one parameter (ε, τ, or N) with everything else
//! pinned, runs the solver at every sweep point, and returns
//! [`StudyReport`]s ready for CSV output. Reference solutions go through
//! the [`ReferenceCache`]; sweep points are recomputed every time.
//!
//! Sweep points are independent, so they run on a rayon pool sized by
//! [`StudyContext::with_threads`] (default 1). Results are collected in
//! sweep order, which keeps the CSV output identical no matter how many
//! threads run.

use rayon::prelude::*;

use crate::grid::{restrict_to, SpectralField};
use crate::harness::config::RunConfig;
use crate::harness::gausson::GaussonParams;
use crate::harness::reference::{
    compute_reference, InitialCondition, ReferenceCache, ReferenceSolution, ReferenceSpec,
};
use crate::harness::report::{eps_slug, tableau_slug, StudyReport, StudyRow};
use crate::harness::HarnessError;
use crate::logreg::{energy, reg_energy, ModelParams, RegularizationParams};
use crate::stats::pairwise_orders;
use crate::util::kahan_sum;

/// Shared study environment: the reference cache and the worker count.
#[derive(Debug, Clone)]
pub struct StudyContext {
    cache: ReferenceCache,
    threads: usize,
}

impl StudyContext {
    pub fn new(cache: ReferenceCache) -> Self {
        StudyContext { cache, threads: 1 }
    }

    /// Number of worker threads for independent sweep points (minimum 1).
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn cache(&self) -> &ReferenceCache {
        &self.cache
    }

    fn pool(&self) -> Result<rayon::ThreadPool, HarnessError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| HarnessError::BadParams(format!("could not build thread pool: {e}")))
    }
}

/// The Gausson every benchmark study integrates: unit amplitude, at rest.
fn study_gausson(cfg: &RunConfig) -> Result<GaussonParams, HarnessError> {
    GaussonParams::new(1.0, 0.0, cfg.lambda)
}

/// Reference-run description for the study Gausson at a given (ε, k).
fn gausson_reference_spec(
    cfg: &RunConfig,
    eps: f64,
    reg_order: u32,
) -> Result<ReferenceSpec, HarnessError> {
    Ok(ReferenceSpec {
        domain_left: cfg.domain_left,
        domain_right: cfg.domain_right,
        n: cfg.n_ref,
        tau: cfg.tau_ref,
        t_end: cfg.final_time,
        eps,
        reg_order,
        lambda: cfg.lambda,
        tableau: cfg.ref_tableau.clone(),
        initial: InitialCondition::Gausson(study_gausson(cfg)?),
    })
}

/// Sweep-point run description: same setup as the reference but with the
/// study's own grid size, step size, and scheme.
fn sweep_spec(cfg: &RunConfig, n: usize, tau: f64, tableau: &str, eps: f64) -> ReferenceSpec {
    ReferenceSpec {
        domain_left: cfg.domain_left,
        domain_right: cfg.domain_right,
        n,
        tau,
        t_end: cfg.final_time,
        eps,
        reg_order: cfg.reg_order,
        lambda: cfg.lambda,
        tableau: tableau.to_string(),
        initial: InitialCondition::Gausson(GaussonParams::new(1.0, 0.0, cfg.lambda).unwrap()),
    }
}

/// Discrete L² distance between the densities |a|² and |b|².
fn density_distance(a: &SpectralField, b: &SpectralField) -> f64 {
    debug_assert!(a.grid().same_geometry(b.grid()));
    let h = a.grid().spacing();
    let sum = kahan_sum(a.values().iter().zip(b.values()).map(|(x, y)| {
        let d = x.norm_sqr() - y.norm_sqr();
        d * d
    }));
    (h * sum).sqrt()
}

/// ‖u_exact(t̂) − u_ref‖ on the reference grid.
fn reference_defect(
    gausson: &GaussonParams,
    reference: &ReferenceSolution,
) -> Result<f64, HarnessError> {
    let exact = gausson.sample(&reference.grid, reference.achieved_time);
    Ok(exact.distance_l2(&reference.field)?)
}

/// Restricts the reference field onto `field`'s (possibly coarser) grid and
/// returns the discrete L² distance.
fn error_against_reference(
    field: &SpectralField,
    reference: &ReferenceSolution,
) -> Result<f64, HarnessError> {
    let grid = field.grid();
    let ref_on_grid = if grid.same_geometry(&reference.grid) {
        reference.field.clone()
    } else {
        restrict_to(&reference.field, grid)?
    };
    Ok(field.distance_l2(&ref_on_grid)?)
}

/// Fills `observed_order` on `rows[1..]` from the given per-row error
/// sequence (entries with a missing error leave the order empty).
fn fill_pairwise_orders(rows: &mut [StudyRow], errors: &[Option<f64>]) {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .zip(errors)
        .filter_map(|(r, e)| e.map(|e| (r.param, e)))
        .collect();
    if pts.len() != rows.len() {
        return;
    }
    let orders = pairwise_orders(&pts);
    for (row, order) in rows.iter_mut().skip(1).zip(orders) {
        row.observed_order = Some(order);
    }
}

/// Regularization study: for every smoothness order k in
/// `cfg.reg_order_list`, sweep ε over `cfg.eps_list` and measure, on the
/// reference itself, the solution error ‖u_exact − u_ref^ε‖, the density
/// error, and the energy-functional error at t = 0. Returns one report
/// per k.
pub fn study_epsilon(
    cfg: &RunConfig,
    ctx: &StudyContext,
) -> Result<Vec<StudyReport>, HarnessError> {
    let gausson = study_gausson(cfg)?;
    let model = ModelParams::new(cfg.lambda)?;
    let pairs: Vec<(u32, f64)> = cfg
        .reg_order_list
        .iter()
        .flat_map(|&k| cfg.eps_list.iter().map(move |&eps| (k, eps)))
        .collect();
    let pool = ctx.pool()?;
    let solutions: Vec<(ReferenceSolution, f64, f64, f64)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(k, eps)| {
                let spec = gausson_reference_spec(cfg, eps, k)?;
                let sol = ctx.cache.get_or_compute(&spec)?;
                let ehat = reference_defect(&gausson, &sol)?;
                let exact = gausson.sample(&sol.grid, sol.achieved_time);
                let rho = density_distance(&exact, &sol.field);
                // Energy error of the regularized functional, evaluated on
                // the initial data so no time-integration error leaks in.
                let u0 = gausson.sample(&sol.grid, 0.0);
                let reg = RegularizationParams::new(eps, k)?;
                let e_energy = (reg_energy(&u0, &reg, &model) - energy(&u0, &model)).abs();
                Ok((sol, ehat, rho, e_energy))
            })
            .collect::<Result<_, HarnessError>>()
    })?;

    let mut reports = Vec::new();
    let mut it = solutions.into_iter();
    for &k in &cfg.reg_order_list {
        let mut report = StudyReport::new(
            format!("regularization error vs eps (k = {k})"),
            format!("eps_k{k}"),
        );
        let mut ehats = Vec::new();
        for &eps in &cfg.eps_list {
            let (sol, ehat, rho, e_energy) = it.next().expect("one solution per (k, eps)");
            report.rows.push(StudyRow {
                param: eps,
                error_e: None,
                error_ehat: Some(ehat),
                error_rho: Some(rho),
                error_energy: Some(e_energy),
                observed_order: None,
                max_gamma_dev: Some(sol.max_gamma_dev),
                t_final_achieved: sol.achieved_time,
            });
            ehats.push(Some(ehat));
        }
        fill_pairwise_orders(&mut report.rows, &ehats);
        reports.push(report);
    }
    Ok(reports)
}

/// Temporal study: for every scheme and every ε, sweep τ over
/// `cfg.tau_list` and measure the error against the fine-step reference at
/// the same ε. Returns one report per (scheme, ε).
pub fn study_time(cfg: &RunConfig, ctx: &StudyContext) -> Result<Vec<StudyReport>, HarnessError> {
    let gausson = study_gausson(cfg)?;
    // References first (cached, distinct per ε).
    let mut references = Vec::new();
    for &eps in &cfg.eps_list {
        let spec = gausson_reference_spec(cfg, eps, cfg.reg_order)?;
        let sol = ctx.cache.get_or_compute(&spec)?;
        let ehat = reference_defect(&gausson, &sol)?;
        references.push((eps, sol, ehat));
    }

    let pool = ctx.pool()?;
    let mut reports = Vec::new();
    for tableau in &cfg.tableau_list {
        for (eps, reference, ehat) in &references {
            let runs: Vec<(f64, f64, f64)> = pool.install(|| {
                cfg.tau_list
                    .par_iter()
                    .map(|&tau| {
                        let sol =
                            compute_reference(&sweep_spec(cfg, cfg.n_points, tau, tableau, *eps))?;
                        let e = error_against_reference(&sol.field, reference)?;
                        Ok((e, sol.max_gamma_dev, sol.achieved_time))
                    })
                    .collect::<Result<_, HarnessError>>()
            })?;
            let mut report = StudyReport::new(
                format!("temporal error vs tau ({tableau}, eps = {eps:e})"),
                format!("time_{}_eps{}", tableau_slug(tableau), eps_slug(*eps)),
            );
            let mut errors = Vec::new();
            for (&tau, &(e, gamma_dev, t_ach)) in cfg.tau_list.iter().zip(&runs) {
                report.rows.push(StudyRow {
                    param: tau,
                    error_e: Some(e),
                    error_ehat: Some(*ehat),
                    error_rho: None,
                    error_energy: None,
                    observed_order: None,
                    max_gamma_dev: Some(gamma_dev),
                    t_final_achieved: t_ach,
                });
                errors.push(Some(e));
            }
            fill_pairwise_orders(&mut report.rows, &errors);
            reports.push(report);
        }
    }
    Ok(reports)
}

/// Spatial study: sweep the grid size over `cfg.n_list` with the step size
/// pinned at `cfg.tau`, measuring against the spectrally truncated
/// fine-grid reference.
pub fn study_space(cfg: &RunConfig, ctx: &StudyContext) -> Result<StudyReport, HarnessError> {
    let gausson = study_gausson(cfg)?;
    let spec = gausson_reference_spec(cfg, cfg.eps, cfg.reg_order)?;
    let reference = ctx.cache.get_or_compute(&spec)?;
    let ehat = reference_defect(&gausson, &reference)?;

    let pool = ctx.pool()?;
    let runs: Vec<(f64, f64, f64)> = pool.install(|| {
        cfg.n_list
            .par_iter()
            .map(|&n| {
                let sol = compute_reference(&sweep_spec(cfg, n, cfg.tau, &cfg.tableau, cfg.eps))?;
                let e = error_against_reference(&sol.field, &reference)?;
                Ok((e, sol.max_gamma_dev, sol.achieved_time))
            })
            .collect::<Result<_, HarnessError>>()
    })?;

    let mut report = StudyReport::new(
        format!(
            "spatial error vs N ({}, tau = {:e}, eps = {:e})",
            cfg.tableau, cfg.tau, cfg.eps
        ),
        "space".to_string(),
    );
    let mut errors = Vec::new();
    for (&n, &(e, gamma_dev, t_ach)) in cfg.n_list.iter().zip(&runs) {
        report.rows.push(StudyRow {
            param: n as f64,
            error_e: Some(e),
            error_ehat: Some(ehat),
            error_rho: None,
            error_energy: None,
            observed_order: None,
            max_gamma_dev: Some(gamma_dev),
            t_final_achieved: t_ach,
        });
        errors.push(Some(e));
    }
    fill_pairwise_orders(&mut report.rows, &errors);
    Ok(report)
}

/// Relaxation-parameter study: sweep τ for every scheme and record
/// max |γ_n − 1| per run; no reference solutions are involved. The
/// observed order of the deviations should track p − 1 for a scheme of
/// order p. Returns one report per (scheme, ε).
pub fn study_gamma(cfg: &RunConfig, ctx: &StudyContext) -> Result<Vec<StudyReport>, HarnessError> {
    let pool = ctx.pool()?;
    let mut reports = Vec::new();
    for tableau in &cfg.tableau_list {
        for &eps in &cfg.eps_list {
            let runs: Vec<(f64, f64)> = pool.install(|| {
                cfg.tau_list
                    .par_iter()
                    .map(|&tau| {
                        let sol =
                            compute_reference(&sweep_spec(cfg, cfg.n_points, tau, tableau, eps))?;
                        Ok((sol.max_gamma_dev, sol.achieved_time))
                    })
                    .collect::<Result<_, HarnessError>>()
            })?;
            let mut report = StudyReport::new(
                format!("relaxation gamma deviation vs tau ({tableau}, eps = {eps:e})"),
                format!("gamma_{}_eps{}", tableau_slug(tableau), eps_slug(eps)),
            );
            let mut devs = Vec::new();
            for (&tau, &(gamma_dev, t_ach)) in cfg.tau_list.iter().zip(&runs) {
                report.rows.push(StudyRow {
                    param: tau,
                    error_e: None,
                    error_ehat: None,
                    error_rho: None,
                    error_energy: None,
                    observed_order: None,
                    max_gamma_dev: Some(gamma_dev),
                    t_final_achieved: t_ach,
                });
                devs.push(Some(gamma_dev));
            }
            fill_pairwise_orders(&mut report.rows, &devs);
            reports.push(report);
        }
    }
    Ok(reports)
}
