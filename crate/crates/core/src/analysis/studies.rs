//! Convergence-study drivers.
//!
//! * [`epsilon_convergence_study`]: regularized solution against the
//!   `ε → 0` limit, rates measured against the ε ratio.
//! * [`discretization_convergence_study`]: scheme against a fine-grid
//!   solution at the same ε, refining `(h, τ)` jointly or `h` alone.
//! * [`total_convergence_study`]: scheme against the closed-form Gausson,
//!   one table per ε; the error floors out at the regularization error.
//!
//! Per-level simulations are independent and run on the rayon pool; rows are
//! assembled in level order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{error_report, ErrorReport, Field};
use crate::grid::{Grid1D, TimeMesh};
use crate::problems::ProblemSpec;
use crate::schemes::{Scheme, SchemeParams, StabilityReport};
use crate::simulation::{run_simulation, InitialData};

use super::reference::{make_reference, Reference, ReferenceQuality, ReferenceResolution};

/// ε used as a stand-in for the unregularized equation.
pub const LIMIT_EPSILON: f64 = 1e-7;

/// Smallest ε accepted by the ε-study, well above [`LIMIT_EPSILON`].
pub const MIN_STUDY_EPSILON: f64 = 1e-6;

/// `τ_j / h_j` in the joint-refinement ladder `h_j = 2^{-j}`, `τ_j = 0.01 · 2^{-j}`.
pub const TAU_OVER_H: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StudyKind {
    EpsilonRefinement,
    TemporalSpatial,
    SpatialOnly,
    TotalVsExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscretizationMode {
    TemporalSpatial,
    SpatialOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsilonReference {
    Analytic,
    FineGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub l2: f64,
    pub linf: f64,
    pub h1: f64,
    pub rate_l2: Option<f64>,
    pub rate_linf: Option<f64>,
    pub rate_h1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub study_kind: StudyKind,
    pub scheme: Scheme,
    pub final_time: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Post-run stability verdict of each level's simulation.
    pub stability: Vec<StabilityReport>,
}

impl ConvergenceTable {
    pub fn column_l2(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.l2).collect()
    }

    pub fn column_linf(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.linf).collect()
    }

    pub fn column_h1(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.h1).collect()
    }

    /// Rates of the rows after the first, per norm `(l2, linf, h1)`.
    pub fn rates(&self) -> Vec<(f64, f64, f64)> {
        self.rows
            .iter()
            .skip(1)
            .map(|r| (r.rate_l2.unwrap_or(f64::NAN), r.rate_linf.unwrap_or(f64::NAN), r.rate_h1.unwrap_or(f64::NAN)))
            .collect()
    }
}

/// Observed order `ln(prev/curr) / ln(ratio)`; `None` if either error is
/// not positive.
pub fn convergence_rate(prev: f64, curr: f64, ratio: f64) -> Option<f64> {
    if prev > 0.0 && curr > 0.0 && ratio > 0.0 && ratio != 1.0 {
        Some((prev / curr).ln() / ratio.ln())
    } else {
        None
    }
}

struct Level {
    h: f64,
    tau: f64,
    epsilon: f64,
    errors: ErrorReport,
    stability: StabilityReport,
}

fn assemble(kind: StudyKind, scheme: Scheme, final_time: f64, levels: Vec<Level>, ratios: &[f64]) -> ConvergenceTable {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
    for (i, lv) in levels.iter().enumerate() {
        let rate = |f: fn(&ErrorReport) -> f64| {
            if i == 0 {
                None
            } else {
                convergence_rate(f(&levels[i - 1].errors), f(&lv.errors), ratios[i - 1])
            }
        };
        rows.push(ConvergenceRow {
            level: i,
            h: lv.h,
            tau: lv.tau,
            epsilon: lv.epsilon,
            l2: lv.errors.l2,
            linf: lv.errors.linf,
            h1: lv.errors.h1,
            rate_l2: rate(|e| e.l2),
            rate_linf: rate(|e| e.linf),
            rate_h1: rate(|e| e.h1),
        });
    }
    ConvergenceTable {
        study_kind: kind,
        scheme,
        final_time,
        rows,
        stability: levels.into_iter().map(|l| l.stability).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    pub lambda: f64,
    pub reference: ReferenceResolution,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self { lambda: 1.0, reference: ReferenceResolution::default() }
    }
}

/// Runs one simulation to `final_time` (stability check advisory) and
/// returns the final level.
fn simulate(
    spec: &ProblemSpec,
    grid: &Grid1D,
    tau: f64,
    final_time: f64,
    params: &SchemeParams,
) -> Result<(Field, StabilityReport)> {
    let mesh = TimeMesh::from_horizon(tau, final_time)?;
    let init = InitialData::from_problem(spec, grid)?;
    let out = run_simulation(&init, grid, &mesh, params, true, &mut [])?;
    Ok((out.state.into_levels().1, out.post_check))
}

fn check_final_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::arg(format!("final time must be positive, got {t}")));
    }
    Ok(())
}

/// Regularization error `u(·, T) - u^ε(·, T)` for each ε in `eps_list`.
///
/// Every `u^ε` is computed with `scheme` at the reference resolution; `u` is
/// either the closed form or an EFD run at [`LIMIT_EPSILON`] on the same
/// mesh. Rates use `ln(ε_{i-1}/ε_i)` as the base, so first order reads 1.
pub fn epsilon_convergence_study(
    spec: &ProblemSpec,
    scheme: Scheme,
    eps_list: &[f64],
    final_time: f64,
    reference: EpsilonReference,
    opts: &StudyOptions,
) -> Result<ConvergenceTable> {
    check_final_time(final_time)?;
    if eps_list.is_empty() {
        return Err(Error::arg("epsilon list is empty"));
    }
    if let Some(e) = eps_list.iter().find(|&&e| !(e >= MIN_STUDY_EPSILON && e.is_finite())) {
        return Err(Error::arg(format!("epsilon {e} is below the study minimum {MIN_STUDY_EPSILON}")));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::arg("epsilon list must be strictly decreasing"));
    }

    let res = opts.reference;
    let grid = spec.grid_with_spacing(res.h)?;
    let quality = match reference {
        EpsilonReference::Analytic => ReferenceQuality::Analytic,
        EpsilonReference::FineGrid => ReferenceQuality::FineGrid(res),
    };

    let (limit, levels) = rayon::join(
        || {
            make_reference(spec, LIMIT_EPSILON, opts.lambda, &[final_time], quality)
                .and_then(|r| r.at(final_time, &grid))
        },
        || {
            eps_list
                .par_iter()
                .map(|&eps| {
                    let params = SchemeParams::new(eps, opts.lambda, scheme)?;
                    simulate(spec, &grid, res.tau, final_time, &params).map(|r| (eps, r))
                })
                .collect::<Result<Vec<_>>>()
        },
    );
    let limit = limit?;
    let levels = levels?
        .into_iter()
        .map(|(eps, (u_eps, stability))| {
            Ok(Level {
                h: grid.h(),
                tau: res.tau,
                epsilon: eps,
                errors: error_report(&u_eps, &limit, &grid)?,
                stability,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = eps_list.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(assemble(StudyKind::EpsilonRefinement, scheme, final_time, levels, &ratios))
}

/// Discretization error `u^ε(·, T) - u^{ε,n}` on the ladder `h_j = 2^{-j}`,
/// `j = 1..=levels`, against an EFD run at the reference resolution and the
/// same ε. `TemporalSpatial` uses `τ_j = 0.01 h_j`; `SpatialOnly` keeps the
/// reference `τ` on every level.
pub fn discretization_convergence_study(
    spec: &ProblemSpec,
    scheme: Scheme,
    epsilon: f64,
    levels: u32,
    mode: DiscretizationMode,
    final_time: f64,
    opts: &StudyOptions,
) -> Result<ConvergenceTable> {
    check_final_time(final_time)?;
    if levels == 0 {
        return Err(Error::arg("a discretization study needs at least one level"));
    }
    let res = opts.reference;
    let ladder = (1..=levels)
        .map(|j| {
            let h = 2f64.powi(-(j as i32));
            let grid = spec.grid_with_spacing(h)?;
            let tau = match mode {
                DiscretizationMode::TemporalSpatial => TAU_OVER_H * h,
                DiscretizationMode::SpatialOnly => res.tau,
            };
            Ok((grid, tau))
        })
        .collect::<Result<Vec<_>>>()?;

    let ref_grid = spec.grid_with_spacing(res.h)?;
    for (grid, _) in &ladder {
        if grid.len() >= ref_grid.len() {
            return Err(Error::arg(format!(
                "level h = {} is not coarser than the reference h = {}",
                grid.h(),
                ref_grid.h()
            )));
        }
        if !ref_grid.refines(grid) {
            return Err(Error::arg(format!("reference grid does not nest level h = {}", grid.h())));
        }
    }

    let (reference, runs) = rayon::join(
        || make_reference(spec, epsilon, opts.lambda, &[final_time], ReferenceQuality::FineGrid(res)),
        || {
            ladder
                .par_iter()
                .map(|(grid, tau)| {
                    let params = SchemeParams::new(epsilon, opts.lambda, scheme)?;
                    simulate(spec, grid, *tau, final_time, &params)
                })
                .collect::<Result<Vec<_>>>()
        },
    );
    let reference = reference?;
    let levels = ladder
        .iter()
        .zip(runs?)
        .map(|((grid, tau), (u, stability))| {
            let exact = reference.at(final_time, grid)?;
            Ok(Level { h: grid.h(), tau: *tau, epsilon, errors: error_report(&u, &exact, grid)?, stability })
        })
        .collect::<Result<Vec<_>>>()?;
    let kind = match mode {
        DiscretizationMode::TemporalSpatial => StudyKind::TemporalSpatial,
        DiscretizationMode::SpatialOnly => StudyKind::SpatialOnly,
    };
    let ratios = vec![2.0; levels.len().saturating_sub(1)];
    Ok(assemble(kind, scheme, final_time, levels, &ratios))
}

/// Total error `u(·, T) - u^{ε,n}` against the closed-form Gausson, with
/// `h_l = start_h / 2^l`, `τ_l = start_tau / 2^l`, `l = 0..levels`; one table
/// per ε.
#[allow(clippy::too_many_arguments)]
pub fn total_convergence_study(
    spec: &ProblemSpec,
    scheme: Scheme,
    eps_list: &[f64],
    start_h: f64,
    start_tau: f64,
    levels: u32,
    final_time: f64,
    opts: &StudyOptions,
) -> Result<Vec<ConvergenceTable>> {
    check_final_time(final_time)?;
    if levels == 0 {
        return Err(Error::arg("a total-error study needs at least one level"));
    }
    if eps_list.is_empty() {
        return Err(Error::arg("epsilon list is empty"));
    }
    let reference = make_reference(spec, LIMIT_EPSILON, opts.lambda, &[final_time], ReferenceQuality::Analytic)?;

    let ladder = (0..levels)
        .map(|l| {
            let scale = 2f64.powi(-(l as i32));
            let grid = spec.grid_with_spacing(start_h * scale)?;
            let tau = start_tau * scale;
            TimeMesh::from_horizon(tau, final_time)?;
            Ok((grid, tau))
        })
        .collect::<Result<Vec<_>>>()?;
    let params = eps_list.iter().map(|&e| SchemeParams::new(e, opts.lambda, scheme)).collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..params.len()).flat_map(|e| (0..ladder.len()).map(move |l| (e, l))).collect();
    let mut results = jobs
        .par_iter()
        .map(|&(e, l)| {
            let (grid, tau) = &ladder[l];
            let (u, stability) = simulate(spec, grid, *tau, final_time, &params[e])?;
            let exact = reference.at(final_time, grid)?;
            Ok(Level {
                h: grid.h(),
                tau: *tau,
                epsilon: eps_list[e],
                errors: error_report(&u, &exact, grid)?,
                stability,
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter();

    let ratios = vec![2.0; ladder.len() - 1];
    Ok(eps_list
        .iter()
        .map(|_| {
            let levels: Vec<Level> = results.by_ref().take(ladder.len()).collect();
            assemble(StudyKind::TotalVsExact, scheme, final_time, levels, &ratios)
        })
        .collect())
}

/// Helper for callers holding a [`Reference`] already.
pub fn errors_against(reference: &Reference, numeric: &Field, time: f64, grid: &Grid1D) -> Result<ErrorReport> {
    error_report(numeric, &reference.at(time, grid)?, grid)
}
