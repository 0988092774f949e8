//! Dispatch of a resolved [`RunConfig`] to the solver and study drivers.

use std::time::Instant;

use logkg_core::analysis::{
    discretization_convergence_study, epsilon_convergence_study, total_convergence_study, ConvergenceTable,
    EpsilonReference, StudyOptions,
};
use logkg_core::problems::ProblemSpec;
use logkg_core::schemes::{SchemeParams, StabilityReport};
use logkg_core::simulation::{pre_run_check, run_simulation, InitialData, SnapshotRecorder};
use logkg_core::{Grid1D, TimeMesh};
use serde_json::{json, Value};

use crate::config::{Command, LimitReference, OutputFormat, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{emit, fmt_num, json_bytes, snapshot_csv, snapshot_path, tables_csv, write_atomic};
use crate::THREADS_ENV;

/// Sizes the global rayon pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Solver(format!("cannot size the thread pool: {e}")))
}

pub fn execute(config: &RunConfig) -> Result<()> {
    let start = Instant::now();
    let spec = ProblemSpec::from_kind(config.problem).with_domain(config.domain.0, config.domain.1)?;
    let params = SchemeParams::new(config.epsilon, config.lambda, config.scheme)?;
    match config.command {
        Command::Evolve => evolve(config, &spec, &params, start),
        Command::StabilityCheck => stability_check(config, &spec, &params),
        Command::StudyEpsilon | Command::StudyDiscretization | Command::StudyTotal => {
            let tables = study(config, &spec)?;
            warn_unstable(&tables);
            let bytes = match config.format {
                OutputFormat::Csv => tables_csv(&tables),
                OutputFormat::Json => {
                    let mut doc = metadata(config, start);
                    doc["study_kind"] = json!(tables.first().map(|t| t.study_kind));
                    doc["final_time"] = json!(config.final_time);
                    doc["stability"] = json!(tables.iter().map(|t| &t.stability).collect::<Vec<_>>());
                    doc["tables"] = json!(tables);
                    json_bytes(&doc)
                }
            };
            emit(config.output.as_deref(), &bytes)
        }
    }
}

fn metadata(config: &RunConfig, start: Instant) -> Value {
    let mut doc = json!({
        "command": config.command,
        "config": config,
        "scheme": config.scheme,
    });
    if config.timing {
        doc["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    }
    doc
}

fn study(config: &RunConfig, spec: &ProblemSpec) -> Result<Vec<ConvergenceTable>> {
    let opts = StudyOptions { lambda: config.lambda, reference: config.reference_resolution() };
    let tables = match config.command {
        Command::StudyEpsilon => {
            let reference = match config.reference {
                Some(LimitReference::Analytic) => EpsilonReference::Analytic,
                _ => EpsilonReference::FineGrid,
            };
            vec![epsilon_convergence_study(spec, config.scheme, &config.eps_list, config.final_time, reference, &opts)?]
        }
        Command::StudyDiscretization => vec![discretization_convergence_study(
            spec,
            config.scheme,
            config.epsilon,
            config.levels,
            config.mode.expect("resolved for this command").into(),
            config.final_time,
            &opts,
        )?],
        Command::StudyTotal => {
            let start_h = (config.domain.1 - config.domain.0) / config.n_points as f64;
            total_convergence_study(
                spec,
                config.scheme,
                &config.eps_list,
                start_h,
                config.tau,
                config.levels,
                config.final_time,
                &opts,
            )?
        }
        Command::Evolve | Command::StabilityCheck => unreachable!("not a study"),
    };
    Ok(tables)
}

/// Studies run every level regardless of the bound; report violations.
fn warn_unstable(tables: &[ConvergenceTable]) {
    for t in tables {
        for (row, s) in t.rows.iter().zip(&t.stability) {
            if !s.satisfied {
                eprintln!(
                    "logkg: warning: level {} (h = {}, tau = {}, epsilon = {}) exceeded tau_limit = {}",
                    row.level,
                    fmt_num(row.h),
                    fmt_num(row.tau),
                    fmt_num(row.epsilon),
                    s.tau_limit.map(fmt_num).unwrap_or_default()
                );
            }
        }
    }
}

fn evolve(config: &RunConfig, spec: &ProblemSpec, params: &SchemeParams, start: Instant) -> Result<()> {
    let grid = spec.grid(config.n_points)?;
    let mesh = TimeMesh::from_horizon(config.tau, config.final_time)?;
    let init = InitialData::from_problem(spec, &grid)?;
    let mut recorder = SnapshotRecorder::new(&config.snapshot_times, config.tau)?;
    let outcome = run_simulation(&init, &grid, &mesh, params, config.force, &mut [&mut recorder])?;
    if !outcome.post_check.satisfied {
        eprintln!(
            "logkg: warning: the solution amplitude pushed tau_limit to {} below tau = {}",
            outcome.post_check.tau_limit.map(fmt_num).unwrap_or_default(),
            fmt_num(config.tau)
        );
    }

    match config.format {
        OutputFormat::Csv => {
            let files: Vec<_> = config
                .snapshot_times
                .iter()
                .map(|&t| (t, snapshot_csv(&grid, recorder.at(t).expect("recorded every requested time"))))
                .collect();
            match &config.output {
                Some(prefix) => {
                    for (t, bytes) in &files {
                        write_atomic(&snapshot_path(prefix, *t), bytes)?;
                    }
                    Ok(())
                }
                None => emit(None, &files[0].1),
            }
        }
        OutputFormat::Json => {
            let mut doc = metadata(config, start);
            doc["stability"] = json!({ "pre_run": outcome.pre_check, "post_run": outcome.post_check });
            doc["x"] = json!(grid.points().collect::<Vec<_>>());
            doc["snapshots"] = json!(recorder.snapshots);
            emit(config.output.as_deref(), &json_bytes(&doc))
        }
    }
}

fn stability_check(config: &RunConfig, spec: &ProblemSpec, params: &SchemeParams) -> Result<()> {
    let grid: Grid1D = spec.grid(config.n_points)?;
    let init = InitialData::from_problem(spec, &grid)?;
    let report: StabilityReport = pre_run_check(&init.phi, &grid, config.tau, params)?;
    let bytes = match config.format {
        OutputFormat::Csv => {
            let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
            format!(
                "scheme,h,tau,sigma_max,tau_limit,satisfied,margin\n{},{},{},{},{},{},{}\n",
                report.scheme,
                fmt_num(grid.h()),
                fmt_num(report.tau),
                fmt_num(report.sigma_max),
                opt(report.tau_limit),
                report.satisfied,
                opt(report.margin)
            )
            .into_bytes()
        }
        OutputFormat::Json => {
            let mut doc = metadata(config, Instant::now());
            doc["h"] = json!(grid.h());
            doc["report"] = json!(report);
            json_bytes(&doc)
        }
    };
    emit(config.output.as_deref(), &bytes)
}
