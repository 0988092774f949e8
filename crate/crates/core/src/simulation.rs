//! Time integration driver: initial levels, the step loop, observers and the
//! pre- and post-run stability verdicts.
//!
//! `σ_max` depends on the whole trajectory, which is not known before the
//! run. The pre-run check therefore uses the initial amplitude inflated by
//! [`AMPLITUDE_SAFETY`]; the amplitude monitor in [`SolverState`] then gives
//! the realized `σ_max`, which is re-checked after the run and reported.

use serde::{Deserialize, Serialize};

use crate::analysis::energy::{discrete_energy, EnergySample};
use crate::error::{Error, Result};
use crate::field::{norm_linf, Field};
use crate::grid::{steps_to, Grid1D, TimeMesh};
use crate::problems::{sample_initial_data, ProblemSpec};
use crate::schemes::{sigma_max, stability_limit, SchemeParams, SolverState, StabilityReport, Stepper};

pub const AMPLITUDE_SAFETY: f64 = 1.2;

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub phi: Field,
    pub gamma: Field,
}

impl InitialData {
    pub fn from_problem(spec: &ProblemSpec, grid: &Grid1D) -> Result<Self> {
        let (phi, gamma) = sample_initial_data(spec, grid)?;
        Ok(Self { phi, gamma })
    }

    pub fn zeros(n: usize) -> Self {
        Self { phi: Field::zeros(n), gamma: Field::zeros(n) }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub grid: &'a Grid1D,
    pub tau: f64,
    pub params: &'a SchemeParams,
}

/// Called after the first step and then every `stride()` steps; the final
/// level is always observed.
pub trait Observer {
    fn stride(&self) -> usize {
        1
    }

    fn observe(&mut self, state: &SolverState, ctx: &StepContext<'_>) -> Result<()>;
}

#[derive(Debug, Clone, Default)]
pub struct EnergySampler {
    stride: usize,
    pub samples: Vec<EnergySample>,
}

impl EnergySampler {
    pub fn new(stride: usize) -> Self {
        Self { stride: stride.max(1), samples: Vec::new() }
    }

    /// Largest `|E(t_n) - E(t_0)| / |E(t_0)|` over the recorded samples.
    pub fn relative_drift(&self) -> Option<f64> {
        let e0 = self.samples.first()?.total;
        Some(self.samples.iter().map(|s| (s.total - e0).abs()).fold(0.0, f64::max) / e0.abs())
    }
}

impl Observer for EnergySampler {
    fn stride(&self) -> usize {
        self.stride
    }

    fn observe(&mut self, state: &SolverState, ctx: &StepContext<'_>) -> Result<()> {
        self.samples.push(discrete_energy(state, ctx.grid, ctx.tau, ctx.params)?);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub step: usize,
    pub field: Field,
}

/// Records the solution at prescribed times, each an integer multiple of τ.
#[derive(Debug, Clone)]
pub struct SnapshotRecorder {
    targets: Vec<(usize, f64)>,
    pub snapshots: Vec<Snapshot>,
}

impl SnapshotRecorder {
    pub fn new(times: &[f64], tau: f64) -> Result<Self> {
        let mut targets = times.iter().map(|&t| steps_to(tau, t).map(|n| (n, t))).collect::<Result<Vec<_>>>()?;
        targets.sort_by_key(|t| t.0);
        targets.dedup_by_key(|t| t.0);
        Ok(Self { targets, snapshots: Vec::new() })
    }

    pub fn last_step(&self) -> Option<usize> {
        self.targets.last().map(|t| t.0)
    }

    /// The recorded field at `time`, if any.
    pub fn at(&self, time: f64) -> Option<&Field> {
        self.snapshots.iter().find(|s| s.time == time).map(|s| &s.field)
    }
}

impl Observer for SnapshotRecorder {
    fn observe(&mut self, state: &SolverState, _ctx: &StepContext<'_>) -> Result<()> {
        let n = state.step_index();
        for &(step, time) in &self.targets {
            let field = if step == n {
                state.u_curr()
            } else if step + 1 == n && n == 1 {
                state.u_prev()
            } else {
                continue;
            };
            self.snapshots.push(Snapshot { time, step, field: field.clone() });
        }
        Ok(())
    }
}

/// `(t_n, ‖u^n‖_{l∞})` every `stride` steps.
#[derive(Debug, Clone, Default)]
pub struct AmplitudeTrace {
    stride: usize,
    pub samples: Vec<(f64, f64)>,
}

impl AmplitudeTrace {
    pub fn new(stride: usize) -> Self {
        Self { stride: stride.max(1), samples: Vec::new() }
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }
}

impl Observer for AmplitudeTrace {
    fn stride(&self) -> usize {
        self.stride
    }

    fn observe(&mut self, state: &SolverState, ctx: &StepContext<'_>) -> Result<()> {
        if state.step_index() == 1 {
            self.samples.push((0.0, norm_linf(state.u_prev())?));
        }
        self.samples.push((state.time(ctx.tau), norm_linf(state.u_curr())?));
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SolverState,
    pub pre_check: StabilityReport,
    pub post_check: StabilityReport,
}

/// Stability verdict before the run, from `AMPLITUDE_SAFETY · ‖φ‖_{l∞}`.
pub fn pre_run_check(phi: &Field, grid: &Grid1D, tau: f64, params: &SchemeParams) -> Result<StabilityReport> {
    let amp = AMPLITUDE_SAFETY * norm_linf(phi)?;
    let sigma = sigma_max(params.epsilon(), amp)?;
    Ok(stability_limit(params, grid, sigma, tau))
}

/// Integrates from the initial data to `mesh.final_time()`.
///
/// Refuses to start when the pre-run stability check fails unless `force`
/// is set; aborts with [`Error::Overflow`] as soon as a level turns
/// non-finite.
pub fn run_simulation(
    initial: &InitialData,
    grid: &Grid1D,
    mesh: &TimeMesh,
    params: &SchemeParams,
    force: bool,
    observers: &mut [&mut dyn Observer],
) -> Result<RunOutcome> {
    let tau = mesh.tau();
    let pre_check = pre_run_check(&initial.phi, grid, tau, params)?;
    if !pre_check.satisfied && !force {
        return Err(Error::Unstable {
            tau,
            limit: pre_check.tau_limit.unwrap_or(f64::INFINITY),
            sigma: pre_check.sigma_max,
        });
    }

    let ctx = StepContext { grid, tau, params };
    let mut stepper = Stepper::new(grid, tau, params)?;
    let mut state = SolverState::start(&initial.phi, &initial.gamma, grid, tau, params)?;
    for obs in observers.iter_mut() {
        obs.observe(&state, &ctx)?;
    }
    let last = mesh.n_steps();
    while state.step_index() < last {
        stepper.advance(&mut state)?;
        let n = state.step_index();
        for obs in observers.iter_mut() {
            if n % obs.stride() == 0 || n == last {
                obs.observe(&state, &ctx)?;
            }
        }
    }

    let sigma = sigma_max(params.epsilon(), state.amplitude_max())?;
    let post_check = stability_limit(params, grid, sigma, tau);
    Ok(RunOutcome { state, pre_check, post_check })
}

/// The final level of a run: `u^{n_steps}`.
pub fn final_field(outcome: &RunOutcome) -> &Field {
    outcome.state.u_curr()
}
