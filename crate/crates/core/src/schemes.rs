//! The regularized logarithmic nonlinearity, first-step initialization, the
//! EFD and SIFD three-level steppers and their von Neumann stability bounds.
//!
//! Both schemes advance
//!
//! ```text
//! u_tt - u_xx + u + λ u f_ε(u²) = 0,   f_ε(ρ) = ln(ε² + ρ)
//! ```
//!
//! with the centred second difference in time. EFD treats every term at
//! level `n`; SIFD averages the Laplacian and the linear term over levels
//! `n ± 1`, which leaves one symmetric, strictly diagonally dominant cyclic
//! tridiagonal solve per step.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{laplacian_into, norm_linf, Field};
use crate::grid::Grid1D;
use crate::tridiag::CyclicTridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Semi-implicit: Laplacian and mass term averaged over `n ± 1`.
    Sifd,
    /// Fully explicit leapfrog.
    Efd,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Sifd => "sifd",
            Scheme::Efd => "efd",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sifd" => Ok(Scheme::Sifd),
            "efd" => Ok(Scheme::Efd),
            other => Err(Error::arg(format!("unknown scheme '{other}' (expected sifd or efd)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    epsilon: f64,
    lambda: f64,
    scheme: Scheme,
}

impl SchemeParams {
    pub fn new(epsilon: f64, lambda: f64, scheme: Scheme) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if !lambda.is_finite() {
            return Err(Error::arg(format!("lambda must be finite, got {lambda}")));
        }
        Ok(Self { epsilon, lambda, scheme })
    }

    /// `λ = 1`.
    pub fn with_epsilon(epsilon: f64, scheme: Scheme) -> Result<Self> {
        Self::new(epsilon, 1.0, scheme)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }
}

fn check_rho_eps(rho: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::domain(format!("rho must be non-negative, got {rho}")));
    }
    Ok(())
}

/// `f_ε(ρ) = ln(ε² + ρ)`.
pub fn f_eps(rho: f64, epsilon: f64) -> Result<f64> {
    check_rho_eps(rho, epsilon)?;
    Ok((epsilon * epsilon + rho).ln())
}

/// `F_ε(ρ) = ∫₀^ρ ln(ε² + s) ds = ρ ln(ε² + ρ) + ε² ln(1 + ρ/ε²) - ρ`.
pub fn f_eps_antiderivative(rho: f64, epsilon: f64) -> Result<f64> {
    check_rho_eps(rho, epsilon)?;
    Ok(potential(rho, epsilon * epsilon))
}

#[inline]
pub(crate) fn potential(rho: f64, eps2: f64) -> f64 {
    rho * (eps2 + rho).ln() + eps2 * (rho / eps2).ln_1p() - rho
}

/// `u ln(ε² + u²)`; zero at `u = 0` because `ε > 0`.
#[inline]
fn log_force(u: f64, eps2: f64) -> f64 {
    u * (eps2 + u * u).ln()
}

/// Taylor start `u¹ = φ + τγ + (τ²/2)(δ_x²φ - φ - λ φ ln(ε² + φ²))`.
pub fn first_step(phi: &Field, gamma: &Field, grid: &Grid1D, tau: f64, params: &SchemeParams) -> Result<Field> {
    phi.check_grid(grid)?;
    gamma.check_grid(grid)?;
    check_tau(tau)?;
    let eps2 = params.epsilon * params.epsilon;
    let mut lap = vec![0.0; grid.len()];
    laplacian_into(phi.values(), 1.0 / (grid.h() * grid.h()), &mut lap);
    let half_t2 = 0.5 * tau * tau;
    let out: Vec<f64> = phi
        .iter()
        .zip(gamma.iter())
        .zip(&lap)
        .map(|((&p, &g), &l)| p + tau * g + half_t2 * (l - p - params.lambda * log_force(p, eps2)))
        .collect();
    let out = Field::new(out);
    if !out.is_finite() {
        return Err(Error::Overflow { step: 1, time: tau });
    }
    Ok(out)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::arg(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

/// Two consecutive time levels `u^{n-1}`, `u^n` and the running maximum of
/// `‖u^m‖_{l∞}` over `m = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    step_index: usize,
    u_prev: Field,
    u_curr: Field,
    amplitude_max: f64,
}

impl SolverState {
    /// Levels 0 and 1 from the initial data.
    pub fn start(phi: &Field, gamma: &Field, grid: &Grid1D, tau: f64, params: &SchemeParams) -> Result<Self> {
        phi.check_finite()?;
        gamma.check_finite()?;
        let u1 = first_step(phi, gamma, grid, tau, params)?;
        Self::from_levels(1, phi.clone(), u1)
    }

    pub fn from_levels(step_index: usize, u_prev: Field, u_curr: Field) -> Result<Self> {
        if step_index == 0 {
            return Err(Error::arg("step index of a solver state must be at least 1"));
        }
        if u_prev.len() != u_curr.len() {
            return Err(Error::arg(format!("time levels differ in length: {} vs {}", u_prev.len(), u_curr.len())));
        }
        let amplitude_max = norm_linf(&u_prev)?.max(norm_linf(&u_curr)?);
        Ok(Self { step_index, u_prev, u_curr, amplitude_max })
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn u_prev(&self) -> &Field {
        &self.u_prev
    }

    pub fn u_curr(&self) -> &Field {
        &self.u_curr
    }

    pub fn amplitude_max(&self) -> f64 {
        self.amplitude_max
    }

    pub fn time(&self, tau: f64) -> f64 {
        self.step_index as f64 * tau
    }

    pub fn into_levels(self) -> (Field, Field) {
        (self.u_prev, self.u_curr)
    }

    /// Shifts in `next` as level `n + 1`; returns the dropped level `n - 1`.
    fn accept(&mut self, next: Field) -> Field {
        let amp = next.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.amplitude_max = self.amplitude_max.max(amp);
        let old = std::mem::replace(&mut self.u_prev, std::mem::replace(&mut self.u_curr, next));
        self.step_index += 1;
        old
    }
}

/// Time stepper for a fixed grid, step size and scheme. The SIFD matrix is
/// factored once at construction.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid1D,
    tau: f64,
    params: SchemeParams,
    system: Option<CyclicTridiagonal>,
    scratch: Vec<f64>,
    rhs: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &Grid1D, tau: f64, params: &SchemeParams) -> Result<Self> {
        check_tau(tau)?;
        let system = match params.scheme {
            Scheme::Efd => None,
            Scheme::Sifd => Some(sifd_matrix(grid, tau)?),
        };
        Ok(Self {
            grid: *grid,
            tau,
            params: *params,
            system,
            scratch: vec![0.0; grid.len()],
            rhs: vec![0.0; grid.len()],
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// `u^{n+1}` from `state`, leaving `state` untouched.
    pub fn step(&mut self, state: &SolverState) -> Result<Field> {
        check_state(state, &self.grid)?;
        let mut out = vec![0.0; self.grid.len()];
        self.step_into(state, &mut out)?;
        Ok(Field::new(out))
    }

    /// Advances `state` by one level in place.
    pub fn advance(&mut self, state: &mut SolverState) -> Result<()> {
        check_state(state, &self.grid)?;
        let mut out = std::mem::take(&mut self.scratch);
        out.resize(self.grid.len(), 0.0);
        let res = self.step_into(state, &mut out);
        match res {
            Ok(()) => {
                let dropped = state.accept(Field::new(out));
                self.scratch = dropped.into_inner();
                Ok(())
            }
            Err(e) => {
                self.scratch = out;
                Err(e)
            }
        }
    }

    fn step_into(&mut self, state: &SolverState, out: &mut [f64]) -> Result<()> {
        let u = state.u_curr.values();
        let p = state.u_prev.values();
        let n = u.len();
        let h = self.grid.h();
        let inv_h2 = 1.0 / (h * h);
        let tau2 = self.tau * self.tau;
        let eps2 = self.params.epsilon * self.params.epsilon;
        let lambda = self.params.lambda;
        match &self.system {
            None => {
                for j in 0..n {
                    let (l, r) = neighbours(j, n);
                    let lap = (u[r] - 2.0 * u[j] + u[l]) * inv_h2;
                    out[j] = 2.0 * u[j] - p[j] + tau2 * (lap - u[j] - lambda * log_force(u[j], eps2));
                }
            }
            Some(system) => {
                let inv_tau2 = 1.0 / tau2;
                let rhs = &mut self.rhs;
                rhs.resize(n, 0.0);
                for j in 0..n {
                    let (l, r) = neighbours(j, n);
                    let lap_prev = (p[r] - 2.0 * p[j] + p[l]) * inv_h2;
                    rhs[j] =
                        (2.0 * u[j] - p[j]) * inv_tau2 + 0.5 * lap_prev - 0.5 * p[j] - lambda * log_force(u[j], eps2);
                }
                system.solve_into(rhs, out)?;
            }
        }
        if out.iter().any(|v| !v.is_finite()) {
            let step = state.step_index + 1;
            return Err(Error::Overflow { step, time: step as f64 * self.tau });
        }
        Ok(())
    }
}

#[inline]
fn neighbours(j: usize, n: usize) -> (usize, usize) {
    (if j == 0 { n - 1 } else { j - 1 }, if j + 1 == n { 0 } else { j + 1 })
}

fn check_state(state: &SolverState, grid: &Grid1D) -> Result<()> {
    state.u_prev.check_grid(grid)?;
    state.u_curr.check_grid(grid)
}

/// `(1/τ² + 1/2 + 1/h²) x_j - (1/(2h²))(x_{j+1} + x_{j-1})`, the level-`n+1`
/// operator of the SIFD scheme.
pub fn sifd_matrix(grid: &Grid1D, tau: f64) -> Result<CyclicTridiagonal> {
    check_tau(tau)?;
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let diag = 1.0 / (tau * tau) + 0.5 + inv_h2;
    let off = -0.5 * inv_h2;
    CyclicTridiagonal::constant(grid.len(), off, diag, off)
}

/// One EFD step:
/// `u^{n+1} = 2u^n - u^{n-1} + τ²(δ_x²u^n - u^n - λ u^n f_ε((u^n)²))`.
pub fn step_efd(state: &SolverState, grid: &Grid1D, tau: f64, params: &SchemeParams) -> Result<Field> {
    if params.scheme != Scheme::Efd {
        return Err(Error::arg("step_efd called with non-EFD parameters"));
    }
    Stepper::new(grid, tau, params)?.step(state)
}

/// One SIFD step; solves the cyclic tridiagonal system for level `n + 1`.
pub fn step_sifd(state: &SolverState, grid: &Grid1D, tau: f64, params: &SchemeParams) -> Result<Field> {
    if params.scheme != Scheme::Sifd {
        return Err(Error::arg("step_sifd called with non-SIFD parameters"));
    }
    Stepper::new(grid, tau, params)?.step(state)
}

/// `σ_max = max(|ln ε²|, |ln(ε² + A²)|)` for a trajectory of amplitude `A`.
pub fn sigma_max(epsilon: f64, amplitude_max: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if amplitude_max.is_nan() || amplitude_max < 0.0 {
        return Err(Error::domain(format!("amplitude must be non-negative, got {amplitude_max}")));
    }
    let eps2 = epsilon * epsilon;
    Ok(eps2.ln().abs().max((eps2 + amplitude_max * amplitude_max).ln().abs()))
}

/// Largest admissible time step for a given `σ_max`; `None` is unbounded.
///
/// SIFD: `τ ≤ 2/sqrt(σ - 1)` when `σ > 1`, unconditional otherwise.
/// EFD: `τ ≤ 2h / sqrt((σ + 1)h² + 4)`.
pub fn tau_limit(scheme: Scheme, h: f64, sigma: f64) -> Option<f64> {
    match scheme {
        Scheme::Sifd if sigma <= 1.0 => None,
        Scheme::Sifd => Some(2.0 / (sigma - 1.0).sqrt()),
        Scheme::Efd => Some(2.0 * h / ((sigma + 1.0) * h * h + 4.0).sqrt()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub scheme: Scheme,
    pub sigma_max: f64,
    pub tau: f64,
    /// `None` when the scheme is unconditionally stable for this `σ_max`.
    pub tau_limit: Option<f64>,
    pub satisfied: bool,
    /// `tau_limit / tau` when the limit is bounded.
    pub margin: Option<f64>,
}

pub fn stability_limit(params: &SchemeParams, grid: &Grid1D, sigma: f64, tau: f64) -> StabilityReport {
    let limit = tau_limit(params.scheme, grid.h(), sigma);
    StabilityReport {
        scheme: params.scheme,
        sigma_max: sigma,
        tau,
        tau_limit: limit,
        satisfied: limit.is_none_or(|l| tau <= l),
        margin: limit.map(|l| l / tau),
    }
}

/// Frozen-coefficient Fourier mode for the von Neumann analysis; the
/// nonlinearity `f_ε(u²)` is replaced by the constant `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationQuery {
    alpha: f64,
    mode_index: i64,
    n_points: usize,
    spacing: f64,
    tau: f64,
}

impl AmplificationQuery {
    /// `mode_index` must lie in `-⌊N/2⌋ ..= ⌈N/2⌉ - 1`.
    pub fn new(alpha: f64, mode_index: i64, n_points: usize, spacing: f64, tau: f64) -> Result<Self> {
        let n = n_points as i64;
        let (lo, hi) = (-(n / 2), (n + 1) / 2 - 1);
        if n_points == 0 || mode_index < lo || mode_index > hi {
            return Err(Error::arg(format!("mode index {mode_index} outside {lo}..={hi}")));
        }
        if spacing.is_nan() || spacing <= 0.0 {
            return Err(Error::arg(format!("spacing must be positive, got {spacing}")));
        }
        check_tau(tau)?;
        Ok(Self { alpha, mode_index, n_points, spacing, tau })
    }

    pub fn on_grid(alpha: f64, mode_index: i64, grid: &Grid1D, tau: f64) -> Result<Self> {
        Self::new(alpha, mode_index, grid.len(), grid.h(), tau)
    }

    /// `s_l = (2/h) sin(lπ/N)`.
    pub fn symbol(&self) -> f64 {
        2.0 / self.spacing * (self.mode_index as f64 * std::f64::consts::PI / self.n_points as f64).sin()
    }

    pub fn modes(n_points: usize) -> std::ops::RangeInclusive<i64> {
        let n = n_points as i64;
        -(n / 2)..=(n + 1) / 2 - 1
    }
}

/// `θ_l` of the characteristic equation `ξ² - 2θ_l ξ + 1 = 0` and the largest
/// root modulus.
pub fn amplification_factor(q: &AmplificationQuery, scheme: Scheme) -> (f64, f64) {
    let s2 = q.symbol().powi(2);
    let t2 = q.tau * q.tau;
    let theta = match scheme {
        Scheme::Sifd => (2.0 - q.alpha * t2) / (2.0 + t2 * (s2 + 1.0)),
        Scheme::Efd => (2.0 - t2 * (1.0 + q.alpha + s2)) / 2.0,
    };
    let modulus = if theta.abs() <= 1.0 { 1.0 } else { theta.abs() + (theta * theta - 1.0).sqrt() };
    (theta, modulus)
}
