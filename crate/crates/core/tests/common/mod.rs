#![allow(dead_code)]

//! Checks shared by the property tests and the acceptance harness. Every
//! oracle here recomputes its expectation from the defining formulas rather
//! than through the solver code paths it checks.

use logkg_core::analysis::discrete_energy;
use logkg_core::problems::{pde_residual, Gausson, ProblemSpec};
use logkg_core::schemes::{
    f_eps, f_eps_antiderivative, first_step, sigma_max, stability_limit, step_efd, step_sifd, Scheme, SchemeParams,
    SolverState, Stepper,
};
use logkg_core::simulation::{run_simulation, EnergySampler, InitialData};
use logkg_core::{forward_diff, inner, norm_linf, second_diff, Field, Grid1D, TimeMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> Field {
    Field::new((0..n).map(|_| rng.gen_range(-amp..amp)).collect())
}

/// Radical inverse of `i` in `base`.
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Largest `|residual|` of the Gausson against the unregularized equation at
/// `count` Halton points in `[-4, 4] × [0, 1]`.
pub fn gausson_residual_max(count: u64, probe: f64) -> f64 {
    let g = Gausson::default();
    (1..=count)
        .map(|i| {
            let x = -4.0 + 8.0 * halton(i, 2);
            let t = halton(i, 3);
            pde_residual(|x, t| g.value(x, t), x, t, 0.0, 1.0, probe).unwrap().abs()
        })
        .fold(0.0, f64::max)
}

pub fn relative_linf(a: &Field, b: &Field) -> f64 {
    let diff = a.sub(b).unwrap();
    norm_linf(&diff).unwrap() / norm_linf(b).unwrap().max(f64::MIN_POSITIVE)
}

pub fn example1_start(h: f64, tau: f64, params: &SchemeParams) -> (Grid1D, SolverState) {
    let spec = ProblemSpec::example1();
    let grid = spec.grid_with_spacing(h).unwrap();
    let init = InitialData::from_problem(&spec, &grid).unwrap();
    let st = SolverState::start(&init.phi, &init.gamma, &grid, tau, params).unwrap();
    (grid, st)
}

/// Runs `steps` forward, swaps the last two levels, runs `steps` back and
/// returns the relative `l∞` distance to the starting level together with
/// the worst single-step reversal error.
pub fn reversibility(scheme: Scheme, steps: usize) -> (f64, f64) {
    let params = SchemeParams::with_epsilon(1e-3, scheme).unwrap();
    let (h, tau) = (0.125, 0.01);
    let (grid, start) = example1_start(h, tau, &params);
    let mut stepper = Stepper::new(&grid, tau, &params).unwrap();
    let mut st = start.clone();
    let mut per_step = 0.0_f64;
    for _ in 0..steps {
        let prev = st.u_prev().clone();
        stepper.advance(&mut st).unwrap();
        let back = SolverState::from_levels(1, st.u_curr().clone(), st.u_prev().clone()).unwrap();
        per_step = per_step.max(relative_linf(&stepper.step(&back).unwrap(), &prev));
    }
    let (a, b) = st.into_levels();
    let mut back = SolverState::from_levels(1, b, a).unwrap();
    for _ in 0..steps {
        stepper.advance(&mut back).unwrap();
    }
    (relative_linf(back.u_curr(), start.u_prev()), per_step)
}

/// Largest relative violation of `(δ²u, v) = -(δ⁺u, δ⁺v)` over random fields.
pub fn summation_by_parts_error(trials: usize) -> f64 {
    let mut r = rng(11);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let n = r.gen_range(4..200);
        let grid = Grid1D::new(-1.0, r.gen_range(0.0..5.0), n).unwrap();
        let u = random_field(&mut r, n, 3.0);
        let v = random_field(&mut r, n, 3.0);
        let d2 = second_diff(&u, &grid).unwrap();
        let lhs = inner(&d2, &v, &grid).unwrap();
        let rhs = -inner(&forward_diff(&u, &grid).unwrap(), &forward_diff(&v, &grid).unwrap(), &grid).unwrap();
        let scale = grid.h() * d2.iter().zip(v.iter()).map(|(a, b)| (a * b).abs()).sum::<f64>();
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    worst
}

pub fn zero_preserved(scheme: Scheme) -> bool {
    let grid = Grid1D::new(-16.0, 16.0, 64).unwrap();
    [1e-9, 1e-3, 1.0].iter().all(|&eps| {
        let params = SchemeParams::with_epsilon(eps, scheme).unwrap();
        let st = SolverState::from_levels(3, Field::zeros(64), Field::zeros(64)).unwrap();
        let next = match scheme {
            Scheme::Efd => step_efd(&st, &grid, 0.1, &params),
            Scheme::Sifd => step_sifd(&st, &grid, 0.1, &params),
        }
        .unwrap();
        next.iter().all(|&v| v == 0.0)
    })
}

/// Worst relative deviation from `step(rotate(state)) = rotate(step(state))`.
pub fn shift_equivariance_error(scheme: Scheme) -> f64 {
    let mut r = rng(5);
    let n = 96;
    let grid = Grid1D::new(-4.0, 4.0, n).unwrap();
    let params = SchemeParams::with_epsilon(1e-2, scheme).unwrap();
    let mut stepper = Stepper::new(&grid, 0.02, &params).unwrap();
    let (p, u) = (random_field(&mut r, n, 1.5), random_field(&mut r, n, 1.5));
    let base = stepper.step(&SolverState::from_levels(1, p.clone(), u.clone()).unwrap()).unwrap();
    let mut worst = 0.0_f64;
    for k in [1, 7, -13, 48, 95] {
        let shifted = SolverState::from_levels(1, p.rotated(k), u.rotated(k)).unwrap();
        let out = stepper.step(&shifted).unwrap();
        worst = worst.max(relative_linf(&out, &base.rotated(k)));
    }
    worst
}

/// Relative `l²` residual of the SIFD solve, with the matrix and right-hand
/// side written out from the scheme definition.
pub fn sifd_solve_residual(seed: u64) -> f64 {
    let mut r = rng(seed);
    let n = r.gen_range(8..300);
    let grid = Grid1D::new(-16.0, 16.0, n).unwrap();
    let h = grid.h();
    let tau = r.gen_range(0.001..0.5);
    let eps = 10f64.powf(r.gen_range(-7.0..0.0));
    let lambda = r.gen_range(-1.0..2.0);
    let params = SchemeParams::new(eps, lambda, Scheme::Sifd).unwrap();
    let (p, u) = (random_field(&mut r, n, 2.0), random_field(&mut r, n, 2.0));
    let next = step_sifd(&SolverState::from_levels(1, p.clone(), u.clone()).unwrap(), &grid, tau, &params).unwrap();
    let w = |f: &Field, j: isize| f.wrapped(j);
    let mut res2 = 0.0;
    let mut rhs2 = 0.0;
    for j in 0..n as isize {
        let lhs = (1.0 / (tau * tau) + 0.5 + 1.0 / (h * h)) * w(&next, j)
            - (w(&next, j + 1) + w(&next, j - 1)) / (2.0 * h * h);
        let uj = w(&u, j);
        let rhs = (2.0 * uj - w(&p, j)) / (tau * tau) + 0.5 * (w(&p, j + 1) - 2.0 * w(&p, j) + w(&p, j - 1)) / (h * h)
            - 0.5 * w(&p, j)
            - lambda * uj * f_eps(uj * uj, eps).unwrap();
        res2 += (lhs - rhs).powi(2);
        rhs2 += rhs * rhs;
    }
    (res2 / rhs2).sqrt()
}

/// Worst relative gap between a centred difference of `F_ε` and `f_ε`.
pub fn antiderivative_consistency() -> f64 {
    let mut worst = 0.0_f64;
    for eps in [1e-3, 1.0] {
        for rho in [0.1, 1.0, 10.0] {
            let d = 1e-5 * rho;
            let fd =
                (f_eps_antiderivative(rho + d, eps).unwrap() - f_eps_antiderivative(rho - d, eps).unwrap()) / (2.0 * d);
            let exact = f_eps(rho, eps).unwrap();
            worst = worst.max((fd - exact).abs() / exact.abs().max(1e-3));
        }
    }
    worst
}

/// Worst relative gap between an energy sample's total and its parts.
pub fn energy_identity_error(trials: usize) -> f64 {
    let mut r = rng(23);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let n = r.gen_range(4..128);
        let grid = Grid1D::new(0.0, r.gen_range(0.5..40.0), n).unwrap();
        let params =
            SchemeParams::new(10f64.powf(r.gen_range(-7.0..0.0)), r.gen_range(-2.0..2.0), Scheme::Efd).unwrap();
        let st = SolverState::from_levels(2, random_field(&mut r, n, 2.0), random_field(&mut r, n, 2.0)).unwrap();
        let e = discrete_energy(&st, &grid, r.gen_range(0.001..0.1), &params).unwrap();
        let parts = [e.kinetic, e.gradient, e.mass, e.nonlinear];
        let scale: f64 = parts.iter().map(|v| v.abs()).sum();
        worst = worst.max((e.total - parts.iter().sum::<f64>()).abs() / scale);
    }
    worst
}

/// `max_j |u_j - u_{N-j}|` at `T` for Example 2 (even data).
pub fn example2_symmetry_drift(scheme: Scheme, h: f64, final_time: f64) -> f64 {
    let spec = ProblemSpec::example2();
    let grid = spec.grid_with_spacing(h).unwrap();
    let init = InitialData::from_problem(&spec, &grid).unwrap();
    let tau = 0.01 * h;
    let mesh = TimeMesh::from_horizon(tau, final_time).unwrap();
    let params = SchemeParams::with_epsilon(1e-3, scheme).unwrap();
    let out = run_simulation(&init, &grid, &mesh, &params, false, &mut []).unwrap();
    let u = out.state.u_curr();
    let n = u.len();
    (1..n).map(|j| (u[j] - u[n - j]).abs()).fold(0.0, f64::max)
}

/// Relative energy drift over `[0, 1]`, EFD on Example 1 with `τ = 0.01 h`.
pub fn energy_drift(h: f64, epsilon: f64) -> f64 {
    let spec = ProblemSpec::example1();
    let grid = spec.grid_with_spacing(h).unwrap();
    let init = InitialData::from_problem(&spec, &grid).unwrap();
    let mesh = TimeMesh::from_horizon(0.01 * h, 1.0).unwrap();
    let params = SchemeParams::with_epsilon(epsilon, Scheme::Efd).unwrap();
    let mut sampler = EnergySampler::new(1);
    run_simulation(&init, &grid, &mesh, &params, false, &mut [&mut sampler]).unwrap();
    sampler.relative_drift().unwrap()
}

/// `‖u¹ - u(·, τ)‖_{l∞}` for the Gausson on a fixed fine grid.
pub fn first_step_error(h: f64, tau: f64) -> f64 {
    let spec = ProblemSpec::example1();
    let grid = spec.grid_with_spacing(h).unwrap();
    let init = InitialData::from_problem(&spec, &grid).unwrap();
    let params = SchemeParams::with_epsilon(1e-7, Scheme::Efd).unwrap();
    let u1 = first_step(&init.phi, &init.gamma, &grid, tau, &params).unwrap();
    let exact = Field::from_fn(&grid, |x| spec.exact(x, tau).unwrap());
    norm_linf(&u1.sub(&exact).unwrap()).unwrap()
}

/// Largest amplitude reached before `final_time` and whether the run
/// overflowed, for EFD/SIFD on Example 1 at `factor` times the pre-run limit.
pub struct StabilityProbe {
    pub tau: f64,
    pub tau_limit: Option<f64>,
    pub max_amplitude: f64,
    pub overflowed: bool,
}

pub fn stability_probe(
    scheme: Scheme,
    epsilon: f64,
    h: f64,
    tau: Option<f64>,
    factor: f64,
    final_time: f64,
) -> StabilityProbe {
    use logkg_core::simulation::{pre_run_check, AmplitudeTrace};
    let spec = ProblemSpec::example1();
    let grid = spec.grid_with_spacing(h).unwrap();
    let init = InitialData::from_problem(&spec, &grid).unwrap();
    let params = SchemeParams::with_epsilon(epsilon, scheme).unwrap();
    let probe = pre_run_check(&init.phi, &grid, 1.0, &params).unwrap();
    let tau = tau.unwrap_or_else(|| factor * probe.tau_limit.expect("bounded limit"));
    let mesh = TimeMesh::covering(tau, final_time).unwrap();
    let mut trace = AmplitudeTrace::new(1);
    match run_simulation(&init, &grid, &mesh, &params, true, &mut [&mut trace]) {
        Ok(out) => StabilityProbe {
            tau,
            tau_limit: probe.tau_limit,
            max_amplitude: out.state.amplitude_max(),
            overflowed: false,
        },
        Err(_) => StabilityProbe { tau, tau_limit: probe.tau_limit, max_amplitude: trace.max(), overflowed: true },
    }
}

/// Largest `|ξ_l|` over all modes at `τ` just under the limit computed with
/// `α = σ`. Exactly on the limit the worst mode sits at `θ = -1`, where the
/// square root in `ξ` magnifies a rounding error of `θ` to `~1e-8`.
pub fn amplification_consistency(scheme: Scheme, sigma: f64, grid: &Grid1D) -> f64 {
    use logkg_core::schemes::{amplification_factor, AmplificationQuery};
    let params = SchemeParams::with_epsilon(1.0, scheme).unwrap();
    let tau = stability_limit(&params, grid, sigma, 1.0).tau_limit.map_or(10.0, |t| t * (1.0 - 1e-9));
    AmplificationQuery::modes(grid.len())
        .map(|l| amplification_factor(&AmplificationQuery::on_grid(sigma, l, grid, tau).unwrap(), scheme).1)
        .fold(0.0, f64::max)
}

pub fn sigma_for(epsilon: f64, amplitude: f64) -> f64 {
    sigma_max(epsilon, amplitude).unwrap()
}
