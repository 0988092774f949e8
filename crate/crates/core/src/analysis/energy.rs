//! Discrete analogue of the conserved energy
//! `E = ∫ u_t² + u_x² + u² + λ F_ε(u²) dx`, evaluated between the two stored
//! levels of a [`SolverState`].

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Grid1D;
use crate::schemes::{potential, SchemeParams, SolverState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    /// Midpoint `t_{n-1/2}` of the two levels.
    pub time: f64,
    pub total: f64,
    pub kinetic: f64,
    pub gradient: f64,
    pub mass: f64,
    /// `λ ∫ F_ε(u²)`; negative where `|u|` is small.
    pub nonlinear: f64,
}

/// Rectangle-rule energy at `t_{n-1/2}`: kinetic term from `(u^n - u^{n-1})/τ`,
/// gradient, mass and potential terms averaged over the two levels.
pub fn discrete_energy(state: &SolverState, grid: &Grid1D, tau: f64, params: &SchemeParams) -> Result<EnergySample> {
    let u = state.u_curr();
    let p = state.u_prev();
    u.check_grid(grid)?;
    p.check_grid(grid)?;
    let h = grid.h();
    let n = grid.len();
    let eps2 = params.epsilon() * params.epsilon();
    let (u, p) = (u.values(), p.values());

    let mut kinetic = 0.0;
    let mut gradient = 0.0;
    let mut mass = 0.0;
    let mut pot = 0.0;
    for j in 0..n {
        let r = (j + 1) % n;
        let dt = (u[j] - p[j]) / tau;
        let du = (u[r] - u[j]) / h;
        let dp = (p[r] - p[j]) / h;
        kinetic += dt * dt;
        gradient += du * du + dp * dp;
        mass += u[j] * u[j] + p[j] * p[j];
        pot += potential(u[j] * u[j], eps2) + potential(p[j] * p[j], eps2);
    }
    let kinetic = h * kinetic;
    let gradient = 0.5 * h * gradient;
    let mass = 0.5 * h * mass;
    let nonlinear = params.lambda() * 0.5 * h * pot;
    Ok(EnergySample {
        time: (state.step_index() as f64 - 0.5) * tau,
        total: kinetic + gradient + mass + nonlinear,
        kinetic,
        gradient,
        mass,
        nonlinear,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::field::Field;
    use crate::schemes::Scheme;

    #[test]
    fn zero_state() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let st = SolverState::from_levels(3, Field::zeros(8), Field::zeros(8)).unwrap();
        let p = SchemeParams::with_epsilon(1e-3, Scheme::Efd).unwrap();
        let e = discrete_energy(&st, &g, 0.1, &p).unwrap();
        assert_eq!((e.total, e.kinetic, e.gradient, e.mass, e.nonlinear), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert_relative_eq!(e.time, 0.25, max_relative = 1e-15);
    }

    #[test]
    fn uniform_unit_state() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        let st = SolverState::from_levels(1, Field::constant(10, 1.0), Field::constant(10, 1.0)).unwrap();
        let p = SchemeParams::with_epsilon(1.0, Scheme::Efd).unwrap();
        let e = discrete_energy(&st, &g, 0.1, &p).unwrap();
        assert_eq!(e.kinetic, 0.0);
        assert_eq!(e.gradient, 0.0);
        assert_relative_eq!(e.mass, 1.0, max_relative = 1e-14);
        assert_relative_eq!(e.nonlinear, 2.0 * 2f64.ln() - 1.0, max_relative = 1e-14);
        assert_relative_eq!(e.total, 2.0 * 2f64.ln(), max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn parts_sum_to_total(
            prev in prop::collection::vec(-3.0f64..3.0, 20),
            curr in prop::collection::vec(-3.0f64..3.0, 20),
            eps in 1e-6f64..1.0,
            lambda in -2.0f64..2.0,
        ) {
            let g = Grid1D::new(-1.0, 1.0, 20).unwrap();
            let st = SolverState::from_levels(4, Field::new(prev), Field::new(curr)).unwrap();
            let p = SchemeParams::new(eps, lambda, Scheme::Sifd).unwrap();
            let e = discrete_energy(&st, &g, 0.05, &p).unwrap();
            let sum = e.kinetic + e.gradient + e.mass + e.nonlinear;
            let scale = e.kinetic.abs() + e.gradient.abs() + e.mass.abs() + e.nonlinear.abs();
            prop_assert!((e.total - sum).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
            prop_assert!(e.kinetic >= 0.0 && e.gradient >= 0.0 && e.mass >= 0.0);
        }
    }
}
