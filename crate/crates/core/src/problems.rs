//! Benchmark problems: the travelling Gausson (Example 1), which has a closed
//! form, and the `sech(x²)` pulse at rest (Example 2), which does not.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid1D;

pub const DEFAULT_DOMAIN: (f64, f64) = (-16.0, 16.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Example1,
    Example2,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Example1 => "example1",
            ProblemKind::Example2 => "example2",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "example1" | "gausson" => Ok(ProblemKind::Example1),
            "example2" => Ok(ProblemKind::Example2),
            other => Err(Error::arg(format!("unknown problem '{other}' (expected example1 or example2)"))),
        }
    }
}

/// Wave parameters of the Gausson `exp(-(kx - ct)² / (2(c² - k²)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gausson {
    pub c: f64,
    pub k: f64,
}

impl Gausson {
    pub fn new(c: f64, k: f64) -> Result<Self> {
        if !(c.is_finite() && k.is_finite()) || c * c <= k * k {
            return Err(Error::domain(format!("Gausson needs c² > k², got c = {c}, k = {k}")));
        }
        Ok(Self { c, k })
    }

    fn denom(&self) -> f64 {
        2.0 * (self.c * self.c - self.k * self.k)
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        let s = self.k * x - self.c * t;
        (-s * s / self.denom()).exp()
    }

    /// `∂_t u(x, 0) = (ckx/(c² - k²)) exp(-k²x² / (2(c² - k²)))`.
    pub fn velocity0(&self, x: f64) -> f64 {
        let d = self.denom();
        2.0 * self.c * self.k * x / d * (-(self.k * x).powi(2) / d).exp()
    }
}

impl Default for Gausson {
    fn default() -> Self {
        Self { c: 2.0, k: 1.0 }
    }
}

/// Closed-form Gausson; solves the unregularized equation with `λ = 1`.
pub fn example1_exact(x: f64, t: f64, c: f64, k: f64) -> Result<f64> {
    Ok(Gausson::new(c, k)?.value(x, t))
}

/// `2 / (e^{-x²} + e^{x²})`, i.e. `sech(x²)`.
pub fn example2_phi(x: f64) -> f64 {
    let x2 = x * x;
    2.0 / ((-x2).exp() + x2.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub domain: (f64, f64),
    pub wave: Option<Gausson>,
}

impl ProblemSpec {
    pub fn example1() -> Self {
        Self { kind: ProblemKind::Example1, domain: DEFAULT_DOMAIN, wave: Some(Gausson::default()) }
    }

    pub fn example1_with(c: f64, k: f64) -> Result<Self> {
        Ok(Self { wave: Some(Gausson::new(c, k)?), ..Self::example1() })
    }

    pub fn example2() -> Self {
        Self { kind: ProblemKind::Example2, domain: DEFAULT_DOMAIN, wave: None }
    }

    pub fn from_kind(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::Example1 => Self::example1(),
            ProblemKind::Example2 => Self::example2(),
        }
    }

    pub fn with_domain(self, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::arg(format!("domain [{a}, {b}] must satisfy b > a")));
        }
        Ok(Self { domain: (a, b), ..self })
    }

    pub fn phi(&self, x: f64) -> f64 {
        match (self.kind, self.wave) {
            (ProblemKind::Example1, Some(w)) => w.value(x, 0.0),
            (ProblemKind::Example1, None) => Gausson::default().value(x, 0.0),
            (ProblemKind::Example2, _) => example2_phi(x),
        }
    }

    pub fn gamma(&self, x: f64) -> f64 {
        match self.kind {
            ProblemKind::Example1 => self.wave.unwrap_or_default().velocity0(x),
            ProblemKind::Example2 => 0.0,
        }
    }

    pub fn has_exact(&self) -> bool {
        self.kind == ProblemKind::Example1
    }

    /// Closed-form solution of the unregularized problem, when one exists.
    pub fn exact(&self, x: f64, t: f64) -> Option<f64> {
        match self.kind {
            ProblemKind::Example1 => Some(self.wave.unwrap_or_default().value(x, t)),
            ProblemKind::Example2 => None,
        }
    }

    pub fn grid(&self, n_points: usize) -> Result<Grid1D> {
        Grid1D::new(self.domain.0, self.domain.1, n_points)
    }

    pub fn grid_with_spacing(&self, h: f64) -> Result<Grid1D> {
        Grid1D::with_spacing(self.domain.0, self.domain.1, h)
    }

    /// Largest `|φ|` within one mesh width of either end of the domain; the
    /// periodic truncation is only trusted when this is below `1e-12`.
    pub fn boundary_tail(&self, grid: &Grid1D) -> f64 {
        let (a, b) = self.domain;
        let h = grid.h();
        [a, a + h, b - h, b].iter().map(|&x| self.phi(x).abs()).fold(0.0, f64::max)
    }
}

/// Samples `(φ(x_j), γ(x_j))`.
pub fn sample_initial_data(spec: &ProblemSpec, grid: &Grid1D) -> Result<(Field, Field)> {
    let (a, b) = spec.domain;
    let tol = 1e-12 * (b - a);
    if grid.a() < a - tol || grid.b() > b + tol {
        return Err(Error::arg(format!(
            "grid [{}, {}] lies outside the problem domain [{a}, {b}]",
            grid.a(),
            grid.b()
        )));
    }
    Ok((Field::from_fn(grid, |x| spec.phi(x)), Field::from_fn(grid, |x| spec.gamma(x))))
}

/// Fourth-order centred second derivative of `f` at `s` with spacing `d`.
fn d2_fourth_order(f: impl Fn(f64) -> f64, s: f64, d: f64) -> f64 {
    (-f(s + 2.0 * d) + 16.0 * f(s + d) - 30.0 * f(s) + 16.0 * f(s - d) - f(s - 2.0 * d)) / (12.0 * d * d)
}

/// Pointwise residual `u_tt - u_xx + u + λ u ln(ε² + u²)` of a candidate
/// solution, with both second derivatives taken by fourth-order centred
/// differences of spacing `probe`. With `epsilon = 0` the unregularized
/// `ln(u²)` is used.
pub fn pde_residual(
    u_fn: impl Fn(f64, f64) -> f64,
    x: f64,
    t: f64,
    epsilon: f64,
    lambda: f64,
    probe: f64,
) -> Result<f64> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!("epsilon must be non-negative, got {epsilon}")));
    }
    if !(probe > 0.0 && probe.is_finite()) {
        return Err(Error::arg(format!("probe spacing must be positive, got {probe}")));
    }
    let u = u_fn(x, t);
    let rho = epsilon * epsilon + u * u;
    if rho == 0.0 {
        return Err(Error::domain(format!("ln(u²) is singular: u({x}, {t}) = 0 with epsilon = 0")));
    }
    let u_tt = d2_fourth_order(|s| u_fn(x, s), t, probe);
    let u_xx = d2_fourth_order(|s| u_fn(s, t), x, probe);
    Ok(u_tt - u_xx + u + lambda * u * rho.ln())
}
