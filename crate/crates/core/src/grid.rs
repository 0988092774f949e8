//! Uniform periodic space grid and uniform time mesh.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when a time (or length) must be an integer
/// multiple of a step.
pub const MULTIPLE_TOL: f64 = 1e-12;

/// Uniform periodic mesh on `[a, b)` with `N` points, `x_j = a + j h`.
///
/// Index `N` is identified with index `0`; only `N` values are stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::arg(format!("grid interval [{a}, {b}] must satisfy b > a")));
        }
        if n_points < 4 {
            return Err(Error::arg(format!("grid needs at least 4 points, got {n_points}")));
        }
        let spacing = (b - a) / n_points as f64;
        Ok(Self { a, b, n_points, spacing })
    }

    /// Grid whose spacing is `h`; `(b - a) / h` must be an integer.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::arg(format!("mesh size h must be positive, got {h}")));
        }
        let ratio = (b - a) / h;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * n {
            return Err(Error::arg(format!("interval length {} is not an integer multiple of h = {h}", b - a)));
        }
        Self::new(a, b, n as usize)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.spacing
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.a + j as f64 * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }

    /// Whether `other` shares the interval and its points are a subset of ours.
    pub fn refines(&self, other: &Grid1D) -> bool {
        self.a == other.a && self.b == other.b && self.n_points.is_multiple_of(other.n_points)
    }
}

/// Uniform time levels `t_n = n τ`, `n = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    tau: f64,
    n_steps: usize,
}

impl TimeMesh {
    pub fn new(tau: f64, n_steps: usize) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::arg(format!("tau must be positive, got {tau}")));
        }
        if n_steps == 0 {
            return Err(Error::arg("time mesh needs at least one step"));
        }
        Ok(Self { tau, n_steps })
    }

    /// Mesh reaching exactly `final_time`; rejects a horizon that is not an
    /// integer number of steps.
    pub fn from_horizon(tau: f64, final_time: f64) -> Result<Self> {
        if !(final_time > 0.0 && final_time.is_finite()) {
            return Err(Error::arg(format!("final time must be positive, got {final_time}")));
        }
        let n = steps_to(tau, final_time)?;
        Self::new(tau, n)
    }

    /// Smallest mesh whose final time is at least `final_time`.
    pub fn covering(tau: f64, final_time: f64) -> Result<Self> {
        if !(final_time > 0.0 && final_time.is_finite()) {
            return Err(Error::arg(format!("final time must be positive, got {final_time}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::arg(format!("tau must be positive, got {tau}")));
        }
        let ratio = final_time / tau;
        let n = if (ratio - ratio.round()).abs() <= MULTIPLE_TOL * ratio { ratio.round() } else { ratio.ceil() };
        Self::new(tau, n as usize)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn final_time(&self) -> f64 {
        self.n_steps as f64 * self.tau
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.tau
    }
}

/// Number of steps of size `tau` that reach `time`, which must be an integer
/// multiple of `tau` to within [`MULTIPLE_TOL`] relative.
pub fn steps_to(tau: f64, time: f64) -> Result<usize> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::arg(format!("tau must be positive, got {tau}")));
    }
    if !(time >= 0.0 && time.is_finite()) {
        return Err(Error::arg(format!("time must be non-negative, got {time}")));
    }
    let ratio = time / tau;
    let n = ratio.round();
    if (ratio - n).abs() > MULTIPLE_TOL * ratio.max(1.0) {
        return Err(Error::arg(format!("time {time} is not an integer multiple of tau = {tau}")));
    }
    Ok(n as usize)
}
