//! Grid functions, the periodic difference operators and the discrete
//! `l²`, semi-`H¹` and `l∞` norms.
//!
//! A [`Field`] stores exactly `N` values; neighbours are taken modulo `N`, so
//! the periodic identification `u_0 = u_N`, `u_{-1} = u_{N-1}` never needs to
//! be maintained by hand.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// One time level of grid values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn zeros(n: usize) -> Self {
        Field(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Field(vec![value; n])
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Field(grid.points().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Entry `j` with periodic wrap, `j` may be negative or `>= N`.
    #[inline]
    pub fn wrapped(&self, j: isize) -> f64 {
        let n = self.0.len() as isize;
        self.0[j.rem_euclid(n) as usize]
    }

    /// Cyclic shift: `result[j] = self[(j + shift) mod N]`.
    pub fn rotated(&self, shift: isize) -> Field {
        let n = self.0.len() as isize;
        Field((0..n).map(|j| self.0[(j + shift).rem_euclid(n) as usize]).collect())
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field(self.0.iter().map(|v| c * v).collect())
    }

    /// `self - other`, elementwise.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        same_len(self, other)?;
        Ok(Field(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub(crate) fn check_grid(&self, grid: &Grid1D) -> Result<()> {
        if self.len() != grid.len() {
            return Err(Error::arg(format!("field has {} values but the grid has {} points", self.len(), grid.len())));
        }
        Ok(())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.0.iter().position(|v| !v.is_finite()) {
            Some(j) => Err(Error::arg(format!("non-finite entry {} at index {j}", self.0[j]))),
            None => Ok(()),
        }
    }
}

impl Index<usize> for Field {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

impl IndexMut<usize> for Field {
    fn index_mut(&mut self, j: usize) -> &mut f64 {
        &mut self.0[j]
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field(v)
    }
}

fn same_len(u: &Field, v: &Field) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::arg(format!("length mismatch: {} vs {}", u.len(), v.len())));
    }
    Ok(())
}

/// `δ_x⁺ u_j = (u_{j+1} - u_j) / h`.
pub fn forward_diff(u: &Field, grid: &Grid1D) -> Result<Field> {
    u.check_grid(grid)?;
    let h = grid.h();
    let v = u.values();
    let n = v.len();
    Ok(Field((0..n).map(|j| (v[(j + 1) % n] - v[j]) / h).collect()))
}

/// `δ_x² u_j = (u_{j+1} - 2u_j + u_{j-1}) / h²`.
pub fn second_diff(u: &Field, grid: &Grid1D) -> Result<Field> {
    u.check_grid(grid)?;
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let v = u.values();
    let mut out = vec![0.0; v.len()];
    laplacian_into(v, inv_h2, &mut out);
    Ok(Field(out))
}

/// Periodic three-point Laplacian of `v`, scaled by `inv_h2`, into `out`.
#[inline]
pub(crate) fn laplacian_into(v: &[f64], inv_h2: f64, out: &mut [f64]) {
    let n = v.len();
    debug_assert_eq!(out.len(), n);
    out[0] = (v[1] - 2.0 * v[0] + v[n - 1]) * inv_h2;
    for j in 1..n - 1 {
        out[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv_h2;
    }
    out[n - 1] = (v[0] - 2.0 * v[n - 1] + v[n - 2]) * inv_h2;
}

/// Discrete inner product `(u, v) = h Σ u_j v_j`.
pub fn inner(u: &Field, v: &Field, grid: &Grid1D) -> Result<f64> {
    u.check_grid(grid)?;
    v.check_grid(grid)?;
    Ok(grid.h() * u.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>())
}

/// `‖u‖_{l²} = sqrt(h Σ u_j²)`.
pub fn norm_l2(u: &Field, grid: &Grid1D) -> Result<f64> {
    u.check_grid(grid)?;
    u.check_finite()?;
    Ok((grid.h() * u.iter().map(|v| v * v).sum::<f64>()).sqrt())
}

/// `‖u‖_{l∞} = max_j |u_j|`.
pub fn norm_linf(u: &Field) -> Result<f64> {
    u.check_finite()?;
    Ok(u.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Errors of a numerical field against a reference, in the three norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    pub h1: f64,
}

/// Difference `reference - numeric` measured in `l²`, `l∞` and `H¹`, where
/// `‖e‖_{H¹}² = ‖e‖_{l²}² + ‖δ_x⁺ e‖_{l²}²`.
pub fn error_report(numeric: &Field, reference: &Field, grid: &Grid1D) -> Result<ErrorReport> {
    numeric.check_grid(grid)?;
    reference.check_grid(grid)?;
    let diff = reference.sub(numeric)?;
    let l2 = norm_l2(&diff, grid)?;
    let linf = norm_linf(&diff)?;
    let semi = norm_l2(&forward_diff(&diff, grid)?, grid)?;
    let h1 = (l2 * l2 + semi * semi).sqrt();
    Ok(ErrorReport { l2, linf, h1 })
}
