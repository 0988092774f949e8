//! Reference solutions for error measurement and the injection operator that
//! brings a fine-grid field onto a coarser grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{steps_to, Grid1D, TimeMesh, MULTIPLE_TOL};
use crate::problems::ProblemSpec;
use crate::schemes::{Scheme, SchemeParams};
use crate::simulation::{run_simulation, InitialData, Snapshot, SnapshotRecorder};

/// Mesh of the fine-grid reference computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceResolution {
    pub h: f64,
    pub tau: f64,
}

impl ReferenceResolution {
    /// `h = 2⁻¹⁰`, `τ = 0.01 · 2⁻⁹`.
    pub fn paper_exact() -> Self {
        Self { h: 2f64.powi(-10), tau: 0.01 * 2f64.powi(-9) }
    }
}

impl Default for ReferenceResolution {
    /// `h = 2⁻⁸`, `τ = 0.01 · 2⁻⁷`.
    fn default() -> Self {
        Self { h: 2f64.powi(-8), tau: 0.01 * 2f64.powi(-7) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReferenceQuality {
    /// The closed-form Gausson (Example 1 with `λ = 1` only).
    Analytic,
    /// An EFD run on a fine mesh.
    FineGrid(ReferenceResolution),
}

#[derive(Debug, Clone)]
pub enum Reference {
    Analytic(ProblemSpec),
    FineGrid { grid: Grid1D, tau: f64, snapshots: Vec<Snapshot> },
}

impl Reference {
    /// Reference values at `time` on `grid`.
    pub fn at(&self, time: f64, grid: &Grid1D) -> Result<Field> {
        match self {
            Reference::Analytic(spec) => {
                Ok(Field::from_fn(grid, |x| spec.exact(x, time).expect("analytic reference without exact solution")))
            }
            Reference::FineGrid { grid: fine, snapshots, .. } => {
                let snap = snapshots
                    .iter()
                    .find(|s| (s.time - time).abs() <= MULTIPLE_TOL * time.abs().max(1.0))
                    .ok_or_else(|| Error::arg(format!("reference has no snapshot at t = {time}")))?;
                restrict(&snap.field, fine, grid)
            }
        }
    }

    pub fn fine_grid(&self) -> Option<&Grid1D> {
        match self {
            Reference::Analytic(_) => None,
            Reference::FineGrid { grid, .. } => Some(grid),
        }
    }
}

/// Injection: `coarse[j] = fine[j · N_fine / N_coarse]`.
pub fn restrict(fine: &Field, fine_grid: &Grid1D, coarse_grid: &Grid1D) -> Result<Field> {
    fine.check_grid(fine_grid)?;
    if fine_grid.a() != coarse_grid.a() || fine_grid.b() != coarse_grid.b() {
        return Err(Error::arg("restriction needs grids on the same interval"));
    }
    if !fine_grid.len().is_multiple_of(coarse_grid.len()) {
        return Err(Error::arg(format!(
            "fine grid size {} is not a multiple of coarse grid size {}",
            fine_grid.len(),
            coarse_grid.len()
        )));
    }
    let stride = fine_grid.len() / coarse_grid.len();
    Ok(Field::new(fine.values().iter().step_by(stride).copied().collect()))
}

/// Builds a reference provider able to serve every time in `target_times`.
///
/// The fine-grid path always uses the explicit scheme; every target time
/// must be an integer multiple of the reference `τ`.
pub fn make_reference(
    spec: &ProblemSpec,
    epsilon: f64,
    lambda: f64,
    target_times: &[f64],
    quality: ReferenceQuality,
) -> Result<Reference> {
    match quality {
        ReferenceQuality::Analytic => {
            if !spec.has_exact() {
                return Err(Error::arg(format!("{} has no analytic solution", spec.kind)));
            }
            if lambda != 1.0 {
                return Err(Error::arg("the Gausson is an exact solution only for lambda = 1"));
            }
            Ok(Reference::Analytic(*spec))
        }
        ReferenceQuality::FineGrid(res) => {
            let grid = spec.grid_with_spacing(res.h)?;
            let mut recorder = SnapshotRecorder::new(target_times, res.tau)?;
            let last = target_times.iter().map(|&t| steps_to(res.tau, t)).collect::<Result<Vec<_>>>()?;
            let n_steps = last.into_iter().max().unwrap_or(0).max(1);
            let mesh = TimeMesh::new(res.tau, n_steps)?;
            let params = SchemeParams::new(epsilon, lambda, Scheme::Efd)?;
            let init = InitialData::from_problem(spec, &grid)?;
            run_simulation(&init, &grid, &mesh, &params, false, &mut [&mut recorder])?;
            Ok(Reference::FineGrid { grid, tau: res.tau, snapshots: recorder.snapshots })
        }
    }
}
