//! Diagnostics and convergence studies built on top of the solvers.

pub mod energy;
pub mod reference;
pub mod studies;

pub use energy::{discrete_energy, EnergySample};
pub use reference::{make_reference, restrict, Reference, ReferenceQuality, ReferenceResolution};
pub use studies::{
    convergence_rate, discretization_convergence_study, epsilon_convergence_study, total_convergence_study,
    ConvergenceRow, ConvergenceTable, DiscretizationMode, EpsilonReference, StudyKind, StudyOptions, LIMIT_EPSILON,
    MIN_STUDY_EPSILON, TAU_OVER_H,
};
