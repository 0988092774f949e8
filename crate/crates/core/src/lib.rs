//! Finite difference solvers for the regularized logarithmic Klein-Gordon
//! equation on a one-dimensional periodic domain,
//!
//! ```text
//! u_tt - u_xx + u + λ u ln(ε² + u²) = 0,   x ∈ (a, b),  t > 0,
//! u(x, 0) = φ(x),  u_t(x, 0) = γ(x),
//! ```
//!
//! together with the machinery needed to study it numerically: discrete
//! norms and difference operators ([`field`]), the semi-implicit (SIFD) and
//! explicit (EFD) three-level schemes with their von Neumann stability
//! bounds ([`schemes`]), the Gausson benchmark problems ([`problems`]) and the
//! convergence-study drivers ([`analysis`]).

pub mod analysis;
pub mod error;
pub mod field;
pub mod grid;
pub mod problems;
pub mod schemes;
pub mod simulation;
pub mod tridiag;

pub use error::{Error, Result};
pub use field::{error_report, forward_diff, inner, norm_l2, norm_linf, second_diff, ErrorReport, Field};
pub use grid::{Grid1D, TimeMesh};
pub use schemes::{Scheme, SchemeParams, SolverState};
