//! Direct solver for periodic (cyclic) tridiagonal systems.
//!
//! Row `i` of the matrix reads `lower[i] x_{i-1} + diag[i] x_i + upper[i] x_{i+1}`
//! with indices taken modulo `n`, so `lower[0]` and `upper[n-1]` are the two
//! corner entries. The corners are split off as a rank-one update and handled
//! with the Sherman-Morrison formula on top of a Thomas factorization, which
//! is computed once and reused for every right-hand side.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    // Thomas factors of the corner-free matrix B
    inv_pivot: Vec<f64>,
    c_prime: Vec<f64>,
    // B z = w, with A = B + w vᵀ, w = (γ, 0, …, 0, upper[n-1]), v = (1, 0, …, 0, lower[0]/γ)
    z: Vec<f64>,
    v_last: f64,
    sm_denom: f64,
}

impl CyclicTridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n < 3 {
            return Err(Error::arg(format!("cyclic system needs n >= 3, got {n}")));
        }
        if lower.len() != n || upper.len() != n {
            return Err(Error::arg("lower, diag and upper must have equal length"));
        }
        if diag[0] == 0.0 {
            return Err(Error::Solver("zero leading diagonal entry".into()));
        }

        let gamma = -diag[0];
        let top_right = lower[0];
        let bottom_left = upper[n - 1];

        let mut b = diag.clone();
        b[0] -= gamma;
        b[n - 1] -= top_right * bottom_left / gamma;

        let mut inv_pivot = vec![0.0; n];
        let mut c_prime = vec![0.0; n];
        let mut pivot = b[0];
        for i in 0..n {
            if i > 0 {
                pivot = b[i] - lower[i] * c_prime[i - 1];
            }
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Solver(format!("zero pivot in row {i}")));
            }
            inv_pivot[i] = 1.0 / pivot;
            c_prime[i] = if i + 1 < n { upper[i] * inv_pivot[i] } else { 0.0 };
        }

        let mut this =
            Self { lower, diag, upper, inv_pivot, c_prime, z: vec![0.0; n], v_last: top_right / gamma, sm_denom: 0.0 };

        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = bottom_left;
        let mut z = vec![0.0; n];
        this.thomas(&u, &mut z);
        let denom = 1.0 + z[0] + this.v_last * z[n - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Solver("singular Sherman-Morrison correction".into()));
        }
        this.z = z;
        this.sm_denom = denom;
        Ok(this)
    }

    /// Matrix with the same three coefficients on every row.
    pub fn constant(n: usize, lower: f64, diag: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; n], vec![diag; n], vec![upper; n])
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn thomas(&self, rhs: &[f64], out: &mut [f64]) {
        let n = rhs.len();
        out[0] = rhs[0] * self.inv_pivot[0];
        for i in 1..n {
            out[i] = (rhs[i] - self.lower[i] * out[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            out[i] -= self.c_prime[i] * out[i + 1];
        }
    }

    /// Solves `A x = rhs` into `out`.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.len();
        if rhs.len() != n || out.len() != n {
            return Err(Error::arg(format!("right-hand side has length {}, system has {n} rows", rhs.len())));
        }
        self.thomas(rhs, out);
        let factor = (out[0] + self.v_last * out[n - 1]) / self.sm_denom;
        for (x, z) in out.iter_mut().zip(&self.z) {
            *x -= factor * z;
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; rhs.len()];
        self.solve_into(rhs, &mut out)?;
        Ok(out)
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| self.lower[i] * x[(i + n - 1) % n] + self.diag[i] * x[i] + self.upper[i] * x[(i + 1) % n])
            .collect()
    }
}
