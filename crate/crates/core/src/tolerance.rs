//! Numerical tolerances shared by validation code.
//!
//! Catalog bounds are exact rationals and never pass through here; only
//! acceptance of externally supplied matrices is governed by these values.

use std::env;

/// Environment variable that overrides the validation tolerances
/// (hermiticity, trace and positivity floor) with a single value.
pub const TOLERANCE_ENV: &str = "LURCERT_VALIDATION_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise |a_ij - conj(a_ji)| accepted as Hermitian.
    pub hermiticity: f64,
    /// Max |Tr(rho) - 1|.
    pub trace: f64,
    /// Eigen-residual budget per dimension for the Jacobi solver.
    pub eigen_residual: f64,
    /// Most negative eigenvalue still accepted as a density matrix.
    pub positivity_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-9,
            trace: 1e-9,
            eigen_residual: 1e-8,
            positivity_floor: -1e-9,
        }
    }
}

impl Tolerances {
    /// Defaults, with [`TOLERANCE_ENV`] applied when set to a positive finite number.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        if let Some(v) = env::var(TOLERANCE_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
        {
            tol.hermiticity = v;
            tol.trace = v;
            tol.positivity_floor = -v;
        }
        tol
    }
}
