//! Error type shared by all modules.

/// Everything that can go wrong in the toolkit.
///
/// Numerical non-convergence of the cylinder solver is deliberately *not*
/// an `Error`: failing to connect two boundary profiles is an expected,
/// reportable outcome (see [`crate::cylinder::Verdict`]), not a fault.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a mathematical precondition (x ≤ 0, k² ≥ 1, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// tanh-sinh refinement hit the maximum level with the scaled error
    /// estimate still above 10·tol.
    #[error(
        "quadrature did not converge: scaled error estimate {error_estimate:.3e} > 10*tol ({tol:.1e})"
    )]
    QuadratureNonConvergence { error_estimate: f64, tol: f64 },

    /// `tau_for_period` target outside the open interval of attainable
    /// half-periods.
    #[error("target half-period {target:.6e} not strictly between the limits ({lo:.6e}, {hi:.6e})")]
    PeriodOutOfRange { target: f64, lo: f64, hi: f64 },

    /// Requested angular frequency is not among the admissible ones for
    /// these parameters.
    #[error("frequency j={j} is not admissible for (alpha={alpha}, p={p})")]
    NotAdmissible { j: u32, alpha: f64, p: f64 },

    /// Component index above N₀ in the admissibility predicate.
    #[error("component index out of range: m={m}, n={n} with n0={n0}")]
    ComponentOutOfRange { m: u32, n: u32, n0: u32 },

    /// The profile ODE integration left the positive cone.
    #[error("ODE integration left (0,∞) at theta={theta:.6e} (w={w:.6e})")]
    IntegratorFailure { theta: f64, w: f64 },

    /// Malformed grid request (size, spacing, compatibility).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
