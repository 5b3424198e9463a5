//! Numerical tolerances shared by the library, the `verify` command and the
//! test suites.

/// Maximum entry of `|m - m†|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Accepted deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-10;

/// Most negative eigenvalue a density matrix may carry.
pub const MIN_EIGENVALUE_TOL: f64 = -1e-10;

/// Off-diagonal Frobenius norm at which the Jacobi sweeps stop, relative to
/// `max(1, ‖m‖_F)`.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Upper bound on the number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Truncation order of the Taylor series inside scaling-and-squaring.
pub const EXPM_TAYLOR_ORDER: usize = 18;

/// The matrix handed to the Taylor series has 1-norm at most this value.
pub const EXPM_SCALED_NORM: f64 = 0.5;

/// Eigenvalues at or below this value are treated as zero before square
/// roots and logarithms.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;

/// Default magnitude below which an entry counts as absent when reading an
/// X-state pattern.
pub const X_STATE_TOL: f64 = 1e-8;

/// Slack on the X-state population and positivity constraints.
pub const X_STATE_POPULATION_SLACK: f64 = 1e-12;

/// Entries of the stationary three-qubit state outside the conditional-block
/// pattern must stay below this magnitude.
pub const GHZ_PATTERN_TOL: f64 = 1e-9;

/// Conditional blocks: `rho_vh` must equal `rho_hv†` to this precision.
pub const BLOCK_ADJOINT_TOL: f64 = 1e-12;

/// Conditional blocks: smallest eigenvalue of the assembled 8×8 state.
pub const BLOCK_PSD_TOL: f64 = -1e-9;

/// Measurement outcomes below this probability are impossible.
pub const OUTCOME_PROBABILITY_FLOOR: f64 = 1e-12;

/// Residual `‖L₀ vec(ρ)‖` below which a state counts as stationary.
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;

/// RK4 step bound in units of `1/γ`.
pub const RK4_MAX_STEP_GAMMA: f64 = 0.05;

/// RK4 step bound in units of the Rabi period `2π/Ω₁`.
pub const RK4_MAX_STEP_RABI: f64 = 0.05;
