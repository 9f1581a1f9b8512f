//! Continuous C2 approximations to second-order matrix initial value
//! problems `Y''(x) = f(x, Y(x))`, `Y(a) = Y0`, `Y'(a) = Y1`, by piecewise
//! cubic matrix splines built interval by interval.
//!
//! Each subinterval inherits its quadratic Taylor data from the previous
//! piece and contributes a single unknown coefficient matrix, fixed by
//! collocating the differential equation at the interval's right endpoint.
//! The resulting matrix equation is solved directly for linear right-hand
//! sides and by contraction fixed-point iteration otherwise; for steps
//! `h < sqrt(6/L)` (with `L` the Lipschitz constant of `f`) the iteration
//! map contracts with factor `L h^2 / 6`, so the spline exists and is
//! unique. The spline's second derivative is the piecewise-linear
//! interpolant of `f` along the computed trajectory, and the measured
//! global error scales as `O(h^2)` under step halving.
//!
//! ```
//! use matspline::{build, builtin_problem, error_table, FixedPointConfig};
//!
//! let (ivp, oracle) = builtin_problem("scalar-sine").unwrap();
//! let (spline, report) = build(&ivp, 10, &FixedPointConfig::default()).unwrap();
//! assert!(report.max_residual() < 1e-12);
//!
//! let table = error_table(&spline, &oracle, 101).unwrap();
//! assert!(table.max_error() < 1e-3);
//! ```

pub mod builder;
pub mod error;
pub mod ivp;
pub mod matrix;
pub mod spline;
pub mod verify;

pub use builder::{
    advance_beta, build, build_unchecked, max_step, min_subintervals, solve_coefficient,
    BuildReport, CoefficientSolve, FixedPointConfig, IntervalRecord, StepBound,
};
pub use error::{Error, Result};
pub use ivp::{
    builtin_problem, lipschitz_of, parse_problem, resolve_problem, MatrixIVP, Oracle,
    ParsedProblem, Rhs, BUILTIN_NAMES,
};
pub use matrix::{mat_cos, mat_sin, solve_linear, Matrix, DEFAULT_SERIES_TOL};
pub use spline::{CubicPiece, KnotJumps, MatrixCubicSpline, Partition};
pub use verify::{
    compare_to_reference, convergence_order, error_table, global_max_error, ErrorRow, ErrorTable,
    OrderEstimate, RowDiscrepancy, DEFAULT_SAMPLES_PER_INTERVAL, REFERENCE_MAX_ERRORS,
};
