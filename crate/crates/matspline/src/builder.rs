//! Interval-by-interval construction of the spline.
//!
//! Each interval contributes one unknown matrix: the cubic coefficient times
//! six. The quadratic part of a piece (its beta data) is inherited from the
//! previous piece's value and first two derivatives at the shared knot, which
//! makes the spline C2 by construction. The unknown is fixed by requiring the
//! differential equation to hold at the interval's right endpoint, giving a
//! matrix fixed-point equation
//!
//! `A = (1/h) [ f(x_next, beta(x_next) + (h^3/6) A) - beta''(x_next) ]`
//!
//! whose map contracts with factor `L h^2 / 6`. For `h < sqrt(6/L)` the
//! fixed point is unique; for a linear right-hand side the equation is solved
//! directly instead.

use crate::error::{Error, Result};
use crate::ivp::{lipschitz_of, MatrixIVP, Rhs};
use crate::matrix::{solve_linear, Matrix};
use crate::spline::{CubicPiece, MatrixCubicSpline, Partition};

/// Largest admissible step for a given Lipschitz constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepBound {
    /// `h` must stay strictly below this value (`sqrt(6/L)`).
    Bounded(f64),
    /// `L = 0`: any positive step is admissible.
    Unbounded,
}

impl StepBound {
    pub fn allows(&self, h: f64) -> bool {
        match *self {
            StepBound::Bounded(limit) => h > 0.0 && h < limit,
            StepBound::Unbounded => h > 0.0,
        }
    }

    pub fn limit(&self) -> Option<f64> {
        match *self {
            StepBound::Bounded(limit) => Some(limit),
            StepBound::Unbounded => None,
        }
    }
}

impl std::fmt::Display for StepBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepBound::Bounded(limit) => write!(f, "{limit}"),
            StepBound::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Step bound `sqrt(6/L)`; `L = 0` gives [`StepBound::Unbounded`].
pub fn max_step(lipschitz: f64) -> Result<StepBound> {
    if lipschitz < 0.0 || !lipschitz.is_finite() {
        return Err(Error::InvalidArgument {
            op: "max_step",
            message: format!("Lipschitz constant must be finite and >= 0, got {lipschitz}"),
        });
    }
    if lipschitz == 0.0 {
        Ok(StepBound::Unbounded)
    } else {
        Ok(StepBound::Bounded((6.0 / lipschitz).sqrt()))
    }
}

/// Smallest subinterval count satisfying the step bound:
/// the least integer strictly greater than `(b - a) sqrt(L) / sqrt(6)`,
/// and at least 1.
pub fn min_subintervals(a: f64, b: f64, lipschitz: f64) -> Result<usize> {
    if b <= a || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument {
            op: "min_subintervals",
            message: format!("need finite b > a, got [{a}, {b}]"),
        });
    }
    if lipschitz < 0.0 || !lipschitz.is_finite() {
        return Err(Error::InvalidArgument {
            op: "min_subintervals",
            message: format!("Lipschitz constant must be finite and >= 0, got {lipschitz}"),
        });
    }
    let bound = (b - a) * (lipschitz / 6.0).sqrt();
    Ok((bound.floor() as usize + 1).max(1))
}

/// Settings for the per-interval coefficient solve.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointConfig {
    /// Relative tolerance on successive iterate differences.
    pub tol: f64,
    /// Iteration cap for the fixed-point branch.
    pub max_iter: usize,
    /// Start interval k's iteration from the previous interval's coefficient.
    pub warm_start: bool,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            tol: 1e-12,
            max_iter: 100,
            warm_start: true,
        }
    }
}

/// Outcome of one interval's coefficient solve.
#[derive(Debug, Clone)]
pub struct CoefficientSolve {
    pub coefficient: Matrix,
    /// Fixed-point iterations, or 1 for the direct linear solve.
    pub iterations: usize,
    /// Defect of the coefficient equation (linear branch) or the final
    /// successive-iterate difference (fixed-point branch).
    pub residual: f64,
    /// Largest observed ratio of successive iterate differences; `None` for
    /// the direct branch or when fewer than two differences were seen.
    pub max_observed_ratio: Option<f64>,
}

/// Per-interval diagnostics.
#[derive(Debug, Clone)]
pub struct IntervalRecord {
    pub k: usize,
    pub iterations: usize,
    pub final_residual: f64,
    /// Theoretical contraction factor `L h^2 / 6`.
    pub contraction_bound: f64,
    pub max_observed_ratio: Option<f64>,
}

/// Diagnostics for a whole build.
#[derive(Debug, Clone)]
pub struct BuildReport {
    pub h: f64,
    pub lipschitz: f64,
    /// `sqrt(6/L)`, or `None` when `L = 0`.
    pub step_limit: Option<f64>,
    pub records: Vec<IntervalRecord>,
}

impl BuildReport {
    pub fn total_iterations(&self) -> usize {
        self.records.iter().map(|r| r.iterations).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.records
            .iter()
            .fold(0.0, |m, r| m.max(r.final_residual))
    }
}

/// Taylor data of the next interval: the previous piece's value and first
/// two derivatives at its right endpoint (the second derivative unhalved).
pub fn advance_beta(prev: &CubicPiece, h: f64) -> (Matrix, Matrix, Matrix) {
    (
        prev.eval_local(h, 0),
        prev.eval_local(h, 1),
        prev.eval_local(h, 2),
    )
}

/// Solve one interval's coefficient equation.
///
/// `beta_value` is the quadratic part evaluated at the right endpoint
/// `x_next`, and `beta_second` its (constant) second derivative. For a
/// linear right-hand side `f = C Y + D(x)` the equation collapses to the
/// linear system `(I - (h^2/6) C) A = (1/h)(C beta + D(x_next) - beta'')`
/// and is solved directly; otherwise the contraction map is iterated from
/// `init` until the successive difference falls to
/// `tol * max(1, ||A||_F)`.
pub fn solve_coefficient(
    rhs: &Rhs,
    x_next: f64,
    beta_value: &Matrix,
    beta_second: &Matrix,
    h: f64,
    cfg: &FixedPointConfig,
    init: &Matrix,
) -> Result<CoefficientSolve> {
    let cubic_weight = h * h * h / 6.0;
    let fixed_point_map = |t: &Matrix| -> Matrix {
        let state = beta_value + &t.scale(cubic_weight);
        (&rhs.eval(x_next, &state) - beta_second).scale(1.0 / h)
    };

    match rhs {
        Rhs::LinearConstant { coeff, forcing } => {
            let n = coeff.rows();
            let system = &Matrix::identity(n) - &coeff.scale(h * h / 6.0);
            let mut target = coeff.matmul(beta_value)?;
            if let Some(d) = forcing {
                target = target.add(&d(x_next))?;
            }
            target = target.sub(beta_second)?.scale(1.0 / h);
            let solved = solve_linear(&system, &target);
            if matches!(solved, Err(Error::Singular { .. })) {
                // Inside the contraction regime the system is a Neumann
                // perturbation of the identity and cannot be singular.
                debug_assert!(
                    coeff.frobenius_norm() * h * h / 6.0 >= 1.0 - 1e-9,
                    "singular coefficient system inside the contraction regime"
                );
            }
            let coefficient = solved?;
            let residual = (&fixed_point_map(&coefficient) - &coefficient).frobenius_norm();
            Ok(CoefficientSolve {
                coefficient,
                iterations: 1,
                residual,
                max_observed_ratio: None,
            })
        }
        Rhs::General(_) => {
            let mut current = init.clone();
            let mut prev_diff: Option<f64> = None;
            let mut max_ratio: Option<f64> = None;
            let mut last_diff = f64::NAN;
            for iteration in 1..=cfg.max_iter {
                let next = fixed_point_map(&current);
                let diff = (&next - &current).frobenius_norm();
                if let Some(prev) = prev_diff {
                    if prev > 0.0 {
                        let ratio = diff / prev;
                        max_ratio = Some(max_ratio.map_or(ratio, |m: f64| m.max(ratio)));
                    }
                }
                prev_diff = Some(diff);
                last_diff = diff;
                current = next;
                if diff <= cfg.tol * current.frobenius_norm().max(1.0) {
                    if !current.is_finite() {
                        return Err(Error::NonFinite {
                            op: "solve_coefficient",
                        });
                    }
                    return Ok(CoefficientSolve {
                        coefficient: current,
                        iterations: iteration,
                        residual: diff,
                        max_observed_ratio: max_ratio,
                    });
                }
            }
            Err(Error::NoConvergence {
                iterations: cfg.max_iter,
                residual: last_diff,
            })
        }
    }
}

/// Build the spline on `n` uniform subintervals.
///
/// Rejects the step unless `h < sqrt(6/L)`; the Lipschitz constant comes
/// from [`lipschitz_of`]. See [`build_unchecked`] to experiment outside the
/// guaranteed regime.
pub fn build(
    ivp: &MatrixIVP,
    n: usize,
    cfg: &FixedPointConfig,
) -> Result<(MatrixCubicSpline, BuildReport)> {
    build_inner(ivp, n, cfg, true)
}

/// [`build`] without the step-bound rejection. The Lipschitz constant is
/// still required (the report's contraction bound uses it), but `h` may
/// violate `h < sqrt(6/L)`; no existence or accuracy guarantee then holds.
pub fn build_unchecked(
    ivp: &MatrixIVP,
    n: usize,
    cfg: &FixedPointConfig,
) -> Result<(MatrixCubicSpline, BuildReport)> {
    build_inner(ivp, n, cfg, false)
}

fn build_inner(
    ivp: &MatrixIVP,
    n: usize,
    cfg: &FixedPointConfig,
    enforce_step: bool,
) -> Result<(MatrixCubicSpline, BuildReport)> {
    let lipschitz = lipschitz_of(ivp)?;
    let partition = Partition::new(ivp.a(), ivp.b(), n)?;
    let h = partition.h();
    let bound = max_step(lipschitz)?;
    if enforce_step && !bound.allows(h) {
        return Err(Error::RejectedStep {
            h,
            limit: bound.limit().unwrap_or(f64::INFINITY),
            lipschitz,
        });
    }
    let contraction_bound = lipschitz * h * h / 6.0;

    let (rows, cols) = ivp.shape();
    let zero = Matrix::zeros(rows, cols);

    // Taylor data of the current interval: value, slope, and (unhalved)
    // second derivative at the left knot. The first interval's come from the
    // initial data and S''(a) = f(a, Y0).
    let mut beta0 = ivp.y0().clone();
    let mut beta1 = ivp.y1().clone();
    let mut beta2 = ivp.rhs().eval(ivp.a(), &beta0);

    let mut pieces = Vec::with_capacity(n);
    let mut records = Vec::with_capacity(n);
    let mut previous_coefficient: Option<Matrix> = None;

    for k in 0..n {
        let x_next = partition.knot(k + 1);
        let beta_value = &(&beta0 + &beta1.scale(h)) + &beta2.scale(h * h / 2.0);
        let init = match (&previous_coefficient, cfg.warm_start) {
            (Some(prev), true) => prev.clone(),
            _ => zero.clone(),
        };
        let solve = solve_coefficient(ivp.rhs(), x_next, &beta_value, &beta2, h, cfg, &init)?;

        let piece = CubicPiece::new(
            partition.knot(k),
            beta0,
            beta1,
            beta2.scale(0.5),
            solve.coefficient.scale(1.0 / 6.0),
        )?;
        let (next0, next1, next2) = advance_beta(&piece, h);
        beta0 = next0;
        beta1 = next1;
        beta2 = next2;

        records.push(IntervalRecord {
            k,
            iterations: solve.iterations,
            final_residual: solve.residual,
            contraction_bound,
            max_observed_ratio: solve.max_observed_ratio,
        });
        previous_coefficient = Some(solve.coefficient);
        pieces.push(piece);
    }

    let spline = MatrixCubicSpline::from_pieces(partition, pieces)?;
    Ok((
        spline,
        BuildReport {
            h,
            lipschitz,
            step_limit: bound.limit(),
            records,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivp::builtin_problem;

    fn round5(x: f64) -> f64 {
        (x * 1e5).round() / 1e5
    }

    #[test]
    fn max_step_reference_value() {
        let StepBound::Bounded(limit) = max_step(2.82843).unwrap() else {
            panic!("expected a bounded step");
        };
        assert_eq!(round5(limit), 1.45647);
    }

    #[test]
    fn max_step_edges() {
        assert_eq!(max_step(6.0).unwrap(), StepBound::Bounded(1.0));
        assert_eq!(max_step(0.0).unwrap(), StepBound::Unbounded);
        assert!(max_step(-1.0).is_err());
        assert!(max_step(0.0).unwrap().allows(1e9));
    }

    #[test]
    fn min_subintervals_examples() {
        // (1) * sqrt(2.82843/6) ~ 0.6866 < 1
        assert_eq!(min_subintervals(0.0, 1.0, 2.82843).unwrap(), 1);
        // boundary of the strict inequality
        assert_eq!(min_subintervals(0.0, 10.0, 6.0).unwrap(), 11);
        assert_eq!(min_subintervals(0.0, 1.0, 0.0).unwrap(), 1);
        assert!(min_subintervals(1.0, 1.0, 1.0).is_err());
    }

    // Closed form for the first interval of y'' = -y, y(0)=0, y'(0)=1:
    // (1 + h^2/6) A0 = -(1/h) beta(h) with beta(h) = h, so A0 = -1/(1+h^2/6).
    fn scalar_sine_a0(h: f64) -> f64 {
        -1.0 / (1.0 + h * h / 6.0)
    }

    #[test]
    fn solve_coefficient_scalar_closed_form() {
        let h = 0.1;
        let rhs = Rhs::linear(Matrix::from_real(1, 1, &[-1.0]));
        let beta_value = Matrix::from_real(1, 1, &[0.1]);
        let beta_second = Matrix::zeros(1, 1);
        let cfg = FixedPointConfig::default();
        let solve = solve_coefficient(
            &rhs,
            0.1,
            &beta_value,
            &beta_second,
            h,
            &cfg,
            &Matrix::zeros(1, 1),
        )
        .unwrap();
        let expected = scalar_sine_a0(h);
        assert!((solve.coefficient[(0, 0)].re - expected).abs() <= 1e-14);
        assert!((expected - -0.9983361).abs() < 5e-8);
        assert!(solve.residual <= 1e-14);
    }

    #[test]
    fn solve_coefficient_zero_rhs() {
        let h = 0.1;
        let rhs = Rhs::linear(Matrix::zeros(1, 1));
        let beta_second = Matrix::from_real(1, 1, &[0.5]);
        let cfg = FixedPointConfig::default();
        let solve = solve_coefficient(
            &rhs,
            0.1,
            &Matrix::from_real(1, 1, &[0.3]),
            &beta_second,
            h,
            &cfg,
            &Matrix::zeros(1, 1),
        )
        .unwrap();
        // A = -beta''/h
        assert!((solve.coefficient[(0, 0)].re - -5.0).abs() <= 1e-14);
    }

    #[test]
    fn fixed_point_branch_matches_direct_branch() {
        let (ivp, _) = builtin_problem("paper-example").unwrap();
        let linear = ivp.rhs().clone();
        let wrapped = {
            let inner = linear.clone();
            Rhs::general(move |x, y| inner.eval(x, y))
        };
        let h = 0.1;
        let beta_value = ivp.y1().scale(h);
        let beta_second = Matrix::zeros(2, 2);
        let cfg = FixedPointConfig::default();
        let direct = solve_coefficient(
            &linear,
            h,
            &beta_value,
            &beta_second,
            h,
            &cfg,
            &Matrix::zeros(2, 2),
        )
        .unwrap();
        let iterated = solve_coefficient(
            &wrapped,
            h,
            &beta_value,
            &beta_second,
            h,
            &cfg,
            &Matrix::zeros(2, 2),
        )
        .unwrap();
        let gap = (&direct.coefficient - &iterated.coefficient).frobenius_norm();
        assert!(gap <= cfg.tol * 10.0, "branch gap {gap}");
        assert!(iterated.iterations > 1);
    }

    #[test]
    fn fixed_point_reports_non_convergence() {
        let rhs = Rhs::general(|_, y| y.scale(3.0));
        let cfg = FixedPointConfig {
            tol: 1e-12,
            max_iter: 5,
            warm_start: false,
        };
        // h^3/6 * 3 / h = h^2/2 * ... with h = 3 the map expands.
        let err = solve_coefficient(
            &rhs,
            3.0,
            &Matrix::from_real(1, 1, &[1.0]),
            &Matrix::zeros(1, 1),
            3.0,
            &cfg,
            &Matrix::from_real(1, 1, &[1.0]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 5, .. }));
    }

    #[test]
    fn advance_beta_scalar_sine_first_knot() {
        let h = 0.1;
        let a0 = scalar_sine_a0(h);
        let piece = CubicPiece::new(
            0.0,
            Matrix::zeros(1, 1),
            Matrix::from_real(1, 1, &[1.0]),
            Matrix::zeros(1, 1),
            Matrix::from_real(1, 1, &[a0 / 6.0]),
        )
        .unwrap();
        let (b0, b1, b2) = advance_beta(&piece, h);
        let expected_b0 = h + a0 * h * h * h / 6.0;
        assert!((b0[(0, 0)].re - expected_b0).abs() <= 1e-16);
        assert!((expected_b0 - 0.0998336).abs() < 5e-8);
        assert!((b1[(0, 0)].re - (1.0 + a0 * h * h / 2.0)).abs() <= 1e-16);
        assert!((b2[(0, 0)].re - a0 * h).abs() <= 1e-16);
    }

    #[test]
    fn advance_beta_zero_piece() {
        let z = Matrix::zeros(2, 2);
        let piece = CubicPiece::new(0.0, z.clone(), z.clone(), z.clone(), z.clone()).unwrap();
        let (b0, b1, b2) = advance_beta(&piece, 0.25);
        assert_eq!(b0, z);
        assert_eq!(b1, z);
        assert_eq!(b2, z);
    }

    #[test]
    fn advance_beta_is_exact_on_cubics() {
        // p(u) = 1 + 2u - u^2 + 0.5 u^3 on a 1x1 piece.
        let piece = CubicPiece::new(
            0.0,
            Matrix::from_real(1, 1, &[1.0]),
            Matrix::from_real(1, 1, &[2.0]),
            Matrix::from_real(1, 1, &[-1.0]),
            Matrix::from_real(1, 1, &[0.5]),
        )
        .unwrap();
        let h = 0.5;
        let (b0, b1, b2) = advance_beta(&piece, h);
        assert!((b0[(0, 0)].re - (1.0 + 2.0 * h - h * h + 0.5 * h * h * h)).abs() < 1e-15);
        assert!((b1[(0, 0)].re - (2.0 - 2.0 * h + 1.5 * h * h)).abs() < 1e-15);
        assert!((b2[(0, 0)].re - (-2.0 + 3.0 * h)).abs() < 1e-15);
    }

    #[test]
    fn build_reproduces_first_interval_coefficients() {
        let (ivp, _) = builtin_problem("paper-example").unwrap();
        let (spline, report) = build(&ivp, 10, &FixedPointConfig::default()).unwrap();
        assert_eq!(report.records.len(), 10);
        let globals = spline.pieces()[0].global_coefficients();
        let round4 = |x: f64| (x * 1e4).round() / 1e4;
        // Degree-3 coefficients: diagonal entries -0.1664, corner -0.4986.
        assert_eq!(round4(globals[3][(0, 0)].re), -0.1664);
        assert_eq!(round4(globals[3][(1, 1)].re), -0.1664);
        assert_eq!(round4(globals[3][(1, 0)].re), -0.4986);
        assert_eq!(round4(globals[3][(0, 1)].re), 0.0);
        // Degree-1 coefficient is Y1, degree 0 and 2 vanish.
        assert_eq!(round4(globals[1][(0, 0)].re), 1.0);
        assert_eq!(round4(globals[1][(1, 0)].re), 1.0);
        assert!(globals[0].frobenius_norm() < 1e-15);
        assert!(globals[2].frobenius_norm() < 1e-15);
    }

    #[test]
    fn build_keeps_initial_data_bitwise() {
        let (ivp, _) = builtin_problem("paper-example").unwrap();
        let (spline, _) = build(&ivp, 10, &FixedPointConfig::default()).unwrap();
        assert_eq!(&spline.eval(0.0, 0).unwrap(), ivp.y0());
        assert_eq!(&spline.eval(0.0, 1).unwrap(), ivp.y1());
    }

    #[test]
    fn free_motion_is_exact() {
        let (ivp, oracle) = builtin_problem("free-motion").unwrap();
        let (spline, _) = build(&ivp, 7, &FixedPointConfig::default()).unwrap();
        for i in 0..=70 {
            let x = i as f64 / 70.0;
            let diff = &spline.eval(x, 0).unwrap() - &oracle.eval(x);
            assert!(diff.frobenius_norm() <= 1e-14, "x={x}");
        }
    }

    #[test]
    fn step_bound_is_enforced_and_overridable() {
        // y'' = -25 y has L = 25, so the bound is sqrt(6/25) ~ 0.49.
        let ivp = MatrixIVP::new(
            0.0,
            1.0,
            Matrix::zeros(1, 1),
            Matrix::from_real(1, 1, &[1.0]),
            Rhs::linear(Matrix::from_real(1, 1, &[-25.0])),
        )
        .unwrap();
        let cfg = FixedPointConfig::default();
        let err = build(&ivp, 2, &cfg).unwrap_err();
        assert!(matches!(err, Error::RejectedStep { .. }));
        assert!(build(&ivp, 3, &cfg).is_ok());
        assert!(build_unchecked(&ivp, 2, &cfg).is_ok());
    }

    #[test]
    fn collocation_holds_at_every_knot() {
        let cfg = FixedPointConfig::default();
        for name in ["paper-example", "scalar-sine"] {
            let (ivp, _) = builtin_problem(name).unwrap();
            let (spline, report) = build(&ivp, 10, &cfg).unwrap();
            let bound = 10.0 * cfg.tol / report.h;
            for k in 0..=10 {
                let x = spline.partition().knot(k);
                let value = spline.eval(x, 0).unwrap();
                let second = spline.eval(x, 2).unwrap();
                let residual = (&second - &ivp.rhs().eval(x, &value)).frobenius_norm();
                assert!(residual <= bound, "{name}: residual {residual} at knot {k}");
            }
        }
    }

    #[test]
    fn warm_start_changes_iterations_not_the_answer() {
        let (ivp, _) = builtin_problem("paper-example").unwrap();
        let wrapped = {
            let inner = ivp.rhs().clone();
            Rhs::general(move |x, y| inner.eval(x, y))
        };
        let general_ivp = MatrixIVP::new(0.0, 1.0, ivp.y0().clone(), ivp.y1().clone(), wrapped)
            .unwrap()
            .with_lipschitz(2.82843)
            .unwrap();
        let warm_cfg = FixedPointConfig::default();
        let cold_cfg = FixedPointConfig {
            warm_start: false,
            ..warm_cfg
        };
        let (warm, warm_report) = build(&general_ivp, 10, &warm_cfg).unwrap();
        let (cold, cold_report) = build(&general_ivp, 10, &cold_cfg).unwrap();
        for (wp, cp) in warm.pieces().iter().zip(cold.pieces()) {
            assert!((&wp.c3 - &cp.c3).frobenius_norm() <= 10.0 * warm_cfg.tol);
        }
        assert!(warm_report.total_iterations() < cold_report.total_iterations());
    }

    #[test]
    fn observed_contraction_stays_under_the_bound() {
        let (ivp, _) = builtin_problem("paper-example").unwrap();
        let wrapped = {
            let inner = ivp.rhs().clone();
            Rhs::general(move |x, y| inner.eval(x, y))
        };
        let general_ivp = MatrixIVP::new(0.0, 1.0, ivp.y0().clone(), ivp.y1().clone(), wrapped)
            .unwrap()
            .with_lipschitz(2.82843)
            .unwrap();
        let (_, report) = build(&general_ivp, 10, &FixedPointConfig::default()).unwrap();
        let bound = report.records[0].contraction_bound;
        assert!((bound - 0.004714).abs() < 1e-6);
        let mut saw_ratio = false;
        for record in &report.records {
            if let Some(ratio) = record.max_observed_ratio {
                saw_ratio = true;
                assert!(
                    ratio <= bound + 1e-9,
                    "interval {}: ratio {ratio} above bound {bound}",
                    record.k
                );
            }
        }
        assert!(saw_ratio);
    }

    #[test]
    fn solution_map_is_additive_for_linear_homogeneous_problems() {
        let coeff = Matrix::from_real(2, 2, &[-1.0, 0.0, -2.0, -1.0]);
        let cfg = FixedPointConfig::default();
        let data = [
            (
                Matrix::zeros(2, 2),
                Matrix::from_real(2, 2, &[1.0, 0.0, 1.0, 1.0]),
            ),
            (
                Matrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.2]),
                Matrix::from_real(2, 2, &[0.3, 0.0, 0.1, -0.2]),
            ),
        ];
        let build_for = |y0: &Matrix, y1: &Matrix| {
            let ivp = MatrixIVP::new(0.0, 1.0, y0.clone(), y1.clone(), Rhs::linear(coeff.clone()))
                .unwrap();
            build(&ivp, 10, &cfg).unwrap().0
        };
        let first = build_for(&data[0].0, &data[0].1);
        let second = build_for(&data[1].0, &data[1].1);
        let combined = build_for(&(&data[0].0 + &data[1].0), &(&data[0].1 + &data[1].1));
        for k in 0..10 {
            let sum_c3 = &first.pieces()[k].c3 + &second.pieces()[k].c3;
            assert!((&combined.pieces()[k].c3 - &sum_c3).frobenius_norm() <= 1e-10);
            let sum_c0 = &first.pieces()[k].c0 + &second.pieces()[k].c0;
            assert!((&combined.pieces()[k].c0 - &sum_c0).frobenius_norm() <= 1e-10);
        }
    }
}
