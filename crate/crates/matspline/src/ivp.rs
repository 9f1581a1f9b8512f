//! Problem definitions: the second-order matrix IVP `Y'' = f(x, Y)` with
//! initial data `Y(a) = Y0`, `Y'(a) = Y1`, the right-hand-side abstraction,
//! Lipschitz-constant handling, and exact-solution oracles.

use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Forcing term `x -> D(x)` for a linear right-hand side.
pub type ForcingFn = Arc<dyn Fn(f64) -> Matrix + Send + Sync>;

/// General right-hand side `(x, Y) -> f(x, Y)`.
///
/// Must be pure: the same inputs always produce the same output. That purity
/// is what lets verification sample intervals in parallel.
pub type RhsFn = Arc<dyn Fn(f64, &Matrix) -> Matrix + Send + Sync>;

/// Right-hand side of `Y'' = f(x, Y)`.
#[derive(Clone)]
pub enum Rhs {
    /// `f(x, Y) = C Y + D(x)` with constant square `C` and optional forcing.
    LinearConstant {
        coeff: Matrix,
        forcing: Option<ForcingFn>,
    },
    /// Arbitrary `f(x, Y)`.
    General(RhsFn),
}

impl Rhs {
    /// Homogeneous linear right-hand side `f(x, Y) = C Y`.
    pub fn linear(coeff: Matrix) -> Self {
        Rhs::LinearConstant {
            coeff,
            forcing: None,
        }
    }

    /// Linear right-hand side with forcing, `f(x, Y) = C Y + D(x)`.
    pub fn linear_with_forcing(
        coeff: Matrix,
        forcing: impl Fn(f64) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        Rhs::LinearConstant {
            coeff,
            forcing: Some(Arc::new(forcing)),
        }
    }

    /// Black-box right-hand side.
    pub fn general(f: impl Fn(f64, &Matrix) -> Matrix + Send + Sync + 'static) -> Self {
        Rhs::General(Arc::new(f))
    }

    /// Evaluate `f(x, Y)`.
    pub fn eval(&self, x: f64, y: &Matrix) -> Matrix {
        match self {
            Rhs::LinearConstant { coeff, forcing } => {
                let cy = coeff.matmul(y).unwrap_or_else(|e| panic!("{e}"));
                match forcing {
                    Some(d) => &cy + &d(x),
                    None => cy,
                }
            }
            Rhs::General(f) => f(x, y),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Rhs::LinearConstant { .. })
    }
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::LinearConstant { coeff, forcing } => f
                .debug_struct("LinearConstant")
                .field("coeff", &format_args!("{}x{}", coeff.rows(), coeff.cols()))
                .field("forcing", &forcing.is_some())
                .finish(),
            Rhs::General(_) => f.write_str("General"),
        }
    }
}

/// Second-order matrix initial value problem on `[a, b]`.
#[derive(Debug, Clone)]
pub struct MatrixIVP {
    a: f64,
    b: f64,
    y0: Matrix,
    y1: Matrix,
    rhs: Rhs,
    lipschitz: Option<f64>,
}

impl MatrixIVP {
    /// Validates `b > a`, matching shapes for `Y0`/`Y1`, and — for a linear
    /// right-hand side — that `C` is square with `C.rows = Y0.rows`.
    pub fn new(a: f64, b: f64, y0: Matrix, y1: Matrix, rhs: Rhs) -> Result<Self> {
        if b <= a || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument {
                op: "MatrixIVP",
                message: format!("need finite b > a, got [{a}, {b}]"),
            });
        }
        if !y0.same_shape(&y1) {
            return Err(Error::DimensionMismatch {
                op: "MatrixIVP initial data",
                left_rows: y0.rows(),
                left_cols: y0.cols(),
                right_rows: y1.rows(),
                right_cols: y1.cols(),
            });
        }
        if let Rhs::LinearConstant { coeff, .. } = &rhs {
            if !coeff.is_square() {
                return Err(Error::NotSquare {
                    op: "linear rhs coefficient",
                    rows: coeff.rows(),
                    cols: coeff.cols(),
                });
            }
            if coeff.rows() != y0.rows() {
                return Err(Error::DimensionMismatch {
                    op: "linear rhs coefficient vs Y0",
                    left_rows: coeff.rows(),
                    left_cols: coeff.cols(),
                    right_rows: y0.rows(),
                    right_cols: y0.cols(),
                });
            }
        }
        Ok(MatrixIVP {
            a,
            b,
            y0,
            y1,
            rhs,
            lipschitz: None,
        })
    }

    /// Attach a user-supplied Lipschitz constant.
    pub fn with_lipschitz(mut self, l: f64) -> Result<Self> {
        if l < 0.0 || !l.is_finite() {
            return Err(Error::InvalidArgument {
                op: "with_lipschitz",
                message: format!("Lipschitz constant must be finite and >= 0, got {l}"),
            });
        }
        self.lipschitz = Some(l);
        Ok(self)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn y0(&self) -> &Matrix {
        &self.y0
    }

    pub fn y1(&self) -> &Matrix {
        &self.y1
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    pub fn supplied_lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Solution shape `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        self.y0.shape()
    }
}

/// Lipschitz constant for the right-hand side.
///
/// Returns the user-supplied value when present. For a linear right-hand side
/// the Frobenius norm of `C` is a valid constant, since
/// `||C (Y1 - Y2)||_F <= ||C||_F ||Y1 - Y2||_F`. A general right-hand side
/// without a supplied constant is an error: sampling could only ever produce
/// lower bounds, and the step bound needs an upper bound.
pub fn lipschitz_of(ivp: &MatrixIVP) -> Result<f64> {
    if let Some(l) = ivp.lipschitz {
        return Ok(l);
    }
    match &ivp.rhs {
        Rhs::LinearConstant { coeff, .. } => Ok(coeff.frobenius_norm()),
        Rhs::General(_) => Err(Error::MissingLipschitz),
    }
}

/// Known closed-form solution, used to measure spline accuracy.
#[derive(Clone)]
pub struct Oracle {
    exact: Arc<dyn Fn(f64) -> Matrix + Send + Sync>,
}

impl Oracle {
    pub fn new(exact: impl Fn(f64) -> Matrix + Send + Sync + 'static) -> Self {
        Oracle {
            exact: Arc::new(exact),
        }
    }

    pub fn eval(&self, x: f64) -> Matrix {
        (self.exact)(x)
    }

    /// Oracle scaled by a constant; matches the solution map's linearity for
    /// homogeneous problems with scaled initial data.
    pub fn scaled(&self, c: f64) -> Oracle {
        let inner = self.exact.clone();
        Oracle::new(move |x| inner(x).scale(c))
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Oracle")
    }
}

/// Names accepted by [`builtin_problem`].
pub const BUILTIN_NAMES: [&str; 3] = ["paper-example", "free-motion", "scalar-sine"];

/// Look up a builtin problem together with its exact-solution oracle.
///
/// - `"paper-example"`: the published 2x2 reference oscillator
///   `Y'' + A Y = 0` with `A = [[1,0],[2,1]]`, `Y0 = 0`, `Y1 = [[1,0],[1,1]]`
///   on `[0, 1]`, Lipschitz constant 2.82843, exact solution
///   `[[sin t, 0], [t cos t, sin t]]`.
/// - `"free-motion"`: `f = 0` on `[0, 1]`; exact solution `Y0 + Y1 (x - a)`.
/// - `"scalar-sine"`: the 1x1 problem `y'' = -y`, `y(0) = 0`, `y'(0) = 1`
///   on `[0, 1]`; exact solution `sin x`.
pub fn builtin_problem(name: &str) -> Result<(MatrixIVP, Oracle)> {
    match name {
        "paper-example" => {
            let a_mat = Matrix::from_real(2, 2, &[1.0, 0.0, 2.0, 1.0]);
            let ivp = MatrixIVP::new(
                0.0,
                1.0,
                Matrix::zeros(2, 2),
                Matrix::from_real(2, 2, &[1.0, 0.0, 1.0, 1.0]),
                Rhs::linear(a_mat.scale(-1.0)),
            )?
            .with_lipschitz(2.82843)?;
            let oracle = Oracle::new(|t: f64| {
                Matrix::from_real(2, 2, &[t.sin(), 0.0, t * t.cos(), t.sin()])
            });
            Ok((ivp, oracle))
        }
        "free-motion" => {
            let y0 = Matrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
            let y1 = Matrix::from_real(2, 2, &[0.5, -1.0, 1.0, 0.25]);
            let ivp = MatrixIVP::new(
                0.0,
                1.0,
                y0.clone(),
                y1.clone(),
                Rhs::linear(Matrix::zeros(2, 2)),
            )?;
            let oracle = Oracle::new(move |x: f64| &y0 + &y1.scale(x));
            Ok((ivp, oracle))
        }
        "scalar-sine" => {
            let ivp = MatrixIVP::new(
                0.0,
                1.0,
                Matrix::zeros(1, 1),
                Matrix::from_real(1, 1, &[1.0]),
                Rhs::linear(Matrix::from_real(1, 1, &[-1.0])),
            )?;
            let oracle = Oracle::new(|x: f64| Matrix::from_real(1, 1, &[x.sin()]));
            Ok((ivp, oracle))
        }
        _ => Err(Error::UnknownProblem {
            name: name.to_string(),
            available: BUILTIN_NAMES.join(", "),
        }),
    }
}

/// On-disk problem description (JSON).
///
/// Fields: `a`, `b`, optional `n`, `Y0`, `Y1`, `rhs`, optional `lipschitz`.
/// Matrices use the nested-array text form of [`crate::matrix`]. The `rhs`
/// field is either `{"kind": "linear_constant", "C": <matrix>}` or
/// `{"kind": "builtin", "name": <string>}`; the builtin form borrows only the
/// named problem's right-hand side, so no oracle is attached.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(rename = "Y0")]
    pub y0: Matrix,
    #[serde(rename = "Y1")]
    pub y1: Matrix,
    pub rhs: RhsSpec,
    #[serde(default)]
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsSpec {
    LinearConstant {
        #[serde(rename = "C")]
        c: Matrix,
    },
    Builtin {
        name: String,
    },
}

/// A problem parsed from a file: the IVP, an oracle when one is known, and
/// the file's suggested subinterval count.
#[derive(Debug)]
pub struct ParsedProblem {
    pub ivp: MatrixIVP,
    pub oracle: Option<Oracle>,
    pub n: Option<usize>,
}

/// Parse a problem file from its JSON text.
pub fn parse_problem(text: &str) -> Result<ParsedProblem> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::ProblemFile {
        message: e.to_string(),
    })?;
    let rhs = match file.rhs {
        RhsSpec::LinearConstant { c } => Rhs::linear(c),
        RhsSpec::Builtin { name } => builtin_problem(&name)?.0.rhs().clone(),
    };
    let mut ivp = MatrixIVP::new(file.a, file.b, file.y0, file.y1, rhs)?;
    if let Some(l) = file.lipschitz {
        ivp = ivp.with_lipschitz(l)?;
    }
    Ok(ParsedProblem {
        ivp,
        oracle: None,
        n: file.n,
    })
}

/// Resolve a problem reference: a builtin name first, otherwise a path to a
/// problem file. A bare name that is neither gets the registry listing.
pub fn resolve_problem(reference: &str) -> Result<ParsedProblem> {
    if BUILTIN_NAMES.contains(&reference) {
        let (ivp, oracle) = builtin_problem(reference)?;
        return Ok(ParsedProblem {
            ivp,
            oracle: Some(oracle),
            n: None,
        });
    }
    let path = std::path::Path::new(reference);
    let looks_like_path =
        path.exists() || reference.contains(std::path::MAIN_SEPARATOR) || reference.contains('.');
    if !looks_like_path {
        return Err(Error::UnknownProblem {
            name: reference.to_string(),
            available: BUILTIN_NAMES.join(", "),
        });
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::ProblemFile {
        message: format!("cannot read '{reference}': {e}"),
    })?;
    parse_problem(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supplied_lipschitz_wins() {
        let (ivp, _) = builtin_problem("paper-example").unwrap();
        assert_eq!(lipschitz_of(&ivp).unwrap(), 2.82843);
    }

    #[test]
    fn linear_rhs_falls_back_to_frobenius_norm() {
        let c = Matrix::from_real(2, 2, &[-1.0, 0.0, -2.0, -1.0]);
        let ivp = MatrixIVP::new(
            0.0,
            1.0,
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 2),
            Rhs::linear(c),
        )
        .unwrap();
        assert!((lipschitz_of(&ivp).unwrap() - 6.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_rhs_is_zero_lipschitz() {
        let (ivp, _) = builtin_problem("free-motion").unwrap();
        assert_eq!(lipschitz_of(&ivp).unwrap(), 0.0);
    }

    #[test]
    fn general_rhs_without_constant_errors() {
        let ivp = MatrixIVP::new(
            0.0,
            1.0,
            Matrix::zeros(1, 1),
            Matrix::zeros(1, 1),
            Rhs::general(|_, y| y.scale(-1.0)),
        )
        .unwrap();
        assert!(matches!(lipschitz_of(&ivp), Err(Error::MissingLipschitz)));
    }

    #[test]
    fn reference_oracle_at_one() {
        let (_, oracle) = builtin_problem("paper-example").unwrap();
        let y = oracle.eval(1.0);
        let s = 1.0_f64.sin();
        let c = 1.0_f64.cos();
        assert!((y[(0, 0)].re - s).abs() < 1e-15);
        assert_eq!(y[(0, 1)].re, 0.0);
        assert!((y[(1, 0)].re - c).abs() < 1e-15);
        assert!((y[(1, 1)].re - s).abs() < 1e-15);
    }

    #[test]
    fn free_motion_oracle_is_affine() {
        let (ivp, oracle) = builtin_problem("free-motion").unwrap();
        for x in [0.0, 0.31, 1.0] {
            let expected = ivp.y0().add(&ivp.y1().scale(x)).unwrap();
            assert!(oracle.eval(x).sub(&expected).unwrap().frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn unknown_name_lists_registry() {
        let err = builtin_problem("nope").unwrap_err();
        let msg = err.to_string();
        for name in BUILTIN_NAMES {
            assert!(msg.contains(name), "{msg}");
        }
    }

    // Each registry oracle satisfies its ODE: central second differences at
    // 11 equispaced points, step 1e-4, against rhs(x, exact(x)).
    #[test]
    fn oracles_satisfy_their_equations() {
        let delta = 1e-4;
        for name in BUILTIN_NAMES {
            let (ivp, oracle) = builtin_problem(name).unwrap();
            for k in 0..=10 {
                let x = ivp.a() + (ivp.b() - ivp.a()) * (k as f64) / 10.0;
                let upper = oracle.eval(x + delta);
                let lower = oracle.eval(x - delta);
                let mid = oracle.eval(x);
                let second_diff = upper
                    .add(&lower)
                    .unwrap()
                    .sub(&mid.scale(2.0))
                    .unwrap()
                    .scale(1.0 / (delta * delta));
                let residual = second_diff.sub(&ivp.rhs().eval(x, &mid)).unwrap();
                assert!(
                    residual.frobenius_norm() <= 1e-4,
                    "{name} residual {} at x={x}",
                    residual.frobenius_norm()
                );
            }
        }
    }

    #[test]
    fn oracle_matches_initial_data() {
        for name in BUILTIN_NAMES {
            let (ivp, oracle) = builtin_problem(name).unwrap();
            let at_a = oracle.eval(ivp.a());
            assert!(
                at_a.sub(ivp.y0()).unwrap().frobenius_norm() < 1e-15,
                "{name}"
            );
        }
    }

    #[test]
    fn parse_problem_file_linear() {
        let text = r#"{
            "a": 0.0, "b": 1.0, "n": 10,
            "Y0": [[0, 0], [0, 0]],
            "Y1": [[1, 0], [1, 1]],
            "rhs": {"kind": "linear_constant", "C": [[-1, 0], [-2, -1]]},
            "lipschitz": 2.82843
        }"#;
        let parsed = parse_problem(text).unwrap();
        assert_eq!(parsed.n, Some(10));
        assert!(parsed.oracle.is_none());
        assert_eq!(lipschitz_of(&parsed.ivp).unwrap(), 2.82843);
        assert!(parsed.ivp.rhs().is_linear());
    }

    #[test]
    fn parse_problem_file_builtin_rhs() {
        let text = r#"{
            "a": 0.0, "b": 2.0,
            "Y0": [[0]], "Y1": [[2]],
            "rhs": {"kind": "builtin", "name": "scalar-sine"}
        }"#;
        let parsed = parse_problem(text).unwrap();
        assert!(parsed.ivp.rhs().is_linear());
        assert_eq!(parsed.ivp.b(), 2.0);
        // Borrowed rhs is y'' = -y, so f(0, [[2]]) = [[-2]].
        let f = parsed.ivp.rhs().eval(0.0, &Matrix::from_real(1, 1, &[2.0]));
        assert_eq!(f[(0, 0)].re, -2.0);
    }

    #[test]
    fn parse_problem_rejects_bad_input() {
        assert!(parse_problem("{").is_err());
        let bad_interval = r#"{
            "a": 1.0, "b": 0.0,
            "Y0": [[0]], "Y1": [[0]],
            "rhs": {"kind": "linear_constant", "C": [[0]]}
        }"#;
        assert!(parse_problem(bad_interval).is_err());
    }
}
