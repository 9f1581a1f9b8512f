//! Piecewise cubic matrix splines over a uniform partition, with evaluation
//! of the spline and its first two derivatives.
//!
//! Each piece is stored in the shifted monomial basis `u = x - x_left`:
//! `S(x) = C0 + C1 u + C2 u^2 + C3 u^3`. The shifted basis avoids
//! cancellation for large `|x|` and keeps the stored coefficients equal to
//! the Taylor data of the construction (`C2 = S''(x_left)/2`, `C3` the cubic
//! coefficient divided by 6).

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Uniform partition of `[a, b]` into `n` subintervals of width `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Partition {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if b <= a || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument {
                op: "Partition",
                message: format!("need finite b > a, got [{a}, {b}]"),
            });
        }
        if n == 0 {
            return Err(Error::InvalidArgument {
                op: "Partition",
                message: "need at least one subinterval".into(),
            });
        }
        Ok(Partition {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Knot `x_k = a + k h`; the final knot is clamped to `b` exactly.
    pub fn knot(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        if k == self.n {
            self.b
        } else {
            self.a + k as f64 * self.h
        }
    }

    /// Index `k` of the piece owning `x`: `x` in `[x_k, x_{k+1})`, with `b`
    /// owned by the last piece.
    pub fn piece_index(&self, x: f64) -> Result<usize> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::OutOfDomain {
                x,
                a: self.a,
                b: self.b,
            });
        }
        let mut k =
            (((x - self.a) / self.h).floor() as isize).clamp(0, self.n as isize - 1) as usize;
        // Floating-point guard: align with the computed knots so that knots
        // belong to the piece on their right.
        while k > 0 && x < self.knot(k) {
            k -= 1;
        }
        while k + 1 < self.n && x >= self.knot(k + 1) {
            k += 1;
        }
        Ok(k)
    }
}

/// One interval's cubic, `S(x) = C0 + C1 u + C2 u^2 + C3 u^3`, `u = x - x_left`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicPiece {
    pub x_left: f64,
    pub c0: Matrix,
    pub c1: Matrix,
    pub c2: Matrix,
    pub c3: Matrix,
}

impl CubicPiece {
    pub fn new(x_left: f64, c0: Matrix, c1: Matrix, c2: Matrix, c3: Matrix) -> Result<Self> {
        if !(c0.same_shape(&c1) && c0.same_shape(&c2) && c0.same_shape(&c3)) {
            return Err(Error::InvalidArgument {
                op: "CubicPiece",
                message: "coefficient matrices must share one shape".into(),
            });
        }
        Ok(CubicPiece {
            x_left,
            c0,
            c1,
            c2,
            c3,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.c0.shape()
    }

    /// Horner evaluation of the piece (or its analytic derivative) at local
    /// offset `u = x - x_left`.
    pub fn eval_local(&self, u: f64, order: usize) -> Matrix {
        match order {
            0 => {
                // ((C3 u + C2) u + C1) u + C0
                let mut acc = self.c3.scale(u);
                acc = (&acc + &self.c2).scale(u);
                acc = (&acc + &self.c1).scale(u);
                &acc + &self.c0
            }
            1 => {
                // (3 C3 u + 2 C2) u + C1
                let mut acc = self.c3.scale(3.0 * u);
                acc = (&acc + &self.c2.scale(2.0)).scale(u);
                &acc + &self.c1
            }
            2 => &self.c3.scale(6.0 * u) + &self.c2.scale(2.0),
            _ => panic!("derivative order must be 0, 1, or 2, got {order}"),
        }
    }

    /// Evaluate at a global coordinate.
    pub fn eval(&self, x: f64, order: usize) -> Matrix {
        self.eval_local(x - self.x_left, order)
    }

    /// Coefficients in the global monomial basis, degree-ascending, by
    /// binomial expansion of the shifted form.
    pub fn global_coefficients(&self) -> [Matrix; 4] {
        let t = self.x_left;
        let g0 =
            &(&self.c0 - &self.c1.scale(t)) + &(&self.c2.scale(t * t) - &self.c3.scale(t * t * t));
        let g1 = &(&self.c1 - &self.c2.scale(2.0 * t)) + &self.c3.scale(3.0 * t * t);
        let g2 = &self.c2 - &self.c3.scale(3.0 * t);
        let g3 = self.c3.clone();
        [g0, g1, g2, g3]
    }
}

/// Jump magnitudes (Frobenius norms) across one interior knot, for the
/// spline value and its first two derivatives.
#[derive(Debug, Clone, Copy)]
pub struct KnotJumps {
    /// Interior knot index (1..n-1).
    pub knot: usize,
    pub x: f64,
    /// Orders 0, 1, 2.
    pub jumps: [f64; 3],
}

/// The method's output: `n` cubic pieces over a uniform partition, C2 by
/// construction.
#[derive(Debug, Clone)]
pub struct MatrixCubicSpline {
    partition: Partition,
    pieces: Vec<CubicPiece>,
}

impl MatrixCubicSpline {
    /// Assemble from pieces. Checks the piece count, knot alignment, and a
    /// common coefficient shape; continuity is measured, not enforced — see
    /// [`MatrixCubicSpline::continuity_report`].
    pub fn from_pieces(partition: Partition, pieces: Vec<CubicPiece>) -> Result<Self> {
        if pieces.len() != partition.n() {
            return Err(Error::InvalidArgument {
                op: "MatrixCubicSpline",
                message: format!(
                    "expected {} pieces for the partition, got {}",
                    partition.n(),
                    pieces.len()
                ),
            });
        }
        let shape = pieces[0].shape();
        for (k, piece) in pieces.iter().enumerate() {
            if piece.shape() != shape {
                return Err(Error::InvalidArgument {
                    op: "MatrixCubicSpline",
                    message: format!(
                        "piece {k} has shape {:?}, expected {:?}",
                        piece.shape(),
                        shape
                    ),
                });
            }
            if piece.x_left != partition.knot(k) {
                return Err(Error::InvalidArgument {
                    op: "MatrixCubicSpline",
                    message: format!(
                        "piece {k} starts at {}, expected knot {}",
                        piece.x_left,
                        partition.knot(k)
                    ),
                });
            }
        }
        Ok(MatrixCubicSpline { partition, pieces })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn pieces(&self) -> &[CubicPiece] {
        &self.pieces
    }

    pub fn shape(&self) -> (usize, usize) {
        self.pieces[0].shape()
    }

    /// Evaluate the spline or one of its first two derivatives. No
    /// extrapolation: `x` must lie in `[a, b]`.
    pub fn eval(&self, x: f64, order: usize) -> Result<Matrix> {
        if order > 2 {
            return Err(Error::InvalidArgument {
                op: "eval",
                message: format!("derivative order must be 0, 1, or 2, got {order}"),
            });
        }
        let k = self.partition.piece_index(x)?;
        Ok(self.pieces[k].eval(x, order))
    }

    /// Per-interior-knot jump norms for orders 0, 1, 2: the left piece's
    /// limit minus the right piece's value at the knot.
    pub fn continuity_report(&self) -> Vec<KnotJumps> {
        (1..self.partition.n())
            .map(|k| {
                let x = self.partition.knot(k);
                let left = &self.pieces[k - 1];
                let right = &self.pieces[k];
                let mut jumps = [0.0; 3];
                for (order, jump) in jumps.iter_mut().enumerate() {
                    let diff = &left.eval(x, order) - &right.eval(x, order);
                    *jump = diff.frobenius_norm();
                }
                KnotJumps { knot: k, x, jumps }
            })
            .collect()
    }
}
