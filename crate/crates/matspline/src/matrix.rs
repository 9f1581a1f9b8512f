//! Dense complex matrices: arithmetic, Frobenius norm, partial-pivot linear
//! solves, and truncated-series trigonometric matrix functions.
//!
//! Entries are [`Complex64`]; real data is the zero-imaginary-part special
//! case. Storage is row-major. Sizes in this crate stay at desk scale
//! (r, q of order 10), so everything is plain elimination and plain series,
//! no external kernels.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::error::{Error, Result};

/// Hard cap on series terms for [`mat_sin`] / [`mat_cos`].
pub const SERIES_TERM_CAP: usize = 200;

/// Default relative tolerance for the trigonometric series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-15;

/// Dense `rows x cols` matrix with complex entries, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl Matrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from real entries in row-major order.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        Matrix {
            rows,
            cols,
            entries: data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Build from complex entries in row-major order.
    pub fn from_complex(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        Matrix {
            rows,
            cols,
            entries: data,
        }
    }

    /// Build entrywise from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn same_shape(&self, other: &Matrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// True when every entry is finite (no NaN or infinity).
    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Checked elementwise sum.
    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    /// Checked elementwise difference.
    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Matrix> {
        if !self.same_shape(other) {
            return Err(Error::DimensionMismatch {
                op,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Scale every entry by `c`.
    pub fn scale(&self, c: impl Into<Complex64>) -> Matrix {
        let c = c.into();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * c).collect(),
        }
    }

    /// Checked matrix product.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Frobenius norm: sqrt of the sum of squared entry moduli.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

// Operator forms for code paths where shapes are guaranteed by construction;
// they panic on mismatch with the checked error's message.
impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        Matrix::add(self, rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        Matrix::sub(self, rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix::matmul(self, rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self[(i, j)];
                if z.im == 0.0 {
                    write!(f, "{}", z.re)?;
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)?;
                }
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Solve `M X = B` by Gaussian elimination with partial pivoting.
///
/// `M` must be square with as many rows as `B`. Fails with
/// [`Error::Singular`] when the best available pivot falls below
/// `1e-14 * ||M||_F`.
pub fn solve_linear(m: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "solve_linear",
            rows: m.rows,
            cols: m.cols,
        });
    }
    if m.rows != b.rows {
        return Err(Error::DimensionMismatch {
            op: "solve_linear",
            left_rows: m.rows,
            left_cols: m.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }

    let n = m.rows;
    let threshold = 1e-14 * m.frobenius_norm();
    let mut lu = m.clone();
    let mut x = b.clone();

    for col in 0..n {
        // Partial pivoting on entry modulus.
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, lu[(r, col)].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty pivot search");
        if pivot_mag < threshold || pivot_mag == 0.0 {
            return Err(Error::Singular {
                pivot: pivot_mag,
                threshold,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            for j in 0..x.cols {
                let tmp = x[(col, j)];
                x[(col, j)] = x[(pivot_row, j)];
                x[(pivot_row, j)] = tmp;
            }
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= factor * v;
            }
            for j in 0..x.cols {
                let v = x[(col, j)];
                x[(r, j)] -= factor * v;
            }
        }
    }

    // Back substitution.
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..x.cols {
            let mut v = x[(col, j)];
            for k in col + 1..n {
                v -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = v / pivot;
        }
    }

    if !x.is_finite() {
        return Err(Error::NonFinite { op: "solve_linear" });
    }
    Ok(x)
}

/// Matrix sine by the odd Taylor series.
///
/// Terms are accumulated until the current term's Frobenius norm drops to
/// `tol * (1 + ||partial sum||_F)`, with a hard cap of [`SERIES_TERM_CAP`]
/// terms. Arguments in this crate's scope have norm of order one, where the
/// plain series converges in a handful of terms.
pub fn mat_sin(a: &Matrix, tol: f64) -> Result<Matrix> {
    trig_series(a, tol, "mat_sin", false)
}

/// Matrix cosine by the even Taylor series. Same truncation rule as [`mat_sin`].
pub fn mat_cos(a: &Matrix, tol: f64) -> Result<Matrix> {
    trig_series(a, tol, "mat_cos", true)
}

fn trig_series(a: &Matrix, tol: f64, op: &'static str, even: bool) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op,
            rows: a.rows,
            cols: a.cols,
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument {
            op,
            message: format!("tolerance must be positive, got {tol}"),
        });
    }

    let a_sq = a.matmul(a)?;
    // First term: I for cosine, A for sine.
    let mut term = if even {
        Matrix::identity(a.rows)
    } else {
        a.clone()
    };
    let mut sum = term.clone();
    // Factorial index of the current term's power.
    let mut p = if even { 0usize } else { 1usize };

    for _ in 1..SERIES_TERM_CAP {
        // Next term: multiply by -A^2 / ((p+1)(p+2)).
        let denom = ((p + 1) * (p + 2)) as f64;
        term = term.matmul(&a_sq)?.scale(-1.0 / denom);
        p += 2;
        if !term.is_finite() {
            // Terms overflowed; the series cannot recover.
            break;
        }
        sum = sum.add(&term)?;
        let term_norm = term.frobenius_norm();
        let sum_norm = sum.frobenius_norm();
        // Entries can stay finite while the squared norm overflows; only a
        // finite comparison counts as convergence.
        if term_norm.is_finite() && sum_norm.is_finite() && term_norm <= tol * (1.0 + sum_norm) {
            if !sum.is_finite() {
                return Err(Error::NonFinite { op });
            }
            return Ok(sum);
        }
    }

    Err(Error::SeriesDiverged {
        op,
        max_terms: SERIES_TERM_CAP,
        norm: a.frobenius_norm(),
    })
}

/// Text form: nested arrays of numbers, row-major; each entry is either a
/// real scalar or a two-element `[re, im]` pair.
#[derive(Deserialize)]
#[serde(untagged)]
enum EntryText {
    Real(f64),
    Pair([f64; 2]),
}

impl From<EntryText> for Complex64 {
    fn from(e: EntryText) -> Complex64 {
        match e {
            EntryText::Real(re) => Complex64::new(re, 0.0),
            EntryText::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<EntryText>> = Vec::deserialize(deserializer)?;
        if rows.is_empty() {
            return Err(de::Error::custom("matrix must have at least one row"));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(de::Error::custom("matrix rows must be non-empty"));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(de::Error::custom("matrix rows must all have equal length"));
        }
        let entries: Vec<Complex64> = rows
            .into_iter()
            .flat_map(|r| r.into_iter().map(Complex64::from))
            .collect();
        let m = Matrix::from_complex(entries.len() / cols, cols, entries);
        if !m.is_finite() {
            return Err(de::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}
