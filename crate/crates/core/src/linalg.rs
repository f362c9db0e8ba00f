//! Dense polynomials and matrices over a [`Field`].

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// Coefficient vector, index = degree. Trailing zeros are allowed, so the
/// length doubles as a degree bound.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    pub coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(coeffs: Vec<Elem>) -> Self {
        Poly { coeffs }
    }

    pub fn zero(degree_bound: usize) -> Self {
        Poly { coeffs: vec![Elem::ZERO; degree_bound + 1] }
    }

    /// Actual degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn coeff(&self, j: usize) -> Elem {
        self.coeffs.get(j).copied().unwrap_or(Elem::ZERO)
    }

    pub fn eval(&self, f: &Field, x: Elem) -> Elem {
        poly_eval(f, self, x)
    }
}

/// Horner evaluation.
pub fn poly_eval(f: &Field, p: &Poly, x: Elem) -> Elem {
    p.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| f.mul_add(c, acc, x))
}

fn check_distinct(points: &[Elem]) -> Result<()> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }
    Ok(())
}

/// Unique polynomial of degree `< points.len()` through the given points,
/// via Newton divided differences.
pub fn interpolate(f: &Field, points: &[Elem], values: &[Elem]) -> Result<Poly> {
    if points.len() != values.len() {
        return Err(Error::LengthMismatch { expected: points.len(), got: values.len() });
    }
    if points.is_empty() {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    check_distinct(points)?;
    let t = points.len();

    // divided differences in place: dd[i] = f[x_0..x_i]
    let mut dd = values.to_vec();
    for level in 1..t {
        for i in (level..t).rev() {
            let num = f.sub(dd[i], dd[i - 1]);
            let den = f.sub(points[i], points[i - level]);
            dd[i] = f.div(num, den)?;
        }
    }

    // expand the Newton form from the innermost term outward
    let mut coeffs = vec![Elem::ZERO; t];
    coeffs[0] = dd[t - 1];
    for i in (0..t - 1).rev() {
        // coeffs <- coeffs * (x - points[i]) + dd[i]
        let len = t - 1 - i;
        let xi = points[i];
        coeffs[len] = coeffs[len - 1];
        for j in (1..len).rev() {
            coeffs[j] = f.sub(coeffs[j - 1], f.mul(coeffs[j], xi));
        }
        coeffs[0] = f.sub(dd[i], f.mul(coeffs[0], xi));
    }
    Ok(Poly { coeffs })
}

/// Solves `sum_j c_j * points[i]^j = rhs[i]` for `c`.
pub fn vandermonde_solve(f: &Field, points: &[Elem], rhs: &[Elem]) -> Result<Vec<Elem>> {
    interpolate(f, points, rhs).map(|p| p.coeffs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Elem::ONE;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// `rows[i][j] = points[j]^i`
    pub fn vandermonde(f: &Field, points: &[Elem], rows: usize) -> Self {
        let mut m = Self::zeros(rows, points.len());
        for (j, &x) in points.iter().enumerate() {
            let mut p = Elem::ONE;
            for i in 0..rows {
                m[(i, j)] = p;
                p = f.mul(p, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, f: &Field, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| f.dot(self.row(i), v)).collect())
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self, f: &Field) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(p) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(rank, p);
            let inv = f.inv(a[(rank, col)]).expect("pivot is nonzero");
            for r in rank + 1..a.rows {
                let factor = f.mul(a[(r, col)], inv);
                if !factor.is_zero() {
                    for c in col..a.cols {
                        let v = f.sub(a[(r, c)], f.mul(factor, a[(rank, c)]));
                        a[(r, c)] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Elem;

    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn matmul(f: &Field, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for l in 0..a.cols {
            let x = a[(i, l)];
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] = f.mul_add(out[(i, j)], x, b[(l, j)]);
            }
        }
    }
    Ok(out)
}

/// Solves `a * x = b` for square `a` by Gauss-Jordan elimination with
/// first-nonzero pivoting.
pub fn solve_linear(f: &Field, a: &Matrix, b: &[Elem]) -> Result<Vec<Elem>> {
    if a.rows != a.cols {
        return Err(Error::Dimension(format!("{}x{} system is not square", a.rows, a.cols)));
    }
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[(r, col)].is_zero()).ok_or(Error::Singular)?;
        m.swap_rows(col, p);
        x.swap(col, p);
        let inv = f.inv(m[(col, col)])?;
        for c in col..n {
            m[(col, c)] = f.mul(m[(col, c)], inv);
        }
        x[col] = f.mul(x[col], inv);
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[(r, col)];
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let v = f.sub(m[(r, c)], f.mul(factor, m[(col, c)]));
                m[(r, c)] = v;
            }
            x[r] = f.sub(x[r], f.mul(factor, x[col]));
        }
    }
    Ok(x)
}
