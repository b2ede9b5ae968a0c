use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul, Sub};

use crate::{Error, Result};

/// Dense real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RealMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dims(cols, r.len()));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(RealMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RealMatrix {
    type Output = RealMatrix;
    fn mul(self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        RealMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }
}

impl Sub for &RealMatrix {
    type Output = RealMatrix;
    fn sub(self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Orthonormal frame of the column space by Gram–Schmidt with column
/// pivoting: the remaining column with the largest residual goes next, and
/// the process stops once that residual is at most `rel_tol` times the
/// largest original column norm.
pub fn column_space(a: &RealMatrix, rel_tol: f64) -> RealMatrix {
    let mut cols = a.columns();
    let scale = cols.iter().map(|c| libm::sqrt(dot(c, c))).fold(0.0, f64::max);
    let mut frame: Vec<Vec<f64>> = Vec::new();
    if scale == 0.0 {
        return RealMatrix::zeros(a.rows(), 0);
    }
    while !cols.is_empty() {
        let (pos, best) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, libm::sqrt(dot(c, c))))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= rel_tol * scale {
            break;
        }
        let mut q = cols.swap_remove(pos);
        // second pass keeps the frame orthonormal to rounding
        for _ in 0..2 {
            for f in &frame {
                let p = dot(f, &q);
                for (x, y) in q.iter_mut().zip(f) {
                    *x -= p * y;
                }
            }
        }
        let n = libm::sqrt(dot(&q, &q));
        for x in &mut q {
            *x /= n;
        }
        for c in &mut cols {
            let p = dot(&q, c);
            for (x, y) in c.iter_mut().zip(&q) {
                *x -= p * y;
            }
        }
        frame.push(q);
    }
    RealMatrix::from_columns(a.rows(), &frame)
}

pub fn rank(a: &RealMatrix, rel_tol: f64) -> usize {
    column_space(a, rel_tol).cols()
}

/// Orthonormal completion of a frame: columns spanning its orthogonal
/// complement in `ℝⁿ`.
pub fn orthogonal_complement(frame: &RealMatrix) -> RealMatrix {
    let n = frame.rows();
    let mut basis = frame.columns();
    let k = basis.len();
    for e in 0..n {
        let mut v = alloc::vec![0.0; n];
        v[e] = 1.0;
        for _ in 0..2 {
            for f in &basis {
                let p = dot(f, &v);
                for (x, y) in v.iter_mut().zip(f) {
                    *x -= p * y;
                }
            }
        }
        let nv = libm::sqrt(dot(&v, &v));
        if nv > 1e-8 {
            for x in &mut v {
                *x /= nv;
            }
            basis.push(v);
        }
        if basis.len() == n {
            break;
        }
    }
    RealMatrix::from_columns(n, &basis[k..])
}

/// Orthonormal frame of `ker A`.
pub fn nullspace(a: &RealMatrix, rel_tol: f64) -> RealMatrix {
    orthogonal_complement(&column_space(&a.transpose(), rel_tol))
}
