//! Dense vectors and matrices over a [`Scalar`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{scalar_serde, Scalar};
use crate::error::{Error, Result};

/// Fixed-dimension coordinate vector. For single systems the last coordinate is
/// the normalization slot.
#[derive(Clone, PartialEq)]
pub struct Vector<S>(Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![S::zero(); dim])
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        Vector(coords.iter().map(|&c| S::from_i64(c)).collect())
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = S::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<S> {
        self.0
    }

    pub fn last(&self) -> Option<&S> {
        self.0.last()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// Euclidean dot product.
    pub fn dot(&self, other: &Self) -> Result<S> {
        self.check_dim(other)?;
        Ok(dot_slices(&self.0, &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() - b).collect()))
    }

    pub fn scale(&self, k: &S) -> Self {
        Vector(self.0.iter().map(|a| a.clone() * k).collect())
    }

    /// Kronecker product; the first factor varies slowest.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.0 {
            for b in &other.0 {
                out.push(a.clone() * b);
            }
        }
        Vector(out)
    }

    /// Drops the trailing normalization coordinate.
    pub fn slice(&self) -> Self {
        Vector(self.0[..self.dim().saturating_sub(1)].to_vec())
    }

    /// Appends a normalization coordinate equal to one.
    pub fn lift(&self) -> Self {
        let mut c = self.0.clone();
        c.push(S::one());
        Vector(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Coordinate-wise equality within the scalar tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a.approx_eq(b))
    }

    /// Lexicographic order by coordinates (tolerance ignored).
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.canonical_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.dim().cmp(&other.dim())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64()).collect()
    }

    /// Weighted sum Σ wᵢ vᵢ.
    pub fn combination(weights: &[S], vectors: &[Vector<S>]) -> Result<Self> {
        let dim = vectors.first().map(|v| v.dim()).ok_or(Error::EmptyVertexList)?;
        if weights.len() != vectors.len() {
            return Err(Error::LengthMismatch { left: weights.len(), right: vectors.len() });
        }
        let mut acc = Self::zeros(dim);
        for (w, v) in weights.iter().zip(vectors) {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
            }
            if structurally_zero(w) {
                continue;
            }
            for (a, b) in acc.0.iter_mut().zip(&v.0) {
                let mut t = w.clone();
                t *= b;
                *a += &t;
            }
        }
        Ok(acc)
    }
}

pub(crate) fn dot_slices<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        let mut t = x.clone();
        t *= y;
        acc += &t;
    }
    acc
}

impl<S> Index<usize> for Vector<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S: Scalar> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", c.to_scalar_string())?;
        }
        f.write_str(")")
    }
}

impl<S: Scalar> Serialize for Vector<S> {
    fn serialize<Se: Serializer>(&self, serializer: Se) -> std::result::Result<Se::Ok, Se::Error> {
        scalar_serde::vec::serialize(&self.0, serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Vector<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        scalar_serde::vec::deserialize(deserializer).map(Vector)
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn mul_vec(&self, v: &Vector<S>) -> Result<Vector<S>> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.dim() });
        }
        Ok(Vector::new((0..self.rows).map(|i| dot_slices(self.row(i), v.coords())).collect()))
    }

    pub fn mul(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let mut t = a.clone();
                    t *= other.get(k, j);
                    out.data[i * other.cols + j] += &t;
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &Matrix<S>) -> Matrix<S> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let mut t = a.clone();
                        t *= other.get(k, l);
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] = t;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, k: &S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.clone() * k).collect() }
    }

    pub fn add(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b).collect(),
        })
    }

    /// Outer product `a bᵀ`.
    pub fn outer(a: &Vector<S>, b: &Vector<S>) -> Matrix<S> {
        let mut out = Matrix::zeros(a.dim(), b.dim());
        for i in 0..a.dim() {
            for j in 0..b.dim() {
                out.data[i * b.dim() + j] = a[i].clone() * &b[j];
            }
        }
        out
    }

    pub fn approx_eq(&self, other: &Matrix<S>) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vectors();
        row_reduce(&mut rows, self.cols)
    }

    /// Solves the square system `self · x = b`; `None` if singular.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        if self.rows != self.cols || b.len() != self.rows {
            return None;
        }
        let n = self.rows;
        let mut aug: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        solve_augmented(&mut aug, n)
    }
}

/// Gaussian elimination on an `n × (n+1)` augmented system, in place.
pub(crate) fn solve_augmented<S: Scalar>(aug: &mut [Vec<S>], n: usize) -> Option<Vec<S>> {
    for col in 0..n {
        let pivot = pick_pivot(aug, col, col)?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for x in &mut aug[col][col..=n] {
            *x /= &p;
        }
        eliminate(&mut aug[..n], col, col, n + 1);
    }
    Some(aug.iter().map(|r| r[n].clone()).collect())
}

/// Clears column `col` of every row but `pivot`, whose entry there is 1.
fn eliminate<S: Scalar>(rows: &mut [Vec<S>], pivot: usize, col: usize, end: usize) {
    let pivot_row = std::mem::take(&mut rows[pivot]);
    for (i, row) in rows.iter_mut().enumerate() {
        if i == pivot || structurally_zero(&row[col]) {
            continue;
        }
        let f = row[col].clone();
        for (x, pj) in row[col..end].iter_mut().zip(&pivot_row[col..end]) {
            let mut t = f.clone();
            t *= pj;
            *x -= &t;
        }
    }
    rows[pivot] = pivot_row;
}

fn structurally_zero<S: Scalar>(x: &S) -> bool {
    match S::MODE {
        super::Mode::Exact => x.is_zero(),
        super::Mode::Float => x.to_f64() == 0.0,
    }
}

/// Exact mode: first non-zero entry. Float mode: partial pivoting, rejecting
/// pivots within tolerance of zero.
fn pick_pivot<S: Scalar>(rows: &[Vec<S>], col: usize, start: usize) -> Option<usize> {
    match S::MODE {
        super::Mode::Exact => (start..rows.len()).find(|&i| !rows[i][col].is_zero()),
        super::Mode::Float => {
            let best = (start..rows.len())
                .max_by(|&a, &b| rows[a][col].to_f64().abs().total_cmp(&rows[b][col].to_f64().abs()))?;
            if rows[best][col].is_zero() {
                None
            } else {
                Some(best)
            }
        }
    }
}

/// Reduces rows to echelon form and returns the rank.
pub(crate) fn row_reduce<S: Scalar>(rows: &mut [Vec<S>], cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = pick_pivot(rows, col, rank) else { continue };
        rows.swap(rank, p);
        let pv = rows[rank][col].clone();
        for x in &mut rows[rank][col..cols] {
            *x /= &pv;
        }
        eliminate(rows, rank, col, cols);
        rank += 1;
    }
    rank
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}", Vector::new(self.row(i).to_vec()))?;
        }
        f.write_str("]")
    }
}
