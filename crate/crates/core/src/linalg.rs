//! Dense exact matrices over the cyclotomic scalars.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::CycScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
}

pub type Vector = Vec<CycScalar>;

pub fn zero_vector(n: usize) -> Vector {
    vec![CycScalar::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = CycScalar::one();
    v
}

pub fn is_zero_vector(v: &[CycScalar]) -> bool {
    v.iter().all(CycScalar::is_zero)
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<CycScalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![CycScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &CycScalar::one())
    }

    pub fn scalar(n: usize, c: &CycScalar) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn diagonal(entries: &[CycScalar]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, c) in entries.iter().enumerate() {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycScalar>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), rows, "column length");
            for (i, c) in v.iter().enumerate() {
                m.set(i, j, c.clone());
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &CycScalar) {
        let cell = &mut self.data[i * self.cols + j];
        *cell = &*cell + v;
    }

    pub fn row(&self, i: usize) -> &[CycScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<CycScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycScalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, c: &CycScalar) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[CycScalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = CycScalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn trace(&self) -> CycScalar {
        (0..self.rows.min(self.cols)).fold(CycScalar::zero(), |acc, i| &acc + self.get(i, i))
    }

    /// `trace(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Matrix) -> CycScalar {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = CycScalar::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                let b = other.get(j, i);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
        }
        acc
    }

    /// Reduced row echelon form and pivot columns. Pivots are taken in
    /// column order, first available row, so the result is deterministic.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).inverse().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rv = m.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * rv);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : self * v = 0}`, as columns of the returned matrix.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, CycScalar::one());
            for (i, &p) in pivots.iter().enumerate() {
                let v = r.get(i, f);
                if !v.is_zero() {
                    basis.set(p, k, -v);
                }
            }
        }
        basis
    }

    /// A basis of the column space, chosen among the original columns.
    pub fn column_space(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Matrix::zeros(0, 0));
        }
        let aug = self.hstack(&Matrix::identity(n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        Ok(r.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }

    /// Some solution of `self * X = rhs`, or `None` if inconsistent.
    pub fn solve(&self, rhs: &Matrix) -> Result<Option<Matrix>, LinalgError> {
        if rhs.rows != self.rows {
            return Err(LinalgError::DimensionMismatch("solve rhs rows".into()));
        }
        let aug = self.hstack(rhs)?;
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, r.get(i, self.cols + j).clone());
            }
        }
        Ok(Some(x))
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch("hstack rows".into()));
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("vstack cols".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    let v = b.get(i, j);
                    if !v.is_zero() {
                        out.set(r0 + i, c0 + j, v.clone());
                    }
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out.set(k, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                out.set(i, k, self.get(i, j).clone());
            }
        }
        out
    }

    /// Columns of `self` extended by unit vectors to a basis of the whole space.
    /// Returns the indices of the unit vectors that were added.
    pub fn complement_units(&self) -> Vec<usize> {
        let mut cur = self.column_space();
        let mut added = Vec::new();
        let mut rank = cur.cols;
        for i in 0..self.rows {
            if rank == self.rows {
                break;
            }
            let cand = cur
                .hstack(&Matrix::from_columns(self.rows, &[unit_vector(self.rows, i)]))
                .expect("same rows");
            let r = cand.rank();
            if r > rank {
                cur = cand;
                rank = r;
                added.push(i);
            }
        }
        added
    }

    /// Basis of the intersection of the column spaces of `a` and `b`.
    pub fn intersect_column_spaces(a: &Matrix, b: &Matrix) -> Matrix {
        assert_eq!(a.rows, b.rows);
        if a.cols == 0 || b.cols == 0 {
            return Matrix::zeros(a.rows, 0);
        }
        let stacked = a.hstack(&b.scale(&-CycScalar::one())).expect("same rows");
        let ns = stacked.nullspace();
        let coeffs = ns.select_rows(&(0..a.cols).collect::<Vec<_>>());
        (a * &coeffs).column_space()
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Serialized as a row-major array of arrays; empty matrices keep their shape.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<CycScalar>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(deserializer)?;
        if r.entries.len() != r.rows || r.entries.iter().any(|row| row.len() != r.cols) {
            return Err(serde::de::Error::custom("matrix shape does not match entries"));
        }
        Ok(Matrix {
            rows: r.rows,
            cols: r.cols,
            data: r.entries.into_iter().flatten().collect(),
        })
    }
}

/// Incremental row reduction of sparse linear equations.
///
/// Rows are kept fully reduced against each other with a leading 1 at their
/// pivot, so membership tests and null-space extraction need no extra pass.
#[derive(Debug, Clone)]
pub struct SparseEliminator {
    nvars: usize,
    rows: BTreeMap<usize, BTreeMap<usize, CycScalar>>,
}

impl SparseEliminator {
    pub fn new(nvars: usize) -> Self {
        SparseEliminator {
            nvars,
            rows: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut row: BTreeMap<usize, CycScalar>) -> BTreeMap<usize, CycScalar> {
        let pivots: Vec<usize> = row
            .keys()
            .copied()
            .filter(|c| self.rows.contains_key(c))
            .collect();
        for p in pivots {
            let Some(f) = row.get(&p).cloned() else {
                continue;
            };
            for (c, v) in &self.rows[&p] {
                let entry = row.entry(*c).or_insert_with(CycScalar::zero);
                *entry = &*entry - &(&f * v);
                if entry.is_zero() {
                    row.remove(c);
                }
            }
        }
        row
    }

    /// Adds the equation `Σ row[c] · var_c = 0`; returns whether the rank grew.
    pub fn insert(&mut self, row: impl IntoIterator<Item = (usize, CycScalar)>) -> bool {
        let mut map = BTreeMap::new();
        for (c, v) in row {
            assert!(c < self.nvars, "variable index out of range");
            if v.is_zero() {
                continue;
            }
            let e = map.entry(c).or_insert_with(CycScalar::zero);
            *e = &*e + &v;
        }
        map.retain(|_, v| !v.is_zero());
        let row = self.reduce(map);
        let Some((&p, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.inverse().expect("nonzero lead");
        let row: BTreeMap<usize, CycScalar> = row.iter().map(|(c, v)| (*c, v * &inv)).collect();
        // keep older rows reduced against the new pivot
        for other in self.rows.values_mut() {
            if let Some(f) = other.get(&p).cloned() {
                for (c, v) in &row {
                    let e = other.entry(*c).or_insert_with(CycScalar::zero);
                    *e = &*e - &(&f * v);
                    if e.is_zero() {
                        other.remove(c);
                    }
                }
            }
        }
        self.rows.insert(p, row);
        true
    }

    pub fn insert_dense(&mut self, row: &[CycScalar]) -> bool {
        self.insert(row.iter().cloned().enumerate())
    }

    /// Whether the dense vector lies in the row span.
    pub fn contains(&self, row: &[CycScalar]) -> bool {
        let map = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.clone()))
            .collect();
        self.reduce(map).is_empty()
    }

    /// Basis of the solution space, one column per free variable.
    pub fn nullspace(&self) -> Matrix {
        let free: Vec<usize> = (0..self.nvars).filter(|c| !self.rows.contains_key(c)).collect();
        let mut basis = Matrix::zeros(self.nvars, free.len());
        let col_of: HashMap<usize, usize> = free.iter().enumerate().map(|(k, &f)| (f, k)).collect();
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, CycScalar::one());
        }
        for (&p, row) in &self.rows {
            for (c, v) in row {
                if *c != p {
                    let k = col_of[c];
                    basis.set(p, k, -v);
                }
            }
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| CycScalar::from_int(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = int(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.cols(), 1);
        assert!((&m * &ns).is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let z4 = CycScalar::root_of_unity(4, 1).unwrap();
        let m = Matrix::from_rows(vec![
            vec![z4.clone(), CycScalar::one()],
            vec![CycScalar::from_int(2), z4.clone()],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert_eq!(int(&[&[1, 1], &[1, 1]]).inverse(), Err(LinalgError::Singular));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = int(&[&[1, 1], &[0, 0]]);
        let b = int(&[&[3], &[0]]);
        let x = a.solve(&b).unwrap().unwrap();
        assert_eq!(&a * &x, b);
        assert!(a.solve(&int(&[&[1], &[1]])).unwrap().is_none());
    }

    #[test]
    fn intersection_and_complement() {
        let a = int(&[&[1, 0], &[0, 1], &[0, 0]]);
        let b = int(&[&[1, 0], &[0, 0], &[0, 1]]);
        let i = Matrix::intersect_column_spaces(&a, &b);
        assert_eq!(i.cols(), 1);
        assert_eq!(a.complement_units(), vec![2]);
    }

    #[test]
    fn trace_of_product_matches_product() {
        let a = int(&[&[1, 2], &[3, 4]]);
        let b = int(&[&[0, 1], &[5, -2]]);
        assert_eq!(a.trace_of_product(&b), (&a * &b).trace());
    }

    #[test]
    fn sparse_eliminator_matches_dense() {
        let m = int(&[&[1, 2, 3, 0], &[2, 4, 6, 0], &[1, 0, 1, 1]]);
        let mut e = SparseEliminator::new(4);
        for i in 0..3 {
            e.insert_dense(m.row(i));
        }
        assert_eq!(e.rank(), m.rank());
        let ns = e.nullspace();
        assert_eq!(ns.cols(), 2);
        assert!((&m * &ns).is_zero());
        assert!(e.contains(&[CycScalar::from_int(3), CycScalar::from_int(2), CycScalar::from_int(5), CycScalar::from_int(2)]));
    }

    #[test]
    fn serde_round_trip_keeps_empty_shape() {
        let m = Matrix::zeros(0, 3);
        let back: Matrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!((back.rows(), back.cols()), (0, 3));
    }
}
