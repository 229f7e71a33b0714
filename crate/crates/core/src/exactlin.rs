//! Dense linear algebra over prime fields.
//!
//! Everything else in the crate is built on [`Matrix`]. Elimination always
//! picks the first nonzero entry in column order as pivot, so ranks, kernel
//! bases and solutions are reproducible bit for bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field `F_p` with `2 <= p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p as u64
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..(1u64 << 31)).contains(&p) {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }
}

/// `acc += c * v` over `field`.
pub fn axpy(field: PrimeField, acc: &mut [u32], c: u32, v: &[u32]) {
    if c == 0 {
        return;
    }
    let p = field.p as u64;
    for (a, &x) in acc.iter_mut().zip(v) {
        if x != 0 {
            *a = ((*a as u64 + c as u64 * x as u64) % p) as u32;
        }
    }
}

pub fn dot(field: PrimeField, a: &[u32], b: &[u32]) -> u32 {
    let p = field.p as u64;
    let mut acc = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        acc = (acc + x as u64 * y as u64) % p;
    }
    acc as u32
}

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over F_{}", self.rows, self.cols, self.field.p)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Builds a matrix from row-major data, reducing every entry mod p.
    pub fn from_data(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        let data = data.into_iter().map(|x| x % field.p).collect();
        Ok(Matrix { field, rows, cols, data })
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| field.reduce(x)));
        }
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for i in 0..rows {
                m.data[i * m.cols + j] = c[i] % field.p;
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a != 0 {
                    axpy(self.field, out_row, a, other.row(k));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|r| dot(self.field, self.row(r), v)).collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let data = self.data.iter().map(|&a| self.field.mul(a, c)).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row count");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Matrix { field: self.field, rows: self.rows, cols, data }
    }

    /// `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column count");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Selects the given columns in order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Self::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m.data[r * cols.len() + k] = self.get(r, c);
            }
        }
        m
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.row_reduce(self.cols);
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let Rref { matrix: r, pivots } = self.rref();
        let f = self.field;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1;
                for (k, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(k, free));
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self * x = b`, or `None` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let aug = self.hstack(&Matrix::from_columns(self.field, self.rows, &[b.to_vec()]));
        let Rref { matrix: r, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u32; self.cols];
        for (k, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(k, self.cols);
        }
        Ok(Some(x))
    }

    /// Gauss-Jordan elimination in place, pivoting only in the first
    /// `pivot_cols` columns. Returns the pivot columns.
    fn row_reduce(&mut self, pivot_cols: usize) -> Vec<usize> {
        let f = self.field;
        let p = f.p as u64;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut cur = 0usize;
        for c in 0..pivot_cols.min(cols) {
            if cur == self.rows {
                break;
            }
            let Some(pr) = (cur..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if pr != cur {
                for k in 0..cols {
                    self.data.swap(pr * cols + k, cur * cols + k);
                }
            }
            let inv = f.inv(self.data[cur * cols + c]);
            for k in c..cols {
                let x = &mut self.data[cur * cols + k];
                *x = f.mul(*x, inv);
            }
            let (before, rest) = self.data.split_at_mut(cur * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            for other in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
                let factor = other[c];
                if factor == 0 {
                    continue;
                }
                let neg = p - factor as u64;
                for k in c..cols {
                    let pv = pivot_row[k];
                    if pv != 0 {
                        other[k] = ((other[k] as u64 + neg * pv as u64) % p) as u32;
                    }
                }
            }
            pivots.push(c);
            cur += 1;
        }
        pivots
    }
}

/// Result of [`Matrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

/// Factored form of a matrix for solving many right-hand sides.
///
/// Stores `E` with `E * M` in reduced row echelon form; a solve costs one
/// matrix-vector product.
#[derive(Clone, Debug)]
pub struct Solver {
    cols: usize,
    transform: Matrix,
    pivots: Vec<usize>,
}

impl Solver {
    pub fn new(m: &Matrix) -> Self {
        let mut aug = m.hstack(&Matrix::identity(m.field, m.rows));
        let pivots = aug.row_reduce(m.cols);
        let all: Vec<usize> = (m.cols..m.cols + m.rows).collect();
        Solver { cols: m.cols, transform: aug.select_columns(&all), pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Same canonical solution as [`Matrix::solve`].
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        let c = self.transform.mul_vec(b);
        if !is_zero(&c[self.pivots.len()..]) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (k, &pc) in self.pivots.iter().enumerate() {
            x[pc] = c[k];
        }
        Some(x)
    }
}

/// Incrementally built subspace of `F_p^n`, kept in semi-echelon form.
#[derive(Clone, Debug)]
pub struct EchelonSpace {
    field: PrimeField,
    len: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonSpace {
    pub fn new(field: PrimeField, len: usize) -> Self {
        EchelonSpace { field, len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    /// Remainder of `v` after reduction against the stored basis.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc];
            if c != 0 {
                axpy(self.field, &mut w, self.field.neg(c), row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.len, "vector length");
        let mut w = self.reduce(v);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(w[pc]);
        for x in w.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        for (row, _) in self.rows.iter_mut().zip(&self.pivots) {
            let c = row[pc];
            if c != 0 {
                axpy(self.field, row, self.field.neg(c), &w);
            }
        }
        self.rows.push(w);
        self.pivots.push(pc);
        true
    }

    /// Canonical (reduced row echelon) basis, ordered by pivot position.
    pub fn basis(&self) -> Vec<Vec<u32>> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&k| self.pivots[k]);
        order.into_iter().map(|k| self.rows[k].clone()).collect()
    }
}
