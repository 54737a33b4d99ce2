//! Exact dense linear algebra over prime fields.

pub(crate) mod echelon;

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub(crate) use echelon::Echelon;

/// The characteristic of the coefficient field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 16 {
            return Err(Error::PrimeTooLarge(p));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "zero has no inverse");
        self.pow(a, self.0 as u64 - 2)
    }

    /// True when `q >= 2` is a power of this prime.
    pub fn is_power(self, q: usize) -> bool {
        let p = self.0 as usize;
        if q < 2 {
            return false;
        }
        let mut x = q;
        while x.is_multiple_of(p) {
            x /= p;
        }
        x == 1
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0 as u64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense row-major matrix over GF(p). Entries are always reduced into `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    prime: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over GF({})", self.rows, self.cols, self.prime)?;
        for r in 0..self.rows.min(24) {
            let row = self.row(r);
            let shown: Vec<String> = row.iter().take(32).map(|x| x.to_string()).collect();
            writeln!(f, "  [{}{}]", shown.join(" "), if self.cols > 32 { " ..." } else { "" })?;
        }
        if self.rows > 24 {
            writeln!(f, "  ...")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(prime: Prime, rows: usize, cols: usize) -> Self {
        Matrix { prime, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(prime: Prime, n: usize) -> Self {
        let mut m = Self::zeros(prime, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major data, reducing every entry mod p.
    pub fn from_vec(prime: Prime, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries supplied for a {}x{} matrix", data.len(), rows, cols)));
        }
        let p = prime.value();
        let data = data.into_iter().map(|x| x % p).collect();
        Ok(Matrix { prime, rows, cols, data })
    }

    /// Builds a matrix from signed rows; all rows must have equal length.
    pub fn from_rows(prime: Prime, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| prime.reduce(x)).collect();
        Ok(Matrix { prime, rows: rows.len(), cols, data })
    }

    /// Single column from a vector.
    pub fn column_vector(prime: Prime, v: &[u32]) -> Self {
        Matrix { prime, rows: v.len(), cols: 1, data: v.iter().map(|x| x % prime.value()).collect() }
    }

    pub fn prime(&self) -> Prime {
        self.prime
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

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.prime.value();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == (r == c) as u32))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.prime, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let p = self.prime;
        let s = s % p.value();
        Matrix { data: self.data.iter().map(|&x| p.mul(x, s)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> Matrix {
        let p = self.prime;
        Matrix { data: self.data.iter().map(|&x| p.neg(x)).collect(), ..self.clone() }
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        self.check_prime(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }

    fn check_prime(&self, other: &Matrix) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime.value(), other.prime.value()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let p = self.prime;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| p.add(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let p = self.prime;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| p.sub(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: u32, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.prime;
        let c = c % p.value();
        if c == 0 {
            return;
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            if b != 0 {
                *a = p.add(*a, p.mul(c, b));
            }
        }
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_prime(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.prime.value() as u64;
        let n = other.cols;
        let mut out = Matrix::zeros(self.prime, self.rows, n);
        let mut acc = vec![0u64; n];
        // Products are < 2^32, so 2^31 of them fit in a u64 before reduction.
        let flush_every = 1usize << 31;
        for r in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut pending = 0usize;
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                for (x, &b) in acc.iter_mut().zip(orow) {
                    *x += a * b as u64;
                }
                pending += 1;
                if pending == flush_every {
                    acc.iter_mut().for_each(|x| *x %= p);
                    pending = 0;
                }
            }
            for (o, &x) in out.data[r * n..(r + 1) * n].iter_mut().zip(&acc) {
                *o = (x % p) as u32;
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.prime.value() as u64;
        (0..self.rows)
            .map(|r| {
                let s: u64 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.prime, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(self.prime, rows.len(), cols.len());
        for (i, r) in rows.enumerate() {
            out.data[i * out.cols..(i + 1) * out.cols].copy_from_slice(&self.row(r)[cols.clone()]);
        }
        out
    }

    /// Entries at the given (not necessarily contiguous) row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.prime, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.data[i * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, block: &Matrix) {
        assert!(row0 + block.rows <= self.rows && col0 + block.cols <= self.cols);
        for r in 0..block.rows {
            let dst = (row0 + r) * self.cols + col0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    pub fn block_diagonal(prime: Prime, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(prime, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_prime(other)?;
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row count".into()));
        }
        let mut out = Matrix::zeros(self.prime, self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        Ok(out)
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_prime(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column count".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { prime: self.prime, rows: self.rows + other.rows, cols: self.cols, data })
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.prime, self.cols);
        for r in 0..self.rows {
            e.insert(self.row(r));
        }
        e
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    /// Basis of `{x : self · x = 0}` as column vectors.
    pub fn nullspace(&self) -> Vec<Vec<u32>> {
        self.echelon().nullspace(self.prime, self.cols)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        match solve_linear(self, &Matrix::identity(self.prime, self.rows)).ok()? {
            Solution::Feasible { particular, nullspace_basis } if nullspace_basis.is_empty() => Some(particular),
            _ => None,
        }
    }

    /// Basis (as rows) of the row space, in reduced echelon form.
    pub fn row_space(&self) -> Vec<Vec<u32>> {
        self.echelon().rref().1
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Feasible { particular: Matrix, nullspace_basis: Vec<Matrix> },
    Infeasible,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Solution::Feasible { .. })
    }
}

/// Solves `A · X = B` exactly. Infeasibility means `rank [A | B] > rank A`.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Solution> {
    a.check_prime(b)?;
    if a.rows != b.rows {
        return Err(Error::Dimension(format!("A has {} rows but B has {}", a.rows, b.rows)));
    }
    let (m, k) = (a.cols, b.cols);
    let mut e = Echelon::new(a.prime, m + k);
    let mut row = vec![0u32; m + k];
    for r in 0..a.rows {
        row[..m].copy_from_slice(a.row(r));
        row[m..].copy_from_slice(b.row(r));
        if let Some(pivot) = e.insert(&row) {
            if pivot >= m {
                return Ok(Solution::Infeasible);
            }
        }
    }
    let (pivots, rows) = e.rref();
    let mut particular = Matrix::zeros(a.prime, m, k);
    for (r, &pc) in rows.iter().zip(&pivots) {
        particular.data[pc * k..(pc + 1) * k].copy_from_slice(&r[m..]);
    }
    let nullspace_basis = echelon::nullspace_from_rref(a.prime, m, &pivots, &rows)
        .into_iter()
        .map(|v| Matrix::column_vector(a.prime, &v))
        .collect();
    Ok(Solution::Feasible { particular, nullspace_basis })
}

pub fn rank(a: &Matrix) -> usize {
    a.echelon().rank()
}

/// Kronecker product: entry `((i, j), (k, l))` is `A[i, k] · B[j, l]`.
pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.check_prime(b)?;
    let p = a.prime;
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut out = Matrix::zeros(p, rows, cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if x == 0 {
                continue;
            }
            for j in 0..b.rows {
                let dst = (i * b.rows + j) * cols + k * b.cols;
                for (l, &y) in b.row(j).iter().enumerate() {
                    out.data[dst + l] = p.mul(x, y);
                }
            }
        }
    }
    Ok(out)
}
