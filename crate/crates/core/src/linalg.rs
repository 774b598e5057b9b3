//! Dense exact linear algebra over a prime field `Z_p`.
//!
//! Vectors are row vectors and matrices act on the right. Residues are
//! stored as bytes, so `p` must be a prime below 256.

use std::fmt;

use crate::error::{Error, Result};

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) && p < 256 {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[inline]
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl FpMatrix {
    pub fn zero(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod `p`.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        check_prime(p)?;
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zero(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(r.len(), cols));
            }
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v.rem_euclid(p as i64) as u32);
            }
        }
        Ok(m)
    }

    pub fn from_flat(p: u32, rows: usize, cols: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| (x as u32) < p));
        FpMatrix { p, rows, cols, data }
    }

    /// Stacks vectors of equal length as the rows of a matrix.
    pub fn from_vectors(p: u32, cols: usize, vecs: &[Vec<u8>]) -> Self {
        let mut data = Vec::with_capacity(vecs.len() * cols);
        for v in vecs {
            assert_eq!(v.len(), cols);
            data.extend_from_slice(v);
        }
        FpMatrix { p, rows: vecs.len(), cols, data }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }
    pub fn into_flat(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j] as u32
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = (v % self.p) as u8;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let p = self.p;
        let mut out = Self::zero(p, self.rows, other.cols);
        let mut acc = vec![0u32; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u32;
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                for (slot, &b) in acc.iter_mut().zip(orow) {
                    *slot += a * b as u32;
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (a % p) as u8;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, self.p - 1)
    }

    /// `self + c·other`.
    pub fn combine(&self, other: &Self, c: u32) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| ((a as u32 + c * b as u32) % p) as u8)
            .collect();
        FpMatrix { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p;
        let data = self.data.iter().map(|&a| (a as u32 * c % p) as u8).collect();
        FpMatrix { p, rows: self.rows, cols: self.cols, data }
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.rows);
        let mut acc = vec![0u32; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (slot, &b) in acc.iter_mut().zip(self.row(k)) {
                *slot += a as u32 * b as u32;
            }
        }
        acc.into_iter().map(|a| (a % self.p) as u8).collect()
    }

    /// Matrix times column vector.
    pub fn apply_right(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let s: u32 = self.row(i).iter().zip(v).map(|(&a, &b)| a as u32 * b as u32).sum();
                (s % self.p) as u8
            })
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.data[r * cols + c] as u32, p);
            if inv != 1 {
                for j in c..cols {
                    let x = &mut self.data[r * cols + j];
                    *x = (*x as u32 * inv % p) as u8;
                }
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.data[i * cols + c] as u32;
                if f == 0 {
                    continue;
                }
                let neg = p - f;
                for j in c..cols {
                    let v = self.data[r * cols + j] as u32;
                    if v != 0 {
                        let x = &mut self.data[i * cols + j];
                        *x = ((*x as u32 + neg * v) % p) as u8;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// The right kernel `{x : self·xᵀ = 0}`, as a subspace of `Z_p^cols`.
    pub fn nullspace(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let p = self.p;
        let vecs: Vec<Vec<u8>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![0u8; self.cols];
                v[f] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    let x = r.get(i, f);
                    v[pc] = ((p - x) % p) as u8;
                }
                v
            })
            .collect();
        Subspace::span(p, self.cols, &vecs)
    }

    /// The left kernel `{x : x·self = 0}`.
    pub fn left_nullspace(&self) -> Subspace {
        self.transpose().nullspace()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.p, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix mod {} ({}x{})", self.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// A subspace of `Z_p^n` held by its reduced echelon basis, so equal
/// subspaces compare equal as data.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u32, ambient: usize) -> Self {
        Subspace { ambient, basis: FpMatrix::zero(p, 0, ambient), pivots: vec![] }
    }

    pub fn full(p: u32, ambient: usize) -> Self {
        Subspace { ambient, basis: FpMatrix::identity(p, ambient), pivots: (0..ambient).collect() }
    }

    pub fn span(p: u32, ambient: usize, vecs: &[Vec<u8>]) -> Self {
        Self::from_matrix(&FpMatrix::from_vectors(p, ambient, vecs))
    }

    pub fn from_matrix(m: &FpMatrix) -> Self {
        let (r, pivots) = m.rref();
        let k = pivots.len();
        let basis = FpMatrix::from_flat(m.p(), k, m.cols(), r.data[..k * m.cols()].to_vec());
        Subspace { ambient: m.cols(), basis, pivots }
    }

    pub fn p(&self) -> u32 {
        self.basis.p()
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }
    pub fn basis_vectors(&self) -> Vec<Vec<u8>> {
        self.basis.row_vectors()
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    /// Reduces `v` against the echelon basis; zero iff `v` is in the span.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let p = self.p();
        let mut w: Vec<u32> = v.iter().map(|&x| x as u32).collect();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let f = w[pc] % p;
            if f != 0 {
                for (slot, &b) in w.iter_mut().zip(self.basis.row(i)) {
                    *slot += (p - f) * b as u32;
                }
            }
        }
        w.into_iter().map(|x| (x % p) as u8).collect()
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        assert_eq!(v.len(), self.ambient);
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u8]) -> Option<Vec<u8>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&c| v[c]).collect())
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut vecs = self.basis_vectors();
        vecs.extend(other.basis_vectors());
        Ok(Subspace::span(self.p(), self.ambient, &vecs))
    }

    /// Intersection via the kernel of the stacked bases: `(x,y)` with
    /// `x·A = y·B` yields the common vector `x·A`.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.p();
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok(Subspace::zero(p, self.ambient));
        }
        let mut stacked = FpMatrix::zero(p, a + b, self.ambient);
        for i in 0..a {
            for j in 0..self.ambient {
                stacked.set(i, j, self.basis.get(i, j));
            }
        }
        for i in 0..b {
            for j in 0..self.ambient {
                stacked.set(a + i, j, (p - other.basis.get(i, j)) % p);
            }
        }
        let kernel = stacked.left_nullspace();
        let vecs: Vec<Vec<u8>> = kernel
            .basis_vectors()
            .iter()
            .map(|xy| self.basis.apply(&xy[..a]))
            .collect();
        Ok(Subspace::span(p, self.ambient, &vecs))
    }

    /// Image of the subspace under `v ↦ v·m`.
    pub fn image(&self, m: &FpMatrix) -> Subspace {
        let vecs: Vec<Vec<u8>> = self.basis_vectors().iter().map(|v| m.apply(v)).collect();
        Subspace::span(self.p(), m.cols(), &vecs)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient, self.basis_vectors())
    }
}
