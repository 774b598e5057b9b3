//! Structure-constant bimaps `L_s × L_t → L_{s+t}` and their adjoint,
//! centroid and derivation rings.
//!
//! Conventions: vectors are rows and every operator acts on the right, so
//! `u ↦ uX`, `v ↦ vY`, `w ↦ wZ`. For the adjoint ring the identity
//! `[uX, v] = [u, vY]` therefore stores the transpose of the left action of
//! `Y`, and the product is `(X,Y)(X',Y') = (XX', Y'Y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimap {
    p: u32,
    dims: [usize; 3],
    /// `entries[(i*b + j)*c + k]` is the `k`-th coordinate of `[e_i, e_j]`.
    entries: Vec<u8>,
}

/// Tensor JSON: `{"dims":[a,b,c], "entries":[[i,j,k,v],…]}` (nonzero entries only).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TensorJson {
    #[serde(default)]
    pub p: u32,
    pub dims: [usize; 3],
    pub entries: Vec<[i64; 4]>,
}

impl Bimap {
    pub fn zero(p: u32, dims: [usize; 3]) -> Self {
        Bimap { p, dims, entries: vec![0; dims[0] * dims[1] * dims[2]] }
    }

    pub fn from_fn(p: u32, dims: [usize; 3], f: impl Fn(usize, usize, usize) -> i64) -> Self {
        let mut m = Self::zero(p, dims);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    m.set(i, j, k, f(i, j, k));
                }
            }
        }
        m
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.entries[self.idx(i, j, k)] as u32
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: i64) {
        let x = self.idx(i, j, k);
        self.entries[x] = v.rem_euclid(self.p as i64) as u8;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    /// `[u, v]` for coordinate vectors.
    pub fn eval(&self, u: &[u8], v: &[u8]) -> Vec<u8> {
        let [a, b, c] = self.dims;
        let mut out = vec![0u32; c];
        for i in (0..a).filter(|&i| u[i] != 0) {
            for j in (0..b).filter(|&j| v[j] != 0) {
                let uv = u[i] as u32 * v[j] as u32;
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot = (*slot + uv * self.get(i, j, k)) % self.p;
                }
            }
        }
        out.into_iter().map(|x| x as u8).collect()
    }

    pub fn to_json(&self) -> TensorJson {
        let [a, b, c] = self.dims;
        let mut entries = Vec::new();
        for i in 0..a {
            for j in 0..b {
                for k in 0..c {
                    let v = self.get(i, j, k);
                    if v != 0 {
                        entries.push([i as i64, j as i64, k as i64, v as i64]);
                    }
                }
            }
        }
        TensorJson { p: self.p, dims: self.dims, entries }
    }

    pub fn from_json(t: &TensorJson) -> Result<Self> {
        crate::linalg::check_prime(t.p)?;
        let mut m = Self::zero(t.p, t.dims);
        for &[i, j, k, v] in &t.entries {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if i >= t.dims[0] || j >= t.dims[1] || k >= t.dims[2] {
                return Err(Error::InvalidInput("tensor entry out of range".into()));
            }
            m.set(i, j, k, v);
        }
        Ok(m)
    }
}

/// The exterior square `F_p^r × F_p^r → Λ²F_p^r`, `[e_i,e_j] = e_i∧e_j`.
pub fn exterior_square(p: u32, r: usize) -> Bimap {
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let mut m = Bimap::zero(p, [r, r, pairs.len()]);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        m.set(i, j, k, 1);
        m.set(j, i, k, -1);
    }
    m
}

/// The odd-dimensional indecomposable pair of alternating forms on
/// `F_p^m ⊕ F_p^{m+1}`:
/// `(u,v)∘(x,y) = (uFyᵗ − xFvᵗ, uGyᵗ − xGvᵗ)` with `F = [Z,0]`, `G = [0,Z]`
/// and `Z` the `m×m` anti-diagonal permutation.
pub fn kronecker_bimap(p: u32, m: usize) -> Bimap {
    let n = 2 * m + 1;
    // F and G as m×(m+1) 0/1 matrices
    let z = |i: usize, j: usize| (i + j + 1 == m) as i64;
    let f = |i: usize, j: usize| if j < m { z(i, j) } else { 0 };
    let g = |i: usize, j: usize| if j >= 1 { z(i, j - 1) } else { 0 };
    let mut out = Bimap::zero(p, [n, n, 2]);
    for i in 0..m {
        for j in 0..=m {
            // u_i with y_j, and the alternating partner
            for (k, form) in [f(i, j), g(i, j)].into_iter().enumerate() {
                if form != 0 {
                    out.set(i, m + j, k, form);
                    out.set(m + j, i, k, -form);
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Adjoint,
    Centroid,
    Derivation,
}

impl std::str::FromStr for RingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjoint" | "adj" => Ok(RingKind::Adjoint),
            "centroid" | "cent" => Ok(RingKind::Centroid),
            "derivation" | "der" => Ok(RingKind::Derivation),
            _ => Err(Error::InvalidInput(format!("unknown method {s:?}"))),
        }
    }
}

impl std::fmt::Display for RingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RingKind::Adjoint => "adjoint",
            RingKind::Centroid => "centroid",
            RingKind::Derivation => "derivation",
        })
    }
}

/// A basis of `Adj`, `Cent` or `Der`; each element is `[X, Y]` or `[X, Y, Z]`.
#[derive(Clone, Debug)]
pub struct BimapRing {
    kind: RingKind,
    p: u32,
    dims: [usize; 3],
    basis: Vec<Vec<FpMatrix>>,
}

impl BimapRing {
    pub fn kind(&self) -> RingKind {
        self.kind
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<FpMatrix>] {
        &self.basis
    }
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }
    pub fn p(&self) -> u32 {
        self.p
    }

    fn sizes(&self) -> Vec<usize> {
        sizes(self.kind, self.dims)
    }

    fn flatten(elem: &[FpMatrix]) -> Vec<u8> {
        elem.iter().flat_map(|m| m.as_slice().iter().copied()).collect()
    }

    fn span(&self) -> Subspace {
        let total: usize = self.sizes().iter().map(|n| n * n).sum();
        let vecs: Vec<Vec<u8>> = self.basis.iter().map(|e| Self::flatten(e)).collect();
        Subspace::span(self.p, total, &vecs)
    }

    pub fn contains(&self, elem: &[FpMatrix]) -> bool {
        self.span().contains(&Self::flatten(elem))
    }

    pub fn identity(&self) -> Vec<FpMatrix> {
        self.sizes().iter().map(|&n| FpMatrix::identity(self.p, n)).collect()
    }

    /// The ring product: `(XX', Y'Y)` for `Adj`, componentwise for `Cent`, and
    /// the componentwise commutator for `Der`.
    pub fn product(&self, x: &[FpMatrix], y: &[FpMatrix]) -> Vec<FpMatrix> {
        match self.kind {
            RingKind::Adjoint => vec![x[0].mul(&y[0]), y[1].mul(&x[1])],
            RingKind::Centroid => x.iter().zip(y).map(|(a, b)| a.mul(b)).collect(),
            RingKind::Derivation => x.iter().zip(y).map(|(a, b)| a.mul(b).sub(&b.mul(a))).collect(),
        }
    }

    /// Whether all basis products lie in the span.
    pub fn is_closed(&self) -> bool {
        let span = self.span();
        self.basis.iter().all(|x| {
            self.basis.iter().all(|y| span.contains(&Self::flatten(&self.product(x, y))))
        })
    }

    /// A faithful block-diagonal matrix: `diag(X, Yᵗ)` for `Adj` (so that the
    /// product above becomes matrix multiplication) and `diag(X, Y, Z)` otherwise.
    pub fn embed(&self, elem: &[FpMatrix]) -> FpMatrix {
        let blocks: Vec<FpMatrix> = match self.kind {
            RingKind::Adjoint => vec![elem[0].clone(), elem[1].transpose()],
            _ => elem.to_vec(),
        };
        block_diag(self.p, &blocks)
    }

    /// The first component of every basis element.
    pub fn x_projections(&self) -> Vec<FpMatrix> {
        self.basis.iter().map(|e| e[0].clone()).collect()
    }
}

pub(crate) fn block_diag(p: u32, blocks: &[FpMatrix]) -> FpMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut m = FpMatrix::zero(p, n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m.set(off + i, off + j, b.get(i, j));
            }
        }
        off += b.rows();
    }
    m
}

fn sizes(kind: RingKind, [a, b, c]: [usize; 3]) -> Vec<usize> {
    match kind {
        RingKind::Adjoint => vec![a, b],
        _ => vec![a, b, c],
    }
}

/// Checks the defining identity of `kind` for one candidate element on all
/// basis pairs.
pub fn satisfies(m: &Bimap, kind: RingKind, elem: &[FpMatrix]) -> bool {
    let [a, b, c] = m.dims;
    let p = m.p;
    let unit = |n: usize, i: usize| {
        let mut e = vec![0u8; n];
        e[i] = 1;
        e
    };
    for i in 0..a {
        for j in 0..b {
            let (u, v) = (unit(a, i), unit(b, j));
            let ux_v = m.eval(&elem[0].apply(&u), &v);
            let u_vy = m.eval(&u, &elem[1].apply(&v));
            let ok = match kind {
                RingKind::Adjoint => ux_v == u_vy,
                RingKind::Centroid => {
                    let uvz = elem[2].apply(&m.eval(&u, &v));
                    ux_v == u_vy && u_vy == uvz
                }
                RingKind::Derivation => {
                    let uvz = elem[2].apply(&m.eval(&u, &v));
                    let lhs: Vec<u8> =
                        ux_v.iter().zip(&u_vy).map(|(&x, &y)| ((x as u32 + y as u32) % p) as u8).collect();
                    lhs == uvz
                }
            };
            if !ok {
                return false;
            }
            debug_assert!(c == ux_v.len());
        }
    }
    true
}

/// Assembles the linear system for `kind`; unknowns are the entries of
/// `X`, `Y` (and `Z`) in row-major order.
fn system(m: &Bimap, kind: RingKind) -> FpMatrix {
    let [a, b, c] = m.dims;
    let p = m.p;
    let neg = |x: u32| (p - x % p) % p;
    let (ox, oy, oz) = (0, a * a, a * a + b * b);
    let unknowns: usize = sizes(kind, m.dims).iter().map(|n| n * n).sum();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    // coefficient vectors of the three terms for the equation (i,j,k)
    let ux = |i: usize, j: usize, k: usize, row: &mut [u32]| {
        for l in 0..a {
            row[ox + i * a + l] += m.get(l, j, k);
        }
    };
    let vy = |i: usize, j: usize, k: usize, row: &mut [u32], sign: bool| {
        for l in 0..b {
            let x = m.get(i, l, k);
            row[oy + j * b + l] += if sign { neg(x) } else { x };
        }
    };
    let wz = |i: usize, j: usize, k: usize, row: &mut [u32]| {
        for l in 0..c {
            row[oz + l * c + k] += neg(m.get(i, j, l));
        }
    };
    let finish = |row: Vec<u32>| row.into_iter().map(|x| (x % p) as u8).collect::<Vec<u8>>();
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                match kind {
                    RingKind::Adjoint => {
                        let mut row = vec![0u32; unknowns];
                        ux(i, j, k, &mut row);
                        vy(i, j, k, &mut row, true);
                        rows.push(finish(row));
                    }
                    RingKind::Centroid => {
                        let mut r1 = vec![0u32; unknowns];
                        ux(i, j, k, &mut r1);
                        wz(i, j, k, &mut r1);
                        rows.push(finish(r1));
                        let mut r2 = vec![0u32; unknowns];
                        vy(i, j, k, &mut r2, false);
                        wz(i, j, k, &mut r2);
                        rows.push(finish(r2));
                    }
                    RingKind::Derivation => {
                        let mut row = vec![0u32; unknowns];
                        ux(i, j, k, &mut row);
                        vy(i, j, k, &mut row, false);
                        wz(i, j, k, &mut row);
                        rows.push(finish(row));
                    }
                }
            }
        }
    }
    if rows.is_empty() {
        FpMatrix::zero(p, 0, unknowns)
    } else {
        FpMatrix::from_vectors(p, unknowns, &rows)
    }
}

fn solve(m: &Bimap, kind: RingKind) -> BimapRing {
    let sz = sizes(kind, m.dims);
    let sys = system(m, kind);
    let null = sys.nullspace();
    let basis = null
        .basis_vectors()
        .into_iter()
        .map(|v| {
            let mut off = 0;
            sz.iter()
                .map(|&n| {
                    let mat = FpMatrix::from_flat(m.p, n, n, v[off..off + n * n].to_vec());
                    off += n * n;
                    mat
                })
                .collect()
        })
        .collect();
    BimapRing { kind, p: m.p, dims: m.dims, basis }
}

/// `Adj = {(X,Y) : [uX,v] = [u,vY]}`.
pub fn adjoint_ring(m: &Bimap) -> BimapRing {
    solve(m, RingKind::Adjoint)
}

/// `Cent = {(X,Y,Z) : [uX,v] = [u,vY] = [u,v]Z}`.
pub fn centroid_ring(m: &Bimap) -> BimapRing {
    solve(m, RingKind::Centroid)
}

/// `Der = {(X,Y,Z) : [uX,v] + [u,vY] = [u,v]Z}`.
pub fn derivation_ring(m: &Bimap) -> BimapRing {
    solve(m, RingKind::Derivation)
}

pub fn invariant_ring(m: &Bimap, kind: RingKind) -> BimapRing {
    solve(m, kind)
}
