//! Slow, obviously-correct reference implementations. They only share the
//! finite-field matrix type with the library.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use filtra::linalg::FpMatrix;

pub type Elem = Vec<u32>;
pub type Set = HashSet<Elem>;

fn key(m: &FpMatrix) -> Elem {
    (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).map(|(i, j)| m.get(i, j)).collect()
}

fn mat(p: u32, d: usize, e: &Elem) -> FpMatrix {
    let mut m = FpMatrix::zero(p, d, d);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, e[i * d + j]);
        }
    }
    m
}

/// Brute-force group arithmetic on `d×d` unipotent matrices.
#[derive(Clone, Copy)]
pub struct Brute {
    pub p: u32,
    pub d: usize,
}

impl Brute {
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        key(&mat(self.p, self.d, a).mul(&mat(self.p, self.d, b)))
    }

    /// Inverse by search over powers: `g^{-1} = g^{ord-1}`.
    pub fn inv(&self, a: &Elem) -> Elem {
        let id = self.identity();
        let mut prev = id.clone();
        let mut cur = a.clone();
        while cur != id {
            prev = cur.clone();
            cur = self.mul(&cur, a);
        }
        prev
    }

    pub fn identity(&self) -> Elem {
        key(&FpMatrix::identity(self.p, self.d))
    }

    pub fn comm(&self, x: &Elem, y: &Elem) -> Elem {
        let xi = self.inv(x);
        let yi = self.inv(y);
        self.mul(&self.mul(&xi, &yi), &self.mul(x, y))
    }

    /// Breadth-first closure under right multiplication by the generators.
    pub fn closure<'a>(&self, gens: impl IntoIterator<Item = &'a Elem>) -> Set {
        let gens: Vec<&Elem> = gens.into_iter().collect();
        let mut seen: Set = [self.identity()].into_iter().collect();
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = self.mul(&x, g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    /// `[A, B]` from all element commutators.
    pub fn commutator(&self, a: &Set, b: &Set) -> Set {
        let cs: Vec<Elem> = a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).map(|(x, y)| self.comm(x, y)).collect();
        self.closure(cs.iter())
    }

    pub fn join(&self, a: &Set, b: &Set) -> Set {
        self.closure(a.iter().chain(b.iter()))
    }

    pub fn set_of(&self, ms: impl IntoIterator<Item = FpMatrix>) -> Set {
        let gens: Vec<Elem> = ms.into_iter().map(|m| key(&m)).collect();
        self.closure(gens.iter())
    }
}

/// Interned subgroups with memoized commutators and joins.
struct Table {
    b: Brute,
    sets: Vec<Set>,
    comm: HashMap<(usize, usize), usize>,
}

impl Table {
    fn intern(&mut self, s: Set) -> usize {
        if let Some(i) = self.sets.iter().position(|t| *t == s) {
            return i;
        }
        self.sets.push(s);
        self.sets.len() - 1
    }

    fn commutator(&mut self, a: usize, c: usize) -> usize {
        if let Some(&r) = self.comm.get(&(a, c)) {
            return r;
        }
        let s = self.b.commutator(&self.sets[a], &self.sets[c]);
        let r = self.intern(s);
        self.comm.insert((a, c), r);
        r
    }
}

/// `π̄_w` as the product over every path `x_1 + … + x_k = w` of the
/// left-normed commutator `[π_{x_1}, π_{x_2}, …, π_{x_k}]`, for every `w` in
/// the box `0..=bound`. `π̄_0 = G`.
///
/// The distinct left-normed terms of all paths ending at `w` are collected
/// from those ending at `w - x`, so no path is skipped.
pub fn path_product_filter(
    b: Brute,
    whole: &Set,
    gens: &BTreeMap<Vec<u32>, Set>,
    bound: &[u32],
) -> BTreeMap<Vec<u32>, Set> {
    let mut table = Table { b, sets: Vec::new(), comm: HashMap::new() };
    let domain: Vec<(Vec<u32>, usize)> = gens
        .iter()
        .filter(|(x, _)| x.iter().any(|&c| c > 0))
        .map(|(x, s)| (x.clone(), table.intern(s.clone())))
        .collect();
    let mut terms: BTreeMap<Vec<u32>, BTreeSet<usize>> = BTreeMap::new();
    let mut out = BTreeMap::new();
    let mut w = vec![0u32; bound.len()];
    loop {
        if w.iter().all(|&c| c == 0) {
            out.insert(w.clone(), whole.clone());
        } else {
            let mut here = BTreeSet::new();
            for (x, gx) in &domain {
                if !x.iter().zip(&w).all(|(a, c)| a <= c) {
                    continue;
                }
                let rest: Vec<u32> = w.iter().zip(x).map(|(a, c)| a - c).collect();
                if rest.iter().all(|&c| c == 0) {
                    here.insert(*gx);
                    continue;
                }
                for t in terms.get(&rest).cloned().unwrap_or_default() {
                    here.insert(table.commutator(t, *gx));
                }
            }
            let mut acc: Set = [b.identity()].into_iter().collect();
            for &t in &here {
                acc = b.join(&acc, &table.sets[t]);
            }
            terms.insert(w.clone(), here);
            out.insert(w.clone(), acc);
        }
        // odometer over the box, last coordinate fastest
        let mut i = bound.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if w[i] < bound[i] {
                w[i] += 1;
                break;
            }
            w[i] = 0;
        }
    }
}

/// Dimension of Adj/Cent/Der of `m` from the full linear system in the
/// unknown matrices, one equation per `(i, j, k)`.
pub fn dense_invariant_solver(p: u32, dims: [usize; 3], m: &dyn Fn(usize, usize, usize) -> u32, kind: &str) -> usize {
    let [a, b, c] = dims;
    assert!(a <= 6 && b <= 6 && c <= 6, "size guard");
    let with_z = kind != "adjoint";
    let nx = a * a;
    let ny = b * b;
    let nz = if with_z { c * c } else { 0 };
    let n = nx + ny + nz;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let pi = p as i64;
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                // lhs: [e_i X, e_j]_k = Σ_r X[i][r] m(r,j,k)
                let mut x_part = vec![0i64; n];
                for r in 0..a {
                    x_part[i * a + r] += m(r, j, k) as i64;
                }
                // [e_i, e_j Y]_k = Σ_r Y[j][r] m(i,r,k)
                let mut y_part = vec![0i64; n];
                for r in 0..b {
                    y_part[nx + j * b + r] += m(i, r, k) as i64;
                }
                // [e_i, e_j]Z at k = Σ_r m(i,j,r) Z[r][k]
                let mut z_part = vec![0i64; n];
                if with_z {
                    for r in 0..c {
                        z_part[nx + ny + r * c + k] += m(i, j, r) as i64;
                    }
                }
                let sub = |u: &[i64], v: &[i64]| u.iter().zip(v).map(|(x, y)| (x - y).rem_euclid(pi)).collect::<Vec<_>>();
                let add = |u: &[i64], v: &[i64]| u.iter().zip(v).map(|(x, y)| (x + y).rem_euclid(pi)).collect::<Vec<_>>();
                match kind {
                    "adjoint" => rows.push(sub(&x_part, &y_part)),
                    "centroid" => {
                        rows.push(sub(&x_part, &y_part));
                        rows.push(sub(&x_part, &z_part));
                    }
                    "derivation" => rows.push(sub(&add(&x_part, &y_part), &z_part)),
                    _ => panic!("unknown kind {kind}"),
                }
            }
        }
    }
    if rows.is_empty() {
        return n;
    }
    let mat = FpMatrix::from_rows(p, &rows).unwrap();
    n - mat.rank()
}

/// Dimension of `{x ∈ A : tr(xy) = 0 for all y ∈ A}`, which is the radical
/// when `p > n`.
pub fn traceform_radical(p: u32, basis: &[FpMatrix]) -> usize {
    let n = basis.first().map_or(0, |m| m.rows());
    assert!(p as usize > n, "trace form criterion needs p > degree");
    let k = basis.len();
    if k == 0 {
        return 0;
    }
    let trace = |m: &FpMatrix| (0..n).map(|i| m.get(i, i) as i64).sum::<i64>() % p as i64;
    let gram: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| trace(&basis[i].mul(&basis[j]))).collect()).collect();
    k - FpMatrix::from_rows(p, &gram).unwrap().rank()
}
