//! Matrix algebras over `Z_p` and their Jacobson radicals.
//!
//! The radical is computed as the set of elements acting as zero on every
//! composition factor of the natural module `Z_p^n`. The natural module is
//! faithful, so every simple module of the algebra occurs among these
//! factors. Composition factors are split off with spinning and Norton's
//! irreducibility test; every factor keeps its certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bimap::{BimapRing, RingKind};
use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};

/// A subalgebra of `M_n(Z_p)`, stored as a subspace of flattened matrices.
#[derive(Clone, Debug)]
pub struct MatAlgebra {
    p: u32,
    n: usize,
    span: Subspace,
    unital: bool,
}

impl MatAlgebra {
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.span.dim()
    }
    pub fn is_unital(&self) -> bool {
        self.unital
    }
    pub fn span(&self) -> &Subspace {
        &self.span
    }

    pub fn matrices(&self) -> Vec<FpMatrix> {
        to_matrices(self.p, self.n, &self.span)
    }

    pub fn contains(&self, m: &FpMatrix) -> bool {
        self.span.contains(m.as_slice())
    }

    /// Whether the span is closed under products (checked on basis pairs).
    pub fn is_closed(&self) -> bool {
        let ms = self.matrices();
        ms.iter().all(|a| ms.iter().all(|b| self.contains(&a.mul(b))))
    }

    /// Wraps a span that is already closed under multiplication.
    pub fn from_span(p: u32, n: usize, span: Subspace) -> Result<Self> {
        let unital = span.contains(FpMatrix::identity(p, n).as_slice());
        let a = MatAlgebra { p, n, span, unital };
        if !a.is_closed() {
            return Err(Error::ClosureViolation);
        }
        Ok(a)
    }
}

fn to_matrices(p: u32, n: usize, s: &Subspace) -> Vec<FpMatrix> {
    s.basis_vectors().into_iter().map(|v| FpMatrix::from_flat(p, n, n, v)).collect()
}

fn span_of(p: u32, n: usize, ms: &[FpMatrix]) -> Subspace {
    let vecs: Vec<Vec<u8>> = ms.iter().map(|m| m.as_slice().to_vec()).collect();
    Subspace::span(p, n * n, &vecs)
}

/// The smallest algebra containing `gens` (and `I` when `unital`).
pub fn algebra_closure(p: u32, n: usize, gens: &[FpMatrix], unital: bool) -> Result<MatAlgebra> {
    for g in gens {
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch(g.rows(), n));
        }
    }
    let mut elems: Vec<FpMatrix> = Vec::new();
    let mut span = Subspace::zero(p, n * n);
    let add = |m: FpMatrix, elems: &mut Vec<FpMatrix>, span: &mut Subspace| {
        if !span.contains(m.as_slice()) {
            *span = span.sum(&Subspace::span(p, n * n, &[m.as_slice().to_vec()])).unwrap();
            elems.push(m);
            true
        } else {
            false
        }
    };
    if unital {
        add(FpMatrix::identity(p, n), &mut elems, &mut span);
    }
    for g in gens {
        add(g.clone(), &mut elems, &mut span);
    }
    // saturate: every new element is multiplied by everything seen so far
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i].clone();
        let mut j = 0;
        while j <= i {
            let y = elems[j].clone();
            add(x.mul(&y), &mut elems, &mut span);
            add(y.mul(&x), &mut elems, &mut span);
            j += 1;
        }
        i += 1;
    }
    Ok(MatAlgebra { p, n, span, unital: unital || elems.iter().any(|m| *m == FpMatrix::identity(p, n)) })
}

/// The smallest submodule of the row-vector module containing `v`.
pub fn spin(p: u32, k: usize, v: &[u8], gens: &[FpMatrix]) -> Subspace {
    let mut span = Subspace::zero(p, k);
    let mut queue = vec![v.to_vec()];
    while let Some(x) = queue.pop() {
        if span.contains(&x) {
            continue;
        }
        span = span.sum(&Subspace::span(p, k, std::slice::from_ref(&x))).unwrap();
        for g in gens {
            let y = g.apply(&x);
            if !span.contains(&y) {
                queue.push(y);
            }
        }
    }
    span
}

/// Nonzero vectors of `s`, one per line (leading coefficient 1).
fn projective_points(s: &Subspace) -> Vec<Vec<u8>> {
    let p = s.p();
    let basis = s.basis_vectors();
    let r = basis.len();
    let mut out = Vec::new();
    let total = (p as usize).pow(r as u32);
    for code in 1..total {
        let mut c = vec![0u32; r];
        let mut x = code;
        for slot in c.iter_mut() {
            *slot = (x % p as usize) as u32;
            x /= p as usize;
        }
        let lead = c.iter().rposition(|&t| t != 0).unwrap();
        if c[lead] != 1 {
            continue;
        }
        let mut v = vec![0u32; s.ambient_dim()];
        for (ci, b) in c.iter().zip(&basis) {
            for (slot, &bj) in v.iter_mut().zip(b) {
                *slot = (*slot + ci * bj as u32) % p;
            }
        }
        out.push(v.into_iter().map(|t| t as u8).collect());
    }
    out
}

/// Why a module was declared irreducible.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// Dimension one.
    Trivial,
    /// Every nonzero vector of `null(θ)` spins to the whole module and every
    /// nonzero vector of `null(θᵗ)` spins to the whole dual module.
    Norton(FpMatrix),
    /// Every nonzero vector spins to the whole module.
    Exhaustive,
}

/// One composition factor: the induced action of the algebra basis.
#[derive(Clone, Debug)]
pub struct CompositionFactor {
    pub dim: usize,
    pub action: Vec<FpMatrix>,
    pub certificate: Certificate,
}

impl CompositionFactor {
    /// Re-runs the irreducibility argument recorded in the certificate.
    pub fn check(&self, p: u32) -> bool {
        let k = self.dim;
        let full = |s: &Subspace| s.dim() == k;
        match &self.certificate {
            Certificate::Trivial => k == 1,
            Certificate::Exhaustive => {
                projective_points(&Subspace::full(p, k)).iter().all(|v| full(&spin(p, k, v, &self.action)))
            }
            Certificate::Norton(theta) => {
                if theta.rank() == k || !self.in_span(theta) {
                    return false;
                }
                let dual: Vec<FpMatrix> = self.action.iter().map(|g| g.transpose()).collect();
                projective_points(&theta.left_nullspace()).iter().all(|v| full(&spin(p, k, v, &self.action)))
                    && projective_points(&theta.nullspace()).iter().all(|w| full(&spin(p, k, w, &dual)))
            }
        }
    }

    fn in_span(&self, theta: &FpMatrix) -> bool {
        let p = theta.p();
        let mut ms = self.action.clone();
        ms.push(FpMatrix::identity(p, self.dim));
        span_of(p, self.dim, &ms).contains(theta.as_slice())
    }
}

enum Split {
    Irreducible(Certificate),
    Sub(Subspace),
}

fn find_submodule(p: u32, k: usize, gens: &[FpMatrix], rng: &mut ChaCha8Rng) -> Split {
    if k == 1 {
        return Split::Irreducible(Certificate::Trivial);
    }
    let proper = |s: &Subspace| s.dim() > 0 && s.dim() < k;
    for j in 0..k {
        let mut e = vec![0u8; k];
        e[j] = 1;
        let s = spin(p, k, &e, gens);
        if proper(&s) {
            return Split::Sub(s);
        }
    }
    // vectors killed by everything span submodules of their own
    let mut kernel = Subspace::full(p, k);
    for g in gens {
        kernel = kernel.intersect(&g.left_nullspace()).unwrap();
    }
    if let Some(v) = kernel.basis_vectors().into_iter().next() {
        return Split::Sub(Subspace::span(p, k, &[v]));
    }
    // Norton's test with a singular element of small nullity
    let mut best: Option<FpMatrix> = None;
    for _ in 0..40 {
        let mut psi = FpMatrix::zero(p, k, k);
        for g in gens {
            psi = psi.combine(g, rng.gen_range(0..p));
        }
        if rng.gen_bool(0.5) {
            let mut other = FpMatrix::zero(p, k, k);
            for g in gens {
                other = other.combine(g, rng.gen_range(0..p));
            }
            psi = psi.mul(&other);
        }
        for lambda in 0..p {
            let theta = psi.combine(&FpMatrix::identity(p, k), p - lambda);
            let nullity = k - theta.rank();
            if nullity == 0 || nullity == k {
                continue;
            }
            if best.as_ref().is_none_or(|b| k - b.rank() > nullity) {
                best = Some(theta);
            }
        }
        if best.as_ref().is_some_and(|b| k - b.rank() == 1) {
            break;
        }
    }
    let Some(theta) = best else {
        for v in projective_points(&Subspace::full(p, k)) {
            let s = spin(p, k, &v, gens);
            if proper(&s) {
                return Split::Sub(s);
            }
        }
        return Split::Irreducible(Certificate::Exhaustive);
    };
    for v in projective_points(&theta.left_nullspace()) {
        let s = spin(p, k, &v, gens);
        if proper(&s) {
            return Split::Sub(s);
        }
    }
    let dual: Vec<FpMatrix> = gens.iter().map(|g| g.transpose()).collect();
    for w in projective_points(&theta.nullspace()) {
        let s = spin(p, k, &w, &dual);
        if proper(&s) {
            // the annihilator of a dual submodule is a submodule
            let rows = FpMatrix::from_vectors(p, k, &s.basis_vectors());
            return Split::Sub(rows.nullspace());
        }
    }
    Split::Irreducible(Certificate::Norton(theta))
}

/// The action on `w1/w0` in the basis returned alongside it.
fn induced(p: u32, gens: &[FpMatrix], w0: &Subspace, w1: &Subspace) -> (Vec<FpMatrix>, Vec<Vec<u8>>) {
    let n = w1.ambient_dim();
    let reduced: Vec<Vec<u8>> = w1.basis_vectors().iter().map(|v| w0.reduce(v)).collect();
    let q = Subspace::span(p, n, &reduced);
    let lift = q.basis_vectors();
    let k = lift.len();
    let action = gens
        .iter()
        .map(|g| {
            let rows: Vec<Vec<u8>> =
                lift.iter().map(|b| q.coordinates(&w0.reduce(&g.apply(b))).expect("submodule")).collect();
            FpMatrix::from_vectors(p, k, &rows)
        })
        .collect();
    (action, lift)
}

/// A composition series `0 = M_0 < … < M_r = Z_p^n` of the module given by
/// `gens`, with certified factors.
pub fn composition_series(
    p: u32,
    n: usize,
    gens: &[FpMatrix],
    seed: u64,
) -> (Vec<Subspace>, Vec<CompositionFactor>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = vec![Subspace::zero(p, n), Subspace::full(p, n)];
    let mut factors = Vec::new();
    let mut i = 0;
    if n == 0 {
        return (vec![Subspace::zero(p, 0)], factors);
    }
    while i + 1 < chain.len() {
        let (action, lift) = induced(p, gens, &chain[i], &chain[i + 1]);
        let k = lift.len();
        match find_submodule(p, k, &action, &mut rng) {
            Split::Sub(u) => {
                let lifted: Vec<Vec<u8>> = u
                    .basis_vectors()
                    .iter()
                    .map(|c| {
                        let mut v = vec![0u32; n];
                        for (&cj, b) in c.iter().zip(&lift) {
                            for (slot, &bj) in v.iter_mut().zip(b) {
                                *slot = (*slot + cj as u32 * bj as u32) % p;
                            }
                        }
                        v.into_iter().map(|x| x as u8).collect()
                    })
                    .collect();
                let mid = chain[i].sum(&Subspace::span(p, n, &lifted)).unwrap();
                chain.insert(i + 1, mid);
            }
            Split::Irreducible(certificate) => {
                factors.push(CompositionFactor { dim: k, action, certificate });
                i += 1;
            }
        }
    }
    (chain, factors)
}

/// `J ⊋ J² ⊋ … ⊋ 0` together with the certified composition factors used.
#[derive(Clone, Debug)]
pub struct RadicalChain {
    algebra: MatAlgebra,
    /// `layers[0]` is the algebra, `layers[i]` is `J^i`; the last layer is 0.
    layers: Vec<Subspace>,
    factors: Vec<CompositionFactor>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraJson {
    pub dim: usize,
    pub radical_dims: Vec<usize>,
    pub nilpotency_index: usize,
}

impl RadicalChain {
    pub fn algebra(&self) -> &MatAlgebra {
        &self.algebra
    }
    pub fn radical(&self) -> &Subspace {
        &self.layers[1.min(self.layers.len() - 1)]
    }
    /// `J^i` (with `J^0` the algebra).
    pub fn power(&self, i: usize) -> Subspace {
        self.layers
            .get(i)
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.algebra.p, self.algebra.n * self.algebra.n))
    }
    pub fn power_matrices(&self, i: usize) -> Vec<FpMatrix> {
        to_matrices(self.algebra.p, self.algebra.n, &self.power(i))
    }
    pub fn layers(&self) -> &[Subspace] {
        &self.layers
    }
    pub fn factors(&self) -> &[CompositionFactor] {
        &self.factors
    }
    /// `[dim J, dim J², …]`, ending before the zero ideal.
    pub fn radical_dims(&self) -> Vec<usize> {
        self.layers.iter().skip(1).map(|l| l.dim()).take_while(|&d| d > 0).collect()
    }
    /// The least `m` with `J^m = 0`.
    pub fn nilpotency_index(&self) -> usize {
        self.radical_dims().len() + 1
    }
    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            dim: self.algebra.dim(),
            radical_dims: self.radical_dims(),
            nilpotency_index: self.nilpotency_index(),
        }
    }

    /// Post-verification: the radical is a two-sided ideal, its powers
    /// decrease to 0 within `dim A` steps, and each factor certificate holds.
    pub fn verify(&self) -> bool {
        let a = self.algebra.matrices();
        let j = self.radical();
        let jm = to_matrices(self.algebra.p, self.algebra.n, j);
        let ideal = a.iter().all(|x| {
            jm.iter().all(|y| j.contains(x.mul(y).as_slice()) && j.contains(y.mul(x).as_slice()))
        });
        let nilpotent = self.layers.last().is_some_and(|l| l.is_zero())
            && self.layers.len() <= self.algebra.dim() + 2
            && self.layers.windows(2).all(|w| w[0].contains_subspace(&w[1]));
        ideal && nilpotent && self.factors.iter().all(|f| f.check(self.algebra.p))
    }
}

/// `J ⊇ J² ⊇ …` of an algebra. Non-unital algebras are handled inside
/// their unital hull, whose radical meets the algebra in its radical.
pub fn jacobson_radical(a: &MatAlgebra, seed: u64) -> Result<RadicalChain> {
    if !a.is_closed() {
        return Err(Error::ClosureViolation);
    }
    let (p, n) = (a.p, a.n);
    let hull = if a.unital { a.clone() } else { algebra_closure(p, n, &a.matrices(), true)? };
    let gens = hull.matrices();
    let (chain, factors) = composition_series(p, n, &gens, seed);
    // x = Σ c_k gens[k] with M_i x ⊆ M_{i-1} for every i
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for w in chain.windows(2) {
        for m in w[1].basis_vectors() {
            let images: Vec<Vec<u8>> = gens.iter().map(|g| w[0].reduce(&g.apply(&m))).collect();
            for q in 0..n {
                rows.push(images.iter().map(|im| im[q]).collect());
            }
        }
    }
    let coeffs = if rows.is_empty() {
        Subspace::full(p, gens.len())
    } else {
        FpMatrix::from_vectors(p, gens.len(), &rows).nullspace()
    };
    let elements: Vec<FpMatrix> = coeffs
        .basis_vectors()
        .iter()
        .map(|c| {
            let mut x = FpMatrix::zero(p, n, n);
            for (g, &ck) in gens.iter().zip(c) {
                x = x.combine(g, ck as u32);
            }
            x
        })
        .collect();
    let j = span_of(p, n, &elements).intersect(a.span()).unwrap();
    let mut layers = vec![a.span.clone(), j.clone()];
    let jm = to_matrices(p, n, &j);
    while !layers.last().unwrap().is_zero() {
        if layers.len() > a.dim() + 1 {
            return Err(Error::InvalidRing("radical is not nilpotent".into()));
        }
        let last = to_matrices(p, n, layers.last().unwrap());
        let prods: Vec<FpMatrix> = last.iter().flat_map(|x| jm.iter().map(move |y| x.mul(y))).collect();
        layers.push(span_of(p, n, &prods));
    }
    let out = RadicalChain { algebra: a.clone(), layers, factors };
    if !out.verify() {
        return Err(Error::InvalidRing("radical post-verification failed".into()));
    }
    Ok(out)
}

/// `span{ uX : u ∈ space, X ∈ ops }`.
pub fn module_action(space: &Subspace, ops: &[FpMatrix]) -> Result<Subspace> {
    let a = space.ambient_dim();
    let mut vecs = Vec::new();
    for x in ops {
        if x.rows() != a {
            return Err(Error::DimensionMismatch(x.rows(), a));
        }
        for u in space.basis_vectors() {
            vecs.push(x.apply(&u));
        }
    }
    Ok(Subspace::span(space.p(), a, &vecs))
}

/// The faithful matrix algebra of an invariant ring: `diag(X, Yᵗ)` for the
/// adjoint ring, `diag(X, Y, Z)` for the centroid, and the unital enveloping
/// algebra of the `X`-components for derivations.
pub fn op_embed(ring: &BimapRing) -> Result<MatAlgebra> {
    let p = ring.p();
    match ring.kind() {
        RingKind::Derivation => {
            let a = ring.dims()[0];
            algebra_closure(p, a, &ring.x_projections(), true)
        }
        _ => {
            let ms: Vec<FpMatrix> = ring.basis().iter().map(|e| ring.embed(e)).collect();
            let n = ms.first().map_or_else(
                || match ring.kind() {
                    RingKind::Adjoint => ring.dims()[0] + ring.dims()[1],
                    _ => ring.dims().iter().sum(),
                },
                |m| m.rows(),
            );
            let span = span_of(p, n, &ms);
            MatAlgebra::from_span(p, n, span)
        }
    }
}

/// Upper-left `a×a` block (the action on the first tensor factor).
pub fn leading_block(m: &FpMatrix, a: usize) -> FpMatrix {
    let mut out = FpMatrix::zero(m.p(), a, a);
    for i in 0..a {
        for j in 0..a {
            out.set(i, j, m.get(i, j));
        }
    }
    out
}
