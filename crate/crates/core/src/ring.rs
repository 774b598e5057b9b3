//! Finite commutative unital rings over `Z_p` given by structure constants.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_prime, FpMatrix, Subspace};

#[derive(Clone, PartialEq, Eq)]
pub struct FinCommRing {
    p: u32,
    dim: usize,
    /// `table[(i*dim + j)*dim + k]`: coefficient of `b_k` in `b_i b_j`.
    table: Vec<u8>,
    one: Vec<u8>,
    name: String,
}

impl fmt::Debug for FinCommRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p={}, dim {})", self.name, self.p, self.dim)
    }
}

/// A symmetric bimap `∘ : V × V → W` used by [`FinCommRing::r_circ`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CircSpec {
    pub p: u32,
    /// `[dim V, dim V, dim W]`
    pub dims: [usize; 3],
    /// `[i, j, k, v]`: coefficient `v` of `w_k` in `v_i ∘ v_j`.
    pub entries: Vec<[i64; 4]>,
}

impl FinCommRing {
    /// Builds a ring from structure constants, checking commutativity,
    /// associativity on basis triples and that `one` is a unit element.
    pub fn from_table(p: u32, dim: usize, table: Vec<u8>, one: Vec<u8>, name: impl Into<String>) -> Result<Self> {
        check_prime(p)?;
        if table.len() != dim * dim * dim || one.len() != dim {
            return Err(Error::InvalidRing("structure constant table has the wrong size".into()));
        }
        let r = FinCommRing { p, dim, table, one, name: name.into() };
        let basis: Vec<Vec<u8>> = (0..dim).map(|i| r.basis_vector(i)).collect();
        for (i, a) in basis.iter().enumerate() {
            if r.mul(&r.one, a) != *a {
                return Err(Error::InvalidRing("one is not a unit".into()));
            }
            for (j, b) in basis.iter().enumerate() {
                let ab = r.mul(a, b);
                if ab != r.mul(b, a) {
                    return Err(Error::InvalidRing(format!("b{i} b{j} != b{j} b{i}")));
                }
                for c in &basis {
                    if r.mul(&ab, c) != r.mul(a, &r.mul(b, c)) {
                        return Err(Error::InvalidRing("not associative".into()));
                    }
                }
            }
        }
        Ok(r)
    }

    /// `Z_p[x]/(f)` with `f` given constant term first, e.g. `[1,1,1]` is `x²+x+1`.
    pub fn poly_quotient(p: u32, f: &[i64]) -> Result<Self> {
        check_prime(p)?;
        let n = f.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidRing("polynomial must have degree at least 1".into())
        })?;
        let f: Vec<u32> = f.iter().map(|&c| c.rem_euclid(p as i64) as u32).collect();
        if f[n] != 1 {
            return Err(Error::InvalidRing("polynomial is not monic".into()));
        }
        // x^k reduced for k < 2n-1
        let mut powers: Vec<Vec<u32>> = Vec::new();
        let mut cur = vec![0u32; n];
        cur[0] = 1;
        for _ in 0..(2 * n - 1) {
            powers.push(cur.clone());
            // multiply by x
            let top = cur[n - 1];
            let mut next = vec![0u32; n];
            for k in (1..n).rev() {
                next[k] = cur[k - 1];
            }
            for k in 0..n {
                next[k] = (next[k] + (p - f[k]) * top) % p;
            }
            cur = next;
        }
        let mut table = vec![0u8; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table[(i * n + j) * n + k] = powers[i + j][k] as u8;
                }
            }
        }
        let mut one = vec![0u8; n];
        one[0] = 1;
        let name = format!("F{p}[x]/({})", poly_name(&f));
        Self::from_table(p, n, table, one, name)
    }

    /// The local ring `R(∘) = Z_p ⊕ V ⊕ W` with
    /// `(s,v,w)(s',v',w') = (ss', sv'+s'v, sw'+s'w+v∘v')`.
    pub fn r_circ(spec: &CircSpec) -> Result<Self> {
        let p = spec.p;
        check_prime(p)?;
        let [v, v2, w] = spec.dims;
        if v != v2 {
            return Err(Error::InvalidRing("∘ must have shape V × V → W".into()));
        }
        let mut circ = vec![0u8; v * v * w];
        for &[i, j, k, c] in &spec.entries {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if i >= v || j >= v || k >= w {
                return Err(Error::InvalidRing("∘ entry out of range".into()));
            }
            circ[(i * v + j) * w + k] = c.rem_euclid(p as i64) as u8;
        }
        for i in 0..v {
            for j in 0..v {
                for k in 0..w {
                    if circ[(i * v + j) * w + k] != circ[(j * v + i) * w + k] {
                        return Err(Error::InvalidRing("∘ is not symmetric".into()));
                    }
                }
            }
        }
        if circ.iter().all(|&c| c == 0) {
            return Err(Error::InvalidRing("∘ must be nonzero".into()));
        }
        let n = 1 + v + w;
        let mut table = vec![0u8; n * n * n];
        for b in 0..n {
            table[b * n + b] = 1; // 1 · b_b
            table[(b * n) * n + b] = 1; // b_b · 1
        }
        for i in 0..v {
            for j in 0..v {
                for k in 0..w {
                    table[((1 + i) * n + 1 + j) * n + 1 + v + k] = circ[(i * v + j) * w + k];
                }
            }
        }
        let mut one = vec![0u8; n];
        one[0] = 1;
        Self::from_table(p, n, table, one, format!("R(p={p},V={v},W={w})"))
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn one(&self) -> &[u8] {
        &self.one
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u8> {
        let mut e = vec![0u8; self.dim];
        e[i] = 1;
        e
    }

    pub fn mul(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        let n = self.dim;
        let mut acc = vec![0u32; n];
        for (i, &x) in a.iter().enumerate().filter(|(_, &x)| x != 0) {
            for (j, &y) in b.iter().enumerate().filter(|(_, &y)| y != 0) {
                let xy = x as u32 * y as u32;
                let row = &self.table[(i * n + j) * n..(i * n + j + 1) * n];
                for (slot, &c) in acc.iter_mut().zip(row) {
                    *slot = (*slot + xy * c as u32) % self.p;
                }
            }
        }
        acc.into_iter().map(|x| x as u8).collect()
    }

    /// The matrix of `x ↦ xa` acting on row vectors.
    pub fn regular_matrix(&self, a: &[u8]) -> FpMatrix {
        let rows: Vec<Vec<u8>> = (0..self.dim).map(|i| self.mul(&self.basis_vector(i), a)).collect();
        FpMatrix::from_vectors(self.p, self.dim, &rows)
    }

    /// The Frobenius map `r ↦ r^p`, which is `Z_p`-linear in characteristic `p`.
    pub fn frobenius(&self) -> FpMatrix {
        let rows: Vec<Vec<u8>> = (0..self.dim)
            .map(|i| {
                let b = self.basis_vector(i);
                let mut acc = self.one.clone();
                for _ in 0..self.p {
                    acc = self.mul(&acc, &b);
                }
                acc
            })
            .collect();
        FpMatrix::from_vectors(self.p, self.dim, &rows)
    }

    /// The product of two subspaces (as an additive span).
    pub fn ideal_product(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vecs = Vec::new();
        for x in a.basis_vectors() {
            for y in b.basis_vectors() {
                vecs.push(self.mul(&x, &y));
            }
        }
        Subspace::span(self.p, self.dim, &vecs)
    }
}

fn poly_name(f: &[u32]) -> String {
    let mut terms = Vec::new();
    for (k, &c) in f.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{k}"),
        };
        terms.push(match (c, k) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    terms.join("+")
}

/// The nilradical of a finite commutative ring: the kernel of `r ↦ r^{p^k}`
/// with `p^k ≥ dim`.
pub fn comm_ring_radical(r: &FinCommRing) -> Subspace {
    let frob = r.frobenius();
    let mut m = frob.clone();
    let mut pk = r.p as usize;
    while pk < r.dim {
        m = m.mul(&frob);
        pk *= r.p as usize;
    }
    // row-vector convention: v ∈ J iff v·m = 0
    m.left_nullspace()
}

/// `J ⊇ J² ⊇ … ⊇ 0`, ending with the zero ideal.
pub fn radical_chain(r: &FinCommRing) -> Vec<Subspace> {
    let j = comm_ring_radical(r);
    let mut out = vec![j.clone()];
    while !out.last().unwrap().is_zero() {
        let next = r.ideal_product(out.last().unwrap(), &j);
        out.push(next);
    }
    out
}

/// Parses `"p,c0,c1,…,1"` (constant term first).
pub fn parse_poly_spec(s: &str) -> Result<FinCommRing> {
    let nums: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidInput(format!("ring spec {s:?}: {e}")))?;
    if nums.len() < 3 || nums[0] <= 0 {
        return Err(Error::InvalidInput(format!("ring spec {s:?} must be p,c0,…,1")));
    }
    FinCommRing::poly_quotient(nums[0] as u32, &nums[1..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims(r: &FinCommRing) -> Vec<usize> {
        radical_chain(r).iter().map(|s| s.dim()).collect()
    }

    #[test]
    fn poly_quotient_examples() {
        let r = FinCommRing::poly_quotient(2, &[0, 0, 1]).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(comm_ring_radical(&r).dim(), 1);
        assert!(comm_ring_radical(&r).contains(&[0, 1]));
        let f4 = FinCommRing::poly_quotient(2, &[1, 1, 1]).unwrap();
        assert_eq!(comm_ring_radical(&f4).dim(), 0);
        let r3 = FinCommRing::poly_quotient(3, &[0, 0, 0, 1]).unwrap();
        assert_eq!(dims(&r3), vec![2, 1, 0]);
        assert!(FinCommRing::poly_quotient(3, &[0, 0, 2]).is_err());
        assert!(FinCommRing::poly_quotient(3, &[1]).is_err());
    }

    #[test]
    fn r_circ_examples() {
        let spec = CircSpec { p: 5, dims: [1, 1, 1], entries: vec![[0, 0, 0, 1]] };
        let r = FinCommRing::r_circ(&spec).unwrap();
        // x ↦ (0,1,0) is an isomorphism with Z_5[x]/(x³)
        let q = FinCommRing::poly_quotient(5, &[0, 0, 0, 1]).unwrap();
        assert_eq!(r.table, q.table);
        assert_eq!(comm_ring_radical(&r).dim(), 2);
        let zero = CircSpec { p: 3, dims: [2, 2, 1], entries: vec![] };
        assert!(FinCommRing::r_circ(&zero).is_err());
        let asym = CircSpec { p: 3, dims: [2, 2, 1], entries: vec![[0, 1, 0, 1]] };
        assert!(FinCommRing::r_circ(&asym).is_err());
    }

    #[test]
    fn r_circ_radical_dimensions() {
        let spec = CircSpec {
            p: 3,
            dims: [2, 2, 3],
            entries: vec![[0, 0, 0, 1], [0, 1, 1, 2], [1, 0, 1, 2], [1, 1, 2, 1]],
        };
        let r = FinCommRing::r_circ(&spec).unwrap();
        assert_eq!(dims(&r), vec![5, 3, 0]);
    }

    #[test]
    fn parse_spec() {
        assert_eq!(parse_poly_spec("2,1,1,1").unwrap().dim(), 2);
        assert!(parse_poly_spec("4,1,1").is_err());
        assert!(parse_poly_spec("x").is_err());
    }

    proptest! {
        #[test]
        fn r_circ_is_a_ring_for_random_circ(seed in proptest::collection::vec(0i64..3, 9)) {
            let mut entries = Vec::new();
            for i in 0..2 {
                for j in i..2 {
                    for k in 0..2 {
                        let c = seed[(i * 2 + j) * 2 + k];
                        entries.push([i as i64, j as i64, k as i64, c]);
                        if i != j {
                            entries.push([j as i64, i as i64, k as i64, c]);
                        }
                    }
                }
            }
            let spec = CircSpec { p: 3, dims: [2, 2, 2], entries };
            match FinCommRing::r_circ(&spec) {
                Ok(r) => {
                    let chain = dims(&r);
                    prop_assert_eq!(chain[0], 4);
                    prop_assert!(chain.len() <= r.dim() + 1);
                }
                Err(e) => prop_assert_eq!(e, Error::InvalidRing("∘ must be nonzero".into())),
            }
        }

        #[test]
        fn quotient_by_radical_is_reduced(c0 in 0i64..3, c1 in 0i64..3, c2 in 0i64..3) {
            let r = FinCommRing::poly_quotient(3, &[c0, c1, c2, 1]).unwrap();
            let j = comm_ring_radical(&r);
            // every element whose cube is in J lies in J
            let f = r.frobenius();
            let pre = f.clone();
            for x in 0..27u32 {
                let v = vec![(x % 3) as u8, ((x / 3) % 3) as u8, (x / 9) as u8];
                if j.contains(&pre.apply(&v)) {
                    prop_assert!(j.contains(&v));
                }
            }
        }
    }
}
