//! Index monoids for filters.
//!
//! Filters are indexed by `ℕ^d` under the lexicographic order in which
//! coordinate 0 is the most significant. Every refinement appends a new
//! coordinate at the least significant end, so an index `s` of the old
//! filter satisfies `(s,0) < (s,i) < (s + e_last, 0)` for every `i > 0`.
//! With that convention the derived `Ord` on the coordinate vector is the
//! filter order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidIndex(Vec<u32>);

impl MonoidIndex {
    pub fn new(coords: Vec<u32>) -> Self {
        assert!(!coords.is_empty(), "monoid indices have dimension at least 1");
        MonoidIndex(coords)
    }

    pub fn zero(dim: usize) -> Self {
        MonoidIndex::new(vec![0; dim])
    }

    /// The unit vector `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut c = vec![0; dim];
        c[axis] = 1;
        MonoidIndex::new(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Appends a least significant coordinate.
    pub fn extend(&self, last: u32) -> Self {
        let mut c = self.0.clone();
        c.push(last);
        MonoidIndex(c)
    }

    /// Drops the least significant coordinate.
    pub fn truncate(&self) -> (Self, u32) {
        let mut c = self.0.clone();
        let last = c.pop().expect("nonempty index");
        assert!(!c.is_empty(), "cannot truncate a one-dimensional index");
        (MonoidIndex(c), last)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(MonoidIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `self - other` when `other` divides `self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut c = Vec::with_capacity(self.dim());
        for (a, b) in self.0.iter().zip(&other.0) {
            c.push(a.checked_sub(*b)?);
        }
        Some(MonoidIndex(c))
    }

    /// The monoid pre-order: `self ≺ other` iff `self + t = other` for some `t`.
    pub fn divides(&self, other: &Self) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    pub fn lex_compare(&self, other: &Self) -> Result<Ordering> {
        self.check_dim(other)?;
        Ok(self.0.cmp(&other.0))
    }

    /// All `t ≺ self` (the divisor box), in increasing lex order.
    pub fn divisors(&self) -> Vec<MonoidIndex> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &bound in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (bound as usize + 1));
            for prefix in &out {
                for v in 0..=bound {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(MonoidIndex).collect()
    }
}

impl fmt::Debug for MonoidIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MonoidIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// All pairs `(t, x)` with `t + x = s` and `x` one of the generators.
///
/// Every Cayley-graph path from 0 to `s` ends with exactly one such edge.
pub fn decompositions(s: &MonoidIndex, gens: &[MonoidIndex]) -> Vec<(MonoidIndex, MonoidIndex)> {
    let mut out: Vec<_> = gens
        .iter()
        .filter(|x| !x.is_zero())
        .filter_map(|x| s.checked_sub(x).map(|t| (t, x.clone())))
        .collect();
    out.sort();
    out
}

/// The cyclic monoid `C_{k,m} = {c^i : 0 ≤ i < k+m}`; `k = None` is `ℕ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicMonoid {
    pub k: Option<u32>,
    pub m: u32,
}

impl CyclicMonoid {
    pub fn new(k: Option<u32>, m: u32) -> Self {
        assert!(m >= 1);
        CyclicMonoid { k, m }
    }

    pub fn mul(&self, i: u32, j: u32) -> u32 {
        match self.k {
            None => i + j,
            Some(k) if i + j < k => i + j,
            Some(k) => k + (i + j - k) % self.m,
        }
    }

    /// Elements `0..size`, truncated at `bound` when the monoid is infinite.
    pub fn elements(&self, bound: u32) -> Vec<u32> {
        match self.k {
            None => (0..bound).collect(),
            Some(k) => (0..k + self.m).collect(),
        }
    }

    /// `c^s ≺ c^u` iff `s ≤ u`: the well-order by exponent. (Divisibility
    /// on the cycle is not antisymmetric, so it is not used.)
    pub fn precedes(&self, s: u32, u: u32) -> bool {
        s <= u
    }
}

/// The pre-order used when checking the decomposition property.
#[derive(Clone, Copy, Debug)]
pub enum StarDomain {
    Cyclic(CyclicMonoid),
    /// `ℕ^dim` with the lexicographic well-order, coordinates `< side`.
    Lex { dim: usize, side: u32 },
    /// `ℕ^dim` as a direct product of copies of `ℕ` (divisibility order).
    Product { dim: usize, side: u32 },
}

/// A decomposition counterexample `(s, u1, u2)`.
pub type StarWitness = (Vec<u32>, Vec<u32>, Vec<u32>);

/// Brute-force check of the decomposition property: whenever `s ≺ u` and
/// `u = u1 + u2`, there are `s1 ≺ u1`, `s2 ≺ u2` with `s = s1 + s2`.
///
/// Returns the first counterexample `(s, u1, u2)` found.
pub fn check_star(domain: StarDomain, bound: u32) -> std::result::Result<(), StarWitness> {
    match domain {
        StarDomain::Cyclic(c) => {
            let elems = c.elements(bound);
            for &u1 in &elems {
                for &u2 in &elems {
                    let u = c.mul(u1, u2);
                    for &s in &elems {
                        if !c.precedes(s, u) {
                            continue;
                        }
                        let ok = elems.iter().any(|&s1| {
                            c.precedes(s1, u1)
                                && elems
                                    .iter()
                                    .any(|&s2| c.precedes(s2, u2) && c.mul(s1, s2) == s)
                        });
                        if !ok {
                            return Err((vec![s], vec![u1], vec![u2]));
                        }
                    }
                }
            }
            Ok(())
        }
        StarDomain::Lex { dim, side } | StarDomain::Product { dim, side } => {
            let lex = matches!(domain, StarDomain::Lex { .. });
            let le = |a: &MonoidIndex, b: &MonoidIndex| {
                if lex {
                    a <= b
                } else {
                    a.divides(b).unwrap()
                }
            };
            let cube = MonoidIndex::new(vec![side - 1; dim]).divisors();
            let big = MonoidIndex::new(vec![2 * (side - 1); dim]).divisors();
            for u1 in &cube {
                for u2 in &cube {
                    let u = u1.add(u2).unwrap();
                    for s in big.iter().filter(|s| le(s, &u)) {
                        let ok = s.divisors().iter().any(|s1| {
                            let s2 = s.checked_sub(s1).unwrap();
                            le(s1, u1) && le(&s2, u2)
                        });
                        if !ok {
                            return Err((s.0.clone(), u1.0.clone(), u2.0.clone()));
                        }
                    }
                }
            }
            Ok(())
        }
    }
}
