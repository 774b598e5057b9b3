#![allow(dead_code)]

pub mod oracles;

use std::sync::Arc;

use filtra::group::{make_heisenberg, GroupElement, MatSpace, Subgroup, UnipotentGroup, DEFAULT_CAP};
use filtra::linalg::{FpMatrix, Subspace};
use filtra::ring::FinCommRing;

/// `F_p[x]/(x^{c+1})`.
pub fn truncated(p: u32, c: usize) -> FinCommRing {
    let mut f = vec![0i64; c + 1];
    f.push(1);
    FinCommRing::poly_quotient(p, &f).unwrap()
}

pub fn heisenberg(r: &FinCommRing) -> Arc<UnipotentGroup> {
    Arc::new(make_heisenberg(r, DEFAULT_CAP).unwrap())
}

/// The subgroup of `UT(d, p)` whose free entries are exactly `free`.
pub fn shape(space: MatSpace, free: &[(usize, usize)]) -> Subgroup {
    let gens: Vec<GroupElement> = free
        .iter()
        .map(|&(i, j)| {
            let mut m = FpMatrix::identity(space.p, space.d);
            m.set(i, j, 1);
            space.element(&m).unwrap()
        })
        .collect();
    filtra::group::closure(space, DEFAULT_CAP, &gens).unwrap()
}

/// Subgroup of `H(R)` with blocks `(0,1)`, `(1,2)`, `(0,2)` ranging over the
/// given subspaces of `R`.
pub fn heisenberg_shape(r: &FinCommRing, space: MatSpace, blocks: [&Subspace; 3]) -> Subgroup {
    let m = r.dim();
    let mut gens = Vec::new();
    for (b, sub) in [(0usize, 1usize), (1, 2), (0, 2)].into_iter().zip(blocks) {
        for v in sub.basis_vectors() {
            let rep = r.regular_matrix(&v);
            let mut g = FpMatrix::identity(space.p, space.d);
            for i in 0..m {
                for j in 0..m {
                    g.set(b.0 * m + i, b.1 * m + j, rep.get(i, j));
                }
            }
            gens.push(space.element(&g).unwrap());
        }
    }
    filtra::group::closure(space, DEFAULT_CAP, &gens).unwrap()
}

pub fn has_term(chain: &[Arc<Subgroup>], h: &Subgroup) -> bool {
    chain.iter().any(|t| t.order() == h.order() && **t == *h)
}
