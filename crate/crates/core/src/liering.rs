//! The graded Lie ring `L(φ) = ⊕ φ_s/φ_s⁺` of a filter.

use std::collections::BTreeMap;

use crate::bimap::Bimap;
use crate::error::{Error, Result};
use crate::filter::Filter;
use crate::group::{section_basis, SectionBasis};
use crate::monoid::MonoidIndex;

pub struct GradedLieRing {
    filter: Filter,
    components: BTreeMap<MonoidIndex, SectionBasis>,
    products: BTreeMap<(MonoidIndex, MonoidIndex), Bimap>,
}

/// A failed Lie ring identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieViolation {
    pub kind: &'static str,
    pub grades: Vec<MonoidIndex>,
    pub basis: Vec<usize>,
}

impl GradedLieRing {
    /// Sections for every nonzero component and the bracket tensors for all
    /// pairs of components whose sum is again a component.
    pub fn build(f: &Filter) -> Result<Self> {
        let mut ring = Self::sections(f)?;
        let idx: Vec<MonoidIndex> = ring.components.keys().cloned().collect();
        for s in &idx {
            for t in &idx {
                let st = s.add(t)?;
                if ring.components.contains_key(&st) {
                    let m = ring.compute_bimap(s, t)?;
                    ring.products.insert((s.clone(), t.clone()), m);
                }
            }
        }
        Ok(ring)
    }

    /// Only the sections; brackets are computed on demand by [`Self::bimap_at`].
    pub fn sections(f: &Filter) -> Result<Self> {
        let cap = f.group().cap();
        let mut components = BTreeMap::new();
        for s in f.components() {
            let a = f.at(&s)?.clone();
            let b = f.plus(&s)?.clone();
            components.insert(s, section_basis(&a, &b, cap)?);
        }
        Ok(GradedLieRing { filter: f.clone(), components, products: BTreeMap::new() })
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn components(&self) -> &BTreeMap<MonoidIndex, SectionBasis> {
        &self.components
    }

    pub fn component_dim(&self, s: &MonoidIndex) -> usize {
        self.components.get(s).map_or(0, |c| c.dim())
    }

    pub fn component(&self, s: &MonoidIndex) -> Result<&SectionBasis> {
        self.components.get(s).ok_or_else(|| Error::MissingComponent(format!("{s:?}")))
    }

    fn compute_bimap(&self, s: &MonoidIndex, t: &MonoidIndex) -> Result<Bimap> {
        let ls = self.component(s)?;
        let lt = self.component(t)?;
        let p = self.filter.group().p();
        let st = s.add(t)?;
        let Some(lst) = self.components.get(&st) else {
            return Ok(Bimap::zero(p, [ls.dim(), lt.dim(), 0]));
        };
        let space = self.filter.group().space();
        let mut m = Bimap::zero(p, [ls.dim(), lt.dim(), lst.dim()]);
        let target = self.filter.at(&st)?;
        for (i, x) in ls.reps().iter().enumerate() {
            for (j, y) in lt.reps().iter().enumerate() {
                let c = space.commutator(x, y);
                if !target.contains(&c) {
                    return Err(Error::InvalidInput(format!("[L{s:?}, L{t:?}] leaves φ{st:?}")));
                }
                let coords = lst.coordinates(&c).expect("element of the numerator");
                for (k, &v) in coords.iter().enumerate() {
                    m.set(i, j, k, v as i64);
                }
            }
        }
        Ok(m)
    }

    /// `[,]_{st} : L_s × L_t → L_{s+t}` (zero when `L_{s+t} = 0`).
    pub fn bimap_at(&self, s: &MonoidIndex, t: &MonoidIndex) -> Result<Bimap> {
        if let Some(m) = self.products.get(&(s.clone(), t.clone())) {
            return Ok(m.clone());
        }
        self.compute_bimap(s, t)
    }

    fn bracket(&self, s: &MonoidIndex, x: &[u8], t: &MonoidIndex, y: &[u8]) -> Result<(MonoidIndex, Vec<u8>)> {
        let st = s.add(t)?;
        let m = self.bimap_at(s, t)?;
        Ok((st, m.eval(x, y)))
    }

    /// Alternation within each grade, antisymmetry across grades, and the
    /// Jacobi identity on all basis triples.
    pub fn check_jacobi(&self) -> std::result::Result<(), LieViolation> {
        let p = self.filter.group().p();
        let idx: Vec<MonoidIndex> = self.components.keys().cloned().collect();
        let unit = |n: usize, i: usize| {
            let mut e = vec![0u8; n];
            e[i] = 1;
            e
        };
        let fail = |kind, grades: Vec<MonoidIndex>, basis: Vec<usize>| LieViolation { kind, grades, basis };
        for s in &idx {
            for t in &idx {
                let (Ok(m), Ok(mt)) = (self.bimap_at(s, t), self.bimap_at(t, s)) else {
                    return Err(fail("bracket", vec![s.clone(), t.clone()], vec![]));
                };
                let [a, b, c] = m.dims();
                for i in 0..a {
                    for j in 0..b {
                        for k in 0..c {
                            if (m.get(i, j, k) + mt.get(j, i, k)) % p != 0 {
                                return Err(fail("antisymmetry", vec![s.clone(), t.clone()], vec![i, j, k]));
                            }
                        }
                    }
                    if s == t && (0..c).any(|k| m.get(i, i, k) != 0) {
                        return Err(fail("alternation", vec![s.clone()], vec![i]));
                    }
                }
            }
        }
        for s in &idx {
            for t in &idx {
                for u in &idx {
                    let stu = s.add(t).and_then(|x| x.add(u)).unwrap();
                    if !self.components.contains_key(&stu) {
                        continue;
                    }
                    let (ds, dt, du) = (self.component_dim(s), self.component_dim(t), self.component_dim(u));
                    for i in 0..ds {
                        for j in 0..dt {
                            for k in 0..du {
                                let (x, y, z) = (unit(ds, i), unit(dt, j), unit(du, k));
                                let term = |a: (&MonoidIndex, &[u8]), b: (&MonoidIndex, &[u8]), c: (&MonoidIndex, &[u8])| {
                                    let (g, ab) = self.bracket(a.0, a.1, b.0, b.1)?;
                                    if !self.components.contains_key(&g) {
                                        return Ok(vec![0u8; self.component_dim(&stu)]);
                                    }
                                    self.bracket(&g, &ab, c.0, c.1).map(|r| r.1)
                                };
                                let r: Result<Vec<Vec<u8>>> = vec![
                                    term((s, &x), (t, &y), (u, &z)),
                                    term((t, &y), (u, &z), (s, &x)),
                                    term((u, &z), (s, &x), (t, &y)),
                                ]
                                .into_iter()
                                .collect();
                                let Ok(r) = r else {
                                    return Err(fail("bracket", vec![s.clone(), t.clone(), u.clone()], vec![i, j, k]));
                                };
                                let nonzero = (0..r[0].len())
                                    .any(|q| !(r[0][q] as u32 + r[1][q] as u32 + r[2][q] as u32).is_multiple_of(p));
                                if nonzero {
                                    return Err(fail("jacobi", vec![s.clone(), t.clone(), u.clone()], vec![i, j, k]));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    #[cfg(test)]
    fn corrupt(&mut self, s: &MonoidIndex, t: &MonoidIndex, i: usize, j: usize, k: usize) {
        let m = self.products.get_mut(&(s.clone(), t.clone())).unwrap();
        let v = m.get(i, j, k) as i64 + 1;
        m.set(i, j, k, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use crate::bimap::adjoint_ring;
    use crate::group::{eta_series, gamma_series, make_heisenberg, make_ut, UnipotentGroup, DEFAULT_CAP};
    use crate::ring::FinCommRing;

    fn ix(i: u32) -> MonoidIndex {
        MonoidIndex::new(vec![i])
    }

    fn gamma(g: UnipotentGroup) -> Filter {
        let g = Arc::new(g);
        let s = gamma_series(&g, g.whole()).unwrap();
        Filter::from_series(g, s).unwrap()
    }

    #[test]
    fn component_dims() {
        let l = GradedLieRing::build(&gamma(make_ut(4, 2, DEFAULT_CAP).unwrap())).unwrap();
        let dims: Vec<usize> = l.components().values().map(|c| c.dim()).collect();
        assert_eq!(dims, vec![3, 2, 1]);
        let m = l.bimap_at(&ix(1), &ix(1)).unwrap();
        assert_eq!(m.dims(), [3, 3, 2]);
        assert_eq!(l.bimap_at(&ix(2), &ix(2)).unwrap().dims(), [2, 2, 0]);
    }

    #[test]
    fn ut3_bracket() {
        let l = GradedLieRing::build(&gamma(make_ut(3, 2, DEFAULT_CAP).unwrap())).unwrap();
        let m = l.bimap_at(&ix(1), &ix(1)).unwrap();
        assert_eq!(m.dims(), [2, 2, 1]);
        assert_eq!(m.get(0, 1, 0), 1);
        assert_eq!(m.get(1, 0, 0), 1);
        assert_eq!(m.get(0, 0, 0), 0);
    }

    #[test]
    fn abelian_products_vanish() {
        let g = crate::group::make_cyclic(3, DEFAULT_CAP).unwrap();
        let l = GradedLieRing::build(&gamma(g)).unwrap();
        assert!(l.bimap_at(&ix(1), &ix(1)).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_bracket_is_symplectic() {
        let f2 = FinCommRing::poly_quotient(3, &[0, 1]).unwrap();
        let l = GradedLieRing::build(&gamma(make_heisenberg(&f2, DEFAULT_CAP).unwrap())).unwrap();
        let m = l.bimap_at(&ix(1), &ix(1)).unwrap();
        assert_eq!(m.dims(), [2, 2, 1]);
        assert_eq!(adjoint_ring(&m).dim(), 4);
        assert_eq!((m.get(0, 1, 0) + m.get(1, 0, 0)) % 3, 0);
        assert_ne!(m.get(0, 1, 0), 0);
    }

    #[test]
    fn jacobi_holds() {
        let l = GradedLieRing::build(&gamma(make_ut(5, 2, DEFAULT_CAP).unwrap())).unwrap();
        assert!(l.check_jacobi().is_ok());
        let r = FinCommRing::poly_quotient(3, &[0, 0, 1]).unwrap();
        let h = Arc::new(make_heisenberg(&r, DEFAULT_CAP).unwrap());
        let eta = Filter::from_series(h.clone(), eta_series(&h, h.whole()).unwrap()).unwrap();
        assert!(GradedLieRing::build(&eta).unwrap().check_jacobi().is_ok());
    }

    #[test]
    fn corrupted_tensor_is_caught() {
        let mut l = GradedLieRing::build(&gamma(make_ut(4, 3, DEFAULT_CAP).unwrap())).unwrap();
        l.corrupt(&ix(1), &ix(1), 0, 0, 0);
        let v = l.check_jacobi().unwrap_err();
        assert!(v.kind == "antisymmetry" || v.kind == "alternation");
    }

    #[test]
    fn dims_match_index_of_p_power_closure() {
        let g = Arc::new(make_ut(4, 3, DEFAULT_CAP).unwrap());
        let f = Filter::from_series(g.clone(), eta_series(&g, g.whole()).unwrap()).unwrap();
        let l = GradedLieRing::build(&f).unwrap();
        for (s, c) in l.components() {
            let a = f.at(s).unwrap();
            assert_eq!(c.denominator().order() * 3usize.pow(c.dim() as u32), a.order());
        }
    }
}
