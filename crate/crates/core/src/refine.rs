//! Refinement of a filter by the radical of an invariant ring of one of its
//! bracket bimaps.
//!
//! For a component `s` with section `L_s = φ_s/φ_s⁺`, let `A` be the adjoint,
//! centroid or derivation ring of `[,]_{ss} : L_s × L_s → L_{2s}` and `J` its
//! Jacobson radical. The subgroups `H_i` with `H_i/φ_s⁺ = L_s J^i` sit between
//! `φ_s` and `φ_s⁺`. A new least significant coordinate is appended and the
//! filter generated by
//!
//! ```text
//! α(u, 0) = φ_u                 (u ≠ 0)
//! α(s, i) = H_i                 (i ≥ 1)
//! α(u, i) = φ_{u⁺}              (i ≥ 1, u ≠ s)
//! ```
//!
//! is returned. Every `(u, i)` with `i ≥ 1` lies strictly between `(u, 0)`
//! and `(u⁺, 0)`, so the values there are squeezed between `φ_u` and `φ_{u⁺}`
//! and the old filter survives on the slice `i = 0`. Commutators with the
//! `H_i` may refine later components as well.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algrep::{jacobson_radical, leading_block, module_action, op_embed, RadicalChain};
use crate::bimap::{invariant_ring, Bimap, RingKind};
use crate::error::{Error, Result};
use crate::filter::{Filter, FilterJson, Generation};
use crate::group::{
    eta_series, gamma_series, Lattice, SubId, Subgroup, UnipotentGroup, DEFAULT_CAP,
};
use crate::linalg::Subspace;
use crate::liering::GradedLieRing;
use crate::monoid::MonoidIndex;

/// Which component a single refinement step works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Always the least nonzero component, proper or not.
    Leading,
    /// The least component whose refinement is proper.
    FirstProper,
}

#[derive(Clone, Debug)]
pub struct RefinementConfig {
    pub method: RingKind,
    pub max_rounds: usize,
    pub cap: usize,
    pub seed: u64,
    pub selection: Selection,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            method: RingKind::Adjoint,
            max_rounds: 64,
            cap: DEFAULT_CAP,
            seed: 0,
            selection: Selection::Leading,
        }
    }
}

impl RefinementConfig {
    pub fn new(method: RingKind) -> Self {
        RefinementConfig { method, ..Default::default() }
    }
}

/// What one refinement step looked at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundInfo {
    pub component: Vec<u32>,
    pub ring_dim: usize,
    pub radical_dims: Vec<usize>,
    pub proper: bool,
    pub length: usize,
}

/// The radical data at one component and the subgroups `H_1 ⊇ H_2 ⊇ …`
/// (ending at the section denominator).
pub struct ComponentRefinement {
    pub component: MonoidIndex,
    pub bimap: Bimap,
    pub ring_dim: usize,
    pub radical: RadicalChain,
    pub levels: Vec<Arc<Subgroup>>,
}

/// The invariant ring of `[,]_{ss}` and the resulting `H_i`.
pub fn component_refinement(
    ring: &GradedLieRing,
    s: &MonoidIndex,
    method: RingKind,
    seed: u64,
) -> Result<ComponentRefinement> {
    let f = ring.filter();
    let section = ring.component(s)?;
    let bimap = ring.bimap_at(s, s)?;
    let inv = invariant_ring(&bimap, method);
    let alg = op_embed(&inv)?;
    let radical = jacobson_radical(&alg, seed)?;
    let p = f.group().p();
    let a = section.dim();
    let full = Subspace::full(p, a);
    let cap = f.group().cap();
    let mut levels = Vec::new();
    for i in 1..radical.layers().len() {
        let ops: Vec<_> = radical.power_matrices(i).iter().map(|m| leading_block(m, a)).collect();
        let image = module_action(&full, &ops)?;
        let mut h = (**section.denominator()).clone();
        for v in image.basis_vectors() {
            h.extend(&section.element(&v), cap)?;
        }
        if !f.group().is_normal(&h) {
            return Err(Error::NotNormal(format!("refining subgroup at {s:?}")));
        }
        let h = Arc::new(h);
        if levels.last().is_some_and(|last: &Arc<Subgroup>| **last == *h) {
            continue;
        }
        levels.push(h);
    }
    if levels.is_empty() {
        levels.push(section.denominator().clone());
    }
    Ok(ComponentRefinement { component: s.clone(), bimap, ring_dim: inv.dim(), radical, levels })
}

/// Builds the refined filter from the `H_i` at `s`.
pub fn refine_at(f: &Filter, s: &MonoidIndex, levels: &[Arc<Subgroup>]) -> Result<Filter> {
    let d = f.dim();
    let mut lattice = Lattice::new(f.group().clone());
    let ids: Vec<(MonoidIndex, SubId)> =
        f.points().iter().map(|(c, h)| (c.clone(), lattice.intern(h.clone()))).collect();
    let phi = |u: &MonoidIndex| ids[ids.partition_point(|(c, _)| c <= u) - 1].1;
    let h_ids: Vec<SubId> = levels.iter().map(|h| lattice.intern(h.clone())).collect();
    let k = h_ids.len();

    let e_last = MonoidIndex::unit(d, d - 1);
    let alpha = |x: &MonoidIndex| -> Option<SubId> {
        let (u, i) = x.truncate();
        if i == 0 {
            (!u.is_zero()).then(|| phi(&u))
        } else if u == *s {
            Some(h_ids[(i as usize).min(k) - 1])
        } else {
            Some(phi(&u.add(&e_last).unwrap()))
        }
    };

    // Beyond `bound[w]` the new coordinate no longer changes the value at `w`:
    // each generator `(u, i)` is constant in `i` from `i = k` on for `u = s`
    // and from `i = 1` on otherwise.
    let components = f.components();
    let mut bound: BTreeMap<MonoidIndex, u32> = BTreeMap::new();
    for w in &components {
        let mut b = if w == s { k as u32 } else { 1 };
        for u in w.divisors() {
            if u.is_zero() || u == *w {
                continue;
            }
            let rest = w.checked_sub(&u).unwrap();
            if let Some(&bi) = bound.get(&rest) {
                let a0 = if u == *s { k as u32 } else { 1 };
                b = b.max(bi + a0);
            }
        }
        bound.insert(w.clone(), b);
    }

    let mut order: BTreeMap<MonoidIndex, (bool, bool)> = BTreeMap::new();
    for (c, _) in f.points().iter().skip(1) {
        order.entry(c.clone()).or_default().0 = true;
    }
    for w in &components {
        order.entry(w.clone()).or_default().1 = true;
    }

    let mut generation = Generation::new(d + 1);
    for (w, (is_point, is_component)) in order {
        if is_point {
            generation.eval(&mut lattice, &w.extend(0), &alpha)?;
        }
        if is_component {
            let floor = phi(&w.add(&e_last)?);
            for i in 1..=bound[&w] {
                let v = generation.eval(&mut lattice, &w.extend(i), &alpha)?;
                if v == floor {
                    break;
                }
            }
        }
    }
    generation.finish(&lattice)
}

/// One refinement step: the result and what was refined.
pub struct Step {
    pub filter: Filter,
    pub info: RoundInfo,
}

fn is_proper(old: &Filter, new: &Filter) -> bool {
    new.flatten().len() > old.flatten().len()
}

/// Refines `f` at the component chosen by `cfg.selection`. When no
/// component refines properly the input is returned unchanged.
pub fn refine_step(f: &Filter, cfg: &RefinementConfig) -> Result<Step> {
    let ring = GradedLieRing::sections(f)?;
    let comps: Vec<MonoidIndex> = ring.components().keys().cloned().collect();
    if comps.is_empty() {
        return Err(Error::NoNontrivialComponent);
    }
    let mut first = None;
    for s in &comps {
        let c = component_refinement(&ring, s, cfg.method, cfg.seed)?;
        let new = refine_at(f, s, &c.levels)?;
        let proper = is_proper(f, &new);
        let info = RoundInfo {
            component: s.coords().to_vec(),
            ring_dim: c.ring_dim,
            radical_dims: c.radical.radical_dims(),
            proper,
            length: if proper { new.length() } else { f.length() },
        };
        let step = Step { filter: if proper { new } else { f.clone() }, info };
        if proper || cfg.selection == Selection::Leading {
            return Ok(step);
        }
        first.get_or_insert(step);
    }
    Ok(first.unwrap())
}

pub fn refine_once(f: &Filter, cfg: &RefinementConfig) -> Result<Filter> {
    refine_step(f, cfg).map(|s| s.filter)
}

pub struct Refinement {
    pub filter: Filter,
    pub rounds: Vec<RoundInfo>,
    /// False when `max_rounds` was reached before the chain stopped changing.
    pub stable: bool,
}

/// Repeats [`refine_step`] until the chain of subgroups stops changing.
pub fn refine_stable(f: &Filter, cfg: &RefinementConfig) -> Result<Refinement> {
    if cfg.max_rounds == 0 {
        return Err(Error::InvalidInput("max_rounds must be at least 1".into()));
    }
    let mut cur = f.clone();
    let mut rounds = Vec::new();
    for _ in 0..cfg.max_rounds {
        let step = refine_step(&cur, cfg)?;
        let proper = step.info.proper;
        rounds.push(step.info);
        if !proper {
            return Ok(Refinement { filter: cur, rounds, stable: true });
        }
        debug_assert!(contains_chain(&step.filter, &cur));
        cur = step.filter;
    }
    Ok(Refinement { filter: cur, rounds, stable: false })
}

/// Whether every term of `old` occurs in `new`.
pub fn contains_chain(new: &Filter, old: &Filter) -> bool {
    let terms = new.flatten();
    old.flatten().iter().all(|h| terms.iter().any(|t| t.order() == h.order() && **t == **h))
}

/// Orders of the sections between consecutive distinct terms, as exponents.
pub fn factor_dims(f: &Filter) -> Vec<u32> {
    f.flatten().windows(2).map(|w| w[0].order_exp() - w[1].order_exp()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDims {
    pub adj: usize,
    pub cent: usize,
    pub der: usize,
    pub radical_chain: Vec<usize>,
}

/// Isomorphism invariants of a group, computed from the stable refinement of
/// its exponent-`p` central series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order_exp: u32,
    pub method: String,
    pub length: usize,
    pub factor_dims: Vec<u32>,
    pub component_indices: Vec<Vec<u32>>,
    pub ring_dims: RingDims,
    pub rounds: usize,
}

pub fn eta_filter(g: &Arc<UnipotentGroup>) -> Result<Filter> {
    Filter::from_series(g.clone(), eta_series(g, g.whole())?)
}

pub fn gamma_filter(g: &Arc<UnipotentGroup>) -> Result<Filter> {
    Filter::from_series(g.clone(), gamma_series(g, g.whole())?)
}

pub fn fingerprint(g: &Arc<UnipotentGroup>, cfg: &RefinementConfig) -> Result<Fingerprint> {
    let eta = eta_filter(g)?;
    let order_exp = g.whole().order_exp();
    let method = cfg.method.to_string();
    if eta.components().is_empty() {
        let ring_dims = RingDims { adj: 0, cent: 0, der: 0, radical_chain: vec![] };
        let fp = Fingerprint {
            order_exp,
            method,
            length: 0,
            factor_dims: vec![],
            component_indices: vec![],
            ring_dims,
            rounds: 0,
        };
        return Ok(fp);
    }
    let ring = GradedLieRing::sections(&eta)?;
    let s = ring.components().keys().next().unwrap().clone();
    let m = ring.bimap_at(&s, &s)?;
    let lead = component_refinement(&ring, &s, cfg.method, cfg.seed)?;
    let ring_dims = RingDims {
        adj: invariant_ring(&m, RingKind::Adjoint).dim(),
        cent: invariant_ring(&m, RingKind::Centroid).dim(),
        der: invariant_ring(&m, RingKind::Derivation).dim(),
        radical_chain: lead.radical.radical_dims(),
    };
    let r = refine_stable(&eta, cfg)?;
    Ok(Fingerprint {
        order_exp,
        method,
        length: r.filter.length(),
        factor_dims: factor_dims(&r.filter),
        component_indices: r.filter.components().iter().map(|c| c.coords().to_vec()).collect(),
        ring_dims,
        rounds: r.rounds.len(),
    })
}

/// For the adjoint ring of the leading bimap: the least `i` with `J^i ≠ 0`
/// and `J^{2i} = 0` gives `H = H_i` with `[H, H]` inside the third term of
/// the chain.
pub fn hyperplane_witness(f: &Filter, seed: u64) -> Result<Option<Arc<Subgroup>>> {
    let ring = GradedLieRing::sections(f)?;
    let Some(s) = ring.components().keys().next().cloned() else {
        return Ok(None);
    };
    let c = component_refinement(&ring, &s, RingKind::Adjoint, seed)?;
    let dims = c.radical.radical_dims();
    let Some(i) = (1..=dims.len()).find(|&i| 2 * i > dims.len()) else {
        return Ok(None);
    };
    let h = c.levels[i - 1].clone();
    let chain = f.flatten();
    let third = chain.get(2).cloned().unwrap_or_else(|| Arc::new(f.group().trivial()));
    let hh = f.group().commutator_subgroup(&h, &h)?;
    if !hh.is_subgroup_of(&third) {
        return Err(Error::InvalidInput("[H, H] is not in the third term".into()));
    }
    Ok(Some(h))
}

/// JSON output of the `refine` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefineJson {
    pub method: String,
    pub stable: bool,
    pub rounds: Vec<RoundInfo>,
    pub order_exps: Vec<u32>,
    pub factor_dims: Vec<u32>,
    pub filter: FilterJson,
}

impl Refinement {
    pub fn to_json(&self, method: RingKind) -> RefineJson {
        RefineJson {
            method: method.to_string(),
            stable: self.stable,
            rounds: self.rounds.clone(),
            order_exps: self.filter.flatten().iter().map(|h| h.order_exp()).collect(),
            factor_dims: factor_dims(&self.filter),
            filter: self.filter.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_heisenberg, make_ut};
    use crate::ring::FinCommRing;

    fn exps(f: &Filter) -> Vec<u32> {
        f.flatten().iter().map(|h| h.order_exp()).collect()
    }

    fn heis(p: u32, poly: &[i64]) -> Arc<UnipotentGroup> {
        Arc::new(make_heisenberg(&FinCommRing::poly_quotient(p, poly).unwrap(), DEFAULT_CAP).unwrap())
    }

    #[test]
    fn ut4_adjoint() {
        for p in [2, 3] {
            let g = Arc::new(make_ut(4, p, DEFAULT_CAP).unwrap());
            let f = gamma_filter(&g).unwrap();
            let r = refine_once(&f, &RefinementConfig::default()).unwrap();
            assert_eq!(exps(&r), vec![6, 5, 3, 1, 0]);
            assert!(r.verify_axioms().is_ok());
            assert!(contains_chain(&r, &f));
        }
    }

    #[test]
    fn semisimple_ring_does_not_refine() {
        let g = heis(3, &[0, 1]);
        let f = gamma_filter(&g).unwrap();
        let step = refine_step(&f, &RefinementConfig::default()).unwrap();
        assert!(!step.info.proper);
        assert_eq!(step.info.ring_dim, 4);
        assert_eq!(exps(&step.filter), exps(&f));
        let r = refine_stable(&f, &RefinementConfig::default()).unwrap();
        assert!(r.stable);
        assert_eq!(r.rounds.len(), 1);
    }

    #[test]
    fn dual_numbers_heisenberg() {
        let g = heis(2, &[0, 0, 1]);
        let f = gamma_filter(&g).unwrap();
        let r = refine_once(&f, &RefinementConfig::default()).unwrap();
        assert_eq!(exps(&r), vec![6, 4, 2, 1, 0]);
        assert_eq!(r.length(), 4);
    }

    #[test]
    fn stable_rounds_are_monotone() {
        let g = Arc::new(make_ut(5, 2, DEFAULT_CAP).unwrap());
        let f = gamma_filter(&g).unwrap();
        let r = refine_stable(&f, &RefinementConfig::default()).unwrap();
        let lengths: Vec<usize> = r.rounds.iter().map(|i| i.length).collect();
        assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
        assert!(factor_dims(&r.filter).iter().all(|&d| d <= 2));
        assert!(r.filter.length() > 4);
        let one = RefinementConfig { max_rounds: 1, ..Default::default() };
        let capped = refine_stable(&f, &one).unwrap();
        assert!(!capped.stable);
        let zero = RefinementConfig { max_rounds: 0, ..Default::default() };
        assert!(refine_stable(&f, &zero).is_err());
    }

    #[test]
    fn trivial_group_has_nothing_to_refine() {
        let space = crate::group::MatSpace::new(2, 3).unwrap();
        let g = Arc::new(UnipotentGroup::from_generators(space, vec![], "1", DEFAULT_CAP).unwrap());
        let f = gamma_filter(&g).unwrap();
        assert!(matches!(refine_step(&f, &RefinementConfig::default()), Err(Error::NoNontrivialComponent)));
    }

    #[test]
    fn fingerprints_separate_heisenberg_groups() {
        let f4 = heis(2, &[1, 1, 1]);
        let dual = heis(2, &[0, 0, 1]);
        for kind in [RingKind::Adjoint, RingKind::Centroid] {
            let cfg = RefinementConfig::new(kind);
            let a = fingerprint(&f4, &cfg).unwrap();
            let b = fingerprint(&dual, &cfg).unwrap();
            assert_eq!(a.order_exp, b.order_exp);
            assert_ne!(a, b);
            assert_eq!(a, fingerprint(&f4, &cfg).unwrap());
        }
    }

    #[test]
    fn hyperplane_witnesses() {
        let g = Arc::new(make_ut(4, 2, DEFAULT_CAP).unwrap());
        let h = hyperplane_witness(&gamma_filter(&g).unwrap(), 0).unwrap().unwrap();
        assert_eq!(h.order(), 32);
        assert!(hyperplane_witness(&gamma_filter(&heis(2, &[1, 1])).unwrap(), 0).unwrap().is_none());
        let h = hyperplane_witness(&gamma_filter(&heis(2, &[0, 0, 1])).unwrap(), 0).unwrap().unwrap();
        assert_eq!(h.order(), 16);
    }
}
