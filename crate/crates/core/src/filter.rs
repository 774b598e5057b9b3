//! Filters `φ : ℕ^d → normal subgroups` over the lexicographic order.
//!
//! A filter is stored by its change points: the indices `c` where `φ_c`
//! differs from the value just before `c`. Lex order is total, so
//! `φ_w` is the value at the largest change point `≤ w`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{closure, GroupElement, GroupSpec, Lattice, SubId, Subgroup, UnipotentGroup};
use crate::monoid::MonoidIndex;

#[derive(Clone)]
pub struct Filter {
    dim: usize,
    group: Arc<UnipotentGroup>,
    points: Vec<(MonoidIndex, Arc<Subgroup>)>,
}

impl std::fmt::Debug for Filter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Filter(dim {}; ", self.dim)?;
        for (i, (c, h)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:?}:{}", h.order())?;
        }
        write!(f, ")")
    }
}

/// A failed filter axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub s: MonoidIndex,
    pub t: MonoidIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NotNormal,
    NotDecreasing,
    /// `[φ_s, φ_t] ≰ φ_{s+t}`
    Commutator,
}

impl Filter {
    /// Builds a filter from change points. The first point must be `0 ↦ G`,
    /// indices strictly increasing and the last value trivial. The axioms
    /// themselves are checked by [`Filter::verify_axioms`].
    pub fn from_points(group: Arc<UnipotentGroup>, points: Vec<(MonoidIndex, Arc<Subgroup>)>) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::InvalidInput("empty filter".into()))?;
        let dim = first.0.dim();
        if !first.0.is_zero() || first.1.order() != group.order() {
            return Err(Error::InvalidInput("filter must start with 0 ↦ G".into()));
        }
        for w in points.windows(2) {
            if w[1].0.dim() != dim {
                return Err(Error::DimensionMismatch(w[1].0.dim(), dim));
            }
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidInput("change points must increase".into()));
            }
        }
        if !points.last().unwrap().1.is_trivial() && group.order() > 1 {
            return Err(Error::InvalidInput("filter must end at the trivial group".into()));
        }
        Ok(Filter { dim, group, points })
    }

    /// The ℕ-filter `i ↦ series[i]`, `series[0] = G`, ending at 1.
    pub fn from_series(group: Arc<UnipotentGroup>, series: Vec<Subgroup>) -> Result<Self> {
        let mut points: Vec<(MonoidIndex, Arc<Subgroup>)> = Vec::new();
        for (i, h) in series.into_iter().enumerate() {
            if points.last().is_some_and(|(_, last)| last.order() == h.order() && **last == h) {
                continue;
            }
            points.push((MonoidIndex::new(vec![i as u32]), Arc::new(h)));
        }
        Self::from_points(group, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn group(&self) -> &Arc<UnipotentGroup> {
        &self.group
    }
    pub fn points(&self) -> &[(MonoidIndex, Arc<Subgroup>)] {
        &self.points
    }

    fn position(&self, w: &MonoidIndex) -> usize {
        // largest change point ≤ w; points[0] is 0 ≤ everything
        self.points.partition_point(|(c, _)| c <= w) - 1
    }

    pub fn at(&self, w: &MonoidIndex) -> Result<&Arc<Subgroup>> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch(w.dim(), self.dim));
        }
        Ok(&self.points[self.position(w)].1)
    }

    /// `φ_s⁺`. The lex-least nonzero index is `e_last`, so this is `φ_{s+e_last}`.
    pub fn plus(&self, s: &MonoidIndex) -> Result<&Arc<Subgroup>> {
        let e = MonoidIndex::unit(self.dim, self.dim - 1);
        self.at(&s.add(&e)?)
    }

    /// Indices `s ≠ 0` with `φ_s ≠ φ_s⁺`, in increasing order.
    pub fn components(&self) -> Vec<MonoidIndex> {
        let last = self.dim - 1;
        self.points
            .iter()
            .skip(1)
            .filter(|(c, _)| c.coords()[last] >= 1)
            .map(|(c, _)| {
                let mut v = c.coords().to_vec();
                v[last] -= 1;
                MonoidIndex::new(v)
            })
            .filter(|s| !s.is_zero())
            .collect()
    }

    /// The distinct subgroups from `G` down to 1.
    pub fn flatten(&self) -> Vec<Arc<Subgroup>> {
        self.points.iter().map(|(_, h)| h.clone()).collect()
    }

    /// Number of nonzero graded components.
    pub fn length(&self) -> usize {
        self.components().len()
    }

    /// The lex-largest index before the next change point, or an index
    /// with large trailing coordinates when the interval has no maximum.
    fn interval_top(&self, i: usize, big: u32) -> Option<MonoidIndex> {
        let next = &self.points.get(i + 1)?.0;
        let c = next.coords();
        let j = c.iter().rposition(|&x| x > 0)?;
        let mut v = c.to_vec();
        v[j] -= 1;
        for x in v.iter_mut().skip(j + 1) {
            *x = big;
        }
        Some(MonoidIndex::new(v))
    }

    /// Checks normality in `G`, that values strictly decrease, and
    /// `[φ_s, φ_t] ≤ φ_{s+t}` for all `s, t` (through one witness per pair of
    /// constant intervals).
    pub fn verify_axioms(&self) -> std::result::Result<(), Violation> {
        let zero = MonoidIndex::zero(self.dim);
        for (c, h) in &self.points {
            if !self.group.is_normal(h) {
                return Err(Violation { kind: ViolationKind::NotNormal, s: c.clone(), t: zero.clone() });
            }
        }
        for w in self.points.windows(2) {
            if !(w[1].1.is_subgroup_of(&w[0].1) && w[1].1.order() < w[0].1.order()) {
                return Err(Violation { kind: ViolationKind::NotDecreasing, s: w[0].0.clone(), t: w[1].0.clone() });
            }
        }
        let max_coord = self.points.iter().flat_map(|(c, _)| c.coords().iter().copied()).max().unwrap_or(0);
        let big = 2 * max_coord + 2;
        let tops: Vec<Option<MonoidIndex>> = (0..self.points.len()).map(|i| self.interval_top(i, big)).collect();
        for i in 0..self.points.len() {
            for j in i..self.points.len() {
                let (Some(ti), Some(tj)) = (&tops[i], &tops[j]) else { continue };
                if ti.is_zero() || tj.is_zero() {
                    continue;
                }
                let (hi, hj) = (&self.points[i].1, &self.points[j].1);
                if hi.is_trivial() || hj.is_trivial() {
                    continue;
                }
                let target = self.at(&ti.add(tj).unwrap()).unwrap();
                let ok = hi.generators().iter().all(|x| {
                    hj.generators()
                        .iter()
                        .all(|y| target.contains(&self.group.space().commutator(x, y)))
                });
                // generator commutators suffice once the target is normal
                if !ok {
                    return Err(Violation { kind: ViolationKind::Commutator, s: ti.clone(), t: tj.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> FilterJson {
        FilterJson {
            dim: self.dim,
            terms: self
                .points
                .iter()
                .map(|(c, h)| TermJson {
                    index: c.clone(),
                    order_exp: h.order_exp(),
                    generators: h.generators().iter().map(element_json).collect(),
                })
                .collect(),
            length: self.length(),
            chain: self.points.iter().map(|(_, h)| h.order_exp()).collect(),
            group: self.group.to_spec(),
        }
    }

    pub fn from_json(json: &FilterJson, cap: usize) -> Result<Self> {
        let group = Arc::new(UnipotentGroup::from_spec(&json.group, cap)?);
        let space = group.space();
        let d = space.d;
        let mut points = Vec::new();
        for t in &json.terms {
            let gens = t
                .generators
                .iter()
                .map(|flat| {
                    if flat.len() != d * d {
                        return Err(Error::DimensionMismatch(flat.len(), d * d));
                    }
                    let rows: Vec<Vec<i64>> = flat.chunks(d).map(|c| c.to_vec()).collect();
                    space.element_from_rows(&rows)
                })
                .collect::<Result<Vec<_>>>()?;
            let h = if t.index.is_zero() { (**group.whole()).clone() } else { closure(space, cap, &gens)? };
            if h.order_exp() != t.order_exp {
                return Err(Error::InvalidInput(format!("term {:?} has the wrong order", t.index)));
            }
            points.push((t.index.clone(), Arc::new(h)));
        }
        if points.first().is_some_and(|(c, _)| c.dim() != json.dim) {
            return Err(Error::DimensionMismatch(points[0].0.dim(), json.dim));
        }
        Self::from_points(group, points)
    }
}

fn element_json(g: &GroupElement) -> Vec<i64> {
    g.entries().iter().map(|&x| x as i64).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub index: MonoidIndex,
    pub order_exp: u32,
    pub generators: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FilterJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
    pub length: usize,
    #[serde(default)]
    pub chain: Vec<u32>,
    pub group: GroupSpec,
}

/// Incremental evaluation of the generated filter
/// `π̄_w = π_w · ∏_{w = t + x, t ≠ 0} [π̄_t, π_x]`
/// at indices supplied in increasing lex order.
///
/// Values at indices that were never evaluated are read from the last
/// change point below them, so the caller must evaluate every index where
/// `π̄` can change.
pub struct Generation {
    dim: usize,
    values: FxHashMap<MonoidIndex, SubId>,
    changes: Vec<(MonoidIndex, SubId)>,
}

impl Generation {
    pub fn new(dim: usize) -> Self {
        Generation { dim, values: FxHashMap::default(), changes: vec![(MonoidIndex::zero(dim), Lattice::WHOLE)] }
    }

    pub fn lookup(&self, t: &MonoidIndex) -> SubId {
        if let Some(&v) = self.values.get(t) {
            return v;
        }
        let i = self.changes.partition_point(|(c, _)| c <= t) - 1;
        self.changes[i].1
    }

    pub fn last(&self) -> SubId {
        self.changes.last().unwrap().1
    }

    /// Evaluates `π̄_w`; `alpha(x)` is `Some(π_x)` exactly on the domain.
    pub fn eval(
        &mut self,
        lattice: &mut Lattice,
        w: &MonoidIndex,
        alpha: &dyn Fn(&MonoidIndex) -> Option<SubId>,
    ) -> Result<SubId> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch(w.dim(), self.dim));
        }
        if w.is_zero() {
            return Ok(Lattice::WHOLE);
        }
        debug_assert!(self.changes.last().unwrap().0 < *w);
        let mut terms = Vec::new();
        if let Some(a) = alpha(w) {
            terms.push(a);
        }
        for x in w.divisors() {
            if x.is_zero() || x == *w {
                continue;
            }
            let Some(a) = alpha(&x) else { continue };
            if a == Lattice::TRIVIAL {
                continue;
            }
            let t = w.checked_sub(&x).unwrap();
            let v = self.lookup(&t);
            terms.push(lattice.commutator(v, a)?);
        }
        let value = lattice.join_all(terms)?;
        self.values.insert(w.clone(), value);
        if value != self.last() {
            self.changes.push((w.clone(), value));
        }
        Ok(value)
    }

    pub fn changes(&self) -> &[(MonoidIndex, SubId)] {
        &self.changes
    }

    /// The filter with the recorded change points; the last must be trivial.
    pub fn finish(self, lattice: &Lattice) -> Result<Filter> {
        if self.last() != Lattice::TRIVIAL && lattice.group().order() > 1 {
            return Err(Error::InvalidInput("generated filter does not reach 1 within the bound".into()));
        }
        let points = self.changes.iter().map(|(c, id)| (c.clone(), lattice.get(*id).clone())).collect();
        Filter::from_points(lattice.group().clone(), points)
    }
}

fn check_generators(
    lattice: &mut Lattice,
    gens: &BTreeMap<MonoidIndex, SubId>,
) -> Result<()> {
    for (x, &a) in gens {
        if !lattice.is_normal(a) {
            return Err(Error::NonNormalGenerator(format!("{x:?}")));
        }
        for y in x.divisors() {
            if !y.is_zero() && !gens.contains_key(&y) {
                return Err(Error::NotDownClosed(format!("{y:?}")));
            }
        }
    }
    let entries: Vec<_> = gens.iter().collect();
    for (i, (x, &a)) in entries.iter().enumerate() {
        for (y, &b) in &entries[i + 1..] {
            // x < y in lex order, so π_y ≤ π_x
            if !lattice.le(b, a) {
                return Err(Error::NotOrderReversing(format!("{x:?}"), format!("{y:?}")));
            }
        }
    }
    Ok(())
}

/// Evaluates the generated product at every index of the box `0..=bound`
/// without checking the hypotheses on the generators.
pub fn generate_box(
    lattice: &mut Lattice,
    gens: &BTreeMap<MonoidIndex, SubId>,
    bound: &MonoidIndex,
) -> Result<(Generation, BTreeMap<MonoidIndex, SubId>)> {
    let mut generation = Generation::new(bound.dim());
    let alpha = |x: &MonoidIndex| gens.get(x).copied();
    let mut values = BTreeMap::new();
    for w in bound.divisors() {
        let v = generation.eval(lattice, &w, &alpha)?;
        values.insert(w, v);
    }
    Ok((generation, values))
}

/// The filter generated by `gens` (a down-closed, order-reversing map into
/// normal subgroups), evaluated on the box `0..=bound`. The value at `bound`
/// must be trivial.
pub fn generate(
    group: &Arc<UnipotentGroup>,
    gens: &BTreeMap<MonoidIndex, Arc<Subgroup>>,
    bound: &MonoidIndex,
) -> Result<Filter> {
    let mut lattice = Lattice::new(group.clone());
    let mut ids = BTreeMap::new();
    for (x, h) in gens {
        if x.dim() != bound.dim() {
            return Err(Error::DimensionMismatch(x.dim(), bound.dim()));
        }
        if x.is_zero() {
            continue;
        }
        ids.insert(x.clone(), lattice.intern(h.clone()));
    }
    check_generators(&mut lattice, &ids)?;
    let (generation, _) = generate_box(&mut lattice, &ids, bound)?;
    generation.finish(&lattice)
}
