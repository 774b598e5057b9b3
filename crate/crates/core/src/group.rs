//! Finite unipotent matrix groups over `Z_p`, enumerated subgroups, and the
//! lower central, exponent-p central and Jennings series.
//!
//! Subgroups are held as fully enumerated element sets built by
//! breadth-first closure. Every closure is bounded by a cap; exceeding it
//! is reported as [`Error::CapExceeded`].

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet, FxHasher};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_prime, FpMatrix};
use crate::ring::FinCommRing;

pub const DEFAULT_CAP: usize = 1 << 20;

/// A `d×d` matrix over `Z_p`, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Box<[u8]>);

impl GroupElement {
    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn to_matrix(&self, space: MatSpace) -> FpMatrix {
        FpMatrix::from_flat(space.p, space.d, space.d, self.0.to_vec())
    }

    fn digest(&self) -> u64 {
        let mut h = FxHasher::default();
        self.0.hash(&mut h);
        h.finish()
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Shape and modulus shared by the elements of one group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatSpace {
    pub p: u32,
    pub d: usize,
}

impl MatSpace {
    pub fn new(p: u32, d: usize) -> Result<Self> {
        check_prime(p)?;
        if d == 0 {
            return Err(Error::InvalidInput("matrix degree must be positive".into()));
        }
        Ok(MatSpace { p, d })
    }

    pub fn identity(&self) -> GroupElement {
        let mut e = vec![0u8; self.d * self.d];
        for i in 0..self.d {
            e[i * self.d + i] = 1;
        }
        GroupElement(e.into_boxed_slice())
    }

    /// Wraps a matrix, checking `(M - I)^d = 0`.
    pub fn element(&self, m: &FpMatrix) -> Result<GroupElement> {
        if m.rows() != self.d || m.cols() != self.d {
            return Err(Error::DimensionMismatch(m.rows(), self.d));
        }
        if m.p() != self.p {
            return Err(Error::InvalidInput(format!("modulus {} != {}", m.p(), self.p)));
        }
        let n = m.sub(&FpMatrix::identity(self.p, self.d));
        if !n.pow(self.d as u64).is_zero() {
            return Err(Error::NotUnipotent);
        }
        Ok(GroupElement(m.as_slice().to_vec().into_boxed_slice()))
    }

    pub fn element_from_rows(&self, rows: &[Vec<i64>]) -> Result<GroupElement> {
        self.element(&FpMatrix::from_rows(self.p, rows)?)
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let (p, d) = (self.p, self.d);
        let mut out = vec![0u8; d * d];
        let mut acc = [0u32; 64];
        let acc = &mut acc[..d.min(64)];
        if d > 64 {
            return GroupElement(
                FpMatrix::from_flat(p, d, d, a.0.to_vec())
                    .mul(&FpMatrix::from_flat(p, d, d, b.0.to_vec()))
                    .into_flat()
                    .into_boxed_slice(),
            );
        }
        for i in 0..d {
            acc.iter_mut().for_each(|x| *x = 0);
            let arow = &a.0[i * d..(i + 1) * d];
            for (k, &x) in arow.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let brow = &b.0[k * d..(k + 1) * d];
                for (slot, &y) in acc.iter_mut().zip(brow) {
                    *slot += x as u32 * y as u32;
                }
            }
            for j in 0..d {
                out[i * d + j] = (acc[j] % p) as u8;
            }
        }
        GroupElement(out.into_boxed_slice())
    }

    /// Inverse of a unipotent matrix as the finite series `Σ (-N)^j`.
    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        let p = self.p;
        let mut neg_n = a.clone();
        for i in 0..self.d {
            for j in 0..self.d {
                let x = a.0[i * self.d + j] as u32;
                let n = if i == j { (x + p - 1) % p } else { x };
                neg_n.0[i * self.d + j] = ((p - n) % p) as u8;
            }
        }
        let mut acc = self.identity();
        let mut term = self.identity();
        for _ in 1..self.d {
            term = self.mul(&term, &neg_n);
            for (x, &t) in acc.0.iter_mut().zip(term.0.iter()) {
                *x = ((*x as u32 + t as u32) % p) as u8;
            }
        }
        acc
    }

    /// `[x,y] = x⁻¹y⁻¹xy`.
    pub fn commutator(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&self.inv(&yx), &xy)
    }

    /// `g⁻¹hg`.
    pub fn conjugate(&self, h: &GroupElement, g: &GroupElement) -> GroupElement {
        self.mul(&self.mul(&self.inv(g), h), g)
    }

    pub fn pow(&self, a: &GroupElement, mut e: u64) -> GroupElement {
        let mut base = a.clone();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// An enumerated subgroup of a matrix group.
#[derive(Clone)]
pub struct Subgroup {
    space: MatSpace,
    generators: Vec<GroupElement>,
    elements: FxHashSet<GroupElement>,
    digest: u64,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.order() == other.order()
            && self.digest == other.digest
            && self.elements.iter().all(|e| other.contains(e))
    }
}
impl Eq for Subgroup {}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}, {} gens)", self.order(), self.generators.len())
    }
}

impl Subgroup {
    pub fn trivial(space: MatSpace) -> Self {
        let id = space.identity();
        let digest = id.digest();
        let mut elements = FxHashSet::default();
        elements.insert(id);
        Subgroup { space, generators: vec![], elements, digest }
    }

    pub fn space(&self) -> MatSpace {
        self.space
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }
    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }
    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }
    pub fn elements(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter()
    }

    /// Elements in increasing row-major lexicographic order.
    pub fn sorted_elements(&self) -> Vec<GroupElement> {
        let mut v: Vec<_> = self.elements.iter().cloned().collect();
        v.sort_unstable();
        v
    }

    /// `log_p |H|`.
    pub fn order_exp(&self) -> u32 {
        let mut n = self.order();
        let mut e = 0;
        while n > 1 {
            n /= self.space.p as usize;
            e += 1;
        }
        e
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.order() <= other.order()
            && other.order().is_multiple_of(self.order())
            && self.generators.iter().all(|g| other.contains(g))
    }

    /// Normality under conjugation by the given generators.
    pub fn is_normalized_by(&self, gens: &[GroupElement]) -> bool {
        gens.iter().all(|g| {
            self.generators
                .iter()
                .all(|h| self.contains(&self.space.conjugate(h, g)))
        })
    }

    fn insert(&mut self, g: GroupElement, cap: usize) -> Result<bool> {
        if self.elements.contains(&g) {
            return Ok(false);
        }
        if self.elements.len() >= cap {
            return Err(Error::CapExceeded(cap));
        }
        self.digest = self.digest.wrapping_add(g.digest());
        self.elements.insert(g);
        Ok(true)
    }

    /// Replaces `self` by `⟨self, x⟩`. Returns whether the subgroup grew.
    pub fn extend(&mut self, x: &GroupElement, cap: usize) -> Result<bool> {
        if self.contains(x) {
            return Ok(false);
        }
        let space = self.space;
        self.generators.push(x.clone());
        let normalizes = self
            .generators
            .iter()
            .take(self.generators.len() - 1)
            .all(|h| self.contains(&space.conjugate(h, x)));
        let old: Vec<GroupElement> = self.elements.iter().cloned().collect();
        if normalizes {
            // ⟨S,x⟩ is the union of the cosets S·x^j.
            let mut power = x.clone();
            while !self.contains(&power) {
                for s in &old {
                    self.insert(space.mul(s, &power), cap)?;
                }
                power = space.mul(&power, x);
            }
            return Ok(true);
        }
        let mut queue = Vec::new();
        for s in &old {
            let y = space.mul(s, x);
            if self.insert(y.clone(), cap)? {
                queue.push(y);
            }
        }
        let gens = self.generators.clone();
        while let Some(y) = queue.pop() {
            for g in &gens {
                let z = space.mul(&y, g);
                if self.insert(z.clone(), cap)? {
                    queue.push(z);
                }
            }
        }
        Ok(true)
    }
}

/// `⟨gens⟩` by breadth-first closure. Redundant generators are dropped.
pub fn closure(space: MatSpace, cap: usize, gens: &[GroupElement]) -> Result<Subgroup> {
    let mut h = Subgroup::trivial(space);
    for g in gens {
        h.extend(g, cap)?;
    }
    Ok(h)
}

/// The smallest subgroup containing `seeds` normalized by `conj`.
pub fn normal_closure(
    space: MatSpace,
    cap: usize,
    seeds: &[GroupElement],
    conj: &[GroupElement],
) -> Result<Subgroup> {
    let mut h = closure(space, cap, seeds)?;
    let mut i = 0;
    while i < h.generators.len() {
        let x = h.generators[i].clone();
        for g in conj {
            let c = space.conjugate(&x, g);
            h.extend(&c, cap)?;
        }
        i += 1;
    }
    Ok(h)
}

/// `[A,B]`: the normal closure in `⟨A,B⟩` of the commutators of generators.
pub fn commutator_subgroup(a: &Subgroup, b: &Subgroup, cap: usize) -> Result<Subgroup> {
    let space = a.space;
    let mut seeds = Vec::new();
    for x in &a.generators {
        for y in &b.generators {
            seeds.push(space.commutator(x, y));
        }
    }
    let mut conj = a.generators.clone();
    conj.extend(b.generators.iter().cloned());
    normal_closure(space, cap, &seeds, &conj)
}

/// `⟨a^p : a ∈ A⟩`.
pub fn power_subgroup(a: &Subgroup, p: u32, cap: usize) -> Result<Subgroup> {
    let space = a.space;
    let mut h = Subgroup::trivial(space);
    for x in a.sorted_elements() {
        let y = space.pow(&x, p as u64);
        h.extend(&y, cap)?;
    }
    Ok(h)
}

/// `AB` for subgroups normalizing each other.
pub fn join(a: &Subgroup, b: &Subgroup, cap: usize) -> Result<Subgroup> {
    let (big, small) = if a.order() >= b.order() { (a, b) } else { (b, a) };
    let mut h = big.clone();
    for g in &small.generators {
        h.extend(g, cap)?;
    }
    Ok(h)
}

/// A finite group of unipotent matrices, together with its element set.
#[derive(Clone)]
pub struct UnipotentGroup {
    space: MatSpace,
    name: String,
    generators: Vec<GroupElement>,
    whole: Arc<Subgroup>,
    cap: usize,
}

impl fmt::Debug for UnipotentGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p={}, degree {}, order {})", self.name, self.space.p, self.space.d, self.order())
    }
}

/// Group-spec JSON.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupSpec {
    pub p: u32,
    pub degree: usize,
    pub generators: Vec<Vec<i64>>,
    #[serde(default)]
    pub name: String,
}

impl UnipotentGroup {
    pub fn from_generators(
        space: MatSpace,
        generators: Vec<GroupElement>,
        name: impl Into<String>,
        cap: usize,
    ) -> Result<Self> {
        let whole = closure(space, cap, &generators)?;
        let mut n = whole.order();
        while n % space.p as usize == 0 {
            n /= space.p as usize;
        }
        if n != 1 {
            return Err(Error::InvalidInput("group order is not a power of p".into()));
        }
        Ok(UnipotentGroup { space, name: name.into(), generators, whole: Arc::new(whole), cap })
    }

    pub fn from_spec(spec: &GroupSpec, cap: usize) -> Result<Self> {
        let space = MatSpace::new(spec.p, spec.degree)?;
        let d = spec.degree;
        let gens = spec
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
        let name = if spec.name.is_empty() { "G".to_string() } else { spec.name.clone() };
        Self::from_generators(space, gens, name, cap)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            p: self.space.p,
            degree: self.space.d,
            generators: self
                .generators
                .iter()
                .map(|g| g.entries().iter().map(|&x| x as i64).collect())
                .collect(),
            name: self.name.clone(),
        }
    }

    pub fn space(&self) -> MatSpace {
        self.space
    }
    pub fn p(&self) -> u32 {
        self.space.p
    }
    pub fn degree(&self) -> usize {
        self.space.d
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn cap(&self) -> usize {
        self.cap
    }
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }
    pub fn whole(&self) -> &Arc<Subgroup> {
        &self.whole
    }
    pub fn order(&self) -> usize {
        self.whole.order()
    }
    pub fn trivial(&self) -> Subgroup {
        Subgroup::trivial(self.space)
    }

    pub fn closure(&self, gens: &[GroupElement]) -> Result<Subgroup> {
        closure(self.space, self.cap, gens)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        h.is_subgroup_of(&self.whole) && h.is_normalized_by(&self.generators)
    }

    pub fn commutator_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        commutator_subgroup(a, b, self.cap)
    }

    pub fn power_subgroup(&self, a: &Subgroup) -> Result<Subgroup> {
        power_subgroup(a, self.space.p, self.cap)
    }

    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        join(a, b, self.cap)
    }
}

/// `UT(d, p)`, generated by the elementary transvections `I + E_{i,i+1}`
/// together with all other `I + E_{ij}`, `i < j`.
pub fn make_ut(d: usize, p: u32, cap: usize) -> Result<UnipotentGroup> {
    if d < 2 {
        return Err(Error::InvalidInput("UT(d,p) needs d >= 2".into()));
    }
    let space = MatSpace::new(p, d)?;
    let exp = d * (d - 1) / 2;
    if (p as f64).powi(exp as i32) > cap as f64 {
        return Err(Error::CapExceeded(cap));
    }
    let mut gens = Vec::new();
    for gap in 1..d {
        for i in 0..d - gap {
            let mut m = FpMatrix::identity(p, d);
            m.set(i, i + gap, 1);
            gens.push(space.element(&m)?);
        }
    }
    UnipotentGroup::from_generators(space, gens, format!("UT({d},{p})"), cap)
}

/// The Heisenberg group `H(R)` realized through the regular representation
/// of `R` as block matrices `[[I, M_a, M_c], [0, I, M_b], [0, 0, I]]`.
pub fn make_heisenberg(ring: &FinCommRing, cap: usize) -> Result<UnipotentGroup> {
    let m = ring.dim();
    let p = ring.p();
    if (p as f64).powi(3 * m as i32) > cap as f64 {
        return Err(Error::CapExceeded(cap));
    }
    let space = MatSpace::new(p, 3 * m)?;
    let mut gens = Vec::new();
    for block in [(0usize, 1usize), (1, 2), (0, 2)] {
        for i in 0..m {
            let mut e = vec![0u8; m];
            e[i] = 1;
            let rep = ring.regular_matrix(&e);
            let mut g = FpMatrix::identity(p, 3 * m);
            for r in 0..m {
                for c in 0..m {
                    g.set(block.0 * m + r, block.1 * m + c, rep.get(r, c));
                }
            }
            gens.push(space.element(&g)?);
        }
    }
    UnipotentGroup::from_generators(space, gens, format!("H({})", ring.name()), cap)
}

/// `G × H` as block-diagonal matrices.
pub fn direct_product(g: &UnipotentGroup, h: &UnipotentGroup, cap: usize) -> Result<UnipotentGroup> {
    if g.p() != h.p() {
        return Err(Error::InvalidInput("direct product of groups over different primes".into()));
    }
    let (dg, dh) = (g.degree(), h.degree());
    let space = MatSpace::new(g.p(), dg + dh)?;
    let embed = |x: &GroupElement, off: usize, dx: usize| {
        let mut m = FpMatrix::identity(g.p(), dg + dh);
        for i in 0..dx {
            for j in 0..dx {
                m.set(off + i, off + j, x.entries()[i * dx + j] as u32);
            }
        }
        space.element(&m)
    };
    let mut gens = Vec::new();
    for x in g.generators() {
        gens.push(embed(x, 0, dg)?);
    }
    for x in h.generators() {
        gens.push(embed(x, dg, dh)?);
    }
    UnipotentGroup::from_generators(space, gens, format!("{}x{}", g.name(), h.name()), cap)
}

/// The cyclic group of order `p` as 2×2 unipotent matrices.
pub fn make_cyclic(p: u32, cap: usize) -> Result<UnipotentGroup> {
    let space = MatSpace::new(p, 2)?;
    let g = space.element_from_rows(&[vec![1, 1], vec![0, 1]])?;
    UnipotentGroup::from_generators(space, vec![g], format!("C{p}"), cap)
}

fn check_normal_in(g: &UnipotentGroup, n: &Subgroup) -> Result<()> {
    if !g.is_normal(n) {
        return Err(Error::NotNormal("series base is not normal in the ambient group".into()));
    }
    Ok(())
}

/// `γ_0 = G`, `γ_1 = N`, `γ_{i+1} = [N, γ_i]`, ending with the trivial group.
pub fn gamma_series(g: &UnipotentGroup, n: &Subgroup) -> Result<Vec<Subgroup>> {
    check_normal_in(g, n)?;
    let mut out = vec![(**g.whole()).clone(), n.clone()];
    while !out.last().unwrap().is_trivial() {
        let next = g.commutator_subgroup(n, out.last().unwrap())?;
        if next.order() == out.last().unwrap().order() {
            return Err(Error::InvalidInput("lower central series does not reach 1".into()));
        }
        out.push(next);
    }
    Ok(out)
}

/// `η_0 = G`, `η_1 = N`, `η_{i+1} = [N, η_i] η_i^p`.
pub fn eta_series(g: &UnipotentGroup, n: &Subgroup) -> Result<Vec<Subgroup>> {
    check_normal_in(g, n)?;
    let mut out = vec![(**g.whole()).clone(), n.clone()];
    while !out.last().unwrap().is_trivial() {
        let last = out.last().unwrap();
        let c = g.commutator_subgroup(n, last)?;
        let pw = g.power_subgroup(last)?;
        out.push(g.join(&c, &pw)?);
    }
    Ok(out)
}

/// `κ_0 = G`, `κ_1 = N`, `κ_i = [N, κ_{i-1}] κ_{⌈i/p⌉}^p`.
pub fn kappa_series(g: &UnipotentGroup, n: &Subgroup) -> Result<Vec<Subgroup>> {
    check_normal_in(g, n)?;
    let p = g.p() as usize;
    let mut out = vec![(**g.whole()).clone(), n.clone()];
    let mut i = 2;
    while !out.last().unwrap().is_trivial() {
        let c = g.commutator_subgroup(n, &out[i - 1])?;
        let pw = g.power_subgroup(&out[i.div_ceil(p)])?;
        out.push(g.join(&c, &pw)?);
        i += 1;
    }
    Ok(out)
}

/// An elementary abelian section `A/B'` with `B' = B·⟨a^p⟩`, a basis of coset
/// representatives, and the coordinates of every element of `A`.
#[derive(Clone)]
pub struct SectionBasis {
    numerator: Arc<Subgroup>,
    denominator: Arc<Subgroup>,
    reps: Vec<GroupElement>,
    coords: FxHashMap<GroupElement, Vec<u8>>,
}

impl fmt::Debug for SectionBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SectionBasis(|A| = {}, |B'| = {}, dim {})",
            self.numerator.order(),
            self.denominator.order(),
            self.dim()
        )
    }
}

impl SectionBasis {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
    pub fn reps(&self) -> &[GroupElement] {
        &self.reps
    }
    pub fn numerator(&self) -> &Arc<Subgroup> {
        &self.numerator
    }
    /// The (possibly enlarged) denominator `B'`.
    pub fn denominator(&self) -> &Arc<Subgroup> {
        &self.denominator
    }

    /// Coordinates of the coset `aB'` for `a ∈ A`.
    pub fn coordinates(&self, a: &GroupElement) -> Option<&[u8]> {
        self.coords.get(a).map(|v| v.as_slice())
    }

    /// `∏ reps_i^{c_i}` in basis order.
    pub fn element(&self, c: &[u8]) -> GroupElement {
        let space = self.numerator.space();
        let mut acc = space.identity();
        for (r, &e) in self.reps.iter().zip(c) {
            acc = space.mul(&acc, &space.pow(r, e as u64));
        }
        acc
    }

    /// The least element (row-major order) of the coset `aB'`.
    pub fn coset_canonical(&self, a: &GroupElement) -> GroupElement {
        let space = self.numerator.space();
        self.denominator
            .elements()
            .map(|b| space.mul(a, b))
            .min()
            .expect("nonempty subgroup")
    }
}

/// Builds the `Z_p`-structure on `A/B`. Requires `B ⊴ A` and `A/B` abelian.
pub fn section_basis(a: &Arc<Subgroup>, b: &Arc<Subgroup>, cap: usize) -> Result<SectionBasis> {
    let space = a.space();
    if !b.is_subgroup_of(a) || !b.is_normalized_by(a.generators()) {
        return Err(Error::NotNormal("section denominator".into()));
    }
    for x in a.generators() {
        for y in a.generators() {
            if !b.contains(&space.commutator(x, y)) {
                return Err(Error::NotAbelianSection);
            }
        }
    }
    // A/B is abelian, so A^p B / B is generated by p-th powers of generators.
    let mut denom = (**b).clone();
    for x in a.generators() {
        denom.extend(&space.pow(x, space.p as u64), cap)?;
    }
    let denominator = Arc::new(denom);
    let mut h = (*denominator).clone();
    let mut reps = Vec::new();
    if h.order() < a.order() {
        for x in a.sorted_elements() {
            if !h.contains(&x) {
                h.extend(&x, cap)?;
                reps.push(x);
                if h.order() == a.order() {
                    break;
                }
            }
        }
    }
    let mut section = SectionBasis {
        numerator: a.clone(),
        denominator: denominator.clone(),
        reps,
        coords: FxHashMap::default(),
    };
    let k = section.dim();
    let p = space.p as u8;
    let mut c = vec![0u8; k];
    loop {
        let r = section.element(&c);
        for bb in denominator.elements() {
            section.coords.insert(space.mul(&r, bb), c.clone());
        }
        // odometer increment
        let mut i = 0;
        while i < k {
            c[i] += 1;
            if c[i] < p {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    debug_assert_eq!(section.coords.len(), a.order());
    Ok(section)
}

pub type SubId = usize;

/// Interned normal subgroups of one group with cached commutators, joins and
/// inclusions. Used by filter generation, where the same few subgroups are
/// combined many times.
pub struct Lattice {
    group: Arc<UnipotentGroup>,
    subs: Vec<Arc<Subgroup>>,
    by_digest: FxHashMap<(usize, u64), Vec<SubId>>,
    comm: FxHashMap<(SubId, SubId), SubId>,
    joins: FxHashMap<(SubId, SubId), SubId>,
    le: FxHashMap<(SubId, SubId), bool>,
}

impl Lattice {
    pub fn new(group: Arc<UnipotentGroup>) -> Self {
        let mut l = Lattice {
            group: group.clone(),
            subs: vec![],
            by_digest: FxHashMap::default(),
            comm: FxHashMap::default(),
            joins: FxHashMap::default(),
            le: FxHashMap::default(),
        };
        l.intern(Arc::new(group.trivial()));
        l.intern(group.whole().clone());
        l
    }

    pub fn group(&self) -> &Arc<UnipotentGroup> {
        &self.group
    }

    pub const TRIVIAL: SubId = 0;
    pub const WHOLE: SubId = 1;

    pub fn intern(&mut self, h: Arc<Subgroup>) -> SubId {
        let key = (h.order(), h.digest);
        if let Some(ids) = self.by_digest.get(&key) {
            for &id in ids {
                if *self.subs[id] == *h {
                    return id;
                }
            }
        }
        let id = self.subs.len();
        self.subs.push(h);
        self.by_digest.entry(key).or_default().push(id);
        id
    }

    pub fn get(&self, id: SubId) -> &Arc<Subgroup> {
        &self.subs[id]
    }

    /// Whether `a ≤ b`.
    pub fn le(&mut self, a: SubId, b: SubId) -> bool {
        if a == b || a == Self::TRIVIAL || b == Self::WHOLE {
            return true;
        }
        if let Some(&r) = self.le.get(&(a, b)) {
            return r;
        }
        let r = self.subs[a].is_subgroup_of(&self.subs[b]);
        self.le.insert((a, b), r);
        r
    }

    pub fn commutator(&mut self, a: SubId, b: SubId) -> Result<SubId> {
        if a == Self::TRIVIAL || b == Self::TRIVIAL {
            return Ok(Self::TRIVIAL);
        }
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.comm.get(&key) {
            return Ok(r);
        }
        let h = commutator_subgroup(&self.subs[a], &self.subs[b], self.group.cap())?;
        let r = self.intern(Arc::new(h));
        self.comm.insert(key, r);
        Ok(r)
    }

    pub fn join(&mut self, a: SubId, b: SubId) -> Result<SubId> {
        if self.le(a, b) {
            return Ok(b);
        }
        if self.le(b, a) {
            return Ok(a);
        }
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.joins.get(&key) {
            return Ok(r);
        }
        let h = join(&self.subs[a], &self.subs[b], self.group.cap())?;
        let r = self.intern(Arc::new(h));
        self.joins.insert(key, r);
        Ok(r)
    }

    pub fn join_all(&mut self, ids: impl IntoIterator<Item = SubId>) -> Result<SubId> {
        let mut ids: Vec<SubId> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        // largest first keeps most joins trivial inclusions
        ids.sort_by_key(|&i| std::cmp::Reverse(self.subs[i].order()));
        let mut acc = Self::TRIVIAL;
        for id in ids {
            acc = self.join(acc, id)?;
        }
        Ok(acc)
    }

    pub fn is_normal(&mut self, a: SubId) -> bool {
        self.group.is_normal(&self.subs[a].clone())
    }
}
