//! Finite Abelian groups presented as products of cyclic factors.
//!
//! Elements are addressed by their index in the lexicographic order of residue
//! tuples (first coordinate most significant), so index order and coordinate
//! order agree and every table over a group is a plain `Vec` indexed by element.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snf::{smith, unimodular_inverse, Matrix};

/// Default bound on the order of any group the library will materialize.
pub const DEFAULT_ORDER_BOUND: usize = 1_000_000;

/// Residue tuple of an element, one coordinate per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u64>);

impl fmt::Display for GroupElement {
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

impl GroupElement {
    /// Coordinates joined by commas, the key format of JSON value tables.
    pub fn key(&self) -> String {
        self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    order: usize,
    strides: Vec<usize>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        Self::with_bound(factors, DEFAULT_ORDER_BOUND)
    }

    pub fn with_bound(factors: Vec<u64>, bound: usize) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::MalformedGroup("cyclic factor of order 0".into()));
        }
        let mut order: usize = 1;
        for &n in &factors {
            order = order.checked_mul(n as usize).filter(|&o| o <= bound).ok_or_else(|| Error::Budget {
                what: format!("group order of {factors:?}"),
                limit: bound as u64,
                partial: order as u64,
            })?;
        }
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        Ok(FiniteAbelianGroup { factors, order, strides })
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(vec![n]).expect("cyclic group within bound")
    }

    pub fn trivial() -> Self {
        Self::new(vec![]).expect("trivial group")
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Direct product; the factors of `other` are appended after those of `self`.
    pub fn product(&self, other: &FiniteAbelianGroup) -> Result<Self> {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        Self::new(f)
    }

    /// Index of `(a, b)` in `self × other` (see [`FiniteAbelianGroup::product`]).
    pub fn pair_index(&self, other: &FiniteAbelianGroup, a: usize, b: usize) -> usize {
        a * other.order + b
    }

    /// Splits an index of `self × other` into its two components.
    pub fn split_pair(&self, other: &FiniteAbelianGroup, z: usize) -> (usize, usize) {
        let _ = self;
        (z / other.order, z % other.order)
    }

    #[inline]
    pub fn coord(&self, x: usize, i: usize) -> u64 {
        ((x / self.strides[i]) % self.factors[i] as usize) as u64
    }

    pub fn coords(&self, x: usize) -> GroupElement {
        GroupElement((0..self.rank()).map(|i| self.coord(x, i)).collect())
    }

    pub fn index(&self, e: &GroupElement) -> Result<usize> {
        if e.0.len() != self.rank() {
            return Err(Error::MalformedElement(format!(
                "{e} has {} coordinates, group has {} factors",
                e.0.len(),
                self.rank()
            )));
        }
        let mut idx = 0;
        for (i, (&c, &n)) in e.0.iter().zip(&self.factors).enumerate() {
            if c >= n {
                return Err(Error::MalformedElement(format!("coordinate {i} of {e} out of range 0..{n}")));
            }
            idx += c as usize * self.strides[i];
        }
        Ok(idx)
    }

    /// Index of the element with the given integer coordinates reduced modulo the factors.
    pub fn index_of_ints(&self, c: &[i128]) -> usize {
        c.iter().zip(&self.factors).zip(&self.strides).map(|((&v, &n), &s)| v.rem_euclid(n as i128) as usize * s).sum()
    }

    /// The `i`-th canonical generator (1 in factor `i`, 0 elsewhere).
    pub fn generator(&self, i: usize) -> usize {
        if self.factors[i] == 1 {
            0
        } else {
            self.strides[i]
        }
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        let mut r = 0;
        for i in 0..self.factors.len() {
            let n = self.factors[i] as usize;
            let s = self.strides[i];
            let c = ((a / s) % n + (b / s) % n) % n;
            r += c * s;
        }
        r
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        let mut r = 0;
        for i in 0..self.factors.len() {
            let n = self.factors[i] as usize;
            let s = self.strides[i];
            let c = (n - (a / s) % n) % n;
            r += c * s;
        }
        r
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `k · a` for any integer `k`.
    pub fn mul(&self, k: i64, a: usize) -> usize {
        let mut r = 0;
        for i in 0..self.factors.len() {
            let n = self.factors[i] as i128;
            let s = self.strides[i];
            let c = ((a / s) as i128 % n) * k as i128;
            r += c.rem_euclid(n) as usize * s;
        }
        r
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut o = 1u64;
        for i in 0..self.rank() {
            let n = self.factors[i];
            let c = self.coord(a, i);
            let oi = n / gcd(n, c);
            o = lcm(o, oi);
        }
        o
    }

    /// Least common multiple of the factors.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |a, &n| lcm(a, n))
    }

    /// True when `n · x = 0` for all `x`; `n = 0` always holds.
    pub fn has_exponent_dividing(&self, n: u64) -> bool {
        n == 0 || n.is_multiple_of(self.exponent())
    }

    /// Invariant factors `d_1 | d_2 | ...` (all `> 1`) of the group.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let k = self.rank();
        let m: Matrix =
            (0..k).map(|i| (0..k).map(|j| if i == j { self.factors[i] as i128 } else { 0 }).collect()).collect();
        let s = smith(&m, k);
        s.diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect()
    }

    /// Counts of elements by order, sorted by order; an isomorphism invariant.
    pub fn order_profile(&self) -> Vec<(u64, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for x in self.elements() {
            *counts.entry(self.element_order(x)).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn is_isomorphic_to(&self, other: &FiniteAbelianGroup) -> bool {
        self.order == other.order && self.invariant_factors() == other.invariant_factors()
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    crate::rational::gcd_u64(a, b)
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// A subgroup of a finite Abelian group, stored as its sorted element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    elements: Vec<usize>,
    generators: Vec<usize>,
}

impl Subgroup {
    /// Closure of `gens` under addition, computed by breadth-first search from 0.
    pub fn generated_by(parent: &FiniteAbelianGroup, gens: &[usize]) -> Self {
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect::<BTreeSet<_>>().into_iter().collect();
        let mut seen = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = parent.add(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Subgroup { parent: parent.clone(), elements: seen.into_iter().collect(), generators: gens }
    }

    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        Self::generated_by(parent, &[])
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        let gens: Vec<usize> = (0..parent.rank()).map(|i| parent.generator(i)).collect();
        Self::generated_by(parent, &gens)
    }

    /// Checks that `elements` is closed under the group operations.
    pub fn from_elements(parent: &FiniteAbelianGroup, elements: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if let Some(&x) = set.iter().find(|&&x| x >= parent.order()) {
            return Err(Error::MalformedElement(format!("index {x} out of range")));
        }
        if !set.contains(&0) {
            return Err(Error::InvalidSubgroup("does not contain 0".into()));
        }
        for &x in &set {
            if !set.contains(&parent.neg(x)) {
                return Err(Error::InvalidSubgroup(format!("not closed under negation at {}", parent.coords(x))));
            }
            for &y in &set {
                if !set.contains(&parent.add(x, y)) {
                    return Err(Error::InvalidSubgroup(format!(
                        "not closed: {} + {}",
                        parent.coords(x),
                        parent.coords(y)
                    )));
                }
            }
        }
        // greedy generating set
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial(parent);
        for &x in &set {
            if !span.contains(x) {
                gens.push(x);
                span = Subgroup::generated_by(parent, &gens);
            }
        }
        Ok(span)
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn position(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.elements.iter().all(|&x| other.contains(x))
    }

    /// The subgroup as a canonical cyclic-factor group together with its
    /// embedding into the parent.
    pub fn to_group(&self) -> (FiniteAbelianGroup, GroupHom) {
        let g = &self.parent;
        let k = g.rank();
        let t = self.generators.len();
        if t == 0 {
            let c = FiniteAbelianGroup::trivial();
            let e = GroupHom::from_generator_images(&c, g, &[]).expect("trivial embedding");
            return (c, e);
        }
        // left kernel of [S; diag(n)] gives the relation lattice among generators
        let mut m: Matrix =
            self.generators.iter().map(|&s| g.coords(s).0.iter().map(|&c| c as i128).collect()).collect();
        for j in 0..k {
            m.push((0..k).map(|i| if i == j { g.factors[j] as i128 } else { 0 }).collect());
        }
        let s = smith(&m, k);
        let rank = s.diag.iter().filter(|&&d| d != 0).count();
        let kernel: Matrix = (rank..m.len()).map(|r| s.u[r][..t].to_vec()).collect();
        let s2 = smith(&kernel, t);
        assert_eq!(
            s2.diag.iter().filter(|&&d| d != 0).count(),
            t,
            "relation lattice of a finite subgroup has full rank"
        );
        let vinv = unimodular_inverse(&s2.v);
        let mut factors = Vec::new();
        let mut images = Vec::new();
        for (i, &d) in s2.diag.iter().enumerate() {
            if d > 1 {
                factors.push(d as u64);
                let mut img = 0usize;
                for (j, &gen) in self.generators.iter().enumerate() {
                    img = g.add(img, g.mul((vinv[i][j] % d) as i64, gen));
                }
                images.push(img);
            }
        }
        let c = FiniteAbelianGroup::new(factors).expect("subgroup fits the order bound");
        let e = GroupHom::from_generator_images(&c, g, &images).expect("canonical embedding");
        debug_assert!(e.is_injective());
        (c, e)
    }
}

/// Smallest subgroup of `g` containing `gens`.
pub fn subgroup_generated(g: &FiniteAbelianGroup, gens: &[GroupElement]) -> Result<Subgroup> {
    let idx = gens.iter().map(|e| g.index(e)).collect::<Result<Vec<_>>>()?;
    Ok(Subgroup::generated_by(g, &idx))
}

/// All subgroups of `g`, ordered by size and then by element list.
pub fn all_subgroups(g: &FiniteAbelianGroup) -> Vec<Subgroup> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut frontier = vec![Subgroup::trivial(g)];
    found.insert(vec![0]);
    while let Some(s) = frontier.pop() {
        for x in g.elements() {
            if s.contains(x) {
                continue;
            }
            let mut gens = s.generators.clone();
            gens.push(x);
            let t = Subgroup::generated_by(g, &gens);
            if found.insert(t.elements.clone()) {
                frontier.push(t);
            }
        }
        out.push(s);
    }
    out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    out
}

/// A group homomorphism given by its full table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    table: Vec<usize>,
}

impl GroupHom {
    /// Builds the homomorphism sending the `i`-th canonical generator of `source` to `images[i]`.
    pub fn from_generator_images(
        source: &FiniteAbelianGroup,
        target: &FiniteAbelianGroup,
        images: &[usize],
    ) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::InvalidHom(format!("{} generator images for {} factors", images.len(), source.rank())));
        }
        for (i, &img) in images.iter().enumerate() {
            if img >= target.order() {
                return Err(Error::MalformedElement(format!("image index {img} out of range")));
            }
            if target.mul(source.factors[i] as i64, img) != 0 {
                return Err(Error::InvalidHom(format!(
                    "image {} of generator {i} has order not dividing {}",
                    target.coords(img),
                    source.factors[i]
                )));
            }
        }
        let mut table = vec![0usize; source.order()];
        // x = x' + e_last, processed in index order so x' is already known
        for x in 1..source.order() {
            let i = (0..source.rank())
                .rev()
                .find(|&i| source.coord(x, i) != 0)
                .expect("nonzero element has a nonzero coordinate");
            let prev = source.sub(x, source.generator(i));
            table[x] = target.add(table[prev], images[i]);
        }
        Ok(GroupHom { source: source.clone(), target: target.clone(), table })
    }

    /// Validates additivity of an explicit table.
    pub fn from_table(source: &FiniteAbelianGroup, target: &FiniteAbelianGroup, table: Vec<usize>) -> Result<Self> {
        if table.len() != source.order() || table.iter().any(|&y| y >= target.order()) {
            return Err(Error::InvalidHom("table has wrong shape".into()));
        }
        let gens: Vec<usize> = (0..source.rank()).map(|i| source.generator(i)).collect();
        let h = GroupHom::from_generator_images(source, target, &gens.iter().map(|&g| table[g]).collect::<Vec<_>>())?;
        if h.table != table {
            return Err(Error::InvalidHom("table is not additive".into()));
        }
        Ok(h)
    }

    pub fn identity(g: &FiniteAbelianGroup) -> Self {
        GroupHom { source: g.clone(), target: g.clone(), table: g.elements().collect() }
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn generator_images(&self) -> Vec<usize> {
        (0..self.source.rank()).map(|i| self.table[self.source.generator(i)]).collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.target != other.source {
            return Err(Error::InvalidHom("composition of incompatible homomorphisms".into()));
        }
        Ok(GroupHom {
            source: self.source.clone(),
            target: other.target.clone(),
            table: self.table.iter().map(|&y| other.table[y]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        self.table.iter().filter(|&&y| y == 0).count() == 1
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.order()];
        for &y in &self.table {
            hit[y] = true;
        }
        hit.into_iter().all(|b| b)
    }

    pub fn kernel(&self) -> Subgroup {
        let els: Vec<usize> = self.source.elements().filter(|&x| self.table[x] == 0).collect();
        Subgroup::from_elements(&self.source, &els).expect("kernel is a subgroup")
    }

    pub fn image(&self) -> Subgroup {
        let imgs: Vec<usize> = self.generator_images();
        Subgroup::generated_by(&self.target, &imgs)
    }

    /// Checks `h(x + y) = h(x) + h(y)` for every pair.
    pub fn is_additive_exhaustive(&self) -> bool {
        self.source.elements().all(|x| {
            self.source
                .elements()
                .all(|y| self.table[self.source.add(x, y)] == self.target.add(self.table[x], self.table[y]))
        })
    }
}

/// A homomorphism defined on a subgroup of its source group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupHom {
    domain: Subgroup,
    target: FiniteAbelianGroup,
    /// images aligned with `domain.elements()`
    images: Vec<usize>,
}

impl SubgroupHom {
    pub fn new(domain: &Subgroup, target: &FiniteAbelianGroup, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain.order() || images.iter().any(|&y| y >= target.order()) {
            return Err(Error::InvalidHom("image list has wrong shape".into()));
        }
        let h = SubgroupHom { domain: domain.clone(), target: target.clone(), images };
        let g = domain.parent();
        for (i, &x) in domain.elements().iter().enumerate() {
            for (j, &y) in domain.elements().iter().enumerate() {
                let s = h.apply(g.add(x, y)).expect("closed");
                if s != target.add(h.images[i], h.images[j]) {
                    return Err(Error::InvalidHom(format!("not additive at {} + {}", g.coords(x), g.coords(y))));
                }
            }
        }
        Ok(h)
    }

    pub fn restrict(h: &GroupHom, domain: &Subgroup) -> Result<Self> {
        if domain.parent() != h.source() {
            return Err(Error::InvalidHom("restriction to a subgroup of another group".into()));
        }
        Ok(SubgroupHom {
            domain: domain.clone(),
            target: h.target.clone(),
            images: domain.elements().iter().map(|&x| h.apply(x)).collect(),
        })
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.domain.position(x).map(|i| self.images[i])
    }

    /// Pairs `(x, h(x))` over the domain.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.domain.elements().iter().copied().zip(self.images.iter().copied())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> Result<SubgroupHom> {
        if &self.target != other.source() {
            return Err(Error::InvalidHom("composition of incompatible homomorphisms".into()));
        }
        Ok(SubgroupHom {
            domain: self.domain.clone(),
            target: other.target.clone(),
            images: self.images.iter().map(|&y| other.apply(y)).collect(),
        })
    }
}

/// Lexicographic stream of all homomorphisms `source → target`.
pub struct HomIter {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    candidates: Vec<Vec<usize>>,
    cursor: Option<Vec<usize>>,
}

impl Iterator for HomIter {
    type Item = GroupHom;

    fn next(&mut self) -> Option<GroupHom> {
        let cur = self.cursor.as_mut()?;
        let images: Vec<usize> = cur.iter().zip(&self.candidates).map(|(&i, c)| c[i]).collect();
        // advance odometer, last generator fastest
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.cursor = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < self.candidates[pos].len() {
                break;
            }
            cur[pos] = 0;
        }
        Some(
            GroupHom::from_generator_images(&self.source, &self.target, &images)
                .expect("candidates respect generator orders"),
        )
    }
}

/// Elements of `g` whose order divides `n`.
pub fn elements_killed_by(g: &FiniteAbelianGroup, n: u64) -> Vec<usize> {
    g.elements().filter(|&x| g.mul(n as i64, x) == 0).collect()
}

/// Every homomorphism `h → g`, each exactly once, in lexicographic order of
/// generator images. Fails when their number exceeds `budget`.
pub fn enumerate_homs(h: &FiniteAbelianGroup, g: &FiniteAbelianGroup, budget: u64) -> Result<HomIter> {
    let candidates: Vec<Vec<usize>> = h.factors().iter().map(|&n| elements_killed_by(g, n)).collect();
    let mut count: u64 = 1;
    for c in &candidates {
        count = count.saturating_mul(c.len() as u64);
    }
    if count > budget {
        return Err(Error::Budget { what: "homomorphism enumeration".into(), limit: budget, partial: 0 });
    }
    Ok(HomIter { source: h.clone(), target: g.clone(), cursor: Some(vec![0; candidates.len()]), candidates })
}

/// Number of homomorphisms `h → g` without enumerating them.
pub fn count_homs(h: &FiniteAbelianGroup, g: &FiniteAbelianGroup) -> u64 {
    h.factors().iter().map(|&n| elements_killed_by(g, n).len() as u64).product()
}

/// Quotient `g / k` in canonical cyclic-factor form with its projection.
pub fn quotient(g: &FiniteAbelianGroup, k: &Subgroup) -> Result<(FiniteAbelianGroup, GroupHom)> {
    if k.parent() != g {
        return Err(Error::InvalidSubgroup("subgroup of a different group".into()));
    }
    let r = g.rank();
    let mut m: Matrix =
        (0..r).map(|i| (0..r).map(|j| if i == j { g.factors[i] as i128 } else { 0 }).collect()).collect();
    for &s in k.generators() {
        m.push(g.coords(s).0.iter().map(|&c| c as i128).collect());
    }
    let s = smith(&m, r);
    let keep: Vec<usize> = (0..r).filter(|&i| s.diag[i] > 1).collect();
    let q = FiniteAbelianGroup::new(keep.iter().map(|&i| s.diag[i] as u64).collect())?;
    let mut table = Vec::with_capacity(g.order());
    for x in g.elements() {
        let c = g.coords(x);
        let y: Vec<i128> = keep.iter().map(|&col| (0..r).map(|j| c.0[j] as i128 * s.v[j][col]).sum::<i128>()).collect();
        table.push(q.index_of_ints(&y));
    }
    let pi = GroupHom { source: g.clone(), target: q.clone(), table };
    debug_assert_eq!(pi.kernel().elements(), k.elements());
    if q.order() * k.order() != g.order() {
        return Err(Error::Postcondition("|G/K|·|K| != |G|".into()));
    }
    Ok((q, pi))
}

/// Automorphisms of `g` (bijective endomorphisms).
pub fn automorphisms(g: &FiniteAbelianGroup, budget: u64) -> Result<Vec<GroupHom>> {
    Ok(enumerate_homs(g, g, budget)?.filter(|h| h.is_injective()).collect())
}

/// Invariant-factor shapes `[d_1, ..., d_k]` with `d_i | d_{i+1}`, all `> 1`,
/// of every Abelian group of order at most `max_order`; when `exponent != 0`
/// only shapes with `d_k | exponent` are listed.
pub fn abelian_group_shapes(max_order: usize, exponent: u64) -> Vec<Vec<u64>> {
    fn rec(acc: &mut Vec<u64>, order: u64, max: u64, exponent: u64, out: &mut Vec<Vec<u64>>) {
        if acc.last().is_none_or(|&d| exponent == 0 || exponent.is_multiple_of(d)) {
            out.push(acc.clone());
        }
        let last = acc.last().copied().unwrap_or(1);
        let mut d = last.max(2);
        while order * d <= max {
            if d % last == 0 {
                acc.push(d);
                rec(acc, order * d, max, exponent, out);
                acc.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, max_order as u64, exponent, &mut out);
    out.sort_by(|a, b| {
        let oa: u64 = a.iter().product();
        let ob: u64 = b.iter().product();
        (oa, a).cmp(&(ob, b))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: &[u64]) -> GroupElement {
        GroupElement(v.to_vec())
    }

    #[test]
    fn subgroup_of_z4_generated_by_two() {
        let g = FiniteAbelianGroup::cyclic(4);
        let s = subgroup_generated(&g, &[el(&[2])]).unwrap();
        assert_eq!(s.elements(), &[0, 2]);
    }

    #[test]
    fn subgroup_of_z2_z4() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let s = subgroup_generated(&g, &[el(&[1, 1])]).unwrap();
        let coords: BTreeSet<GroupElement> = s.elements().iter().map(|&x| g.coords(x)).collect();
        let expected: BTreeSet<GroupElement> = [[0, 0], [1, 1], [0, 2], [1, 3]].iter().map(|c| el(c)).collect();
        assert_eq!(coords, expected);
    }

    #[test]
    fn empty_generators_give_trivial() {
        let g = FiniteAbelianGroup::cyclic(3);
        assert_eq!(subgroup_generated(&g, &[]).unwrap().elements(), &[0]);
    }

    #[test]
    fn malformed_generator_rejected() {
        let g = FiniteAbelianGroup::cyclic(3);
        assert!(matches!(subgroup_generated(&g, &[el(&[3])]), Err(Error::MalformedElement(_))));
        assert!(matches!(subgroup_generated(&g, &[el(&[1, 0])]), Err(Error::MalformedElement(_))));
    }

    #[test]
    fn non_closed_subset_rejected() {
        let g = FiniteAbelianGroup::cyclic(4);
        assert!(matches!(Subgroup::from_elements(&g, &[0, 1]), Err(Error::InvalidSubgroup(_))));
    }

    #[test]
    fn quotient_z4_by_two() {
        let g = FiniteAbelianGroup::cyclic(4);
        let k = Subgroup::generated_by(&g, &[2]);
        let (q, pi) = quotient(&g, &k).unwrap();
        assert_eq!(q.factors(), &[2]);
        assert_eq!(pi.table(), &[0, 1, 0, 1]);
    }

    #[test]
    fn quotient_klein_by_diagonal() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let k = subgroup_generated(&g, &[el(&[1, 1])]).unwrap();
        let (q, pi) = quotient(&g, &k).unwrap();
        assert_eq!(q.factors(), &[2]);
        assert_eq!(pi.kernel().elements(), k.elements());
    }

    #[test]
    fn quotient_z2_z4_by_one_two() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let k = subgroup_generated(&g, &[el(&[1, 2])]).unwrap();
        let (q, pi) = quotient(&g, &k).unwrap();
        assert_eq!(q.factors(), &[4]);
        assert!(pi.is_surjective());
        assert_eq!(pi.kernel().elements(), k.elements());
        assert!(pi.is_additive_exhaustive());
    }

    #[test]
    fn hom_counts() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let z3 = FiniteAbelianGroup::cyclic(3);
        let z4 = FiniteAbelianGroup::cyclic(4);
        let k4 = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let homs: Vec<GroupHom> = enumerate_homs(&z2, &z4, 100).unwrap().collect();
        assert_eq!(homs.len(), 2);
        assert_eq!(homs[0].table(), &[0, 0]);
        assert_eq!(homs[1].table(), &[0, 2]);
        assert_eq!(enumerate_homs(&z3, &z4, 100).unwrap().count(), 1);
        assert_eq!(enumerate_homs(&z2, &k4, 100).unwrap().count(), 4);
        assert!(matches!(enumerate_homs(&k4, &k4, 3), Err(Error::Budget { .. })));
    }

    #[test]
    fn subgroup_to_group_canonical() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let s = subgroup_generated(&g, &[el(&[1, 1])]).unwrap();
        let (c, e) = s.to_group();
        assert_eq!(c.factors(), &[4]);
        let mut imgs: Vec<usize> = e.table().to_vec();
        imgs.sort();
        assert_eq!(imgs, s.elements());
        let whole = Subgroup::whole(&g);
        let (c2, _) = whole.to_group();
        assert_eq!(c2.factors(), &[2, 4]);
    }

    #[test]
    fn shapes_up_to_eight() {
        let shapes = abelian_group_shapes(8, 0);
        let expected: Vec<Vec<u64>> = vec![
            vec![],
            vec![2],
            vec![3],
            vec![2, 2],
            vec![4],
            vec![5],
            vec![6],
            vec![7],
            vec![2, 2, 2],
            vec![2, 4],
            vec![8],
        ];
        assert_eq!(shapes, expected);
        assert_eq!(abelian_group_shapes(4, 2), vec![vec![], vec![2], vec![2, 2]]);
    }

    #[test]
    fn all_subgroups_of_klein() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(all_subgroups(&g).len(), 5);
        let z8 = FiniteAbelianGroup::cyclic(8);
        assert_eq!(all_subgroups(&z8).len(), 4);
    }
}
