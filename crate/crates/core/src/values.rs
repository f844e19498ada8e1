//! Value and semivalue tables, cost completion, induced values and isometry search.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{AxiomViolation, Error, Result};
use crate::group::{FiniteAbelianGroup, GroupHom, Subgroup, SubgroupHom};
use crate::rational::{common_scale, unscale, Extended, Rational};

/// Upper bound class of a valued group: `p ≤ 1` or unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cap {
    One,
    Infinite,
}

impl Cap {
    pub fn bound(self) -> Option<Rational> {
        match self {
            Cap::One => Some(Rational::one()),
            Cap::Infinite => None,
        }
    }

    pub fn admits(self, v: &Rational) -> bool {
        match self {
            Cap::One => *v <= Rational::one(),
            Cap::Infinite => true,
        }
    }
}

impl fmt::Display for Cap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cap::One => "1",
            Cap::Infinite => "inf",
        })
    }
}

impl FromStr for Cap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "1/1" => Ok(Cap::One),
            "inf" => Ok(Cap::Infinite),
            other => Err(Error::Parse(format!("cap must be \"1\" or \"inf\", got {other:?}"))),
        }
    }
}

impl Serialize for Cap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite group with a value in the class `𝔊_r(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedGroup {
    group: FiniteAbelianGroup,
    value: Vec<Rational>,
    cap: Cap,
    exponent: u64,
}

/// A group with a semivalue: `p(0) = 0`, symmetric and subadditive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semivalue {
    group: FiniteAbelianGroup,
    value: Vec<Rational>,
}

/// A symmetric cost table with `c(0) = 0`; entries may be `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostFunction {
    group: FiniteAbelianGroup,
    cost: Vec<Extended>,
}

/// Output of [`complete_cost`]: the completed table and the elements it cannot reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub group: FiniteAbelianGroup,
    pub values: Vec<Extended>,
    pub unreachable: Vec<usize>,
}

fn check_table_len(g: &FiniteAbelianGroup, n: usize) -> Result<()> {
    if n != g.order() {
        return Err(Error::MalformedGroup(format!("table has {n} entries, group has {} elements", g.order())));
    }
    Ok(())
}

/// First `(x, y)` with `p(x + y) > p(x) + p(y)`, scanning `x` then `y` in index order.
fn triangle_witness(g: &FiniteAbelianGroup, p: &[Rational]) -> Option<(usize, usize)> {
    if let Some((ints, _)) = common_scale(p) {
        for x in g.elements() {
            for y in g.elements() {
                if ints[g.add(x, y)] > ints[x] + ints[y] {
                    return Some((x, y));
                }
            }
        }
        return None;
    }
    for x in g.elements() {
        for y in g.elements() {
            if p[g.add(x, y)] > &p[x] + &p[y] {
                return Some((x, y));
            }
        }
    }
    None
}

fn semivalue_axioms(g: &FiniteAbelianGroup, p: &[Rational]) -> Result<()> {
    check_table_len(g, p.len())?;
    if !p[0].is_zero() {
        return Err(Error::Axiom(AxiomViolation::NonzeroAtZero(p[0].clone())));
    }
    if let Some(x) = g.elements().find(|&x| p[x].is_negative()) {
        return Err(Error::Axiom(AxiomViolation::Negative(g.coords(x), p[x].clone())));
    }
    Ok(())
}

fn symmetry_and_triangle(g: &FiniteAbelianGroup, p: &[Rational]) -> Result<()> {
    for x in g.elements() {
        let nx = g.neg(x);
        if p[x] != p[nx] {
            return Err(Error::Axiom(AxiomViolation::Symmetry(g.coords(x), g.coords(nx))));
        }
    }
    if let Some((x, y)) = triangle_witness(g, p) {
        return Err(Error::Axiom(AxiomViolation::Triangle(g.coords(x), g.coords(y))));
    }
    Ok(())
}

/// Checks (V1)–(V3), the cap and the exponent, reporting the first violation with a witness.
pub fn validate_value(g: &FiniteAbelianGroup, table: Vec<Rational>, cap: Cap, exponent: u64) -> Result<ValuedGroup> {
    semivalue_axioms(g, &table)?;
    if let Some(x) = g.elements().skip(1).find(|&x| table[x].is_zero()) {
        return Err(Error::Axiom(AxiomViolation::ZeroOffIdentity(g.coords(x))));
    }
    symmetry_and_triangle(g, &table)?;
    if let Some(x) = g.elements().find(|&x| !cap.admits(&table[x])) {
        return Err(Error::Axiom(AxiomViolation::Cap(g.coords(x), table[x].clone())));
    }
    if exponent != 0 {
        if let Some(i) = (0..g.rank()).find(|&i| g.mul(exponent as i64, g.generator(i)) != 0) {
            return Err(Error::Axiom(AxiomViolation::Exponent(g.coords(g.generator(i)), exponent)));
        }
    }
    Ok(ValuedGroup { group: g.clone(), value: table, cap, exponent })
}

impl ValuedGroup {
    pub fn new(g: &FiniteAbelianGroup, table: Vec<Rational>, cap: Cap, exponent: u64) -> Result<Self> {
        validate_value(g, table, cap, exponent)
    }

    /// Trusted constructor for tables produced by operations that already
    /// guarantee the axioms; checked in debug builds.
    pub(crate) fn from_trusted(g: &FiniteAbelianGroup, table: Vec<Rational>, cap: Cap, exponent: u64) -> Self {
        if cfg!(debug_assertions) {
            if let Err(e) = validate_value(g, table.clone(), cap, exponent) {
                panic!("internal construction produced an invalid value: {e}");
            }
        }
        ValuedGroup { group: g.clone(), value: table, cap, exponent }
    }

    pub fn trivial(cap: Cap, exponent: u64) -> Self {
        ValuedGroup { group: FiniteAbelianGroup::trivial(), value: vec![Rational::zero()], cap, exponent }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn value(&self, x: usize) -> &Rational {
        &self.value[x]
    }

    pub fn values(&self) -> &[Rational] {
        &self.value
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Reinterprets the same table in another class, revalidating.
    pub fn with_class(self, cap: Cap, exponent: u64) -> Result<Self> {
        validate_value(&self.group, self.value, cap, exponent)
    }

    /// Distance `p(x − y)`.
    pub fn dist(&self, x: usize, y: usize) -> &Rational {
        &self.value[self.group.sub(x, y)]
    }

    pub fn diameter(&self) -> Rational {
        self.value.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// True when every value is a multiple of `1/den`.
    pub fn is_grid_valued(&self, den: u64) -> bool {
        self.value.iter().all(|v| v.is_multiple_of(den))
    }

    pub fn as_semivalue(&self) -> Semivalue {
        Semivalue { group: self.group.clone(), value: self.value.clone() }
    }

    /// The subgroup `s` as a canonical valued group, with its isometric embedding.
    pub fn restrict(&self, s: &Subgroup) -> (ValuedGroup, GroupHom) {
        let (c, e) = s.to_group();
        let table = c.elements().map(|x| self.value[e.apply(x)].clone()).collect();
        (ValuedGroup::from_trusted(&c, table, self.cap, self.exponent), e)
    }

    /// First element where `h: self → target` fails to preserve values.
    pub fn isometry_defect(&self, h: &GroupHom, target: &ValuedGroup) -> Option<usize> {
        self.group.elements().find(|&x| target.value[h.apply(x)] != self.value[x])
    }

    pub fn is_isometric_embedding(&self, h: &GroupHom, target: &ValuedGroup) -> bool {
        h.source() == &self.group && h.target() == &target.group && self.isometry_defect(h, target).is_none()
    }

    /// Sorted multiset of values; an isometry invariant.
    pub fn value_multiset(&self) -> Vec<Rational> {
        let mut v = self.value.clone();
        v.sort();
        v
    }
}

/// Sup-distance `max_x q(f(x) − g(x))` between two maps into a valued group.
pub fn sup_distance(target: &ValuedGroup, f: &[usize], g: &[usize]) -> Rational {
    f.iter().zip(g).map(|(&a, &b)| target.dist(a, b).clone()).max().unwrap_or_else(Rational::zero)
}

/// First element of the subgroup domain where `h` fails to preserve values.
pub fn subgroup_isometry_defect(source: &ValuedGroup, h: &SubgroupHom, target: &ValuedGroup) -> Option<usize> {
    h.pairs().find(|&(x, y)| source.value(x) != target.value(y)).map(|(x, _)| x)
}

impl Semivalue {
    pub fn new(g: &FiniteAbelianGroup, table: Vec<Rational>) -> Result<Self> {
        semivalue_axioms(g, &table)?;
        symmetry_and_triangle(g, &table)?;
        Ok(Semivalue { group: g.clone(), value: table })
    }

    pub(crate) fn from_trusted(g: &FiniteAbelianGroup, table: Vec<Rational>) -> Self {
        debug_assert!(Semivalue::new(g, table.clone()).is_ok(), "invalid internal semivalue");
        Semivalue { group: g.clone(), value: table }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn value(&self, x: usize) -> &Rational {
        &self.value[x]
    }

    pub fn values(&self) -> &[Rational] {
        &self.value
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.value
    }

    /// `p⁻¹(0)`, always a subgroup for a semivalue.
    pub fn zeros(&self) -> Subgroup {
        let z: Vec<usize> = self.group.elements().filter(|&x| self.value[x].is_zero()).collect();
        Subgroup::from_elements(&self.group, &z).expect("null set of a semivalue is a subgroup")
    }

    pub fn is_value(&self) -> bool {
        self.value.iter().skip(1).all(|v| !v.is_zero())
    }

    pub fn into_value(self, cap: Cap, exponent: u64) -> Result<ValuedGroup> {
        validate_value(&self.group, self.value, cap, exponent)
    }

    /// `p ∧ m`.
    pub fn capped(&self, m: &Rational) -> Semivalue {
        Semivalue { group: self.group.clone(), value: cap_table(&self.value, m) }
    }

    /// Quotient by the null subgroup; the induced table is a value.
    pub fn quotient_nulls(&self) -> (Semivalue, GroupHom) {
        let (_, pi) = crate::group::quotient(&self.group, &self.zeros()).expect("nulls form a subgroup");
        let pushed = push_value(self, &pi).expect("projection is surjective");
        (pushed, pi)
    }
}

fn cap_table(v: &[Rational], m: &Rational) -> Vec<Rational> {
    v.iter().map(|x| x.clone().min(m.clone())).collect()
}

/// Caps `p` at `r`; with `Cap::One` the result also moves to the cap-1 class.
pub fn cap_value(v: &ValuedGroup, r: Cap) -> ValuedGroup {
    match r {
        Cap::Infinite => v.clone(),
        Cap::One => ValuedGroup::from_trusted(&v.group, cap_table(&v.value, &Rational::one()), Cap::One, v.exponent),
    }
}

/// Caps `p` at an arbitrary positive rational `m`, keeping the class.
pub fn cap_value_at(v: &ValuedGroup, m: &Rational) -> Result<ValuedGroup> {
    if !m.is_positive() {
        return Err(Error::Precondition(format!("cap level {m} must be positive")));
    }
    Ok(ValuedGroup::from_trusted(&v.group, cap_table(&v.value, m), v.cap, v.exponent))
}

impl CostFunction {
    pub fn new(g: &FiniteAbelianGroup, cost: Vec<Extended>) -> Result<Self> {
        check_table_len(g, cost.len())?;
        if cost[0] != Extended::zero() {
            return Err(Error::InvalidCost(format!("c(0) = {}", cost[0])));
        }
        for x in g.elements() {
            if let Extended::Finite(v) = &cost[x] {
                if v.is_negative() {
                    return Err(Error::InvalidCost(format!("c({}) = {v} < 0", g.coords(x))));
                }
            }
            if cost[x] != cost[g.neg(x)] {
                return Err(Error::InvalidCost(format!("c({}) != c({})", g.coords(x), g.coords(g.neg(x)))));
            }
        }
        Ok(CostFunction { group: g.clone(), cost })
    }

    pub fn from_finite(g: &FiniteAbelianGroup, cost: Vec<Rational>) -> Result<Self> {
        Self::new(g, cost.into_iter().map(Extended::Finite).collect())
    }

    /// All entries `∞` except `c(0) = 0`; fill in atoms with [`CostFunction::offer`].
    pub fn empty(g: &FiniteAbelianGroup) -> Self {
        let mut cost = vec![Extended::Infinite; g.order()];
        cost[0] = Extended::zero();
        CostFunction { group: g.clone(), cost }
    }

    /// Lowers `c(x)` and `c(−x)` to `v` if that is smaller.
    pub fn offer(&mut self, x: usize, v: &Rational) {
        if x == 0 {
            return;
        }
        let nx = self.group.neg(x);
        for y in [x, nx] {
            let cand = Extended::Finite(v.clone());
            if cand < self.cost[y] {
                self.cost[y] = cand;
            }
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn cost(&self, x: usize) -> &Extended {
        &self.cost[x]
    }

    pub fn costs(&self) -> &[Extended] {
        &self.cost
    }
}

impl Completion {
    pub fn into_semivalue(self) -> Result<Semivalue> {
        if let Some(&first) = self.unreachable.first() {
            return Err(Error::Unreachable { count: self.unreachable.len(), first: self.group.coords(first) });
        }
        let values = self.values.into_iter().map(|v| v.finite().cloned().expect("reachable")).collect();
        Ok(Semivalue::from_trusted(&self.group, values))
    }
}

fn dijkstra<T, F>(g: &FiniteAbelianGroup, atoms: &[(usize, T)], zero: T, add: F) -> Vec<Option<T>>
where
    T: Ord + Clone,
    F: Fn(&T, &T) -> T,
{
    let mut dist: Vec<Option<T>> = vec![None; g.order()];
    let mut done = vec![false; g.order()];
    let mut heap = BinaryHeap::new();
    dist[0] = Some(zero.clone());
    heap.push(Reverse((zero, 0usize)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for (h, c) in atoms {
            let y = g.add(x, *h);
            if done[y] {
                continue;
            }
            let nd = add(&d, c);
            if dist[y].as_ref().is_none_or(|cur| nd < *cur) {
                dist[y] = Some(nd.clone());
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist
}

/// The largest semivalue dominated by `c`: `x ↦ min Σ c(h_j)` over all
/// decompositions `x = Σ h_j`, as shortest paths from 0 in the Cayley graph.
pub fn complete_cost(c: &CostFunction) -> Completion {
    let g = &c.group;
    let support: Vec<usize> = g.elements().skip(1).filter(|&x| c.cost[x].is_finite()).collect();
    let finite: Vec<&Rational> = support.iter().map(|&x| c.cost[x].finite().unwrap()).collect();
    let values: Vec<Extended> = match common_scale(finite.iter().copied()) {
        Some((ints, den)) => {
            let atoms: Vec<(usize, i128)> = support.iter().copied().zip(ints.into_iter().map(i128::from)).collect();
            dijkstra(g, &atoms, 0i128, |a, b| a + b)
                .into_iter()
                .map(|d| d.map_or(Extended::Infinite, |v| Extended::Finite(unscale(v, &den))))
                .collect()
        }
        None => {
            let atoms: Vec<(usize, Rational)> = support.iter().copied().zip(finite.into_iter().cloned()).collect();
            dijkstra(g, &atoms, Rational::zero(), |a, b| a + b)
                .into_iter()
                .map(|d| d.map_or(Extended::Infinite, Extended::Finite))
                .collect()
        }
    };
    let unreachable = g.elements().filter(|&x| !values[x].is_finite()).collect();
    Completion { group: g.clone(), values, unreachable }
}

/// Completion of a finite cost table that is known to reach every element.
pub fn complete_finite(g: &FiniteAbelianGroup, cost: Vec<Rational>) -> Result<Semivalue> {
    complete_cost(&CostFunction::from_finite(g, cost)?).into_semivalue()
}

/// Induced semivalue `q(y) = min { s(x) : π(x) = y }` on the target of a surjection.
pub fn push_value(s: &Semivalue, pi: &GroupHom) -> Result<Semivalue> {
    if pi.source() != &s.group {
        return Err(Error::InvalidHom("projection from a different group".into()));
    }
    let q = pi.target();
    let mut out: Vec<Option<Rational>> = vec![None; q.order()];
    for x in s.group.elements() {
        let y = pi.apply(x);
        if out[y].as_ref().is_none_or(|cur| s.value[x] < *cur) {
            out[y] = Some(s.value[x].clone());
        }
    }
    let table = out.into_iter().collect::<Option<Vec<_>>>().ok_or(Error::NotSurjective)?;
    Ok(Semivalue::from_trusted(q, table))
}

/// An isometric isomorphism `a → b`, if one exists.
///
/// Backtracks over images of the canonical generators of `a`, pruning by
/// element order and value, and checking every newly reached element.
pub fn isometric_isomorphic(a: &ValuedGroup, b: &ValuedGroup) -> Option<GroupHom> {
    let (ga, gb) = (&a.group, &b.group);
    if !ga.is_isomorphic_to(gb) || a.value_multiset() != b.value_multiset() {
        return None;
    }
    let mut pa: Vec<(u64, &Rational)> = ga.elements().map(|x| (ga.element_order(x), &a.value[x])).collect();
    let mut pb: Vec<(u64, &Rational)> = gb.elements().map(|x| (gb.element_order(x), &b.value[x])).collect();
    pa.sort();
    pb.sort();
    if pa != pb {
        return None;
    }
    extend_isometry(a, b, &[], &mut vec![None; ga.order()])
        .and_then(|images| GroupHom::from_generator_images(ga, gb, &images).ok())
}

/// Elements of `g` whose last nonzero coordinate is `i`, in index order.
pub(crate) fn level_elements(g: &FiniteAbelianGroup, i: usize) -> Vec<usize> {
    g.elements().filter(|&x| g.coord(x, i) != 0 && (i + 1..g.rank()).all(|j| g.coord(x, j) == 0)).collect()
}

/// Depth-first search for generator images of an isometric embedding
/// `a → b`, given images of the first `fixed.len()` generators.
/// `img` caches images of elements spanned so far.
pub(crate) fn extend_isometry(
    a: &ValuedGroup,
    b: &ValuedGroup,
    fixed: &[usize],
    img: &mut [Option<usize>],
) -> Option<Vec<usize>> {
    let ga = &a.group;
    img[0] = Some(0);
    let levels: Vec<Vec<usize>> = (0..ga.rank()).map(|i| level_elements(ga, i)).collect();
    let mut chosen: Vec<usize> = Vec::new();

    fn assign(
        a: &ValuedGroup,
        b: &ValuedGroup,
        levels: &[Vec<usize>],
        i: usize,
        y: usize,
        img: &mut [Option<usize>],
    ) -> bool {
        let (ga, gb) = (&a.group, &b.group);
        let e = ga.generator(i);
        for &x in &levels[i] {
            let prev = img[ga.sub(x, e)].expect("lower elements assigned first");
            let v = gb.add(prev, y);
            if b.value[v] != a.value[x] {
                for &z in &levels[i] {
                    img[z] = None;
                }
                return false;
            }
            img[x] = Some(v);
        }
        true
    }

    fn rec(
        a: &ValuedGroup,
        b: &ValuedGroup,
        levels: &[Vec<usize>],
        fixed: &[usize],
        i: usize,
        chosen: &mut Vec<usize>,
        img: &mut [Option<usize>],
    ) -> bool {
        let (ga, gb) = (&a.group, &b.group);
        if i == ga.rank() {
            return true;
        }
        let n = ga.factors()[i];
        let e = ga.generator(i);
        let candidates: Vec<usize> = if i < fixed.len() {
            vec![fixed[i]]
        } else {
            gb.elements().filter(|&y| b.value[y] == a.value[e] && gb.mul(n as i64, y) == 0).collect()
        };
        for y in candidates {
            if assign(a, b, levels, i, y, img) {
                chosen.push(y);
                if rec(a, b, levels, fixed, i + 1, chosen, img) {
                    return true;
                }
                chosen.pop();
                for &z in &levels[i] {
                    img[z] = None;
                }
            }
        }
        false
    }

    if rec(a, b, &levels, fixed, 0, &mut chosen, img) {
        Some(chosen)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn validate_examples() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        assert!(validate_value(&z2, ints(&[0, 1]), Cap::One, 2).is_ok());
        let z3 = FiniteAbelianGroup::cyclic(3);
        match validate_value(&z3, ints(&[0, 1, 3]), Cap::Infinite, 0) {
            Err(Error::Axiom(AxiomViolation::Symmetry(x, y))) => {
                assert_eq!((x, y), (GroupElement(vec![1]), GroupElement(vec![2])));
            }
            other => panic!("unexpected {other:?}"),
        }
        let z4 = FiniteAbelianGroup::cyclic(4);
        match validate_value(&z4, ints(&[0, 1, 3, 1]), Cap::Infinite, 0) {
            Err(Error::Axiom(AxiomViolation::Triangle(x, y))) => {
                assert_eq!((x, y), (GroupElement(vec![1]), GroupElement(vec![1])));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            validate_value(&z4, ints(&[0, 1, 2, 1]), Cap::One, 0),
            Err(Error::Axiom(AxiomViolation::Cap(..)))
        ));
        assert!(matches!(
            validate_value(&z4, ints(&[0, 1, 1, 1]), Cap::One, 2),
            Err(Error::Axiom(AxiomViolation::Exponent(..)))
        ));
        assert!(matches!(
            validate_value(&z4, ints(&[0, 1, 0, 1]), Cap::One, 4),
            Err(Error::Axiom(AxiomViolation::ZeroOffIdentity(..)))
        ));
    }

    #[test]
    fn completion_z4() {
        let z4 = FiniteAbelianGroup::cyclic(4);
        let s = complete_finite(&z4, ints(&[0, 1, 3, 1])).unwrap();
        assert_eq!(s.values(), ints(&[0, 1, 2, 1]).as_slice());
        let again = complete_finite(&z4, s.values().to_vec()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn completion_reports_unreachable() {
        let z4 = FiniteAbelianGroup::cyclic(4);
        let mut c = CostFunction::empty(&z4);
        c.offer(2, &Rational::one());
        let comp = complete_cost(&c);
        assert_eq!(comp.unreachable, vec![1, 3]);
        assert!(matches!(comp.into_semivalue(), Err(Error::Unreachable { count: 2, .. })));
    }

    #[test]
    fn push_and_cap() {
        let z4 = FiniteAbelianGroup::cyclic(4);
        let s = Semivalue::new(&z4, vec![r(0, 1), r(1, 2), r(0, 1), r(1, 2)]).unwrap();
        let z2 = FiniteAbelianGroup::cyclic(2);
        let pi = GroupHom::from_generator_images(&z4, &z2, &[1]).unwrap();
        let q = push_value(&s, &pi).unwrap();
        assert_eq!(q.values(), &[r(0, 1), r(1, 2)]);
        assert!(q.is_value());
        assert!(!s.is_value());
        let to_zero = GroupHom::from_generator_images(&z4, &z2, &[0]).unwrap();
        assert!(matches!(push_value(&s, &to_zero), Err(Error::NotSurjective)));

        let v = ValuedGroup::new(&z4, ints(&[0, 1, 2, 1]), Cap::Infinite, 0).unwrap();
        assert_eq!(cap_value(&v, Cap::One).values(), ints(&[0, 1, 1, 1]).as_slice());
        assert_eq!(cap_value(&v, Cap::Infinite), v);
        assert_eq!(cap_value_at(&v, &r(3, 2)).unwrap().values(), &[r(0, 1), r(1, 1), r(3, 2), r(1, 1)]);
    }

    #[test]
    fn isometry_search() {
        let k = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        // indices: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
        let a = ValuedGroup::new(&k, ints(&[0, 1, 2, 1]), Cap::Infinite, 2).unwrap();
        let b = ValuedGroup::new(&k, ints(&[0, 2, 1, 1]), Cap::Infinite, 2).unwrap();
        let h = isometric_isomorphic(&a, &b).expect("coordinate swap");
        assert!(a.is_isometric_embedding(&h, &b));
        assert!(isometric_isomorphic(&a, &a).is_some());
        let z4 = FiniteAbelianGroup::cyclic(4);
        let c = ValuedGroup::new(&z4, ints(&[0, 1, 2, 1]), Cap::Infinite, 0).unwrap();
        assert!(isometric_isomorphic(&a, &c).is_none());
        let d = ValuedGroup::new(&k, ints(&[0, 1, 1, 1]), Cap::Infinite, 2).unwrap();
        assert!(isometric_isomorphic(&a, &d).is_none());
    }
}
