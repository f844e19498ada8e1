//! Free valued groups `ℤ_N[X]` over finite metric spaces and word metrics.
//!
//! An element of `ℤ_N[X]` is a function `f: X → ℤ_N` with `Σ f(x) = 0`. The
//! carrier is `ℤ_N^{|X|-1}`: the coordinate of the last point is dropped and
//! recovered from the zero-sum constraint.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupHom, Subgroup, DEFAULT_ORDER_BOUND};
use crate::rational::Rational;
use crate::values::{cap_value, complete_cost, Cap, CostFunction, ValuedGroup};

/// A finite metric space with labelled points and an exact distance table.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    d: Vec<Vec<Rational>>,
}

impl FiniteMetricSpace {
    pub fn new(points: Vec<String>, d: Vec<Vec<Rational>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidMetric("empty point set".into()));
        }
        if d.len() != n || d.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!("distance table is not {n}x{n}")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if points[i] == points[j] {
                    return Err(Error::InvalidMetric(format!("duplicate label {}", points[i])));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = &d[i][j];
                if v.is_negative() {
                    return Err(Error::InvalidMetric(format!("d({},{}) = {v} < 0", points[i], points[j])));
                }
                if (i == j) != v.is_zero() {
                    return Err(Error::InvalidMetric(format!("d({},{}) = {v}", points[i], points[j])));
                }
                if *v != d[j][i] {
                    return Err(Error::InvalidMetric(format!("d({},{}) is not symmetric", points[i], points[j])));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[i][k] > &d[i][j] + &d[j][k] {
                        return Err(Error::InvalidMetric(format!(
                            "triangle fails: d({},{}) > d({},{}) + d({},{})",
                            points[i], points[k], points[i], points[j], points[j], points[k]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { points, d })
    }

    /// Points labelled `0..n` with distances given by `f(i, j)` for `i < j`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        let mut d = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i][j] = v.clone();
                d[j][i] = v;
            }
        }
        Self::new((0..n).map(|i| i.to_string()).collect(), d)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.d[i][j]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn diameter(&self) -> Rational {
        self.d.iter().flatten().cloned().max().unwrap_or_else(Rational::zero)
    }

    /// The subspace on the given points, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> Result<Self> {
        let points = idx.iter().map(|&i| self.points[i].clone()).collect();
        let d = idx.iter().map(|&i| idx.iter().map(|&j| self.d[i][j].clone()).collect()).collect();
        Self::new(points, d)
    }

    /// `μ(S)`: the largest nearest-neighbour distance within `S`, or 0 if `|S| < 2`.
    pub fn mu(&self, s: &[usize]) -> Rational {
        if s.len() < 2 {
            return Rational::zero();
        }
        s.iter().map(|&x| s.iter().filter(|&&y| y != x).map(|&y| self.d[x][y].clone()).min().unwrap()).max().unwrap()
    }
}

/// `(ℤ_N[X], p_d ∧ r)` materialized over `ℤ_N^{|X|-1}`.
#[derive(Clone, Debug)]
pub struct FreeValuedGroup {
    space: FiniteMetricSpace,
    n: u64,
    value: ValuedGroup,
    raw: Vec<Rational>,
}

impl FreeValuedGroup {
    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn exponent(&self) -> u64 {
        self.n
    }

    pub fn carrier(&self) -> &FiniteAbelianGroup {
        self.value.group()
    }

    /// The capped value `p_d ∧ r`.
    pub fn value(&self) -> &ValuedGroup {
        &self.value
    }

    /// `p_d` before capping.
    pub fn pd(&self, f: usize) -> &Rational {
        &self.raw[f]
    }

    /// Element with the given coefficients `f(x)`, one per point; they must sum to 0 mod N.
    pub fn from_coefficients(&self, coeffs: &[i64]) -> Result<usize> {
        let k = self.space.len();
        if coeffs.len() != k {
            return Err(Error::MalformedElement(format!("{} coefficients for {k} points", coeffs.len())));
        }
        let total: i128 = coeffs.iter().map(|&c| c as i128).sum();
        if total.rem_euclid(self.n as i128) != 0 {
            return Err(Error::MalformedElement(format!("coefficients sum to {total}, not 0 mod {}", self.n)));
        }
        let c: Vec<i128> = coeffs[..k - 1].iter().map(|&c| c as i128).collect();
        Ok(self.carrier().index_of_ints(&c))
    }

    /// The coefficients `f(x)` of an element, each in `0..N`.
    pub fn coefficients(&self, f: usize) -> Vec<u64> {
        let g = self.carrier();
        let mut c: Vec<u64> = (0..g.rank()).map(|i| g.coord(f, i)).collect();
        let s: u64 = c.iter().sum::<u64>() % self.n;
        c.push((self.n - s) % self.n);
        c
    }

    pub fn support(&self, f: usize) -> Vec<usize> {
        self.coefficients(f).iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i).collect()
    }

    /// `x̂ − ŷ`.
    pub fn hat_diff(&self, x: usize, y: usize) -> usize {
        hat_index(self.carrier(), x, y)
    }

    /// `x̂ − ẑ` where `z` is the last point.
    pub fn hat(&self, x: usize) -> usize {
        self.hat_diff(x, self.space.len() - 1)
    }
}

/// Builds `ℤ_N[X]` with `p_d` as the completion of the cost `d(x,y)` on `x̂ − ŷ`, capped at `r`.
pub fn free_group(space: &FiniteMetricSpace, n: u64, r: Cap) -> Result<FreeValuedGroup> {
    if n < 2 {
        return Err(Error::Precondition(format!("exponent {n} < 2")));
    }
    if let Some(b) = r.bound() {
        let diam = space.diameter();
        if diam > b {
            return Err(Error::Precondition(format!("diameter {diam} exceeds cap {b}")));
        }
    }
    let k = space.len();
    let carrier = FiniteAbelianGroup::with_bound(vec![n; k - 1], DEFAULT_ORDER_BOUND)?;
    let mut cost = CostFunction::empty(&carrier);
    for x in 0..k {
        for y in x + 1..k {
            cost.offer(hat_index(&carrier, x, y), space.dist(x, y));
        }
    }
    let raw = complete_cost(&cost).into_semivalue()?.into_values();
    let uncapped = ValuedGroup::new(&carrier, raw.clone(), Cap::Infinite, n)?;
    let fvg = FreeValuedGroup { space: space.clone(), n, value: cap_value(&uncapped, r), raw };

    for f in carrier.elements().skip(1) {
        let mu = space.mu(&fvg.support(f));
        if fvg.raw[f] < mu {
            return Err(Error::Postcondition(format!("p_d({}) = {} < μ(supp) = {mu}", carrier.coords(f), fvg.raw[f])));
        }
    }
    for x in 0..k {
        for y in 0..k {
            if fvg.value.value(fvg.hat_diff(x, y)) != space.dist(x, y) {
                return Err(Error::Postcondition(format!(
                    "p_d(x̂ − ŷ) != d(x,y) for ({}, {})",
                    space.points[x], space.points[y]
                )));
            }
        }
    }
    Ok(fvg)
}

fn hat_index(carrier: &FiniteAbelianGroup, x: usize, y: usize) -> usize {
    let mut c = vec![0i128; carrier.rank() + 1];
    c[x] += 1;
    c[y] -= 1;
    carrier.index_of_ints(&c[..carrier.rank()])
}

/// `p_d(f)` for `N = 2` as the cheapest perfect matching of `supp f`.
pub fn pd_matching(fvg: &FreeValuedGroup, f: usize) -> Result<Rational> {
    if fvg.n != 2 {
        return Err(Error::Precondition(format!("matching formula needs N = 2, got {}", fvg.n)));
    }
    if f == 0 {
        return Err(Error::Precondition("f = 0".into()));
    }
    let supp = fvg.support(f);
    if !supp.len().is_multiple_of(2) {
        return Err(Error::Postcondition(format!("odd support of size {}", supp.len())));
    }
    Ok(min_matching(&fvg.space, &supp))
}

fn min_matching(space: &FiniteMetricSpace, pts: &[usize]) -> Rational {
    fn go(space: &FiniteMetricSpace, rest: &mut Vec<usize>) -> Rational {
        if rest.is_empty() {
            return Rational::zero();
        }
        let a = rest.remove(0);
        let mut best: Option<Rational> = None;
        for i in 0..rest.len() {
            let b = rest.remove(i);
            let v = space.dist(a, b) + go(space, rest);
            rest.insert(i, b);
            if best.as_ref().is_none_or(|w| v < *w) {
                best = Some(v);
            }
        }
        rest.insert(0, a);
        best.unwrap()
    }
    go(space, &mut pts.to_vec())
}

/// `ũ: ℤ_N[X] → H` induced by a point map together with its Lipschitz constant.
#[derive(Clone, Debug)]
pub struct InducedHom {
    pub hom: GroupHom,
    pub constant: Rational,
}

/// Extends `u: X → H` to the homomorphism with `ũ(x̂ − ŷ) = u(x) − u(y)` and checks
/// that its Lipschitz constant with respect to `p_d` equals that of `u`.
pub fn induced_hom(u: &[usize], fvg: &FreeValuedGroup, target: &ValuedGroup) -> Result<InducedHom> {
    let k = fvg.space.len();
    if u.len() != k {
        return Err(Error::InvalidHom(format!("{} images for {k} points", u.len())));
    }
    let h = target.group();
    if !h.has_exponent_dividing(fvg.n) {
        return Err(Error::ExponentMismatch(format!("target exponent {} does not divide {}", h.exponent(), fvg.n)));
    }
    if let Some(&bad) = u.iter().find(|&&x| x >= h.order()) {
        return Err(Error::MalformedElement(format!("index {bad} outside target of order {}", h.order())));
    }
    let images: Vec<usize> = (0..k - 1).map(|i| h.sub(u[i], u[k - 1])).collect();
    let hom = GroupHom::from_generator_images(fvg.carrier(), h, &images)?;

    let mut constant = Rational::zero();
    for x in 0..k {
        for y in x + 1..k {
            let ratio = target.value(h.sub(u[x], u[y])) / fvg.space.dist(x, y);
            constant = constant.max(ratio);
        }
    }
    for f in fvg.carrier().elements() {
        let q = target.value(hom.apply(f));
        if *q > &constant * &fvg.raw[f] {
            return Err(Error::Postcondition(format!(
                "q(ũ({})) = {q} exceeds {constant} · p_d",
                fvg.carrier().coords(f)
            )));
        }
    }
    Ok(InducedHom { hom, constant })
}

/// `v̂: ℤ_N[A] → ℤ_N[X]` induced by a point map `v: A → X`.
pub fn induced_map(source: &FreeValuedGroup, target: &FreeValuedGroup, v: &[usize]) -> Result<InducedHom> {
    let u: Vec<usize> = v.iter().map(|&x| target.hat(x)).collect();
    induced_hom(&u, source, &target.value)
}

/// A symmetric generating set with positive weights.
#[derive(Clone, Debug)]
pub struct GeneratingSet {
    group: FiniteAbelianGroup,
    gens: Vec<usize>,
    weights: Vec<Rational>,
}

impl GeneratingSet {
    /// Unit weights.
    pub fn new(group: &FiniteAbelianGroup, gens: Vec<usize>) -> Result<Self> {
        let w = vec![Rational::one(); gens.len()];
        Self::weighted(group, gens, w)
    }

    pub fn weighted(group: &FiniteAbelianGroup, gens: Vec<usize>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != gens.len() {
            return Err(Error::InvalidCost(format!("{} weights for {} generators", weights.len(), gens.len())));
        }
        for (i, (&x, w)) in gens.iter().zip(&weights).enumerate() {
            if x == 0 || x >= group.order() {
                return Err(Error::InvalidCost(format!("generator #{i} is zero or out of range")));
            }
            if !w.is_positive() {
                return Err(Error::InvalidCost(format!("weight {w} of {} is not positive", group.coords(x))));
            }
            let ix = group.neg(x);
            match gens.iter().position(|&y| y == ix) {
                Some(j) if weights[j] == *w => {}
                Some(_) => return Err(Error::InvalidCost(format!("weights of ±{} differ", group.coords(x)))),
                None => return Err(Error::InvalidCost(format!("-{} missing from F", group.coords(x)))),
            }
        }
        Ok(GeneratingSet { group: group.clone(), gens, weights })
    }

    /// Closes `gens` under negation, dropping zero and duplicates.
    pub fn symmetric(group: &FiniteAbelianGroup, gens: &[usize]) -> Result<Self> {
        let mut all: Vec<usize> = gens.iter().flat_map(|&x| [x, group.neg(x)]).filter(|&x| x != 0).collect();
        all.sort_unstable();
        all.dedup();
        Self::new(group, all)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn generates(&self) -> bool {
        Subgroup::generated_by(&self.group, &self.gens).order() == self.group.order()
    }
}

/// The word value `‖·‖_F`, scaled by `alpha`.
pub fn word_metric(f: &GeneratingSet, alpha: &Rational) -> Result<ValuedGroup> {
    if !alpha.is_positive() {
        return Err(Error::Precondition(format!("scale {alpha} is not positive")));
    }
    let g = &f.group;
    let table: Vec<Rational> = if f.weights.iter().all(|w| *w == Rational::one()) {
        let mut len: Vec<Option<i64>> = vec![None; g.order()];
        len[0] = Some(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let l = len[x].unwrap();
            for &s in &f.gens {
                let y = g.add(x, s);
                if len[y].is_none() {
                    len[y] = Some(l + 1);
                    queue.push_back(y);
                }
            }
        }
        if let Some(x) = len.iter().position(Option::is_none) {
            let count = len.iter().filter(|l| l.is_none()).count();
            return Err(Error::Unreachable { count, first: g.coords(x) });
        }
        len.into_iter().map(|l| Rational::from_integer(l.unwrap()) * alpha).collect()
    } else {
        let mut cost = CostFunction::empty(g);
        for (&x, w) in f.gens.iter().zip(&f.weights) {
            cost.offer(x, &(w * alpha));
        }
        complete_cost(&cost).into_semivalue()?.into_values()
    };
    ValuedGroup::new(g, table, Cap::Infinite, g.exponent())
}

/// `ℤ_N^N` with `F = {±e_j} ∪ {e_j − e_k}`.
pub fn zn_generating_set(n: u64) -> Result<GeneratingSet> {
    let g = FiniteAbelianGroup::with_bound(vec![n; n as usize], DEFAULT_ORDER_BOUND)?;
    let e: Vec<usize> = (0..n as usize).map(|j| g.generator(j)).collect();
    let mut gens: Vec<usize> = e.iter().flat_map(|&x| [x, g.neg(x)]).collect();
    for &a in &e {
        for &b in &e {
            if a != b {
                gens.push(g.sub(a, b));
            }
        }
    }
    GeneratingSet::symmetric(&g, &gens)
}

/// `X = {0, 1, …, N}` with `d(j,k) = 1` on `{1, …, N}` and `d(0,j) = max(1/2, 1 − 2/N)`.
pub fn odd_inclusion_space(n: u64) -> Result<FiniteMetricSpace> {
    let c = Rational::new(1, 2).max(Rational::one() - Rational::new(2, n as i64));
    FiniteMetricSpace::from_fn(n as usize + 1, |i, _| if i == 0 { c.clone() } else { Rational::one() })
}
