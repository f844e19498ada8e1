//! Katětov maps, the exponent-`N` admissibility test, one-generator
//! extensions, midpoints, and the grid and modulus value extensions.

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupHom, Subgroup};
use crate::modulus::{check_ort, Modulus};
use crate::rational::Rational;
use crate::values::{complete_cost, Cap, CostFunction, Semivalue, ValuedGroup};

/// A Katětov map `f: A → [0, ∞)` on a subset `A` of a valued group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatetovMap {
    base: ValuedGroup,
    domain: Vec<usize>,
    f: Vec<Rational>,
    cap: Cap,
}

impl KatetovMap {
    /// Checks `|f(x) − f(y)| ≤ p(x − y) ≤ f(x) + f(y)` on all pairs and `f ≤ r`.
    pub fn new(base: &ValuedGroup, pairs: Vec<(usize, Rational)>, cap: Cap) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_by_key(|(x, _)| *x);
        if pairs.is_empty() {
            return Err(Error::NotKatetov("empty domain".into()));
        }
        let g = base.group();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::NotKatetov(format!("{} listed twice", g.coords(w[0].0))));
            }
        }
        for (x, v) in &pairs {
            if *x >= g.order() {
                return Err(Error::MalformedElement(format!("index {x} out of range")));
            }
            if v.is_negative() {
                return Err(Error::NotKatetov(format!("f({}) = {v} < 0", g.coords(*x))));
            }
            if !cap.admits(v) {
                return Err(Error::NotKatetov(format!("f({}) = {v} exceeds the cap", g.coords(*x))));
            }
        }
        for (x, fx) in &pairs {
            for (y, fy) in &pairs {
                let d = base.dist(*x, *y);
                if (fx - fy).abs() > *d || *d > fx + fy {
                    return Err(Error::NotKatetov(format!(
                        "Katětov inequality fails at {}, {}",
                        g.coords(*x),
                        g.coords(*y)
                    )));
                }
            }
        }
        let (domain, f) = pairs.into_iter().unzip();
        Ok(KatetovMap { base: base.clone(), domain, f, cap })
    }

    /// `a ↦ p(a − b)` on `domain`.
    pub fn distance_from(base: &ValuedGroup, domain: &[usize], b: usize, cap: Cap) -> Result<Self> {
        Self::new(base, domain.iter().map(|&a| (a, base.dist(a, b).clone())).collect(), cap)
    }

    pub fn base(&self) -> &ValuedGroup {
        &self.base
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn values(&self) -> &[Rational] {
        &self.f
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.domain.iter().copied().zip(self.f.iter())
    }

    pub fn get(&self, x: usize) -> Option<&Rational> {
        self.domain.binary_search(&x).ok().map(|i| &self.f[i])
    }

    pub fn min_value(&self) -> Rational {
        self.f.iter().min().cloned().expect("nonempty")
    }

    pub fn max_value(&self) -> Rational {
        self.f.iter().max().cloned().expect("nonempty")
    }

    /// True when the domain is closed under the group operations.
    pub fn domain_is_subgroup(&self) -> bool {
        Subgroup::from_elements(self.base.group(), &self.domain).is_ok()
    }
}

/// Calls `visit` on every multiset of `k` positions from `0..n`, as a
/// nondecreasing index list, until it returns `false`.
fn for_each_multiset<F: FnMut(&[usize]) -> bool>(n: usize, k: usize, mut visit: F) {
    if n == 0 && k > 0 {
        return;
    }
    let mut idx = vec![0usize; k];
    loop {
        if !visit(&idx) {
            return;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                let v = idx[pos] + 1;
                for slot in idx[pos..].iter_mut() {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// First `N`-tuple `(a_1, …, a_N)` from the domain with
/// `|p(Σ a_k) − f(a_N)| > Σ_{k<N} f(a_k)`, or `None`.
///
/// Tuples are taken up to permutation of `a_1, …, a_{N−1}`. When the domain is
/// a subgroup only `a_N = −Σ_{k<N} a_k` needs checking, which is the
/// subgroup form `f(−Σ a_k) ≤ Σ f(a_k)`.
pub fn check_trv_n(f: &KatetovMap, n: u64) -> Option<Vec<usize>> {
    assert!(n >= 2, "trv-N needs N >= 2");
    let g = f.base.group();
    let k = (n - 1) as usize;
    let subgroup = f.domain_is_subgroup();
    let mut witness = None;
    for_each_multiset(f.domain.len(), k, |idx| {
        let s = idx.iter().fold(0, |acc, &i| g.add(acc, f.domain[i]));
        let budget: Rational = idx.iter().map(|&i| &f.f[i]).sum();
        let prefix = || idx.iter().map(|&i| f.domain[i]).collect::<Vec<_>>();
        if subgroup {
            let last = g.neg(s);
            let fl = f.get(last).expect("domain is a subgroup");
            if *fl > budget {
                let mut w = prefix();
                w.push(last);
                witness = Some(w);
                return false;
            }
        } else {
            for (j, &last) in f.domain.iter().enumerate() {
                let total = f.base.value(g.add(s, last));
                if (total - &f.f[j]).abs() > budget {
                    let mut w = prefix();
                    w.push(last);
                    witness = Some(w);
                    return false;
                }
            }
        }
        true
    });
    witness
}

/// Some `b` with `p(a − b) = f(a)` on the whole domain, scanning in index order.
pub fn find_realizer(f: &KatetovMap) -> Option<usize> {
    let base = &f.base;
    base.group().elements().find(|&b| f.pairs().all(|(a, v)| base.dist(a, b) == v))
}

/// Result of adjoining one cyclic generator that realizes a Katětov map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneGenExtension {
    pub source: ValuedGroup,
    pub result: ValuedGroup,
    /// `g ↦ (g, 0)`.
    pub embedding: GroupHom,
    /// The adjoined generator `b = (0, 1)`, with `p̃(a − b) = f(a)`.
    pub witness: usize,
    /// Order of the adjoined cyclic factor.
    pub m: u64,
    /// `max(p(G) ∪ f(A))`.
    pub big_m: Rational,
    /// `min f(A)`.
    pub c: Rational,
}

/// Adjoins `b` of order `m` to `G` so that `p̃(a − b) = f(a)` for all `a`.
///
/// The value on `G × ℤ_m` is the completion of the atom costs `p(g)` on
/// `(g, 0)`, `f(a)` on `±(a, −1)` and `M` on `(0, h)`, capped at `M` for `r = 1`.
pub fn extend_onegen(f: &KatetovMap, n: u64, r: Cap) -> Result<OneGenExtension> {
    let base = &f.base;
    let g = base.group();
    if n == 1 {
        return Err(Error::Precondition("N = 1 is not a valid exponent class".into()));
    }
    if !g.has_exponent_dividing(n) {
        return Err(Error::ExponentMismatch(format!("group of exponent {} is not in the class N = {n}", g.exponent())));
    }
    if r == Cap::One && (base.diameter() > Rational::one() || f.max_value() > Rational::one()) {
        return Err(Error::Precondition("cap 1 requires p ≤ 1 and f ≤ 1".into()));
    }
    let c = f.min_value();
    if c.is_zero() {
        return Err(Error::ZeroMinimum);
    }
    if n > 2 {
        if let Some(w) = check_trv_n(f, n) {
            return Err(Error::Admissibility { n, witness: w.into_iter().map(|x| g.coords(x)).collect() });
        }
    }
    let big_m = base.diameter().max(f.max_value());
    let m = if n != 0 {
        n
    } else {
        // smallest m >= 2 with m - 1 >= M / c
        let ratio = &big_m / &c;
        let mut m = 2u64;
        while Rational::from((m - 1) as i64) < ratio {
            m += 1;
        }
        m
    };
    let h = FiniteAbelianGroup::cyclic(m);
    let gt = g.product(&h)?;
    let pair = |x: usize, y: usize| g.pair_index(&h, x, y);
    let minus_one = (m - 1) as usize;

    let mut cost = CostFunction::empty(&gt);
    for x in g.elements() {
        cost.offer(pair(x, 0), base.value(x));
    }
    for (a, v) in f.pairs() {
        cost.offer(pair(a, minus_one), v);
    }
    for y in 1..m as usize {
        cost.offer(pair(0, y), &big_m);
    }
    let mut table = complete_cost(&cost).into_semivalue()?.into_values();
    let cap = if r == Cap::One { Some(big_m.clone()) } else { None };
    if let Some(m) = &cap {
        for v in table.iter_mut() {
            if *v > *m {
                *v = m.clone();
            }
        }
    }
    let result = ValuedGroup::new(&gt, table, r, n)?;
    let images: Vec<usize> = (0..g.rank()).map(|i| pair(g.generator(i), 0)).collect();
    let embedding = GroupHom::from_generator_images(g, &gt, &images)?;
    let witness = pair(0, 1);
    if let Some(x) = base.isometry_defect(&embedding, &result) {
        return Err(Error::Postcondition(format!("p̃ differs from p at {}", g.coords(x))));
    }
    for (a, v) in f.pairs() {
        if result.dist(embedding.apply(a), witness) != v {
            return Err(Error::Postcondition(format!("p̃(a − b) != f(a) at {}", g.coords(a))));
        }
    }
    Ok(OneGenExtension { source: base.clone(), result, embedding, witness, m, big_m, c })
}

/// Adjoins a point `z` with `p(x − z) = p(z − y) = p(x − y)/2`, keeping the class of `G`.
pub fn midpoint_extend(g: &ValuedGroup, x: usize, y: usize) -> Result<OneGenExtension> {
    if x == y {
        return Err(Error::Degenerate("midpoint of a point with itself".into()));
    }
    let half = g.dist(x, y) * Rational::new(1, 2);
    let f = KatetovMap::new(g, vec![(x, half.clone()), (y, half)], g.cap())?;
    extend_onegen(&f, g.exponent(), g.cap())
}

/// Moves every value of `λ` up to the dyadic grid `2⁻ᵐ ℤ` off `D₀`, then completes.
///
/// The result extends `λ|D₀`, is grid-valued and within `ε` of `λ`; with cap 1
/// it is capped at `1`.
pub fn extend_value_grid(
    d: &ValuedGroup,
    d0: &Subgroup,
    grid_log2: u32,
    eps: &Rational,
    r: Cap,
) -> Result<ValuedGroup> {
    let g = d.group();
    if d0.parent() != g {
        return Err(Error::InvalidSubgroup("D₀ is a subgroup of a different group".into()));
    }
    let den = 1u64 << grid_log2;
    let step = Rational::new(1, den as i64);
    if step > *eps {
        return Err(Error::Precondition(format!("grid step {step} exceeds ε = {eps}")));
    }
    if let Some(&h) = d0.elements().iter().find(|&&h| !d.value(h).is_multiple_of(den)) {
        return Err(Error::Precondition(format!("λ({}) = {} is not on the grid", g.coords(h), d.value(h))));
    }
    if r == Cap::One && d.diameter() > Rational::one() {
        return Err(Error::Precondition("cap 1 requires λ ≤ 1".into()));
    }
    let cost: Vec<Rational> =
        g.elements().map(|x| if d0.contains(x) { d.value(x).clone() } else { d.value(x).ceil_to(den) }).collect();
    let mut table = complete_cost(&CostFunction::from_finite(g, cost)?).into_semivalue()?.into_values();
    if r == Cap::One {
        let one = Rational::one();
        for v in table.iter_mut() {
            if *v > one {
                *v = one.clone();
            }
        }
    }
    let out = ValuedGroup::new(g, table, r, d.exponent())?;
    for x in g.elements() {
        let v = out.value(x);
        if !v.is_multiple_of(den) {
            return Err(Error::Postcondition(format!("off-grid value at {}", g.coords(x))));
        }
        if (v - d.value(x)).abs() > *eps {
            return Err(Error::Postcondition(format!("moved by more than ε at {}", g.coords(x))));
        }
        if d0.contains(x) && v != d.value(x) {
            return Err(Error::Postcondition(format!("not an extension at {}", g.coords(x))));
        }
    }
    Ok(out)
}

/// `dist_λ(x, Z) = min_{z ∈ Z} λ(x − z)`.
fn dist_to_set(d: &ValuedGroup, x: usize, z: &[usize]) -> Rational {
    z.iter().map(|&w| d.dist(x, w).clone()).min().expect("Z contains 0")
}

/// Extends a semivalue `λ₀` on `D₀` to `D` by
/// `λ̄(x) = min_{h ∈ D₀} ω(λ(x − h)) + λ₀(h)`, capped at `r` when `λ₀ ≤ r`.
///
/// `lambda0` is aligned with `d0.elements()`. When `(ϱ, τ)` is given the
/// two-modulus condition and the distance inequality on `D₀` are checked first,
/// and the same inequality is asserted on all of `D` afterwards.
pub fn extend_semivalue_modulus(
    d: &ValuedGroup,
    d0: &Subgroup,
    lambda0: &[Rational],
    omega: &Modulus,
    rho_tau: Option<(&Modulus, &Modulus)>,
) -> Result<Semivalue> {
    let g = d.group();
    let r = d.cap();
    if d0.parent() != g || lambda0.len() != d0.order() {
        return Err(Error::Precondition("λ₀ must be a table over D₀ ≤ D".into()));
    }
    let (c0, e0) = d0.to_group();
    let l0_canon: Vec<Rational> =
        c0.elements().map(|x| lambda0[d0.position(e0.apply(x)).expect("in D₀")].clone()).collect();
    Semivalue::new(&c0, l0_canon)?;
    let l0 = |h: usize| &lambda0[d0.position(h).expect("in D₀")];
    for &h in d0.elements() {
        if *l0(h) > omega.eval(d.value(h)) {
            return Err(Error::Precondition(format!("λ₀({}) = {} > ω(λ)", g.coords(h), l0(h))));
        }
    }
    let zeros: Vec<usize> = d0.elements().iter().copied().filter(|&h| l0(h).is_zero()).collect();
    if let Some((rho, tau)) = rho_tau {
        if !check_ort(omega, rho, tau, r) {
            return Err(Error::Precondition("(ω, ϱ, τ) fails the two-modulus condition".into()));
        }
        for &h in d0.elements() {
            if tau.eval(&dist_to_set(d, h, &zeros)) > rho.eval(l0(h)) {
                return Err(Error::Precondition(format!("τ(dist) > ϱ(λ₀) at {}", g.coords(h))));
            }
        }
    }
    let omega_l: Vec<Rational> = g.elements().map(|x| omega.eval(d.value(x))).collect();
    let mut table: Vec<Rational> = g
        .elements()
        .map(|x| d0.elements().iter().map(|&h| &omega_l[g.sub(x, h)] + l0(h)).min().expect("D₀ contains 0"))
        .collect();
    let cap_at = r.bound().filter(|b| lambda0.iter().all(|v| v <= b));
    if let Some(b) = &cap_at {
        for v in table.iter_mut() {
            if *v > *b {
                *v = b.clone();
            }
        }
    }
    let out = Semivalue::new(g, table)?;
    for x in g.elements() {
        let v = out.value(x);
        if *v > omega_l[x] {
            return Err(Error::Postcondition(format!("λ̄ > ω∘λ at {}", g.coords(x))));
        }
        if let Some(i) = d0.position(x) {
            if *v != lambda0[i] {
                return Err(Error::Postcondition(format!("not an extension at {}", g.coords(x))));
            }
        } else if v.is_zero() {
            return Err(Error::Postcondition(format!("new zero at {}", g.coords(x))));
        }
        if let Some(b) = &cap_at {
            if v > b {
                return Err(Error::Postcondition(format!("cap exceeded at {}", g.coords(x))));
            }
        }
        if let Some((rho, tau)) = rho_tau {
            if tau.eval(&dist_to_set(d, x, &zeros)) > rho.eval(v) {
                return Err(Error::Postcondition(format!("τ(dist) > ϱ(λ̄) at {}", g.coords(x))));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn cyclic_const(n: u64, v: Rational, cap: Cap, exponent: u64) -> ValuedGroup {
        let g = FiniteAbelianGroup::cyclic(n);
        let mut t = vec![v; n as usize];
        t[0] = Rational::zero();
        ValuedGroup::new(&g, t, cap, exponent).unwrap()
    }

    #[test]
    fn multisets_enumerated() {
        let mut seen = Vec::new();
        for_each_multiset(3, 2, |m| {
            seen.push(m.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[5], vec![2, 2]);
    }

    #[test]
    fn z3_map_violates_subgroup_form() {
        let g = cyclic_const(3, Rational::one(), Cap::Infinite, 3);
        let f = KatetovMap::new(&g, vec![(0, q(3, 2)), (1, q(1, 2)), (2, q(1, 2))], Cap::Infinite).unwrap();
        assert!(f.domain_is_subgroup());
        assert_eq!(check_trv_n(&f, 3), Some(vec![1, 2, 0]));
        assert_eq!(find_realizer(&f), None);
        assert!(matches!(extend_onegen(&f, 3, Cap::Infinite), Err(Error::Admissibility { n: 3, .. })));
    }

    #[test]
    fn extension_z2_half() {
        let g = cyclic_const(2, Rational::one(), Cap::Infinite, 2);
        let f = KatetovMap::new(&g, vec![(1, q(1, 2))], Cap::Infinite).unwrap();
        assert_eq!(check_trv_n(&f, 2), None);
        let e = extend_onegen(&f, 2, Cap::Infinite).unwrap();
        let gt = e.result.group();
        assert_eq!(gt.factors(), &[2, 2]);
        let idx = |a, b| gt.index(&GroupElement(vec![a, b])).unwrap();
        assert_eq!(e.result.value(idx(1, 1)), &q(1, 2));
        assert_eq!(e.result.value(idx(0, 1)), &q(1, 1));
        assert_eq!(e.result.value(idx(1, 0)), &q(1, 1));
    }

    #[test]
    fn extension_z3_zero_domain() {
        let g = cyclic_const(3, Rational::one(), Cap::Infinite, 3);
        let f = KatetovMap::new(&g, vec![(0, q(1, 2))], Cap::Infinite).unwrap();
        let e = extend_onegen(&f, 3, Cap::Infinite).unwrap();
        assert_eq!(e.m, 3);
        let gt = e.result.group();
        let b = gt.index(&GroupElement(vec![0, 1])).unwrap();
        let b2 = gt.index(&GroupElement(vec![0, 2])).unwrap();
        assert_eq!(e.result.value(b), &q(1, 2));
        assert_eq!(e.result.value(b2), &q(1, 2));
    }

    #[test]
    fn midpoints() {
        let g = cyclic_const(2, Rational::one(), Cap::One, 2);
        let e = midpoint_extend(&g, 0, 1).unwrap();
        let z = e.witness;
        let y = e.embedding.apply(1);
        assert_eq!(e.result.value(z), &q(1, 2));
        assert_eq!(e.result.dist(y, z), &q(1, 2));
        assert_eq!(e.result.value(y), &q(1, 1));

        let g3 = cyclic_const(3, Rational::one(), Cap::Infinite, 3);
        let e3 = midpoint_extend(&g3, 0, 1).unwrap();
        assert_eq!(e3.result.value(e3.witness), &q(1, 2));
        assert_eq!(e3.result.dist(e3.embedding.apply(1), e3.witness), &q(1, 2));
        assert!(matches!(midpoint_extend(&g3, 1, 1), Err(Error::Degenerate(_))));

        let f = KatetovMap::new(&g, vec![(0, q(1, 2)), (1, q(1, 2))], Cap::One).unwrap();
        assert_eq!(find_realizer(&f), None);
    }

    #[test]
    fn zero_minimum_rejected() {
        let g = cyclic_const(2, Rational::one(), Cap::Infinite, 2);
        let f = KatetovMap::new(&g, vec![(0, q(0, 1)), (1, q(1, 1))], Cap::Infinite).unwrap();
        assert_eq!(find_realizer(&f), Some(0));
        assert!(matches!(extend_onegen(&f, 2, Cap::Infinite), Err(Error::ZeroMinimum)));
    }

    #[test]
    fn exponent_zero_branch_picks_smallest_m() {
        let g = cyclic_const(2, Rational::one(), Cap::Infinite, 0);
        let f = KatetovMap::new(&g, vec![(0, q(1, 4)), (1, q(3, 4))], Cap::Infinite).unwrap();
        let e = extend_onegen(&f, 0, Cap::Infinite).unwrap();
        // M / c = 4
        assert_eq!(e.m, 5);
    }

    #[test]
    fn grid_extension_examples() {
        let z3 = FiniteAbelianGroup::cyclic(3);
        let d = ValuedGroup::new(&z3, vec![q(0, 1), q(3, 10), q(3, 10)], Cap::Infinite, 3).unwrap();
        let out = extend_value_grid(&d, &Subgroup::trivial(&z3), 3, &q(1, 8), Cap::Infinite).unwrap();
        assert_eq!(out.values(), &[q(0, 1), q(3, 8), q(3, 8)]);

        let z2 = FiniteAbelianGroup::cyclic(2);
        let d2 = ValuedGroup::new(&z2, vec![q(0, 1), q(9, 10)], Cap::One, 2).unwrap();
        let out2 = extend_value_grid(&d2, &Subgroup::trivial(&z2), 2, &q(1, 4), Cap::One).unwrap();
        assert_eq!(out2.values(), &[q(0, 1), q(1, 1)]);

        let whole = Subgroup::whole(&z2);
        assert!(matches!(extend_value_grid(&d2, &whole, 2, &q(1, 4), Cap::One), Err(Error::Precondition(_))));
    }

    #[test]
    fn modulus_extension_example() {
        let z4 = FiniteAbelianGroup::cyclic(4);
        let d = ValuedGroup::new(&z4, vec![q(0, 1), q(1, 2), q(1, 1), q(1, 2)], Cap::One, 4).unwrap();
        let d0 = Subgroup::generated_by(&z4, &[2]);
        let omega = Modulus::linear(q(1, 2)).unwrap();
        let out = extend_semivalue_modulus(&d, &d0, &[q(0, 1), q(1, 4)], &omega, None).unwrap();
        assert_eq!(out.values(), &[q(0, 1), q(1, 4), q(1, 4), q(1, 4)]);

        let out0 = extend_semivalue_modulus(&d, &d0, &[q(0, 1), q(0, 1)], &omega, None).unwrap();
        assert_eq!(out0.zeros().elements(), &[0, 2]);

        let bad = extend_semivalue_modulus(&d, &d0, &[q(0, 1), q(1, 1)], &omega, None);
        assert!(matches!(bad, Err(Error::Precondition(_))));
    }
}
