//! Amalgamation of valued groups over a common pushout
//! `D̃ = (D₁ × D₂) / D̃₀` with the maps `ψ̃₁(x) = π(x, 0)`, `ψ̃₂(y) = π(0, y)`.

use crate::error::{Error, Result};
use crate::group::{quotient, FiniteAbelianGroup, GroupHom, Subgroup, SubgroupHom};
use crate::rational::Rational;
use crate::values::{push_value, subgroup_isometry_defect, sup_distance, Cap, Semivalue, ValuedGroup};

/// Achieved sup-distance between the two ways of mapping the shared part,
/// next to the bound the construction guarantees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub sup_distance: Rational,
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamResult {
    pub result: ValuedGroup,
    pub psi1: GroupHom,
    pub psi2: GroupHom,
    pub diagnostics: Diagnostics,
}

struct Pushout {
    product: FiniteAbelianGroup,
    pi: GroupHom,
    psi1: GroupHom,
    psi2: GroupHom,
}

impl Pushout {
    fn new(d1: &FiniteAbelianGroup, d2: &FiniteAbelianGroup, glue: &[usize]) -> Result<Self> {
        let product = d1.product(d2)?;
        let k = Subgroup::generated_by(&product, glue);
        let (q, pi) = quotient(&product, &k)?;
        let inj1: Vec<usize> = (0..d1.rank()).map(|i| d1.pair_index(d2, d1.generator(i), 0)).collect();
        let inj2: Vec<usize> = (0..d2.rank()).map(|i| d1.pair_index(d2, 0, d2.generator(i))).collect();
        let psi1 = GroupHom::from_generator_images(d1, &product, &inj1)?.then(&pi)?;
        let psi2 = GroupHom::from_generator_images(d2, &product, &inj2)?.then(&pi)?;
        debug_assert_eq!(q.order(), pi.target().order());
        Ok(Pushout { product, pi, psi1, psi2 })
    }

    fn target(&self) -> &FiniteAbelianGroup {
        self.pi.target()
    }
}

fn check_isometric(name: &str, source: &ValuedGroup, h: &GroupHom, target: &ValuedGroup) -> Result<()> {
    if h.source() != source.group() || h.target() != target.group() {
        return Err(Error::InvalidHom(format!("{name} has the wrong source or target")));
    }
    if let Some(x) = source.isometry_defect(h, target) {
        return Err(Error::NotIsometric(format!("{name} at {}", source.group().coords(x))));
    }
    Ok(())
}

fn check_sub_isometric(name: &str, source: &ValuedGroup, h: &SubgroupHom, target: &ValuedGroup) -> Result<()> {
    if h.domain().parent() != source.group() || h.target() != target.group() {
        return Err(Error::InvalidHom(format!("{name} has the wrong domain or target")));
    }
    if let Some(x) = subgroup_isometry_defect(source, h, target) {
        return Err(Error::NotIsometric(format!("{name} at {}", source.group().coords(x))));
    }
    Ok(())
}

fn common_class(d1: &ValuedGroup, d2: &ValuedGroup) -> Result<(Cap, u64)> {
    if d1.cap() != d2.cap() || d1.exponent() != d2.exponent() {
        return Err(Error::Precondition("inputs belong to different classes".into()));
    }
    Ok((d1.cap(), d1.exponent()))
}

/// Quotients by the nulls when asked, caps at `r` and checks the embeddings.
fn finish(
    sem: Semivalue,
    po: &Pushout,
    d1: &ValuedGroup,
    d2: &ValuedGroup,
    quotient_nulls: bool,
) -> Result<(ValuedGroup, GroupHom, GroupHom)> {
    let (cap, n) = common_class(d1, d2)?;
    let (sem, psi1, psi2) = if quotient_nulls {
        let (s, pi) = sem.quotient_nulls();
        (s, po.psi1.then(&pi)?, po.psi2.then(&pi)?)
    } else {
        (sem, po.psi1.clone(), po.psi2.clone())
    };
    let sem = match cap.bound() {
        Some(b) => sem.capped(&b),
        None => sem,
    };
    let group = sem.group().clone();
    let result = ValuedGroup::new(&group, sem.into_values(), cap, n)
        .map_err(|e| Error::Postcondition(format!("amalgam is not a value: {e}")))?;
    for (name, d, psi) in [("ψ₁", d1, &psi1), ("ψ₂", d2, &psi2)] {
        if let Some(x) = d.isometry_defect(psi, &result) {
            return Err(Error::Postcondition(format!("{name} not isometric at {}", d.group().coords(x))));
        }
    }
    Ok((result, psi1, psi2))
}

/// Amalgamates `D₁ ← D₀ → D₂` along isometric embeddings, with the
/// fiber-minimum value of `λ₁ + λ₂` on `(D₁ × D₂) / {(φ₁(x), −φ₂(x))}`.
pub fn amalgamate(
    d0: &ValuedGroup,
    d1: &ValuedGroup,
    d2: &ValuedGroup,
    phi1: &GroupHom,
    phi2: &GroupHom,
) -> Result<AmalgamResult> {
    check_isometric("φ₁", d0, phi1, d1)?;
    check_isometric("φ₂", d0, phi2, d2)?;
    let (g1, g2) = (d1.group(), d2.group());
    let glue: Vec<usize> =
        d0.group().elements().map(|x| g1.pair_index(g2, phi1.apply(x), g2.neg(phi2.apply(x)))).collect();
    let po = Pushout::new(g1, g2, &glue)?;
    let sum: Vec<Rational> = po
        .product
        .elements()
        .map(|z| {
            let (a, b) = g1.split_pair(g2, z);
            d1.value(a) + d2.value(b)
        })
        .collect();
    let sem = push_value(&Semivalue::from_trusted(&po.product, sum), &po.pi)?;
    let (result, psi1, psi2) = finish(sem, &po, d1, d2, true)?;
    let left = phi1.then(&psi1)?;
    let right = phi2.then(&psi2)?;
    if left != right {
        return Err(Error::Postcondition("ψ₁∘φ₁ != ψ₂∘φ₂".into()));
    }
    Ok(AmalgamResult {
        result,
        psi1,
        psi2,
        diagnostics: Diagnostics { sup_distance: Rational::zero(), bound: Rational::zero() },
    })
}

/// Checks `(1 − ε)λ₁ ≤ λ₂∘v ≤ (1 + ε)λ₁`.
pub fn almost_isometric_defect(d1: &ValuedGroup, v: &GroupHom, d2: &ValuedGroup, eps: &Rational) -> Option<usize> {
    let lo = Rational::one() - eps;
    let hi = Rational::one() + eps;
    d1.group().elements().find(|&x| {
        let a = d1.value(x);
        let b = d2.value(v.apply(x));
        *b < &lo * a || *b > &hi * a
    })
}

/// Amalgamates `D₁ ⊇ D₀ → D₂` along an isometric `u` while keeping an
/// `ε`-almost isometric `v: D₁ → D₂` within `Aε`, `A = 1 + diam D₁`.
pub fn amalgamate_approx(
    d1: &ValuedGroup,
    d0: &Subgroup,
    d2: &ValuedGroup,
    u: &SubgroupHom,
    v: &GroupHom,
    eps: &Rational,
) -> Result<AmalgamResult> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::Precondition(format!("ε = {eps} must lie in (0, 1)")));
    }
    if u.domain() != d0 {
        return Err(Error::Precondition("u must be defined on D₀".into()));
    }
    check_sub_isometric("u", d1, u, d2)?;
    if v.source() != d1.group() || v.target() != d2.group() {
        return Err(Error::InvalidHom("v has the wrong source or target".into()));
    }
    if let Some(x) = almost_isometric_defect(d1, v, d2, eps) {
        return Err(Error::Precondition(format!("v is not ε-almost isometric at {}", d1.group().coords(x))));
    }
    for (x, ux) in u.pairs() {
        if d2.dist(ux, v.apply(x)) > eps {
            return Err(Error::Precondition(format!("‖u − v|D₀‖ > ε at {}", d1.group().coords(x))));
        }
    }
    amalgamate_approx_unchecked(d1, d2, u, v, eps)
}

/// The construction behind [`amalgamate_approx`] without its preconditions.
pub(crate) fn amalgamate_approx_unchecked(
    d1: &ValuedGroup,
    d2: &ValuedGroup,
    u: &SubgroupHom,
    v: &GroupHom,
    eps: &Rational,
) -> Result<AmalgamResult> {
    let (g1, g2) = (d1.group(), d2.group());
    let glue: Vec<usize> = u.pairs().map(|(x, ux)| g1.pair_index(g2, x, g2.neg(ux))).collect();
    let po = Pushout::new(g1, g2, &glue)?;
    let q = po.target();
    let a_eps = (Rational::one() + d1.diameter()) * eps;
    // gate[x0] = Aε·δ(w₁(x0) − w₂(v(x0)))
    let gate: Vec<Rational> = g1
        .elements()
        .map(|x0| if po.psi1.apply(x0) == po.psi2.apply(v.apply(x0)) { Rational::zero() } else { a_eps.clone() })
        .collect();
    let mut best: Vec<Option<Rational>> = vec![None; q.order()];
    for x1 in g1.elements() {
        for x2 in g2.elements() {
            let z = q.add(po.psi1.apply(x1), po.psi2.apply(x2));
            for x0 in g1.elements() {
                let cand = d1.dist(x1, x0) + &gate[x0] + d2.value(g2.add(x2, v.apply(x0)));
                if best[z].as_ref().is_none_or(|b| cand < *b) {
                    best[z] = Some(cand);
                }
            }
        }
    }
    let table: Vec<Rational> = best.into_iter().map(|b| b.expect("ψ̃₁, ψ̃₂ jointly surjective")).collect();
    let sem = Semivalue::new(q, table).map_err(|e| Error::Postcondition(format!("λ is not a semivalue: {e}")))?;
    if !sem.is_value() {
        return Err(Error::Postcondition("λ vanishes off 0".into()));
    }
    let (result, psi1, psi2) = finish(sem, &po, d1, d2, false)?;
    for (x, ux) in u.pairs() {
        if psi1.apply(x) != psi2.apply(ux) {
            return Err(Error::Postcondition("w₁|D₀ != w₂∘u".into()));
        }
    }
    let w1: Vec<usize> = psi1.table().to_vec();
    let w2v: Vec<usize> = g1.elements().map(|x| psi2.apply(v.apply(x))).collect();
    let achieved = sup_distance(&result, &w1, &w2v);
    if achieved > a_eps {
        return Err(Error::Postcondition(format!("‖w₁ − w₂∘v‖ = {achieved} > Aε = {a_eps}")));
    }
    Ok(AmalgamResult { result, psi1, psi2, diagnostics: Diagnostics { sup_distance: achieved, bound: a_eps } })
}

/// Amalgamates `D₁ ⊇ E₁ → D₂` along the isometric `φ₁` while keeping a second
/// isometric `φ₂: E₂ → D₂` within `ε` of `ψ₁|E₂`.
pub fn amalgamate_mixed(
    d1: &ValuedGroup,
    d2: &ValuedGroup,
    phi1: &SubgroupHom,
    phi2: &SubgroupHom,
    eps: &Rational,
) -> Result<AmalgamResult> {
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("ε = {eps} must be positive")));
    }
    check_sub_isometric("φ₁", d1, phi1, d2)?;
    check_sub_isometric("φ₂", d1, phi2, d2)?;
    let (g1, g2) = (d1.group(), d2.group());
    for (x1, y1) in phi1.pairs() {
        for (x2, y2) in phi2.pairs() {
            let gap = (d2.dist(y1, y2) - d1.dist(x1, x2)).abs();
            if gap > *eps {
                return Err(Error::Precondition(format!(
                    "|λ₂(φ₁(x₁) − φ₂(x₂)) − λ₁(x₁ − x₂)| = {gap} > ε at ({}, {})",
                    g1.coords(x1),
                    g1.coords(x2)
                )));
            }
        }
    }
    let glue: Vec<usize> = phi1.pairs().map(|(x, y)| g1.pair_index(g2, x, g2.neg(y))).collect();
    let po = Pushout::new(g1, g2, &glue)?;
    let q = po.target();
    let mut best: Vec<Option<Rational>> = vec![None; q.order()];
    for (x2, y2) in phi2.pairs() {
        let gate = if po.psi1.apply(x2) == po.psi2.apply(y2) { Rational::zero() } else { eps.clone() };
        for x1 in g1.elements() {
            let head = d1.dist(x1, x2) + &gate;
            for y in g2.elements() {
                let z = q.add(po.psi1.apply(x1), po.psi2.apply(y));
                let cand = &head + d2.value(g2.add(y, y2));
                if best[z].as_ref().is_none_or(|b| cand < *b) {
                    best[z] = Some(cand);
                }
            }
        }
    }
    let table: Vec<Rational> = best.into_iter().map(|b| b.expect("ψ̃₁, ψ̃₂ jointly surjective")).collect();
    let sem = Semivalue::new(q, table).map_err(|e| Error::Postcondition(format!("λ̃ is not a semivalue: {e}")))?;
    let (result, psi1, psi2) = finish(sem, &po, d1, d2, true)?;
    for (x, y) in phi1.pairs() {
        if psi1.apply(x) != psi2.apply(y) {
            return Err(Error::Postcondition("ψ₂∘φ₁ != ψ₁|E₁".into()));
        }
    }
    let (left, right): (Vec<usize>, Vec<usize>) = phi2.pairs().map(|(x, y)| (psi1.apply(x), psi2.apply(y))).unzip();
    let achieved = sup_distance(&result, &left, &right);
    if achieved > *eps {
        return Err(Error::Postcondition(format!("‖ψ₁|E₂ − ψ₂∘φ₂‖ = {achieved} > ε")));
    }
    Ok(AmalgamResult { result, psi1, psi2, diagnostics: Diagnostics { sup_distance: achieved, bound: eps.clone() } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::isometric_isomorphic;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn vg(factors: Vec<u64>, t: Vec<Rational>, cap: Cap, n: u64) -> ValuedGroup {
        ValuedGroup::new(&FiniteAbelianGroup::new(factors).unwrap(), t, cap, n).unwrap()
    }

    #[test]
    fn a1_z2_into_z4() {
        let d0 = vg(vec![2], vec![q(0, 1), q(1, 1)], Cap::Infinite, 0);
        let d1 = d0.clone();
        let d2 = vg(vec![4], vec![q(0, 1), q(1, 2), q(1, 1), q(1, 2)], Cap::Infinite, 0);
        let phi1 = GroupHom::identity(d0.group());
        let phi2 = GroupHom::from_generator_images(d0.group(), d2.group(), &[2]).unwrap();
        let out = amalgamate(&d0, &d1, &d2, &phi1, &phi2).unwrap();
        assert!(isometric_isomorphic(&out.result, &d2).is_some());
    }

    #[test]
    fn a1_trivial_base_is_direct_sum() {
        let t = ValuedGroup::trivial(Cap::One, 2);
        let d1 = vg(vec![2], vec![q(0, 1), q(1, 2)], Cap::One, 2);
        let d2 = vg(vec![2], vec![q(0, 1), q(3, 4)], Cap::One, 2);
        let phi1 = GroupHom::from_generator_images(t.group(), d1.group(), &[]).unwrap();
        let phi2 = GroupHom::from_generator_images(t.group(), d2.group(), &[]).unwrap();
        let out = amalgamate(&t, &d1, &d2, &phi1, &phi2).unwrap();
        assert_eq!(out.result.order(), 4);
        let mut vals = out.result.value_multiset();
        vals.dedup();
        assert_eq!(vals, vec![q(0, 1), q(1, 2), q(3, 4), q(1, 1)]);
    }

    #[test]
    fn a1_over_everything() {
        let d = vg(vec![4], vec![q(0, 1), q(1, 2), q(1, 1), q(1, 2)], Cap::One, 4);
        let id = GroupHom::identity(d.group());
        let out = amalgamate(&d, &d, &d, &id, &id).unwrap();
        assert!(isometric_isomorphic(&out.result, &d).is_some());
    }

    #[test]
    fn a1_rejects_non_isometric() {
        let d0 = vg(vec![2], vec![q(0, 1), q(1, 1)], Cap::Infinite, 0);
        let d2 = vg(vec![4], vec![q(0, 1), q(1, 2), q(1, 2), q(1, 2)], Cap::Infinite, 0);
        let phi2 = GroupHom::from_generator_images(d0.group(), d2.group(), &[2]).unwrap();
        let id = GroupHom::identity(d0.group());
        assert!(matches!(amalgamate(&d0, &d0, &d2, &id, &phi2), Err(Error::NotIsometric(_))));
    }

    #[test]
    fn a2_example() {
        let d1 = vg(vec![2], vec![q(0, 1), q(1, 1)], Cap::Infinite, 2);
        let d2 = d1.clone();
        let d0 = Subgroup::trivial(d1.group());
        let u = SubgroupHom::new(&d0, d2.group(), vec![0]).unwrap();
        let v = GroupHom::identity(d1.group());
        let out = amalgamate_approx(&d1, &d0, &d2, &u, &v, &q(1, 4)).unwrap();
        let z = out.result.group().add(out.psi1.apply(1), out.psi2.apply(1));
        assert_eq!(out.result.value(z), &q(1, 2));
        assert_eq!(out.diagnostics.sup_distance, q(1, 2));
        assert_eq!(out.diagnostics.bound, q(1, 2));

        assert!(matches!(amalgamate_approx(&d1, &d0, &d2, &u, &v, &q(1, 1)), Err(Error::Precondition(_))));
        let wide = amalgamate_approx_unchecked(&d1, &d2, &u, &v, &q(1, 1)).unwrap();
        let z = wide.result.group().add(wide.psi1.apply(1), wide.psi2.apply(1));
        assert_eq!(wide.result.value(z), &q(2, 1));
    }

    #[test]
    fn a2_exact_when_isometric_everywhere() {
        let d1 = vg(vec![4], vec![q(0, 1), q(1, 2), q(1, 1), q(1, 2)], Cap::One, 4);
        let whole = Subgroup::whole(d1.group());
        let v = GroupHom::identity(d1.group());
        let u = SubgroupHom::restrict(&v, &whole).unwrap();
        let out = amalgamate_approx(&d1, &whole, &d1, &u, &v, &q(1, 8)).unwrap();
        assert_eq!(out.diagnostics.sup_distance, Rational::zero());
    }

    #[test]
    fn a3_klein_subgroups() {
        // D₁ = D₂ = ℤ₂ × ℤ₂ with values (0, 1, 1, 1/2) on (00, 01, 10, 11)
        let d = vg(vec![2, 2], vec![q(0, 1), q(1, 1), q(1, 1), q(1, 2)], Cap::Infinite, 2);
        let g = d.group().clone();
        let e1 = Subgroup::generated_by(&g, &[1]);
        let e2 = Subgroup::generated_by(&g, &[2]);
        let phi1 = SubgroupHom::new(&e1, &g, vec![0, 1]).unwrap();
        let phi2 = SubgroupHom::new(&e2, &g, vec![0, 1]).unwrap();
        let out = amalgamate_mixed(&d, &d, &phi1, &phi2, &q(1, 2)).unwrap();
        assert!(out.diagnostics.sup_distance <= q(1, 2));

        let same = amalgamate_mixed(&d, &d, &phi1, &phi1, &q(1, 2)).unwrap();
        assert_eq!(same.diagnostics.sup_distance, Rational::zero());
    }
}
