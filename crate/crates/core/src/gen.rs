//! Seeded random instances for the property suites.
//!
//! Every instance is drawn from a [`Gen`] built from a `u64` seed and a stream
//! number, so instance `i` of a suite does not depend on how many random
//! numbers instance `i − 1` consumed.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::extension::{check_trv_n, KatetovMap};
use crate::free::FiniteMetricSpace;
use crate::group::{abelian_group_shapes, all_subgroups, FiniteAbelianGroup, GroupHom, Subgroup, SubgroupHom};
use crate::modulus::{build_ort_triple, check_ort, Modulus};
use crate::pv::StepFunction;
use crate::rational::{dyadic, Extended, Rational};
use crate::values::{complete_cost, complete_finite, Cap, CostFunction, ValuedGroup};

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Stream `i` of the generator seeded with `seed`.
    pub fn stream(seed: u64, i: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        Gen { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }

    /// `k / 2^log2` with `k` uniform in `lo..=hi`.
    pub fn dyadic(&mut self, lo: i64, hi: i64, log2: u32) -> Rational {
        dyadic(self.rng.gen_range(lo..=hi), log2)
    }

    /// `k` distinct indices below `n`, sorted.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut v = rand::seq::index::sample(&mut self.rng, n, k).into_vec();
        v.sort_unstable();
        v
    }

    /// A nontrivial group of order at most `max_order` whose exponent divides `n` (any exponent for `n = 0`).
    pub fn group(&mut self, max_order: usize, n: u64) -> FiniteAbelianGroup {
        let shapes: Vec<Vec<u64>> = abelian_group_shapes(max_order, n).into_iter().filter(|s| !s.is_empty()).collect();
        FiniteAbelianGroup::new(self.pick(&shapes).clone()).expect("shape of bounded order")
    }

    /// A value on `g` with every entry on the grid `2^−log2 ℤ`: the completion
    /// of random positive grid costs, at most `1` for cap 1 and `2` otherwise.
    pub fn grid_value(&mut self, g: &FiniteAbelianGroup, log2: u32, cap: Cap, n: u64) -> ValuedGroup {
        let top = match cap {
            Cap::One => 1i64 << log2,
            Cap::Infinite => 2i64 << log2,
        };
        let lo = self.rng.gen_range(1..=top);
        let mut cost = vec![Rational::zero(); g.order()];
        for x in g.elements().skip(1) {
            let nx = g.neg(x);
            if nx < x {
                cost[x] = cost[nx].clone();
            } else {
                cost[x] = self.dyadic(lo, top, log2);
            }
        }
        let sem = complete_finite(g, cost).expect("symmetric finite costs");
        ValuedGroup::new(g, sem.into_values(), cap, n).expect("positive costs complete to a value")
    }

    /// A random group of bounded order with a random grid value.
    pub fn valued_group(&mut self, max_order: usize, log2: u32, cap: Cap, n: u64) -> ValuedGroup {
        let g = self.group(max_order, n);
        self.grid_value(&g, log2, cap, n)
    }

    /// A random subgroup, the whole group included.
    pub fn subgroup(&mut self, g: &FiniteAbelianGroup) -> Subgroup {
        let all = all_subgroups(g);
        self.pick(&all).clone()
    }

    /// `n` points with grid distances in `[2^−log2, max_k · 2^−log2]`, closed under shortest paths.
    pub fn metric_space(&mut self, n: usize, log2: u32, max_k: i64) -> FiniteMetricSpace {
        let mut d = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.dyadic(1, max_k, log2);
                d[i][j] = v.clone();
                d[j][i] = v;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = &d[i][k] + &d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        FiniteMetricSpace::new((0..n).map(|i| i.to_string()).collect(), d).expect("shortest-path closure is a metric")
    }

    /// A Katětov map on `size` random points with grid values in `(0, top]`,
    /// satisfying (trv-n) when `n > 2`. Falls back to the constant `top`
    /// after repeated rejections.
    pub fn katetov(&mut self, base: &ValuedGroup, size: usize, log2: u32, top: &Rational, n: u64) -> KatetovMap {
        let cap = base.cap();
        let domain = self.subset(base.order(), size.min(base.order()));
        let top_k = (top * Rational::from_integer(1 << log2)).inner().floor().to_integer();
        let top_k: i64 = top_k.try_into().expect("small grid");
        for _ in 0..400 {
            let pairs: Vec<(usize, Rational)> = domain.iter().map(|&a| (a, self.dyadic(1, top_k, log2))).collect();
            if let Ok(f) = KatetovMap::new(base, pairs, cap) {
                if n <= 2 || check_trv_n(&f, n).is_none() {
                    return f;
                }
            }
        }
        let pairs = domain.iter().map(|&a| (a, top.clone())).collect();
        KatetovMap::new(base, pairs, cap).expect("a constant at least half the diameter is Katětov")
    }

    /// A step function over `host` with up to `max_pieces` pieces and grid breakpoints.
    pub fn step_function(&mut self, host: &Arc<ValuedGroup>, max_pieces: usize, log2: u32) -> StepFunction {
        let k = self.rng.gen_range(0..=max_pieces);
        let mut t = Rational::zero();
        let mut pieces = Vec::with_capacity(k);
        for _ in 0..k {
            t = t + self.dyadic(1, 4 << log2, log2);
            pieces.push((t.clone(), self.below(host.order())));
        }
        StepFunction::new(host.clone(), pieces).expect("increasing breakpoints")
    }

    /// A concave nondecreasing piecewise-linear modulus with grid breakpoints.
    pub fn modulus(&mut self, log2: u32) -> Modulus {
        let k = self.rng.gen_range(0..=3);
        let mut slopes: Vec<Rational> = (0..=k).map(|_| self.dyadic(0, 3 << log2, log2)).collect();
        slopes.sort_unstable_by(|a, b| b.cmp(a));
        if slopes[0].is_zero() {
            slopes[0] = Rational::one();
        }
        let mut points = vec![(Rational::zero(), Rational::zero())];
        for s in &slopes[..k] {
            let (t, w) = points.last().expect("nonempty").clone();
            let dt = self.dyadic(1, 2 << log2, log2);
            points.push((&t + &dt, w + s * &dt));
        }
        Modulus::new(points, slopes[k].clone()).expect("concave moduli are subadditive")
    }

    /// A triple `(ω, ϱ, τ)` passing the two-modulus condition for class `r`.
    pub fn ort_triple(&mut self, r: Cap, log2: u32) -> (Modulus, Modulus, Modulus) {
        loop {
            let (w0, p0, t0) = (self.modulus(log2), self.modulus(log2), self.modulus(log2));
            if let Ok((w, p, t)) = build_ort_triple(&w0, &p0, &t0, r) {
                if check_ort(&w, &p, &t, r) {
                    return (w, p, t);
                }
            }
        }
    }
}

/// `D₁ ← D₀ → D₂` with isometric embeddings.
#[derive(Clone, Debug)]
pub struct A1Instance {
    pub d0: ValuedGroup,
    pub d1: ValuedGroup,
    pub d2: ValuedGroup,
    pub phi1: GroupHom,
    pub phi2: GroupHom,
}

/// `D₁ ⊇ D₀`, an isometric `u: D₀ → D₂` and an `ε`-almost isometric `v: D₁ → D₂`.
#[derive(Clone, Debug)]
pub struct A2Instance {
    pub d1: ValuedGroup,
    pub d0: Subgroup,
    pub d2: ValuedGroup,
    pub u: SubgroupHom,
    pub v: GroupHom,
    pub eps: Rational,
}

/// Two isometric maps `φ₁: E₁ → D₂`, `φ₂: E₂ → D₂` from subgroups of `D₁`.
#[derive(Clone, Debug)]
pub struct A3Instance {
    pub d1: ValuedGroup,
    pub d2: ValuedGroup,
    pub phi1: SubgroupHom,
    pub phi2: SubgroupHom,
    pub eps: Rational,
}

/// Input of the modulus extension: `λ₀` on `D₀ ≤ D` aligned with `d0.elements()`.
#[derive(Clone, Debug)]
pub struct ModulusExtensionInstance {
    pub d: ValuedGroup,
    pub d0: Subgroup,
    pub lambda0: Vec<Rational>,
    pub omega: Modulus,
    pub rho: Modulus,
    pub tau: Modulus,
}

/// Completes costs that equal `λ` on `keep` and `λ·(1 + δ)` elsewhere, `δ ∈ [0, ε]`.
fn perturbed(gen: &mut Gen, d: &ValuedGroup, keep: &[bool], eps: &Rational) -> ValuedGroup {
    let g = d.group();
    let mut cost = vec![Rational::zero(); g.order()];
    for x in g.elements().skip(1) {
        let nx = g.neg(x);
        cost[x] = if nx < x {
            cost[nx].clone()
        } else if keep[x] || keep[nx] {
            d.value(x).clone()
        } else {
            let delta = eps * &Rational::new(gen.rng.gen_range(0..=4), 4);
            d.value(x) * &(Rational::one() + delta)
        };
    }
    let mut t = complete_finite(g, cost).expect("symmetric finite costs").into_values();
    if d.cap() == Cap::One {
        for v in t.iter_mut() {
            if *v > Rational::one() {
                *v = Rational::one();
            }
        }
    }
    ValuedGroup::new(g, t, d.cap(), d.exponent()).expect("perturbation of a value")
}

impl Gen {
    pub fn a1(&mut self, max_order: usize, log2: u32, cap: Cap, n: u64) -> A1Instance {
        let d1 = self.valued_group(max_order, log2, cap, n);
        let s = self.subgroup(d1.group());
        let (d0, phi1) = d1.restrict(&s);
        let h = d0.group();
        let ks: Vec<u64> =
            (2..=max_order as u64 / h.order() as u64).filter(|&k| n == 0 || n.is_multiple_of(k)).collect();
        if ks.is_empty() {
            return A1Instance { d2: d1.clone(), phi2: phi1.clone(), d0, d1, phi1 };
        }
        let k = *self.pick(&ks);
        let z = FiniteAbelianGroup::cyclic(k);
        let g2 = h.product(&z).expect("small product");
        let den = 1i64 << log2;
        let half = (d0.diameter() / Rational::from_integer(2)).ceil_to(den as u64);
        let lo_k: i64 = (&half * Rational::from_integer(den)).inner().to_integer().try_into().expect("small");
        let top = if cap == Cap::One { den } else { 2 * den };
        let mut cost = CostFunction::empty(&g2);
        for x in h.elements() {
            for y in 0..k as usize {
                let xy = h.pair_index(&z, x, y);
                if y == 0 {
                    cost.offer(xy, d0.value(x));
                } else {
                    let nxy = g2.neg(xy);
                    if nxy < xy {
                        let c = cost.cost(nxy).finite().expect("set above").clone();
                        cost.offer(xy, &c);
                    } else {
                        let c = self.dyadic(lo_k.max(1), top.max(lo_k.max(1)), log2);
                        cost.offer(xy, &c);
                    }
                }
            }
        }
        let table: Vec<Rational> = complete_cost(&cost)
            .values
            .into_iter()
            .map(|v| match v {
                Extended::Finite(v) => v,
                Extended::Infinite => unreachable!("every element has a finite atom cost"),
            })
            .collect();
        let d2 = ValuedGroup::new(&g2, table, cap, n).expect("completion of positive costs");
        let images: Vec<usize> = (0..h.rank()).map(|i| h.pair_index(&z, h.generator(i), 0)).collect();
        let phi2 = GroupHom::from_generator_images(h, &g2, &images).expect("coordinate embedding");
        A1Instance { d0, d1, d2, phi1, phi2 }
    }

    pub fn a2(&mut self, max_order: usize, log2: u32, cap: Cap, n: u64) -> A2Instance {
        let d1 = self.valued_group(max_order, log2, cap, n);
        let g = d1.group().clone();
        let d0 = self.subgroup(&g);
        let eps =
            self.pick(&[Rational::new(1, 8), Rational::new(1, 4), Rational::new(1, 2), Rational::new(3, 4)]).clone();
        let keep: Vec<bool> = g.elements().map(|x| d0.contains(x)).collect();
        let d2 = perturbed(self, &d1, &keep, &eps);
        let v = GroupHom::identity(&g);
        let u = SubgroupHom::restrict(&v, &d0).expect("subgroup of the source");
        A2Instance { d1, d0, d2, u, v, eps }
    }

    pub fn a3(&mut self, max_order: usize, log2: u32, cap: Cap, n: u64) -> A3Instance {
        let d1 = self.valued_group(max_order, log2, cap, n);
        let g = d1.group().clone();
        let (e1, e2) = (self.subgroup(&g), self.subgroup(&g));
        let keep: Vec<bool> = g.elements().map(|x| e1.contains(x) || e2.contains(x)).collect();
        let d2 = perturbed(self, &d1, &keep, &Rational::new(1, 2));
        let id = GroupHom::identity(&g);
        let phi1 = SubgroupHom::restrict(&id, &e1).expect("subgroup of the source");
        let phi2 = SubgroupHom::restrict(&id, &e2).expect("subgroup of the source");
        let mut eps = Rational::new(1, 8);
        for &x1 in e1.elements() {
            for &x2 in e2.elements() {
                eps = eps.max((d2.dist(x1, x2) - d1.dist(x1, x2)).abs());
            }
        }
        A3Instance { d1, d2, phi1, phi2, eps }
    }

    /// `λ₀(h) = min_{z ∈ Z} ω(λ(h − z))` for a random `Z ≤ D₀`, which meets
    /// both preconditions of the modulus extension by construction.
    pub fn modulus_extension(&mut self, max_order: usize, log2: u32, cap: Cap, n: u64) -> ModulusExtensionInstance {
        let (omega, rho, tau) = self.ort_triple(cap, log2);
        let d = self.valued_group(max_order, log2, cap, n);
        let g = d.group().clone();
        let d0 = self.subgroup(&g);
        let inside: Vec<Subgroup> = all_subgroups(&g).into_iter().filter(|z| z.is_subgroup_of(&d0)).collect();
        let z = self.pick(&inside).clone();
        let lambda0 = d0
            .elements()
            .iter()
            .map(|&h| z.elements().iter().map(|&w| omega.eval(d.dist(h, w))).min().expect("Z contains 0"))
            .collect();
        ModulusExtensionInstance { d, d0, lambda0, omega, rho, tau }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a = Gen::stream(7, 3).valued_group(16, 3, Cap::One, 4);
        let b = Gen::stream(7, 3).valued_group(16, 3, Cap::One, 4);
        assert_eq!(a, b);
        assert!(a.is_grid_valued(8));
        assert_eq!(4 % a.group().exponent(), 0);
    }

    #[test]
    fn instances_are_well_formed() {
        for i in 0..20 {
            let mut gen = Gen::stream(1, i);
            let a1 = gen.a1(16, 3, Cap::One, 2);
            assert!(a1.d0.is_isometric_embedding(&a1.phi1, &a1.d1));
            assert!(a1.d0.is_isometric_embedding(&a1.phi2, &a1.d2));
            let s = gen.metric_space(5, 2, 8);
            assert_eq!(s.len(), 5);
            let host = Arc::new(gen.valued_group(8, 2, Cap::Infinite, 0));
            let diam = host.diameter();
            let f = gen.katetov(&host, 3, 2, &diam, 0);
            assert!(f.max_value() <= diam);
            let w = gen.modulus(2);
            assert!(w.is_positive());
        }
    }
}
