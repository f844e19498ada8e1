//! Named property suites. Each returns a [`SuiteReport`] listing every failed check.

use std::sync::Arc;

use serde::Serialize;

use crate::amalgam::{amalgamate, amalgamate_approx, amalgamate_mixed};
use crate::error::{Error, Result};
use crate::extension::{check_trv_n, extend_onegen, extend_semivalue_modulus, KatetovMap};
use crate::fraisse::{
    build_chain, chain_json, enumerate_catalog, verify_embeddings, verify_ledger, verify_tasks, ChainBudget,
    ChainConfig, DEFAULT_SEARCH_BUDGET, DEFAULT_TABLE_BUDGET,
};
use crate::free::{free_group, induced_map, odd_inclusion_space, pd_matching, word_metric, zn_generating_set};
use crate::gen::Gen;
use crate::group::{abelian_group_shapes, FiniteAbelianGroup};
use crate::modulus::PiecewiseLinear;
use crate::pv::{check_kappa_norm, nabla_pl, norming_violation, NormingFunction, StepFunction};
use crate::rational::{Extended, Rational};
use crate::values::{complete_cost, validate_value, Cap, CostFunction, ValuedGroup};

/// Suite names with one-line descriptions, in acceptance order.
pub const SUITES: &[(&str, &str)] = &[
    ("zn-norms", "word norms on Z_N^N for N = 3, 4, 5"),
    ("katetov-counterexamples", "Katetov maps failing the exponent-N condition"),
    ("trv", "one-generator extensions of admissible Katetov maps"),
    ("matching", "N = 2 free values against minimum perfect matchings"),
    ("pd-isometry", "X embeds isometrically in Z_N[X]"),
    ("odd-inclusion", "the non-isometric inclusion Z_3[A] -> Z_3[X]"),
    ("amalgamation", "the three amalgamation constructions"),
    ("completion", "cost completion against bounded-length decompositions"),
    ("fraisse", "finite Fraisse chain and its extension property"),
    ("modulus-extension", "value extension through a modulus triple"),
    ("pv", "the integral norm on step functions and norming functions"),
    ("three-point-maps", "three-point inner Katetov maps for N = 4"),
];

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub checked: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    /// A deterministic artifact, e.g. the chain JSON of the Fraïssé suite.
    #[serde(skip)]
    pub artifact: Option<String>,
}

impl SuiteReport {
    fn new(name: &str, seed: u64) -> Self {
        SuiteReport { name: name.into(), seed, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn summary(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {}: {} checks, {} failures", self.name, self.checked, self.failures.len());
        for n in &self.notes {
            s.push_str("; ");
            s.push_str(n);
        }
        s
    }
}

pub fn run(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "zn-norms" => Ok(zn_norms()),
        "katetov-counterexamples" => katetov_counterexamples(),
        "trv" => Ok(trv(seed)),
        "matching" => matching(seed),
        "pd-isometry" => pd_isometry(seed),
        "odd-inclusion" => odd_inclusion(),
        "amalgamation" => Ok(amalgamation(seed)),
        "completion" => Ok(completion(seed)),
        "fraisse" => fraisse(&fraisse_config()),
        "modulus-extension" => Ok(modulus_extension(seed)),
        "pv" => pv(seed),
        "three-point-maps" => Ok(three_point_maps(seed)),
        other => Err(Error::Precondition(format!("unknown suite {other:?}"))),
    }
}

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

/// Weak compositions of `n` into `k` parts.
pub fn compositions(n: u64, k: usize) -> Vec<Vec<u64>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn zn_norms() -> SuiteReport {
    let mut rep = SuiteReport::new("zn-norms", 0);
    for n in 3..=5u64 {
        let f = zn_generating_set(n).expect("small group");
        let v = word_metric(&f, &Rational::one()).expect("F generates");
        let g = v.group();
        let e: Vec<usize> = (0..n as usize).map(|j| g.generator(j)).collect();
        for &a in &e {
            for &b in &e {
                if a != b {
                    let d = v.dist(a, b);
                    rep.check(*d == Rational::one(), || format!("N={n}: ‖e_j − e_k‖ = {d}"));
                }
            }
        }
        let all = e.iter().fold(0, |s, &x| g.add(s, x));
        let top = v.value(all).clone();
        rep.check(top == Rational::from_integer(n as i64 - 1), || format!("N={n}: ‖Σe_j‖ = {top}"));
        for c in compositions(n, n as usize) {
            let x = c.iter().zip(&e).fold(0, |s, (&k, &ej)| g.add(s, g.mul(k as i64, ej)));
            let bound = Rational::from_integer((n - c.iter().max().expect("n parts")) as i64);
            let val = v.value(x).clone();
            rep.check(val <= bound, || format!("N={n}: ‖Σ n_j e_j‖ = {val} > {bound} for {c:?}"));
        }
        rep.notes.push(format!("N={n}: ‖Σe_j‖ = {top}"));
    }
    rep
}

/// The constant map `max(1/2, 1 − 2/N)` on the generators of the word-metric `ℤ_N^N`.
pub fn constant_generator_map(n: u64) -> Result<KatetovMap> {
    let f = zn_generating_set(n)?;
    let v = word_metric(&f, &Rational::one())?;
    let c = r(1, 2).max(Rational::one() - r(2, n as i64));
    let pairs = (0..n as usize).map(|j| (v.group().generator(j), c.clone())).collect();
    KatetovMap::new(&v, pairs, Cap::Infinite)
}

/// `ℤ₃` with `q ≡ 1` off zero and `f(0) = 3/2`, `f(h) = f(2h) = 1/2`.
pub fn z3_obstruction_map() -> Result<KatetovMap> {
    let g = FiniteAbelianGroup::cyclic(3);
    let q = ValuedGroup::new(&g, vec![r(0, 1), r(1, 1), r(1, 1)], Cap::Infinite, 3)?;
    KatetovMap::new(&q, vec![(0, r(3, 2)), (1, r(1, 2)), (2, r(1, 2))], Cap::Infinite)
}

pub fn katetov_counterexamples() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("katetov-counterexamples", 0);
    for n in 3..=5u64 {
        let f = constant_generator_map(n)?;
        let w = check_trv_n(&f, n);
        rep.check(w.is_some(), || format!("N={n}: constant map passed trv-{n}"));
        if let Some(w) = w {
            let g = f.base().group();
            let ws: Vec<String> = w.iter().map(|&x| g.coords(x).to_string()).collect();
            rep.notes.push(format!("N={n} witness {}", ws.join(" ")));
        }
    }
    let f = z3_obstruction_map()?;
    rep.check(f.domain_is_subgroup(), || "Z_3 map domain is not a subgroup".into());
    let w = check_trv_n(&f, 3);
    rep.check(w.is_some(), || "Z_3 map map passed trv-3".into());
    if let Some(w) = w {
        let ws: Vec<String> = w.iter().map(|&x| f.base().group().coords(x).to_string()).collect();
        rep.notes.push(format!("Z_3 map witness {}", ws.join(" ")));
    }
    Ok(rep)
}

pub const TRV_INSTANCES: u64 = 200;

pub fn trv(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("trv", seed);
    for i in 0..TRV_INSTANCES {
        let mut gen = Gen::stream(seed, i);
        let n = [2u64, 3, 4, 0][(i % 4) as usize];
        let cap = if (i / 4) % 2 == 0 { Cap::One } else { Cap::Infinite };
        let base = gen.valued_group(16, 3, cap, n);
        let top = match cap {
            Cap::One => Rational::one(),
            Cap::Infinite => base.diameter().max(Rational::one()),
        };
        let size = 1 + gen.below(4);
        let f = gen.katetov(&base, size, 3, &top, n);
        let tag = format!("instance {i} (N={n}, cap {cap}, |G|={})", base.order());
        let ext = match extend_onegen(&f, n, cap) {
            Ok(e) => e,
            Err(e) => {
                rep.check(false, || format!("{tag}: {e}"));
                continue;
            }
        };
        let p = &ext.result;
        rep.check(base.is_isometric_embedding(&ext.embedding, p), || format!("{tag}: p̃|G != p"));
        let realized = f.pairs().all(|(a, v)| p.dist(ext.embedding.apply(a), ext.witness) == v);
        rep.check(realized, || format!("{tag}: p̃(a − b) != f(a)"));
        let valid = validate_value(p.group(), p.values().to_vec(), cap, n);
        rep.check(valid.is_ok(), || format!("{tag}: {:?}", valid.err()));
        let class = p.cap() == cap && p.exponent() == n && (n == 0 || p.group().has_exponent_dividing(n));
        rep.check(class, || format!("{tag}: class not preserved"));
        rep.check(p.is_grid_valued(8), || format!("{tag}: off the 1/8 grid"));
    }
    rep
}

pub fn matching(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("matching", seed);
    for i in 0..100 {
        let mut gen = Gen::stream(seed, i);
        let size = 2 + gen.below(5);
        let x = gen.metric_space(size, 2, 8);
        let fx = free_group(&x, 2, Cap::Infinite)?;
        for f in fx.carrier().elements().skip(1) {
            let m = pd_matching(&fx, f)?;
            let p = fx.pd(f);
            rep.check(m == *p, || format!("space {i}: matching {m} != p_d {p} at {:?}", fx.coefficients(f)));
        }
    }
    Ok(rep)
}

pub fn pd_isometry(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("pd-isometry", seed);
    for n in [2u64, 3, 4] {
        for i in 0..50 {
            let mut gen = Gen::stream(seed, n * 1000 + i);
            let size = 2 + gen.below(3);
            let x = gen.metric_space(size, 2, 8);
            let fx = free_group(&x, n, Cap::Infinite)?;
            for a in 0..size {
                for b in 0..size {
                    let p = fx.pd(fx.hat_diff(a, b));
                    rep.check(p == x.dist(a, b), || format!("N={n} space {i}: p_d({a}−{b}) = {p}"));
                }
            }
        }
    }
    Ok(rep)
}

pub fn odd_inclusion() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("odd-inclusion", 0);
    let x = odd_inclusion_space(3)?;
    let fx = free_group(&x, 3, Cap::Infinite)?;
    let f = fx.from_coefficients(&[0, 1, 1, 1])?;
    let a = x.subspace(&[1, 2, 3])?;
    let fa = free_group(&a, 3, Cap::Infinite)?;
    let g = fa.from_coefficients(&[1, 1, 1])?;
    let (px, pa) = (fx.pd(f).clone(), fa.pd(g).clone());
    rep.check(px == r(3, 2), || format!("p_d(f) = {px} in Z_3[X]"));
    rep.check(pa == r(2, 1), || format!("p_ϱ(f) = {pa} in Z_3[A]"));
    let inc = induced_map(&fa, &fx, &[1, 2, 3])?;
    rep.check(inc.hom.apply(g) == f, || "inclusion does not send f to f".into());
    rep.check(!fa.value().is_isometric_embedding(&inc.hom, fx.value()), || "inclusion is isometric".into());
    rep.notes.push(format!("p_ϱ(f) = {pa}, p_d(f) = {px}"));
    Ok(rep)
}

pub fn amalgamation(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("amalgamation", seed);
    let class = |i: u64| {
        let n = [2u64, 4, 3, 0][(i % 4) as usize];
        let cap = if (i / 4).is_multiple_of(2) { Cap::One } else { Cap::Infinite };
        (n, cap)
    };
    for i in 0..200 {
        let (n, cap) = class(i);
        let inst = Gen::stream(seed, i).a1(16, 3, cap, n);
        let tag = format!("A1 {i}");
        let out = match amalgamate(&inst.d0, &inst.d1, &inst.d2, &inst.phi1, &inst.phi2) {
            Ok(o) => o,
            Err(e) => {
                rep.check(false, || format!("{tag}: {e}"));
                continue;
            }
        };
        let d = &out.result;
        rep.check(inst.d1.is_isometric_embedding(&out.psi1, d), || format!("{tag}: ψ₁ not isometric"));
        rep.check(inst.d2.is_isometric_embedding(&out.psi2, d), || format!("{tag}: ψ₂ not isometric"));
        let square = inst.phi1.then(&out.psi1).ok() == inst.phi2.then(&out.psi2).ok();
        rep.check(square, || format!("{tag}: square does not commute"));
        let kept = d.cap() == cap && d.exponent() == n && (n == 0 || d.group().has_exponent_dividing(n));
        rep.check(kept, || format!("{tag}: class not preserved"));
        rep.check(d.is_grid_valued(8), || format!("{tag}: off the 1/8 grid"));
    }
    let mut worst = Rational::zero();
    for i in 0..50 {
        let (n, cap) = class(i);
        let inst = Gen::stream(seed, 1000 + i).a2(16, 3, cap, n);
        let tag = format!("A2 {i}");
        match amalgamate_approx(&inst.d1, &inst.d0, &inst.d2, &inst.u, &inst.v, &inst.eps) {
            Ok(out) => {
                let bound = (Rational::one() + inst.d1.diameter()) * &inst.eps;
                let achieved = inst
                    .d1
                    .group()
                    .elements()
                    .map(|x| out.result.dist(out.psi1.apply(x), out.psi2.apply(inst.v.apply(x))).clone())
                    .max()
                    .expect("nonempty");
                rep.check(achieved <= bound, || format!("{tag}: ‖w₁ − w₂∘v‖ = {achieved} > {bound}"));
                rep.check(achieved == out.diagnostics.sup_distance, || format!("{tag}: reported distance differs"));
                if !bound.is_zero() {
                    worst = worst.max(achieved / bound);
                }
            }
            Err(e) => rep.check(false, || format!("{tag}: {e}")),
        }
    }
    rep.notes.push(format!("A2 worst achieved/bound = {worst}"));
    for i in 0..50 {
        let (n, cap) = class(i);
        let inst = Gen::stream(seed, 2000 + i).a3(16, 3, cap, n);
        let tag = format!("A3 {i}");
        match amalgamate_mixed(&inst.d1, &inst.d2, &inst.phi1, &inst.phi2, &inst.eps) {
            Ok(out) => {
                let exact = inst.phi1.pairs().all(|(x, y)| out.psi2.apply(y) == out.psi1.apply(x));
                rep.check(exact, || format!("{tag}: ψ₂∘φ₁ != ψ₁|E₁"));
                let sup = inst
                    .phi2
                    .pairs()
                    .map(|(x, y)| out.result.dist(out.psi1.apply(x), out.psi2.apply(y)).clone())
                    .max()
                    .expect("E₂ contains 0");
                rep.check(sup <= inst.eps, || format!("{tag}: sup distance {sup} > ε = {}", inst.eps));
            }
            Err(e) => rep.check(false, || format!("{tag}: {e}")),
        }
    }
    rep
}

/// A random symmetric cost table on `g`; about a quarter of the entries are `∞`.
pub fn random_cost(gen: &mut Gen, g: &FiniteAbelianGroup) -> CostFunction {
    let mut cost = vec![Extended::Infinite; g.order()];
    cost[0] = Extended::zero();
    for x in g.elements().skip(1) {
        let nx = g.neg(x);
        cost[x] = if nx < x {
            cost[nx].clone()
        } else if gen.below(4) == 0 {
            Extended::Infinite
        } else {
            Extended::Finite(gen.dyadic(1, 16, 3))
        };
    }
    CostFunction::new(g, cost).expect("symmetric with zero at zero")
}

/// Minimum over decompositions of length at most `|G|`, by repeated relaxation.
fn bounded_decompositions(c: &CostFunction) -> Vec<Extended> {
    let g = c.group();
    let mut best = vec![Extended::Infinite; g.order()];
    best[0] = Extended::zero();
    for _ in 0..g.order() {
        let prev = best.clone();
        for x in g.elements() {
            for a in g.elements() {
                if let (Extended::Finite(u), Extended::Finite(v)) = (&prev[g.sub(x, a)], c.cost(a)) {
                    let cand = Extended::Finite(u + v);
                    if cand < best[x] {
                        best[x] = cand;
                    }
                }
            }
        }
    }
    best
}

pub fn completion(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("completion", seed);
    for (k, shape) in abelian_group_shapes(8, 0).into_iter().enumerate() {
        let g = FiniteAbelianGroup::new(shape.clone()).expect("small");
        for i in 0..100 {
            let mut gen = Gen::stream(seed, (k as u64) * 1000 + i);
            let c = random_cost(&mut gen, &g);
            let got = complete_cost(&c).values;
            let want = bounded_decompositions(&c);
            rep.check(got == want, || format!("{shape:?} cost {i}: completion differs"));
        }
    }
    rep
}

/// The configuration of the Fraïssé acceptance run.
pub fn fraisse_config() -> ChainConfig {
    ChainConfig { grid_denominator_log2: 2, cap: Cap::One, n: 2, max_order: 4, rounds: 2, max_value: None }
}

pub fn fraisse(cfg: &ChainConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("fraisse", 0);
    let catalog = enumerate_catalog(&cfg.grid()?, cfg.n, cfg.max_order, DEFAULT_TABLE_BUDGET)?;
    let chain = build_chain(&catalog, cfg.rounds, &ChainBudget::default())?;
    let ledger = verify_ledger(&chain, &catalog);
    rep.check(ledger.is_ok(), || format!("ledger: {:?}", ledger.err()));
    rep.check(chain.unsatisfied.is_empty(), || format!("{} tasks left unsatisfied", chain.unsatisfied.len()));
    let last = chain.stages.len() - 1;
    let tasks: Vec<_> = chain.ledger.iter().map(|e| e.task.clone()).collect();
    let on_ledger = verify_tasks(&chain, &catalog, &tasks, last, DEFAULT_SEARCH_BUDGET);
    rep.check(on_ledger.all_satisfied(), || format!("ledger tasks: {}/{}", on_ledger.satisfied, on_ledger.tasks));
    let emb = verify_embeddings(chain.last(), &catalog, DEFAULT_SEARCH_BUDGET);
    rep.check(emb.all_satisfied(), || format!("embeddings: {}/{}", emb.satisfied, emb.tasks));
    rep.notes.push(format!(
        "catalog {}, stages {}, final order {}, ledger {}/{}, embeddings {}/{}",
        catalog.len(),
        chain.stages.len(),
        chain.last().order(),
        on_ledger.satisfied,
        on_ledger.tasks,
        emb.satisfied,
        emb.tasks
    ));
    rep.artifact = Some(serde_json::to_string_pretty(&chain_json(&chain)).expect("serializable") + "\n");
    Ok(rep)
}

pub fn modulus_extension(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("modulus-extension", seed);
    for i in 0..100 {
        let n = [2u64, 3, 4, 0][(i % 4) as usize];
        let cap = if (i / 4) % 2 == 0 { Cap::One } else { Cap::Infinite };
        let inst = Gen::stream(seed, i).modulus_extension(16, 3, cap, n);
        let tag = format!("instance {i}");
        let out =
            match extend_semivalue_modulus(&inst.d, &inst.d0, &inst.lambda0, &inst.omega, Some((&inst.rho, &inst.tau)))
            {
                Ok(o) => o,
                Err(e) => {
                    rep.check(false, || format!("{tag}: {e}"));
                    continue;
                }
            };
        let g = inst.d.group();
        let l0 = |h: usize| inst.d0.position(h).map(|i| &inst.lambda0[i]);
        let zeros: Vec<usize> = inst
            .d0
            .elements()
            .iter()
            .copied()
            .filter(|&h| inst.lambda0[inst.d0.position(h).unwrap()].is_zero())
            .collect();
        for x in g.elements() {
            let v = out.value(x);
            rep.check(*v <= inst.omega.eval(inst.d.value(x)), || format!("{tag}: (a) λ̄ > ω∘λ at {x}"));
            if let Some(w) = l0(x) {
                rep.check(v == w, || format!("{tag}: (a) not an extension at {x}"));
            }
            rep.check(v.is_zero() == zeros.contains(&x), || format!("{tag}: (b) zero sets differ at {x}"));
            if let Some(b) = cap.bound().filter(|b| inst.lambda0.iter().all(|v| v <= b)) {
                rep.check(*v <= b, || format!("{tag}: (c) cap exceeded at {x}"));
            }
            let dist = zeros.iter().map(|&z| inst.d.dist(x, z).clone()).min().expect("0 is a zero");
            rep.check(inst.tau.eval(&dist) <= inst.rho.eval(v), || format!("{tag}: (e) fails at {x}"));
        }
    }
    rep
}

/// `‖·‖_q` with `q(h)` doubled on the parts of the pieces of value `h` beyond `s = 2`.
pub fn corrupted_norm(h: usize) -> impl Fn(&StepFunction) -> Rational {
    move |u: &StepFunction| {
        let two = Rational::from_integer(2);
        u.intervals()
            .map(|(l, rr, v)| {
                let q = u.host().value(v);
                let base = (rr - l) * q;
                if v == h && *rr > two {
                    let extra = rr - &l.clone().max(two.clone());
                    base + extra * q
                } else {
                    base
                }
            })
            .sum()
    }
}

pub fn pv(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("pv", seed);
    let mut gen = Gen::stream(seed, 0);
    let host = Arc::new(gen.valued_group(8, 2, Cap::Infinite, 0));
    let ts: Vec<Rational> =
        [(0, 1), (1, 4), (1, 2), (1, 1), (3, 2), (2, 1), (7, 3), (5, 1)].iter().map(|&(a, b)| r(a, b)).collect();
    let samples: Vec<StepFunction> = (0..100).map(|i| Gen::stream(seed, i + 1).step_function(&host, 5, 2)).collect();
    for (i, u) in samples.iter().enumerate() {
        let nu = u.norm();
        for t in &ts {
            let lhs = u.act(t).norm();
            rep.check(lhs == t * &nu, || format!("sample {i}: ‖{t}*u‖ = {lhs} != {t}·{nu}"));
        }
        let h = gen.below(host.order());
        let hat = StepFunction::hat(host.clone(), h);
        let (t, s) = (gen.pick(&ts).clone(), gen.pick(&ts).clone());
        let diff = hat.act(&t).sub(&hat.act(&s))?.norm();
        let want = (&t - &s).abs() * host.value(h);
        rep.check(diff == want, || format!("sample {i}: ‖t*ĥ − s*ĥ‖ = {diff} != {want}"));
    }
    for (name, k) in [("∇", nabla_pl()), ("id", PiecewiseLinear::identity())] {
        let v = norming_violation(&k, None);
        rep.check(v.is_none(), || format!("{name} is not norming: {v:?}"));
    }
    let id = NormingFunction::identity();
    let honest = check_kappa_norm(&samples, &ts, &id, |u| u.norm());
    rep.check(honest.passed() && honest.homogeneous, || "honest norm reported a violation".into());
    let target =
        samples.iter().flat_map(|u| u.pieces().iter().map(|&(_, v)| v)).find(|&v| v != 0).unwrap_or(1 % host.order());
    let corrupted = check_kappa_norm(&samples, &ts, &id, corrupted_norm(target));
    rep.check(!corrupted.passed(), || "corrupted norm was not caught".into());
    if let Some(v) = corrupted.violations.first() {
        rep.notes.push(format!("negative control caught: sample {} t={} lhs {} > {}", v.sample, v.t, v.lhs, v.bound));
    }
    Ok(rep)
}

pub const THREE_POINT_INSTANCES: u64 = 500;

pub fn three_point_maps(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("three-point-maps", seed);
    let shapes: Vec<Vec<u64>> =
        abelian_group_shapes(16, 4).into_iter().filter(|s| s.iter().product::<u64>() >= 3).collect();
    for i in 0..THREE_POINT_INSTANCES {
        let mut gen = Gen::stream(seed, i);
        let g = FiniteAbelianGroup::new(gen.pick(&shapes).clone()).expect("small");
        let cap = if gen.coin() { Cap::One } else { Cap::Infinite };
        let base = gen.grid_value(&g, 3, cap, 4);
        let diam = base.diameter();
        let f = gen.katetov(&base, 3, 3, &diam, 2);
        let w = check_trv_n(&f, 4);
        rep.check(w.is_none(), || {
            let pts: Vec<String> = f.pairs().map(|(a, v)| format!("f{}={v}", g.coords(a))).collect();
            format!("instance {i}: {} on {:?} violates trv-4 at {:?}", pts.join(" "), g.factors(), w)
        });
    }
    rep
}
