//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every criterion runs the library's named suite and, where one exists, an
//! independent oracle written here against plain `Ratio<i64>` arithmetic.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use num_traits::Signed;
use valued_groups::extension::extend_onegen;
use valued_groups::free::{free_group, odd_inclusion_space, word_metric, zn_generating_set};
use valued_groups::gen::Gen;
use valued_groups::group::{abelian_group_shapes, FiniteAbelianGroup, GroupElement};
use valued_groups::suites::{self, random_cost, SuiteReport};
use valued_groups::values::complete_cost;
use valued_groups::{Cap, Extended, Rational, ValuedGroup};

type Q = Ratio<i64>;

const SEED: u64 = 20261016;
const GOLDEN_CHAIN: &str = include_str!("golden/chain.json");

fn q(r: &Rational) -> Q {
    r.to_string().parse().expect("p/q")
}

fn qe(e: &Extended) -> Option<Q> {
    e.finite().map(q)
}

type Criterion = (&'static str, Duration, Box<dyn Fn() -> Outcome>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn from_suite(rep: &SuiteReport, extra: Vec<String>) -> Outcome {
    let mut detail = format!("{} checks, {} failures", rep.checked, rep.failures.len());
    for n in &rep.notes {
        detail.push_str("; ");
        detail.push_str(n);
    }
    let mut ok = rep.passed();
    for e in &extra {
        ok = false;
        detail.push_str("; oracle: ");
        detail.push_str(e);
    }
    for f in rep.failures.iter().take(3) {
        detail.push_str("; ");
        detail.push_str(f);
    }
    Outcome { ok, detail }
}

fn suite(name: &str) -> SuiteReport {
    suites::run(name, SEED).unwrap_or_else(|e| SuiteReport {
        name: name.into(),
        seed: SEED,
        failures: vec![e.to_string()],
        ..Default::default()
    })
}

/// Word lengths on `ℤ_n^n` for `{±e_j} ∪ {e_j − e_k}` by breadth-first search.
fn zn_bfs(n: u64) -> HashMap<Vec<u64>, u32> {
    let k = n as usize;
    let mut steps: Vec<Vec<u64>> = Vec::new();
    for j in 0..k {
        let mut e = vec![0; k];
        e[j] = 1;
        steps.push(e.clone());
        e[j] = n - 1;
        steps.push(e);
        for l in 0..k {
            if l != j {
                let mut d = vec![0; k];
                d[j] = 1;
                d[l] = n - 1;
                steps.push(d);
            }
        }
    }
    let mut dist = HashMap::from([(vec![0; k], 0u32)]);
    let mut queue = VecDeque::from([vec![0; k]]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[&x];
        for s in &steps {
            let y: Vec<u64> = x.iter().zip(s).map(|(a, b)| (a + b) % n).collect();
            if !dist.contains_key(&y) {
                dist.insert(y.clone(), dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

fn criterion_zn() -> Outcome {
    let rep = suite("zn-norms");
    let mut extra = Vec::new();
    for n in 3..=5u64 {
        let oracle = zn_bfs(n);
        let v = word_metric(&zn_generating_set(n).unwrap(), &Rational::one()).unwrap();
        let g = v.group();
        if oracle.len() != g.order() {
            extra.push(format!("N={n}: BFS reached {} of {}", oracle.len(), g.order()));
        }
        for (c, &len) in &oracle {
            let x = g.index(&GroupElement(c.clone())).unwrap();
            if q(v.value(x)) != Q::from(len as i64) {
                extra.push(format!("N={n}: ‖{c:?}‖ = {} but BFS gives {len}", v.value(x)));
                break;
            }
        }
        let all = vec![1; n as usize];
        if oracle[&all] != (n - 1) as u32 {
            extra.push(format!("N={n}: BFS ‖Σe_j‖ = {}", oracle[&all]));
        }
    }
    from_suite(&rep, extra)
}

fn criterion_katetov() -> Outcome {
    let rep = suite("katetov-counterexamples");
    let mut extra = Vec::new();
    for n in 3..=5u64 {
        let f = suites::constant_generator_map(n).unwrap();
        let Some(w) = valued_groups::extension::check_trv_n(&f, n) else { continue };
        let base = f.base();
        let g = base.group();
        let value_of = |a: usize| f.pairs().find(|(x, _)| *x == a).map(|(_, v)| q(v)).unwrap();
        let sum = w.iter().fold(0, |s, &a| g.add(s, a));
        let lhs = (q(base.value(sum)) - value_of(w[w.len() - 1])).abs();
        let rhs: Q = w[..w.len() - 1].iter().map(|&a| value_of(a)).sum();
        if lhs <= rhs {
            extra.push(format!("N={n}: witness {w:?} does not violate trv"));
        }
    }
    from_suite(&rep, extra)
}

fn check_value_axioms(p: &ValuedGroup) -> Option<String> {
    let g = p.group();
    for x in g.elements() {
        let px = q(p.value(x));
        if (x == 0) != (px == Q::from(0)) || px < Q::from(0) {
            return Some(format!("V1 at {}", g.coords(x)));
        }
        if px != q(p.value(g.neg(x))) {
            return Some(format!("V2 at {}", g.coords(x)));
        }
        for y in g.elements() {
            if q(p.value(g.add(x, y))) > px + q(p.value(y)) {
                return Some(format!("V3 at {} {}", g.coords(x), g.coords(y)));
            }
        }
    }
    None
}

fn criterion_trv() -> Outcome {
    let rep = suite("trv");
    let mut extra = Vec::new();
    for i in (0..suites::TRV_INSTANCES).step_by(5) {
        let mut gen = Gen::stream(SEED, i);
        let n = [2u64, 3, 4, 0][(i % 4) as usize];
        let cap = if (i / 4) % 2 == 0 { Cap::One } else { Cap::Infinite };
        let base = gen.valued_group(16, 3, cap, n);
        let top = match cap {
            Cap::One => Rational::one(),
            Cap::Infinite => base.diameter().max(Rational::one()),
        };
        let size = 1 + gen.below(4);
        let f = gen.katetov(&base, size, 3, &top, n);
        let Ok(ext) = extend_onegen(&f, n, cap) else { continue };
        let p = &ext.result;
        if let Some(e) = check_value_axioms(p) {
            extra.push(format!("instance {i}: {e}"));
        }
        for x in base.group().elements() {
            if q(p.value(ext.embedding.apply(x))) != q(base.value(x)) {
                extra.push(format!("instance {i}: restriction differs"));
                break;
            }
        }
        for (a, v) in f.pairs() {
            let d = p.group().sub(ext.embedding.apply(a), ext.witness);
            if q(p.value(d)) != q(v) {
                extra.push(format!("instance {i}: p̃(a − b) != f(a)"));
            }
        }
        if cap == Cap::One && p.values().iter().any(|v| q(v) > Q::from(1)) {
            extra.push(format!("instance {i}: exceeds the cap"));
        }
        if p.values().iter().any(|v| (q(v) * 8).denom() != &1) {
            extra.push(format!("instance {i}: off the 1/8 grid"));
        }
    }
    from_suite(&rep, extra)
}

/// Minimum perfect matching on `pts` by exhaustive pairing.
fn min_matching(pts: &[usize], d: &dyn Fn(usize, usize) -> Q) -> Q {
    if pts.is_empty() {
        return Q::from(0);
    }
    let (a, rest) = (pts[0], &pts[1..]);
    (0..rest.len())
        .map(|k| {
            let mut others = rest.to_vec();
            let b = others.remove(k);
            d(a, b) + min_matching(&others, d)
        })
        .min()
        .unwrap()
}

fn criterion_matching() -> Outcome {
    let rep = suite("matching");
    let mut extra = Vec::new();
    for i in 0..100 {
        let mut gen = Gen::stream(SEED, i);
        let size = 2 + gen.below(5);
        let x = gen.metric_space(size, 2, 8);
        let fx = free_group(&x, 2, Cap::Infinite).unwrap();
        let d = |a: usize, b: usize| q(x.dist(a, b));
        for f in fx.carrier().elements() {
            let support: Vec<usize> =
                fx.coefficients(f).iter().enumerate().filter(|(_, &c)| c == 1).map(|(j, _)| j).collect();
            if min_matching(&support, &d) != q(fx.pd(f)) {
                extra.push(format!("space {i}: p_d differs from the exhaustive matching at {support:?}"));
                break;
            }
        }
    }
    from_suite(&rep, extra)
}

/// `p_d` on `ℤ_n[X]` by Dijkstra over coefficient vectors with steps `±(x̂ − ŷ)`.
fn free_oracle(n: u64, d: &[Vec<Q>]) -> HashMap<Vec<u64>, Q> {
    let k = d.len();
    let mut best: HashMap<Vec<u64>, Q> = HashMap::from([(vec![0; k], Q::from(0))]);
    let mut done: HashMap<Vec<u64>, Q> = HashMap::new();
    while let Some((x, dx)) =
        best.iter().filter(|(x, _)| !done.contains_key(*x)).min_by(|a, b| a.1.cmp(b.1)).map(|(x, v)| (x.clone(), *v))
    {
        done.insert(x.clone(), dx);
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    continue;
                }
                let mut y = x.clone();
                y[a] = (y[a] + 1) % n;
                y[b] = (y[b] + n - 1) % n;
                let cand = dx + d[a][b];
                if !done.contains_key(&y) && best.get(&y).is_none_or(|v| cand < *v) {
                    best.insert(y, cand);
                }
            }
        }
    }
    done
}

fn criterion_pd_isometry() -> Outcome {
    let rep = suite("pd-isometry");
    let mut extra = Vec::new();
    for n in [2u64, 3, 4] {
        for i in (0..50).step_by(10) {
            let mut gen = Gen::stream(SEED, n * 1000 + i);
            let size = 2 + gen.below(3);
            let x = gen.metric_space(size, 2, 8);
            let d: Vec<Vec<Q>> = (0..size).map(|a| (0..size).map(|b| q(x.dist(a, b))).collect()).collect();
            let oracle = free_oracle(n, &d);
            for a in 0..size {
                for b in 0..size {
                    let mut c = vec![0; size];
                    c[a] = (c[a] + 1) % n;
                    c[b] = (c[b] + n - 1) % n;
                    if oracle[&c] != d[a][b] {
                        extra.push(format!("N={n} space {i}: oracle p_d({a}−{b}) = {}", oracle[&c]));
                    }
                }
            }
        }
    }
    from_suite(&rep, extra)
}

fn criterion_odd() -> Outcome {
    let rep = suite("odd-inclusion");
    let x = odd_inclusion_space(3).unwrap();
    let d: Vec<Vec<Q>> = (0..4).map(|a| (0..4).map(|b| q(x.dist(a, b))).collect()).collect();
    let on_a: Vec<Vec<Q>> = d[1..].iter().map(|row| row[1..].to_vec()).collect();
    let px = free_oracle(3, &d)[&vec![0, 1, 1, 1]];
    let pa = free_oracle(3, &on_a)[&vec![1, 1, 1]];
    let mut extra = Vec::new();
    if pa != Q::from(2) {
        extra.push(format!("p_ϱ(f) = {pa}, expected 2"));
    }
    if px != Q::new(3, 2) {
        extra.push(format!("p_d(f) = {px}, expected 3/2"));
    }
    from_suite(&rep, extra)
}

/// Relaxation in a mixed-radix group with its own coordinate arithmetic.
fn completion_oracle(factors: &[u64], cost: &HashMap<Vec<u64>, Q>) -> HashMap<Vec<u64>, Q> {
    let zero = vec![0; factors.len()];
    let mut best = HashMap::from([(zero, Q::from(0))]);
    let order: u64 = factors.iter().product();
    for _ in 0..order {
        let prev = best.clone();
        for (x, vx) in &prev {
            for (a, va) in cost {
                let y: Vec<u64> = x.iter().zip(a).zip(factors).map(|((u, v), m)| (u + v) % m).collect();
                let cand = vx + va;
                if best.get(&y).is_none_or(|b| cand < *b) {
                    best.insert(y, cand);
                }
            }
        }
    }
    best
}

fn criterion_completion() -> Outcome {
    let rep = suite("completion");
    let mut extra = Vec::new();
    for (k, shape) in abelian_group_shapes(8, 0).into_iter().enumerate() {
        let g = FiniteAbelianGroup::new(shape.clone()).unwrap();
        for i in (0..100).step_by(7) {
            let mut gen = Gen::stream(SEED, (k as u64) * 1000 + i);
            let c = random_cost(&mut gen, &g);
            let table: HashMap<Vec<u64>, Q> =
                g.elements().filter_map(|x| qe(c.cost(x)).map(|v| (g.coords(x).0, v))).collect();
            let oracle = completion_oracle(&shape, &table);
            let got = complete_cost(&c).values;
            for x in g.elements() {
                if qe(&got[x]) != oracle.get(&g.coords(x).0).copied() {
                    extra.push(format!("{shape:?} cost {i}: differs at {}", g.coords(x)));
                    break;
                }
            }
        }
    }
    from_suite(&rep, extra)
}

fn criterion_fraisse() -> Outcome {
    let rep = suite("fraisse");
    let mut extra = Vec::new();
    match &rep.artifact {
        Some(a) if a == GOLDEN_CHAIN => {}
        Some(_) => extra.push("chain JSON differs from the golden file".into()),
        None => extra.push("no chain artifact".into()),
    }
    from_suite(&rep, extra)
}

fn criterion_pv() -> Outcome {
    let rep = suite("pv");
    let mut extra = Vec::new();
    let mut gen = Gen::stream(SEED, 0);
    let host = std::sync::Arc::new(gen.valued_group(8, 2, Cap::Infinite, 0));
    for i in 0..100 {
        let u = Gen::stream(SEED, i + 1).step_function(&host, 5, 2);
        let integral: Q = u.intervals().map(|(a, b, h)| (q(b) - q(a)) * q(host.value(h))).sum();
        if integral != q(&u.norm()) {
            extra.push(format!("sample {i}: ‖u‖ = {} but the integral is {integral}", u.norm()));
        }
    }
    from_suite(&rep, extra)
}

fn main() {
    let plain = |name: &'static str| move || from_suite(&suite(name), Vec::new());
    let criteria: Vec<Criterion> = vec![
        ("zn-norms", Duration::from_secs(60), Box::new(criterion_zn as fn() -> Outcome)),
        ("katetov-counterexamples", Duration::MAX, Box::new(criterion_katetov as fn() -> Outcome)),
        ("trv", Duration::from_secs(120), Box::new(criterion_trv as fn() -> Outcome)),
        ("matching", Duration::MAX, Box::new(criterion_matching as fn() -> Outcome)),
        ("pd-isometry", Duration::MAX, Box::new(criterion_pd_isometry as fn() -> Outcome)),
        ("odd-inclusion", Duration::MAX, Box::new(criterion_odd as fn() -> Outcome)),
        ("amalgamation", Duration::MAX, Box::new(plain("amalgamation"))),
        ("completion", Duration::MAX, Box::new(criterion_completion as fn() -> Outcome)),
        ("fraisse", Duration::from_secs(600), Box::new(criterion_fraisse as fn() -> Outcome)),
        ("modulus-extension", Duration::MAX, Box::new(plain("modulus-extension"))),
        ("pv", Duration::MAX, Box::new(criterion_pv as fn() -> Outcome)),
        ("three-point-maps", Duration::MAX, Box::new(plain("three-point-maps"))),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if took > *limit {
            out.ok = false;
            out.detail.push_str(&format!("; over the {}s limit", limit.as_secs()));
        }
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name} ({:.1}s): {}", k + 1, took.as_secs_f64(), out.detail);
        failed += usize::from(!out.ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
