//! Finite-depth Fraïssé chains of grid-valued groups.
//!
//! `Q` is the capped dyadic grid `{k / 2^m} ∩ (0, bound]`. A [`Catalog`] lists
//! every finite `Q`-group up to a given order, one per isometric isomorphism
//! class. [`build_chain`] grows a chain `G₀ ⊂ G₁ ⊂ …` by amalgamation until every
//! scheduled extension task is satisfied, and the verifiers re-check the
//! extension property exhaustively on the result.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amalgam::amalgamate;
use crate::error::{Error, Result};
use crate::group::{abelian_group_shapes, all_subgroups, automorphisms, FiniteAbelianGroup, GroupHom, Subgroup};
use crate::json::ValuedGroupDesc;
use crate::rational::{dyadic, Rational};
use crate::values::{isometric_isomorphic, validate_value, Cap, ValuedGroup};

pub const DEFAULT_TABLE_BUDGET: u64 = 5_000_000;
pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;
pub const DEFAULT_STAGE_ORDER_LIMIT: usize = 1 << 16;

/// The dyadic value grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub log2_den: u32,
    pub cap: Cap,
    /// Largest admitted value when `cap` is infinite.
    pub max_value: Option<Rational>,
}

impl Grid {
    pub fn new(log2_den: u32, cap: Cap, max_value: Option<Rational>) -> Result<Self> {
        if log2_den > 20 {
            return Err(Error::Precondition(format!("grid 2^-{log2_den} is too fine")));
        }
        if cap == Cap::Infinite && max_value.is_none() {
            return Err(Error::Precondition("an unbounded grid needs max_value".into()));
        }
        Ok(Grid { log2_den, cap, max_value })
    }

    pub fn bound(&self) -> Rational {
        match (self.cap.bound(), &self.max_value) {
            (Some(b), Some(m)) => b.min(m.clone()),
            (Some(b), None) => b,
            (None, Some(m)) => m.clone(),
            (None, None) => unreachable!("validated"),
        }
    }

    /// All grid values in increasing order.
    pub fn values(&self) -> Vec<Rational> {
        let b = self.bound();
        (1i64..).map(|k| dyadic(k, self.log2_den)).take_while(|v| *v <= b).collect()
    }

    pub fn contains(&self, v: &Rational) -> bool {
        v.is_zero() || (v.is_positive() && *v <= self.bound() && v.is_multiple_of(1u64 << self.log2_den))
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub grid: Grid,
    /// Exponent of the class; 0 means no exponent constraint.
    pub n: u64,
    pub max_order: usize,
    pub entries: Vec<ValuedGroup>,
}

impl Catalog {
    /// A catalog from explicit entries; they must be grid-valued, in the class
    /// and pairwise non-isometric.
    pub fn from_entries(grid: Grid, n: u64, entries: Vec<ValuedGroup>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if e.cap() != grid.cap || e.exponent() != n {
                return Err(Error::Precondition(format!("entry {i} is not in the class ({}, {n})", grid.cap)));
            }
            if let Some(v) = e.values().iter().find(|v| !grid.contains(v)) {
                return Err(Error::Precondition(format!("entry {i} takes the off-grid value {v}")));
            }
            for (j, f) in entries[..i].iter().enumerate() {
                if isometric_isomorphic(e, f).is_some() {
                    return Err(Error::Precondition(format!("entries {j} and {i} are isometrically isomorphic")));
                }
            }
        }
        let max_order = entries.iter().map(ValuedGroup::order).max().unwrap_or(1);
        Ok(Catalog { grid, n, max_order, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The value table of `v` minimized lexicographically over automorphisms.
pub fn canonical_table(v: &ValuedGroup, auts: &[GroupHom]) -> Vec<Rational> {
    auts.iter()
        .map(|a| v.group().elements().map(|x| v.value(a.apply(x)).clone()).collect::<Vec<_>>())
        .min()
        .unwrap_or_else(|| v.values().to_vec())
}

/// Every grid-valued group in the class up to `max_order`, one per isometric isomorphism class.
pub fn enumerate_catalog(grid: &Grid, n: u64, max_order: usize, budget: u64) -> Result<Catalog> {
    let values = grid.values();
    let mut entries = Vec::new();
    let mut tried = 0u64;
    for shape in abelian_group_shapes(max_order, n) {
        let g = FiniteAbelianGroup::new(shape)?;
        let auts = automorphisms(&g, budget)?;
        let reps: Vec<usize> = g.elements().skip(1).filter(|&x| x <= g.neg(x)).collect();
        let mut table = vec![None; g.order()];
        table[0] = Some(Rational::zero());
        let mut seen = BTreeSet::new();
        fill(&g, &reps, 0, &values, &mut table, &mut tried, budget, &mut |t: &[Option<Rational>]| {
            let t: Vec<Rational> = t.iter().map(|v| v.clone().expect("complete")).collect();
            let vg = ValuedGroup::from_trusted(&g, t, grid.cap, n);
            seen.insert(canonical_table(&vg, &auts));
        })
        .map_err(|_| Error::Budget {
            what: "catalog tables".into(),
            limit: budget,
            partial: entries.len() as u64,
        })?;
        for t in seen {
            entries.push(ValuedGroup::new(&g, t, grid.cap, n)?);
        }
    }
    Ok(Catalog { grid: grid.clone(), n, max_order, entries })
}

/// Assigns grid values to `reps[i..]` (and their negatives), pruning on the triangle inequality.
#[allow(clippy::too_many_arguments)]
fn fill(
    g: &FiniteAbelianGroup,
    reps: &[usize],
    i: usize,
    values: &[Rational],
    table: &mut Vec<Option<Rational>>,
    tried: &mut u64,
    budget: u64,
    emit: &mut dyn FnMut(&[Option<Rational>]),
) -> std::result::Result<(), ()> {
    if i == reps.len() {
        emit(table);
        return Ok(());
    }
    let x = reps[i];
    let nx = g.neg(x);
    for v in values {
        *tried += 1;
        if *tried > budget {
            return Err(());
        }
        table[x] = Some(v.clone());
        table[nx] = Some(v.clone());
        if consistent_at(g, table, x) {
            fill(g, reps, i + 1, values, table, tried, budget, emit)?;
        }
    }
    table[x] = None;
    table[nx] = None;
    Ok(())
}

/// Triangle inequalities among assigned elements that involve `x`.
fn consistent_at(g: &FiniteAbelianGroup, table: &[Option<Rational>], x: usize) -> bool {
    let px = table[x].as_ref().unwrap();
    for a in g.elements() {
        let Some(pa) = &table[a] else { continue };
        let Some(pxa) = &table[g.add(x, a)] else { continue };
        if pxa > &(px + pa) || px > &(pxa + pa) || pa > &(px + pxa) {
            return false;
        }
    }
    true
}

/// Elements of a valued group grouped by value.
pub struct ValueIndex {
    by_value: BTreeMap<Rational, Vec<usize>>,
}

impl ValueIndex {
    pub fn new(g: &ValuedGroup) -> Self {
        let mut by_value: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
        for x in g.group().elements() {
            by_value.entry(g.value(x).clone()).or_default().push(x);
        }
        ValueIndex { by_value }
    }

    fn with_value(&self, v: &Rational) -> &[usize] {
        self.by_value.get(v).map_or(&[], Vec::as_slice)
    }
}

struct Step {
    h: usize,
    t: i64,
    th: usize,
    /// `(s + k·h, s, k)` for `s` in the previous span and `1 ≤ k < t`.
    new: Vec<(usize, usize, i64)>,
}

fn plan(src: &FiniteAbelianGroup, base: &[usize]) -> Vec<Step> {
    let mut in_span = vec![false; src.order()];
    let mut span: Vec<usize> = base.to_vec();
    for &x in base {
        in_span[x] = true;
    }
    let mut steps = Vec::new();
    while let Some(h) = src.elements().find(|&x| !in_span[x]) {
        let mut t = 1i64;
        while !in_span[src.mul(t, h)] {
            t += 1;
        }
        let mut new = Vec::new();
        for k in 1..t {
            for &s in &span {
                new.push((src.add(s, src.mul(k, h)), s, k));
            }
        }
        for &(e, _, _) in &new {
            in_span[e] = true;
        }
        span.extend(new.iter().map(|&(e, _, _)| e));
        steps.push(Step { h, t, th: src.mul(t, h), new });
    }
    steps
}

/// Visits every isometric homomorphism `src → dst` that agrees with `base_img`
/// on the subgroup `base`, as full tables, until `visit` returns `false`.
/// Returns `Err(Budget)` once more than `budget` candidates have been tried.
pub fn for_each_isometric_extension(
    src: &ValuedGroup,
    dst: &ValuedGroup,
    index: &ValueIndex,
    base: &Subgroup,
    base_img: &[usize],
    budget: &mut u64,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<bool> {
    let gs = src.group();
    let mut img: Vec<Option<usize>> = vec![None; gs.order()];
    for (&x, &y) in base.elements().iter().zip(base_img) {
        if dst.value(y) != src.value(x) {
            return Ok(true);
        }
        img[x] = Some(y);
    }
    let steps = plan(gs, base.elements());
    let limit = *budget;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        src: &ValuedGroup,
        dst: &ValuedGroup,
        index: &ValueIndex,
        steps: &[Step],
        j: usize,
        img: &mut Vec<Option<usize>>,
        budget: &mut u64,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> std::result::Result<bool, ()> {
        let Some(step) = steps.get(j) else {
            let table: Vec<usize> = img.iter().map(|v| v.expect("total")).collect();
            return Ok(visit(&table));
        };
        let gd = dst.group();
        let target = img[step.th].expect("assigned");
        for &y in index.with_value(src.value(step.h)) {
            if *budget == 0 {
                return Err(());
            }
            *budget -= 1;
            if gd.mul(step.t, y) != target {
                continue;
            }
            let mut ok = true;
            let mut done = 0;
            for &(e, s, k) in &step.new {
                let v = gd.add(img[s].expect("span"), gd.mul(k, y));
                if dst.value(v) != src.value(e) {
                    ok = false;
                    break;
                }
                img[e] = Some(v);
                done += 1;
            }
            if ok && !rec(src, dst, index, steps, j + 1, img, budget, visit)? {
                return Ok(false);
            }
            for &(e, _, _) in &step.new[..done] {
                img[e] = None;
            }
        }
        Ok(true)
    }

    rec(src, dst, index, &steps, 0, &mut img, budget, visit).map_err(|_| Error::Budget {
        what: "isometric extension search".into(),
        limit,
        partial: 0,
    })
}

/// One isometric extension of `base_img` from `base` to all of `src`, if any.
pub fn find_isometric_extension(
    src: &ValuedGroup,
    dst: &ValuedGroup,
    index: &ValueIndex,
    base: &Subgroup,
    base_img: &[usize],
    budget: &mut u64,
) -> Result<Option<Vec<usize>>> {
    let mut found = None;
    for_each_isometric_extension(src, dst, index, base, base_img, budget, &mut |t| {
        found = Some(t.to_vec());
        false
    })?;
    Ok(found)
}

/// An extension task: extend the isometric `φ: K → G_stage` to all of `H = entries[entry]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub entry: usize,
    pub k: Subgroup,
    /// Images of `k.elements()` in the stage group.
    pub phi: Vec<usize>,
    pub stage: usize,
}

#[derive(Clone, Debug)]
pub struct LedgerEntry {
    pub task: Task,
    pub satisfied_at: usize,
    /// Table of `ψ: H → G_satisfied_at`.
    pub psi: Vec<usize>,
    pub amalgamated: bool,
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub stages: Vec<ValuedGroup>,
    /// `links[i]: G_i → G_{i+1}`.
    pub links: Vec<GroupHom>,
    pub ledger: Vec<LedgerEntry>,
    pub unsatisfied: Vec<Task>,
}

impl Chain {
    pub fn last(&self) -> &ValuedGroup {
        self.stages.last().expect("G₀ exists")
    }

    /// Image of `x ∈ G_from` in `G_to`.
    pub fn forward(&self, x: usize, from: usize, to: usize) -> usize {
        self.links[from..to].iter().fold(x, |y, l| l.apply(y))
    }

    /// The composite embedding `G_from → G_to`.
    pub fn embedding(&self, from: usize, to: usize) -> Vec<usize> {
        self.stages[from].group().elements().map(|x| self.forward(x, from, to)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ChainBudget {
    pub search: u64,
    pub max_stage_order: usize,
}

impl Default for ChainBudget {
    fn default() -> Self {
        ChainBudget { search: DEFAULT_SEARCH_BUDGET, max_stage_order: DEFAULT_STAGE_ORDER_LIMIT }
    }
}

/// Isometric automorphisms of a valued group.
pub fn isometric_automorphisms(h: &ValuedGroup) -> Result<Vec<GroupHom>> {
    Ok(automorphisms(h.group(), DEFAULT_TABLE_BUDGET)?.into_iter().filter(|a| h.is_isometric_embedding(a, h)).collect())
}

/// Nontrivial extension tasks against `g`: for each entry `H`, each proper
/// subgroup `K < H` and each isometric `φ: K → g`, one task per orbit of
/// isometric automorphisms of `H` that fix `K` setwise.
pub fn tasks_against(catalog: &Catalog, g: &ValuedGroup, stage: usize, budget: &mut u64) -> Result<Vec<Task>> {
    let index = ValueIndex::new(g);
    let mut out = Vec::new();
    for (entry, h) in catalog.entries.iter().enumerate() {
        if h.order() == 1 {
            continue;
        }
        let auts = isometric_automorphisms(h)?;
        for k in all_subgroups(h.group()) {
            if k.order() == h.order() {
                continue;
            }
            let stab: Vec<&GroupHom> =
                auts.iter().filter(|a| k.elements().iter().all(|&x| k.contains(a.apply(x)))).collect();
            let (kc, emb) = h.restrict(&k);
            let pos: Vec<usize> = kc.group().elements().map(|x| k.position(emb.apply(x)).expect("in K")).collect();
            let mut seen = BTreeSet::new();
            for_each_isometric_extension(&kc, g, &index, &Subgroup::trivial(kc.group()), &[0], budget, &mut |t| {
                let mut phi = vec![0; k.order()];
                for (x, &y) in t.iter().enumerate() {
                    phi[pos[x]] = y;
                }
                let key = stab
                    .iter()
                    .map(|a| k.elements().iter().map(|&x| phi[k.position(a.apply(x)).unwrap()]).collect::<Vec<_>>())
                    .min()
                    .unwrap_or_else(|| phi.clone());
                if seen.insert(key) {
                    out.push(Task { entry, k: k.clone(), phi, stage });
                }
                true
            })?;
        }
    }
    Ok(out)
}

/// Grows a chain from the trivial group, satisfying queued tasks in FIFO order.
///
/// Tasks are generated against every stage with index `≤ rounds`. A task that
/// the current group already satisfies is recorded without amalgamating.
pub fn build_chain(catalog: &Catalog, rounds: usize, budget: &ChainBudget) -> Result<Chain> {
    let g0 = ValuedGroup::trivial(catalog.grid.cap, catalog.n);
    let mut chain = Chain { stages: vec![g0], links: Vec::new(), ledger: Vec::new(), unsatisfied: Vec::new() };
    let mut search = budget.search;
    let mut queue: VecDeque<Task> = tasks_against(catalog, &chain.stages[0], 0, &mut search)?.into();
    let mut index = ValueIndex::new(&chain.stages[0]);

    while let Some(task) = queue.pop_front() {
        let c = chain.stages.len() - 1;
        let h = &catalog.entries[task.entry];
        let phi: Vec<usize> = task.phi.iter().map(|&y| chain.forward(y, task.stage, c)).collect();
        let mut local = budget.search.min(search);
        let found = match find_isometric_extension(h, &chain.stages[c], &index, &task.k, &phi, &mut local) {
            Ok(f) => f,
            Err(Error::Budget { .. }) => None,
            Err(e) => return Err(e),
        };
        search = search.saturating_sub(budget.search.min(search) - local);
        if let Some(psi) = found {
            chain.ledger.push(LedgerEntry { task, satisfied_at: c, psi, amalgamated: false });
            continue;
        }
        let g = &chain.stages[c];
        if g.order() * (h.order() / task.k.order()) > budget.max_stage_order {
            chain.unsatisfied.push(task);
            chain.unsatisfied.extend(queue.drain(..));
            break;
        }
        let (kc, emb) = h.restrict(&task.k);
        let into_g: Vec<usize> = kc.group().elements().map(|x| phi[task.k.position(emb.apply(x)).unwrap()]).collect();
        let phi1 = GroupHom::from_table(kc.group(), g.group(), into_g)?;
        let am = amalgamate(&kc, g, h, &phi1, &emb)?;
        let psi = am.psi2.table().to_vec();
        chain.stages.push(am.result);
        chain.links.push(am.psi1);
        chain.ledger.push(LedgerEntry { task, satisfied_at: c + 1, psi, amalgamated: true });
        index = ValueIndex::new(chain.last());
        if c < rounds {
            queue.extend(tasks_against(catalog, chain.last(), c + 1, &mut search)?);
        }
    }
    Ok(chain)
}

/// Re-verifies every ledger entry: `ψ` isometric, `ψ|K = φ` after pushing `φ` forward.
pub fn verify_ledger(chain: &Chain, catalog: &Catalog) -> Result<()> {
    for (i, e) in chain.ledger.iter().enumerate() {
        let h = &catalog.entries[e.task.entry];
        let g = &chain.stages[e.satisfied_at];
        let psi = GroupHom::from_table(h.group(), g.group(), e.psi.clone())
            .map_err(|err| Error::Postcondition(format!("ledger {i}: {err}")))?;
        if !h.is_isometric_embedding(&psi, g) {
            return Err(Error::Postcondition(format!("ledger {i}: ψ is not isometric")));
        }
        for (&x, &y) in e.task.k.elements().iter().zip(&e.task.phi) {
            if psi.apply(x) != chain.forward(y, e.task.stage, e.satisfied_at) {
                return Err(Error::Postcondition(format!("ledger {i}: ψ does not extend φ")));
            }
        }
    }
    for (i, l) in chain.links.iter().enumerate() {
        if !chain.stages[i].is_isometric_embedding(l, &chain.stages[i + 1]) {
            return Err(Error::Postcondition(format!("link {i} is not isometric")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtensionReport {
    pub tasks: usize,
    pub satisfied: usize,
    /// Indices (into the checked task list) of tasks without an extension.
    pub unsatisfied: Vec<usize>,
    /// False when a budget ran out before every task was decided.
    pub complete: bool,
}

impl ExtensionReport {
    pub fn all_satisfied(&self) -> bool {
        self.complete && self.satisfied == self.tasks
    }
}

/// Checks the given tasks against stage `to` of the chain, pushing each `φ` forward.
pub fn verify_tasks(chain: &Chain, catalog: &Catalog, tasks: &[Task], to: usize, budget: u64) -> ExtensionReport {
    let g = &chain.stages[to];
    let index = ValueIndex::new(g);
    let mut report = ExtensionReport { tasks: tasks.len(), complete: true, ..Default::default() };
    let mut left = budget;
    for (i, t) in tasks.iter().enumerate() {
        if t.stage > to {
            report.unsatisfied.push(i);
            continue;
        }
        let phi: Vec<usize> = t.phi.iter().map(|&y| chain.forward(y, t.stage, to)).collect();
        match find_isometric_extension(&catalog.entries[t.entry], g, &index, &t.k, &phi, &mut left) {
            Ok(Some(_)) => report.satisfied += 1,
            Ok(None) => report.unsatisfied.push(i),
            Err(_) => {
                report.complete = false;
                report.unsatisfied.push(i);
            }
        }
    }
    report
}

/// The embedding tasks: every entry must embed isometrically in `g`.
pub fn verify_embeddings(g: &ValuedGroup, catalog: &Catalog, budget: u64) -> ExtensionReport {
    let index = ValueIndex::new(g);
    let mut report = ExtensionReport { tasks: catalog.len(), complete: true, ..Default::default() };
    let mut left = budget;
    for (i, h) in catalog.entries.iter().enumerate() {
        match find_isometric_extension(h, g, &index, &Subgroup::trivial(h.group()), &[0], &mut left) {
            Ok(Some(_)) => report.satisfied += 1,
            Ok(None) => report.unsatisfied.push(i),
            Err(_) => {
                report.complete = false;
                report.unsatisfied.push(i);
            }
        }
    }
    report
}

/// The full finite extension property of `g` against the catalog: every isometric
/// `φ: K → g` from a subgroup of an entry extends to the entry.
pub fn verify_extension_property(g: &ValuedGroup, catalog: &Catalog, budget: u64) -> (Vec<Task>, ExtensionReport) {
    let mut left = budget;
    let mut tasks = match tasks_against(catalog, g, 0, &mut left) {
        Ok(t) => t,
        Err(_) => return (Vec::new(), ExtensionReport { complete: false, ..Default::default() }),
    };
    let emb = verify_embeddings(g, catalog, left);
    let index = ValueIndex::new(g);
    let mut report = ExtensionReport {
        tasks: tasks.len() + emb.tasks,
        satisfied: emb.satisfied,
        unsatisfied: Vec::new(),
        complete: emb.complete,
    };
    for (i, t) in tasks.iter().enumerate() {
        match find_isometric_extension(&catalog.entries[t.entry], g, &index, &t.k, &t.phi, &mut left) {
            Ok(Some(_)) => report.satisfied += 1,
            Ok(None) => report.unsatisfied.push(i),
            Err(_) => {
                report.complete = false;
                report.unsatisfied.push(i);
            }
        }
    }
    tasks.shrink_to_fit();
    (tasks, report)
}

/// Chain configuration as read from a config file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub grid_denominator_log2: u32,
    pub cap: Cap,
    #[serde(rename = "N")]
    pub n: u64,
    pub max_order: usize,
    pub rounds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_value: Option<Rational>,
}

impl ChainConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_denominator_log2, self.cap, self.max_value.clone())
    }
}

fn group_json(g: &ValuedGroup) -> Value {
    serde_json::to_value(ValuedGroupDesc::of(g)).expect("descriptors always serialize")
}

pub fn catalog_json(catalog: &Catalog) -> Value {
    json!({
        "grid_denominator_log2": catalog.grid.log2_den,
        "cap": catalog.grid.cap.to_string(),
        "N": catalog.n,
        "max_order": catalog.max_order,
        "entries": catalog.entries.iter().map(group_json).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskExport {
    pub entry: usize,
    pub k: Vec<usize>,
    pub phi: Vec<usize>,
    pub stage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerExport {
    pub task: TaskExport,
    pub satisfied_at: usize,
    pub psi: Vec<usize>,
    pub amalgamated: bool,
}

/// The JSON form of a [`Chain`]: stages, link tables and the ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainExport {
    pub stages: Vec<ValuedGroupDesc>,
    pub links: Vec<Vec<usize>>,
    pub ledger: Vec<LedgerExport>,
    pub unsatisfied: Vec<TaskExport>,
}

impl TaskExport {
    fn of(t: &Task) -> Self {
        TaskExport { entry: t.entry, k: t.k.elements().to_vec(), phi: t.phi.clone(), stage: t.stage }
    }

    fn build(&self, catalog: &Catalog, stages: usize) -> Result<Task> {
        let h = catalog
            .entries
            .get(self.entry)
            .ok_or_else(|| Error::Precondition(format!("no catalog entry {}", self.entry)))?;
        if self.stage >= stages || self.phi.len() != self.k.len() {
            return Err(Error::Precondition("task does not fit the chain".into()));
        }
        let k = Subgroup::from_elements(h.group(), &self.k)?;
        if k.elements() != self.k.as_slice() {
            return Err(Error::Precondition("task subgroup elements must be sorted".into()));
        }
        Ok(Task { entry: self.entry, k, phi: self.phi.clone(), stage: self.stage })
    }
}

impl ChainExport {
    pub fn of(chain: &Chain) -> Self {
        ChainExport {
            stages: chain.stages.iter().map(ValuedGroupDesc::of).collect(),
            links: chain.links.iter().map(|l| l.table().to_vec()).collect(),
            ledger: chain
                .ledger
                .iter()
                .map(|e| LedgerExport {
                    task: TaskExport::of(&e.task),
                    satisfied_at: e.satisfied_at,
                    psi: e.psi.clone(),
                    amalgamated: e.amalgamated,
                })
                .collect(),
            unsatisfied: chain.unsatisfied.iter().map(TaskExport::of).collect(),
        }
    }

    /// Rebuilds the chain, checking every stage, link and task against `catalog`.
    pub fn build(&self, catalog: &Catalog) -> Result<Chain> {
        let stages = self.stages.iter().map(ValuedGroupDesc::build).collect::<Result<Vec<_>>>()?;
        if stages.is_empty() || self.links.len() + 1 != stages.len() {
            return Err(Error::Precondition("a chain needs one link between consecutive stages".into()));
        }
        let links = self
            .links
            .iter()
            .enumerate()
            .map(|(i, t)| GroupHom::from_table(stages[i].group(), stages[i + 1].group(), t.clone()))
            .collect::<Result<Vec<_>>>()?;
        let ledger = self
            .ledger
            .iter()
            .map(|e| {
                if e.satisfied_at >= stages.len() {
                    return Err(Error::Precondition("ledger entry past the last stage".into()));
                }
                Ok(LedgerEntry {
                    task: e.task.build(catalog, stages.len())?,
                    satisfied_at: e.satisfied_at,
                    psi: e.psi.clone(),
                    amalgamated: e.amalgamated,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let unsatisfied = self.unsatisfied.iter().map(|t| t.build(catalog, stages.len())).collect::<Result<_>>()?;
        Ok(Chain { stages, links, ledger, unsatisfied })
    }
}

/// JSON export: stages, links and ledger.
pub fn chain_json(chain: &Chain) -> Value {
    serde_json::to_value(ChainExport::of(chain)).expect("descriptors always serialize")
}

/// DOT export of the embedding diagram: stages, links, and the catalog entries
/// that had to be amalgamated in.
pub fn chain_dot(chain: &Chain) -> String {
    let mut s = String::from("digraph chain {\n  rankdir=LR;\n");
    for (i, g) in chain.stages.iter().enumerate() {
        let _ = writeln!(s, "  G{i} [label=\"G{i}\\n|G|={}\\n{:?}\"];", g.order(), g.group().factors());
    }
    for i in 0..chain.links.len() {
        let _ = writeln!(s, "  G{i} -> G{};", i + 1);
    }
    let mut entries = BTreeSet::new();
    for e in chain.ledger.iter().filter(|e| e.amalgamated) {
        entries.insert(e.task.entry);
        let _ = writeln!(s, "  H{} -> G{} [style=dashed];", e.task.entry, e.satisfied_at);
    }
    for h in entries {
        let _ = writeln!(s, "  H{h} [shape=box];");
    }
    s.push_str("}\n");
    s
}

/// Checks a stage group is a valid grid-valued member of the class.
pub fn check_stage(g: &ValuedGroup, grid: &Grid) -> Result<()> {
    validate_value(g.group(), g.values().to_vec(), g.cap(), g.exponent())?;
    match g.values().iter().find(|v| !grid.contains(v)) {
        Some(v) => Err(Error::Postcondition(format!("off-grid value {v}"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn half_grid() -> Grid {
        Grid::new(1, Cap::One, None).unwrap()
    }

    #[test]
    fn grid_values() {
        assert_eq!(half_grid().values(), vec![r(1, 2), r(1, 1)]);
        assert!(Grid::new(2, Cap::Infinite, None).is_err());
        let g = Grid::new(1, Cap::Infinite, Some(r(3, 2))).unwrap();
        assert_eq!(g.values().len(), 3);
        assert!(g.contains(&r(3, 2)) && !g.contains(&r(2, 1)) && !g.contains(&r(1, 4)));
    }

    #[test]
    fn small_catalogs() {
        let c = enumerate_catalog(&half_grid(), 2, 1, DEFAULT_TABLE_BUDGET).unwrap();
        assert_eq!(c.len(), 1);
        let c = enumerate_catalog(&half_grid(), 2, 2, DEFAULT_TABLE_BUDGET).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.entries[1].values(), &[r(0, 1), r(1, 2)]);
        assert_eq!(c.entries[2].values(), &[r(0, 1), r(1, 1)]);
    }

    #[test]
    fn catalog_entries_pairwise_distinct() {
        let c = enumerate_catalog(&half_grid(), 2, 4, DEFAULT_TABLE_BUDGET).unwrap();
        for i in 0..c.len() {
            for j in 0..i {
                assert!(isometric_isomorphic(&c.entries[i], &c.entries[j]).is_none());
            }
        }
        assert!(Catalog::from_entries(half_grid(), 2, c.entries.clone()).is_ok());
    }

    #[test]
    fn catalog_budget() {
        let q = Grid::new(2, Cap::One, None).unwrap();
        assert!(matches!(enumerate_catalog(&q, 2, 4, 10), Err(Error::Budget { .. })));
    }

    #[test]
    fn trivial_catalog_keeps_chain_trivial() {
        let c = enumerate_catalog(&half_grid(), 2, 1, DEFAULT_TABLE_BUDGET).unwrap();
        let chain = build_chain(&c, 3, &ChainBudget::default()).unwrap();
        assert_eq!(chain.stages.len(), 1);
        assert!(chain.ledger.is_empty());
    }

    #[test]
    fn one_round_realizes_value_one() {
        let z2 = ValuedGroup::new(&FiniteAbelianGroup::cyclic(2), vec![r(0, 1), r(1, 1)], Cap::One, 2).unwrap();
        let c = Catalog::from_entries(half_grid(), 2, vec![ValuedGroup::trivial(Cap::One, 2), z2]).unwrap();
        let chain = build_chain(&c, 0, &ChainBudget::default()).unwrap();
        assert!(chain.last().values().contains(&r(1, 1)));
        verify_ledger(&chain, &c).unwrap();
    }

    #[test]
    fn drained_three_entry_chain() {
        let c = enumerate_catalog(&half_grid(), 2, 2, DEFAULT_TABLE_BUDGET).unwrap();
        let chain = build_chain(&c, 2, &ChainBudget::default()).unwrap();
        assert!(chain.unsatisfied.is_empty());
        verify_ledger(&chain, &c).unwrap();
        for g in &chain.stages {
            check_stage(g, &c.grid).unwrap();
        }
        let emb = verify_embeddings(chain.last(), &c, DEFAULT_SEARCH_BUDGET);
        assert!(emb.all_satisfied());
        let tasks: Vec<Task> = chain.ledger.iter().map(|e| e.task.clone()).collect();
        let last = chain.stages.len() - 1;
        assert!(verify_tasks(&chain, &c, &tasks, last, DEFAULT_SEARCH_BUDGET).all_satisfied());

        let text = serde_json::to_string(&chain_json(&chain)).unwrap();
        let back: ChainExport = crate::json::parse(&text).unwrap();
        let rebuilt = back.build(&c).unwrap();
        assert_eq!(rebuilt.stages, chain.stages);
        assert_eq!(serde_json::to_string(&chain_json(&rebuilt)).unwrap(), text);
    }

    #[test]
    fn trivial_group_fails_embedding() {
        let c = enumerate_catalog(&half_grid(), 2, 2, DEFAULT_TABLE_BUDGET).unwrap();
        let rep = verify_embeddings(&ValuedGroup::trivial(Cap::One, 2), &c, 1000);
        assert_eq!(rep.satisfied, 1);
        assert_eq!(rep.unsatisfied, vec![1, 2]);
    }

    #[test]
    fn extension_search_respects_base() {
        // ℤ₄ with values (0, 1, 1/2, 1) into ℤ₂ × ℤ₄ with a matching copy
        let h = ValuedGroup::new(&FiniteAbelianGroup::cyclic(4), vec![r(0, 1), r(1, 1), r(1, 2), r(1, 1)], Cap::One, 4)
            .unwrap();
        let index = ValueIndex::new(&h);
        let k = Subgroup::generated_by(h.group(), &[2]);
        let mut budget = 1000;
        let ext = find_isometric_extension(&h, &h, &index, &k, &[0, 2], &mut budget).unwrap().unwrap();
        assert_eq!(ext[2], 2);
        let mut count = 0;
        for_each_isometric_extension(&h, &h, &index, &k, &[0, 2], &mut budget, &mut |_| {
            count += 1;
            true
        })
        .unwrap();
        assert_eq!(count, 2);
    }
}
