//! The `valgrp` command line: one subcommand per construction, JSON in and out.
//!
//! Exit codes: `0` success, `1` a checked property failed, `2` usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::amalgam::{amalgamate, amalgamate_approx, amalgamate_mixed, AmalgamResult};
use crate::error::{Error, Result};
use crate::extension::{
    check_trv_n, extend_onegen, extend_semivalue_modulus, extend_value_grid, find_realizer, midpoint_extend,
    OneGenExtension,
};
use crate::fraisse::{
    build_chain, catalog_json, chain_dot, chain_json, enumerate_catalog, verify_embeddings, verify_ledger,
    verify_tasks, Catalog, Chain, ChainBudget, ChainConfig, ChainExport, DEFAULT_SEARCH_BUDGET, DEFAULT_TABLE_BUDGET,
};
use crate::free::{
    free_group, induced_map, pd_matching, word_metric, zn_generating_set, FreeValuedGroup, GeneratingSet,
};
use crate::gen::Gen;
use crate::group::{count_homs, enumerate_homs, quotient, FiniteAbelianGroup, GroupElement, Subgroup, SubgroupHom};
use crate::json::{self, GroupDesc, HomDesc, KatetovDesc, MetricDesc, PlDesc, StepDesc, Table, ValuedGroupDesc};
use crate::pv::{norming_validate, norming_violation};
use crate::rational::{Extended, Rational};
use crate::suites::{self, SUITES};
use crate::values::{cap_value_at, complete_cost, isometric_isomorphic, Cap, CostFunction};

#[derive(Parser, Debug)]
#[command(name = "valgrp", version, about = "Exact computations with finite valued Abelian groups")]
pub struct Cli {
    /// JSON input for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized runs; a fresh seed is drawn and printed when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finite Abelian groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Value tables.
    #[command(subcommand)]
    Value(ValueCmd),
    /// Katětov maps and one-point extensions.
    #[command(subcommand)]
    Katetov(KatetovCmd),
    /// Extending a value from a subgroup.
    #[command(subcommand)]
    Valext(ValextCmd),
    /// Amalgamation; without --config a random instance is drawn from --seed.
    Amalgamate {
        #[arg(value_enum, default_value_t = AmalgamKind::A1)]
        kind: AmalgamKind,
    },
    /// Free valued groups over finite metric spaces.
    #[command(subcommand)]
    Free(FreeCmd),
    /// Word value of a generating set; `--N n` uses the standard set on Z_n^n.
    Wordmetric {
        #[arg(long = "N")]
        n: Option<u64>,
    },
    /// Finite Fraïssé chains.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Step functions and norming functions.
    #[command(subcommand)]
    Pv(PvCmd),
    /// Runs a named property suite, or `all`, or `list`.
    Suite { name: String },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    Validate,
    Quotient,
    Homs,
}

#[derive(Subcommand, Debug)]
enum ValueCmd {
    Validate,
    Complete,
    Cap,
    Iso,
}

#[derive(Subcommand, Debug)]
enum KatetovCmd {
    Check,
    Extend,
    Realize,
    Midpoint,
}

#[derive(Subcommand, Debug)]
enum ValextCmd {
    Grid,
    Modulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AmalgamKind {
    A1,
    A2,
    A3,
}

#[derive(Subcommand, Debug)]
enum FreeCmd {
    Build,
    Pd,
    Matching,
    Induce,
}

#[derive(Subcommand, Debug)]
enum ChainCmd {
    Build,
    Verify {
        /// A chain exported by `chain build`; rebuilt from the config when absent.
        #[arg(long)]
        chain: Option<PathBuf>,
    },
    Export,
}

#[derive(Subcommand, Debug)]
enum PvCmd {
    Norm,
    Check,
}

/// What a command produced: summary lines, an optional artifact, and whether
/// the checked property held.
struct Outcome {
    summary: Vec<String>,
    artifact: Option<Artifact>,
    ok: bool,
}

enum Artifact {
    Json(Value),
    Text(String),
}

impl Outcome {
    fn json(summary: Vec<String>, v: Value) -> Self {
        Outcome { summary, artifact: Some(Artifact::Json(v)), ok: true }
    }

    fn failed(mut self) -> Self {
        self.ok = false;
        self
    }

    fn with_ok(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema { .. }
        | Error::Parse(_)
        | Error::Io(_)
        | Error::MalformedElement(_)
        | Error::MalformedGroup(_) => 2,
        _ => 1,
    }
}

/// Runs the command line with process arguments and standard streams.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first), executes one command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out).and_then(|o| emit(&cli, o, out)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(cli: &Cli, o: Outcome, out: &mut dyn Write) -> Result<i32> {
    for line in &o.summary {
        writeln!(out, "{line}")?;
    }
    if let Some(a) = o.artifact {
        let text = match a {
            Artifact::Json(v) => serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n",
            Artifact::Text(s) => s,
        };
        match &cli.out {
            Some(p) => std::fs::write(p, text)?,
            None => out.write_all(text.as_bytes())?,
        }
    }
    Ok(if o.ok { 0 } else { 1 })
}

fn load<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| usage("this command needs --config <path>"))?;
    let text = std::fs::read_to_string(path)?;
    json::parse(&text)
}

fn seed_of(cli: &Cli, summary: &mut Vec<String>) -> u64 {
    match cli.seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            summary.push(format!("seed: {s}"));
            s
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = cli.config.as_deref();
    match &cli.command {
        Command::Group(c) => group_cmd(c, cfg),
        Command::Value(c) => value_cmd(c, cfg),
        Command::Katetov(c) => katetov_cmd(c, cfg),
        Command::Valext(c) => valext_cmd(c, cfg),
        Command::Amalgamate { kind } => amalgamate_cmd(cli, *kind),
        Command::Free(c) => free_cmd(c, cfg),
        Command::Wordmetric { n } => wordmetric_cmd(*n, cfg),
        Command::Chain(c) => chain_cmd(cli, c),
        Command::Pv(c) => pv_cmd(c, cfg),
        Command::Suite { name } => suite_cmd(cli, name, out),
    }
}

fn elements(g: &FiniteAbelianGroup, es: &[GroupElement], field: &str) -> Result<Vec<usize>> {
    es.iter()
        .enumerate()
        .map(|(i, e)| {
            g.index(e).map_err(|err| Error::Schema { path: format!("{field}[{i}]"), message: err.to_string() })
        })
        .collect()
}

fn subgroup_hom(
    source: &FiniteAbelianGroup,
    target: &FiniteAbelianGroup,
    pairs: &[(GroupElement, GroupElement)],
    field: &str,
) -> Result<SubgroupHom> {
    let (xs, ys): (Vec<GroupElement>, Vec<GroupElement>) = pairs.iter().cloned().unzip();
    let xs = elements(source, &xs, field)?;
    let ys = elements(target, &ys, field)?;
    let domain = Subgroup::from_elements(source, &xs)?;
    let images = domain.elements().iter().map(|x| ys[xs.iter().position(|y| y == x).expect("listed")]).collect();
    SubgroupHom::new(&domain, target, images)
}

fn keys(g: &FiniteAbelianGroup, xs: impl IntoIterator<Item = usize>) -> Vec<String> {
    xs.into_iter().map(|x| g.coords(x).key()).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientIn {
    group: GroupDesc,
    subgroup: Vec<GroupElement>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomsIn {
    source: GroupDesc,
    target: GroupDesc,
    #[serde(default)]
    limit: Option<u64>,
}

fn group_cmd(c: &GroupCmd, cfg: Option<&Path>) -> Result<Outcome> {
    match c {
        GroupCmd::Validate => {
            let g = load::<GroupDesc>(cfg)?.build()?;
            let summary = vec![format!(
                "group {:?}: order {}, exponent {}, invariant factors {:?}",
                g.factors(),
                g.order(),
                g.exponent(),
                g.invariant_factors()
            )];
            Ok(Outcome::json(
                summary,
                json!({
                    "factors": g.factors(),
                    "order": g.order(),
                    "exponent": g.exponent(),
                    "invariant_factors": g.invariant_factors(),
                }),
            ))
        }
        GroupCmd::Quotient => {
            let input: QuotientIn = load(cfg)?;
            let g = input.group.build()?;
            let gens = elements(&g, &input.subgroup, "subgroup")?;
            let k = Subgroup::generated_by(&g, &gens);
            let (q, pi) = quotient(&g, &k)?;
            Ok(Outcome::json(
                vec![format!("G/K with |K| = {}: factors {:?}", k.order(), q.factors())],
                json!({ "quotient": GroupDesc::of(&q), "projection": HomDesc::of(&pi) }),
            ))
        }
        GroupCmd::Homs => {
            let input: HomsIn = load(cfg)?;
            let (s, t) = (input.source.build()?, input.target.build()?);
            let total = count_homs(&s, &t);
            let limit = input.limit.unwrap_or(100);
            let homs: Vec<HomDesc> =
                enumerate_homs(&s, &t, u64::MAX)?.take(limit as usize).map(|h| HomDesc::of(&h)).collect();
            Ok(Outcome::json(
                vec![format!("{total} homomorphisms, listing {}", homs.len())],
                json!({ "count": total, "homs": homs }),
            ))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CostIn {
    factors: Vec<u64>,
    /// Missing elements cost `∞`.
    cost: std::collections::BTreeMap<String, Extended>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CapIn {
    group: ValuedGroupDesc,
    at: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IsoIn {
    a: ValuedGroupDesc,
    b: ValuedGroupDesc,
}

fn key_index(g: &FiniteAbelianGroup, key: &str, field: &str) -> Result<usize> {
    let coords = if key.trim().is_empty() {
        Ok(Vec::new())
    } else {
        key.split(',').map(|c| c.trim().parse::<u64>()).collect::<std::result::Result<Vec<_>, _>>()
    };
    coords
        .map_err(|_| Error::Schema { path: format!("{field}[{key:?}]"), message: "not a coordinate key".into() })
        .and_then(|c| {
            g.index(&GroupElement(c))
                .map_err(|e| Error::Schema { path: format!("{field}[{key:?}]"), message: e.to_string() })
        })
}

fn value_cmd(c: &ValueCmd, cfg: Option<&Path>) -> Result<Outcome> {
    match c {
        ValueCmd::Validate => {
            let d: ValuedGroupDesc = load(cfg)?;
            let v = d.build()?;
            Ok(Outcome::json(
                vec![format!("valid value on {:?}: diameter {}", v.group().factors(), v.diameter())],
                serde_json::to_value(ValuedGroupDesc::of(&v)).expect("serializable"),
            ))
        }
        ValueCmd::Complete => {
            let input: CostIn = load(cfg)?;
            let g = GroupDesc { factors: input.factors }.build()?;
            let mut cost = vec![Extended::Infinite; g.order()];
            cost[0] = Extended::zero();
            for (k, v) in &input.cost {
                cost[key_index(&g, k, "cost")?] = v.clone();
            }
            let done = complete_cost(&CostFunction::new(&g, cost)?);
            let table = Table(
                g.elements().filter_map(|x| done.values[x].finite().map(|v| (g.coords(x).key(), v.clone()))).collect(),
            );
            let mut summary = vec![format!("completed {} elements", g.order())];
            if !done.unreachable.is_empty() {
                summary.push(format!("{} unreachable", done.unreachable.len()));
            }
            Ok(Outcome::json(
                summary,
                json!({ "factors": g.factors(), "value": table, "unreachable": keys(&g, done.unreachable.iter().copied()) }),
            ))
        }
        ValueCmd::Cap => {
            let input: CapIn = load(cfg)?;
            let v = cap_value_at(&input.group.build()?, &input.at)?;
            Ok(Outcome::json(
                vec![format!("capped at {}", input.at)],
                serde_json::to_value(ValuedGroupDesc::of(&v)).expect("serializable"),
            ))
        }
        ValueCmd::Iso => {
            let input: IsoIn = load(cfg)?;
            let (a, b) = (input.a.build()?, input.b.build()?);
            Ok(match isometric_isomorphic(&a, &b) {
                Some(h) => Outcome::json(vec!["isometrically isomorphic".into()], json!({ "iso": HomDesc::of(&h) })),
                None => Outcome::json(vec!["not isometrically isomorphic".into()], json!({ "iso": null })).failed(),
            })
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KatetovIn {
    group: ValuedGroupDesc,
    katetov: KatetovDesc,
    #[serde(rename = "N", default)]
    n: Option<u64>,
    #[serde(default)]
    cap: Option<Cap>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MidpointIn {
    group: ValuedGroupDesc,
    x: GroupElement,
    y: GroupElement,
}

fn extension_json(e: &OneGenExtension) -> Value {
    json!({
        "result": ValuedGroupDesc::of(&e.result),
        "embedding": HomDesc::of(&e.embedding),
        "witness": e.result.group().coords(e.witness),
        "m": e.m,
        "M": e.big_m,
        "c": e.c,
    })
}

fn katetov_cmd(c: &KatetovCmd, cfg: Option<&Path>) -> Result<Outcome> {
    if let KatetovCmd::Midpoint = c {
        let input: MidpointIn = load(cfg)?;
        let g = input.group.build()?;
        let (x, y) = (g.group().index(&input.x)?, g.group().index(&input.y)?);
        let e = midpoint_extend(&g, x, y)?;
        return Ok(Outcome::json(
            vec![format!(
                "midpoint {} at half distance {}",
                e.result.group().coords(e.witness),
                g.dist(x, y) * &Rational::new(1, 2)
            )],
            extension_json(&e),
        ));
    }
    let input: KatetovIn = load(cfg)?;
    let base = input.group.build()?;
    let n = input.n.unwrap_or(base.exponent());
    let cap = input.cap.unwrap_or(base.cap());
    let f = input.katetov.build(&base)?;
    let g = base.group();
    match c {
        KatetovCmd::Check => Ok(match check_trv_n(&f, n) {
            None => Outcome::json(vec![format!("trv-{n} holds")], json!({ "admissible": true, "witness": null })),
            Some(w) => {
                let w: Vec<GroupElement> = w.into_iter().map(|x| g.coords(x)).collect();
                let shown: Vec<String> = w.iter().map(|e| e.to_string()).collect();
                Outcome::json(
                    vec![format!("trv-{n} fails at {}", shown.join(" "))],
                    json!({ "admissible": false, "witness": w }),
                )
                .failed()
            }
        }),
        KatetovCmd::Extend => {
            let e = extend_onegen(&f, n, cap)?;
            Ok(Outcome::json(
                vec![format!(
                    "extended to {:?} (order {}), witness {}",
                    e.result.group().factors(),
                    e.result.order(),
                    e.result.group().coords(e.witness)
                )],
                extension_json(&e),
            ))
        }
        KatetovCmd::Realize => Ok(match find_realizer(&f) {
            Some(b) => Outcome::json(vec![format!("realized by {}", g.coords(b))], json!({ "realizer": g.coords(b) })),
            None => Outcome::json(vec!["not realized in G".into()], json!({ "realizer": null })).failed(),
        }),
        KatetovCmd::Midpoint => unreachable!("handled above"),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridIn {
    group: ValuedGroupDesc,
    subgroup: Vec<GroupElement>,
    grid_log2: u32,
    eps: Rational,
    #[serde(default)]
    cap: Option<Cap>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModulusIn {
    group: ValuedGroupDesc,
    subgroup: Vec<GroupElement>,
    lambda0: Table,
    omega: PlDesc,
    #[serde(default)]
    rho: Option<PlDesc>,
    #[serde(default)]
    tau: Option<PlDesc>,
}

fn valext_cmd(c: &ValextCmd, cfg: Option<&Path>) -> Result<Outcome> {
    match c {
        ValextCmd::Grid => {
            let input: GridIn = load(cfg)?;
            let d = input.group.build()?;
            let gens = elements(d.group(), &input.subgroup, "subgroup")?;
            let d0 = Subgroup::generated_by(d.group(), &gens);
            let out = extend_value_grid(&d, &d0, input.grid_log2, &input.eps, input.cap.unwrap_or(d.cap()))?;
            Ok(Outcome::json(
                vec![format!("grid 1/{} value extending |D0| = {}", 1u64 << input.grid_log2, d0.order())],
                serde_json::to_value(ValuedGroupDesc::of(&out)).expect("serializable"),
            ))
        }
        ValextCmd::Modulus => {
            let input: ModulusIn = load(cfg)?;
            let d = input.group.build()?;
            let g = d.group();
            let gens = elements(g, &input.subgroup, "subgroup")?;
            let d0 = Subgroup::generated_by(g, &gens);
            let mut lambda0: Vec<Option<Rational>> = vec![None; d0.order()];
            for (k, v) in &input.lambda0.0 {
                let x = key_index(g, k, "lambda0")?;
                let i = d0.position(x).ok_or_else(|| Error::Schema {
                    path: format!("lambda0[{k:?}]"),
                    message: "not in the subgroup".into(),
                })?;
                lambda0[i] = Some(v.clone());
            }
            let lambda0 = lambda0
                .into_iter()
                .zip(d0.elements())
                .map(|(v, &h)| {
                    v.ok_or_else(|| Error::Schema {
                        path: "lambda0".into(),
                        message: format!("missing {}", g.coords(h).key()),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let omega = input.omega.modulus()?;
            let rt = match (&input.rho, &input.tau) {
                (Some(r), Some(t)) => Some((r.modulus()?, t.modulus()?)),
                (None, None) => None,
                _ => return Err(usage("give both rho and tau or neither")),
            };
            let out = extend_semivalue_modulus(&d, &d0, &lambda0, &omega, rt.as_ref().map(|(r, t)| (r, t)))?;
            let table = Table(g.elements().map(|x| (g.coords(x).key(), out.value(x).clone())).collect());
            Ok(Outcome::json(
                vec![format!("semivalue extending λ0 from |D0| = {}", d0.order())],
                json!({ "factors": g.factors(), "value": table }),
            ))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct A1In {
    d0: ValuedGroupDesc,
    d1: ValuedGroupDesc,
    d2: ValuedGroupDesc,
    phi1: Vec<GroupElement>,
    phi2: Vec<GroupElement>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct A2In {
    d1: ValuedGroupDesc,
    d2: ValuedGroupDesc,
    u: Vec<(GroupElement, GroupElement)>,
    v: Vec<GroupElement>,
    eps: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct A3In {
    d1: ValuedGroupDesc,
    d2: ValuedGroupDesc,
    phi1: Vec<(GroupElement, GroupElement)>,
    phi2: Vec<(GroupElement, GroupElement)>,
    eps: Rational,
}

fn amalgam_outcome(mut summary: Vec<String>, out: &AmalgamResult) -> Outcome {
    summary.push(format!(
        "amalgam {:?} of order {}, sup distance {} (bound {})",
        out.result.group().factors(),
        out.result.order(),
        out.diagnostics.sup_distance,
        out.diagnostics.bound
    ));
    Outcome::json(
        summary,
        json!({
            "result": ValuedGroupDesc::of(&out.result),
            "psi1": HomDesc::of(&out.psi1),
            "psi2": HomDesc::of(&out.psi2),
            "sup_distance": out.diagnostics.sup_distance,
            "bound": out.diagnostics.bound,
        }),
    )
}

fn amalgamate_cmd(cli: &Cli, kind: AmalgamKind) -> Result<Outcome> {
    let mut summary = Vec::new();
    let cfg = cli.config.as_deref();
    let random = cfg.is_none();
    let mut gen = if random { Some(Gen::new(seed_of(cli, &mut summary))) } else { None };
    let out = match kind {
        AmalgamKind::A1 => {
            let (d0, d1, d2, phi1, phi2) = match gen.as_mut() {
                Some(gen) => {
                    let i = gen.a1(16, 3, Cap::One, 2);
                    (i.d0, i.d1, i.d2, i.phi1, i.phi2)
                }
                None => {
                    let input: A1In = load(cfg)?;
                    let (d0, d1, d2) = (input.d0.build()?, input.d1.build()?, input.d2.build()?);
                    let phi1 = HomDesc {
                        source: GroupDesc::of(d0.group()),
                        target: GroupDesc::of(d1.group()),
                        images: input.phi1,
                    }
                    .build_between(d0.group(), d1.group())?;
                    let phi2 = HomDesc {
                        source: GroupDesc::of(d0.group()),
                        target: GroupDesc::of(d2.group()),
                        images: input.phi2,
                    }
                    .build_between(d0.group(), d2.group())?;
                    (d0, d1, d2, phi1, phi2)
                }
            };
            amalgamate(&d0, &d1, &d2, &phi1, &phi2)?
        }
        AmalgamKind::A2 => {
            let (d1, d0, d2, u, v, eps) = match gen.as_mut() {
                Some(gen) => {
                    let i = gen.a2(16, 3, Cap::One, 2);
                    (i.d1, i.d0, i.d2, i.u, i.v, i.eps)
                }
                None => {
                    let input: A2In = load(cfg)?;
                    let (d1, d2) = (input.d1.build()?, input.d2.build()?);
                    let u = subgroup_hom(d1.group(), d2.group(), &input.u, "u")?;
                    let v = HomDesc {
                        source: GroupDesc::of(d1.group()),
                        target: GroupDesc::of(d2.group()),
                        images: input.v,
                    }
                    .build_between(d1.group(), d2.group())?;
                    (d1, u.domain().clone(), d2, u, v, input.eps)
                }
            };
            amalgamate_approx(&d1, &d0, &d2, &u, &v, &eps)?
        }
        AmalgamKind::A3 => {
            let (d1, d2, phi1, phi2, eps) = match gen.as_mut() {
                Some(gen) => {
                    let i = gen.a3(16, 3, Cap::One, 2);
                    (i.d1, i.d2, i.phi1, i.phi2, i.eps)
                }
                None => {
                    let input: A3In = load(cfg)?;
                    let (d1, d2) = (input.d1.build()?, input.d2.build()?);
                    let phi1 = subgroup_hom(d1.group(), d2.group(), &input.phi1, "phi1")?;
                    let phi2 = subgroup_hom(d1.group(), d2.group(), &input.phi2, "phi2")?;
                    (d1, d2, phi1, phi2, input.eps)
                }
            };
            amalgamate_mixed(&d1, &d2, &phi1, &phi2, &eps)?
        }
    };
    Ok(amalgam_outcome(summary, &out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FreeIn {
    space: MetricDesc,
    #[serde(rename = "N")]
    n: u64,
    #[serde(default)]
    cap: Option<Cap>,
    #[serde(default)]
    coefficients: Option<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InduceIn {
    source: MetricDesc,
    target: MetricDesc,
    #[serde(rename = "N")]
    n: u64,
    /// Label of the image of each source point.
    map: Vec<String>,
}

fn free_element(fvg: &FreeValuedGroup, coeffs: &Option<Vec<i64>>) -> Result<usize> {
    let c = coeffs.as_ref().ok_or_else(|| usage("this command needs \"coefficients\""))?;
    if c.len() != fvg.space().len() {
        return Err(Error::Schema {
            path: "coefficients".into(),
            message: format!("expected {} entries", fvg.space().len()),
        });
    }
    fvg.from_coefficients(c)
}

fn free_cmd(c: &FreeCmd, cfg: Option<&Path>) -> Result<Outcome> {
    if let FreeCmd::Induce = c {
        let input: InduceIn = load(cfg)?;
        let (sx, sy) = (input.source.build()?, input.target.build()?);
        let (fx, fy) = (free_group(&sx, input.n, Cap::Infinite)?, free_group(&sy, input.n, Cap::Infinite)?);
        if input.map.len() != sx.len() {
            return Err(Error::Schema { path: "map".into(), message: format!("expected {} labels", sx.len()) });
        }
        let v = input
            .map
            .iter()
            .enumerate()
            .map(|(i, l)| {
                sy.position(l)
                    .ok_or_else(|| Error::Schema { path: format!("map[{i}]"), message: format!("unknown point {l:?}") })
            })
            .collect::<Result<Vec<_>>>()?;
        let h = induced_map(&fx, &fy, &v)?;
        return Ok(Outcome::json(
            vec![format!("induced homomorphism with Lipschitz constant {}", h.constant)],
            json!({ "hom": HomDesc::of(&h.hom), "constant": h.constant }),
        ));
    }
    let input: FreeIn = load(cfg)?;
    let space = input.space.build()?;
    let fvg = free_group(&space, input.n, input.cap.unwrap_or(Cap::Infinite))?;
    let g = fvg.carrier();
    match c {
        FreeCmd::Build => {
            let hats: Vec<Value> = (0..space.len())
                .map(|i| json!({ "point": space.points()[i], "element": g.coords(fvg.hat(i)) }))
                .collect();
            Ok(Outcome::json(
                vec![format!(
                    "Z_{}[X] with |X| = {}: order {}, diameter {}",
                    input.n,
                    space.len(),
                    g.order(),
                    fvg.value().diameter()
                )],
                json!({ "value": ValuedGroupDesc::of(fvg.value()), "points": hats }),
            ))
        }
        FreeCmd::Pd => {
            let f = free_element(&fvg, &input.coefficients)?;
            let (raw, capped) = (fvg.pd(f), fvg.value().value(f));
            Ok(Outcome::json(
                vec![format!("p_d = {raw}, capped value {capped}")],
                json!({ "element": g.coords(f), "pd": raw, "value": capped }),
            ))
        }
        FreeCmd::Matching => {
            let f = free_element(&fvg, &input.coefficients)?;
            let m = pd_matching(&fvg, f)?;
            let agree = m == *fvg.pd(f);
            Ok(Outcome::json(
                vec![format!("minimum perfect matching {m}, p_d {}", fvg.pd(f))],
                json!({ "matching": m, "pd": fvg.pd(f), "agree": agree }),
            )
            .with_ok(agree))
        }
        FreeCmd::Induce => unreachable!("handled above"),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WordIn {
    factors: Vec<u64>,
    generators: Vec<GroupElement>,
    #[serde(default)]
    weights: Option<Vec<Rational>>,
    #[serde(default)]
    alpha: Option<Rational>,
}

fn wordmetric_cmd(n: Option<u64>, cfg: Option<&Path>) -> Result<Outcome> {
    let (set, alpha) = match (n, cfg) {
        (Some(n), None) => {
            if n < 2 {
                return Err(usage("--N must be at least 2"));
            }
            (zn_generating_set(n)?, Rational::one())
        }
        (None, Some(_)) => {
            let input: WordIn = load(cfg)?;
            let g = GroupDesc { factors: input.factors }.build()?;
            let gens = elements(&g, &input.generators, "generators")?;
            let set = match input.weights {
                Some(w) => GeneratingSet::weighted(&g, gens, w)?,
                None => GeneratingSet::symmetric(&g, &gens)?,
            };
            (set, input.alpha.unwrap_or_else(Rational::one))
        }
        _ => return Err(usage("give exactly one of --N or --config")),
    };
    let v = word_metric(&set, &alpha)?;
    let g = v.group();
    let mut summary = vec![format!("word value on {:?}: diameter {}", g.factors(), v.diameter())];
    if let Some(n) = n {
        let all = (0..n as usize).fold(0, |s, j| g.add(s, g.generator(j)));
        summary.push(format!("‖Σe_j‖_F = {}", v.value(all)));
        summary.push(format!("‖e_1 − e_2‖_F = {}", v.dist(g.generator(0), g.generator(1))));
    }
    Ok(Outcome::json(summary, serde_json::to_value(ValuedGroupDesc::of(&v)).expect("serializable")))
}

fn build_from_config(cfg: &ChainConfig) -> Result<(Catalog, Chain)> {
    let catalog = enumerate_catalog(&cfg.grid()?, cfg.n, cfg.max_order, DEFAULT_TABLE_BUDGET)?;
    let chain = build_chain(&catalog, cfg.rounds, &ChainBudget::default())?;
    Ok((catalog, chain))
}

fn chain_summary(catalog: &Catalog, chain: &Chain) -> String {
    format!(
        "catalog {} entries; chain of {} stages, final order {}, ledger {}, unsatisfied {}",
        catalog.len(),
        chain.stages.len(),
        chain.last().order(),
        chain.ledger.len(),
        chain.unsatisfied.len()
    )
}

fn chain_artifact(format: Format, chain: &Chain, wrap: impl FnOnce(Value) -> Value) -> Artifact {
    match format {
        Format::Json => Artifact::Json(wrap(chain_json(chain))),
        Format::Dot => Artifact::Text(chain_dot(chain)),
    }
}

fn chain_cmd(cli: &Cli, c: &ChainCmd) -> Result<Outcome> {
    let cfg: ChainConfig = load(cli.config.as_deref())?;
    match c {
        ChainCmd::Build => {
            let (catalog, chain) = build_from_config(&cfg)?;
            Ok(Outcome {
                summary: vec![chain_summary(&catalog, &chain)],
                artifact: Some(chain_artifact(cli.format, &chain, |v| v)),
                ok: true,
            })
        }
        ChainCmd::Export => {
            let (catalog, chain) = build_from_config(&cfg)?;
            let cat = catalog_json(&catalog);
            Ok(Outcome {
                summary: vec![chain_summary(&catalog, &chain)],
                artifact: Some(chain_artifact(cli.format, &chain, |v| json!({ "catalog": cat, "chain": v }))),
                ok: true,
            })
        }
        ChainCmd::Verify { chain: path } => {
            let catalog = enumerate_catalog(&cfg.grid()?, cfg.n, cfg.max_order, DEFAULT_TABLE_BUDGET)?;
            let chain = match path {
                Some(p) => json::parse::<ChainExport>(&std::fs::read_to_string(p)?)?.build(&catalog)?,
                None => build_chain(&catalog, cfg.rounds, &ChainBudget::default())?,
            };
            let ledger = verify_ledger(&chain, &catalog);
            let last = chain.stages.len() - 1;
            let tasks: Vec<_> = chain.ledger.iter().map(|e| e.task.clone()).collect();
            let on_ledger = verify_tasks(&chain, &catalog, &tasks, last, DEFAULT_SEARCH_BUDGET);
            let emb = verify_embeddings(chain.last(), &catalog, DEFAULT_SEARCH_BUDGET);
            let pct = |a: usize, b: usize| if b == 0 { 100.0 } else { 100.0 * a as f64 / b as f64 };
            let ok = ledger.is_ok() && on_ledger.all_satisfied() && emb.all_satisfied() && chain.unsatisfied.is_empty();
            let summary = vec![
                chain_summary(&catalog, &chain),
                format!(
                    "ledger records: {}",
                    match &ledger {
                        Ok(()) => "consistent".to_string(),
                        Err(e) => e.to_string(),
                    }
                ),
                format!(
                    "ledger tasks: {}/{} ({:.1}%)",
                    on_ledger.satisfied,
                    on_ledger.tasks,
                    pct(on_ledger.satisfied, on_ledger.tasks)
                ),
                format!("embedding tasks: {}/{} ({:.1}%)", emb.satisfied, emb.tasks, pct(emb.satisfied, emb.tasks)),
            ];
            Ok(Outcome::json(
                summary,
                json!({
                    "ledger_consistent": ledger.is_ok(),
                    "ledger_tasks": on_ledger.tasks,
                    "ledger_satisfied": on_ledger.satisfied,
                    "embedding_tasks": emb.tasks,
                    "embedding_satisfied": emb.satisfied,
                    "unsatisfied": chain.unsatisfied.len(),
                }),
            )
            .with_ok(ok))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormingIn {
    kappa: PlDesc,
    #[serde(rename = "L", default)]
    l: Option<Rational>,
}

fn pv_cmd(c: &PvCmd, cfg: Option<&Path>) -> Result<Outcome> {
    match c {
        PvCmd::Norm => {
            let d: StepDesc = load(cfg)?;
            let host = Arc::new(d.host.build()?);
            let u = d.build_on(host.clone())?;
            let g = host.group();
            let dec: Vec<(Rational, GroupElement)> =
                u.decomposition().into_iter().map(|(t, h)| (t, g.coords(h))).collect();
            Ok(Outcome::json(vec![format!("‖u‖_q = {}", u.norm())], json!({ "norm": u.norm(), "decomposition": dec })))
        }
        PvCmd::Check => {
            let input: NormingIn = load(cfg)?;
            let k = input.kappa.build()?;
            Ok(match norming_validate(&k, input.l.as_ref()) {
                Ok(nf) => Outcome::json(
                    vec![format!("norming function ({:?}) with L = {}", nf.kind(), nf.l())],
                    json!({ "norming": true, "L": nf.l(), "violation": null }),
                ),
                Err(e) => {
                    let v = norming_violation(&k, input.l.as_ref()).map(|v| v.to_string());
                    Outcome::json(vec![e.to_string()], json!({ "norming": false, "violation": v })).failed()
                }
            })
        }
    }
}

fn suite_cmd(cli: &Cli, name: &str, out: &mut dyn Write) -> Result<Outcome> {
    if name == "list" {
        let lines = SUITES.iter().map(|(n, d)| format!("{n:<24} {d}")).collect();
        return Ok(Outcome { summary: lines, artifact: None, ok: true });
    }
    let mut summary = Vec::new();
    let seed = seed_of(cli, &mut summary);
    let names: Vec<&str> = if name == "all" {
        SUITES.iter().map(|(n, _)| *n).collect()
    } else if SUITES.iter().any(|(n, _)| *n == name) {
        vec![name]
    } else {
        return Err(usage(format!("unknown suite {name:?}; try `suite list`")));
    };
    for line in summary.drain(..) {
        writeln!(out, "{line}")?;
    }
    let mut reports = Vec::new();
    let mut artifact = None;
    for n in names {
        let rep = suites::run(n, seed)?;
        writeln!(out, "{}", rep.summary())?;
        for f in rep.failures.iter().take(10) {
            writeln!(out, "  {f}")?;
        }
        if rep.artifact.is_some() && cli.out.is_some() {
            artifact = rep.artifact.clone();
        }
        reports.push(rep);
    }
    let ok = reports.iter().all(|r| r.passed());
    let artifact = match artifact {
        Some(a) if reports.len() == 1 => Some(Artifact::Text(a)),
        _ => cli.out.as_ref().map(|_| Artifact::Json(serde_json::to_value(&reports).expect("serializable"))),
    };
    Ok(Outcome { summary, artifact, ok })
}
