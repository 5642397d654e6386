//! Command-line front end: load a JSON instance, run one operation and
//! report the outcome as JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::decomp::{extend_direct_sum_pair, extend_direct_sum_triple, extend_witt_decomposition};
use crate::error::{Error, Result};
use crate::extend::{
    check_conditions, extend_orthogonal, extend_preserving_self_dual_flag, extend_preserving_subspace,
    extend_preserving_subspace_split, extend_singular, find_isometry_mapping_subspace, Certificate, ConditionReport,
    Extension,
};
use crate::field::FieldSpec;
use crate::flags::{
    flag_lattice, flags_isometric, isotropic_pair_isometric, pair_subspace_flag_isometric, self_dual_flags_isometric,
    Flag,
};
use crate::maps::{Isometry, LinearMap};
use crate::matrix::{Matrix, Vector};
use crate::oracle::{
    closure_isometry_table, count_isometries, enumerate_subspace_isometries, exists_isometry, expression_closure,
    ConstraintSet, DEFAULT_BUDGET,
};
use crate::space::{same_ambient, MetricSpace, SpaceRef, Subspace};
use crate::witt::{witt_decompose_seeded, witt_extend, WittDecomposition};

pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Witt decomposition of a space.
    Decompose,
    /// Run an extension construction.
    Extend,
    /// Image conditions and induced maps for an isometry and a subspace pair.
    Check,
    /// Flag decisions.
    Flags,
    /// Exhaustive search over finite fields.
    Oracle,
    /// Closure of two subspaces under sum, intersection and perp.
    Closure,
}

#[derive(Debug, Parser)]
#[command(name = "witt", about = "Decide and construct isometries extending subspace isometries")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Instance file (JSON).
    #[arg(global = true)]
    instance: Option<PathBuf>,
    /// Which construction or decision to run.
    #[arg(long, global = true)]
    theorem: Option<String>,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on candidates examined by exhaustive searches.
    #[arg(long, global = true)]
    budget: Option<u128>,
}

/// Exit code and the text for standard output.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_DECIDED };
            return Outcome { code, stdout: e.to_string() };
        }
    };
    let report = args
        .instance
        .as_ref()
        .ok_or_else(|| Error::Parse("missing instance file".into()))
        .and_then(|path| std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display()))))
        .and_then(|text| Instance::parse(&text))
        .and_then(|inst| dispatch(&args, &inst));
    match report {
        Ok(value) => Outcome { code: EXIT_DECIDED, stdout: pretty(&value) },
        Err(e) => {
            let code = exit_code(&e);
            Outcome { code, stdout: pretty(&json!({ "result": "error", "error": format!("{e:?}"), "message": e.to_string() })) }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfiniteField | Error::BackendUnsupported(_) | Error::SearchSpaceTooLarge(_) => EXIT_UNSUPPORTED,
        Error::AssertionFailure(_) => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    field: String,
    #[serde(default)]
    spaces: BTreeMap<String, RawSpace>,
    #[serde(default)]
    subspaces: BTreeMap<String, RawSubspace>,
    #[serde(default)]
    maps: BTreeMap<String, RawMap>,
    #[serde(default)]
    flags: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    decompositions: BTreeMap<String, RawDecomposition>,
    #[serde(default)]
    task: Map<String, Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    gram: Option<Vec<Vec<String>>>,
    /// Number of hyperbolic planes.
    hyperbolic: Option<usize>,
    diagonal: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubspace {
    space: String,
    rows: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    from: String,
    to: String,
    sources: Vec<Vec<String>>,
    targets: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecomposition {
    plus: String,
    anis: String,
    minus: String,
}

/// A loaded instance: every named object resolved and checked.
pub struct Instance {
    pub field: FieldSpec,
    pub spaces: BTreeMap<String, SpaceRef>,
    pub subspaces: BTreeMap<String, Subspace>,
    pub maps: BTreeMap<String, LinearMap>,
    pub flags: BTreeMap<String, Flag>,
    pub decompositions: BTreeMap<String, WittDecomposition>,
    pub task: Map<String, Value>,
}

fn parse_rows(field: FieldSpec, rows: &[Vec<String>], cols: usize, at: &str) -> Result<Vec<Vector>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != cols {
                return Err(Error::Parse(format!("{at}[{i}]: expected {cols} entries, found {}", r.len())));
            }
            r.iter()
                .map(|s| field.parse_scalar(s))
                .collect::<Result<Vector>>()
                .map_err(|e| Error::Parse(format!("{at}[{i}]: {e}")))
        })
        .collect()
}

fn context<T>(r: Result<T>, at: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(m) => Error::Parse(m),
        other => Error::Parse(format!("{at}: {other}")),
    })
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance> {
        let raw: RawInstance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let field: FieldSpec = context(raw.field.parse(), "field")?;
        let mut spaces = BTreeMap::new();
        for (name, s) in &raw.spaces {
            let at = format!("spaces.{name}");
            let space = match (&s.gram, s.hyperbolic, &s.diagonal) {
                (Some(g), None, None) => {
                    let rows = parse_rows(field, g, g.len(), &format!("{at}.gram"))?;
                    context(MetricSpace::new(context(Matrix::from_rows(field, g.len(), &rows), &at)?), &at)?
                }
                (None, Some(planes), None) => MetricSpace::hyperbolic(field, planes),
                (None, None, Some(d)) => {
                    let entries = d.iter().map(|x| field.parse_scalar(x)).collect::<Result<Vec<_>>>();
                    context(MetricSpace::new(Matrix::diagonal(field, &context(entries, &at)?)), &at)?
                }
                _ => return Err(Error::Parse(format!("{at}: give exactly one of gram, hyperbolic, diagonal"))),
            };
            spaces.insert(name.clone(), space);
        }
        let space_of = |name: &str, at: &str| {
            spaces.get(name).cloned().ok_or_else(|| Error::Parse(format!("{at}: unknown space {name:?}")))
        };
        let mut subspaces = BTreeMap::new();
        for (name, s) in &raw.subspaces {
            let at = format!("subspaces.{name}");
            if spaces.contains_key(name) {
                return Err(Error::Parse(format!("{at}: name already used by a space")));
            }
            let space = space_of(&s.space, &format!("{at}.space"))?;
            let rows = parse_rows(field, &s.rows, space.dim(), &format!("{at}.rows"))?;
            subspaces.insert(name.clone(), context(Subspace::span(&space, &rows), &at)?);
        }
        let mut maps = BTreeMap::new();
        for (name, m) in &raw.maps {
            let at = format!("maps.{name}");
            let (src, dst) = (space_of(&m.from, &format!("{at}.from"))?, space_of(&m.to, &format!("{at}.to"))?);
            let sources = parse_rows(field, &m.sources, src.dim(), &format!("{at}.sources"))?;
            let targets = parse_rows(field, &m.targets, dst.dim(), &format!("{at}.targets"))?;
            maps.insert(name.clone(), context(LinearMap::from_pairs(&src, &dst, &sources, &targets), &at)?);
        }
        let mut inst = Instance {
            field,
            spaces,
            subspaces,
            maps,
            flags: BTreeMap::new(),
            decompositions: BTreeMap::new(),
            task: raw.task,
        };
        for (name, members) in &raw.flags {
            let at = format!("flags.{name}");
            let mut resolved = Vec::new();
            for (i, m) in members.iter().enumerate() {
                let member_at = format!("{at}[{i}]");
                if m == "0" {
                    let last = members.last().ok_or_else(|| Error::Parse(format!("{at}: empty flag")))?;
                    resolved.push(Subspace::zero(inst.subspace(last, &member_at)?.ambient()));
                } else {
                    resolved.push(inst.subspace(m, &member_at)?);
                }
            }
            inst.flags.insert(name.clone(), context(Flag::new(resolved), &at)?);
        }
        for (name, d) in &raw.decompositions {
            let at = format!("decompositions.{name}");
            let w = WittDecomposition::from_parts(
                inst.subspace(&d.plus, &format!("{at}.plus"))?,
                inst.subspace(&d.anis, &format!("{at}.anis"))?,
                inst.subspace(&d.minus, &format!("{at}.minus"))?,
            );
            inst.decompositions.insert(name.clone(), context(w, &at)?);
        }
        Ok(inst)
    }

    /// A named subspace, or the whole of a named space.
    fn subspace(&self, name: &str, at: &str) -> Result<Subspace> {
        if let Some(s) = self.subspaces.get(name) {
            return Ok(s.clone());
        }
        if let Some(s) = self.spaces.get(name) {
            return Ok(Subspace::whole(s));
        }
        Err(Error::Parse(format!("{at}: unknown subspace {name:?}")))
    }

    fn space_name(&self, s: &SpaceRef) -> String {
        self.spaces
            .iter()
            .find(|(_, t)| same_ambient(s, t))
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| "?".into())
    }

    fn key(&self, key: &str) -> Result<Option<&str>> {
        match self.task.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(Error::Parse(format!("task.{key}: expected a name"))),
        }
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.key(key)?.ok_or_else(|| Error::Parse(format!("task.{key}: missing")))
    }

    fn sub(&self, key: &str) -> Result<Subspace> {
        self.subspace(self.required(key)?, &format!("task.{key}"))
    }

    fn sub_or(&self, key: &str, default: impl FnOnce() -> Result<Subspace>) -> Result<Subspace> {
        match self.key(key)? {
            Some(name) => self.subspace(name, &format!("task.{key}")),
            None => default(),
        }
    }

    fn map(&self, key: &str) -> Result<LinearMap> {
        let name = self.required(key)?;
        self.maps.get(name).cloned().ok_or_else(|| Error::Parse(format!("task.{key}: unknown map {name:?}")))
    }

    fn isometry(&self, key: &str) -> Result<Isometry> {
        Isometry::new(self.map(key)?).map_err(|_| Error::Parse(format!("task.{key}: map is not an isometry")))
    }

    fn flag(&self, key: &str) -> Result<Flag> {
        let name = self.required(key)?;
        self.flags.get(name).cloned().ok_or_else(|| Error::Parse(format!("task.{key}: unknown flag {name:?}")))
    }

    fn decomposition(&self, key: &str) -> Result<WittDecomposition> {
        let name = self.required(key)?;
        self.decompositions
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("task.{key}: unknown decomposition {name:?}")))
    }

    fn names(&self, key: &str) -> Result<Vec<String>> {
        match self.task.get(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_str().map(String::from).ok_or_else(|| Error::Parse(format!("task.{key}: expected names"))))
                .collect(),
            Some(_) => Err(Error::Parse(format!("task.{key}: expected a list of names"))),
        }
    }

    /// Containers `v`, `v2`, defaulting to the whole spaces of `phi`.
    fn containers(&self, phi: &LinearMap) -> Result<(Subspace, Subspace)> {
        Ok((
            self.sub_or("v", || Ok(Subspace::whole(phi.dom().ambient())))?,
            self.sub_or("v2", || Ok(Subspace::whole(phi.cod().ambient())))?,
        ))
    }

    fn rows(&self, vs: &[Vector]) -> Value {
        json!(vs.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }

    fn subspace_json(&self, s: &Subspace) -> Value {
        json!({ "space": self.space_name(s.ambient()), "dim": s.dim(), "rows": self.rows(&s.basis_vectors()) })
    }

    /// A map in the same shape as instance maps, so it can be loaded back.
    fn map_json(&self, m: &LinearMap) -> Value {
        json!({
            "from": self.space_name(m.dom().ambient()),
            "to": self.space_name(m.cod().ambient()),
            "sources": self.rows(&m.dom().basis_vectors()),
            "targets": self.rows(&m.image_vectors()),
        })
    }

    fn certificate_json(&self, c: &Certificate) -> Result<Value> {
        Ok(json!({ "clause": c.clause(), "reason": c.to_string(), "confirmed": c.confirms_failure()? }))
    }
}

/// Independent re-check of a witness: an isometry (or, for `linear`, a
/// bijection) of the containers extending `base` and mapping each pair.
fn verify(m: &LinearMap, base: Option<&LinearMap>, pairs: &[(Subspace, Subspace)], v: &Subspace, v2: &Subspace, linear: bool) -> Result<bool> {
    let mut ok = m.dom() == v && m.cod() == v2 && m.is_bijective() && (linear || m.is_isometry());
    if let Some(b) = base {
        ok = ok && m.restrict(b.dom())?.images() == b.images();
    }
    for (x, x2) in pairs {
        ok = ok && m.image_of(x)? == *x2;
    }
    Ok(ok)
}

fn extension_report(
    inst: &Instance,
    outcome: Extension<LinearMap>,
    base: Option<&LinearMap>,
    pairs: &[(Subspace, Subspace)],
    v: &Subspace,
    v2: &Subspace,
    linear: bool,
) -> Result<Value> {
    Ok(match outcome {
        Extension::Found(m) => json!({
            "result": "found",
            "witness": inst.map_json(&m),
            "verified": verify(&m, base, pairs, v, v2, linear)?,
        }),
        Extension::Blocked(c) => json!({ "result": "none", "certificate": inst.certificate_json(&c)? }),
    })
}

fn lift(e: Extension) -> Extension<LinearMap> {
    match e {
        Extension::Found(m) => Extension::Found(m.into_map()),
        Extension::Blocked(c) => Extension::Blocked(c),
    }
}

/// Answers that are decided negatively by an error rather than a certificate.
fn decided_negative(e: &Error) -> bool {
    matches!(e, Error::NotExtendable | Error::NotIsometricAmbients)
}

fn dispatch(args: &Args, inst: &Instance) -> Result<Value> {
    let budget = args.budget.unwrap_or(DEFAULT_BUDGET);
    let theorem = args.theorem.as_deref();
    let mut out = match args.command {
        Command::Decompose => decompose(inst, args.seed)?,
        Command::Extend => match extend(inst, theorem.unwrap_or("witt-main")) {
            Err(e) if decided_negative(&e) => json!({ "result": "none", "reason": e.to_string() }),
            other => other?,
        },
        Command::Check => check(inst, budget)?,
        Command::Flags => flags(inst, theorem.unwrap_or("flags-isometric"))?,
        Command::Oracle => oracle(inst, theorem, budget)?,
        Command::Closure => closure(inst)?,
    };
    if let Value::Object(map) = &mut out {
        map.insert("field".into(), json!(inst.field.to_string()));
    }
    Ok(out)
}

fn decompose(inst: &Instance, seed: u64) -> Result<Value> {
    let v = match inst.key("space")? {
        Some(name) => inst.subspace(name, "task.space")?,
        None if inst.spaces.len() == 1 => Subspace::whole(inst.spaces.values().next().expect("one space")),
        None => return Err(Error::Parse("task.space: missing".into())),
    };
    let w = witt_decompose_seeded(&v, seed)?;
    Ok(json!({
        "result": "decomposed",
        "index": w.index(),
        "plus": inst.rows(&w.plus_basis),
        "anis": inst.rows(&w.anis.basis_vectors()),
        "minus": inst.rows(&w.minus_basis),
        "verified": w.validate(&v).is_ok(),
    }))
}

fn extend(inst: &Instance, theorem: &str) -> Result<Value> {
    let phi = inst.isometry("phi")?;
    let (v, v2) = inst.containers(phi.map())?;
    let base = Some(phi.map());
    let found = |m: Isometry| Extension::Found(m.into_map());
    let mut out = match theorem {
        "witt" => extension_report(inst, found(witt_extend(&phi, &v, &v2)?), base, &[], &v, &v2, false)?,
        "singular" => extension_report(inst, found(extend_singular(&phi, &v, &v2)?), base, &[], &v, &v2, false)?,
        "orthogonal" => {
            let (a, a2) = (inst.sub("a")?, inst.sub("a2")?);
            let m = extend_orthogonal(&phi, &a, &a2, &v, &v2)?;
            extension_report(inst, found(m), base, &[(a, a2)], &v, &v2, false)?
        }
        "mapping-subspace" => {
            let (e, e2) = (inst.sub("e")?, inst.sub("e2")?);
            let outcome = find_isometry_mapping_subspace(&e, &e2, &v, &v2)?;
            extension_report(inst, lift(outcome), None, &[(e, e2)], &v, &v2, false)?
        }
        "witt-main" | "split" => {
            let (a, a2) = (inst.sub("a")?, inst.sub("a2")?);
            let outcome = if theorem == "split" {
                extend_preserving_subspace_split(&phi, &a, &a2, &v, &v2)?
            } else {
                extend_preserving_subspace(&phi, &a, &a2, &v, &v2)?
            };
            let mut report = extension_report(inst, lift(outcome), base, &[(a.clone(), a2.clone())], &v, &v2, false)?;
            report["conditions"] = conditions_json(&check_conditions(phi.map(), &a, &a2, &v, &v2)?);
            report
        }
        "self-dual-flag" => {
            let (f, f2) = (inst.flag("flag")?, inst.flag("flag2")?);
            let outcome = extend_preserving_self_dual_flag(&phi, &f, &f2)?;
            let (fv, fv2) = (f.container().clone(), f2.container().clone());
            extension_report(inst, lift(outcome), base, &member_pairs(&f, &f2), &fv, &fv2, false)?
        }
        "direct-sum" => {
            let blocks = inst.names("blocks")?;
            let blocks2 = inst.names("blocks2")?;
            let resolve = |names: &[String], key: &str| -> Result<Vec<Subspace>> {
                names.iter().map(|n| inst.subspace(n, &format!("task.{key}"))).collect()
            };
            let (b, b2) = (resolve(&blocks, "blocks")?, resolve(&blocks2, "blocks2")?);
            let outcome = match (b.as_slice(), b2.as_slice()) {
                ([x, y], [x2, y2]) => extend_direct_sum_pair(phi.map(), x, y, x2, y2)?,
                ([x, y, z], [x2, y2, z2]) => extend_direct_sum_triple(phi.map(), [x, y, z], [x2, y2, z2])?,
                _ => return Err(Error::Parse("task.blocks: give two or three blocks on each side".into())),
            };
            let whole = |bs: &[Subspace]| bs.iter().try_fold(Subspace::zero(bs[0].ambient()), |acc, x| acc.sum(x));
            let (sv, sv2) = (whole(&b)?, whole(&b2)?);
            let pairs: Vec<_> = b.into_iter().zip(b2).collect();
            extension_report(inst, outcome, base, &pairs, &sv, &sv2, true)?
        }
        "witt-decomposition" => {
            let (w, w2) = (inst.decomposition("decomposition")?, inst.decomposition("decomposition2")?);
            let flags = match (inst.key("flag")?, inst.key("flag2")?) {
                (Some(_), Some(_)) => Some((inst.flag("flag")?, inst.flag("flag2")?)),
                (None, None) => None,
                _ => return Err(Error::Parse("task.flag: give both flag and flag2".into())),
            };
            let outcome = extend_witt_decomposition(&phi, &w, &w2, flags.as_ref().map(|(a, b)| (a, b)))?;
            let mut pairs = vec![
                (w.plus.clone(), w2.plus.clone()),
                (w.anis.clone(), w2.anis.clone()),
                (w.minus.clone(), w2.minus.clone()),
            ];
            if let Some((f, f2)) = &flags {
                pairs.extend(member_pairs(f, f2));
            }
            let dv = w.plus.sum(&w.anis)?.sum(&w.minus)?;
            let dv2 = w2.plus.sum(&w2.anis)?.sum(&w2.minus)?;
            extension_report(inst, lift(outcome), base, &pairs, &dv, &dv2, false)?
        }
        other => return Err(Error::Parse(format!("--theorem: unknown construction {other:?}"))),
    };
    out["theorem"] = json!(theorem);
    Ok(out)
}

fn member_pairs(f: &Flag, f2: &Flag) -> Vec<(Subspace, Subspace)> {
    f.members().iter().cloned().zip(f2.members().iter().cloned()).collect()
}

fn conditions_json(r: &ConditionReport) -> Value {
    json!({
        "c1": r.c1, "c2": r.c2, "c3": r.c3, "c4": r.c4,
        "phi_a_isometry": r.phi_a_isometry,
        "phi_a_perp_isometry": r.phi_a_perp_isometry,
        "all_hold": r.all_hold(),
        "invariants_hold": r.invariants_hold(),
    })
}

/// The first failing requirement, in the order conditions are checked.
fn failing_clause(r: &ConditionReport) -> Option<&'static str> {
    let clauses = [(r.c3, "C3"), (r.c4, "C4"), (r.c2, "C2"), (r.c1, "C1")];
    if let Some((_, name)) = clauses.iter().find(|(ok, _)| !ok) {
        return Some(name);
    }
    (r.phi_a_isometry == Some(false)).then_some("induced map on the A-quotient")
}

fn check(inst: &Instance, budget: u128) -> Result<Value> {
    let (a, a2) = (inst.sub("a")?, inst.sub("a2")?);
    let candidates: Vec<LinearMap> = if inst.key("phi")?.is_some() {
        vec![inst.map("phi")?]
    } else {
        let (e, e2) = (inst.sub("e")?, inst.sub("e2")?);
        enumerate_subspace_isometries(&e, &e2, budget)?.into_iter().map(Isometry::into_map).collect()
    };
    let mut rows = Vec::new();
    let mut any_extends = false;
    for phi in &candidates {
        let (v, v2) = inst.containers(phi)?;
        let report = check_conditions(phi, &a, &a2, &v, &v2)?;
        let extends = match Isometry::new(phi.clone()) {
            Ok(iso) => extend_preserving_subspace(&iso, &a, &a2, &v, &v2)?.is_found(),
            Err(_) => false,
        };
        any_extends |= extends;
        rows.push(json!({
            "phi": inst.map_json(phi),
            "conditions": conditions_json(&report),
            "failing_clause": failing_clause(&report),
            "extends": extends,
        }));
    }
    Ok(json!({
        "result": if any_extends { "extendable" } else { "not-extendable" },
        "candidates": rows,
    }))
}

fn flags(inst: &Instance, theorem: &str) -> Result<Value> {
    let decision = |outcome: Extension, pairs: Vec<(Subspace, Subspace)>, v: &Subspace, v2: &Subspace| {
        extension_report(inst, lift(outcome), None, &pairs, v, v2, false)
    };
    let mut out = match theorem {
        "self-dual" => json!({ "result": inst.flag("flag")?.is_self_dual()? }),
        "lattice" => {
            let lat = flag_lattice(&inst.flag("flag")?)?;
            json!({ "result": "lattice", "dims": lat.dims, "t": inst.subspace_json(&lat.t) })
        }
        "self-dual-isometric" | "flags-isometric" => {
            let (f, f2) = (inst.flag("flag")?, inst.flag("flag2")?);
            let outcome =
                if theorem == "flags-isometric" { flags_isometric(&f, &f2)? } else { self_dual_flags_isometric(&f, &f2)? };
            decision(outcome, member_pairs(&f, &f2), f.container(), f2.container())?
        }
        "pair" => {
            let (f, f2) = (inst.flag("flag")?, inst.flag("flag2")?);
            let (e, e2) = (inst.sub("e")?, inst.sub("e2")?);
            let mut pairs = member_pairs(&f, &f2);
            pairs.push((e.clone(), e2.clone()));
            decision(pair_subspace_flag_isometric(&e, &e2, &f, &f2)?, pairs, f.container(), f2.container())?
        }
        "isotropic-pair" => {
            let (e, e2, a, a2) = (inst.sub("e")?, inst.sub("e2")?, inst.sub("a")?, inst.sub("a2")?);
            let v = inst.sub_or("v", || Ok(Subspace::whole(e.ambient())))?;
            let v2 = inst.sub_or("v2", || Ok(Subspace::whole(e2.ambient())))?;
            let outcome = isotropic_pair_isometric(&e, &e2, &a, &a2, &v, &v2)?;
            decision(outcome, vec![(e, e2), (a, a2)], &v, &v2)?
        }
        other => return Err(Error::Parse(format!("--theorem: unknown flag decision {other:?}"))),
    };
    out["theorem"] = json!(theorem);
    Ok(out)
}

/// Constraints matching a construction, read from the task, with the
/// containers they live in.
fn theorem_constraints(inst: &Instance, theorem: &str) -> Result<(ConstraintSet, Subspace, Subspace)> {
    Ok(match theorem {
        "witt-main" | "split" => {
            let phi = inst.map("phi")?;
            let (v, v2) = inst.containers(&phi)?;
            (ConstraintSet::new().extending(&phi).mapping(&inst.sub("a")?, &inst.sub("a2")?), v, v2)
        }
        "self-dual-flag" => {
            let phi = inst.map("phi")?;
            let (f, f2) = (inst.flag("flag")?, inst.flag("flag2")?);
            let mut cs = ConstraintSet::new().extending(&phi);
            cs.pairs = member_pairs(&f, &f2);
            (cs, f.container().clone(), f2.container().clone())
        }
        "flags-isometric" | "self-dual-isometric" => {
            let (f, f2) = (inst.flag("flag")?, inst.flag("flag2")?);
            let cs = ConstraintSet { pairs: member_pairs(&f, &f2), base: None };
            (cs, f.container().clone(), f2.container().clone())
        }
        other => return Err(Error::Parse(format!("--theorem: no oracle comparison for {other:?}"))),
    })
}

fn oracle(inst: &Instance, theorem: Option<&str>, budget: u128) -> Result<Value> {
    if let Some(t) = theorem {
        let (cs, v, v2) = theorem_constraints(inst, t)?;
        let by_search = exists_isometry(&v, &v2, &cs, budget)?.is_some();
        let construction = if matches!(t, "flags-isometric" | "self-dual-isometric") {
            flags(inst, t)?
        } else {
            extend(inst, t)?
        };
        let by_construction = construction["result"] == "found";
        return Ok(json!({
            "result": if by_search { "found" } else { "none" },
            "theorem": t,
            "construction": construction["result"],
            "agree": by_search == by_construction,
        }));
    }
    let v = inst.sub("v")?;
    let v2 = inst.sub_or("v2", || Ok(v.clone()))?;
    let mut cs = ConstraintSet::new();
    if inst.key("base")?.is_some() {
        cs = cs.extending(&inst.map("base")?);
    }
    let (sources, targets) = (inst.names("sources")?, inst.names("targets")?);
    if sources.len() != targets.len() {
        return Err(Error::Parse("task.targets: must match task.sources in length".into()));
    }
    for (x, y) in sources.iter().zip(&targets) {
        cs = cs.mapping(&inst.subspace(x, "task.sources")?, &inst.subspace(y, "task.targets")?);
    }
    let first = exists_isometry(&v, &v2, &cs, budget)?;
    let mut out = match &first {
        Some(m) => json!({ "result": "found", "witness": inst.map_json(m), "verified": m.is_isometry() && cs.satisfied_by(m)? }),
        None => json!({ "result": "none" }),
    };
    if inst.task.get("count") == Some(&Value::Bool(true)) {
        out["count"] = json!(count_isometries(&v, &v2, &cs, budget)?);
    }
    Ok(out)
}

fn closure(inst: &Instance) -> Result<Value> {
    let (e, a) = (inst.sub("e")?, inst.sub("a")?);
    let (e2, a2) = (inst.sub_or("e2", || Ok(e.clone()))?, inst.sub_or("a2", || Ok(a.clone()))?);
    let v = inst.sub_or("v", || Ok(Subspace::whole(e.ambient())))?;
    let v2 = inst.sub_or("v2", || Ok(Subspace::whole(e2.ambient())))?;
    let (cl, cl2) = (expression_closure(&e, &a, &v)?, expression_closure(&e2, &a2, &v2)?);
    let mut out = json!({ "members": cl.len(), "members2": cl2.len() });
    match closure_isometry_table(&cl, &cl2) {
        Ok(table) => {
            let rows: Vec<Value> = table
                .iter()
                .map(|r| {
                    json!({
                        "expr": r.expr.to_string(),
                        "dim": r.member.dim(),
                        "partner_dim": r.partner.dim(),
                        "isometric": r.isometric,
                    })
                })
                .collect();
            out["result"] = json!(if table.iter().all(|r| r.isometric) { "all-isometric" } else { "not-all-isometric" });
            out["table"] = json!(rows);
        }
        Err(Error::PairingIncomplete) => out["result"] = json!("unpaired"),
        Err(e) => return Err(e),
    }
    Ok(out)
}
