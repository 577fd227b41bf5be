//! Structure files and the command-line driver.
//!
//! Structures are interchanged as JSON documents with an explicit `kind`
//! tag and string rationals such as `"3/5"`. The driver validates a
//! document against its kind's schema before any mathematical check runs,
//! then emits line-oriented JSON records: one record per check or
//! enumerated item, and a final summary. Exit codes: 0 when everything
//! passes, 1 on a mathematical failure, 2 on usage or schema errors.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::convex::{
    check_convex_axioms, check_nested_tuple_identity, standard_grid, ConvexAlgebra,
    MeetSemilattice, Mixes, PolytopeAlgebra, SimplexAlgebra,
};
use crate::effect::{check_effect_axioms, enumerate_ea_homs, EffectTable};
use crate::faces;
use crate::hilbert::{self, RationalSubspace, UnitVector};
use crate::preframes::{self, FinitePreframe};
use crate::report::{CheckReport, Outcome};
use crate::sampling;
use crate::scalars::{
    classify_semiring, support_hom, BoolSemiring, ModSemiring, NatSemiring,
    NonNegRationalSemiring, Rational,
};
use crate::semimod::{check_semimodule_axioms, JoinSemilatticeMod, Semimodule};
use crate::states;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum StructError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("usage error: {0}")]
    Usage(String),
}

impl StructError {
    fn schema(path: impl Into<String>, message: impl fmt::Display) -> Self {
        StructError::Schema { path: path.into(), message: message.to_string() }
    }
}

/// A reference to one of the built-in scalar semirings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemiringRef {
    Bool,
    Nat,
    NonNegRational,
    Mod(u64),
}

impl SemiringRef {
    pub fn label(&self) -> String {
        match self {
            SemiringRef::Bool => "bool".into(),
            SemiringRef::Nat => "nat".into(),
            SemiringRef::NonNegRational => "nonneg_rational".into(),
            SemiringRef::Mod(n) => format!("mod{n}"),
        }
    }
}

/// The payload of a structure document.
#[derive(Debug, Clone)]
pub enum StructurePayload {
    Semiring(SemiringRef),
    Semilattice(MeetSemilattice),
    Simplex(SimplexAlgebra),
    Polytope(PolytopeAlgebra),
    Preframe(FinitePreframe),
    EffectAlgebra(EffectTable),
    SubspaceFamily { ambient: usize, generators: Vec<RationalSubspace> },
    Semimodule(Semimodule),
}

impl StructurePayload {
    pub fn kind(&self) -> &'static str {
        match self {
            StructurePayload::Semiring(_) => "semiring",
            StructurePayload::Semilattice(_) => "semilattice",
            StructurePayload::Simplex(_) => "simplex",
            StructurePayload::Polytope(_) => "polytope",
            StructurePayload::Preframe(_) => "preframe",
            StructurePayload::EffectAlgebra(_) => "effect_algebra",
            StructurePayload::SubspaceFamily { .. } => "subspace_family",
            StructurePayload::Semimodule(_) => "semimodule",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StructureDoc {
    pub name: String,
    pub payload: StructurePayload,
}

fn obj<'v>(v: &'v Value, path: &str) -> Result<&'v Map<String, Value>, StructError> {
    v.as_object().ok_or_else(|| StructError::schema(path, "expected an object"))
}

fn field<'v>(m: &'v Map<String, Value>, path: &str, key: &str) -> Result<&'v Value, StructError> {
    m.get(key).ok_or_else(|| StructError::schema(format!("{path}.{key}"), "missing field"))
}

fn str_field(m: &Map<String, Value>, path: &str, key: &str) -> Result<String, StructError> {
    field(m, path, key)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| StructError::schema(format!("{path}.{key}"), "expected a string"))
}

fn u64_field(m: &Map<String, Value>, path: &str, key: &str) -> Result<u64, StructError> {
    field(m, path, key)?
        .as_u64()
        .ok_or_else(|| StructError::schema(format!("{path}.{key}"), "expected an unsigned integer"))
}

fn array_field<'v>(m: &'v Map<String, Value>, path: &str, key: &str) -> Result<&'v Vec<Value>, StructError> {
    field(m, path, key)?
        .as_array()
        .ok_or_else(|| StructError::schema(format!("{path}.{key}"), "expected an array"))
}

fn string_list(v: &[Value], path: &str) -> Result<Vec<String>, StructError> {
    v.iter()
        .enumerate()
        .map(|(i, item)| {
            item.as_str()
                .map(str::to_string)
                .ok_or_else(|| StructError::schema(format!("{path}[{i}]"), "expected a string"))
        })
        .collect()
}

fn rational_at(v: &Value, path: &str) -> Result<Rational, StructError> {
    let s = v.as_str().ok_or_else(|| StructError::schema(path, "expected a string rational"))?;
    s.parse().map_err(|e| StructError::schema(path, e))
}

fn triple_list(v: &[Value], path: &str) -> Result<Vec<(String, String, String)>, StructError> {
    v.iter()
        .enumerate()
        .map(|(i, row)| {
            let p = format!("{path}[{i}]");
            let arr = row.as_array().ok_or_else(|| StructError::schema(&p, "expected a 3-element array"))?;
            if arr.len() != 3 {
                return Err(StructError::schema(&p, "expected exactly 3 entries"));
            }
            let items = string_list(arr, &p)?;
            Ok((items[0].clone(), items[1].clone(), items[2].clone()))
        })
        .collect()
}

/// Parses and validates a structure document.
pub fn parse(text: &str) -> Result<StructureDoc, StructError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| StructError::schema("$", e))?;
    let root = obj(&value, "$")?;
    let version = u64_field(root, "$", "schema_version")?;
    if version != SCHEMA_VERSION {
        return Err(StructError::schema("$.schema_version", format!("unsupported version {version}")));
    }
    let kind = str_field(root, "$", "kind")?;
    let name = str_field(root, "$", "name")?;

    let payload = match kind.as_str() {
        "semiring" => {
            let which = str_field(root, "$", "semiring")?;
            let r = match which.as_str() {
                "bool" => SemiringRef::Bool,
                "nat" => SemiringRef::Nat,
                "nonneg_rational" => SemiringRef::NonNegRational,
                "mod" => {
                    let n = u64_field(root, "$", "modulus")?;
                    if n == 0 {
                        return Err(StructError::schema("$.modulus", "must be positive"));
                    }
                    SemiringRef::Mod(n)
                }
                other => {
                    return Err(StructError::schema("$.semiring", format!("unknown semiring {other:?}")))
                }
            };
            StructurePayload::Semiring(r)
        }
        "semilattice" => {
            let elements = string_list(array_field(root, "$", "elements")?, "$.elements")?;
            let rows = triple_list(array_field(root, "$", "meet")?, "$.meet")?;
            StructurePayload::Semilattice(build_semilattice(&name, elements, rows)?)
        }
        "simplex" => {
            let vertices = string_list(array_field(root, "$", "vertices")?, "$.vertices")?;
            let simplex = SimplexAlgebra::new(name.clone(), vertices)
                .map_err(|e| StructError::schema("$.vertices", e))?;
            StructurePayload::Simplex(simplex)
        }
        "polytope" => {
            let dim = u64_field(root, "$", "dimension")? as usize;
            let gen_values = array_field(root, "$", "generators")?;
            let mut generators = Vec::with_capacity(gen_values.len());
            for (i, g) in gen_values.iter().enumerate() {
                let p = format!("$.generators[{i}]");
                let arr = g.as_array().ok_or_else(|| StructError::schema(&p, "expected an array"))?;
                let point: Result<Vec<Rational>, StructError> = arr
                    .iter()
                    .enumerate()
                    .map(|(j, c)| rational_at(c, &format!("{p}[{j}]")))
                    .collect();
                generators.push(point?);
            }
            let polytope = PolytopeAlgebra::new(name.clone(), dim, generators)
                .map_err(|e| StructError::schema("$.generators", e))?;
            StructurePayload::Polytope(polytope)
        }
        "preframe" => {
            let elements = string_list(array_field(root, "$", "elements")?, "$.elements")?;
            let order_values = array_field(root, "$", "order")?;
            let mut pairs = Vec::with_capacity(order_values.len());
            for (i, pv) in order_values.iter().enumerate() {
                let p = format!("$.order[{i}]");
                let arr = pv.as_array().ok_or_else(|| StructError::schema(&p, "expected a pair"))?;
                if arr.len() != 2 {
                    return Err(StructError::schema(&p, "expected exactly 2 entries"));
                }
                let items = string_list(arr, &p)?;
                pairs.push((items[0].clone(), items[1].clone()));
            }
            let pf = FinitePreframe::new(name.clone(), elements, &pairs)
                .map_err(|e| StructError::schema("$.order", e))?;
            StructurePayload::Preframe(pf)
        }
        "effect_algebra" => {
            let elements = string_list(array_field(root, "$", "elements")?, "$.elements")?;
            let one = str_field(root, "$", "one")?;
            if !elements.contains(&one) {
                return Err(StructError::schema("$.one", "not among the elements"));
            }
            let sums = triple_list(array_field(root, "$", "sums")?, "$.sums")?;
            for (i, (x, y, z)) in sums.iter().enumerate() {
                for (which, e) in [("lhs", x), ("rhs", y), ("sum", z)] {
                    if !elements.contains(e) {
                        return Err(StructError::schema(
                            format!("$.sums[{i}]"),
                            format!("{which} element {e:?} is not declared"),
                        ));
                    }
                }
            }
            // The zero is derived: the unique element neutral on every row.
            let zero_candidates: Vec<&String> = elements
                .iter()
                .filter(|e| {
                    elements.iter().all(|x| {
                        sums.iter().any(|(a, b, c)| {
                            (a == *e && b == x && c == x) || (b == *e && a == x && c == x)
                        })
                    })
                })
                .collect();
            let zero = match zero_candidates.as_slice() {
                [z] => (*z).clone(),
                [] => return Err(StructError::schema("$.sums", "no neutral element; zero cannot be derived")),
                _ => return Err(StructError::schema("$.sums", "multiple neutral elements")),
            };
            let table = EffectTable::from_rows_unchecked(name.clone(), elements, &zero, &one, &sums, true)
                .map_err(|e| StructError::schema("$.sums", e))?;
            StructurePayload::EffectAlgebra(table)
        }
        "subspace_family" => {
            let ambient = u64_field(root, "$", "ambient")? as usize;
            let gen_values = array_field(root, "$", "generators")?;
            let mut generators = Vec::with_capacity(gen_values.len());
            for (i, g) in gen_values.iter().enumerate() {
                let p = format!("$.generators[{i}]");
                let rows_v = g.as_array().ok_or_else(|| StructError::schema(&p, "expected a matrix"))?;
                let mut rows = Vec::with_capacity(rows_v.len());
                for (r, row_v) in rows_v.iter().enumerate() {
                    let rp = format!("{p}[{r}]");
                    let row_arr =
                        row_v.as_array().ok_or_else(|| StructError::schema(&rp, "expected a row"))?;
                    let row: Result<Vec<Rational>, StructError> = row_arr
                        .iter()
                        .enumerate()
                        .map(|(c, cell)| rational_at(cell, &format!("{rp}[{c}]")))
                        .collect();
                    rows.push(row?);
                }
                let sub = RationalSubspace::from_spanning(ambient, rows)
                    .map_err(|e| StructError::schema(&p, e))?;
                generators.push(sub);
            }
            StructurePayload::SubspaceFamily { ambient, generators }
        }
        "semimodule" => {
            let which = str_field(root, "$", "semimodule")?;
            let module = match which.as_str() {
                "orthant" => Semimodule::NonNegOrthant {
                    name: name.clone(),
                    dim: u64_field(root, "$", "dimension")? as usize,
                },
                "free_multiset" => Semimodule::FreeMultiset {
                    name: name.clone(),
                    labels: string_list(array_field(root, "$", "labels")?, "$.labels")?,
                },
                "join_semilattice" => {
                    let elements = string_list(array_field(root, "$", "elements")?, "$.elements")?;
                    let rows = triple_list(array_field(root, "$", "join")?, "$.join")?;
                    let bottom = str_field(root, "$", "bottom")?;
                    let idx = |e: &str, p: &str| {
                        elements
                            .iter()
                            .position(|x| x == e)
                            .ok_or_else(|| StructError::schema(p, format!("unknown element {e:?}")))
                    };
                    let n = elements.len();
                    let mut table = vec![vec![usize::MAX; n]; n];
                    for (k, (x, y, z)) in rows.iter().enumerate() {
                        let p = format!("$.join[{k}]");
                        let (xi, yi, zi) = (idx(x, &p)?, idx(y, &p)?, idx(z, &p)?);
                        table[xi][yi] = zi;
                        table[yi][xi] = zi;
                    }
                    for i in 0..n {
                        if table[i][i] == usize::MAX {
                            table[i][i] = i;
                        }
                    }
                    if table.iter().flatten().any(|&v| v == usize::MAX) {
                        return Err(StructError::schema("$.join", "join table incomplete"));
                    }
                    let bottom_idx = idx(&bottom, "$.bottom")?;
                    let lat = JoinSemilatticeMod::new(name.clone(), elements, table, bottom_idx)
                        .map_err(|e| StructError::schema("$.join", e))?;
                    Semimodule::JoinSemilattice(lat)
                }
                "free_on_convex" => {
                    let base_value = field(root, "$", "base")?;
                    let base_doc = parse(&base_value.to_string())?;
                    let base = as_convex(&base_doc).ok_or_else(|| {
                        StructError::schema("$.base", "expected a convex-algebra document")
                    })?;
                    Semimodule::FreeOnConvex(Box::new(base))
                }
                other => {
                    return Err(StructError::schema(
                        "$.semimodule",
                        format!("unknown semimodule family {other:?}"),
                    ))
                }
            };
            StructurePayload::Semimodule(module)
        }
        other => return Err(StructError::schema("$.kind", format!("unknown kind {other:?}"))),
    };
    Ok(StructureDoc { name, payload })
}

fn build_semilattice(
    name: &str,
    elements: Vec<String>,
    rows: Vec<(String, String, String)>,
) -> Result<MeetSemilattice, StructError> {
    let idx = |e: &str, p: &str| {
        elements
            .iter()
            .position(|x| x == e)
            .ok_or_else(|| StructError::schema(p, format!("unknown element {e:?}")))
    };
    let n = elements.len();
    let mut table = vec![vec![usize::MAX; n]; n];
    for (k, (x, y, z)) in rows.iter().enumerate() {
        let p = format!("$.meet[{k}]");
        let (xi, yi, zi) = (idx(x, &p)?, idx(y, &p)?, idx(z, &p)?);
        if table[xi][yi] != usize::MAX && table[xi][yi] != zi {
            return Err(StructError::schema(p, "conflicting meet rows"));
        }
        table[xi][yi] = zi;
        if table[yi][xi] != usize::MAX && table[yi][xi] != zi {
            return Err(StructError::schema(p, "conflicting symmetric meet rows"));
        }
        table[yi][xi] = zi;
    }
    // Missing diagonal entries default to idempotence; a file may override
    // them explicitly, which the axiom checker then flags.
    for i in 0..n {
        if table[i][i] == usize::MAX {
            table[i][i] = i;
        }
    }
    if table.iter().flatten().any(|&v| v == usize::MAX) {
        return Err(StructError::schema("$.meet", "meet table incomplete"));
    }
    MeetSemilattice::from_table_unchecked(name, elements, table, None)
        .map_err(|e| StructError::schema("$.meet", e))
}

/// Serializes a document back into its JSON form.
pub fn serialize(doc: &StructureDoc) -> String {
    let value = match &doc.payload {
        StructurePayload::Semiring(r) => {
            let mut m = json!({
                "schema_version": SCHEMA_VERSION,
                "kind": "semiring",
                "name": doc.name,
            });
            match r {
                SemiringRef::Bool => m["semiring"] = "bool".into(),
                SemiringRef::Nat => m["semiring"] = "nat".into(),
                SemiringRef::NonNegRational => m["semiring"] = "nonneg_rational".into(),
                SemiringRef::Mod(n) => {
                    m["semiring"] = "mod".into();
                    m["modulus"] = (*n).into();
                }
            }
            m
        }
        StructurePayload::Semilattice(l) => {
            let elements = l.elements();
            let mut rows = Vec::new();
            for (i, x) in elements.iter().enumerate() {
                for (j, y) in elements.iter().enumerate() {
                    if i <= j {
                        rows.push(json!([x, y, elements[l.meet_idx(i, j)]]));
                    }
                }
            }
            json!({
                "schema_version": SCHEMA_VERSION,
                "kind": "semilattice",
                "name": doc.name,
                "elements": elements,
                "meet": rows,
            })
        }
        StructurePayload::Simplex(s) => json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "simplex",
            "name": doc.name,
            "vertices": s.vertices(),
        }),
        StructurePayload::Polytope(p) => json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "polytope",
            "name": doc.name,
            "dimension": p.dim(),
            "generators": p
                .generators()
                .iter()
                .map(|g| g.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        StructurePayload::Preframe(pf) => {
            let mut pairs = Vec::new();
            for (i, x) in pf.elements().iter().enumerate() {
                for (j, y) in pf.elements().iter().enumerate() {
                    if i != j && pf.leq(i, j) {
                        pairs.push(json!([x, y]));
                    }
                }
            }
            json!({
                "schema_version": SCHEMA_VERSION,
                "kind": "preframe",
                "name": doc.name,
                "elements": pf.elements(),
                "order": pairs,
            })
        }
        StructurePayload::EffectAlgebra(e) => {
            let mut sums = Vec::new();
            for (x, y, z) in e.defined_sums() {
                if x <= y {
                    sums.push(json!([e.element_name(x), e.element_name(y), e.element_name(z)]));
                }
            }
            json!({
                "schema_version": SCHEMA_VERSION,
                "kind": "effect_algebra",
                "name": doc.name,
                "elements": e.elements(),
                "one": e.element_name(e.one()),
                "sums": sums,
            })
        }
        StructurePayload::SubspaceFamily { ambient, generators } => json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "subspace_family",
            "name": doc.name,
            "ambient": ambient,
            "generators": generators
                .iter()
                .map(|s| {
                    s.basis()
                        .iter()
                        .map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>(),
        }),
        StructurePayload::Semimodule(m) => match m {
            Semimodule::NonNegOrthant { dim, .. } => json!({
                "schema_version": SCHEMA_VERSION,
                "kind": "semimodule",
                "name": doc.name,
                "semimodule": "orthant",
                "dimension": dim,
            }),
            Semimodule::FreeMultiset { labels, .. } => json!({
                "schema_version": SCHEMA_VERSION,
                "kind": "semimodule",
                "name": doc.name,
                "semimodule": "free_multiset",
                "labels": labels,
            }),
            Semimodule::JoinSemilattice(l) => {
                let module = Semimodule::JoinSemilattice(l.clone());
                let elements = l.elements().to_vec();
                let mut rows = Vec::new();
                for (i, x) in elements.iter().enumerate() {
                    for y in elements.iter().skip(i) {
                        let a = crate::semimod::SemimoduleElement::Join(x.clone());
                        let b = crate::semimod::SemimoduleElement::Join(y.clone());
                        let joined = match module.add(&a, &b) {
                            Ok(crate::semimod::SemimoduleElement::Join(v)) => v,
                            _ => unreachable!("join of carrier elements"),
                        };
                        rows.push(json!([x, y, joined]));
                    }
                }
                let bottom = match module.zero() {
                    crate::semimod::SemimoduleElement::Join(b) => b,
                    _ => unreachable!(),
                };
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "kind": "semimodule",
                    "name": doc.name,
                    "semimodule": "join_semilattice",
                    "elements": elements,
                    "join": rows,
                    "bottom": bottom,
                })
            }
            Semimodule::FreeOnConvex(base) => {
                let base_doc = StructureDoc {
                    name: base.name().to_string(),
                    payload: match base.as_ref() {
                        ConvexAlgebra::Semilattice(l) => StructurePayload::Semilattice(l.clone()),
                        ConvexAlgebra::Simplex(s) => StructurePayload::Simplex(s.clone()),
                        ConvexAlgebra::Polytope(p) => StructurePayload::Polytope(p.clone()),
                    },
                };
                let base_value: Value =
                    serde_json::from_str(&serialize(&base_doc)).expect("own output parses");
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "kind": "semimodule",
                    "name": doc.name,
                    "semimodule": "free_on_convex",
                    "base": base_value,
                })
            }
        },
    };
    serde_json::to_string_pretty(&value).expect("serializable")
}

/// Views a parsed document as a convex algebra when its kind is one.
pub fn as_convex(doc: &StructureDoc) -> Option<ConvexAlgebra> {
    match &doc.payload {
        StructurePayload::Semilattice(l) => Some(ConvexAlgebra::Semilattice(l.clone())),
        StructurePayload::Simplex(s) => Some(ConvexAlgebra::Simplex(s.clone())),
        StructurePayload::Polytope(p) => Some(ConvexAlgebra::Polytope(p.clone())),
        _ => None,
    }
}

#[derive(Debug, Parser)]
#[command(name = "convexlab", about = "Exact-rational checks for convex and effect structures")]
struct Cli {
    /// Seed for all sampled checks; defaults to the CONVEXLAB_SEED
    /// environment variable, then to a fixed constant.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HomTarget {
    Two,
    Unit,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the axiom suite for the structure in FILE.
    Check { file: PathBuf },
    /// Enumerate prime filters (convex kinds) or Scott-open filters
    /// (preframes).
    Filters { file: PathBuf },
    /// Enumerate extreme points of a convex structure.
    Extremes { file: PathBuf },
    /// Enumerate homomorphisms: between two effect algebras, or from one
    /// structure into a dualizing object.
    Homs {
        file: PathBuf,
        second: Option<PathBuf>,
        #[arg(long)]
        target: Option<HomTarget>,
    },
    /// Compute the state space of an effect algebra: the constraint system
    /// and all extreme states.
    States { file: PathBuf },
    /// Adjunction checks.
    Adjoint {
        #[command(subcommand)]
        what: AdjointCommand,
    },
    /// Dual-adjunction round trips.
    Duality {
        #[command(subcommand)]
        what: DualityCommand,
    },
    /// Inner-product-space checks.
    Hilbert {
        #[command(subcommand)]
        what: HilbertCommand,
    },
    /// Reproduce stored counterexamples.
    Counterexample {
        #[command(subcommand)]
        what: CounterexampleCommand,
    },
}

#[derive(Debug, Subcommand)]
enum AdjointCommand {
    /// Free-semimodule transposition round trips over the convex structure
    /// in FILE.
    Semimod { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum DualityCommand {
    /// Boolean duality: exhaustive hom-set transposition between the convex
    /// structure in XFILE and the preframe in LFILE.
    Preframe { xfile: PathBuf, lfile: PathBuf },
    /// Unit-interval duality checks for the structure in XFILE: the counit
    /// suite for convex kinds, the unit suite for effect algebras.
    Effect { xfile: PathBuf },
}

#[derive(Debug, Subcommand)]
enum HilbertCommand {
    /// The squared-projection state of --unit on the subspace family in
    /// FILE.
    Epsilon {
        file: PathBuf,
        #[arg(long)]
        unit: String,
    },
}

#[derive(Debug, Subcommand)]
enum CounterexampleCommand {
    /// The exact record showing squared projections ignore convex mixtures.
    EpsilonConvexity,
}

fn emit(out: &mut dyn Write, value: Value) {
    let line = serde_json::to_string(&value).expect("report lines serialize");
    writeln!(out, "{line}").expect("report stream is writable");
}

struct Tally {
    pass: usize,
    fail: usize,
    skipped: usize,
}

impl Tally {
    fn new() -> Self {
        Tally { pass: 0, fail: 0, skipped: 0 }
    }

    fn absorb(&mut self, out: &mut dyn Write, report: &CheckReport) {
        for check in &report.checks {
            let mut record = json!({
                "type": "check",
                "subject": report.subject,
                "suite": report.suite,
                "name": check.name,
            });
            match &check.outcome {
                Outcome::Pass => {
                    self.pass += 1;
                    record["outcome"] = "pass".into();
                }
                Outcome::Fail { witness } => {
                    self.fail += 1;
                    record["outcome"] = "fail".into();
                    record["witness"] = witness.clone();
                }
                Outcome::Skipped { reason } => {
                    self.skipped += 1;
                    record["outcome"] = "skipped".into();
                    record["reason"] = reason.clone().into();
                }
            }
            emit(out, record);
        }
    }

    fn finish(&self, out: &mut dyn Write) -> i32 {
        emit(
            out,
            json!({
                "type": "summary",
                "pass": self.pass,
                "fail": self.fail,
                "skipped": self.skipped,
            }),
        );
        if self.fail > 0 {
            1
        } else {
            0
        }
    }
}

fn load(path: &Path) -> Result<StructureDoc, StructError> {
    let text = std::fs::read_to_string(path).map_err(|e| StructError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text)
}

/// Entry point used by the binary and by tests: runs a command line and
/// writes the report stream to `out`.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> =
        std::iter::once("convexlab".to_string()).chain(args.into_iter().map(Into::into)).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                emit(out, json!({ "type": "error", "class": "usage", "message": e.to_string() }));
                return 2;
            }
            // --help and --version render as ordinary text.
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let seed = cli.seed.unwrap_or_else(sampling::seed_from_env);
    match dispatch(cli.command, seed, out) {
        Ok(code) => code,
        Err(e) => {
            let class = match &e {
                StructError::Schema { .. } => "schema",
                StructError::Io { .. } => "io",
                StructError::Usage(_) => "usage",
            };
            emit(out, json!({ "type": "error", "class": class, "message": e.to_string() }));
            2
        }
    }
}

fn dispatch(command: Command, seed: u64, out: &mut dyn Write) -> Result<i32, StructError> {
    let mut tally = Tally::new();
    match command {
        Command::Check { file } => {
            let doc = load(&file)?;
            run_check(&doc, seed, out, &mut tally)?;
        }
        Command::Filters { file } => {
            let doc = load(&file)?;
            run_filters(&doc, seed, out, &mut tally)?;
        }
        Command::Extremes { file } => {
            let doc = load(&file)?;
            run_extremes(&doc, seed, out, &mut tally)?;
        }
        Command::Homs { file, second, target } => {
            let doc = load(&file)?;
            let second = second.map(|p| load(&p)).transpose()?;
            run_homs(&doc, second.as_ref(), target, seed, out, &mut tally)?;
        }
        Command::States { file } => {
            let doc = load(&file)?;
            run_states(&doc, out, &mut tally)?;
        }
        Command::Adjoint { what: AdjointCommand::Semimod { file } } => {
            let doc = load(&file)?;
            let alg = as_convex(&doc).ok_or_else(|| {
                StructError::Usage("adjoint semimod expects a convex structure".into())
            })?;
            let mut rng = sampling::rng_for(seed, "adjoint-semimod");
            tally.absorb(out, &crate::semimod::adjunction_round_trip_suite(&alg, 25, &mut rng));
        }
        Command::Duality { what } => match what {
            DualityCommand::Preframe { xfile, lfile } => {
                let xdoc = load(&xfile)?;
                let ldoc = load(&lfile)?;
                let alg = as_convex(&xdoc).ok_or_else(|| {
                    StructError::Usage("duality preframe expects a convex structure first".into())
                })?;
                let StructurePayload::Preframe(pf) = &ldoc.payload else {
                    return Err(StructError::Usage("duality preframe expects a preframe second".into()));
                };
                let mut rng = sampling::rng_for(seed, "duality-preframe");
                let grid = standard_grid(&mut rng);
                let report = preframes::check_preframe_duality(&alg, pf, &grid, &mut rng)
                    .map_err(|e| StructError::Usage(e.to_string()))?;
                tally.absorb(out, &report);
            }
            DualityCommand::Effect { xfile } => {
                let doc = load(&xfile)?;
                let mut rng = sampling::rng_for(seed, "duality-effect");
                match (&doc.payload, as_convex(&doc)) {
                    (_, Some(alg)) => {
                        let report = states::check_counit(&alg, 20, &mut rng)
                            .map_err(|e| StructError::Usage(e.to_string()))?;
                        tally.absorb(out, &report);
                        if let ConvexAlgebra::Simplex(s) = &alg {
                            let report =
                                states::composed_adjunction_check(s.vertices(), 20, &mut rng)
                                    .map_err(|e| StructError::Usage(e.to_string()))?;
                            tally.absorb(out, &report);
                        }
                        let fa = states::affine_functionals(&alg)
                            .map_err(|e| StructError::Usage(e.to_string()))?;
                        tally.absorb(out, &states::check_functional_algebra(&fa, 16, &mut rng));
                    }
                    (StructurePayload::EffectAlgebra(e), None) => {
                        let space =
                            states::state_space(e).map_err(|err| StructError::Usage(err.to_string()))?;
                        let report = states::check_unit_hom(e, &space)
                            .map_err(|err| StructError::Usage(err.to_string()))?;
                        tally.absorb(out, &report);
                    }
                    _ => {
                        return Err(StructError::Usage(
                            "duality effect expects a convex structure or an effect algebra".into(),
                        ))
                    }
                }
            }
        },
        Command::Hilbert { what: HilbertCommand::Epsilon { file, unit } } => {
            let doc = load(&file)?;
            let StructurePayload::SubspaceFamily { ambient, generators } = &doc.payload else {
                return Err(StructError::Usage("hilbert epsilon expects a subspace family".into()));
            };
            let coords: Result<Vec<Rational>, StructError> = unit
                .split(',')
                .enumerate()
                .map(|(i, s)| {
                    s.trim().parse().map_err(|e: crate::scalars::ScalarError| {
                        StructError::schema(format!("--unit[{i}]"), e)
                    })
                })
                .collect();
            let a = UnitVector::new(coords?).map_err(|e| StructError::Usage(e.to_string()))?;
            let fam = hilbert::ksub_effect_algebra(*ambient, generators)
                .map_err(|e| StructError::Usage(e.to_string()))?;
            emit(
                out,
                json!({
                    "type": "family",
                    "name": doc.name,
                    "members": fam.subspaces.iter().map(|s| s.render()).collect::<Vec<_>>(),
                }),
            );
            tally.absorb(out, &check_effect_axioms(&fam.table));
            tally.absorb(out, &hilbert::check_epsilon_report(&a, &fam));
            for (i, s) in fam.subspaces.iter().enumerate() {
                emit(
                    out,
                    json!({
                        "type": "epsilon-value",
                        "subspace": s.render(),
                        "value": hilbert::projection_norm_sq(a.coords(), s).to_string(),
                        "index": i,
                    }),
                );
            }
        }
        Command::Counterexample { what: CounterexampleCommand::EpsilonConvexity } => {
            let w = hilbert::convexity_counterexample();
            emit(
                out,
                json!({
                    "type": "witness",
                    "kind": "epsilon-convexity",
                    "a": w.a.to_string(),
                    "b": w.b.to_string(),
                    "lambda": w.lambda.to_string(),
                    "subspace": w.subspace.render(),
                    "mix_point": w.mix_point.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "mix_norm_sq": w.mix_norm_sq.to_string(),
                    "projection_of_mix": w.projected_mix.to_string(),
                    "mix_of_projections": w.mixed_projections.to_string(),
                    "mix_is_unit_vector": w.mix_norm_sq.is_one(),
                }),
            );
            let mut report = CheckReport::new("epsilon-convexity", "counterexample");
            report.record(
                "mix-projection-differs-from-projection-mix",
                w.projected_mix != w.mixed_projections,
                || json!({}),
            );
            tally.absorb(out, &report);
        }
    }
    Ok(tally.finish(out))
}

fn run_check(doc: &StructureDoc, seed: u64, out: &mut dyn Write, tally: &mut Tally) -> Result<(), StructError> {
    let mut rng = sampling::rng_for(seed, "check");
    match &doc.payload {
        StructurePayload::Semiring(r) => {
            let mut report = CheckReport::new(format!("semiring:{}", r.label()), "semiring-laws");
            macro_rules! classify {
                ($ring:expr) => {{
                    match classify_semiring($ring, 200, &mut rng) {
                        Ok(profile) => {
                            report.pass("semiring-laws");
                            emit(
                                out,
                                json!({
                                    "type": "profile",
                                    "semiring": r.label(),
                                    "nontrivial": profile.nontrivial,
                                    "zerosumfree": profile.zerosumfree,
                                    "integral": profile.integral,
                                    "semifield": profile.semifield,
                                }),
                            );
                            let eligible =
                                profile.nontrivial && profile.zerosumfree && profile.integral;
                            if eligible {
                                match support_hom($ring, 200, &mut rng) {
                                    Ok(_) => report.pass("support-homomorphism"),
                                    Err(e) => report
                                        .fail("support-homomorphism", json!({"witness": e.to_string()})),
                                }
                            } else {
                                report.skip("support-homomorphism", "profile not eligible");
                            }
                        }
                        Err(e) => report.fail("semiring-laws", json!({"witness": e.to_string()})),
                    }
                }};
            }
            match r {
                SemiringRef::Bool => classify!(&BoolSemiring),
                SemiringRef::Nat => classify!(&NatSemiring),
                SemiringRef::NonNegRational => classify!(&NonNegRationalSemiring),
                SemiringRef::Mod(n) => classify!(&ModSemiring::new(*n)),
            }
            tally.absorb(out, &report);
        }
        StructurePayload::Semilattice(_) => {
            let alg = as_convex(doc).expect("convex kinds");
            let grid = standard_grid(&mut rng);
            let samples = alg.sample_pool(0, &mut rng);
            tally.absorb(out, &check_convex_axioms(&alg, &grid, &samples));
            tally.absorb(out, &check_nested_tuple_identity(&alg, &grid, &samples));
        }
        StructurePayload::Simplex(_) | StructurePayload::Polytope(_) => {
            let alg = as_convex(doc).expect("convex kinds");
            tally.absorb(out, &crate::convex::check_convex_axioms_sampled(&alg, 200, &mut rng));
            tally.absorb(out, &crate::convex::check_nested_tuple_identity_sampled(&alg, 200, &mut rng));
        }
        StructurePayload::Preframe(pf) => {
            tally.absorb(out, &preframes::check_scott_open_filters(pf, 60, &mut rng));
            tally.absorb(out, &pf.check_directed_distributivity(60, &mut rng));
        }
        StructurePayload::EffectAlgebra(e) => {
            tally.absorb(out, &check_effect_axioms(e));
        }
        StructurePayload::SubspaceFamily { ambient, generators } => {
            let fam = hilbert::ksub_effect_algebra(*ambient, generators)
                .map_err(|e| StructError::Usage(e.to_string()))?;
            tally.absorb(out, &check_effect_axioms(&fam.table));
            tally.absorb(out, &hilbert::check_lattice_laws(*ambient, 60, &mut rng));
            tally.absorb(out, &hilbert::check_orthomodular_law(*ambient, 120, &mut rng));
        }
        StructurePayload::Semimodule(m) => {
            let samples: Vec<crate::semimod::SemimoduleElement> = {
                let mut v: Vec<crate::semimod::SemimoduleElement> =
                    (0..5).map(|_| m.sample_element(&mut rng)).collect();
                v.push(m.zero());
                v
            };
            let scalars = vec![
                Rational::zero(),
                Rational::one(),
                Rational::new(1, 2),
                Rational::new(5, 3),
            ];
            tally.absorb(out, &check_semimodule_axioms(m, &samples, &scalars));
        }
    }
    Ok(())
}

fn run_filters(doc: &StructureDoc, seed: u64, out: &mut dyn Write, tally: &mut Tally) -> Result<(), StructError> {
    let mut rng = sampling::rng_for(seed, "filters");
    match (&doc.payload, as_convex(doc)) {
        (_, Some(alg)) => {
            let grid = standard_grid(&mut rng);
            let filters = faces::enumerate_prime_filters(&alg, &grid)
                .map_err(|e| StructError::Usage(e.to_string()))?;
            for (i, f) in filters.iter().enumerate() {
                emit(
                    out,
                    json!({
                        "type": "filter",
                        "index": i,
                        "members": f.describe(&alg),
                        "bitmask": f.bitmask(&alg),
                    }),
                );
            }
            emit(out, json!({ "type": "count", "what": "prime-filters", "count": filters.len() }));
            let samples: Vec<crate::convex::ConvexElement> =
                alg.sample_pool(5, &mut rng).into_iter().take(5).collect();
            let report = faces::check_filter_duality(&alg, &grid, &samples)
                .map_err(|e| StructError::Usage(e.to_string()))?;
            tally.absorb(out, &report);
        }
        (StructurePayload::Preframe(pf), None) => {
            let filters = preframes::scott_open_filters(pf);
            for (i, f) in filters.iter().enumerate() {
                let members: Vec<&str> = f.iter().map(|&idx| pf.elements()[idx].as_str()).collect();
                emit(
                    out,
                    json!({
                        "type": "filter",
                        "index": i,
                        "members": format!("{{{}}}", members.join(",")),
                    }),
                );
            }
            emit(out, json!({ "type": "count", "what": "scott-open-filters", "count": filters.len() }));
            tally.absorb(out, &preframes::check_scott_open_filters(pf, 60, &mut rng));
        }
        _ => {
            return Err(StructError::Usage(
                "filters expects a convex structure or a preframe".into(),
            ))
        }
    }
    Ok(())
}

fn run_extremes(doc: &StructureDoc, seed: u64, out: &mut dyn Write, tally: &mut Tally) -> Result<(), StructError> {
    let mut rng = sampling::rng_for(seed, "extremes");
    let alg = as_convex(doc)
        .ok_or_else(|| StructError::Usage("extremes expects a convex structure".into()))?;
    let grid = standard_grid(&mut rng);
    let points =
        faces::extreme_points(&alg, &grid).map_err(|e| StructError::Usage(e.to_string()))?;
    for (i, p) in points.iter().enumerate() {
        emit(out, json!({ "type": "extreme", "index": i, "element": p.to_string() }));
    }
    emit(out, json!({ "type": "count", "what": "extreme-points", "count": points.len() }));
    let mut report = CheckReport::new(alg.describe(), "extremes");
    report.record("enumeration-complete", true, || json!({}));
    tally.absorb(out, &report);
    Ok(())
}

fn run_homs(
    doc: &StructureDoc,
    second: Option<&StructureDoc>,
    target: Option<HomTarget>,
    seed: u64,
    out: &mut dyn Write,
    tally: &mut Tally,
) -> Result<(), StructError> {
    let mut rng = sampling::rng_for(seed, "homs");
    match (second, target) {
        (Some(snd), None) => {
            let (StructurePayload::EffectAlgebra(e), StructurePayload::EffectAlgebra(d)) =
                (&doc.payload, &snd.payload)
            else {
                return Err(StructError::Usage("homs FILE FILE expects two effect algebras".into()));
            };
            let homs =
                enumerate_ea_homs(e, d).map_err(|err| StructError::Usage(err.to_string()))?;
            for (i, h) in homs.iter().enumerate() {
                let table: Vec<String> = h
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| format!("{}|->{}", e.element_name(x), d.element_name(y)))
                    .collect();
                emit(out, json!({ "type": "hom", "index": i, "map": table }));
            }
            emit(out, json!({ "type": "count", "what": "effect-homs", "count": homs.len() }));
            let mut report =
                CheckReport::new(format!("{} -> {}", e.name(), d.name()), "hom-enumeration");
            report.record("enumeration-complete", true, || json!({}));
            tally.absorb(out, &report);
        }
        (None, Some(HomTarget::Two)) => match (&doc.payload, as_convex(doc)) {
            (_, Some(alg)) => {
                let grid = standard_grid(&mut rng);
                let maps = faces::hom_to_two(&alg, &grid)
                    .map_err(|e| StructError::Usage(e.to_string()))?;
                for (i, m) in maps.iter().enumerate() {
                    emit(
                        out,
                        json!({
                            "type": "hom",
                            "index": i,
                            "true_kernel": m.filter.describe(&alg),
                        }),
                    );
                }
                emit(out, json!({ "type": "count", "what": "maps-to-two", "count": maps.len() }));
                let samples: Vec<crate::convex::ConvexElement> =
                    alg.sample_pool(5, &mut rng).into_iter().take(5).collect();
                let report = faces::check_filter_duality(&alg, &grid, &samples)
                    .map_err(|e| StructError::Usage(e.to_string()))?;
                tally.absorb(out, &report);
            }
            (StructurePayload::Preframe(pf), None) => {
                let filters = preframes::scott_open_filters(pf);
                emit(out, json!({ "type": "count", "what": "maps-to-two", "count": filters.len() }));
                tally.absorb(out, &preframes::check_scott_open_filters(pf, 60, &mut rng));
            }
            (StructurePayload::EffectAlgebra(e), None) => {
                let homs = enumerate_ea_homs(e, &EffectTable::two())
                    .map_err(|err| StructError::Usage(err.to_string()))?;
                emit(out, json!({ "type": "count", "what": "maps-to-two", "count": homs.len() }));
                let mut report = CheckReport::new(e.name().to_string(), "hom-enumeration");
                report.record("enumeration-complete", true, || json!({}));
                tally.absorb(out, &report);
            }
            _ => return Err(StructError::Usage("homs --target two: unsupported kind".into())),
        },
        (None, Some(HomTarget::Unit)) => match (&doc.payload, as_convex(doc)) {
            (StructurePayload::EffectAlgebra(e), None) => {
                run_states_table(e, out, tally)?;
            }
            (_, Some(alg)) => {
                let fa = states::affine_functionals(&alg)
                    .map_err(|e| StructError::Usage(e.to_string()))?;
                emit(
                    out,
                    json!({
                        "type": "functional-algebra",
                        "generators": fa.generator_count(),
                        "dependencies": fa.dependency_count(),
                    }),
                );
                tally.absorb(out, &states::check_functional_algebra(&fa, 16, &mut rng));
            }
            _ => return Err(StructError::Usage("homs --target unit: unsupported kind".into())),
        },
        _ => {
            return Err(StructError::Usage(
                "homs expects either two files or --target two|unit".into(),
            ))
        }
    }
    Ok(())
}

fn run_states(doc: &StructureDoc, out: &mut dyn Write, tally: &mut Tally) -> Result<(), StructError> {
    match &doc.payload {
        StructurePayload::EffectAlgebra(e) => run_states_table(e, out, tally),
        StructurePayload::SubspaceFamily { ambient, generators } => {
            let fam = hilbert::ksub_effect_algebra(*ambient, generators)
                .map_err(|e| StructError::Usage(e.to_string()))?;
            run_states_table(&fam.table, out, tally)
        }
        _ => Err(StructError::Usage("states expects an effect algebra".into())),
    }
}

fn run_states_table(e: &EffectTable, out: &mut dyn Write, tally: &mut Tally) -> Result<(), StructError> {
    let space = states::state_space(e).map_err(|err| StructError::Usage(err.to_string()))?;
    for c in &space.constraints {
        emit(
            out,
            json!({
                "type": "constraint",
                "label": c.label,
                "equality": c.is_equality,
            }),
        );
    }
    for (i, s) in space.extreme.iter().enumerate() {
        let mut values = Map::new();
        for (name, v) in space.element_names.iter().zip(&s.values) {
            values.insert(name.clone(), Value::String(v.to_string()));
        }
        emit(
            out,
            json!({
                "type": "state",
                "index": i,
                "values": Value::Object(values),
                "tight_constraints": space.certificates[i].len(),
            }),
        );
    }
    emit(out, json!({ "type": "count", "what": "extreme-states", "count": space.extreme.len() }));
    let mut report = CheckReport::new(format!("effect:{}", e.name()), "state-space");
    report.record("empty-or-certified", space.extreme.len() == space.certificates.len(), || json!({}));
    let mut valid = true;
    for s in &space.extreme {
        if states::is_state(e, &s.values).is_err() {
            valid = false;
        }
    }
    report.record("all-extreme-points-are-states", valid, || json!({}));
    tally.absorb(out, &report);
    Ok(())
}

/// Convenience wrapper used by the binary.
pub fn run_from_args<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run(args, &mut lock)
}

/// Runs a command line and captures the report stream; used by tests and by
/// the reproducibility checks.
pub fn run_to_string<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut buf: Vec<u8> = Vec::new();
    let code = run(args, &mut buf);
    (code, String::from_utf8(buf).expect("report stream is utf-8"))
}
