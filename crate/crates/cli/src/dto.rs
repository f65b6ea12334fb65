//! JSON artifact formats and their conversion to library values.
//!
//! Every object format rejects unknown fields and accepts an optional
//! `"schema": "relift/1"` tag.

use std::collections::BTreeMap;

use relift::bits::BitMatrix;
use relift::coalg::{Coalgebra, Formula};
use relift::error::Error;
use relift::functor::{parse_functor, Registry};
use relift::{Caps, FinPreorder, LaxSquare, MonotoneMap, MonotoneRelation, Span};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "relift/1";

/// A failure while reading an artifact: malformed input is a usage error,
/// a well-formed artifact violating a library invariant is an invalid one.
#[derive(Debug)]
pub enum LoadError {
    Malformed(String),
    Invalid(Error),
}

impl From<Error> for LoadError {
    fn from(e: Error) -> Self {
        LoadError::Invalid(e)
    }
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Malformed(m) => write!(f, "{m}"),
            LoadError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

pub type Load<T> = std::result::Result<T, LoadError>;

/// Deserializes with the JSON path of the first offending field in the message.
pub fn from_value<T: DeserializeOwned>(what: &str, v: Value) -> Load<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        LoadError::Malformed(format!("malformed {what} at `{path}`: {}", e.inner()))
    })
}

fn check_schema(schema: &Option<String>) -> Load<()> {
    match schema.as_deref() {
        None | Some(SCHEMA) => Ok(()),
        Some(other) => Err(LoadError::Malformed(format!(
            "unsupported schema `{other}`, expected `{SCHEMA}`"
        ))),
    }
}

/// A preorder: `leq[i][j]` states `elems[i] <= elems[j]`; `pairs` lists
/// further `[x, y]` with `x <= y`. The union is closed reflexively and
/// transitively. With `poset: true` antisymmetry is enforced.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreorderDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub elems: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leq: Option<Vec<Vec<bool>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub poset: bool,
}

impl PreorderDto {
    pub fn from_preorder(p: &FinPreorder) -> Self {
        PreorderDto {
            schema: None,
            elems: p.ids().to_vec(),
            leq: Some(p.leq_matrix().to_rows()),
            pairs: None,
            poset: p.is_poset(),
        }
    }

    pub fn build(&self) -> Load<FinPreorder> {
        check_schema(&self.schema)?;
        let n = self.elems.len();
        let mut m = match &self.leq {
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(
                        Error::ShapeMismatch(format!("`leq` must be a {n}x{n} matrix")).into(),
                    );
                }
                BitMatrix::from_rows(rows, n).expect("shape checked")
            }
            None => BitMatrix::identity(n),
        };
        let p = FinPreorder::from_matrix(self.elems.clone(), &BitMatrix::identity(n))?;
        for (x, y) in self.pairs.iter().flatten() {
            m.insert(p.require(x)?, p.require(y)?);
        }
        let p = FinPreorder::from_matrix(self.elems.clone(), &m)?;
        if self.poset {
            p.check_poset()?;
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub dom: PreorderDto,
    pub cod: PreorderDto,
    pub table: BTreeMap<String, String>,
}

impl MapDto {
    pub fn from_map(f: &MonotoneMap) -> Self {
        MapDto {
            schema: None,
            dom: PreorderDto::from_preorder(f.dom()),
            cod: PreorderDto::from_preorder(f.cod()),
            table: (0..f.dom().len())
                .map(|i| {
                    (
                        f.dom().id(i).to_string(),
                        f.cod().id(f.apply(i)).to_string(),
                    )
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Load<MonotoneMap> {
        check_schema(&self.schema)?;
        let dom = self.dom.build()?;
        let cod = self.cod.build()?;
        let pairs: Vec<(&str, &str)> = self
            .table
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        Ok(MonotoneMap::from_pairs(&dom, &cod, &pairs)?)
    }
}

/// A relation `src -/-> dst`; `mat[y][x]` relates `dst[y]` to `src[x]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub src: PreorderDto,
    pub dst: PreorderDto,
    pub mat: Vec<Vec<bool>>,
}

impl RelationDto {
    pub fn from_relation(r: &MonotoneRelation) -> Self {
        RelationDto {
            schema: None,
            src: PreorderDto::from_preorder(r.src()),
            dst: PreorderDto::from_preorder(r.dst()),
            mat: r.matrix().to_rows(),
        }
    }

    pub fn build(&self) -> Load<MonotoneRelation> {
        check_schema(&self.schema)?;
        let src = self.src.build()?;
        let dst = self.dst.build()?;
        if self.mat.len() != dst.len() || self.mat.iter().any(|r| r.len() != src.len()) {
            return Err(Error::ShapeMismatch(format!(
                "`mat` must have {} rows (dst) of {} entries (src)",
                dst.len(),
                src.len()
            ))
            .into());
        }
        let mat = BitMatrix::from_rows(&self.mat, src.len()).expect("shape checked");
        Ok(MonotoneRelation::new(&src, &dst, mat)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub vertex: PreorderDto,
    pub d0: MapDto,
    pub d1: MapDto,
}

impl SpanDto {
    pub fn build(&self) -> Load<Span> {
        check_schema(&self.schema)?;
        let vertex = self.vertex.build()?;
        let d0 = self.d0.build()?;
        let d1 = self.d1.build()?;
        if d0.dom() != &vertex || d1.dom() != &vertex {
            return Err(Error::DomainMismatch("both legs must start at the vertex".into()).into());
        }
        Ok(Span::new(d0, d1)?)
    }
}

/// A lax square `f ∘ p0 <= g ∘ p1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub p0: MapDto,
    pub p1: MapDto,
    pub f: MapDto,
    pub g: MapDto,
}

impl SquareDto {
    pub fn from_square(sq: &LaxSquare) -> Self {
        SquareDto {
            schema: None,
            p0: MapDto::from_map(sq.p0()),
            p1: MapDto::from_map(sq.p1()),
            f: MapDto::from_map(sq.f()),
            g: MapDto::from_map(sq.g()),
        }
    }

    pub fn build(&self) -> Load<LaxSquare> {
        check_schema(&self.schema)?;
        Ok(LaxSquare::new(
            self.p0.build()?,
            self.p1.build()?,
            self.f.build()?,
            self.g.build()?,
        )?)
    }
}

/// A coalgebra: one element literal of `functor(carrier)` per state.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalgebraDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub carrier: PreorderDto,
    pub functor: String,
    pub xi: BTreeMap<String, String>,
}

impl CoalgebraDto {
    pub fn build(&self, registry: &Registry, caps: &Caps) -> Load<Coalgebra> {
        check_schema(&self.schema)?;
        let x = self.carrier.build()?;
        let t = parse_functor(&self.functor, registry)?;
        Ok(Coalgebra::from_literals(&x, &t, &self.xi, caps)?)
    }
}

/// `"top"`, `"bot"`, `{"and": [..]}`, `{"or": [..]}` or
/// `{"nabla": {"payload": "{p,q}", "subs": {"p": .., "q": ..}}}`.
/// Empty conjunctions are `top`, empty disjunctions `bot`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FormulaDto {
    Top,
    Bot,
    And(Vec<FormulaDto>),
    Or(Vec<FormulaDto>),
    Nabla(NablaDto),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NablaDto {
    pub payload: String,
    pub subs: BTreeMap<String, FormulaDto>,
}

impl FormulaDto {
    pub fn build(&self) -> Formula {
        let fold = |xs: &[FormulaDto], unit: Formula, op: fn(Formula, Formula) -> Formula| {
            let mut it = xs.iter().map(FormulaDto::build);
            match it.next() {
                None => unit,
                Some(first) => it.fold(first, op),
            }
        };
        match self {
            FormulaDto::Top => Formula::Top,
            FormulaDto::Bot => Formula::Bot,
            FormulaDto::And(xs) => fold(xs, Formula::Top, Formula::and),
            FormulaDto::Or(xs) => fold(xs, Formula::Bot, Formula::or),
            FormulaDto::Nabla(n) => Formula::Nabla {
                payload: n.payload.clone(),
                subs: n.subs.iter().map(|(k, v)| (k.clone(), v.build())).collect(),
            },
        }
    }
}

/// Maps for which the catalog squares are generated. Every square whose
/// inputs are present and fit together is emitted if it is exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogRequestDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub f: MapDto,
    #[serde(default)]
    pub g: Option<MapDto>,
    #[serde(default)]
    pub u: Option<MapDto>,
    #[serde(default)]
    pub j: Option<MapDto>,
    #[serde(default)]
    pub h: Option<MapDto>,
    #[serde(default)]
    pub l: Option<MapDto>,
}

/// Registry file: constant-functor name to carrier.
pub fn build_registry(v: Value) -> Load<Registry> {
    let raw: BTreeMap<String, PreorderDto> = from_value("registry", v)?;
    let mut reg = Registry::new();
    for (name, p) in raw {
        reg.insert(&name, p.build()?);
    }
    Ok(reg)
}

/// The artifact kinds `validate` recognises, detected from their keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    Preorder,
    Map,
    Relation,
    Span,
    Square,
    Coalgebra,
    Formula,
    Catalog,
}

impl ArtifactKind {
    pub fn name(self) -> &'static str {
        match self {
            ArtifactKind::Preorder => "preorder",
            ArtifactKind::Map => "map",
            ArtifactKind::Relation => "relation",
            ArtifactKind::Span => "span",
            ArtifactKind::Square => "square",
            ArtifactKind::Coalgebra => "coalgebra",
            ArtifactKind::Formula => "formula",
            ArtifactKind::Catalog => "catalog-request",
        }
    }

    pub fn detect(v: &Value) -> Option<ArtifactKind> {
        match v {
            Value::String(_) => Some(ArtifactKind::Formula),
            Value::Object(o) => {
                let has = |k: &str| o.contains_key(k);
                Some(if has("elems") {
                    ArtifactKind::Preorder
                } else if has("table") {
                    ArtifactKind::Map
                } else if has("mat") {
                    ArtifactKind::Relation
                } else if has("vertex") {
                    ArtifactKind::Span
                } else if has("p0") {
                    ArtifactKind::Square
                } else if has("xi") {
                    ArtifactKind::Coalgebra
                } else if ["top", "bot", "and", "or", "nabla"].iter().any(|k| has(k)) {
                    ArtifactKind::Formula
                } else if has("f") {
                    ArtifactKind::Catalog
                } else {
                    return None;
                })
            }
            _ => None,
        }
    }
}
