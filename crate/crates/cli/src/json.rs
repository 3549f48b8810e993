//! JSON exchange formats for bases, tropical graphs and reports.
//!
//! Integers are written as decimal strings and rationals as `[numerator, denominator]`
//! string pairs; plain JSON integers are accepted on input.

use std::collections::BTreeSet;

use atf_core::atbd::{AlmostToricBase, CutContent, MutationRecord, RelativeBase, ValidationReport};
use atf_core::diophantine::{MarkovTriple, QuadraticSurd};
use atf_core::lattice::{LatticeVector, PlanePoint, Rational};
use atf_core::staircase::{ManifoldPreset, PresetName};
use atf_core::tropical::{Attachment, StcReport, TropicalEdge, TropicalGraph, TropicalVertex, VertexKind};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

/// Big integer written as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JInt(pub BigInt);

impl Serialize for JInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInt {
    Str(String),
    Int(i64),
}

impl<'de> Deserialize<'de> for JInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RawInt::deserialize(d)? {
            RawInt::Int(v) => Ok(JInt(BigInt::from(v))),
            RawInt::Str(s) => s.trim().parse().map(JInt).map_err(|_| D::Error::custom(format!("not an integer: {s:?}"))),
        }
    }
}

/// Exact rational written as `[numerator, denominator]`; a plain integer or an `"n/d"` string is also read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JRat(pub Rational);

impl Serialize for JRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [JInt(self.0.numer().clone()), JInt(self.0.denom().clone())].serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRat {
    Pair([JInt; 2]),
    Int(i64),
    Str(String),
}

impl<'de> Deserialize<'de> for JRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (n, m) = match RawRat::deserialize(d)? {
            RawRat::Pair([n, m]) => (n.0, m.0),
            RawRat::Int(v) => (BigInt::from(v), BigInt::from(1)),
            RawRat::Str(s) => {
                let (n, m) = s.split_once('/').unwrap_or((&s, "1"));
                match (n.trim().parse::<BigInt>(), m.trim().parse::<BigInt>()) {
                    (Ok(n), Ok(m)) => (n, m),
                    _ => return Err(D::Error::custom(format!("not a rational: {s:?}"))),
                }
            }
        };
        if m.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(JRat(Rational::new(n, m)))
    }
}

pub fn rat(q: &Rational) -> JRat {
    JRat(q.clone())
}

pub fn jpoint(p: &PlanePoint) -> [JRat; 2] {
    [rat(&p.x), rat(&p.y)]
}

pub fn jvec(v: &LatticeVector) -> [JInt; 2] {
    [JInt(v.x.clone()), JInt(v.y.clone())]
}

fn point_of(p: &[JRat; 2]) -> PlanePoint {
    PlanePoint::new(p[0].0.clone(), p[1].0.clone())
}

fn vec_of(v: &[JInt; 2]) -> LatticeVector {
    LatticeVector::new(v[0].0.clone(), v[1].0.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutJson {
    pub direction: [JInt; 2],
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<JRat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtbdJson {
    pub vertices: Vec<[JRat; 2]>,
    pub cuts: Vec<CutJson>,
    #[serde(default)]
    pub marked_sides: Vec<usize>,
    #[serde(default)]
    pub marked_cut_segments: Vec<[usize; 2]>,
}

impl AtbdJson {
    pub fn from_base(b: &AlmostToricBase) -> Self {
        Self {
            vertices: b.vertices.iter().map(jpoint).collect(),
            cuts: b
                .cuts
                .iter()
                .map(|c| CutJson {
                    direction: jvec(&c.direction),
                    nodes: c.nodes,
                    positions: c.positions.as_ref().map(|p| p.iter().map(rat).collect()),
                })
                .collect(),
            marked_sides: Vec::new(),
            marked_cut_segments: Vec::new(),
        }
    }

    pub fn from_relative(r: &RelativeBase) -> Self {
        Self {
            marked_sides: r.marked_sides.iter().copied().collect(),
            marked_cut_segments: r.marked_cut_segments.iter().map(|&(v, s)| [v, s]).collect(),
            ..Self::from_base(&r.base)
        }
    }

    /// Builds the base; marked data is ignored here.
    pub fn to_base(&self) -> atf_core::Result<AlmostToricBase> {
        let vertices = self.vertices.iter().map(point_of).collect();
        let cuts = self
            .cuts
            .iter()
            .map(|c| {
                let direction = vec_of(&c.direction);
                match &c.positions {
                    Some(p) => {
                        if p.len() as u64 != c.nodes {
                            return Err(atf_core::Error::Malformed(format!("{} positions for {} nodes", p.len(), c.nodes)));
                        }
                        Ok(CutContent::with_positions(direction, p.iter().map(|q| q.0.clone()).collect()))
                    }
                    None => Ok(CutContent::new(direction, c.nodes)),
                }
            })
            .collect::<atf_core::Result<Vec<_>>>()?;
        AlmostToricBase::new(vertices, cuts)
    }

    pub fn to_relative(&self) -> atf_core::Result<RelativeBase> {
        let r = RelativeBase {
            base: self.to_base()?,
            marked_sides: self.marked_sides.iter().copied().collect::<BTreeSet<_>>(),
            marked_cut_segments: self.marked_cut_segments.iter().map(|s| (s[0], s[1])).collect(),
        };
        r.check()?;
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindJson {
    Boundary,
    Bending,
    Interior,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttachmentJson {
    Side(usize),
    Node { vertex: usize, node: usize },
    Cut(usize),
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StcVertexJson {
    pub kind: KindJson,
    pub position: [JRat; 2],
    pub attachment: AttachmentJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StcEdgeJson {
    pub tail: usize,
    pub head: usize,
    pub polyline: Vec<[JRat; 2]>,
    pub class: [JInt; 2],
    pub multiplicity: u64,
}

/// Host given by preset name or inline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HostJson {
    Preset(String),
    Inline(AtbdJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StcJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host: Option<HostJson>,
    pub vertices: Vec<StcVertexJson>,
    pub edges: Vec<StcEdgeJson>,
}

impl StcJson {
    pub fn from_graph(g: &TropicalGraph) -> Self {
        Self {
            host: Some(HostJson::Inline(AtbdJson::from_base(&g.host))),
            vertices: g
                .vertices
                .iter()
                .map(|v| StcVertexJson {
                    kind: match v.kind {
                        VertexKind::Boundary => KindJson::Boundary,
                        VertexKind::Bending => KindJson::Bending,
                        VertexKind::Interior => KindJson::Interior,
                    },
                    position: jpoint(&v.position),
                    attachment: match &v.attachment {
                        Attachment::Side(i) => AttachmentJson::Side(*i),
                        Attachment::Node { vertex, node } => AttachmentJson::Node { vertex: *vertex, node: *node },
                        Attachment::Cut(i) => AttachmentJson::Cut(*i),
                        Attachment::Free => AttachmentJson::Free,
                    },
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| StcEdgeJson {
                    tail: e.tail,
                    head: e.head,
                    polyline: e.polyline.iter().map(jpoint).collect(),
                    class: jvec(&e.class),
                    multiplicity: e.multiplicity,
                })
                .collect(),
        }
    }

    /// Builds the graph, taking the host from the file or from `fallback`.
    pub fn to_graph(&self, fallback: Option<&AlmostToricBase>) -> atf_core::Result<TropicalGraph> {
        let host = match &self.host {
            Some(HostJson::Inline(a)) => a.to_base()?,
            Some(HostJson::Preset(name)) => ManifoldPreset::get(name.parse::<PresetName>()?).initial_base,
            None => fallback.cloned().ok_or_else(|| atf_core::Error::Malformed("graph has no host".to_string()))?,
        };
        let vertices = self
            .vertices
            .iter()
            .map(|v| TropicalVertex {
                kind: match v.kind {
                    KindJson::Boundary => VertexKind::Boundary,
                    KindJson::Bending => VertexKind::Bending,
                    KindJson::Interior => VertexKind::Interior,
                },
                position: point_of(&v.position),
                attachment: match &v.attachment {
                    AttachmentJson::Side(i) => Attachment::Side(*i),
                    AttachmentJson::Node { vertex, node } => Attachment::Node { vertex: *vertex, node: *node },
                    AttachmentJson::Cut(i) => Attachment::Cut(*i),
                    AttachmentJson::Free => Attachment::Free,
                },
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| TropicalEdge {
                tail: e.tail,
                head: e.head,
                polyline: e.polyline.iter().map(point_of).collect(),
                class: vec_of(&e.class),
                multiplicity: e.multiplicity,
            })
            .collect();
        Ok(TropicalGraph { vertices, edges, host })
    }
}

pub fn validation_json(r: &ValidationReport) -> Value {
    json!({
        "valid": r.is_valid(),
        "convex": r.convex,
        "vertices": r.vertices.iter().map(|v| json!({
            "index": v.index,
            "consistent": v.consistent,
            "contained": v.contained,
            "disjoint": v.disjoint,
            "notes": v.notes,
        })).collect::<Vec<_>>(),
    })
}

pub fn record_json(r: &MutationRecord) -> Value {
    json!({
        "vertex": r.vertex,
        "order": r.order,
        "sheared": r.sheared,
        "exponent": r.exponent,
        "new_vertex": jpoint(&r.new_vertex),
        "new_vertex_index": r.new_vertex_index,
        "index_map": r.index_map,
    })
}

pub fn stc_report_json(r: &StcReport) -> Value {
    json!({
        "valid": r.is_valid(),
        "host_valid": r.host_valid,
        "conditions": r.conditions.iter().map(|c| json!({
            "id": c.id,
            "name": c.name,
            "pass": c.pass,
            "notes": c.notes,
        })).collect::<Vec<_>>(),
    })
}

pub fn triple_json(t: &MarkovTriple) -> [JInt; 3] {
    [JInt(t.0[0].clone()), JInt(t.0[1].clone()), JInt(t.0[2].clone())]
}

/// `a + b sqrt(d)` with its floating value.
pub fn surd_json(s: &QuadraticSurd) -> Value {
    json!({ "a": rat(&s.a), "b": rat(&s.b), "d": JInt(s.d.clone()), "value": s.to_f64(), "text": s.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use atf_core::tropical::build_edge_tripod;

    #[test]
    fn accepts_plain_integers() {
        let a: AtbdJson = serde_json::from_str(
            r#"{"vertices":[[[-1,1],[-1,1]],[[2,1],[-1,1]],[[-1,1],[2,1]]],"cuts":[{"direction":[1,1],"nodes":1},{"direction":["-2","1"],"nodes":1},{"direction":[1,-2],"nodes":1}]}"#,
        )
        .unwrap();
        let b = a.to_base().unwrap();
        assert_eq!(b, ManifoldPreset::get(PresetName::Cp2).initial_base);
        let c: AtbdJson = serde_json::from_str(
            r#"{"vertices":[[-1,"-1"],["2/1",-1],[-1,2]],"cuts":[{"direction":[1,1],"nodes":1},{"direction":[-2,1],"nodes":1},{"direction":[1,-2],"nodes":1}]}"#,
        )
        .unwrap();
        assert_eq!(c.to_base().unwrap(), b);
    }

    #[test]
    fn round_trips_are_byte_identical() {
        for p in ManifoldPreset::all() {
            let text = serde_json::to_string(&AtbdJson::from_base(&p.initial_base.with_explicit_positions().unwrap())).unwrap();
            let back: AtbdJson = serde_json::from_str(&text).unwrap();
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
            assert_eq!(AtbdJson::from_base(&back.to_base().unwrap()), back);
        }
        let p = ManifoldPreset::get(PresetName::Cp2);
        let g = build_edge_tripod(&p.markov, &MarkovTriple::new(1, 5, 2)).unwrap();
        let text = serde_json::to_string(&StcJson::from_graph(&g)).unwrap();
        let back: StcJson = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert_eq!(back.to_graph(None).unwrap(), g);
    }

    #[test]
    fn rejects_zero_denominators() {
        assert!(serde_json::from_str::<JRat>(r#"["1","0"]"#).is_err());
        assert!(serde_json::from_str::<JInt>(r#""x""#).is_err());
    }
}
