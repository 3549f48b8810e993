//! Condition-by-condition validator for tropical graphs.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Attachment, TropicalEdge, TropicalGraph, VertexKind};
use crate::error::{Error, Result};
use crate::lattice::{
    direction_of, dot, dot_qi, on_segment, segment_intersection, shear_power, wedge, LatticeVector, PlanePoint,
};

/// Outcome of one condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub id: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Outcome of [`validate_stc`], conditions in order `i` to `ix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StcReport {
    pub conditions: Vec<Condition>,
    /// Whether the host base itself validates.
    pub host_valid: bool,
}

impl StcReport {
    pub fn is_valid(&self) -> bool {
        self.host_valid && self.conditions.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.conditions.iter().filter(|c| !c.pass).map(|c| c.id).collect()
    }

    pub fn condition(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

struct Checker {
    conditions: Vec<Condition>,
}

impl Checker {
    fn new() -> Self {
        let names = [
            ("i", "valence"),
            ("ii", "boundary vertices are tails"),
            ("iii", "vertex positions"),
            ("iv", "embeddedness"),
            ("v", "segments pair positively with the class"),
            ("vi", "side leaves are inward normal"),
            ("vii", "node leaves are orthogonal to the cut"),
            ("viii", "bending by monodromy"),
            ("ix", "balancing"),
        ];
        Self {
            conditions: names
                .iter()
                .map(|&(id, name)| Condition { id, name, pass: true, notes: Vec::new() })
                .collect(),
        }
    }

    fn fail(&mut self, id: &str, note: String) {
        let c = self.conditions.iter_mut().find(|c| c.id == id).expect("known condition");
        c.pass = false;
        c.notes.push(note);
    }
}

fn primitive_inward_normal(g: &TropicalGraph, side: usize) -> Option<LatticeVector> {
    let d = g.host.edge(side);
    direction_of(&PlanePoint::new(-d.y.clone(), d.x.clone())).map(|(w, _)| w)
}

fn check_shape(g: &TropicalGraph) -> Result<()> {
    let n = g.vertices.len();
    for (k, e) in g.edges.iter().enumerate() {
        if e.tail >= n || e.head >= n {
            return Err(Error::Malformed(format!("edge {k} has a dangling endpoint")));
        }
        if e.polyline.len() < 2 {
            return Err(Error::Malformed(format!("edge {k} needs at least two polyline points")));
        }
        if e.polyline[0] != g.vertices[e.tail].position || e.polyline.last() != Some(&g.vertices[e.head].position) {
            return Err(Error::Malformed(format!("edge {k}: polyline does not join its endpoints")));
        }
        if e.multiplicity == 0 {
            return Err(Error::Malformed(format!("edge {k} has multiplicity 0")));
        }
    }
    Ok(())
}

/// Checks every condition on a tropical graph and reports each separately.
///
/// Dangling edges and polylines not joining their endpoints are malformed input errors.
pub fn validate_stc(g: &TropicalGraph) -> Result<StcReport> {
    check_shape(g)?;
    let host_valid = crate::atbd::validate(&g.host)?.is_valid();
    let mut ck = Checker::new();
    let base = &g.host;
    let incident: Vec<Vec<usize>> = (0..g.vertices.len()).map(|v| g.incident(v)).collect();

    let mut cut_segments = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        cut_segments.push(base.cut_segment(i)?);
    }

    // (i), (ii), (iii)
    for (v, vx) in g.vertices.iter().enumerate() {
        let valence = incident[v].len();
        let expected = match vx.kind {
            VertexKind::Boundary => 1,
            VertexKind::Bending => 2,
            VertexKind::Interior => 3,
        };
        if valence != expected {
            ck.fail("i", format!("vertex {v} ({:?}) has valence {valence}", vx.kind));
        }
        let attachment_ok = matches!(
            (vx.kind, &vx.attachment),
            (VertexKind::Boundary, Attachment::Side(_) | Attachment::Node { .. })
                | (VertexKind::Bending, Attachment::Cut(_))
                | (VertexKind::Interior, Attachment::Free)
        );
        if !attachment_ok {
            ck.fail("i", format!("vertex {v} has attachment {:?} for kind {:?}", vx.attachment, vx.kind));
        }
        if vx.kind == VertexKind::Boundary && incident[v].iter().any(|&e| g.edges[e].tail != v) {
            ck.fail("ii", format!("boundary vertex {v} is not the tail of its edge"));
        }
        let p = &vx.position;
        match &vx.attachment {
            Attachment::Side(s) => {
                if *s >= base.len() || !on_segment(&base.vertices[*s], &base.vertices[(*s + 1) % base.len()], p) {
                    ck.fail("iii", format!("vertex {v} is not on side {s}"));
                }
            }
            Attachment::Node { vertex, node } => {
                let at = if *vertex < base.len() { base.node_point(*vertex, *node).ok() } else { None };
                if at.as_ref() != Some(p) {
                    ck.fail("iii", format!("vertex {v} is not at node {node} of vertex {vertex}"));
                }
            }
            Attachment::Cut(c) => {
                let ok = *c < base.len()
                    && cut_segments[*c].as_ref().is_some_and(|(a, b)| on_segment(a, b, p))
                    && *p != base.vertices[*c]
                    && (0..base.cuts[*c].nodes as usize).all(|k| base.node_point(*c, k).ok().as_ref() != Some(p));
                if !ok {
                    ck.fail("iii", format!("vertex {v} is not in the open part of cut {c}"));
                }
            }
            Attachment::Free => {
                let on_cut = cut_segments.iter().flatten().any(|(a, b)| on_segment(a, b, p));
                if !base.contains_strictly(p) || on_cut {
                    ck.fail("iii", format!("interior vertex {v} is not in the regular interior"));
                }
            }
        }
    }

    // (iv) embeddedness, containment and cut crossings only at bending vertices
    for (k, e) in g.edges.iter().enumerate() {
        let segs: Vec<(&PlanePoint, &PlanePoint)> = e.polyline.windows(2).map(|w| (&w[0], &w[1])).collect();
        if segs.iter().any(|(a, b)| a == b) {
            ck.fail("iv", format!("edge {k} has a repeated polyline point"));
        }
        if e.polyline.iter().any(|p| !base.contains(p)) {
            ck.fail("iv", format!("edge {k} leaves the base"));
        }
        for a in 0..segs.len() {
            for b in (a + 2)..segs.len() {
                if !segment_intersection(segs[a].0, segs[a].1, segs[b].0, segs[b].1).is_empty() {
                    ck.fail("iv", format!("edge {k} intersects itself"));
                }
            }
        }
        for (c, seg) in cut_segments.iter().enumerate() {
            let Some((ca, cb)) = seg else { continue };
            for (a, b) in &segs {
                for x in segment_intersection(a, b, ca, cb) {
                    let allowed = [e.tail, e.head].iter().any(|&v| {
                        g.vertices[v].position == x
                            && matches!(g.vertices[v].attachment,
                                Attachment::Cut(i) | Attachment::Node { vertex: i, .. } if i == c)
                    }) || (x == base.vertices[c] && matches!(g.vertices[e.tail].attachment, Attachment::Side(_)));
                    if !allowed {
                        ck.fail("iv", format!("edge {k} meets cut {c} away from a bending vertex"));
                    }
                }
            }
        }
    }
    for a in 0..g.edges.len() {
        for b in (a + 1)..g.edges.len() {
            let (ea, eb) = (&g.edges[a], &g.edges[b]);
            let shared: Vec<&PlanePoint> = [ea.tail, ea.head]
                .iter()
                .filter(|v| **v == eb.tail || **v == eb.head)
                .map(|&v| &g.vertices[v].position)
                .collect();
            'outer: for sa in ea.polyline.windows(2) {
                for sb in eb.polyline.windows(2) {
                    for x in segment_intersection(&sa[0], &sa[1], &sb[0], &sb[1]) {
                        if !shared.contains(&&x) {
                            ck.fail("iv", format!("edges {a} and {b} intersect"));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }

    // (v)
    for (k, e) in g.edges.iter().enumerate() {
        for w in e.polyline.windows(2) {
            if !dot_qi(&w[1].sub(&w[0]), &e.class).is_positive() {
                ck.fail("v", format!("edge {k}: a segment pairs non-positively with class {}", e.class));
                break;
            }
        }
        if !e.class.is_primitive() {
            ck.fail("v", format!("edge {k}: class {} is not primitive", e.class));
        }
    }

    // (vi), (vii)
    for (v, vx) in g.vertices.iter().enumerate() {
        let Some(&e) = incident[v].first() else { continue };
        let class = &g.edges[e].class;
        match &vx.attachment {
            Attachment::Side(s) if *s < base.len() && primitive_inward_normal(g, *s).as_ref() != Some(class) => {
                ck.fail("vi", format!("leaf at vertex {v} has class {class}, not the inward normal of side {s}"));
            }
            Attachment::Node { vertex, .. } if *vertex < base.len() && !dot(class, &base.cuts[*vertex].direction).is_zero() => {
                ck.fail("vii", format!("leaf at vertex {v} is not orthogonal to cut {vertex}"));
            }
            _ => {}
        }
    }

    // (viii)
    for (v, vx) in g.vertices.iter().enumerate() {
        let Attachment::Cut(c) = vx.attachment else { continue };
        if c >= base.len() || vx.kind != VertexKind::Bending {
            continue;
        }
        let inc: Vec<&TropicalEdge> = incident[v].iter().map(|&e| &g.edges[e]).collect();
        let (Some(ein), Some(eout)) = (inc.iter().find(|e| e.head == v), inc.iter().find(|e| e.tail == v)) else {
            ck.fail("viii", format!("bending vertex {v} needs one incoming and one outgoing edge"));
            continue;
        };
        let cut = &base.cuts[c];
        let (_, t) = direction_of(&vx.position.sub(&base.vertices[c])).unwrap_or((cut.direction.clone(), Default::default()));
        let beyond = base.node_positions(c)?.iter().filter(|r| **r > t).count();
        let m = shear_power(&cut.direction, &BigInt::from(beyond))?;
        let n = ein.polyline.len();
        let u = direction_of(&ein.polyline[n - 1].sub(&ein.polyline[n - 2])).map(|(d, _)| d).unwrap_or_else(LatticeVector::zero);
        let mt = m.transpose();
        let expected = if wedge(&cut.direction, &u).is_negative() { mt.inverse().apply(&ein.class) } else { mt.apply(&ein.class) };
        if expected != eout.class {
            ck.fail("viii", format!("bending vertex {v}: class {} should become {expected}, got {}", ein.class, eout.class));
        }
        if ein.multiplicity != eout.multiplicity {
            ck.fail("viii", format!("bending vertex {v} changes multiplicity"));
        }
    }

    // (ix)
    for (v, vx) in g.vertices.iter().enumerate() {
        if vx.kind != VertexKind::Interior {
            continue;
        }
        let mut sum = LatticeVector::zero();
        for &e in &incident[v] {
            let ed = &g.edges[e];
            let term = ed.class.scale(&BigInt::from(ed.multiplicity));
            sum = if ed.head == v { sum.add(&term) } else { sum.sub(&term) };
        }
        if !sum.is_zero() {
            ck.fail("ix", format!("interior vertex {v} has residual {sum}"));
        }
    }

    Ok(StcReport { conditions: ck.conditions, host_valid })
}

/// Sum of multiplicities of leaves ending on a side of the base.
pub fn anticanonical_intersection(g: &TropicalGraph) -> Result<u64> {
    check_shape(g)?;
    Ok(g
        .edges
        .iter()
        .filter(|e| matches!(g.vertices[e.tail].attachment, Attachment::Side(_)) && g.vertices[e.tail].kind == VertexKind::Boundary)
        .map(|e| e.multiplicity)
        .sum())
}

/// Balancing residual at an interior vertex.
pub fn balancing_residual(g: &TropicalGraph, v: usize) -> LatticeVector {
    let mut sum = LatticeVector::zero();
    for e in g.incident(v) {
        let ed = &g.edges[e];
        let term = ed.class.scale(&BigInt::from(ed.multiplicity));
        sum = if ed.head == v { sum.add(&term) } else { sum.sub(&term) };
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::super::{TropicalVertex, TropicalGraph};
    use super::*;
    use crate::atbd::{point, qpoint, AlmostToricBase, CutContent};
    use crate::lattice::rat;

    /// Toric triangle with smooth corners traded at distance 0 and a line tripod.
    pub(crate) fn toric_line() -> TropicalGraph {
        let host = AlmostToricBase::new(
            vec![point(0, 0), point(3, 0), point(0, 3)],
            vec![
                CutContent::with_positions(LatticeVector::new(1, 1), vec![rat(0, 1)]),
                CutContent::with_positions(LatticeVector::new(-2, 1), vec![rat(0, 1)]),
                CutContent::with_positions(LatticeVector::new(1, -2), vec![rat(0, 1)]),
            ],
        )
        .unwrap();
        let vx = |p: PlanePoint, kind, attachment| TropicalVertex { kind, position: p, attachment };
        let vertices = vec![
            vx(point(1, 1), VertexKind::Interior, Attachment::Free),
            vx(point(1, 0), VertexKind::Boundary, Attachment::Side(0)),
            vx(qpoint((3, 2), (3, 2)), VertexKind::Boundary, Attachment::Side(1)),
            vx(point(0, 1), VertexKind::Boundary, Attachment::Side(2)),
        ];
        let leaf = |tail: usize, class: (i64, i64)| TropicalEdge {
            tail,
            head: 0,
            polyline: vec![vertices[tail].position.clone(), point(1, 1)],
            class: LatticeVector::new(class.0, class.1),
            multiplicity: 1,
        };
        let edges = vec![leaf(1, (0, 1)), leaf(2, (-1, -1)), leaf(3, (1, 0))];
        TropicalGraph { vertices, edges, host }
    }

    #[test]
    fn toric_line_is_valid() {
        let g = toric_line();
        let r = validate_stc(&g).unwrap();
        assert!(r.is_valid(), "{:?}", r);
        assert_eq!(anticanonical_intersection(&g).unwrap(), 3);
        assert!(balancing_residual(&g, 0).is_zero());
    }

    #[test]
    fn doubled_multiplicity_breaks_balancing_only() {
        let mut g = toric_line();
        g.edges[0].multiplicity = 2;
        assert_eq!(validate_stc(&g).unwrap().failed(), vec!["ix"]);
    }

    #[test]
    fn rotated_leaf_breaks_normal_condition() {
        let mut g = toric_line();
        g.edges[0].class = LatticeVector::new(1, 1);
        assert!(validate_stc(&g).unwrap().failed().contains(&"vi"));
    }

    #[test]
    fn boundary_head_breaks_orientation() {
        let mut g = toric_line();
        let e = &mut g.edges[0];
        std::mem::swap(&mut e.tail, &mut e.head);
        e.polyline.reverse();
        e.class = e.class.neg();
        assert!(validate_stc(&g).unwrap().failed().contains(&"ii"));
    }

    #[test]
    fn dangling_edges_are_malformed() {
        let mut g = toric_line();
        g.edges[0].head = 9;
        assert!(matches!(validate_stc(&g), Err(Error::Malformed(_))));
    }

    #[test]
    fn disjoint_union_adds_intersections() {
        let g = toric_line();
        let mut h = toric_line();
        for e in &mut h.edges {
            e.multiplicity = 2;
        }
        assert_eq!(anticanonical_intersection(&g.union(&h).unwrap()).unwrap(), 9);
        let empty = TropicalGraph { vertices: vec![], edges: vec![], host: g.host.clone() };
        assert_eq!(anticanonical_intersection(&empty).unwrap(), 0);
    }

    #[test]
    fn bending_follows_the_monodromy() {
        use crate::atbd::validate;
        let host = AlmostToricBase::monotone(vec![point(-1, -1), point(2, -1), point(-1, 2)], &[1, 1, 1]).unwrap();
        assert!(validate(&host).unwrap().is_valid());
        // cut of vertex 1 runs from (2,-1) along (-2,1); its node sits at parameter 3/16
        let c = LatticeVector::new(-2, 1);
        let bend = host.vertices[1].along(&c, &rat(1, 16));
        let before = bend.add(&PlanePoint::new(rat(0, 1), rat(-1, 32)));
        let m = shear_power(&c, &BigInt::from(1)).unwrap();
        let u = LatticeVector::new(0, 1);
        let w1 = LatticeVector::new(0, 1);
        // crossing upward: c ^ u = -2 < 0
        let w2 = m.transpose().inverse().apply(&w1);
        let after = bend.add(&m.apply(&u).to_point().scale(&rat(1, 16)));
        let vx = |p: PlanePoint, kind, attachment| TropicalVertex { kind, position: p, attachment };
        let g = TropicalGraph {
            vertices: vec![
                vx(before.clone(), VertexKind::Interior, Attachment::Free),
                vx(bend.clone(), VertexKind::Bending, Attachment::Cut(1)),
                vx(after.clone(), VertexKind::Interior, Attachment::Free),
            ],
            edges: vec![
                TropicalEdge { tail: 0, head: 1, polyline: vec![before, bend.clone()], class: w1, multiplicity: 1 },
                TropicalEdge { tail: 1, head: 2, polyline: vec![bend, after], class: w2.clone(), multiplicity: 1 },
            ],
            host,
        };
        let r = validate_stc(&g).unwrap();
        assert!(r.condition("viii").unwrap().pass, "{:?}", r.condition("viii"));
        assert!(r.condition("v").unwrap().pass, "{:?}", r.condition("v"));
        let mut bad = g.clone();
        bad.edges[1].class = LatticeVector::new(0, 1);
        bad.edges[1].polyline[1] = bad.edges[1].polyline[0].add(&point(0, 1).scale(&rat(1, 16)));
        bad.vertices[2].position = bad.edges[1].polyline[1].clone();
        assert!(!validate_stc(&bad).unwrap().condition("viii").unwrap().pass);
        assert_ne!(w2, LatticeVector::new(0, 1));
    }
}
