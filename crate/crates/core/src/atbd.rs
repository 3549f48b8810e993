//! Almost-toric base diagrams: polygons with cut content, validation, mutation and canonical form.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    affine_length, direction_of, dot_qi, int, positively_parallel, rat, segments_intersect,
    shear_power, wedge, wedge_q, LatticeVector, PlanePoint, Rational, UnimodularMatrix,
};

/// Fraction of the ray length used for default node placement.
pub fn default_cut_fraction() -> Rational {
    rat(1, 4)
}

/// Cut direction, node count and optional node positions at one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutContent {
    /// Primitive direction pointing into the polygon.
    pub direction: LatticeVector,
    /// Number of nodes on the cut.
    pub nodes: u64,
    /// Ray parameters of the nodes, strictly decreasing; defaulted when absent.
    pub positions: Option<Vec<Rational>>,
}

impl CutContent {
    pub fn new(direction: LatticeVector, nodes: u64) -> Self {
        Self { direction, nodes, positions: None }
    }

    pub fn with_positions(direction: LatticeVector, positions: Vec<Rational>) -> Self {
        Self { direction, nodes: positions.len() as u64, positions: Some(positions) }
    }
}

/// Rational convex polygon in counter-clockwise order with one cut content per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlmostToricBase {
    pub vertices: Vec<PlanePoint>,
    pub cuts: Vec<CutContent>,
}

/// Base with marked sides and marked cut segments between consecutive nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeBase {
    pub base: AlmostToricBase,
    pub marked_sides: BTreeSet<usize>,
    /// `(vertex, segment)` where segment `s` joins nodes `s` and `s + 1`.
    pub marked_cut_segments: BTreeSet<(usize, usize)>,
}

impl RelativeBase {
    /// Checks that marked sides exist and marked segments sit between two nodes.
    pub fn check(&self) -> Result<()> {
        let n = self.base.len();
        if let Some(s) = self.marked_sides.iter().find(|&&s| s >= n) {
            return Err(Error::Malformed(format!("marked side {s} out of range")));
        }
        for &(v, s) in &self.marked_cut_segments {
            if v >= n {
                return Err(Error::Malformed(format!("marked cut segment at vertex {v} out of range")));
            }
            if (s as u64) + 1 >= self.base.cuts[v].nodes {
                return Err(Error::Malformed(format!("vertex {v} has no cut segment {s}")));
            }
        }
        Ok(())
    }
}

/// Per-vertex validation outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexReport {
    pub index: usize,
    pub consistent: bool,
    pub contained: bool,
    pub disjoint: bool,
    pub notes: Vec<String>,
}

impl VertexReport {
    pub fn ok(&self) -> bool {
        self.consistent && self.contained && self.disjoint
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub convex: bool,
    pub vertices: Vec<VertexReport>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.convex && self.vertices.iter().all(VertexReport::ok)
    }

    /// One line per failing check.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.convex {
            out.push("polygon is not strictly convex and counter-clockwise".to_string());
        }
        for v in &self.vertices {
            for note in &v.notes {
                out.push(format!("vertex {}: {}", v.index, note));
            }
        }
        out
    }
}

/// Which half of the polygon received the shear in a mutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationRecord {
    pub vertex: usize,
    pub order: u64,
    /// Old indices of the vertices in the sheared half.
    pub sheared: Vec<usize>,
    /// Exponent applied to the shear about the cut direction.
    pub exponent: i64,
    /// Exit point of the cut ray.
    pub new_vertex: PlanePoint,
    /// Index of the exit point in the mutated base.
    pub new_vertex_index: usize,
    /// Old index to new index; `None` for vertices removed as collinear.
    pub index_map: Vec<Option<usize>>,
}

impl AlmostToricBase {
    /// Builds a base, checking only the shape of the data.
    pub fn new(vertices: Vec<PlanePoint>, cuts: Vec<CutContent>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Malformed(format!("need at least 3 vertices, got {}", vertices.len())));
        }
        if vertices.len() != cuts.len() {
            return Err(Error::Malformed(format!("{} vertices but {} cuts", vertices.len(), cuts.len())));
        }
        for (i, c) in cuts.iter().enumerate() {
            if let Some(p) = &c.positions {
                if p.len() as u64 != c.nodes {
                    return Err(Error::Malformed(format!(
                        "vertex {i}: {} positions for {} nodes",
                        p.len(),
                        c.nodes
                    )));
                }
            }
        }
        Ok(Self { vertices, cuts })
    }

    /// Polygon `conv(vertices)` where every cut is `-v` made primitive, with the given node counts.
    pub fn monotone(vertices: Vec<PlanePoint>, nodes: &[u64]) -> Result<Self> {
        let cuts = vertices
            .iter()
            .zip(nodes)
            .map(|(v, &n)| {
                let (d, _) = direction_of(&PlanePoint::origin().sub(v)).ok_or(Error::ZeroVector)?;
                Ok(CutContent::new(d, n))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, cuts)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { index: i, len: self.len() })
        }
    }

    /// Edge vector from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> PlanePoint {
        self.vertices[self.next(i)].sub(&self.vertices[i])
    }

    /// Euclidean area by the shoelace formula.
    pub fn area(&self) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.len() {
            acc += wedge_q(&self.vertices[i], &self.vertices[self.next(i)]);
        }
        acc / rat(2, 1)
    }

    /// Whether every corner turns strictly left.
    pub fn is_strictly_convex_ccw(&self) -> bool {
        (0..self.len()).all(|i| wedge_q(&self.edge(self.prev(i)), &self.edge(i)).is_positive())
    }

    /// Whether `p` lies in the closed polygon.
    pub fn contains(&self, p: &PlanePoint) -> bool {
        (0..self.len()).all(|j| !wedge_q(&self.edge(j), &p.sub(&self.vertices[j])).is_negative())
    }

    /// Whether `p` lies in the open interior.
    pub fn contains_strictly(&self, p: &PlanePoint) -> bool {
        (0..self.len()).all(|j| wedge_q(&self.edge(j), &p.sub(&self.vertices[j])).is_positive())
    }

    /// Parameter `λ` at which the ray `v_i + t c_i` leaves the polygon.
    pub fn exit_parameter(&self, i: usize) -> Result<Rational> {
        self.check_index(i)?;
        let c = &self.cuts[i].direction;
        let v = &self.vertices[i];
        let mut best: Option<Rational> = None;
        for j in 0..self.len() {
            let d = self.edge(j);
            let inward = PlanePoint::new(-d.y.clone(), d.x.clone());
            let slope = dot_qi(&inward, c);
            let offset = crate::lattice::dot_q(&inward, &v.sub(&self.vertices[j]));
            if j == i || self.next(j) == i {
                if !slope.is_positive() {
                    return Err(Error::CutNotInward(i));
                }
                continue;
            }
            if slope.is_negative() {
                let t = offset / (-slope);
                if best.as_ref().is_none_or(|b| &t < b) {
                    best = Some(t);
                }
            }
        }
        best.filter(|t| t.is_positive()).ok_or(Error::CutNotInward(i))
    }

    /// Effective node positions at vertex `i`, defaulted when absent.
    pub fn node_positions(&self, i: usize) -> Result<Vec<Rational>> {
        self.check_index(i)?;
        let cut = &self.cuts[i];
        if let Some(p) = &cut.positions {
            return Ok(p.clone());
        }
        if cut.nodes == 0 {
            return Ok(Vec::new());
        }
        let lambda = self.exit_parameter(i)?;
        let n = cut.nodes as i64;
        Ok((1..=n)
            .map(|j| default_cut_fraction() * rat(n - j + 1, n + 1) * &lambda)
            .collect())
    }

    /// Position of node `j` (0-based, outermost first) on the cut of vertex `i`.
    pub fn node_point(&self, i: usize, j: usize) -> Result<PlanePoint> {
        let pos = self.node_positions(i)?;
        let r = pos
            .get(j)
            .ok_or_else(|| Error::Malformed(format!("vertex {i} has no node {j}")))?;
        Ok(self.vertices[i].along(&self.cuts[i].direction, r))
    }

    /// Cut segment from the vertex to its outermost node, if the vertex carries nodes.
    pub fn cut_segment(&self, i: usize) -> Result<Option<(PlanePoint, PlanePoint)>> {
        let pos = self.node_positions(i)?;
        Ok(pos
            .first()
            .map(|r| (self.vertices[i].clone(), self.vertices[i].along(&self.cuts[i].direction, r))))
    }

    /// Copy with every explicit node position replaced by its value.
    pub fn with_explicit_positions(&self) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..self.len() {
            out.cuts[i].positions = Some(self.node_positions(i)?);
        }
        Ok(out)
    }

    /// Nodal slide of every node to its default position.
    pub fn with_default_positions(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.cuts {
            c.positions = None;
        }
        out
    }

    /// Nodal slide spreading the nodes of each cut over the first half of the segment to `center`.
    ///
    /// Every cut carrying nodes must point at `center`.
    pub fn with_positions_toward(&self, center: &PlanePoint) -> Result<Self> {
        let mut out = self.clone();
        for (i, cut) in out.cuts.iter_mut().enumerate() {
            if cut.nodes == 0 {
                cut.positions = Some(Vec::new());
                continue;
            }
            let (d, t) = direction_of(&center.sub(&self.vertices[i]))
                .ok_or_else(|| Error::Inconsistent(format!("vertex {i} sits at the center")))?;
            if d != cut.direction {
                return Err(Error::Inconsistent(format!("cut of vertex {i} does not point at the center")));
            }
            let n = cut.nodes as i64;
            cut.positions = Some((1..=n).map(|j| rat(n - j + 1, 2 * (n + 1)) * &t).collect());
        }
        Ok(out)
    }

    /// Determinant of the primitive edge directions at vertex `i`.
    pub fn corner_determinant(&self, i: usize) -> Result<BigInt> {
        self.check_index(i)?;
        let v = &self.vertices[i];
        let a = direction_of(&self.vertices[self.prev(i)].sub(v)).ok_or(Error::ZeroVector)?.0;
        let b = direction_of(&self.vertices[self.next(i)].sub(v)).ok_or(Error::ZeroVector)?.0;
        Ok(wedge(&a, &b).abs())
    }

    /// Corner determinants of all vertices.
    pub fn corner_determinants(&self) -> Result<Vec<BigInt>> {
        (0..self.len()).map(|i| self.corner_determinant(i)).collect()
    }

    /// Applies `x -> m x + t` to vertices and `m` to cut directions.
    pub fn transformed(&self, m: &UnimodularMatrix, t: &PlanePoint) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| m.apply_point(v).add(t)).collect(),
            cuts: self
                .cuts
                .iter()
                .map(|c| CutContent { direction: m.apply(&c.direction), ..c.clone() })
                .collect(),
        }
    }
}

/// Checks convexity, the shear consistency condition, cut containment and cut disjointness.
pub fn validate(base: &AlmostToricBase) -> Result<ValidationReport> {
    let base = AlmostToricBase::new(base.vertices.clone(), base.cuts.clone())?;
    let n = base.len();
    let convex = base.is_strictly_convex_ccw();
    let mut reports: Vec<VertexReport> = (0..n)
        .map(|index| VertexReport { index, consistent: true, contained: true, disjoint: true, notes: Vec::new() })
        .collect();
    let mut segments: Vec<Option<(PlanePoint, PlanePoint)>> = vec![None; n];

    for (i, rep) in reports.iter_mut().enumerate() {
        let cut = &base.cuts[i];
        if !cut.direction.is_primitive() {
            rep.consistent = false;
            rep.contained = false;
            rep.notes.push(format!("cut direction {} is not primitive", cut.direction));
            continue;
        }
        let m = shear_power(&cut.direction, &BigInt::from(cut.nodes))?;
        let e_prev = base.edge(base.prev(i));
        let e_next = base.edge(i);
        if !positively_parallel(&m.apply_point(&e_prev), &e_next) {
            rep.consistent = false;
            rep.notes.push(format!(
                "shear^{} about {} does not carry the incoming edge onto the outgoing edge",
                cut.nodes, cut.direction
            ));
        }
        if cut.nodes == 0 {
            continue;
        }
        if !convex {
            rep.contained = false;
            rep.notes.push("containment not checked on a non-convex polygon".to_string());
            continue;
        }
        let lambda = match base.exit_parameter(i) {
            Ok(l) => l,
            Err(_) => {
                rep.contained = false;
                rep.notes.push(format!("cut direction {} does not point inward", cut.direction));
                continue;
            }
        };
        let pos = base.node_positions(i)?;
        let decreasing = pos.windows(2).all(|w| w[0] > w[1]);
        let nonneg = pos.iter().all(|r| !r.is_negative());
        if !decreasing || !nonneg {
            rep.contained = false;
            rep.notes.push("node positions are not strictly decreasing and non-negative".to_string());
        }
        if pos[0] >= lambda {
            rep.contained = false;
            rep.notes.push(format!("outermost node at {} is not inside (ray exits at {})", pos[0], lambda));
        }
        segments[i] = base.cut_segment(i)?;
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if let (Some((a1, a2)), Some((b1, b2))) = (&segments[i], &segments[j]) {
                if segments_intersect(a1, a2, b1, b2) {
                    reports[i].disjoint = false;
                    reports[j].disjoint = false;
                    reports[i].notes.push(format!("cut meets the cut of vertex {j}"));
                    reports[j].notes.push(format!("cut meets the cut of vertex {i}"));
                }
            }
        }
    }
    Ok(ValidationReport { convex, vertices: reports })
}

enum Exit {
    /// Open edge from the given vertex to the next.
    Edge(usize),
    Vertex(usize),
}

/// Mutation of order `k` at vertex `i`: split along the cut ray and shear the half after `v_i`.
///
/// Node positions are carried literally: the `k` outermost nodes move to the exit point
/// keeping their location in the plane. All positions of the result are explicit.
pub fn mutate(base: &AlmostToricBase, i: usize, k: u64) -> Result<(AlmostToricBase, MutationRecord)> {
    base.check_index(i)?;
    let n = base.len();
    let cut = &base.cuts[i];
    if k == 0 || k > cut.nodes {
        return Err(Error::OrderOutOfRange { vertex: i, order: k, nodes: cut.nodes });
    }
    if !cut.direction.is_primitive() {
        return Err(Error::NotPrimitive(cut.direction.to_string()));
    }
    let c = cut.direction.clone();
    let lambda = base.exit_parameter(i)?;
    let vi = base.vertices[i].clone();
    let tilde = vi.along(&c, &lambda);

    let exit = match (0..n).find(|&j| j != i && base.vertices[j] == tilde) {
        Some(h) => Exit::Vertex(h),
        None => {
            let j = (0..n)
                .find(|&j| {
                    j != i
                        && base.next(j) != i
                        && crate::lattice::on_segment(&base.vertices[j], &base.vertices[base.next(j)], &tilde)
                })
                .ok_or_else(|| Error::Inconsistent(format!("ray from vertex {i} has no exit edge")))?;
            Exit::Edge(j)
        }
    };
    let hit = match exit {
        Exit::Vertex(h) => {
            if base.cuts[h].direction != c.neg() {
                return Err(Error::IncompatibleCut { vertex: i, hit: h });
            }
            Some(h)
        }
        Exit::Edge(_) => None,
    };

    for j in 0..n {
        if j == i || Some(j) == hit {
            continue;
        }
        if let Some((a, b)) = base.cut_segment(j)? {
            if segments_intersect(&a, &b, &vi, &tilde) {
                return Err(Error::RayCrossesCut { vertex: i, other: j });
            }
        }
    }

    // Vertices strictly after v_i up to the exit, in counter-clockwise order.
    let last = match exit {
        Exit::Edge(j) => j,
        Exit::Vertex(h) => (h + n - 1) % n,
    };
    let mut sheared = Vec::new();
    let mut idx = base.next(i);
    if !(matches!(exit, Exit::Vertex(h) if h == idx)) {
        loop {
            sheared.push(idx);
            if idx == last {
                break;
            }
            idx = base.next(idx);
        }
    }

    let exponent = -(k as i64);
    let m = shear_power(&c, &BigInt::from(exponent))?;
    let positions: Vec<Vec<Rational>> = (0..n).map(|j| base.node_positions(j)).collect::<Result<_>>()?;

    let transferred: Vec<Rational> = positions[i][..k as usize].iter().rev().map(|r| &lambda - r).collect();
    let remaining: Vec<Rational> = positions[i][k as usize..].to_vec();

    let mut verts: Vec<PlanePoint> = Vec::with_capacity(n + 1);
    let mut cuts: Vec<CutContent> = Vec::with_capacity(n + 1);
    let mut map: Vec<Option<usize>> = vec![None; n];
    let mut new_vertex_index = 0;
    for j in 0..n {
        let mut cut_j = CutContent::with_positions(base.cuts[j].direction.clone(), positions[j].clone());
        let mut v = base.vertices[j].clone();
        if sheared.contains(&j) {
            v = vi.add(&m.apply_point(&v.sub(&vi)));
            cut_j.direction = m.apply(&cut_j.direction);
        }
        if j == i {
            cut_j = CutContent::with_positions(c.clone(), remaining.clone());
        }
        if Some(j) == hit {
            let mut merged = positions[j].clone();
            merged.extend(transferred.iter().cloned());
            merged.sort_by(|a, b| b.cmp(a));
            if merged.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Inconsistent(format!("nodes collide at vertex {j}")));
            }
            cut_j = CutContent::with_positions(cut_j.direction, merged);
            new_vertex_index = verts.len();
        }
        map[j] = Some(verts.len());
        verts.push(v);
        cuts.push(cut_j);
        if let Exit::Edge(e) = exit {
            if e == j {
                new_vertex_index = verts.len();
                verts.push(tilde.clone());
                cuts.push(CutContent::with_positions(c.neg(), transferred.clone()));
            }
        }
    }

    // Drop node-free vertices whose incident edges became collinear.
    let mut keep = vec![true; verts.len()];
    let len = verts.len();
    for j in 0..len {
        let prev = &verts[(j + len - 1) % len];
        let next = &verts[(j + 1) % len];
        let e1 = verts[j].sub(prev);
        let e2 = next.sub(&verts[j]);
        if cuts[j].nodes == 0 && positively_parallel(&e1, &e2) {
            keep[j] = false;
        }
    }
    let mut renumber = vec![None; len];
    let mut out_v = Vec::new();
    let mut out_c = Vec::new();
    for j in 0..len {
        if keep[j] {
            renumber[j] = Some(out_v.len());
            out_v.push(verts[j].clone());
            out_c.push(cuts[j].clone());
        }
    }
    let index_map = map.iter().map(|m| m.and_then(|t| renumber[t])).collect();
    let new_vertex_index = renumber[new_vertex_index]
        .ok_or_else(|| Error::Inconsistent("exit vertex was removed".to_string()))?;
    let out = AlmostToricBase::new(out_v, out_c)?;
    debug_assert_eq!(out.area(), base.area());
    Ok((
        out,
        MutationRecord { vertex: i, order: k, sheared, exponent, new_vertex: tilde, new_vertex_index, index_map },
    ))
}

/// Representative of the base under rational translations and orientation-preserving unimodular maps.
///
/// Every vertex is tried as origin; the map sends the outgoing edge to the positive x-axis
/// and normalises the incoming edge by a horizontal shear. The lexicographically smallest
/// vertex sequence wins, ties broken by cut content. Node positions are made explicit.
pub fn canonical_form(base: &AlmostToricBase) -> Result<AlmostToricBase> {
    let explicit = base.with_explicit_positions()?;
    let n = explicit.len();
    let mut best: Option<AlmostToricBase> = None;
    for s in 0..n {
        let vs = explicit.vertices[s].clone();
        let d1 = direction_of(&explicit.edge(s)).ok_or(Error::ZeroVector)?.0;
        let a1 = UnimodularMatrix::sending_to_e1(&d1)?;
        let back = explicit.vertices[explicit.prev(s)].sub(&vs);
        let d2 = a1.apply(&direction_of(&back).ok_or(Error::ZeroVector)?.0);
        if !d2.y.is_positive() {
            return Err(Error::InvalidBase("polygon is not strictly convex and counter-clockwise".to_string()));
        }
        let t = (num_integer::Integer::mod_floor(&d2.x, &d2.y) - &d2.x) / &d2.y;
        let shear = UnimodularMatrix { a: int(1), b: t, c: int(0), d: int(1) };
        let a = shear.mul(&a1);
        let shift = a.apply_point(&vs);
        let moved = explicit.transformed(&a, &PlanePoint::new(-shift.x, -shift.y));
        let mut vertices = moved.vertices.clone();
        let mut cuts = moved.cuts.clone();
        vertices.rotate_left(s);
        cuts.rotate_left(s);
        let cand = AlmostToricBase { vertices, cuts };
        let better = match &best {
            None => true,
            Some(b) => (&cand.vertices, &cand.cuts) < (&b.vertices, &b.cuts),
        };
        if better {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Malformed("empty base".to_string()))
}

/// Affine lengths `(a, b)`, `a <= b`, of the two sides at a smooth corner of a triangle.
pub fn frozen_corner_ellipsoid(base: &AlmostToricBase, vf: usize) -> Result<(Rational, Rational)> {
    if base.len() != 3 {
        return Err(Error::NotATriangle(base.len()));
    }
    base.check_index(vf)?;
    let det = base.corner_determinant(vf)?;
    if det != int(1) {
        return Err(Error::NonSmoothCorner { index: vf, det: det.to_string() });
    }
    let v = &base.vertices[vf];
    let a = affine_length(v, &base.vertices[base.next(vf)]);
    let b = affine_length(v, &base.vertices[base.prev(vf)]);
    Ok(if a <= b { (a, b) } else { (b, a) })
}

/// Integral point helper used by presets and tests.
pub fn point(x: i64, y: i64) -> PlanePoint {
    PlanePoint::from_ints(x, y)
}

/// Rational point helper.
pub fn qpoint(x: (i64, i64), y: (i64, i64)) -> PlanePoint {
    PlanePoint::new(rat(x.0, x.1), rat(y.0, y.1))
}

/// Integer of a rational known to be integral.
pub fn to_int(q: &Rational) -> Option<BigInt> {
    q.is_integer().then(|| q.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp2() -> AlmostToricBase {
        AlmostToricBase::monotone(vec![point(-1, -1), point(2, -1), point(-1, 2)], &[1, 1, 1]).unwrap()
    }

    fn dets(b: &AlmostToricBase) -> Vec<i64> {
        let mut d: Vec<i64> =
            b.corner_determinants().unwrap().iter().map(|x| x.to_string().parse().unwrap()).collect();
        d.sort();
        d
    }

    #[test]
    fn cp2_triangle_is_valid() {
        let r = validate(&cp2()).unwrap();
        assert!(r.is_valid(), "{:?}", r.failures());
    }

    #[test]
    fn zero_nodes_break_consistency() {
        let mut b = cp2();
        b.cuts[1].nodes = 0;
        let r = validate(&b).unwrap();
        assert!(!r.is_valid());
        assert!(!r.vertices[1].consistent);
        assert!(r.vertices[0].consistent && r.vertices[2].consistent);
    }

    #[test]
    fn square_with_four_nodes_is_valid() {
        let b = AlmostToricBase::monotone(vec![point(-1, -1), point(1, -1), point(1, 1), point(-1, 1)], &[1, 1, 1, 1])
            .unwrap();
        assert!(validate(&b).unwrap().is_valid());
    }

    #[test]
    fn fewer_than_three_vertices_is_malformed() {
        let b = AlmostToricBase { vertices: vec![point(0, 0), point(1, 0)], cuts: vec![] };
        assert!(matches!(validate(&b), Err(Error::Malformed(_))));
    }

    #[test]
    fn cp2_mutation_gives_one_one_four() {
        let (m, rec) = mutate(&cp2(), 1, 1).unwrap();
        assert_eq!(m.vertices, vec![point(-1, -1), point(5, -1), qpoint((-1, 1), (1, 2))]);
        assert_eq!(m.area(), rat(9, 2));
        assert_eq!(dets(&m), vec![1, 1, 4]);
        assert_eq!(rec.new_vertex, qpoint((-1, 1), (1, 2)));
        assert_eq!(m.cuts[rec.new_vertex_index].direction, LatticeVector::new(2, -1));
        assert_eq!(m.cuts[rec.new_vertex_index].nodes, 1);
        assert_eq!(m.cuts[1].direction, LatticeVector::new(-5, 1));
        assert!(validate(&m).unwrap().is_valid());
    }

    #[test]
    fn second_mutation_gives_one_four_twenty_five() {
        let (m, rec) = mutate(&cp2(), 1, 1).unwrap();
        let m = m.with_default_positions();
        // mutate the non-frozen vertex other than the one just created
        let other = (0..3).find(|&j| j != 0 && j != rec.new_vertex_index).unwrap();
        let (m2, _) = mutate(&m, other, 1).unwrap();
        assert_eq!(dets(&m2), vec![1, 4, 25]);
        assert_eq!(m2.area(), rat(9, 2));
    }

    #[test]
    fn order_out_of_range() {
        assert!(matches!(mutate(&cp2(), 0, 2), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(mutate(&cp2(), 0, 0), Err(Error::OrderOutOfRange { .. })));
    }

    #[test]
    fn mutation_is_reversible_up_to_canonical_form() {
        let b = cp2();
        let (m, rec) = mutate(&b, 1, 1).unwrap();
        let (back, _) = mutate(&m, rec.new_vertex_index, 1).unwrap();
        assert_eq!(canonical_form(&back).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn partial_mutation_keeps_vertex_and_reverses() {
        let b = AlmostToricBase::monotone(vec![point(-1, -1), point(2, -1), point(-1, 1)], &[1, 2, 3]).unwrap();
        assert!(validate(&b).unwrap().is_valid());
        let (m, rec) = mutate(&b, 2, 1).unwrap();
        assert_eq!(m.len(), 4);
        assert!(validate(&m).unwrap().is_valid(), "{:?}", validate(&m).unwrap().failures());
        assert_eq!(m.area(), b.area());
        let (back, _) = mutate(&m, rec.new_vertex_index, 1).unwrap();
        assert_eq!(canonical_form(&back).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn canonical_form_examples() {
        let tri = |pts: Vec<PlanePoint>| AlmostToricBase {
            cuts: vec![CutContent::new(LatticeVector::new(1, 1), 0); 3],
            vertices: pts,
        };
        let a = tri(vec![point(0, 0), point(1, 0), point(0, 1)]);
        let b = tri(vec![point(5, 5), point(6, 5), point(5, 6)]);
        let m = UnimodularMatrix::new(1, 1, 0, 1).unwrap();
        let c = a.transformed(&m, &PlanePoint::origin());
        let ca = canonical_form(&a).unwrap();
        assert_eq!(canonical_form(&b).unwrap().vertices, ca.vertices);
        assert_eq!(canonical_form(&c).unwrap().vertices, ca.vertices);
        assert_eq!(canonical_form(&ca).unwrap(), ca);
    }

    #[test]
    fn frozen_corner_of_one_one_four() {
        let (m, _) = mutate(&cp2(), 1, 1).unwrap();
        let (a, b) = frozen_corner_ellipsoid(&m, 0).unwrap();
        assert_eq!((a.clone(), b.clone()), (rat(3, 2), rat(6, 1)));
        assert_eq!(b / a, rat(4, 1));
        let delzant = AlmostToricBase::monotone(vec![point(0, 0), point(1, 0), point(0, 1)], &[0, 0, 0]);
        assert!(delzant.is_err());
        let d = AlmostToricBase {
            vertices: vec![point(0, 0), point(1, 0), point(0, 1)],
            cuts: vec![CutContent::new(LatticeVector::new(1, 1), 0); 3],
        };
        for v in 0..3 {
            assert_eq!(frozen_corner_ellipsoid(&d, v).unwrap(), (rat(1, 1), rat(1, 1)));
        }
    }

    #[test]
    fn delzant_corner_determinants() {
        let d = AlmostToricBase {
            vertices: vec![point(0, 0), point(1, 0), point(0, 1)],
            cuts: vec![CutContent::new(LatticeVector::new(1, 1), 0); 3],
        };
        assert_eq!(dets(&d), vec![1, 1, 1]);
    }

    #[test]
    fn relative_base_checks_segments() {
        let b = AlmostToricBase::monotone(vec![point(-1, -1), point(2, -1), point(-1, 1)], &[1, 2, 3]).unwrap();
        let ok = RelativeBase {
            base: b.clone(),
            marked_sides: [0].into_iter().collect(),
            marked_cut_segments: [(2, 1)].into_iter().collect(),
        };
        assert!(ok.check().is_ok());
        let bad = RelativeBase { marked_cut_segments: [(0, 0)].into_iter().collect(), ..ok };
        assert!(bad.check().is_err());
    }
}
