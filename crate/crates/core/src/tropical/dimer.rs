//! Dimer models on the torus from straight cycles in three balanced classes.
//!
//! Coordinates are taken after a unimodular change of basis sending `w1` to `(1, 0)`. The
//! horizontal cycles are pushed up by a formal infinitesimal so that no three cycles meet.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::eps::{Eps, EpsPoint};
use crate::error::{Error, Result};
use crate::lattice::{primitive_of, wedge, LatticeVector, Rational, UnimodularMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Black,
}

/// A straight cycle `base + t direction` on the torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StraightCycle {
    /// Index of the input class, `0..3`.
    pub family: usize,
    /// Class in the original basis.
    pub class: LatticeVector,
    /// Direction in the normalised basis.
    pub direction: LatticeVector,
    /// Base point in the normalised basis, standard part.
    pub offset: (Rational, Rational),
    /// Whether the base point carries the infinitesimal upward shift.
    pub shifted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimerVertex {
    pub color: Color,
    /// Centroid of the face, reduced modulo the lattice, standard part.
    pub position: (Rational, Rational),
    /// Incident edges in counter-clockwise order.
    pub edges: Vec<usize>,
}

/// Edge through a crossing of two straight cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimerEdge {
    pub white: usize,
    pub black: usize,
    /// The two crossing cycles.
    pub cycles: (usize, usize),
    /// Crossing point, standard part.
    pub crossing: (Rational, Rational),
    /// Lifted displacement from the white centroid to the black centroid.
    displacement: EpsPoint,
}

impl DimerEdge {
    /// Displacement from the white to the black centroid in the universal cover, standard part.
    pub fn displacement(&self) -> (Rational, Rational) {
        self.displacement.standard()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimerModel {
    /// Input `(multiplicity, class)` triples in the original basis.
    pub inputs: Vec<(u64, LatticeVector)>,
    /// Change of basis sending the first class to `(1, 0)`.
    pub basis: UnimodularMatrix,
    pub straight_cycles: Vec<StraightCycle>,
    pub vertices: Vec<DimerVertex>,
    pub edges: Vec<DimerEdge>,
    /// Faces of the dimer: each is the cyclic list of edges around a region bounded by alternately oriented cycles.
    pub faces: Vec<Vec<usize>>,
}

/// Zigzag paths and structural checks of a dimer model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimerReport {
    pub bipartite: bool,
    /// Every dimer vertex is a triangle.
    pub triangular: bool,
    /// `V - E + F = 0`.
    pub euler: bool,
    /// Zigzag classes in the original basis, sorted.
    pub zigzag_classes: Vec<LatticeVector>,
    /// Input classes with multiplicity, sorted.
    pub expected_classes: Vec<LatticeVector>,
}

impl DimerReport {
    pub fn classes_match(&self) -> bool {
        self.zigzag_classes == self.expected_classes
    }

    pub fn is_valid(&self) -> bool {
        self.bipartite && self.triangular && self.euler && self.classes_match()
    }
}

struct Line {
    base: EpsPoint,
    dir: LatticeVector,
}

struct Crossing {
    lines: [usize; 2],
    params: [Eps; 2],
    point: EpsPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Dart {
    line: usize,
    seg: usize,
    fwd: bool,
}

fn eps_rat(q: Rational) -> Eps {
    Eps::real(q)
}

/// A vector `e` with `d ^ e = 1`.
fn dual(d: &LatticeVector) -> LatticeVector {
    let eg = d.x.extended_gcd(&d.y);
    let s = eg.gcd.signum();
    LatticeVector::new(-(eg.y * &s), eg.x * s)
}

fn half(v: &LatticeVector) -> u8 {
    if v.y.is_positive() || (v.y.is_zero() && v.x.is_positive()) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &LatticeVector, b: &LatticeVector) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| wedge(b, a).cmp(&BigInt::zero()))
}

fn check_inputs(inputs: &[(u64, LatticeVector)]) -> Result<()> {
    if inputs.len() != 3 {
        return Err(Error::Malformed(format!("expected three classes, got {}", inputs.len())));
    }
    let mut sum = LatticeVector::zero();
    for (m, w) in inputs {
        if *m == 0 {
            return Err(Error::Malformed("multiplicities must be positive".to_string()));
        }
        if !w.is_primitive() {
            return Err(Error::NotPrimitive(w.to_string()));
        }
        sum = sum.add(&w.scale(&BigInt::from(*m)));
    }
    if !sum.is_zero() {
        return Err(Error::Unbalanced(sum.to_string()));
    }
    if wedge(&inputs[0].1, &inputs[1].1).is_zero() {
        return Err(Error::Malformed("classes are parallel".to_string()));
    }
    Ok(())
}

fn dart_dir(lines: &[Line], d: &Dart) -> LatticeVector {
    if d.fwd {
        lines[d.line].dir.clone()
    } else {
        lines[d.line].dir.neg()
    }
}

/// Builds the dimer model for `m1 w1 + m2 w2 + m3 w3 = 0`.
pub fn build_dimer(inputs: &[(u64, LatticeVector)]) -> Result<DimerModel> {
    check_inputs(inputs)?;
    let basis = UnimodularMatrix::sending_to_e1(&inputs[0].1)?;
    let w: Vec<LatticeVector> = inputs.iter().map(|(_, v)| basis.apply(v)).collect();
    let m: Vec<BigInt> = inputs.iter().map(|(k, _)| BigInt::from(*k)).collect();
    let n = (&m[1] * &w[1].y).abs();
    if n != (&m[2] * &w[2].y).abs() {
        return Err(Error::Inconsistent("base point counts differ".to_string()));
    }

    let mut lines = Vec::new();
    let mut cycles = Vec::new();
    for (family, (mult, class)) in inputs.iter().enumerate() {
        for k in 0..*mult {
            let (base, shifted) = if family == 0 {
                let y = Rational::new(BigInt::from(k), m[0].clone());
                (EpsPoint::new(Eps::zero(), Eps::new(y, Rational::one())), true)
            } else {
                (EpsPoint::new(eps_rat(Rational::new(BigInt::from(k), n.clone())), Eps::zero()), false)
            };
            cycles.push(StraightCycle {
                family,
                class: class.clone(),
                direction: w[family].clone(),
                offset: base.standard(),
                shifted,
            });
            lines.push(Line { base, dir: w[family].clone() });
        }
    }

    // Crossings of cycles from different families.
    let mut crossings = Vec::new();
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            if cycles[a].family == cycles[b].family {
                continue;
            }
            let (la, lb) = (&lines[a], &lines[b]);
            let det = wedge(&la.dir, &lb.dir);
            let e = dual(&lb.dir);
            let delta = lb.base.sub(&la.base);
            let cross = delta.wedge_int(&lb.dir);
            let inv = Rational::new(BigInt::one(), det.clone());
            let count = det.abs().to_u64().ok_or(Error::Overflow("crossing count"))?;
            for j in 0..count {
                let s = (&cross + &eps_rat(Rational::from_integer(BigInt::from(j)))).scale(&inv).frac();
                let point = la.base.along(&la.dir, &s);
                let t = point.sub(&lb.base).wedge_int(&e).frac();
                let off = point.sub(&lb.base.along(&lb.dir, &t));
                if !(off.x.eps.is_zero() && off.y.eps.is_zero() && off.x.std.is_integer() && off.y.std.is_integer()) {
                    return Err(Error::Inconsistent("crossing parameters disagree".to_string()));
                }
                crossings.push(Crossing { lines: [a, b], params: [s, t], point: point.mod_lattice() });
            }
        }
    }

    // Crossings along each line, sorted by parameter.
    let mut along: Vec<Vec<usize>> = vec![Vec::new(); lines.len()];
    for (c, x) in crossings.iter().enumerate() {
        along[x.lines[0]].push(c);
        along[x.lines[1]].push(c);
    }
    let param = |c: usize, l: usize| -> &Eps {
        let x = &crossings[c];
        if x.lines[0] == l {
            &x.params[0]
        } else {
            &x.params[1]
        }
    };
    for (l, list) in along.iter_mut().enumerate() {
        list.sort_by(|&p, &q| param(p, l).cmp(param(q, l)));
        if list.windows(2).any(|w| param(w[0], l) == param(w[1], l)) {
            return Err(Error::Inconsistent("three cycles meet at a point".to_string()));
        }
    }
    let mut slot = vec![[0usize; 2]; crossings.len()];
    for (l, list) in along.iter().enumerate() {
        for (i, &c) in list.iter().enumerate() {
            slot[c][usize::from(crossings[c].lines[1] == l)] = i;
        }
    }
    let seg_len = |l: usize, seg: usize| -> Eps {
        let list = &along[l];
        let next = (seg + 1) % list.len();
        let d = param(list[next], l) - param(list[seg], l);
        if d <= Eps::zero() {
            &d + &Eps::real(Rational::one())
        } else {
            d
        }
    };
    let origin = |d: &Dart| -> usize {
        let list = &along[d.line];
        if d.fwd {
            list[d.seg]
        } else {
            list[(d.seg + 1) % list.len()]
        }
    };
    let dest = |d: &Dart| -> usize {
        let list = &along[d.line];
        if d.fwd {
            list[(d.seg + 1) % list.len()]
        } else {
            list[d.seg]
        }
    };
    let shift = |d: &Dart| -> EpsPoint {
        let len = seg_len(d.line, d.seg);
        EpsPoint::default().along(&dart_dir(&lines, d), &len)
    };

    // Outgoing darts at each crossing in counter-clockwise order.
    let mut out: Vec<Vec<Dart>> = Vec::with_capacity(crossings.len());
    for (c, x) in crossings.iter().enumerate() {
        let mut darts = Vec::new();
        for (k, &l) in x.lines.iter().enumerate() {
            let len = along[l].len();
            let idx = slot[c][k];
            darts.push(Dart { line: l, seg: idx, fwd: true });
            darts.push(Dart { line: l, seg: (idx + len - 1) % len, fwd: false });
        }
        darts.sort_by(|p, q| angle_cmp(&dart_dir(&lines, p), &dart_dir(&lines, q)));
        out.push(darts);
    }

    // Faces traced counter-clockwise: at each crossing turn to the next dart clockwise from the reverse.
    let dart_key = |d: &Dart| (d.line, d.seg, d.fwd);
    let mut used = std::collections::HashSet::new();
    let mut faces: Vec<Vec<Dart>> = Vec::new();
    for start in out.iter().flatten() {
        if used.contains(&dart_key(start)) {
            continue;
        }
        let mut face = Vec::new();
        let mut cur = *start;
        loop {
            if !used.insert(dart_key(&cur)) {
                break;
            }
            face.push(cur);
            let x = dest(&cur);
            let rev = dart_dir(&lines, &cur).neg();
            let darts = &out[x];
            let i = darts.iter().position(|d| dart_dir(&lines, d) == rev).expect("reverse dart");
            cur = darts[(i + darts.len() - 1) % darts.len()];
        }
        if face.first().map(dart_key) != Some(dart_key(&cur)) {
            return Err(Error::Inconsistent("face boundary does not close".to_string()));
        }
        faces.push(face);
    }

    let mut vertices = Vec::new();
    let mut tiles = Vec::new();
    // Per crossing: (vertex, lifted crossing, lifted centroid) for the white and black corners.
    let mut white_at: Vec<Option<(usize, EpsPoint, EpsPoint)>> = vec![None; crossings.len()];
    let mut black_at: Vec<Option<(usize, EpsPoint, EpsPoint)>> = vec![None; crossings.len()];
    for face in &faces {
        let mut lifts = Vec::with_capacity(face.len());
        let mut pos = crossings[origin(&face[0])].point.clone();
        for d in face {
            lifts.push(pos.clone());
            pos = pos.add(&shift(d));
        }
        if pos != lifts[0] {
            return Err(Error::Inconsistent("face is not contractible".to_string()));
        }
        let fwd = face.iter().filter(|d| d.fwd).count();
        if fwd == face.len() || fwd == 0 {
            let color = if fwd == 0 { Color::Black } else { Color::White };
            let mut sum = EpsPoint::default();
            for p in &lifts {
                sum = sum.add(p);
            }
            let centroid = sum.scale(&Rational::new(BigInt::one(), BigInt::from(face.len())));
            let v = vertices.len();
            for (d, lift) in face.iter().zip(&lifts) {
                let slot = if color == Color::White { &mut white_at } else { &mut black_at };
                slot[origin(d)] = Some((v, lift.clone(), centroid.clone()));
            }
            let edges = face.iter().map(origin).collect();
            vertices.push(DimerVertex { color, position: centroid.mod_lattice().standard(), edges });
        } else {
            let k = face.len();
            if k % 2 == 1 || (0..k).any(|i| face[i].fwd == face[(i + 1) % k].fwd) {
                return Err(Error::Inconsistent("face is neither coherent nor alternating".to_string()));
            }
            tiles.push(face.iter().map(origin).collect());
        }
    }

    let mut edges = Vec::with_capacity(crossings.len());
    for (c, x) in crossings.iter().enumerate() {
        let (Some((wv, xw, cw)), Some((bv, xb, cb))) = (white_at[c].clone(), black_at[c].clone()) else {
            return Err(Error::Inconsistent("crossing without a coherent corner".to_string()));
        };
        let displacement = xw.sub(&cw).add(&cb.sub(&xb));
        edges.push(DimerEdge {
            white: wv,
            black: bv,
            cycles: (x.lines[0], x.lines[1]),
            crossing: x.point.standard(),
            displacement,
        });
    }

    Ok(DimerModel { inputs: inputs.to_vec(), basis, straight_cycles: cycles, vertices, edges, faces: tiles })
}

/// Traces zigzag paths and checks the structural invariants of a dimer model.
pub fn validate_dimer(model: &DimerModel) -> Result<DimerReport> {
    let bipartite = model.edges.iter().all(|e| {
        model.vertices.get(e.white).map(|v| v.color) == Some(Color::White)
            && model.vertices.get(e.black).map(|v| v.color) == Some(Color::Black)
    });
    if !bipartite {
        return Ok(DimerReport {
            bipartite,
            triangular: false,
            euler: false,
            zigzag_classes: Vec::new(),
            expected_classes: expected(model),
        });
    }
    let triangular = model.vertices.iter().all(|v| v.edges.len() == 3);
    let euler = model.vertices.len() + model.faces.len() == model.edges.len();

    let pos = |v: usize, e: usize| -> Result<usize> {
        model.vertices[v].edges.iter().position(|&x| x == e).ok_or_else(|| Error::Malformed(format!("edge {e} missing at vertex {v}")))
    };
    let inv = model.basis.inverse();
    let mut used = vec![false; model.edges.len()];
    let mut classes = Vec::new();
    for start in 0..model.edges.len() {
        if used[start] {
            continue;
        }
        // Traverse `start` from white to black, then alternate: clockwise at black, counter-clockwise at white.
        let mut sum = EpsPoint::default();
        let mut e = start;
        loop {
            if used[e] {
                if e != start {
                    return Err(Error::Inconsistent("zigzag paths overlap".to_string()));
                }
                break;
            }
            used[e] = true;
            sum = sum.add(&model.edges[e].displacement);
            let b = model.edges[e].black;
            let list = &model.vertices[b].edges;
            let back = list[(pos(b, e)? + list.len() - 1) % list.len()];
            sum = sum.sub(&model.edges[back].displacement);
            let w = model.edges[back].white;
            let list = &model.vertices[w].edges;
            e = list[(pos(w, back)? + 1) % list.len()];
        }
        let (x, y) = (&sum.x, &sum.y);
        if !(x.eps.is_zero() && y.eps.is_zero() && x.std.is_integer() && y.std.is_integer()) {
            return Err(Error::Inconsistent("zigzag path does not close on the torus".to_string()));
        }
        let v = LatticeVector::new(x.std.to_integer(), y.std.to_integer());
        classes.push(inv.apply(&v));
    }
    classes.sort();
    Ok(DimerReport { bipartite, triangular, euler, zigzag_classes: classes, expected_classes: expected(model) })
}

fn expected(model: &DimerModel) -> Vec<LatticeVector> {
    let mut v: Vec<LatticeVector> = model.inputs.iter().flat_map(|(m, w)| std::iter::repeat_n(w.clone(), *m as usize)).collect();
    v.sort();
    v
}

/// Completes `m1 w1 + m2 w2` to a balanced triple, or `None` if the sum vanishes.
pub fn balance(m1: u64, w1: &LatticeVector, m2: u64, w2: &LatticeVector) -> Option<(u64, LatticeVector)> {
    let s = w1.scale(&BigInt::from(m1)).add(&w2.scale(&BigInt::from(m2))).neg();
    let (w3, g) = primitive_of(&s).ok()?;
    Some((g.to_u64()?, w3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn v(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    fn count(model: &DimerModel, c: Color) -> usize {
        model.vertices.iter().filter(|x| x.color == c).count()
    }

    #[test]
    fn three_classes_with_a_triple_line() {
        let model = build_dimer(&[(1, v(1, -1)), (3, v(0, 1)), (1, v(-1, -2))]).unwrap();
        assert_eq!(model.edges.len(), 9);
        assert_eq!(model.vertices.len(), 6);
        assert_eq!((count(&model, Color::White), count(&model, Color::Black)), (3, 3));
        assert_eq!(model.faces.len(), 3);
        let r = validate_dimer(&model).unwrap();
        assert!(r.is_valid(), "{r:?}");
        assert_eq!(r.zigzag_classes, vec![v(-1, -2), v(0, 1), v(0, 1), v(0, 1), v(1, -1)]);
    }

    #[test]
    fn four_horizontals() {
        let model = build_dimer(&[(4, v(1, 0)), (1, v(1, 3)), (1, v(-5, -3))]).unwrap();
        assert_eq!(model.straight_cycles.len(), 6);
        // 4 * 3 + 4 * 3 + |(1,3) ^ (-5,-3)| = 36
        assert_eq!(model.edges.len(), 36);
        let r = validate_dimer(&model).unwrap();
        assert!(r.is_valid(), "{r:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(build_dimer(&[(1, v(1, 0)), (1, v(0, 1)), (1, v(-1, 0))]), Err(Error::Unbalanced(_))));
        assert!(matches!(build_dimer(&[(1, v(2, 0)), (1, v(0, 1)), (1, v(-2, -1))]), Err(Error::NotPrimitive(_))));
        assert!(build_dimer(&[(1, v(1, 0)), (1, v(-1, 0))]).is_err());
    }

    #[test]
    fn random_balanced_inputs() {
        let mut rng = StdRng::seed_from_u64(7);
        let mut done = 0;
        while done < 200 {
            let w1 = v(rng.random_range(-5..=5), rng.random_range(-5..=5));
            let w2 = v(rng.random_range(-5..=5), rng.random_range(-5..=5));
            if !w1.is_primitive() || !w2.is_primitive() || wedge(&w1, &w2).is_zero() {
                continue;
            }
            let (m1, m2) = (rng.random_range(1..=6), rng.random_range(1..=6));
            let Some((m3, w3)) = balance(m1, &w1, m2, &w2) else { continue };
            if m3 > 6 || w3.x.abs() > BigInt::from(5) || w3.y.abs() > BigInt::from(5) {
                continue;
            }
            let model = build_dimer(&[(m1, w1.clone()), (m2, w2.clone()), (m3, w3.clone())]).unwrap();
            let r = validate_dimer(&model).unwrap();
            assert!(r.is_valid(), "{m1}{w1} {m2}{w2} {m3}{w3}: {r:?}");
            done += 1;
        }
    }
}
