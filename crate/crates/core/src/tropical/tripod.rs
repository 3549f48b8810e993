//! Tripods in a neighbourhood of the edge opposite the smooth corner.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Attachment, TropicalEdge, TropicalGraph, TropicalVertex, VertexKind};
use crate::atbd::AlmostToricBase;
use crate::diophantine::{is_solution, MarkovConfig, MarkovTriple};
use crate::error::{Error, Result};
use crate::lattice::{primitive_of, rat, wedge, LatticeVector, PlanePoint, Rational};

/// Solution `(l, m)` of `r l - q m = k` with `k = m_cfg p / (C1 C2)`, plus derived corner data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSlopeData {
    pub l: BigInt,
    pub m: BigInt,
    /// Right-hand side `k`.
    pub k: BigInt,
    /// Primitive cut direction at the `q` corner, along `(l, q)`.
    pub cut_q: LatticeVector,
    /// Primitive cut direction at the `r` corner, along `(m, r)`.
    pub cut_r: LatticeVector,
    /// Edge direction from the `q` corner to the smooth corner.
    pub edge_q: LatticeVector,
    /// Edge direction from the `r` corner to the smooth corner.
    pub edge_r: LatticeVector,
    /// `edge_q ^ edge_r`, equal to `C0 p^2`.
    pub det: BigInt,
}

impl CutSlopeData {
    /// Whether `r l - q m = k` holds for the given triple.
    pub fn slope_identity(&self, t: &MarkovTriple) -> bool {
        t.0[2].clone() * &self.l - &t.0[1] * &self.m == self.k
    }

    /// Whether the edge determinant equals `C0 p^2`.
    pub fn det_identity(&self, cfg: &MarkovConfig, t: &MarkovTriple) -> bool {
        self.det == BigInt::from(cfg.c[0]) * &t.0[0] * &t.0[0]
    }
}

/// Solves `r l - q m = k` by the extended Euclidean algorithm, normalised to `0 <= m < r`.
pub fn cut_slope_data(cfg: &MarkovConfig, t: &MarkovTriple) -> Result<CutSlopeData> {
    let [p, q, r] = &t.0;
    if !is_solution(cfg, t) {
        return Err(Error::NotASolution(t.to_string()));
    }
    let n2 = BigInt::from(cfg.c[1]);
    let n3 = BigInt::from(cfg.c[2]);
    let num = BigInt::from(cfg.m) * p;
    let den = &n2 * &n3;
    if !num.is_multiple_of(&den) {
        return Err(Error::Divisibility(format!("{den} does not divide {num}")));
    }
    let k = num / den;
    let eg = r.extended_gcd(q);
    if !eg.gcd.is_one() {
        return Err(Error::NotCoprime(q.to_string(), r.to_string()));
    }
    // r x + q y = 1
    let l0 = &k * &eg.x;
    let m0 = -(&k * &eg.y);
    let m = m0.mod_floor(r);
    let shift = (&m - &m0) / r;
    let l = l0 + &shift * q;
    let cut_q = primitive_of(&LatticeVector::new(l.clone(), q.clone()))?.0;
    let cut_r = primitive_of(&LatticeVector::new(m.clone(), r.clone()))?.0;
    let edge_q = LatticeVector::new(&n2 * q * &l - 1, &n2 * q * q);
    let edge_r = LatticeVector::new(&n3 * r * &m + 1, &n3 * r * r);
    let det = wedge(&edge_q, &edge_r);
    Ok(CutSlopeData { l, m, k, cut_q, cut_r, edge_q, edge_r, det })
}

fn intersect_lines(p: &PlanePoint, u: &LatticeVector, q: &PlanePoint, v: &LatticeVector) -> Result<PlanePoint> {
    let den = Rational::from_integer(wedge(u, v));
    if den.is_zero() {
        return Err(Error::Inconsistent("parallel host edges".to_string()));
    }
    let d = q.sub(p);
    let s = (&d.x * Rational::from_integer(v.y.clone()) - &d.y * Rational::from_integer(v.x.clone())) / den;
    Ok(p.along(u, &s))
}

/// Triangle with the edge opposite the smooth corner on `y = -1`, corners in order `q`, `r`, smooth.
pub fn tripod_host(cfg: &MarkovConfig, t: &MarkovTriple) -> Result<AlmostToricBase> {
    let d = cut_slope_data(cfg, t)?;
    let [_, q, r] = &t.0;
    let left = PlanePoint::new(Rational::new(-d.l.clone(), q.clone()), rat(-1, 1));
    let right = PlanePoint::new(Rational::new(-d.m.clone(), r.clone()), rat(-1, 1));
    let top = intersect_lines(&left, &d.edge_q, &right, &d.edge_r)?;
    AlmostToricBase::monotone(vec![left, right, top], &[cfg.c[1], cfg.c[2], cfg.c[0]])
}

fn leaf(vertices: &mut Vec<TropicalVertex>, from: TropicalVertex, to: usize, class: LatticeVector, mult: &BigInt) -> Result<TropicalEdge> {
    let (class, g) = primitive_of(&class)?;
    let multiplicity = (mult * g).to_u64().ok_or(Error::Overflow("leaf multiplicity"))?;
    let tail = vertices.len();
    let polyline = vec![from.position.clone(), vertices[to].position.clone()];
    vertices.push(from);
    Ok(TropicalEdge { tail, head: to, polyline, class, multiplicity })
}

/// Tripod with leaves into the outermost nodes of the `q` and `r` cuts and into the bottom edge.
///
/// Leaf classes are `(q, -l)` with multiplicity `r`, `(-r, m)` with multiplicity `q` and
/// `(0, 1)` with multiplicity `k`; they balance because `r l - q m = k`.
pub fn build_edge_tripod(cfg: &MarkovConfig, t: &MarkovTriple) -> Result<TropicalGraph> {
    let d = cut_slope_data(cfg, t)?;
    let host = tripod_host(cfg, t)?;
    let [_, q, r] = &t.0;
    let left = &host.vertices[0];
    let right = &host.vertices[1];
    let xm = (&left.x + &right.x) / rat(2, 1);
    let y_top = -(&xm / &left.x);
    let centre = PlanePoint::new(xm.clone(), (y_top - rat(1, 1)) / rat(2, 1));
    let mut vertices = vec![TropicalVertex { kind: VertexKind::Interior, position: centre, attachment: Attachment::Free }];
    let node = |vertex: usize| -> Result<TropicalVertex> {
        Ok(TropicalVertex {
            kind: VertexKind::Boundary,
            position: host.node_point(vertex, 0)?,
            attachment: Attachment::Node { vertex, node: 0 },
        })
    };
    let mut edges = Vec::new();
    edges.push(leaf(&mut vertices, node(0)?, 0, LatticeVector::new(q.clone(), -d.l.clone()), r)?);
    edges.push(leaf(&mut vertices, node(1)?, 0, LatticeVector::new(-r.clone(), d.m.clone()), q)?);
    let foot = TropicalVertex {
        kind: VertexKind::Boundary,
        position: PlanePoint::new(xm, rat(-1, 1)),
        attachment: Attachment::Side(0),
    };
    edges.push(leaf(&mut vertices, foot, 0, LatticeVector::new(0, 1), &d.k)?);
    if edges.iter().any(|e| e.multiplicity == 0) || !d.k.is_positive() {
        return Err(Error::Inconsistent("tripod leaf with zero multiplicity".to_string()));
    }
    Ok(TropicalGraph { vertices, edges, host })
}

/// Leaf multiplicities `(r-corner leaf, q-corner leaf, bottom leaf)` of a tripod.
pub fn tripod_weights(g: &TropicalGraph) -> Option<(u64, u64, u64)> {
    let mult = |a: &Attachment| g.edges.iter().find(|e| &g.vertices[e.tail].attachment == a).map(|e| e.multiplicity);
    Some((
        mult(&Attachment::Node { vertex: 1, node: 0 })?,
        mult(&Attachment::Node { vertex: 0, node: 0 })?,
        mult(&Attachment::Side(0))?,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::validate::balancing_residual;
    use super::super::{anticanonical_intersection, validate_stc};
    use super::*;
    use crate::atbd::{point, validate};
    use crate::diophantine::{solution_tree, vieta_jump, Slot};

    fn cfg(c0: u64, c1: u64, c2: u64, m: u64) -> MarkovConfig {
        MarkovConfig::new(c0, c1, c2, m).unwrap()
    }

    fn t(p: i64, q: i64, r: i64) -> MarkovTriple {
        MarkovTriple::new(p, q, r)
    }

    #[test]
    fn slope_examples() {
        let d = cut_slope_data(&cfg(1, 1, 1, 3), &t(1, 1, 2)).unwrap();
        assert_eq!((d.l.clone(), d.m.clone()), (BigInt::from(2), BigInt::from(1)));
        assert_eq!(d.det, BigInt::from(1));
        let d = cut_slope_data(&cfg(1, 2, 3, 6), &t(1, 2, 3)).unwrap();
        assert_eq!((d.l, d.m), (BigInt::from(1), BigInt::from(1)));
        assert!(matches!(cut_slope_data(&cfg(1, 1, 1, 3), &t(1, 2, 3)), Err(Error::NotASolution(_))));
    }

    #[test]
    fn cp2_seed_host() {
        let h = tripod_host(&cfg(1, 1, 1, 3), &t(1, 1, 1)).unwrap();
        assert_eq!(h.vertices, vec![point(-3, -1), point(0, -1), point(3, 2)]);
    }

    #[test]
    fn identities_and_hosts_for_all_small_solutions() {
        let cases = [(cfg(1, 1, 1, 3), t(1, 1, 1)), (cfg(1, 1, 2, 4), t(1, 1, 1)), (cfg(1, 2, 3, 6), t(1, 1, 1)), (cfg(1, 1, 5, 5), t(1, 2, 1))];
        for (c, seed) in cases {
            for s in solution_tree(&c, &seed, 100).unwrap() {
                if s.0[0] != BigInt::from(1) {
                    continue;
                }
                let d = cut_slope_data(&c, &s).unwrap();
                assert!(d.slope_identity(&s) && d.det_identity(&c, &s), "{c} {s}");
                let h = tripod_host(&c, &s).unwrap();
                assert!(validate(&h).unwrap().is_valid(), "{c} {s}");
                let w = s.weights(&c);
                assert_eq!(h.corner_determinants().unwrap(), vec![w[1].clone(), w[2].clone(), w[0].clone()]);
            }
        }
    }

    #[test]
    fn fibonacci_tripods() {
        let c = cfg(1, 1, 1, 3);
        let pairs = [(1, 1), (1, 2), (5, 2), (13, 5), (34, 13)];
        let mut got = Vec::new();
        for (i, &(q, r)) in pairs.iter().enumerate() {
            let x = t(1, q, r);
            if i > 0 {
                let prev = t(1, pairs[i - 1].0, pairs[i - 1].1);
                let jumped = Slot::ALL.iter().any(|&s| vieta_jump(&c, &prev, s).unwrap().normalized(&c) == x.normalized(&c));
                assert!(jumped, "{x} is not a jump of {prev}");
            }
            let g = build_edge_tripod(&c, &x).unwrap();
            let r = validate_stc(&g).unwrap();
            assert!(r.is_valid(), "{x}: {:?}", r);
            assert!(balancing_residual(&g, 0).is_zero());
            assert_eq!(anticanonical_intersection(&g).unwrap(), 3);
            got.push(tripod_weights(&g).unwrap());
        }
        assert_eq!(got, vec![(1, 1, 3), (1, 2, 3), (5, 2, 3), (13, 5, 3), (34, 13, 3)]);
    }

    #[test]
    fn cp1xcp1_bottom_leaf() {
        let g = build_edge_tripod(&cfg(1, 1, 2, 4), &t(1, 1, 1)).unwrap();
        assert_eq!(tripod_weights(&g).unwrap().2, 2);
        assert!(validate_stc(&g).unwrap().is_valid());
    }
}
