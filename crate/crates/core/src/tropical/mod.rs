//! Symplectic-tropical curves in almost-toric bases: validation, tripods, dimers and chain certificates.

mod chain;
mod dimer;
mod eps;
mod tripod;
mod validate;

pub use chain::{verify_chain, ChainCase, ChainCertificate, Identity, Relation};
pub use dimer::{balance, build_dimer, validate_dimer, Color, DimerEdge, DimerModel, DimerReport, DimerVertex, StraightCycle};
pub use eps::Eps;
pub use tripod::{build_edge_tripod, cut_slope_data, tripod_host, tripod_weights, CutSlopeData};
pub use validate::{anticanonical_intersection, balancing_residual, validate_stc, Condition, StcReport};

use crate::atbd::AlmostToricBase;
use crate::error::{Error, Result};
use crate::lattice::{wedge, LatticeVector, PlanePoint};

/// Role of a vertex of a tropical graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// Univalent, on a side of the base or on a node.
    Boundary,
    /// Bivalent, on a cut.
    Bending,
    /// Trivalent, in the open regular part.
    Interior,
}

/// Where a vertex sits relative to the host base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Attachment {
    /// Side `i` joins vertex `i` to vertex `i + 1`.
    Side(usize),
    /// Node `node` (0-based, outermost first) on the cut of `vertex`.
    Node { vertex: usize, node: usize },
    /// Cut of the given base vertex.
    Cut(usize),
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalVertex {
    pub kind: VertexKind,
    pub position: PlanePoint,
    pub attachment: Attachment,
}

/// Oriented edge from `tail` to `head` along a polyline, carrying a primitive class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalEdge {
    pub tail: usize,
    pub head: usize,
    /// Points from the tail position to the head position.
    pub polyline: Vec<PlanePoint>,
    pub class: LatticeVector,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalGraph {
    pub vertices: Vec<TropicalVertex>,
    pub edges: Vec<TropicalEdge>,
    pub host: AlmostToricBase,
}

impl TropicalGraph {
    /// Edges incident to vertex `v`.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].tail == v || self.edges[e].head == v).collect()
    }

    /// Disjoint union of two graphs on the same host.
    pub fn union(&self, other: &TropicalGraph) -> Result<TropicalGraph> {
        if self.host != other.host {
            return Err(Error::Malformed("graphs live on different hosts".to_string()));
        }
        let shift = self.vertices.len();
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().cloned());
        out.edges.extend(other.edges.iter().map(|e| TropicalEdge { tail: e.tail + shift, head: e.head + shift, ..e.clone() }));
        Ok(out)
    }
}

/// `(k, d)` with `m = k n + d` and `0 <= d < n`.
pub fn node_distribution(m: u64, n: u64) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(Error::Malformed("a cut needs at least one node".to_string()));
    }
    Ok((m / n, m % n))
}

/// Linking number `d = m1 m2 |w1 ^ w2|` between two families of cycles.
pub fn linking_budget(m1: u64, m2: u64, w1: &LatticeVector, w2: &LatticeVector) -> num_bigint::BigInt {
    num_bigint::BigInt::from(m1) * num_bigint::BigInt::from(m2) * num_traits::Signed::abs(&wedge(w1, w2))
}

/// All splittings `d = d1 + d2` with `d1, d2 >= 0`.
pub fn partitions(d: u64) -> Vec<(u64, u64)> {
    (0..=d).map(|d1| (d1, d - d1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn node_distribution_examples() {
        assert_eq!(node_distribution(11, 4).unwrap(), (2, 3));
        assert_eq!(node_distribution(4, 4).unwrap(), (1, 0));
        assert_eq!(node_distribution(0, 3).unwrap(), (0, 0));
        assert!(node_distribution(3, 0).is_err());
    }

    #[test]
    fn linking_examples() {
        let e1 = LatticeVector::new(1, 0);
        let e2 = LatticeVector::new(0, 1);
        assert_eq!(linking_budget(1, 1, &e1, &e2), BigInt::from(1));
        assert_eq!(partitions(1), vec![(0, 1), (1, 0)]);
        assert_eq!(linking_budget(3, 2, &e1, &LatticeVector::new(-1, 0)), BigInt::from(0));
        // CP1xCP1 seed: v = (-1, 0), w = (1, -2) with v ^ w = 2
        assert_eq!(linking_budget(1, 2, &LatticeVector::new(-1, 0), &LatticeVector::new(1, -2)), BigInt::from(4));
    }
}
