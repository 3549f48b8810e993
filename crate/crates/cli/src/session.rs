//! Mutation sessions with undo, replay and derived staircase data.

use atf_core::atbd::{frozen_corner_ellipsoid, mutate, validate, AlmostToricBase, MutationRecord};
use atf_core::diophantine::{accumulation_point, MarkovTriple, QuadraticSurd};
use atf_core::error::{Error, Result};
use atf_core::lattice::{rational_to_f64, PlanePoint, Rational};
use atf_core::staircase::{symplectic_volume, volume_lower_bound, ManifoldPreset, PresetName};
use atf_core::tropical::TropicalGraph;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::json::{jpoint, rat, surd_json, triple_json, AtbdJson};

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryEntry {
    pub record: MutationRecord,
    pub base: AlmostToricBase,
    pub frozen: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub id: u64,
    pub preset: Option<PresetName>,
    pub initial: AlmostToricBase,
    pub initial_frozen: Option<usize>,
    pub history: Vec<HistoryEntry>,
    /// Last graph posted for overlay rendering.
    pub stc: Option<TropicalGraph>,
}

/// Staircase point of one session state.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpPoint {
    pub n: usize,
    pub value: Rational,
    pub bound: f64,
}

/// On-disk form: the initial base and the mutation list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredSession {
    pub id: u64,
    pub preset: Option<String>,
    pub initial: AtbdJson,
    pub frozen: Option<usize>,
    pub mutations: Vec<[u64; 2]>,
}

fn integer_sqrt_exact(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

impl Session {
    pub fn from_preset(id: u64, name: PresetName) -> Self {
        let p = ManifoldPreset::get(name);
        let initial = p.initial_base.with_positions_toward(&PlanePoint::origin()).unwrap_or(p.initial_base);
        Self { id, preset: Some(name), initial, initial_frozen: Some(p.frozen_vertex), history: Vec::new(), stc: None }
    }

    pub fn from_base(id: u64, base: AlmostToricBase) -> Result<Self> {
        let base = AlmostToricBase::new(base.vertices, base.cuts)?;
        Ok(Self { id, preset: None, initial: base, initial_frozen: None, history: Vec::new(), stc: None })
    }

    pub fn current(&self) -> &AlmostToricBase {
        self.history.last().map(|h| &h.base).unwrap_or(&self.initial)
    }

    pub fn frozen(&self) -> Option<usize> {
        self.history.last().map(|h| h.frozen).unwrap_or(self.initial_frozen)
    }

    /// Applies a mutation; preset sessions then slide the nodes toward the common centre.
    pub fn mutate(&mut self, vertex: usize, order: u64) -> Result<&HistoryEntry> {
        let base = self.current().clone();
        let (next, record) = mutate(&base, vertex, order)?;
        if self.frozen() == Some(vertex) {
            return Err(Error::FrozenMutation(vertex));
        }
        let next = if self.preset.is_some() { next.with_positions_toward(&PlanePoint::origin()).unwrap_or(next) } else { next };
        let frozen = self.frozen().and_then(|f| record.index_map[f]);
        self.history.push(HistoryEntry { record, base: next, frozen });
        Ok(self.history.last().expect("just pushed"))
    }

    pub fn undo(&mut self) -> bool {
        self.history.pop().is_some()
    }

    /// Base obtained by replaying the recorded mutations from the initial base.
    pub fn replay(&self) -> Result<AlmostToricBase> {
        let mut s = Session { history: Vec::new(), stc: None, ..self.clone() };
        for h in &self.history {
            s.mutate(h.record.vertex, h.record.order)?;
        }
        Ok(s.current().clone())
    }

    fn states(&self) -> impl Iterator<Item = (&AlmostToricBase, Option<usize>)> {
        std::iter::once((&self.initial, self.initial_frozen)).chain(self.history.iter().map(|h| (&h.base, h.frozen)))
    }

    /// Sharp points of the triangular states with a smooth frozen corner.
    pub fn sharp_points(&self) -> Vec<SharpPoint> {
        let mut out = Vec::new();
        for (n, (base, frozen)) in self.states().enumerate() {
            let Some(f) = frozen else { continue };
            if base.len() != 3 || base.corner_determinant(f).ok() != Some(BigInt::one()) {
                continue;
            }
            let Ok((a, b)) = frozen_corner_ellipsoid(base, f) else { continue };
            if a.is_zero() {
                continue;
            }
            let value = b / a;
            let bound = volume_lower_bound(rational_to_f64(&value), symplectic_volume(base)).unwrap_or(f64::NAN);
            out.push(SharpPoint { n, value, bound });
        }
        out
    }

    /// `(p, q, r)` read from the corner determinants `C_i p_i^2`, starting at the frozen corner.
    pub fn triple(&self) -> Option<MarkovTriple> {
        let base = self.current();
        let f = self.frozen()?;
        if base.len() != 3 {
            return None;
        }
        let mut t = Vec::new();
        for k in 0..3 {
            let i = (f + k) % 3;
            let nodes = BigInt::from(base.cuts[i].nodes);
            let det = base.corner_determinant(i).ok()?;
            if nodes.is_zero() || !(&det % &nodes).is_zero() {
                return None;
            }
            t.push(integer_sqrt_exact(&(det / nodes))?);
        }
        Some(MarkovTriple([t[0].clone(), t[1].clone(), t[2].clone()]))
    }

    pub fn accumulation(&self) -> Option<QuadraticSurd> {
        self.preset.and_then(|p| accumulation_point(&ManifoldPreset::get(p).markov).ok())
    }

    pub fn state_json(&self) -> Value {
        let base = self.current();
        let frozen = self.frozen();
        let vertices: Vec<Value> = (0..base.len())
            .map(|i| {
                json!({
                    "index": i,
                    "position": jpoint(&base.vertices[i]),
                    "corner_determinant": base.corner_determinant(i).ok().map(|d| d.to_string()),
                    "nodes": base.cuts[i].nodes,
                    "legal_orders": if frozen == Some(i) { Vec::new() } else { (1..=base.cuts[i].nodes).collect::<Vec<_>>() },
                    "frozen": frozen == Some(i),
                })
            })
            .collect();
        json!({
            "id": self.id,
            "preset": self.preset.map(|p| p.as_str()),
            "base": AtbdJson::from_base(base),
            "valid": validate(base).map(|r| r.is_valid()).unwrap_or(false),
            "frozen_vertex": frozen,
            "vertices": vertices,
            "area": rat(&base.area()),
            "history": self.history.iter().map(|h| json!({
                "vertex": h.record.vertex,
                "order": h.record.order,
                "new_vertex_index": h.record.new_vertex_index,
            })).collect::<Vec<_>>(),
            "can_undo": !self.history.is_empty(),
            "triple": self.triple().as_ref().map(triple_json),
            "sharp_points": self.sharp_points().iter().map(|s| rat(&s.value)).collect::<Vec<_>>(),
            "accumulation": self.accumulation().as_ref().map(surd_json),
        })
    }

    /// Chart data `{points: [{n, s_n, value, bound}], accumulation}`.
    pub fn staircase_json(&self) -> Value {
        json!({
            "points": self.sharp_points().iter().map(|s| json!({
                "n": s.n,
                "s_n": rat(&s.value),
                "value": rational_to_f64(&s.value),
                "bound": s.bound,
            })).collect::<Vec<_>>(),
            "accumulation": self.accumulation().as_ref().map(surd_json),
        })
    }

    pub fn stored(&self) -> StoredSession {
        StoredSession {
            id: self.id,
            preset: self.preset.map(|p| p.as_str().to_string()),
            initial: AtbdJson::from_base(&self.initial),
            frozen: self.initial_frozen,
            mutations: self.history.iter().map(|h| [h.record.vertex as u64, h.record.order]).collect(),
        }
    }

    pub fn from_stored(s: &StoredSession) -> Result<Self> {
        let preset = s.preset.as_deref().map(str::parse::<PresetName>).transpose()?;
        let mut out = Self { preset, initial_frozen: s.frozen, ..Self::from_base(s.id, s.initial.to_base()?)? };
        for &[v, k] in &s.mutations {
            out.mutate(v as usize, k)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use atf_core::atbd::qpoint;
    use atf_core::lattice::rat as r;

    #[test]
    fn cp2_mutation_and_undo() {
        let mut s = Session::from_preset(1, PresetName::Cp2);
        let before = s.current().clone();
        s.mutate(1, 1).unwrap();
        let mut v = s.current().vertices.clone();
        v.sort();
        let mut want = vec![qpoint((-1, 1), (-1, 1)), qpoint((5, 1), (-1, 1)), qpoint((-1, 1), (1, 2))];
        want.sort();
        assert_eq!(v, want);
        assert!(s.undo());
        assert_eq!(s.current(), &before);
        assert!(!s.undo());
    }

    #[test]
    fn alternating_mutations_give_fibonacci_sharp_points() {
        let mut s = Session::from_preset(1, PresetName::Cp2);
        // vertex 1 then the vertex that now carries the other non-frozen slot
        for _ in 0..3 {
            let f = s.frozen().unwrap();
            let last = s.history.last().map(|h| h.record.new_vertex_index);
            let v = (0..3).find(|&i| i != f && Some(i) != last).unwrap();
            s.mutate(v, 1).unwrap();
        }
        let got: Vec<Rational> = s.sharp_points().into_iter().map(|p| p.value).collect();
        assert_eq!(got, vec![r(1, 1), r(4, 1), r(25, 4), r(169, 25)]);
        assert_eq!(s.replay().unwrap(), s.current().clone());
        let mut t = s.triple().unwrap().0.to_vec();
        assert_eq!(t[0], BigInt::one());
        t.sort();
        assert_eq!(t, MarkovTriple::new(1, 5, 13).0.to_vec());
    }

    #[test]
    fn frozen_and_out_of_range() {
        let mut s = Session::from_preset(1, PresetName::Cp2);
        assert!(matches!(s.mutate(0, 2), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(s.mutate(0, 1), Err(Error::FrozenMutation(0))));
        assert!(s.history.is_empty());
    }

    #[test]
    fn stored_sessions_replay() {
        let mut s = Session::from_preset(3, PresetName::Bl3);
        s.mutate(1, 2).unwrap();
        let back = Session::from_stored(&s.stored()).unwrap();
        assert_eq!(back.current(), s.current());
        assert_eq!(back.frozen(), s.frozen());
    }
}
