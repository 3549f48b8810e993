//! Symington sequences: alternating full mutations of a triangle with a frozen smooth corner.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::atbd::{frozen_corner_ellipsoid, mutate, point, qpoint, validate, AlmostToricBase};
use crate::diophantine::{accumulation_point, is_solution, vieta_jump, MarkovConfig, MarkovTriple, QuadraticSurd, Slot};
use crate::error::{Error, Result};
use crate::lattice::{rational_to_f64, PlanePoint, Rational};

/// The four manifolds with a staircase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresetName {
    Cp2,
    Cp1xCp1,
    Bl3,
    Bl4,
}

impl PresetName {
    pub const ALL: [PresetName; 4] = [PresetName::Cp2, PresetName::Cp1xCp1, PresetName::Bl3, PresetName::Bl4];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Cp2 => "cp2",
            PresetName::Cp1xCp1 => "cp1xcp1",
            PresetName::Bl3 => "bl3",
            PresetName::Bl4 => "bl4",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cp2" => Ok(PresetName::Cp2),
            "cp1xcp1" | "pxp" => Ok(PresetName::Cp1xCp1),
            "bl3" => Ok(PresetName::Bl3),
            "bl4" => Ok(PresetName::Bl4),
            _ => Err(Error::Malformed(format!("unknown preset {s:?}"))),
        }
    }
}

/// Manifold with its equation, seed triple and initial triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldPreset {
    pub name: PresetName,
    pub markov: MarkovConfig,
    pub seed: MarkovTriple,
    pub initial_base: AlmostToricBase,
    pub frozen_vertex: usize,
}

impl ManifoldPreset {
    /// Vertex `i` of the initial triangle holds slot `i`; vertex 0 is frozen.
    pub fn get(name: PresetName) -> Self {
        let (vertices, nodes, cfg, seed) = match name {
            PresetName::Cp2 => (
                vec![point(-1, -1), point(2, -1), point(-1, 2)],
                [1, 1, 1],
                (1, 1, 1, 3),
                (1, 1, 1),
            ),
            PresetName::Cp1xCp1 => (
                vec![point(-1, -1), point(3, -1), point(-1, 1)],
                [1, 1, 2],
                (1, 1, 2, 4),
                (1, 1, 1),
            ),
            PresetName::Bl3 => (
                vec![point(-1, -1), point(2, -1), point(-1, 1)],
                [1, 2, 3],
                (1, 2, 3, 6),
                (1, 1, 1),
            ),
            PresetName::Bl4 => (
                vec![point(-1, -1), qpoint((3, 2), (-1, 1)), point(-1, 1)],
                [1, 1, 5],
                (1, 1, 5, 5),
                (1, 2, 1),
            ),
        };
        Self {
            name,
            markov: MarkovConfig::new(cfg.0, cfg.1, cfg.2, cfg.3).expect("preset config"),
            seed: MarkovTriple::new(seed.0, seed.1, seed.2),
            initial_base: AlmostToricBase::monotone(vertices, &nodes).expect("preset base"),
            frozen_vertex: 0,
        }
    }

    pub fn all() -> Vec<Self> {
        PresetName::ALL.into_iter().map(Self::get).collect()
    }

    /// Checks the seed, the base and the corner determinants.
    pub fn check(&self) -> Result<()> {
        if !is_solution(&self.markov, &self.seed) {
            return Err(Error::NotASolution(self.seed.to_string()));
        }
        let report = validate(&self.initial_base)?;
        if !report.is_valid() {
            return Err(Error::InvalidBase(report.failures().join("; ")));
        }
        let dets = self.initial_base.corner_determinants()?;
        let weights = self.seed.weights(&self.markov);
        if dets.as_slice() != weights.as_slice() {
            return Err(Error::Inconsistent(format!("corner determinants {dets:?} differ from weights {weights:?}")));
        }
        frozen_corner_ellipsoid(&self.initial_base, self.frozen_vertex)?;
        Ok(())
    }
}

/// One base of a Symington sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseStep {
    pub index: usize,
    /// Slot jumped to reach this step; `None` for the initial base.
    pub jumped: Option<Slot>,
    pub triple: MarkovTriple,
    pub weights: [BigInt; 3],
    pub base: AlmostToricBase,
    pub frozen_vertex: usize,
    /// Vertex holding each slot.
    pub slot_vertices: [usize; 3],
    pub ellipsoid: (Rational, Rational),
    pub sharp_point: Rational,
    pub volume_bound: f64,
}

impl StaircaseStep {
    /// Triple with the two non-frozen entries sorted when their coefficients agree.
    pub fn display_triple(&self, cfg: &MarkovConfig) -> MarkovTriple {
        let mut t = self.triple.0.clone();
        if cfg.c[1] == cfg.c[2] && t[1] > t[2] {
            t.swap(1, 2);
        }
        MarkovTriple(t)
    }

    /// Weights sorted like [`Self::display_triple`].
    pub fn display_weights(&self, cfg: &MarkovConfig) -> [BigInt; 3] {
        self.display_triple(cfg).weights(cfg)
    }
}

/// `pi sqrt(a) / sqrt(2 volume)`.
pub fn volume_lower_bound(a: f64, volume: f64) -> Result<f64> {
    if !(a > 0.0 && volume > 0.0) {
        return Err(Error::Malformed(format!("volume bound needs positive inputs, got a={a}, volume={volume}")));
    }
    Ok(std::f64::consts::PI * a.sqrt() / (2.0 * volume).sqrt())
}

/// Symplectic volume `pi^2 * area` of the manifold over a base.
pub fn symplectic_volume(base: &AlmostToricBase) -> f64 {
    std::f64::consts::PI.powi(2) * rational_to_f64(&base.area())
}

fn make_step(
    preset: &ManifoldPreset,
    index: usize,
    jumped: Option<Slot>,
    triple: MarkovTriple,
    base: AlmostToricBase,
    slot_vertices: [usize; 3],
) -> Result<StaircaseStep> {
    let weights = triple.weights(&preset.markov);
    let mut dets = base.corner_determinants()?;
    let mut expected = weights.to_vec();
    dets.sort();
    expected.sort();
    if dets != expected {
        return Err(Error::Inconsistent(format!(
            "step {index}: corner determinants {dets:?} differ from weights {expected:?}"
        )));
    }
    for (s, &v) in slot_vertices.iter().enumerate() {
        if base.corner_determinant(v)? != weights[s] {
            return Err(Error::Inconsistent(format!("step {index}: vertex {v} does not carry slot {s}")));
        }
    }
    let frozen = slot_vertices[0];
    let ellipsoid = frozen_corner_ellipsoid(&base, frozen)?;
    let sharp_point = &ellipsoid.1 / &ellipsoid.0;
    let (lo, hi) = if weights[1] <= weights[2] { (&weights[1], &weights[2]) } else { (&weights[2], &weights[1]) };
    if sharp_point != Rational::new(hi.clone(), lo.clone()) {
        return Err(Error::Inconsistent(format!(
            "step {index}: ellipsoid ratio {sharp_point} differs from weight ratio {hi}/{lo}"
        )));
    }
    let volume_bound = volume_lower_bound(rational_to_f64(&sharp_point), symplectic_volume(&base))?;
    Ok(StaircaseStep {
        index,
        jumped,
        triple,
        weights,
        base,
        frozen_vertex: frozen,
        slot_vertices,
        ellipsoid,
        sharp_point,
        volume_bound,
    })
}

/// Steps `0..=n`: the initial base followed by `n` full mutations alternating slots q and r.
///
/// After each mutation the nodes slide toward the origin, where all cut rays meet.
pub fn symington_sequence(preset: &ManifoldPreset, n: usize) -> Result<Vec<StaircaseStep>> {
    preset.check()?;
    let mut slot_vertices = [0, 1, 2];
    slot_vertices[0] = preset.frozen_vertex;
    let mut steps = vec![make_step(preset, 0, None, preset.seed.clone(), preset.initial_base.clone(), slot_vertices)?];
    for k in 1..=n {
        let prev = steps.last().expect("initial step");
        let slot = if k % 2 == 1 { Slot::Q } else { Slot::R };
        let v = slot_vertices[slot.index()];
        let order = prev.base.cuts[v].nodes;
        let (base, record) = mutate(&prev.base, v, order)?;
        let base = base.with_positions_toward(&PlanePoint::origin())?;
        let mut next_slots = [0; 3];
        for s in Slot::ALL {
            next_slots[s.index()] = if s == slot {
                record.new_vertex_index
            } else {
                record.index_map[slot_vertices[s.index()]]
                    .ok_or_else(|| Error::Inconsistent(format!("slot {s:?} vertex vanished at step {k}")))?
            };
        }
        if base.len() != 3 {
            return Err(Error::NotATriangle(base.len()));
        }
        let triple = vieta_jump(&preset.markov, &prev.triple, slot)?;
        slot_vertices = next_slots;
        steps.push(make_step(preset, k, Some(slot), triple, base, slot_vertices)?);
    }
    Ok(steps)
}

/// Sharp points `s_0, ..., s_{n-1}`.
pub fn sharp_points(preset: &ManifoldPreset, n: usize) -> Result<Vec<Rational>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(symington_sequence(preset, n - 1)?.into_iter().map(|s| s.sharp_point).collect())
}

/// One row of a staircase table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub triple: MarkovTriple,
    pub weights: [BigInt; 3],
    pub ellipsoid: (Rational, Rational),
    pub sharp_point: Rational,
    pub volume_bound: f64,
    pub accumulation_gap: f64,
}

/// Staircase table for steps `1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseReport {
    pub preset: PresetName,
    pub markov: MarkovConfig,
    pub accumulation: QuadraticSurd,
    pub rows: Vec<TableRow>,
}

impl StaircaseReport {
    pub const HEADER: [&'static str; 7] = ["n", "triple", "weights", "ellipsoid", "sharp", "bound", "gap"];

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut cells: Vec<Vec<String>> = vec![Self::HEADER.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            cells.push(vec![
                r.n.to_string(),
                r.triple.to_string(),
                format!("({},{},{})", r.weights[0], r.weights[1], r.weights[2]),
                format!("E({},{})", r.ellipsoid.0, r.ellipsoid.1),
                r.sharp_point.to_string(),
                format!("{:.9}", r.volume_bound),
                format!("{:.3e}", r.accumulation_gap),
            ]);
        }
        let widths: Vec<usize> = (0..Self::HEADER.len()).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Table of steps `1..=n`; `n = 0` gives an empty table.
pub fn staircase_table(preset: &ManifoldPreset, n: usize) -> Result<StaircaseReport> {
    let accumulation = accumulation_point(&preset.markov)?;
    let limit = accumulation.to_f64();
    let rows = symington_sequence(preset, n)?
        .into_iter()
        .skip(1)
        .map(|s| TableRow {
            n: s.index,
            triple: s.display_triple(&preset.markov),
            weights: s.display_weights(&preset.markov),
            accumulation_gap: (limit - rational_to_f64(&s.sharp_point)).abs(),
            ellipsoid: s.ellipsoid,
            sharp_point: s.sharp_point,
            volume_bound: s.volume_bound,
        })
        .collect();
    Ok(StaircaseReport { preset: preset.name, markov: preset.markov, accumulation, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn t(p: i64, q: i64, r: i64) -> MarkovTriple {
        MarkovTriple::new(p, q, r)
    }

    #[test]
    fn presets_are_consistent() {
        for p in ManifoldPreset::all() {
            p.check().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn fibonacci_weights() {
        let p = ManifoldPreset::get(PresetName::Cp2);
        let steps = symington_sequence(&p, 4).unwrap();
        let w: Vec<_> = steps[1..].iter().map(|s| s.display_weights(&p.markov)).collect();
        let expect = [[1, 1, 4], [1, 4, 25], [1, 25, 169], [1, 169, 1156]].map(|a| a.map(BigInt::from));
        assert_eq!(w, expect.to_vec());
    }

    #[test]
    fn golden_sharp_points() {
        let cases: [(PresetName, Vec<Rational>); 4] = [
            (PresetName::Cp2, vec![rat(1, 1), rat(4, 1), rat(25, 4), rat(169, 25)]),
            (PresetName::Cp1xCp1, vec![rat(2, 1), rat(9, 2), rat(50, 9)]),
            (PresetName::Bl3, vec![rat(3, 2), rat(8, 3), rat(27, 8), rat(98, 27)]),
            (PresetName::Bl4, vec![rat(5, 4), rat(9, 5), rat(20, 9), rat(49, 20), rat(125, 49)]),
        ];
        for (name, expect) in cases {
            let got = sharp_points(&ManifoldPreset::get(name), expect.len()).unwrap();
            assert_eq!(got, expect, "{name}");
        }
    }

    #[test]
    fn sharp_points_increase_toward_limit() {
        for p in ManifoldPreset::all() {
            let s = sharp_points(&p, 10).unwrap();
            let limit = accumulation_point(&p.markov).unwrap().to_f64();
            assert!(s.windows(2).all(|w| w[0] < w[1]), "{}", p.name);
            assert!(s.iter().all(|x| rational_to_f64(x) < limit));
            let gaps: Vec<f64> = s.iter().map(|x| limit - rational_to_f64(x)).collect();
            assert!(gaps[3..].windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn area_is_constant_and_frozen_corner_smooth() {
        for p in ManifoldPreset::all() {
            let area = p.initial_base.area();
            for s in symington_sequence(&p, 8).unwrap() {
                assert_eq!(s.base.area(), area);
                assert_eq!(s.base.corner_determinant(s.frozen_vertex).unwrap(), BigInt::from(1));
                assert!(validate(&s.base).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn table_rows() {
        let p = ManifoldPreset::get(PresetName::Cp2);
        let r = staircase_table(&p, 2).unwrap();
        assert_eq!(r.rows[0].triple, t(1, 1, 2));
        assert_eq!(r.rows[0].sharp_point, rat(4, 1));
        assert_eq!(r.rows[1].triple, t(1, 2, 5));
        assert_eq!(r.rows[1].sharp_point, rat(25, 4));
        let b = staircase_table(&ManifoldPreset::get(PresetName::Bl3), 1).unwrap();
        assert_eq!(b.rows[0].triple, t(1, 2, 1));
        assert_eq!(b.rows[0].weights, [1, 8, 3].map(BigInt::from));
        assert_eq!(b.rows[0].sharp_point, rat(8, 3));
        let empty = staircase_table(&p, 0).unwrap();
        assert!(empty.rows.is_empty());
        assert_eq!(empty.to_text().lines().count(), 1);
    }

    #[test]
    fn volume_bound_cases() {
        let half = std::f64::consts::PI.powi(2) / 2.0;
        assert!((volume_lower_bound(1.0, half).unwrap() - 1.0).abs() < 1e-12);
        assert!((volume_lower_bound(4.0, half).unwrap() - 2.0).abs() < 1e-12);
        assert!((volume_lower_bound(4.0, 2.0 * half).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(volume_lower_bound(0.0, 1.0).is_err());
        assert!(volume_lower_bound(1.0, -1.0).is_err());
    }

    #[test]
    fn cp2_ball_bound_is_one_third() {
        let s = symington_sequence(&ManifoldPreset::get(PresetName::Cp2), 1).unwrap();
        assert!((s[0].volume_bound - 1.0 / 3.0).abs() < 1e-12);
        assert!((s[1].volume_bound - 2.0 / 3.0).abs() < 1e-12);
    }
}
