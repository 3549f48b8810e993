//! Quivers from fans, seed mutation with frozen vertices and the alternating two-set recipe.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::diophantine::{vieta_jump, MarkovConfig, MarkovTriple, Slot};
use crate::error::{Error, Result};
use crate::lattice::{wedge, LatticeVector, Rational};

/// Skew-symmetric exchange matrix; `b[i][j] > 0` counts arrows `i -> j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub b: Vec<Vec<i64>>,
    pub frozen: BTreeSet<usize>,
}

impl Quiver {
    pub fn new(b: Vec<Vec<i64>>, frozen: BTreeSet<usize>) -> Result<Self> {
        let q = Self { b, frozen };
        if q.b.iter().any(|row| row.len() != q.b.len()) {
            return Err(Error::Malformed("exchange matrix is not square".to_string()));
        }
        if !q.is_skew_symmetric() {
            return Err(Error::Malformed("exchange matrix is not skew-symmetric".to_string()));
        }
        if let Some(&f) = q.frozen.iter().find(|&&f| f >= q.size()) {
            return Err(Error::VertexOutOfRange { index: f, len: q.size() });
        }
        Ok(q)
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }

    /// Number of arrows `i -> j`.
    pub fn arrows(&self, i: usize, j: usize) -> u64 {
        self.b[i][j].max(0).unsigned_abs()
    }

    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| self.b[i][j].checked_neg() == Some(self.b[j][i])))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.size() {
            return Err(Error::VertexOutOfRange { index: v, len: self.size() });
        }
        if self.frozen.contains(&v) {
            return Err(Error::FrozenMutation(v));
        }
        Ok(())
    }

    /// Matrix mutation at `v`.
    pub fn mutate(&self, v: usize) -> Result<Quiver> {
        self.check_vertex(v)?;
        let mut b = self.b.clone();
        for (i, row) in b.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = if i == v || j == v {
                    -self.b[i][j]
                } else {
                    let prod = self.b[i][v].checked_mul(self.b[v][j]).ok_or(Error::Overflow("quiver mutation"))?;
                    self.b[i][j]
                        .checked_add(self.b[i][v].signum() * prod.max(0))
                        .ok_or(Error::Overflow("quiver mutation"))?
                };
            }
        }
        Ok(Quiver { b, frozen: self.frozen.clone() })
    }
}

/// `b_ij = rho_i ^ rho_j`.
pub fn quiver_from_fan(rays: &[LatticeVector]) -> Result<Quiver> {
    if let Some(r) = rays.iter().find(|r| !r.is_primitive()) {
        return Err(Error::NotPrimitive(r.to_string()));
    }
    let mut b = vec![vec![0i64; rays.len()]; rays.len()];
    for (i, ri) in rays.iter().enumerate() {
        for (j, rj) in rays.iter().enumerate() {
            b[i][j] = wedge(ri, rj).to_i64().ok_or(Error::Overflow("fan wedge"))?;
        }
    }
    Quiver::new(b, BTreeSet::new())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub quiver: Quiver,
    pub variables: Vec<Rational>,
}

impl Seed {
    pub fn new(quiver: Quiver, variables: Vec<Rational>) -> Result<Self> {
        if variables.len() != quiver.size() {
            return Err(Error::Malformed(format!("{} variables for {} vertices", variables.len(), quiver.size())));
        }
        if variables.iter().any(|x| !x.is_positive()) {
            return Err(Error::Malformed("cluster variables must be positive".to_string()));
        }
        Ok(Self { quiver, variables })
    }

    /// All variables equal to one.
    pub fn ones(quiver: Quiver) -> Self {
        let n = quiver.size();
        Self { quiver, variables: vec![Rational::one(); n] }
    }
}

/// Exchange `x'_v x_v = prod_{b_uv > 0} x_u^{b_uv} + prod_{b_uv < 0} x_u^{-b_uv}` together with matrix mutation.
pub fn mutate_seed(s: &Seed, v: usize) -> Result<Seed> {
    let quiver = s.quiver.mutate(v)?;
    let mut incoming = Rational::one();
    let mut outgoing = Rational::one();
    for (u, x) in s.variables.iter().enumerate() {
        let e = s.quiver.b[u][v];
        let k = e.unsigned_abs().to_usize().ok_or(Error::Overflow("exchange exponent"))?;
        match e.signum() {
            1 => incoming *= num_traits::pow(x.clone(), k),
            -1 => outgoing *= num_traits::pow(x.clone(), k),
            _ => {}
        }
    }
    let mut variables = s.variables.clone();
    variables[v] = (incoming + outgoing) / &s.variables[v];
    Ok(Seed { quiver, variables })
}

/// Fan, pre-mutations and the partition `T1, T2, F` of the vertices (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeConfig {
    pub rays: Vec<LatticeVector>,
    pub pre_mutations: Vec<usize>,
    pub t1: Vec<usize>,
    pub t2: Vec<usize>,
    pub frozen: Vec<usize>,
    /// Variables installed after the pre-mutations.
    pub initial: Vec<Rational>,
}

impl RecipeConfig {
    /// Hexagonal fan numbered counter-clockwise, pre-mutations `v1, v5, v2`, `T1 = {3, 5}`, `T2 = {1, 2, 4}`, `F = {6}`.
    pub fn dp3() -> Self {
        let rays = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)].iter().map(|&(x, y)| LatticeVector::new(x, y)).collect();
        Self {
            rays,
            pre_mutations: vec![0, 4, 1],
            t1: vec![2, 4],
            t2: vec![0, 1, 3],
            frozen: vec![5],
            initial: vec![Rational::one(); 6],
        }
    }

    pub fn check(&self) -> Result<()> {
        let n = self.rays.len();
        let mut seen = vec![false; n];
        for &v in self.t1.iter().chain(&self.t2).chain(&self.frozen) {
            if v >= n {
                return Err(Error::VertexOutOfRange { index: v, len: n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::Malformed(format!("vertex {} lies in two sets", v + 1)));
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Malformed(format!("vertex {} lies in no set", v + 1)));
        }
        if self.t1.is_empty() || self.t2.is_empty() {
            return Err(Error::Malformed("both mutation sets must be non-empty".to_string()));
        }
        if self.initial.len() != n {
            return Err(Error::Malformed(format!("{} initial values for {n} vertices", self.initial.len())));
        }
        if let Some(&v) = self.pre_mutations.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { index: v, len: n });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeRun {
    /// Common value of `T1` after each of its rounds.
    pub t1_values: Vec<BigInt>,
    /// Common value of `T2` after each of its rounds.
    pub t2_values: Vec<BigInt>,
    /// `a_n = T1((n+1)/2)` for odd `n`, `T2(n/2)` for even `n`, starting at `n = 1`.
    pub sequence: Vec<BigInt>,
    /// Seed after the pre-mutations, then after each round.
    pub seeds: Vec<Seed>,
}

fn common_value(seed: &Seed, set: &[usize], name: &str, round: usize) -> Result<BigInt> {
    let first = &seed.variables[set[0]];
    if set.iter().any(|&v| &seed.variables[v] != first) {
        let values: Vec<String> = set.iter().map(|&v| seed.variables[v].to_string()).collect();
        return Err(Error::SetDivergence { set: name.to_string(), round, values: values.join(", ") });
    }
    if !first.is_integer() {
        return Err(Error::NonIntegral(first.to_string()));
    }
    Ok(first.to_integer())
}

/// Pre-mutates, installs the initial values, then alternates full `T1` and `T2` rounds.
pub fn recipe_run(cfg: &RecipeConfig, rounds: usize) -> Result<RecipeRun> {
    cfg.check()?;
    let frozen = cfg.frozen.iter().copied().collect();
    let quiver = Quiver { frozen, ..quiver_from_fan(&cfg.rays)? };
    let mut seed = Seed::ones(quiver);
    for &v in &cfg.pre_mutations {
        seed = mutate_seed(&seed, v)?;
    }
    seed = Seed::new(seed.quiver, cfg.initial.clone())?;
    let mut run = RecipeRun { t1_values: Vec::new(), t2_values: Vec::new(), sequence: Vec::new(), seeds: vec![seed.clone()] };
    for round in 1..=rounds {
        let (set, name) = if round % 2 == 1 { (&cfg.t1, "T1") } else { (&cfg.t2, "T2") };
        for &v in set {
            seed = mutate_seed(&seed, v)?;
        }
        let value = common_value(&seed, set, name, round)?;
        if round % 2 == 1 {
            run.t1_values.push(value.clone());
        } else {
            run.t2_values.push(value.clone());
        }
        run.sequence.push(value);
        run.seeds.push(seed.clone());
    }
    Ok(run)
}

/// Seed triple followed by alternating jumps of the `q` and `r` entries.
pub fn markov_interleaving(cfg: &MarkovConfig, seed: &MarkovTriple, len: usize) -> Result<Vec<BigInt>> {
    let mut out: Vec<BigInt> = seed.0.to_vec();
    let mut t = seed.clone();
    let mut slot = Slot::Q;
    while out.len() < len {
        t = vieta_jump(cfg, &t, slot)?;
        out.push(t.get(slot).clone());
        slot = if slot == Slot::Q { Slot::R } else { Slot::Q };
    }
    out.truncate(len);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaslovSequence {
    pub weighted: Vec<BigInt>,
    /// `A_{n+1} / A_n`.
    pub quotients: Vec<f64>,
}

/// `A_n = odd_weight a_n^2` at odd 0-based index `n`, `even_weight a_n^2` at even index.
pub fn maslov_sequence(a: &[BigInt], odd_weight: u64, even_weight: u64) -> MaslovSequence {
    let weighted: Vec<BigInt> = a
        .iter()
        .enumerate()
        .map(|(n, x)| BigInt::from(if n % 2 == 1 { odd_weight } else { even_weight }) * x * x)
        .collect();
    let quotients = weighted
        .windows(2)
        .map(|w| crate::lattice::rational_to_f64(&Rational::new(w[1].clone(), w[0].clone())))
        .collect();
    MaslovSequence { weighted, quotients }
}

/// Indices `n` where `x_n = 4 x_{n-2} - x_{n-4}` fails.
pub fn linear_recurrence_failures(a: &[BigInt]) -> Vec<usize> {
    (4..a.len()).filter(|&n| a[n] != BigInt::from(4) * &a[n - 2] - &a[n - 4]).collect()
}

/// Indices `n` where `x_n x_{n-3} = x_{n-1} x_{n-2} + 1` fails.
pub fn exchange_recurrence_failures(a: &[BigInt]) -> Vec<usize> {
    (3..a.len()).filter(|&n| &a[n] * &a[n - 3] != &a[n - 1] * &a[n - 2] + BigInt::one()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::accumulation_point;
    use crate::lattice::rat;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn literal_dp3_rays() -> Vec<LatticeVector> {
        [(1, 0), (0, 1), (-1, 0), (0, -1), (-1, 1), (1, -1)].iter().map(|&(x, y)| LatticeVector::new(x, y)).collect()
    }

    #[test]
    fn hexagon_quiver() {
        let q = quiver_from_fan(&literal_dp3_rays()).unwrap();
        assert_eq!((q.b[0][1], q.b[0][4], q.b[1][4], q.b[0][5]), (1, 1, 1, -1));
        assert_eq!(q.b[0][2], 0);
        assert!(q.is_skew_symmetric());
        assert_eq!(q.arrows(0, 1), 1);
        assert_eq!(q.arrows(1, 0), 0);
    }

    #[test]
    fn cp2_fan_is_an_oriented_triangle() {
        let rays = [LatticeVector::new(1, 0), LatticeVector::new(0, 1), LatticeVector::new(-1, -1)];
        let q = quiver_from_fan(&rays).unwrap();
        assert_eq!((q.b[0][1], q.b[1][2], q.b[2][0]), (1, 1, 1));
        assert!(matches!(quiver_from_fan(&[LatticeVector::new(2, 0)]), Err(Error::NotPrimitive(_))));
        let par = quiver_from_fan(&[LatticeVector::new(1, 0), LatticeVector::new(-1, 0)]).unwrap();
        assert_eq!(par.b[0][1], 0);
    }

    #[test]
    fn mutation_is_an_involution() {
        let seed = Seed::new(quiver_from_fan(&literal_dp3_rays()).unwrap(), (1..=6).map(|k| rat(k, 1)).collect()).unwrap();
        for v in 0..6 {
            let back = mutate_seed(&mutate_seed(&seed, v).unwrap(), v).unwrap();
            assert_eq!(back, seed);
            assert!(back.quiver.mutate(v).unwrap().is_skew_symmetric());
        }
    }

    #[test]
    fn frozen_vertices_are_not_mutated() {
        let mut q = quiver_from_fan(&literal_dp3_rays()).unwrap();
        q.frozen.insert(5);
        assert!(matches!(mutate_seed(&Seed::ones(q), 5), Err(Error::FrozenMutation(5))));
    }

    #[test]
    fn first_round_values() {
        let run = recipe_run(&RecipeConfig::dp3(), 1).unwrap();
        let x = &run.seeds[1].variables;
        assert_eq!((x[2].clone(), x[4].clone()), (rat(2, 1), rat(2, 1)));
    }

    #[test]
    fn order_within_a_set_does_not_matter() {
        let cfg = RecipeConfig::dp3();
        let base = recipe_run(&cfg, 4).unwrap();
        for perm in [[1, 0, 3], [3, 1, 0], [0, 3, 1]] {
            let run = recipe_run(&RecipeConfig { t2: perm.to_vec(), ..cfg.clone() }, 4).unwrap();
            assert_eq!(run.seeds.last(), base.seeds.last());
        }
    }

    #[test]
    fn recipe_keeps_sets_equal_and_integral() {
        let run = recipe_run(&RecipeConfig::dp3(), 12).unwrap();
        assert_eq!(run.sequence.len(), 12);
        assert!(run.sequence.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn partition_is_checked() {
        let cfg = RecipeConfig { frozen: vec![], ..RecipeConfig::dp3() };
        assert!(matches!(recipe_run(&cfg, 1), Err(Error::Malformed(_))));
        let cfg = RecipeConfig { t1: vec![2, 4, 5], ..RecipeConfig::dp3() };
        assert!(matches!(recipe_run(&cfg, 1), Err(Error::Malformed(_))));
    }

    #[test]
    fn bl3_interleaving() {
        let cfg = MarkovConfig::new(1, 2, 3, 6).unwrap();
        let a = markov_interleaving(&cfg, &MarkovTriple::new(1, 1, 1), 19).unwrap();
        let expected = big(&[1, 1, 1, 2, 3, 7, 11, 26, 41, 97, 153, 362, 571, 1351, 2131, 5042, 7953, 18817, 29681]);
        assert_eq!(a, expected);
        assert!(linear_recurrence_failures(&a).is_empty());
        assert!(exchange_recurrence_failures(&a).is_empty());
    }

    #[test]
    fn maslov_weights_and_limit() {
        let a = big(&[1, 1, 1, 2, 3, 7, 11]);
        let m = maslov_sequence(&a, 2, 3);
        assert_eq!(m.weighted[..3], big(&[3, 2, 3])[..]);
        assert_eq!((m.weighted[5].clone(), m.weighted[6].clone()), (BigInt::from(98), BigInt::from(363)));
        let cfg = MarkovConfig::new(1, 2, 3, 6).unwrap();
        let a = markov_interleaving(&cfg, &MarkovTriple::new(1, 1, 1), 40).unwrap();
        let m = maslov_sequence(&a, 2, 3);
        let limit = 2.0 + 3f64.sqrt();
        assert!((m.quotients[16] - limit).abs() < 1e-6);
        let acc = accumulation_point(&cfg).unwrap().to_f64();
        assert!((acc - limit).abs() < 1e-12);
        // the gap shrinks by about 2 + sqrt 3 per step
        assert!((m.quotients[15] - acc).abs() < 1e-7);
        assert!((m.quotients[19] - acc).abs() < 1e-9);
    }
}
