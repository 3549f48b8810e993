//! Markov-type equations `C0 p^2 + C1 q^2 + C2 r^2 = m p q r`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{rat_int, rational_to_f64, Rational};

/// Coefficients `(C0, C1, C2)` and right-hand side factor `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkovConfig {
    pub c: [u64; 3],
    pub m: u64,
}

impl MarkovConfig {
    /// Checks positivity and that every coefficient divides `m`.
    pub fn new(c0: u64, c1: u64, c2: u64, m: u64) -> Result<Self> {
        let cfg = Self { c: [c0, c1, c2], m };
        if cfg.c.contains(&0) || m == 0 {
            return Err(Error::InvalidConfig(format!("{cfg}: entries must be positive")));
        }
        if let Some(c) = cfg.c.iter().find(|&&c| !m.is_multiple_of(c)) {
            return Err(Error::InvalidConfig(format!("{cfg}: {c} does not divide {m}")));
        }
        Ok(cfg)
    }

    pub fn coefficient(&self, slot: Slot) -> u64 {
        self.c[slot.index()]
    }
}

impl fmt::Display for MarkovConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{};{})", self.c[0], self.c[1], self.c[2], self.m)
    }
}

/// Slot of a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    P,
    Q,
    R,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::P, Slot::Q, Slot::R];

    pub fn index(self) -> usize {
        match self {
            Slot::P => 0,
            Slot::Q => 1,
            Slot::R => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl std::str::FromStr for Slot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p" | "P" | "0" => Ok(Slot::P),
            "q" | "Q" | "1" => Ok(Slot::Q),
            "r" | "R" | "2" => Ok(Slot::R),
            _ => Err(Error::Malformed(format!("unknown slot {s:?}"))),
        }
    }
}

/// Positive integer triple `(p, q, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkovTriple(pub [BigInt; 3]);

impl MarkovTriple {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, r: impl Into<BigInt>) -> Self {
        Self([p.into(), q.into(), r.into()])
    }

    pub fn get(&self, slot: Slot) -> &BigInt {
        &self.0[slot.index()]
    }

    pub fn max_entry(&self) -> &BigInt {
        self.0.iter().max().expect("three entries")
    }

    /// Weights `(C0 p^2, C1 q^2, C2 r^2)`.
    pub fn weights(&self, cfg: &MarkovConfig) -> [BigInt; 3] {
        [0, 1, 2].map(|i| BigInt::from(cfg.c[i]) * &self.0[i] * &self.0[i])
    }

    /// Sorts entries within classes of equal coefficients.
    pub fn normalized(&self, cfg: &MarkovConfig) -> Self {
        let mut out = self.0.clone();
        for i in 0..3 {
            for j in (i + 1)..3 {
                if cfg.c[i] == cfg.c[j] && out[i] > out[j] {
                    out.swap(i, j);
                }
            }
        }
        // a second pass settles the three-equal case
        for i in 0..3 {
            for j in (i + 1)..3 {
                if cfg.c[i] == cfg.c[j] && out[i] > out[j] {
                    out.swap(i, j);
                }
            }
        }
        Self(out)
    }
}

impl fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Exact equality test for the configured equation.
pub fn is_solution(cfg: &MarkovConfig, t: &MarkovTriple) -> bool {
    if t.0.iter().any(|x| !x.is_positive()) {
        return false;
    }
    let lhs: BigInt = t.weights(cfg).iter().sum();
    let rhs = BigInt::from(cfg.m) * &t.0[0] * &t.0[1] * &t.0[2];
    lhs == rhs
}

/// Replaces the slot entry by the other root of the quadratic it satisfies.
pub fn vieta_jump(cfg: &MarkovConfig, t: &MarkovTriple, slot: Slot) -> Result<MarkovTriple> {
    if !is_solution(cfg, t) {
        return Err(Error::NotASolution(t.to_string()));
    }
    let i = slot.index();
    let others: BigInt = (0..3).filter(|&j| j != i).map(|j| &t.0[j]).product();
    let num = BigInt::from(cfg.m) * others;
    let c = BigInt::from(cfg.c[i]);
    if !num.is_multiple_of(&c) {
        return Err(Error::Divisibility(format!("{c} does not divide {num}")));
    }
    let mut out = t.clone();
    out.0[i] = num / c - &t.0[i];
    Ok(out)
}

/// Closure of the seed under all three jumps, keeping triples with max entry at most `bound`.
pub fn solution_tree(cfg: &MarkovConfig, seed: &MarkovTriple, bound: u64) -> Result<BTreeSet<MarkovTriple>> {
    if !is_solution(cfg, seed) {
        return Err(Error::NotASolution(seed.to_string()));
    }
    let bound = BigInt::from(bound);
    let mut seen = BTreeSet::new();
    if seed.max_entry() > &bound {
        return Ok(seen);
    }
    let mut queue = VecDeque::from([seed.clone()]);
    seen.insert(seed.normalized(cfg));
    while let Some(t) = queue.pop_front() {
        for slot in Slot::ALL {
            let next = vieta_jump(cfg, &t, slot)?;
            if next.max_entry() <= &bound && seen.insert(next.normalized(cfg)) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// Exhaustive scan over `p, q <= bound`, solving the quadratic in `r`.
pub fn brute_force_solutions(cfg: &MarkovConfig, bound: u64) -> BTreeSet<MarkovTriple> {
    let mut out = BTreeSet::new();
    let [c0, c1, c2] = cfg.c.map(|c| c as i128);
    let m = cfg.m as i128;
    let b = bound as i128;
    for p in 1..=b {
        for q in 1..=b {
            let lin = m * p * q;
            let rest = c0 * p * p + c1 * q * q;
            let disc = lin * lin - 4 * c2 * rest;
            if disc < 0 {
                continue;
            }
            let s = disc.sqrt();
            if s * s != disc {
                continue;
            }
            for num in [lin - s, lin + s] {
                if num > 0 && num % (2 * c2) == 0 {
                    let r = num / (2 * c2);
                    if r <= b {
                        let t = MarkovTriple::new(p, q, r);
                        debug_assert!(is_solution(cfg, &t));
                        out.insert(t.normalized(cfg));
                    }
                }
            }
        }
    }
    out
}

/// Whether `gcd(q, r) = 1`.
pub fn qr_coprime(t: &MarkovTriple) -> bool {
    t.0[1].gcd(&t.0[2]).is_one()
}

/// Quadratic surd `a + b sqrt(d)` with square-free `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: Rational,
    pub b: Rational,
    pub d: BigInt,
}

impl QuadraticSurd {
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() || self.d.is_one() {
            return write!(f, "{}", &self.a + &self.b * rat_int(&self.d.sqrt()));
        }
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

/// Splits `n > 0` as `s^2 d` with `d` square-free.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut d = n.clone();
    let mut f = BigInt::from(2);
    while &f * &f <= d {
        let sq = &f * &f;
        while d.is_multiple_of(&sq) {
            d /= &sq;
            s *= &f;
        }
        f += 1;
    }
    (s, d)
}

/// Limit `C1 x^2 / C2` with `x` the larger root of `C1 x^2 - m x + C2 = 0`.
pub fn accumulation_point(cfg: &MarkovConfig) -> Result<QuadraticSurd> {
    let m = BigInt::from(cfg.m);
    let c1c2 = BigInt::from(cfg.c[1]) * BigInt::from(cfg.c[2]);
    let disc = &m * &m - BigInt::from(4) * &c1c2;
    if !disc.is_positive() {
        return Err(Error::NonPositiveDiscriminant(disc.to_string()));
    }
    let (s, d) = square_free_split(&disc);
    let den = BigInt::from(4) * &c1c2;
    Ok(QuadraticSurd {
        a: Rational::new(&m * &m + &disc, den.clone()),
        b: Rational::new(BigInt::from(2) * &m * s, den),
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn cfg(c0: u64, c1: u64, c2: u64, m: u64) -> MarkovConfig {
        MarkovConfig::new(c0, c1, c2, m).unwrap()
    }

    fn t(p: i64, q: i64, r: i64) -> MarkovTriple {
        MarkovTriple::new(p, q, r)
    }

    #[test]
    fn membership_examples() {
        assert!(is_solution(&cfg(1, 1, 1, 3), &t(1, 1, 1)));
        assert!(is_solution(&cfg(1, 1, 1, 3), &t(2, 5, 29)));
        assert!(!is_solution(&cfg(1, 1, 5, 5), &t(1, 1, 1)));
    }

    #[test]
    fn config_requires_divisibility() {
        assert!(MarkovConfig::new(1, 2, 4, 6).is_err());
        assert!(MarkovConfig::new(0, 1, 1, 3).is_err());
    }

    #[test]
    fn jump_chains() {
        let c = cfg(1, 2, 3, 6);
        let a = vieta_jump(&c, &t(1, 1, 1), Slot::Q).unwrap();
        let b = vieta_jump(&c, &a, Slot::R).unwrap();
        let d = vieta_jump(&c, &b, Slot::Q).unwrap();
        assert_eq!((a, b, d), (t(1, 2, 1), t(1, 2, 3), t(1, 7, 3)));

        let c = cfg(1, 1, 5, 5);
        let mut x = t(1, 2, 1);
        let mut got = Vec::new();
        for s in [Slot::Q, Slot::R, Slot::Q, Slot::R] {
            x = vieta_jump(&c, &x, s).unwrap();
            got.push(x.clone());
        }
        assert_eq!(got, vec![t(1, 3, 1), t(1, 3, 2), t(1, 7, 2), t(1, 7, 5)]);

        let c = cfg(1, 1, 1, 3);
        let mut x = vieta_jump(&c, &t(1, 1, 1), Slot::R).unwrap();
        assert_eq!(x, t(1, 1, 2));
        let mut chain = vec![x.clone()];
        for _ in 0..3 {
            x = vieta_jump(&c, &x, Slot::Q).unwrap().normalized(&c);
            chain.push(x.clone());
        }
        assert_eq!(chain, vec![t(1, 1, 2), t(1, 2, 5), t(1, 5, 13), t(1, 13, 34)]);
    }

    #[test]
    fn jump_rejects_non_solutions() {
        assert!(matches!(vieta_jump(&cfg(1, 1, 1, 3), &t(1, 2, 3), Slot::P), Err(Error::NotASolution(_))));
    }

    #[test]
    fn tree_contains_known_triples() {
        let c = cfg(1, 1, 1, 3);
        let tree = solution_tree(&c, &t(1, 1, 1), 1000).unwrap();
        for x in [t(1, 1, 2), t(1, 2, 5), t(2, 5, 29), t(5, 29, 433), t(1, 5, 13), t(1, 13, 34), t(2, 29, 169)] {
            assert!(tree.contains(&x), "{x}");
        }
        let c = cfg(1, 1, 2, 4);
        let tree = solution_tree(&c, &t(1, 1, 1), 100).unwrap();
        for x in [t(1, 3, 1), t(1, 3, 5), t(1, 17, 5), t(1, 17, 29)] {
            assert!(tree.contains(&x.normalized(&c)), "{x}");
        }
        assert!(solution_tree(&c, &t(1, 1, 1), 0).unwrap().is_empty());
        assert_eq!(solution_tree(&c, &t(1, 1, 1), 1).unwrap().len(), 1);
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_solutions(&cfg(1, 1, 5, 5), 1).is_empty());
        let got = brute_force_solutions(&cfg(1, 2, 3, 6), 3);
        assert_eq!(got, [t(1, 1, 1), t(1, 2, 1), t(1, 2, 3)].into_iter().collect());
        let c = cfg(1, 1, 1, 3);
        assert_eq!(brute_force_solutions(&c, 34), solution_tree(&c, &t(1, 1, 1), 34).unwrap());
    }

    #[test]
    fn accumulation_points() {
        let cases = [
            (cfg(1, 1, 1, 3), rat(7, 2), rat(3, 2), 5, (7.0 + 3.0 * 5f64.sqrt()) / 2.0),
            (cfg(1, 1, 2, 4), rat(3, 1), rat(2, 1), 2, 3.0 + 2.0 * 2f64.sqrt()),
            (cfg(1, 2, 3, 6), rat(2, 1), rat(1, 1), 3, 2.0 + 3f64.sqrt()),
            (cfg(1, 1, 5, 5), rat(3, 2), rat(1, 2), 5, (3.0 + 5f64.sqrt()) / 2.0),
        ];
        for (c, a, b, d, f) in cases {
            let s = accumulation_point(&c).unwrap();
            assert_eq!((s.a.clone(), s.b.clone(), s.d.clone()), (a, b, BigInt::from(d)), "{c}");
            assert!((s.to_f64() - f).abs() < 1e-12);
        }
        assert!(accumulation_point(&cfg(1, 1, 1, 1)).is_err());
    }

    #[test]
    fn square_free_parts() {
        assert_eq!(square_free_split(&BigInt::from(12)), (BigInt::from(2), BigInt::from(3)));
        assert_eq!(square_free_split(&BigInt::from(8)), (BigInt::from(2), BigInt::from(2)));
        assert_eq!(square_free_split(&BigInt::from(5)), (BigInt::from(1), BigInt::from(5)));
    }
}
