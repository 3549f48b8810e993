//! Integer certificates for chains of curves in the edge neighbourhood.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::tripod::cut_slope_data;
use crate::diophantine::{is_solution, MarkovConfig, MarkovTriple};
use crate::error::{Error, Result};
use crate::lattice::{wedge, LatticeVector};
use crate::staircase::PresetName;

/// Manifold whose chain is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainCase {
    PxP,
    Bl3,
    Bl4,
}

impl ChainCase {
    pub const ALL: [ChainCase; 3] = [ChainCase::PxP, ChainCase::Bl3, ChainCase::Bl4];

    pub fn config(self) -> MarkovConfig {
        let (a, b, c, m) = match self {
            ChainCase::PxP => (1, 1, 2, 4),
            ChainCase::Bl3 => (1, 2, 3, 6),
            ChainCase::Bl4 => (1, 1, 5, 5),
        };
        MarkovConfig::new(a, b, c, m).expect("chain config")
    }

    pub fn preset(self) -> PresetName {
        match self {
            ChainCase::PxP => PresetName::Cp1xCp1,
            ChainCase::Bl3 => PresetName::Bl3,
            ChainCase::Bl4 => PresetName::Bl4,
        }
    }

    /// Intersection form and the chain of classes, in chain order.
    fn classes(self) -> (Vec<i64>, Vec<(&'static str, Vec<i64>)>) {
        match self {
            // basis H1, H2 with H1.H2 = 1
            ChainCase::PxP => (vec![], vec![("H1", vec![1, 0]), ("H2", vec![0, 1])]),
            // basis H, E1, E2, E3
            ChainCase::Bl3 => (
                vec![1, -1, -1, -1],
                vec![
                    ("E2", vec![0, 0, 1, 0]),
                    ("B3", vec![1, -1, -1, 0]),
                    ("E1", vec![0, 1, 0, 0]),
                    ("B2", vec![1, -1, 0, -1]),
                ],
            ),
            // basis H, E1, E2, E3, E4
            ChainCase::Bl4 => (
                vec![1, -1, -1, -1, -1],
                vec![
                    ("A2", vec![0, 0, 0, 0, 1]),
                    ("A1", vec![1, -1, 0, 0, -1]),
                    ("A5", vec![0, 1, 0, 0, 0]),
                ],
            ),
        }
    }
}

impl fmt::Display for ChainCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainCase::PxP => "pxp",
            ChainCase::Bl3 => "bl3",
            ChainCase::Bl4 => "bl4",
        })
    }
}

impl FromStr for ChainCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pxp" | "cp1xcp1" => Ok(ChainCase::PxP),
            "bl3" => Ok(ChainCase::Bl3),
            "bl4" => Ok(ChainCase::Bl4),
            _ => Err(Error::Malformed(format!("unknown chain case {s:?}"))),
        }
    }
}

/// Relation checked between the two sides of an identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Lt,
}

/// One checked integer relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub name: String,
    pub left: BigInt,
    pub right: BigInt,
    pub relation: Relation,
    pub pass: bool,
}

impl Identity {
    fn eq(name: impl Into<String>, left: BigInt, right: BigInt) -> Self {
        let pass = left == right;
        Self { name: name.into(), left, right, relation: Relation::Eq, pass }
    }

    fn lt(name: impl Into<String>, left: BigInt, right: BigInt) -> Self {
        let pass = left < right;
        Self { name: name.into(), left, right, relation: Relation::Lt, pass }
    }
}

/// Derived integers and checked identities for one solution `(1, q, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCertificate {
    pub case: ChainCase,
    pub q: BigInt,
    pub r: BigInt,
    pub a: BigInt,
    pub b: Option<BigInt>,
    pub u: Option<LatticeVector>,
    /// Admissible linking pairs `(delta, epsilon)`.
    pub linking: Vec<(u8, u8)>,
    pub identities: Vec<Identity>,
    pub classes: Vec<String>,
    pub intersection_count: i64,
}

impl ChainCertificate {
    pub fn is_valid(&self) -> bool {
        self.identities.iter().all(|i| i.pass)
    }

    pub fn failures(&self) -> Vec<&Identity> {
        self.identities.iter().filter(|i| !i.pass).collect()
    }
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn pairing(form: &[i64], x: &[i64], y: &[i64]) -> i64 {
    if form.is_empty() {
        // hyperbolic plane
        x[0] * y[1] + x[1] * y[0]
    } else {
        form.iter().zip(x).zip(y).map(|((f, a), b)| f * a * b).sum()
    }
}

fn chain_identities(case: ChainCase, out: &mut Vec<Identity>) -> (Vec<String>, i64) {
    let (form, classes) = case.classes();
    let mut count = 0;
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            let v = pairing(&form, &classes[i].1, &classes[j].1);
            let expected = if j == i + 1 { 1 } else { 0 };
            if j == i + 1 {
                count += v;
            }
            out.push(Identity::eq(format!("{}.{}", classes[i].0, classes[j].0), big(v), big(expected)));
        }
    }
    (classes.iter().map(|c| c.0.to_string()).collect(), count)
}

/// Checks the compatibility identities of the chain for the solution `(1, q, r)`.
pub fn verify_chain(case: ChainCase, q: &BigInt, r: &BigInt) -> Result<ChainCertificate> {
    let cfg = case.config();
    let t = MarkovTriple::new(1, q.clone(), r.clone());
    if !is_solution(&cfg, &t) {
        return Err(Error::NotASolution(t.to_string()));
    }
    let d = cut_slope_data(&cfg, &t)?;
    let v = LatticeVector::new(-r.clone(), d.m.clone());
    let w = LatticeVector::new(q.clone(), -d.l.clone());
    let mut ids = vec![
        Identity::eq("markov", t.weights(&cfg).iter().sum(), big(cfg.m as i64) * q * r),
        Identity::eq("r l - q m", r * &d.l - q * &d.m, d.k.clone()),
        Identity::eq("v ^ w", wedge(&v, &w), d.k.clone()),
    ];
    let qr = q * r;
    let (mut b_out, mut u_out, mut linking) = (None, None, Vec::new());
    let a;
    match case {
        ChainCase::PxP => {
            if q.is_even() || r.is_even() {
                return Err(Error::Inconsistent(format!("q = {q} and r = {r} must be odd")));
            }
            a = (q - 1) / 2;
            let b = (r - 1) / 2;
            let e2 = LatticeVector::new(0, 1);
            let u = v.scale(&a).add(&w.scale(&b)).add(&e2);
            ids.push(Identity::eq("q v + r w + 2 (0,1)", {
                let s = v.scale(q).add(&w.scale(r)).add(&e2.scale(&big(2)));
                s.x.abs() + s.y.abs()
            }, big(0)));
            ids.push(Identity::eq("w ^ u", wedge(&w, &u), big(1)));
            ids.push(Identity::eq("u ^ v", wedge(&u, &v), big(1)));
            ids.push(Identity::eq("2 u ^ (0,1)", big(2) * wedge(&u, &e2), r - q));
            ids.push(Identity::eq("2qr = r^2 + a + 1 + aq", big(2) * &qr, r * r + &a + 1 + &a * q));
            ids.push(Identity::eq("4qr = 2r^2 + q^2 + 1", big(4) * &qr, big(2) * r * r + q * q + 1));
            if q > r {
                ids.push(Identity::eq("1 + 2r^2 = q (4r - q)", big(1) + big(2) * r * r, q * (big(4) * r - q)));
                ids.push(Identity::lt("q < 4r", q.clone(), big(4) * r));
                ids.push(Identity::lt("q - 5r < 0", q - big(5) * r, big(0)));
            } else if r > q {
                ids.push(Identity::lt("0 < u ^ (0,1)", big(0), wedge(&u, &e2)));
                ids.push(Identity::lt("-q - 3r < 0", -q - big(3) * r, big(0)));
            }
            b_out = Some(b);
            u_out = Some(u);
        }
        ChainCase::Bl3 => {
            if r.is_even() {
                return Err(Error::Inconsistent(format!("r = {r} must be odd")));
            }
            let b = (r - 1) / 2;
            let residue = q.mod_floor(&big(3));
            let (shift, sum, allowed): (i64, u8, Vec<(u8, u8)>) = if residue == big(1) {
                (1, 1, vec![(0, 1), (1, 0)])
            } else if residue == big(2) {
                (2, 2, vec![(1, 1), (2, 0)])
            } else {
                return Err(Error::Inconsistent(format!("q = {q} is divisible by 3")));
            };
            a = (q - shift) / 3;
            for &(delta, eps) in &allowed {
                let rhs = &b + big(eps as i64) + &b * r + big(shift) * &a + big(delta as i64) + &a * q;
                if rhs == qr {
                    linking.push((delta, eps));
                }
            }
            let (delta, eps) = linking.first().copied().unwrap_or(allowed[0]);
            ids.push(Identity::eq(
                format!("qr = b + e + br + {shift}a + d + aq (d={delta}, e={eps}, d+e={sum})"),
                qr.clone(),
                &b + big(eps as i64) + &b * r + big(shift) * &a + big(delta as i64) + &a * q,
            ));
            ids.push(Identity::eq("6qr = 3r^2 + 2q^2 + 1", big(6) * &qr, big(3) * r * r + big(2) * q * q + 1));
            b_out = Some(b);
        }
        ChainCase::Bl4 => {
            let residue = q.mod_floor(&big(5));
            if residue == big(2) {
                a = (q - 2) / 5;
                ids.push(Identity::eq("qr = r^2 + 2a + 1 + aq", qr.clone(), r * r + big(2) * &a + 1 + &a * q));
            } else if residue == big(3) {
                a = (q - 3) / 5;
                ids.push(Identity::eq("qr = r^2 + 3a + 2 + aq", qr.clone(), r * r + big(3) * &a + 2 + &a * q));
            } else {
                return Err(Error::Inconsistent(format!("q = {q} is not 2 or 3 mod 5")));
            }
            ids.push(Identity::eq("5qr = 5r^2 + q^2 + 1", big(5) * &qr, big(5) * r * r + q * q + 1));
        }
    }
    let (classes, intersection_count) = chain_identities(case, &mut ids);
    let expected_count = match case {
        ChainCase::PxP => 1,
        ChainCase::Bl3 => 3,
        ChainCase::Bl4 => 2,
    };
    ids.push(Identity::eq("intersection count", big(intersection_count), big(expected_count)));
    if a.is_negative() {
        return Err(Error::Inconsistent(format!("negative a = {a}")));
    }
    Ok(ChainCertificate {
        case,
        q: q.clone(),
        r: r.clone(),
        a,
        b: b_out,
        u: u_out,
        linking,
        identities: ids,
        classes,
        intersection_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::staircase::{symington_sequence, ManifoldPreset};

    #[test]
    fn worked_instances() {
        let c = verify_chain(ChainCase::Bl4, &big(7), &big(2)).unwrap();
        assert!(c.is_valid());
        assert_eq!(c.a, big(1));
        let id = c.identities.iter().find(|i| i.name.starts_with("qr = r^2 + 2a")).unwrap();
        assert_eq!((id.left.clone(), id.right.clone()), (big(14), big(4 + 2 + 1 + 7)));

        let c = verify_chain(ChainCase::Bl3, &big(2), &big(3)).unwrap();
        assert!(c.is_valid());
        assert_eq!((c.a.clone(), c.b.clone()), (big(0), Some(big(1))));
        assert_eq!(c.linking, vec![(1, 1), (2, 0)]);

        let c = verify_chain(ChainCase::PxP, &big(1), &big(1)).unwrap();
        assert!(c.is_valid());
        assert_eq!(c.u, Some(LatticeVector::new(0, 1)));
        assert_eq!(c.intersection_count, 1);
    }

    #[test]
    fn first_six_staircase_solutions() {
        for case in ChainCase::ALL {
            let steps = symington_sequence(&ManifoldPreset::get(case.preset()), 5).unwrap();
            for s in steps {
                let c = verify_chain(case, &s.triple.0[1], &s.triple.0[2]).unwrap();
                assert!(c.is_valid(), "{case} {}: {:?}", s.triple, c.failures());
            }
        }
    }

    #[test]
    fn non_solutions_are_rejected() {
        assert!(matches!(verify_chain(ChainCase::Bl4, &big(2), &big(2)), Err(Error::NotASolution(_))));
    }
}
