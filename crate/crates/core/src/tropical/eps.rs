//! Numbers `a + b ε` with rational `a, b` and a positive infinitesimal `ε`.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::lattice::{floor, LatticeVector, Rational};

/// Ordered lexicographically: standard part first, then the `ε` coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Eps {
    pub std: Rational,
    pub eps: Rational,
}

impl Eps {
    pub fn new(std: Rational, eps: Rational) -> Self {
        Self { std, eps }
    }

    pub fn real(std: Rational) -> Self {
        Self { std, eps: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn epsilon() -> Self {
        Self { std: Rational::zero(), eps: Rational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.std.is_zero() && self.eps.is_zero()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self { std: &self.std * k, eps: &self.eps * k }
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        let f = floor(&self.std);
        if self.std.is_integer() && self.eps < Rational::zero() {
            f - 1
        } else {
            f
        }
    }

    /// Value minus its floor, in `[0, 1)`.
    pub fn frac(&self) -> Self {
        Self { std: &self.std - Rational::from_integer(self.floor()), eps: self.eps.clone() }
    }
}

impl Ord for Eps {
    fn cmp(&self, o: &Self) -> Ordering {
        self.std.cmp(&o.std).then_with(|| self.eps.cmp(&o.eps))
    }
}

impl PartialOrd for Eps {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Add for &Eps {
    type Output = Eps;
    fn add(self, o: &Eps) -> Eps {
        Eps { std: &self.std + &o.std, eps: &self.eps + &o.eps }
    }
}

impl Sub for &Eps {
    type Output = Eps;
    fn sub(self, o: &Eps) -> Eps {
        Eps { std: &self.std - &o.std, eps: &self.eps - &o.eps }
    }
}

impl Neg for &Eps {
    type Output = Eps;
    fn neg(self) -> Eps {
        Eps { std: -&self.std, eps: -&self.eps }
    }
}

impl Mul<&BigInt> for &Eps {
    type Output = Eps;
    fn mul(self, k: &BigInt) -> Eps {
        Eps { std: &self.std * k, eps: &self.eps * k }
    }
}

/// Point of the plane with coordinates in `Q + Q ε`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct EpsPoint {
    pub x: Eps,
    pub y: Eps,
}

impl EpsPoint {
    pub fn new(x: Eps, y: Eps) -> Self {
        Self { x, y }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    /// `self + t d` for an integral direction `d`.
    pub fn along(&self, d: &LatticeVector, t: &Eps) -> Self {
        Self { x: &self.x + &(t * &d.x), y: &self.y + &(t * &d.y) }
    }

    /// `self ^ d` for an integral vector `d`.
    pub fn wedge_int(&self, d: &LatticeVector) -> Eps {
        &(&self.x * &d.y) - &(&self.y * &d.x)
    }

    /// Reduction modulo the integer lattice.
    pub fn mod_lattice(&self) -> Self {
        Self { x: self.x.frac(), y: self.y.frac() }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self { x: self.x.scale(k), y: self.y.scale(k) }
    }

    /// Standard parts.
    pub fn standard(&self) -> (Rational, Rational) {
        (self.x.std.clone(), self.y.std.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    #[test]
    fn ordering_and_floor() {
        let a = Eps::new(rat(1, 1), rat(-1, 1));
        assert!(a < Eps::real(rat(1, 1)));
        assert!(a > Eps::real(rat(99, 100)));
        assert_eq!(a.floor(), BigInt::from(0));
        assert_eq!(a.frac(), Eps::new(rat(1, 1), rat(-1, 1)));
        assert_eq!(Eps::new(rat(3, 2), rat(-1, 1)).floor(), BigInt::from(1));
        assert_eq!(Eps::new(rat(-2, 1), rat(1, 1)).frac(), Eps::epsilon());
    }
}
