//! Exact plane lattice algebra: wedges, primitive vectors, unimodular maps and affine lengths.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number backed by big integers; always reduced with positive denominator.
pub type Rational = BigRational;

/// Builds a big integer from a machine integer.
pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Builds the rational `n/d`.
///
/// # Panics
/// Panics if `d` is zero.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds an integral rational.
pub fn rat_int(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Largest integer not above `q`.
pub fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Fractional part `q - floor(q)` in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Lossy conversion for reporting.
pub fn rational_to_f64(q: &Rational) -> f64 {
    big_ratio_f64(q.numer(), q.denom())
}

fn big_ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    // Scale down both sides so huge values keep their ratio.
    let bits = n.bits().max(d.bits());
    if bits > 1000 {
        let shift = bits - 1000;
        let n2: BigInt = n >> shift;
        let d2: BigInt = d >> shift;
        return big_ratio_f64(&n2, &d2);
    }
    let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    nf / df
}

/// Integer vector in the plane lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    pub x: BigInt,
    pub y: BigInt,
}

impl LatticeVector {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self { x: x.into(), y: y.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn neg(&self) -> Self {
        Self { x: -&self.x, y: -&self.y }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self { x: &self.x * k, y: &self.y * k }
    }

    /// The same vector as a rational point.
    pub fn to_point(&self) -> PlanePoint {
        PlanePoint { x: rat_int(&self.x), y: rat_int(&self.y) }
    }

    /// Whether the coordinates are coprime.
    pub fn is_primitive(&self) -> bool {
        !self.is_zero() && self.x.gcd(&self.y).is_one()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Determinant `v.x*w.y - v.y*w.x`.
pub fn wedge(v: &LatticeVector, w: &LatticeVector) -> BigInt {
    &v.x * &w.y - &v.y * &w.x
}

/// Euclidean pairing `v.x*w.x + v.y*w.y`.
pub fn dot(v: &LatticeVector, w: &LatticeVector) -> BigInt {
    &v.x * &w.x + &v.y * &w.y
}

/// Splits `v = g*p` with `g = gcd(|x|,|y|) > 0` and `p` primitive.
pub fn primitive_of(v: &LatticeVector) -> Result<(LatticeVector, BigInt)> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = v.x.gcd(&v.y);
    Ok((LatticeVector { x: &v.x / &g, y: &v.y / &g }, g))
}

/// Rational point (or rational vector) in the plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePoint {
    pub x: Rational,
    pub y: Rational,
}

impl PlanePoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self { x: rat(x, 1), y: rat(y, 1) }
    }

    pub fn origin() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    pub fn scale(&self, t: &Rational) -> Self {
        Self { x: &self.x * t, y: &self.y * t }
    }

    /// `self + t*v` for an integer direction `v`.
    pub fn along(&self, v: &LatticeVector, t: &Rational) -> Self {
        Self { x: &self.x + t * rat_int(&v.x), y: &self.y + t * rat_int(&v.y) }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), rational_to_f64(&self.y))
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Determinant of two rational vectors.
pub fn wedge_q(v: &PlanePoint, w: &PlanePoint) -> Rational {
    &v.x * &w.y - &v.y * &w.x
}

/// Euclidean pairing of two rational vectors.
pub fn dot_q(v: &PlanePoint, w: &PlanePoint) -> Rational {
    &v.x * &w.x + &v.y * &w.y
}

/// Pairing of a rational vector with an integer vector.
pub fn dot_qi(v: &PlanePoint, w: &LatticeVector) -> Rational {
    &v.x * rat_int(&w.x) + &v.y * rat_int(&w.y)
}

/// Writes a non-zero rational vector as `t*w` with `w` primitive integral and `t > 0`.
pub fn direction_of(v: &PlanePoint) -> Option<(LatticeVector, Rational)> {
    if v.is_zero() {
        return None;
    }
    let den = v.x.denom().lcm(v.y.denom());
    let xi = v.x.numer() * (&den / v.x.denom());
    let yi = v.y.numer() * (&den / v.y.denom());
    let (w, g) = primitive_of(&LatticeVector { x: xi, y: yi }).ok()?;
    Some((w, Rational::new(g, den)))
}

/// Affine length of the segment `pq`: the `t` with `q - p = t*w`, `w` primitive.
pub fn affine_length(p: &PlanePoint, q: &PlanePoint) -> Rational {
    direction_of(&q.sub(p)).map(|(_, t)| t).unwrap_or_else(Rational::zero)
}

/// Integer 2x2 matrix `[[a, b], [c, d]]` with determinant ±1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl UnimodularMatrix {
    /// Checked constructor.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let m = Self { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        if m.det().abs().is_one() {
            Ok(m)
        } else {
            Err(Error::Malformed(format!("matrix determinant {} is not ±1", m.det())))
        }
    }

    pub fn identity() -> Self {
        Self { a: int(1), b: int(0), c: int(0), d: int(1) }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector { x: &self.a * &v.x + &self.b * &v.y, y: &self.c * &v.x + &self.d * &v.y }
    }

    pub fn apply_point(&self, p: &PlanePoint) -> PlanePoint {
        PlanePoint {
            x: rat_int(&self.a) * &p.x + rat_int(&self.b) * &p.y,
            y: rat_int(&self.c) * &p.x + rat_int(&self.d) * &p.y,
        }
    }

    /// Matrix product `self * o`.
    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        Self { a: &self.d * &det, b: -&self.b * &det, c: -&self.c * &det, d: &self.a * &det }
    }

    pub fn transpose(&self) -> Self {
        Self { a: self.a.clone(), b: self.c.clone(), c: self.b.clone(), d: self.d.clone() }
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        acc
    }

    /// The `SL(2,Z)` map sending the primitive vector `v` to `(1,0)`.
    pub fn sending_to_e1(v: &LatticeVector) -> Result<Self> {
        if !v.is_primitive() {
            return Err(Error::NotPrimitive(v.to_string()));
        }
        let eg = v.x.extended_gcd(&v.y);
        // eg.x * v.x + eg.y * v.y = gcd = ±1
        let s = eg.gcd.signum();
        let (x, y) = (eg.x * &s, eg.y * &s);
        Ok(Self { a: x, b: y, c: -&v.y, d: v.x.clone() })
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Shear `x -> x - (c∧x) c` about the primitive vector `c`.
pub fn shear_matrix(c: &LatticeVector) -> Result<UnimodularMatrix> {
    shear_power(c, &int(1))
}

/// `k`-th power of the shear about `c`: `x -> x - k (c∧x) c`.
pub fn shear_power(c: &LatticeVector, k: &BigInt) -> Result<UnimodularMatrix> {
    if !c.is_primitive() {
        return Err(Error::NotPrimitive(c.to_string()));
    }
    let (cx, cy) = (&c.x, &c.y);
    Ok(UnimodularMatrix {
        a: int(1) + k * cx * cy,
        b: -(k * cx * cx),
        c: k * cy * cy,
        d: int(1) - k * cx * cy,
    })
}

/// Whether `v` is a positive rational multiple of `w`.
pub fn positively_parallel(v: &PlanePoint, w: &PlanePoint) -> bool {
    wedge_q(v, w).is_zero() && dot_q(v, w).is_positive()
}

fn orient(a: &PlanePoint, b: &PlanePoint, c: &PlanePoint) -> i8 {
    let w = wedge_q(&b.sub(a), &c.sub(a));
    if w.is_positive() {
        1
    } else if w.is_negative() {
        -1
    } else {
        0
    }
}

fn within_box(a: &PlanePoint, b: &PlanePoint, p: &PlanePoint) -> bool {
    let (lx, hx) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ly, hy) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= lx && &p.x <= hx && &p.y >= ly && &p.y <= hy
}

/// Whether `p` lies on the closed segment `ab`.
pub fn on_segment(a: &PlanePoint, b: &PlanePoint, p: &PlanePoint) -> bool {
    orient(a, b, p) == 0 && within_box(a, b, p)
}

/// Whether the closed segments `p1p2` and `q1q2` share a point.
pub fn segments_intersect(p1: &PlanePoint, p2: &PlanePoint, q1: &PlanePoint, q2: &PlanePoint) -> bool {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_box(p1, p2, q1))
        || (o2 == 0 && within_box(p1, p2, q2))
        || (o3 == 0 && within_box(q1, q2, p1))
        || (o4 == 0 && within_box(q1, q2, p2))
}

/// Intersection points of two closed segments: none, one point, or the endpoints of a shared piece.
pub fn segment_intersection(p1: &PlanePoint, p2: &PlanePoint, q1: &PlanePoint, q2: &PlanePoint) -> Vec<PlanePoint> {
    if !segments_intersect(p1, p2, q1, q2) {
        return Vec::new();
    }
    let r = p2.sub(p1);
    let s = q2.sub(q1);
    let denom = wedge_q(&r, &s);
    if !denom.is_zero() {
        let t = wedge_q(&q1.sub(p1), &s) / &denom;
        return vec![p1.add(&r.scale(&t))];
    }
    let mut pts: Vec<PlanePoint> = Vec::new();
    for p in [p1, p2] {
        if on_segment(q1, q2, p) && !pts.contains(p) {
            pts.push(p.clone());
        }
    }
    for q in [q1, q2] {
        if on_segment(p1, p2, q) && !pts.contains(q) {
            pts.push(q.clone());
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(&v(1, 0), &v(0, 1)), int(1));
        assert_eq!(wedge(&v(3, 7), &v(3, 7)), int(0));
        assert_eq!(wedge(&v(-1, 1), &v(0, 1)), int(-1));
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive_of(&v(6, -3)).unwrap(), (v(2, -1), int(3)));
        assert_eq!(primitive_of(&v(0, 5)).unwrap(), (v(0, 1), int(5)));
        assert_eq!(primitive_of(&v(2, 3)).unwrap(), (v(2, 3), int(1)));
        assert_eq!(primitive_of(&v(0, 0)), Err(Error::ZeroVector));
    }

    #[test]
    fn shear_examples() {
        let m = shear_matrix(&v(-2, 1)).unwrap();
        assert_eq!(m.apply(&v(3, 0)), v(-3, 3));
        let m = shear_matrix(&v(1, 1)).unwrap();
        assert_eq!(m.apply(&v(0, -3)), v(3, 0));
        let c = v(5, -3);
        assert_eq!(shear_matrix(&c).unwrap().apply(&c), c);
        assert!(shear_matrix(&v(2, 4)).is_err());
    }

    #[test]
    fn shear_power_matches_repeated_product() {
        let c = v(2, -1);
        let m = shear_matrix(&c).unwrap();
        for k in -3..=3 {
            assert_eq!(shear_power(&c, &int(k)).unwrap(), m.pow(k));
        }
    }

    #[test]
    fn affine_length_examples() {
        let p = PlanePoint::from_ints(-1, -1);
        assert_eq!(affine_length(&p, &PlanePoint::from_ints(5, -1)), rat(6, 1));
        assert_eq!(affine_length(&p, &PlanePoint::new(rat(-1, 1), rat(1, 2))), rat(3, 2));
        assert_eq!(affine_length(&PlanePoint::origin(), &PlanePoint::from_ints(2, 4)), rat(2, 1));
        assert_eq!(affine_length(&p, &p), rat(0, 1));
    }

    #[test]
    fn sending_to_e1_is_unimodular() {
        for w in [v(1, -1), v(0, 1), v(-1, -2), v(5, 3), v(-7, 4)] {
            let a = UnimodularMatrix::sending_to_e1(&w).unwrap();
            assert_eq!(a.det(), int(1));
            assert_eq!(a.apply(&w), v(1, 0));
        }
    }

    #[test]
    fn segment_predicates() {
        let p = |x: i64, y: i64| PlanePoint::from_ints(x, y);
        assert!(segments_intersect(&p(0, 0), &p(2, 2), &p(0, 2), &p(2, 0)));
        assert!(!segments_intersect(&p(0, 0), &p(1, 1), &p(2, 2), &p(3, 3)));
        assert!(segments_intersect(&p(0, 0), &p(2, 2), &p(1, 1), &p(3, 3)));
        assert!(segments_intersect(&p(0, 0), &p(2, 0), &p(1, 0), &p(1, 5)));
        assert_eq!(segment_intersection(&p(0, 0), &p(2, 2), &p(0, 2), &p(2, 0)), vec![p(1, 1)]);
        assert!(on_segment(&p(0, 0), &p(4, 2), &p(2, 1)));
        assert!(!on_segment(&p(0, 0), &p(4, 2), &p(6, 3)));
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let big = Rational::new(BigInt::from(10).pow(400) * 3, BigInt::from(10).pow(400));
        assert!((rational_to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
