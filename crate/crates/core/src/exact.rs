//! Exact rational scalars, planar points, orientation predicates, lines and
//! projective transformations.
//!
//! Everything here is error-free: no floating point is involved, so every
//! predicate returns the true sign of the underlying determinant.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Builds `num / den` from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let trimmed = s.trim();
    let value = Rational::from_str(trimmed).map_err(|_| ParseRationalError(trimmed.to_string()))?;
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{0}`")]
pub struct ParseRationalError(pub String);

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], ser: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        strings.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rational>, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        strings
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "rational_str")]
    pub x: Rational,
    #[serde(with = "rational_str")]
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// Point with integer coordinates.
    pub fn int(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    /// Point with coordinates `(xn/xd, yn/yd)`.
    pub fn rat(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(rat(xn, xd), rat(yn, yd))
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::new(&self.x + &other.x, &self.y + &other.y)
    }

    pub fn scale(&self, k: &Rational) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let half = rat(1, 2);
        Point::new((&self.x + &other.x) * &half, (&self.y + &other.y) * &half)
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        self.add(&other.sub(self).scale(t))
    }

    /// Approximate coordinates for display only.
    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Lossy conversion used by rendering code.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators or denominators: scale both down first.
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n.max(d) - 1000).max(0) as u32;
        let nn = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let dd = (r.denom() >> shift).to_f64().unwrap_or(1.0);
        nn / dd
    })
}

/// 2-D cross product `u.x * v.y - u.y * v.x`.
pub fn cross(u: &Point, v: &Point) -> Rational {
    &u.x * &v.y - &u.y * &v.x
}

/// `det [[1, p.x, p.y], [1, q.x, q.y], [1, r.x, r.y]]`: twice the signed area
/// of the triangle `pqr`.
pub fn signed_vol(p: &Point, q: &Point, r: &Point) -> Rational {
    cross(&q.sub(p), &r.sub(p))
}

/// Sign of [`signed_vol`]: `+1` for counterclockwise, `-1` clockwise, `0`
/// collinear.
pub fn orientation(p: &Point, q: &Point, r: &Point) -> i8 {
    // Homogeneous integer determinant; avoids the gcd of every rational step.
    let h = |p: &Point| {
        let (xn, xd) = (p.x.numer(), p.x.denom());
        let (yn, yd) = (p.y.numer(), p.y.denom());
        (xn * yd, yn * xd, xd * yd)
    };
    let (x1, y1, w1) = h(p);
    let (x2, y2, w2) = h(q);
    let (x3, y3, w3) = h(r);
    let det = &x1 * (&y2 * &w3 - &y3 * &w2) - &y1 * (&x2 * &w3 - &x3 * &w2) + &w1 * (&x2 * &y3 - &x3 * &y2);
    match det.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

pub fn sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub fn collinear(p: &Point, q: &Point, r: &Point) -> bool {
    signed_vol(p, q, r).is_zero()
}

/// True when `p` lies on the closed segment `[a, b]`.
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    collinear(a, b, p)
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Closed segment intersection test.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(c, a, b))
        || (o2 == 0 && on_segment(d, a, b))
        || (o3 == 0 && on_segment(a, c, d))
        || (o4 == 0 && on_segment(b, c, d))
}

/// Locus `a*x + b*y + c = 0`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    #[serde(with = "rational_str")]
    pub a: Rational,
    #[serde(with = "rational_str")]
    pub b: Rational,
    #[serde(with = "rational_str")]
    pub c: Rational,
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*x + {}*y + {} = 0", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("degenerate line: both linear coefficients vanish")]
    DegenerateLine,
    #[error("point {0} lies on the vanishing line of the projective map")]
    VanishingLine(Box<Point>),
    #[error("singular projective matrix")]
    SingularMap,
}

impl Line {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self, GeomError> {
        if a.is_zero() && b.is_zero() {
            return Err(GeomError::DegenerateLine);
        }
        Ok(Line { a, b, c })
    }

    /// The line through two distinct points.
    pub fn through(p: &Point, q: &Point) -> Result<Self, GeomError> {
        let a = &q.y - &p.y;
        let b = &p.x - &q.x;
        let c = -(&a * &p.x + &b * &p.y);
        Line::new(a, b, c)
    }

    /// Value of `a*x + b*y + c`; its sign tells the side of the line.
    pub fn eval(&self, p: &Point) -> Rational {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn side(&self, p: &Point) -> i8 {
        sign(&self.eval(p))
    }

    pub fn negated(&self) -> Line {
        Line {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineMeet {
    Point(Point),
    AtInfinity,
    Coincident,
}

pub fn line_intersection(l1: &Line, l2: &Line) -> LineMeet {
    let det = &l1.a * &l2.b - &l2.a * &l1.b;
    if det.is_zero() {
        let ac = &l1.a * &l2.c - &l2.a * &l1.c;
        let bc = &l1.b * &l2.c - &l2.b * &l1.c;
        if ac.is_zero() && bc.is_zero() {
            LineMeet::Coincident
        } else {
            LineMeet::AtInfinity
        }
    } else {
        let x = (&l1.b * &l2.c - &l2.b * &l1.c) / &det;
        let y = (&l1.c * &l2.a - &l2.c * &l1.a) / &det;
        LineMeet::Point(Point::new(x, y))
    }
}

/// A projective transformation of the plane acting on homogeneous column
/// vectors `(x, y, 1)`. The image of `p` is `(X/W, Y/W)`; points with `W = 0`
/// form the vanishing line.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectiveMap {
    #[serde(with = "matrix_str")]
    pub m: [[Rational; 3]; 3],
}

mod matrix_str {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[[Rational; 3]; 3], ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect();
        rows.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<[[Rational; 3]; 3], D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(de)?;
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            return Err(serde::de::Error::custom("expected a 3x3 matrix"));
        }
        let parse = |s: &String| parse_rational(s).map_err(serde::de::Error::custom);
        let mut out: [[Rational; 3]; 3] = Default::default();
        for (i, row) in rows.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                out[i][j] = parse(cell)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for ProjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .m
            .iter()
            .map(|r| format!("[{}, {}, {}]", r[0], r[1], r[2]))
            .collect();
        write!(f, "ProjectiveMap[{}]", rows.join(", "))
    }
}

fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

impl ProjectiveMap {
    pub fn new(m: [[Rational; 3]; 3]) -> Result<Self, GeomError> {
        if det3(&m).is_zero() {
            return Err(GeomError::SingularMap);
        }
        Ok(ProjectiveMap { m })
    }

    pub fn identity() -> Self {
        let (o, z) = (Rational::one(), Rational::zero());
        ProjectiveMap {
            m: [
                [o.clone(), z.clone(), z.clone()],
                [z.clone(), o.clone(), z.clone()],
                [z.clone(), z, o],
            ],
        }
    }

    /// The affine map `p -> L p + t` with `L = [[a, b], [c, d]]`.
    pub fn affine(a: Rational, b: Rational, c: Rational, d: Rational, t: Point) -> Result<Self, GeomError> {
        let (o, z) = (Rational::one(), Rational::zero());
        ProjectiveMap::new([[a, b, t.x], [c, d, t.y], [z.clone(), z, o]])
    }

    pub fn determinant(&self) -> Rational {
        det3(&self.m)
    }

    pub fn is_affine(&self) -> bool {
        self.m[2][0].is_zero() && self.m[2][1].is_zero()
    }

    /// Preimage of the line at infinity, or `None` for affine maps.
    pub fn vanishing_line(&self) -> Option<Line> {
        Line::new(self.m[2][0].clone(), self.m[2][1].clone(), self.m[2][2].clone()).ok()
    }

    /// The homogeneous weight `W` of `p`; its sign says on which side of the
    /// vanishing line `p` lies.
    pub fn weight(&self, p: &Point) -> Rational {
        &self.m[2][0] * &p.x + &self.m[2][1] * &p.y + &self.m[2][2]
    }

    pub fn apply(&self, p: &Point) -> Result<Point, GeomError> {
        let w = self.weight(p);
        if w.is_zero() {
            return Err(GeomError::VanishingLine(Box::new(p.clone())));
        }
        let x = &self.m[0][0] * &p.x + &self.m[0][1] * &p.y + &self.m[0][2];
        let y = &self.m[1][0] * &p.x + &self.m[1][1] * &p.y + &self.m[1][2];
        Ok(Point::new(x / &w, y / w))
    }

    pub fn inverse(&self) -> ProjectiveMap {
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0];
        // Adjugate; the scalar factor 1/det is irrelevant projectively but we
        // keep it so that affine maps stay normalised with m[2][2] = 1.
        let det = self.determinant();
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        let mut out: [[Rational; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = &adj[i][j] / &det;
            }
        }
        ProjectiveMap { m: out }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &ProjectiveMap) -> ProjectiveMap {
        let mut out: [[Rational; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Rational::zero();
                for k in 0..3 {
                    acc += &self.m[i][k] * &other.m[k][j];
                }
                out[i][j] = acc;
            }
        }
        ProjectiveMap { m: out }
    }
}

/// Convenience wrapper matching the free-function style of the predicates.
pub fn apply_projective(g: &ProjectiveMap, p: &Point) -> Result<Point, GeomError> {
    g.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&Point::int(0, 0), &Point::int(1, 0), &Point::int(0, 1)), 1);
        assert_eq!(orientation(&Point::int(0, 0), &Point::int(1, 1), &Point::int(2, 2)), 0);
        assert_eq!(orientation(&Point::int(0, 0), &Point::int(0, 1), &Point::int(1, 0)), -1);
    }

    #[test]
    fn signed_vol_examples() {
        assert_eq!(
            signed_vol(&Point::int(0, 0), &Point::int(1, 0), &Point::int(0, 1)),
            int(1)
        );
        assert_eq!(
            signed_vol(&Point::int(0, 0), &Point::int(1, 0), &Point::rat(1, 2, 1, 2)),
            rat(1, 2)
        );
        let p = Point::rat(3, 7, -2, 5);
        assert!(signed_vol(&p, &p, &Point::int(4, 4)).is_zero());
    }

    #[test]
    fn line_intersection_examples() {
        let x0 = Line::new(int(1), int(0), int(0)).unwrap();
        let y0 = Line::new(int(0), int(1), int(0)).unwrap();
        assert_eq!(line_intersection(&x0, &y0), LineMeet::Point(Point::int(0, 0)));
        let y1 = Line::new(int(0), int(1), int(-1)).unwrap();
        assert_eq!(line_intersection(&y0, &y1), LineMeet::AtInfinity);
        let y0_scaled = Line::new(int(0), int(3), int(0)).unwrap();
        assert_eq!(line_intersection(&y0, &y0_scaled), LineMeet::Coincident);

        let s0 = Point::int(-1, 1);
        let s1 = Point::int(0, 0);
        let s2 = Point::int(1, 0);
        let s3 = Point::int(2, 1);
        let l1 = Line::through(&s0, &s1).unwrap();
        let l2 = Line::through(&s2, &s3).unwrap();
        assert_eq!(line_intersection(&l1, &l2), LineMeet::Point(Point::rat(1, 2, -1, 2)));
    }

    #[test]
    fn degenerate_line_rejected() {
        assert_eq!(Line::new(int(0), int(0), int(1)), Err(GeomError::DegenerateLine));
        assert!(Line::through(&Point::int(1, 1), &Point::int(1, 1)).is_err());
    }

    #[test]
    fn projective_examples() {
        let p = Point::rat(5, 3, -7, 2);
        assert_eq!(ProjectiveMap::identity().apply(&p).unwrap(), p);

        let shift = ProjectiveMap::affine(int(1), int(0), int(0), int(2), Point::int(1, 0)).unwrap();
        assert_eq!(shift.apply(&Point::int(1, 1)).unwrap(), Point::int(2, 2));

        // W = y + 1 vanishes on y = -1.
        let g = ProjectiveMap::new([
            [int(1), int(0), int(0)],
            [int(0), int(1), int(0)],
            [int(0), int(1), int(1)],
        ])
        .unwrap();
        assert_eq!(
            g.apply(&Point::int(0, -1)),
            Err(GeomError::VanishingLine(Box::new(Point::int(0, -1))))
        );
        assert_eq!(g.vanishing_line().unwrap().side(&Point::int(5, -1)), 0);
    }

    #[test]
    fn singular_map_rejected() {
        let m = [
            [int(1), int(2), int(3)],
            [int(2), int(4), int(6)],
            [int(0), int(0), int(1)],
        ];
        assert_eq!(ProjectiveMap::new(m), Err(GeomError::SingularMap));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat(6, -4).to_string(), "-3/2");
        assert_eq!(int(5).to_string(), "5");
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("4/2").unwrap(), int(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn segment_intersection_cases() {
        let a = Point::int(0, 0);
        let b = Point::int(2, 0);
        assert!(segments_intersect(&a, &b, &Point::int(1, -1), &Point::int(1, 1)));
        assert!(segments_intersect(&a, &b, &Point::int(2, 0), &Point::int(3, 3)));
        assert!(!segments_intersect(&a, &b, &Point::int(3, 0), &Point::int(4, 0)));
        assert!(segments_intersect(&a, &b, &Point::int(1, 0), &Point::int(4, 0)));
    }
}
