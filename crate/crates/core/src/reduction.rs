//! Projective normalisation of convex disks and the plateau collapse.
//!
//! A convex boundary polygon with a chosen natural edge `mu` is moved by a
//! projective map so that `mu` becomes `[0,1] x {0}` and the rest of the
//! polygon lies in the open strip `(0,1) x (0, inf)`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{convexity, natural_edges, Convexity, NaturalEdge, SLCircle, SLDisk};
use crate::exact::{
    int, line_intersection, orientation, rat, GeomError, Line, LineMeet, Point, ProjectiveMap, Rational,
};
use crate::extension::SLMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("boundary is not convex")]
    NotConvex,
    #[error("no natural edge with index {0}")]
    NotNaturalEdge(usize),
    #[error("apex coincides with an endpoint of the base edge")]
    DegenerateApex,
    #[error("bottom edge carries no flat vertex")]
    NoPlateau,
    #[error("result is not in reduced form: {0}")]
    NotReduced(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Meeting point of the two lines adjacent to the base edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Apex {
    Finite(Point),
    /// Parallel lines; the direction points away from the disk.
    AtInfinity(Point),
}

/// A disk moved into reduced form, with the map that did it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub map: ProjectiveMap,
    #[serde(with = "crate::io::disk_repr")]
    pub disk: SLDisk,
    /// Index into the natural edges of the boundary circle.
    pub base_edge: usize,
}

/// Reduces `d` on its natural edge number `mu`.
pub fn reduce(d: &SLDisk, mu: usize) -> Result<ReducedForm, ReductionError> {
    let circle = d.boundary_circle();
    if convexity(&circle) == Convexity::NotConvex {
        return Err(ReductionError::NotConvex);
    }
    let runs = natural_edges(&circle);
    let run = runs.get(mu).ok_or(ReductionError::NotNaturalEdge(mu))?;
    let g = reduce_polygon(&circle.points, run)?;
    let mut coords = Vec::new();
    for v in d.used_vertices() {
        coords.push((v, g.apply(d.point(v))?));
    }
    let disk = d.with_coords(coords.iter().map(|(v, p)| (*v, p)));
    Ok(ReducedForm {
        map: g,
        disk,
        base_edge: mu,
    })
}

/// The projective map putting a convex counterclockwise polygon into
/// reduced form on the natural edge `mu` (positions into `points`).
pub fn reduce_polygon(points: &[Point], mu: &NaturalEdge) -> Result<ProjectiveMap, ReductionError> {
    let circle = SLCircle::from_points(points.to_vec());
    if convexity(&circle) == Convexity::NotConvex {
        return Err(ReductionError::NotConvex);
    }
    let n = points.len();
    let corners: Vec<usize> = (0..n).filter(|&i| circle.turn(i) != 0).collect();
    let k1 = corners
        .iter()
        .position(|&i| i == mu.first())
        .ok_or(ReductionError::NotNaturalEdge(mu.first()))?;
    let k2 = (k1 + 1) % corners.len();
    if corners[k2] != mu.last() {
        return Err(ReductionError::NotNaturalEdge(mu.first()));
    }
    let c = corners.len();
    let s0 = &points[corners[(k1 + c - 1) % c]];
    let s1 = &points[corners[k1]];
    let s2 = &points[corners[k2]];
    let s3 = &points[corners[(k2 + 1) % c]];

    let t = apex(s0, s1, s2, s3)?;
    let projective = match &t {
        Apex::Finite(p) if orientation(s1, s2, p) > 0 => ProjectiveMap::identity(),
        _ => {
            let line = choose_vanishing_line(&t, s1, s2, points)?;
            ProjectiveMap::new([
                [Rational::one(), Rational::zero(), -s1.x.clone()],
                [Rational::zero(), Rational::one(), -s1.y.clone()],
                [line.a.clone(), line.b.clone(), line.c.clone()],
            ])?
        }
    };

    // After the projective step the apex is finite and on the disk's side.
    let q: Vec<Point> = [s0, s1, s2, s3]
        .iter()
        .map(|p| projective.apply(p))
        .collect::<Result<_, _>>()?;
    let t2 = match apex(&q[0], &q[1], &q[2], &q[3])? {
        Apex::Finite(p) if orientation(&q[1], &q[2], &p) > 0 => p,
        other => {
            return Err(ReductionError::NotReduced(format!(
                "apex {other:?} after projective step"
            )))
        }
    };

    // Affine part: q1 -> (0,0), q2 -> (1,0), t2 -> (1/2, 1).
    let u1 = q[2].sub(&q[1]);
    let u2 = t2.sub(&q[1].midpoint(&q[2]));
    let det = &u1.x * &u2.y - &u2.x * &u1.y;
    let (l00, l01) = (&u2.y / &det, -&u2.x / &det);
    let (l10, l11) = (-&u1.y / &det, &u1.x / &det);
    let shift = Point::new(-(&l00 * &q[1].x + &l01 * &q[1].y), -(&l10 * &q[1].x + &l11 * &q[1].y));
    let affine = ProjectiveMap::affine(l00, l01, l10, l11, shift)?;
    let g = affine.compose(&projective);

    let image: Vec<Point> = points.iter().map(|p| g.apply(p)).collect::<Result<_, _>>()?;
    check_reduced(&image, mu).map_err(ReductionError::NotReduced)?;
    Ok(g)
}

fn apex(s0: &Point, s1: &Point, s2: &Point, s3: &Point) -> Result<Apex, ReductionError> {
    if s0 == s3 {
        return Ok(Apex::Finite(s0.clone()));
    }
    let l1 = Line::through(s0, s1)?;
    let l2 = Line::through(s2, s3)?;
    match line_intersection(&l1, &l2) {
        LineMeet::Point(p) => Ok(Apex::Finite(p)),
        LineMeet::AtInfinity => Ok(Apex::AtInfinity(s1.sub(s0))),
        LineMeet::Coincident => Err(ReductionError::NotConvex),
    }
}

/// A line crossing the open segments `(t, s1)` and `(t, s2)` and missing the
/// hull, oriented positive on the hull. For a finite apex it joins the two
/// segment midpoints; for an apex at infinity it is the base line pushed
/// along the direction of the adjacent edges.
pub fn choose_vanishing_line(t: &Apex, s1: &Point, s2: &Point, hull: &[Point]) -> Result<Line, ReductionError> {
    let line = match t {
        Apex::Finite(p) => {
            if p == s1 || p == s2 {
                return Err(ReductionError::DegenerateApex);
            }
            Line::through(&p.midpoint(s1), &p.midpoint(s2))?
        }
        Apex::AtInfinity(w) => Line::through(&s1.add(w), &s2.add(w))?,
    };
    let line = if line.eval(s1).is_negative() {
        line.negated()
    } else {
        line
    };
    if hull.iter().any(|p| !line.eval(p).is_positive()) {
        return Err(ReductionError::NotReduced("vanishing line meets the hull".into()));
    }
    Ok(line)
}

/// Checks the reduced-form conditions for a polygon with base run `mu`.
pub fn check_reduced(points: &[Point], mu: &NaturalEdge) -> Result<(), String> {
    let (zero, one) = (Rational::zero(), Rational::one());
    if points[mu.first()] != Point::int(0, 0) || points[mu.last()] != Point::int(1, 0) {
        return Err("base edge endpoints are not (0,0) and (1,0)".into());
    }
    for (i, p) in points.iter().enumerate() {
        if mu.positions.contains(&i) {
            if !(p.y.is_zero() && p.x >= zero && p.x <= one) {
                return Err(format!("base vertex {i} off the unit segment"));
            }
        } else if !(p.x > zero && p.x < one && p.y.is_positive()) {
            return Err(format!("vertex {i} outside the open strip"));
        }
    }
    Ok(())
}

/// Parabola through `(0,0)` and `(1,0)` with depth `h` at `x = 1/2`.
pub fn collapse_height(x: &Rational, h: &Rational) -> Rational {
    -(int(4) * h * x * (Rational::one() - x))
}

/// Moves the flat vertices of the bottom edge `[0,1] x {0}` of a reduced
/// circle straight down onto the parabola of depth `h`; other vertices stay
/// put. Returns the map on all circle vertices.
pub fn plateau_collapse(c: &SLCircle, h: &Rational) -> Result<SLMap, ReductionError> {
    if !h.is_positive() {
        return Err(ReductionError::NotReduced("depth must be positive".into()));
    }
    let origin = Point::int(0, 0);
    let unit = Point::int(1, 0);
    if !c.points.contains(&origin) || !c.points.contains(&unit) {
        return Err(ReductionError::NotReduced("base edge missing".into()));
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    let mut moved = 0;
    let mut out = SLMap::new();
    for (v, p) in c.vertices.iter().zip(&c.points) {
        if p.y.is_zero() && p.x > zero && p.x < one {
            moved += 1;
            out.insert(*v, Point::new(p.x.clone(), collapse_height(&p.x, h)));
        } else {
            out.insert(*v, p.clone());
        }
    }
    if moved == 0 {
        return Err(ReductionError::NoPlateau);
    }
    Ok(out)
}

/// Default parabola depth.
pub fn default_depth() -> Rational {
    rat(1, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;

    fn base_run(d: &SLDisk) -> usize {
        let c = d.boundary_circle();
        natural_edges(&c)
            .iter()
            .position(|r| r.first() == 0)
            .expect("run starting at vertex 0")
    }

    #[test]
    fn triangle_is_already_reduced() {
        let d = triangle();
        let r = reduce(&d, base_run(&d)).unwrap();
        assert!(r.map.is_affine());
        assert_eq!(r.disk.point(0), &Point::int(0, 0));
        assert_eq!(r.disk.point(1), &Point::int(1, 0));
        assert_eq!(r.disk.point(2), &Point::int(1, 2).scale(&rat(1, 2)));
    }

    #[test]
    fn square_needs_a_projective_step() {
        let d = fan();
        let r = reduce(&d, base_run(&d)).unwrap();
        assert!(!r.map.is_affine());
        let c = r.disk.boundary_circle();
        check_reduced(&c.points, &natural_edges(&c)[r.base_edge]).unwrap();
        // Round trip on every vertex.
        let inv = r.map.inverse();
        for v in d.used_vertices() {
            assert_eq!(&inv.apply(r.disk.point(v)).unwrap(), d.point(v));
        }
        // The exact values of this construction.
        assert_eq!(r.disk.point(2), &Point::rat(3, 4, 1, 2));
        assert_eq!(r.disk.point(3), &Point::rat(1, 4, 1, 2));
        assert_eq!(r.disk.point(4), &Point::rat(1, 2, 1, 3));
    }

    #[test]
    fn non_convex_is_rejected() {
        let d = SLDisk::new(
            vec![
                Point::int(0, 0),
                Point::int(2, 0),
                Point::int(2, 1),
                Point::int(1, 1),
                Point::int(1, 2),
                Point::int(0, 2),
            ],
            vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5]],
        )
        .unwrap();
        assert_eq!(reduce(&d, 0), Err(ReductionError::NotConvex));
    }

    #[test]
    fn vanishing_line_examples() {
        let (s1, s2) = (Point::int(0, 0), Point::int(1, 0));
        let hull = vec![Point::int(0, 0), Point::int(1, 0), Point::rat(1, 2, 1, 1)];
        let l = choose_vanishing_line(&Apex::Finite(Point::rat(1, 2, -1, 2)), &s1, &s2, &hull).unwrap();
        assert!(l.eval(&Point::rat(1, 4, -1, 4)).is_zero());
        assert!(l.eval(&Point::rat(3, 4, -1, 4)).is_zero());
        let l = choose_vanishing_line(&Apex::AtInfinity(Point::int(0, -1)), &s1, &s2, &hull).unwrap();
        assert!(l.a.is_zero());
        assert!(l.eval(&Point::int(7, -1)).is_zero());
        assert_eq!(
            choose_vanishing_line(&Apex::Finite(s1.clone()), &s1, &s2, &hull),
            Err(ReductionError::DegenerateApex)
        );
    }

    #[test]
    fn collapse_midpoint() {
        let c = SLCircle::from_points(vec![
            Point::int(0, 0),
            Point::rat(1, 2, 0, 1),
            Point::int(1, 0),
            Point::rat(1, 2, 1, 1),
        ]);
        let h = rat(1, 8);
        let m = plateau_collapse(&c, &h).unwrap();
        assert_eq!(m.at(1), &Point::new(rat(1, 2), -h));
        assert_eq!(m.at(3), &Point::rat(1, 2, 1, 1));
    }

    #[test]
    fn collapse_two_points_is_strictly_convex() {
        let c = SLCircle::from_points(vec![
            Point::int(0, 0),
            Point::rat(1, 3, 0, 1),
            Point::rat(2, 3, 0, 1),
            Point::int(1, 0),
            Point::rat(1, 2, 1, 1),
        ]);
        let m = plateau_collapse(&c, &default_depth()).unwrap();
        assert!(m.at(1).y.is_negative() && m.at(2).y.is_negative());
        let moved = SLCircle::from_points((0..5).map(|i| m.at(i).clone()).collect());
        assert_eq!(convexity(&moved), Convexity::StrictlyConvex);
    }

    #[test]
    fn collapse_without_plateau() {
        let c = SLCircle::from_points(vec![Point::int(0, 0), Point::int(1, 0), Point::rat(1, 2, 1, 1)]);
        assert_eq!(plateau_collapse(&c, &default_depth()), Err(ReductionError::NoPlateau));
    }
}
