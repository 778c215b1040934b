//! Brute-force injectivity test for simplexwise-linear maps.
//!
//! Deliberately naive: every pair of triangles is compared with exact
//! segment and point-in-triangle tests. It does not use the roof, keys or
//! any structure the extension algorithms rely on.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::SLMap;
use crate::complex::{SLDisk, Tri};
use crate::exact::{orientation, segments_intersect, signed_vol, Point, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Embedding,
    MissingImage { vertex: usize },
    NonPositive { triangle: usize },
    Overlap { triangles: (usize, usize) },
    BoundaryNotSimple,
}

impl Verdict {
    pub fn is_embedding(&self) -> bool {
        matches!(self, Verdict::Embedding)
    }
}

pub fn is_embedding(d: &SLDisk, m: &SLMap) -> bool {
    embedding_verdict(d, m).is_embedding()
}

/// Full verdict with a witness for the first failure found.
pub fn embedding_verdict(d: &SLDisk, m: &SLMap) -> Verdict {
    for v in d.used_vertices() {
        if m.get(v).is_none() {
            return Verdict::MissingImage { vertex: v };
        }
    }
    let pts: Vec<Point> = (0..d.vertices().len())
        .map(|v| m.get(v).cloned().unwrap_or_else(|| d.point(v).clone()))
        .collect();
    for (i, t) in d.triangles().iter().enumerate() {
        if !signed_vol(&pts[t[0]], &pts[t[1]], &pts[t[2]]).is_positive() {
            return Verdict::NonPositive { triangle: i };
        }
    }
    if let Some(pair) = first_overlap(&pts, d.triangles()) {
        return Verdict::Overlap { triangles: pair };
    }
    let poly: Vec<Point> = d.boundary().iter().map(|&v| pts[v].clone()).collect();
    if !polygon_is_simple(&poly) {
        return Verdict::BoundaryNotSimple;
    }
    Verdict::Embedding
}

/// First pair of triangles whose images meet outside their common face.
/// Triangles are assumed non-degenerate; their orientation does not matter.
pub fn first_overlap(points: &[Point], triangles: &[Tri]) -> Option<(usize, usize)> {
    let boxes: Vec<_> = triangles.iter().map(|t| bounding_box(points, t)).collect();
    for i in 0..triangles.len() {
        for j in i + 1..triangles.len() {
            let (a, b) = (&boxes[i], &boxes[j]);
            let apart = a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2;
            if apart {
                continue;
            }
            if !meet_properly(points, &triangles[i], &triangles[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// `(min x, max x, min y, max y)`.
fn bounding_box<'a>(pts: &'a [Point], t: &Tri) -> (&'a Rational, &'a Rational, &'a Rational, &'a Rational) {
    let xs = t.iter().map(|&v| &pts[v].x);
    let ys = t.iter().map(|&v| &pts[v].y);
    (
        xs.clone().min().unwrap(),
        xs.max().unwrap(),
        ys.clone().min().unwrap(),
        ys.max().unwrap(),
    )
}

fn meet_properly(pts: &[Point], s: &Tri, t: &Tri) -> bool {
    let shared: Vec<usize> = s.iter().copied().filter(|v| t.contains(v)).collect();
    match shared.len() {
        3 => false,
        2 => {
            let (a, b) = (&pts[shared[0]], &pts[shared[1]]);
            let p = s.iter().find(|v| !shared.contains(v)).unwrap();
            let q = t.iter().find(|v| !shared.contains(v)).unwrap();
            orientation(a, b, &pts[*p]) * orientation(a, b, &pts[*q]) < 0
        }
        1 => {
            let c = shared[0];
            let others = |tri: &Tri| -> [usize; 2] {
                let k = tri.iter().position(|&v| v == c).unwrap();
                [tri[(k + 1) % 3], tri[(k + 2) % 3]]
            };
            let apex = &pts[c];
            let [s1, s2] = others(s);
            let [t1, t2] = others(t);
            let (s1, s2, t1, t2) = (&pts[s1], &pts[s2], &pts[t1], &pts[t2]);
            // Two pointed cones at the same apex meet only at the apex iff
            // neither contains a generator of the other.
            !(in_closed_cone(apex, s1, s2, t1)
                || in_closed_cone(apex, s1, s2, t2)
                || in_closed_cone(apex, t1, t2, s1)
                || in_closed_cone(apex, t1, t2, s2))
        }
        _ => {
            let es = [(s[0], s[1]), (s[1], s[2]), (s[2], s[0])];
            let et = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])];
            for &(a, b) in &es {
                for &(c, d) in &et {
                    if segments_intersect(&pts[a], &pts[b], &pts[c], &pts[d]) {
                        return false;
                    }
                }
            }
            // No boundary crossing: overlap only if one contains the other.
            !(in_closed_triangle(&pts[t[0]], pts, s) || in_closed_triangle(&pts[s[0]], pts, t))
        }
    }
}

/// Whether `p` lies in the closed cone at `apex` spanned by `a - apex` and
/// `b - apex` (a pointed cone of angle below pi).
fn in_closed_cone(apex: &Point, a: &Point, b: &Point, p: &Point) -> bool {
    let o = orientation(apex, a, b);
    debug_assert!(o != 0);
    orientation(apex, a, p) * o >= 0 && orientation(apex, p, b) * o >= 0
}

fn in_closed_triangle(p: &Point, pts: &[Point], t: &Tri) -> bool {
    let (a, b, c) = (&pts[t[0]], &pts[t[1]], &pts[t[2]]);
    let o = orientation(a, b, c);
    orientation(a, b, p) * o >= 0 && orientation(b, c, p) * o >= 0 && orientation(c, a, p) * o >= 0
}

/// Twice the signed area enclosed by the polygon.
pub(crate) fn polygon_area2(poly: &[Point]) -> Rational {
    let n = poly.len();
    let mut acc = Rational::zero();
    for i in 0..n {
        let (p, q) = (&poly[i], &poly[(i + 1) % n]);
        acc += &p.x * &q.y - &p.y * &q.x;
    }
    acc
}

/// A closed polygon is simple when its vertices are distinct, adjacent edges
/// meet only at their common vertex and other edges are disjoint.
pub(crate) fn polygon_is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if poly[i] == poly[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (&poly[j], &poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared endpoint; they must not fold back onto each other.
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if orientation(p, shared, q) == 0 && dot(&p.sub(shared), &q.sub(shared)).is_positive() {
                    return false;
                }
                if n == 3 && orientation(&poly[0], &poly[1], &poly[2]) == 0 {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    area_nonzero(poly)
}

fn area_nonzero(poly: &[Point]) -> bool {
    !polygon_area2(poly).is_zero()
}

fn dot(u: &Point, v: &Point) -> Rational {
    &u.x * &v.x + &u.y * &v.y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;

    #[test]
    fn identity_on_fan_is_embedding() {
        let d = fan();
        assert!(is_embedding(&d, &SLMap::identity(&d)));
    }

    #[test]
    fn moving_centre_outside_breaks_embedding() {
        let d = fan();
        let mut m = SLMap::identity(&d);
        m.insert(4, Point::int(2, 2));
        assert!(!is_embedding(&d, &m));
    }

    #[test]
    fn collapsing_centre_breaks_embedding() {
        let d = fan();
        let mut m = SLMap::identity(&d);
        m.insert(4, Point::int(0, 0));
        assert!(!is_embedding(&d, &m));
    }

    #[test]
    fn shared_vertex_overlap_detected() {
        // Two triangles sharing vertex 0 whose cones overlap.
        let pts = vec![
            Point::int(0, 0),
            Point::int(4, 0),
            Point::int(0, 4),
            Point::int(4, 1),
            Point::int(1, 4),
        ];
        assert_eq!(first_overlap(&pts, &[[0, 1, 2], [0, 3, 4]]), Some((0, 1)));
        let apart = vec![
            Point::int(0, 0),
            Point::int(4, 0),
            Point::int(4, 1),
            Point::int(-4, 0),
            Point::int(-4, -1),
        ];
        assert_eq!(first_overlap(&apart, &[[0, 1, 2], [0, 3, 4]]), None);
    }

    #[test]
    fn nested_triangles_detected() {
        let pts = vec![
            Point::int(0, 0),
            Point::int(10, 0),
            Point::int(0, 10),
            Point::int(1, 1),
            Point::int(2, 1),
            Point::int(1, 2),
        ];
        assert_eq!(first_overlap(&pts, &[[0, 1, 2], [3, 4, 5]]), Some((0, 1)));
    }

    #[test]
    fn polygon_simplicity() {
        let square = vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)];
        assert!(polygon_is_simple(&square));
        let bowtie = vec![Point::int(0, 0), Point::int(1, 1), Point::int(1, 0), Point::int(0, 1)];
        assert!(!polygon_is_simple(&bowtie));
        let flat = vec![Point::int(0, 0), Point::int(1, 0), Point::int(2, 0)];
        assert!(!polygon_is_simple(&flat));
    }
}
