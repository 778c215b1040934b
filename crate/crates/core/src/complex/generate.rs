//! Seeded random disks for tests and corpora.
//!
//! The boundary polygon is drawn first (points on a rational circle, flat
//! vertices on its edges, or two x-monotone chains), triangulated, refined by
//! inserting interior vertices, and finally shuffled by random edge flips.
//! Boundary vertices are numbered `0..n_boundary` counterclockwise and
//! interior vertices follow.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{edge, SLDisk, Tri};
use crate::exact::{int, orientation, rat, signed_vol, Point, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiskShape {
    StrictlyConvex,
    /// Convex with at least one flat boundary vertex when `n_boundary > 3`.
    Convex,
    /// Transverse to the verticals, usually not convex.
    TrV,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub n_interior: usize,
    pub n_boundary: usize,
    pub shape: DiskShape,
    /// Random flip attempts after refinement; `None` means one per triangle.
    pub flips: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("a disk needs at least 3 boundary vertices, got {0}")]
    TooFewBoundary(usize),
    #[error("generation failed after {0} attempts")]
    GenerationFailed(usize),
}

pub fn generate_disk(
    seed: u64,
    n_interior: usize,
    n_boundary: usize,
    shape: DiskShape,
) -> Result<SLDisk, GenerateError> {
    generate_disk_with(&GenParams {
        seed,
        n_interior,
        n_boundary,
        shape,
        flips: None,
    })
}

pub fn generate_disk_with(p: &GenParams) -> Result<SLDisk, GenerateError> {
    if p.n_boundary < 3 {
        return Err(GenerateError::TooFewBoundary(p.n_boundary));
    }
    const ATTEMPTS: usize = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..ATTEMPTS {
        if let Some(d) = attempt(p, &mut rng) {
            return Ok(d);
        }
    }
    Err(GenerateError::GenerationFailed(ATTEMPTS))
}

fn attempt(p: &GenParams, rng: &mut ChaCha8Rng) -> Option<SLDisk> {
    let poly = match p.shape {
        DiskShape::StrictlyConvex => circle_points(p.n_boundary, rng),
        DiskShape::Convex => convex_with_flats(p.n_boundary, rng),
        DiskShape::TrV => monotone_polygon(p.n_boundary, rng),
    };
    let mut pts = poly.clone();
    let mut tris = if p.n_interior > 0 && p.shape != DiskShape::TrV {
        pts.push(snapped_in(&average(&poly), &poly));
        let c = poly.len();
        (0..c).map(|i| [i, (i + 1) % c, c]).collect()
    } else {
        ear_clip(&poly)?
    };
    while pts.len() < p.n_boundary + p.n_interior {
        let ti = rng.gen_range(0..tris.len());
        let [a, b, c] = tris[ti];
        let w: [i64; 3] = [rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4)];
        let s = w.iter().sum::<i64>();
        let q = Point::new(
            (&pts[a].x * int(w[0]) + &pts[b].x * int(w[1]) + &pts[c].x * int(w[2])) / int(s),
            (&pts[a].y * int(w[0]) + &pts[b].y * int(w[1]) + &pts[c].y * int(w[2])) / int(s),
        );
        let q = snapped(&q, [&pts[a], &pts[b], &pts[c]]);
        let v = pts.len();
        pts.push(q);
        tris[ti] = [a, b, v];
        tris.push([b, c, v]);
        tris.push([c, a, v]);
    }
    let flips = p.flips.unwrap_or(tris.len());
    for _ in 0..flips {
        random_flip(&pts, &mut tris, rng);
    }
    let d = SLDisk::new(pts, tris).ok()?;
    (d.boundary().len() == p.n_boundary).then_some(d)
}

/// Rounds `q` to a coarse dyadic grid when that keeps it strictly inside
/// the triangle, so coordinates stay small under repeated splitting.
fn snapped(q: &Point, [a, b, c]: [&Point; 3]) -> Point {
    snapped_in(q, &[a.clone(), b.clone(), c.clone()])
}

/// Same for a convex counterclockwise polygon.
fn snapped_in(q: &Point, poly: &[Point]) -> Point {
    let n = poly.len();
    for bits in [4u32, 8, 12, 16, 24] {
        let scale = Rational::from_integer(BigInt::from(1u64 << bits));
        let round = |v: &Rational| (v * &scale + rat(1, 2)).floor() / &scale;
        let p = Point::new(round(&q.x), round(&q.y));
        if (0..n).all(|i| orientation(&poly[i], &poly[(i + 1) % n], &p) > 0) {
            return p;
        }
    }
    q.clone()
}

fn average(pts: &[Point]) -> Point {
    let n = int(pts.len() as i64);
    Point::new(
        pts.iter().map(|p| &p.x).sum::<Rational>() / &n,
        pts.iter().map(|p| &p.y).sum::<Rational>() / &n,
    )
}

/// `n` distinct points of the unit circle, counterclockwise, from the
/// rational parametrisation at parameters `k / 8`.
fn circle_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let span = (4 * n as i64).max(24);
    let mut ks: Vec<i64> = (-span..=span).collect();
    ks.shuffle(rng);
    let mut ks: Vec<i64> = ks.into_iter().take(n).collect();
    ks.sort_unstable();
    ks.into_iter()
        .map(|k| {
            let t = rat(k, 8);
            let d = int(1) + &t * &t;
            Point::new((int(1) - &t * &t) / &d, int(2) * &t / &d)
        })
        .collect()
}

fn convex_with_flats(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    if n == 3 {
        return circle_points(3, rng);
    }
    let flats = rng.gen_range(1..=(n - 3).min(1 + n / 3));
    let corners = circle_points(n - flats, rng);
    let c = corners.len();
    let mut per_edge = vec![0usize; c];
    for _ in 0..flats {
        per_edge[rng.gen_range(0..c)] += 1;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..c {
        let (a, b) = (&corners[i], &corners[(i + 1) % c]);
        out.push(a.clone());
        let k = per_edge[i] as i64;
        for j in 1..=k {
            out.push(a.lerp(b, &rat(j, k + 1)));
        }
    }
    out
}

/// Lower chain left to right below the axis, upper chain right to left
/// above it. Ends are sometimes vertical edges.
fn monotone_polygon(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let y_low = |rng: &mut ChaCha8Rng| rat(-rng.gen_range(2..=16), 4);
    let y_high = |rng: &mut ChaCha8Rng| rat(rng.gen_range(2..=16), 4);
    let vertical_left = n >= 4 && rng.gen_bool(0.3);
    let vertical_right = n >= 5 && rng.gen_bool(0.3);
    let ends = 2 + vertical_left as usize + vertical_right as usize;
    let rest = n - ends;
    let n_low = rng.gen_range(0..=rest);
    let n_up = rest - n_low;
    let width = 4 * (rest as i64 + 2);
    let xs = |k: usize, rng: &mut ChaCha8Rng| -> Vec<i64> {
        let mut v: Vec<i64> = (1..width).collect();
        v.shuffle(rng);
        let mut v: Vec<i64> = v.into_iter().take(k).collect();
        v.sort_unstable();
        v
    };
    let (lx, ux) = (xs(n_low, rng), xs(n_up, rng));
    let mut out = Vec::with_capacity(n);
    if vertical_left {
        out.push(Point::new(int(0), y_high(rng)));
        out.push(Point::new(int(0), y_low(rng)));
    } else {
        out.push(Point::new(int(0), rat(rng.gen_range(-4..=4), 4)));
    }
    for x in lx {
        out.push(Point::new(int(x), y_low(rng)));
    }
    if vertical_right {
        out.push(Point::new(int(width), y_low(rng)));
        out.push(Point::new(int(width), y_high(rng)));
    } else {
        out.push(Point::new(int(width), rat(rng.gen_range(-4..=4), 4)));
    }
    for x in ux.into_iter().rev() {
        out.push(Point::new(int(x), y_high(rng)));
    }
    // The first vertex of a vertical left end is the upper one; rotate so the
    // cycle starts at the bottom-left and stays counterclockwise.
    if vertical_left {
        out.rotate_left(1);
    }
    out
}

/// Ear clipping of a simple counterclockwise polygon; ears must be strictly
/// convex and contain no other polygon vertex.
fn ear_clip(poly: &[Point]) -> Option<Vec<Tri>> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut tris = Vec::new();
    while idx.len() > 3 {
        let k = idx.len();
        let ear = (0..k).find(|&i| {
            let (a, b, c) = (idx[(i + k - 1) % k], idx[i], idx[(i + 1) % k]);
            orientation(&poly[a], &poly[b], &poly[c]) > 0
                && idx
                    .iter()
                    .all(|&v| v == a || v == b || v == c || !in_closed(&poly[v], &poly[a], &poly[b], &poly[c]))
        })?;
        tris.push([idx[(ear + k - 1) % k], idx[ear], idx[(ear + 1) % k]]);
        idx.remove(ear);
    }
    if orientation(&poly[idx[0]], &poly[idx[1]], &poly[idx[2]]) <= 0 {
        return None;
    }
    tris.push([idx[0], idx[1], idx[2]]);
    Some(tris)
}

fn in_closed(p: &Point, a: &Point, b: &Point, c: &Point) -> bool {
    orientation(a, b, p) >= 0 && orientation(b, c, p) >= 0 && orientation(c, a, p) >= 0
}

/// Flips one random interior edge if both new triangles are positive and
/// the new edge is not already present.
fn random_flip(pts: &[Point], tris: &mut [Tri], rng: &mut ChaCha8Rng) {
    let ti = rng.gen_range(0..tris.len());
    let k = rng.gen_range(0..3);
    let t = tris[ti];
    let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
    let Some(tj) = tris
        .iter()
        .position(|s| (0..3).any(|i| s[i] == b && s[(i + 1) % 3] == a))
    else {
        return;
    };
    let s = tris[tj];
    let d = *s.iter().find(|&&v| v != a && v != b).unwrap();
    let existing: BTreeSet<_> = tris
        .iter()
        .flat_map(|t| (0..3).map(move |i| edge(t[i], t[(i + 1) % 3])))
        .collect();
    if existing.contains(&edge(c, d)) {
        return;
    }
    let n1 = [a, d, c];
    let n2 = [d, b, c];
    let pos = |t: &Tri| signed_vol(&pts[t[0]], &pts[t[1]], &pts[t[2]]).is_positive();
    if pos(&n1) && pos(&n2) {
        tris[ti] = n1;
        tris[tj] = n2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{convexity, is_trv, Convexity};

    #[test]
    fn three_boundary_no_interior_is_a_triangle() {
        let d = generate_disk(1, 0, 3, DiskShape::StrictlyConvex).unwrap();
        assert_eq!(d.triangles().len(), 1);
    }

    #[test]
    fn counts_and_shapes() {
        for seed in 0..20 {
            for (ni, nb) in [(0, 5), (1, 4), (3, 6), (6, 9)] {
                for shape in [DiskShape::StrictlyConvex, DiskShape::Convex, DiskShape::TrV] {
                    let d = generate_disk(seed, ni, nb, shape).unwrap();
                    assert!(d.validate().is_valid());
                    assert_eq!(d.boundary().len(), nb);
                    assert_eq!(d.interior_vertices().len(), ni);
                    assert_eq!(d.boundary(), (0..nb).collect::<Vec<_>>().as_slice());
                    let c = convexity(&d.boundary_circle());
                    match shape {
                        DiskShape::StrictlyConvex => assert_eq!(c, Convexity::StrictlyConvex),
                        DiskShape::Convex => assert_ne!(c, Convexity::NotConvex),
                        DiskShape::TrV => assert!(is_trv(&d)),
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = generate_disk(42, 4, 7, DiskShape::Convex).unwrap();
        let b = generate_disk(42, 4, 7, DiskShape::Convex).unwrap();
        assert_eq!(a, b);
        assert!(generate_disk(0, 0, 2, DiskShape::TrV).is_err());
    }
}
