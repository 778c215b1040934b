//! Deterministic corpora of disks and boundary maps.

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{generate_disk, roof, DiskShape, SLDisk};
use crate::exact::{int, rat, Point, ProjectiveMap, Rational};
use crate::extension::SLMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCase {
    pub name: String,
    pub seed: u64,
    pub shape: DiskShape,
    #[serde(with = "crate::io::disk_repr")]
    pub disk: SLDisk,
}

/// `count` disks per shape with 3 to 30 triangles, cycling through sizes.
pub fn corpus(seed: u64, count: usize, shapes: &[DiskShape]) -> Vec<CorpusCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &shape in shapes {
        for i in 0..count {
            let nb = rng.gen_range(3..=10usize);
            // Triangles: nb - 2 + 2 ni, at least 3 and at most 30.
            let lo = if nb >= 5 { 0 } else { (5 - nb).div_ceil(2) };
            let hi = ((30 - (nb - 2)) / 2).min(10);
            let ni = rng.gen_range(lo..=hi);
            let case_seed = rng.gen::<u64>();
            let disk = generate_disk(case_seed, ni, nb, shape).expect("generator succeeds on valid counts");
            out.push(CorpusCase {
                name: format!("{}-{:03}", shape_tag(shape), i),
                seed: case_seed,
                shape,
                disk,
            });
        }
    }
    out
}

pub fn shape_tag(shape: DiskShape) -> &'static str {
    match shape {
        DiskShape::StrictlyConvex => "strict",
        DiskShape::Convex => "convex",
        DiskShape::TrV => "trv",
    }
}

/// The default mix: strictly convex, convex with flat vertices, and TrV.
pub fn standard_corpus(seed: u64) -> Vec<CorpusCase> {
    corpus(
        seed,
        100,
        &[DiskShape::StrictlyConvex, DiskShape::Convex, DiskShape::TrV],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    Identity,
    VerticalPerturbation,
    ProjectiveThenConvex,
    /// One arc of a spanning edge pressed flat; expected to be obstructive.
    CornerFlattening,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCase {
    pub kind: MapKind,
    pub map: SLMap,
}

/// Boundary maps for a disk with convex boundary.
pub fn boundary_maps(d: &SLDisk, seed: u64) -> Vec<BoundaryCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = SLMap::boundary_identity(d);
    let mut out = vec![BoundaryCase {
        kind: MapKind::Identity,
        map: id.clone(),
    }];
    out.push(BoundaryCase {
        kind: MapKind::VerticalPerturbation,
        map: vertical_perturbation(d, &id, &mut rng),
    });
    let g = random_projective(d, &mut rng);
    let projected = id.map_points(|p| g.apply(p)).expect("vanishing line avoids the disk");
    out.push(BoundaryCase {
        kind: MapKind::ProjectiveThenConvex,
        map: vertical_perturbation(d, &projected, &mut rng),
    });
    if let Some(f) = corner_flattening(d, &mut rng) {
        out.push(BoundaryCase {
            kind: MapKind::CornerFlattening,
            map: f,
        });
    }
    out
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())].clone()
}

/// `y -> a y + b x + c -+ delta (x - x0)(x1 - x)`, minus on the lower arc and
/// plus on the upper one. Keeps a convex image convex and flat vertices on
/// non-vertical edges become corners when `delta > 0`.
pub fn vertical_perturbation(d: &SLDisk, f: &SLMap, rng: &mut ChaCha8Rng) -> SLMap {
    let a = pick(rng, &[rat(1, 2), int(1), rat(3, 2), int(2)]);
    let b = pick(rng, &[rat(-1, 2), rat(-1, 4), int(0), rat(1, 4), rat(1, 2)]);
    let c = pick(rng, &[int(-1), int(0), rat(1, 3), int(2)]);
    let delta = pick(rng, &[int(0), rat(1, 8), rat(1, 4), rat(1, 2), int(1)]);
    let upper = upper_arc(d, f);
    let (x0, x1) = x_range(d, f);
    let mut out = SLMap::new();
    for &v in d.boundary() {
        let p = f.at(v);
        let q = (&p.x - &x0) * (&x1 - &p.x) * &delta;
        let bend = if upper.contains(&v) { q } else { -q };
        let y = &a * &p.y + &b * &p.x + &c + bend;
        out.insert(v, Point::new(p.x.clone(), y));
    }
    out
}

fn x_range(d: &SLDisk, f: &SLMap) -> (Rational, Rational) {
    let xs = d.boundary().iter().map(|&v| f.at(v).x.clone());
    let lo = xs.clone().min().unwrap();
    let hi = xs.max().unwrap();
    (lo, hi)
}

/// Boundary vertices on the upper arc of the image polygon, ends excluded
/// unless they are the top of a vertical end edge.
fn upper_arc(d: &SLDisk, f: &SLMap) -> Vec<usize> {
    let image = d.with_coords(d.boundary().iter().map(|&v| (v, f.at(v))));
    let r = roof(&image).expect("convex images are transverse to the verticals");
    let (x0, x1) = x_range(d, f);
    r.vertices
        .into_iter()
        .filter(|&v| {
            let p = f.at(v);
            if p.x != x0 && p.x != x1 {
                return true;
            }
            // At an end: upper unless it is the lowest vertex there.
            d.boundary().iter().any(|&w| f.at(w).x == p.x && f.at(w).y < p.y)
        })
        .collect()
}

/// A vertical map taking a TrV disk to a convex polygon, strictly convex away
/// from vertical end edges: upper arc
/// to `q + e`, lower arc to `-(q + e)`, with `q = (x - x0)(x1 - x)` and `e`
/// affine, equal to 1 at an end carrying a vertical edge and 0 otherwise.
/// Vertices on a vertical end edge are spread linearly in y over `[-e, e]`.
pub fn convexify_vertical(d: &SLDisk) -> SLMap {
    let id = SLMap::boundary_identity(d);
    let upper = upper_arc(d, &id);
    let (x0, x1) = x_range(d, &id);
    let count_at = |x: &Rational| d.boundary().iter().filter(|&&v| &d.point(v).x == x).count();
    let e0 = if count_at(&x0) > 1 { int(1) } else { int(0) };
    let e1 = if count_at(&x1) > 1 { int(1) } else { int(0) };
    let mut out = SLMap::new();
    for &v in d.boundary() {
        let x = &d.point(v).x;
        let t = (x - &x0) / (&x1 - &x0);
        let e = &e0 + (&e1 - &e0) * &t;
        let h = (x - &x0) * (&x1 - x) + &e;
        let at_end = x == &x0 || x == &x1;
        let y = if at_end && count_at(x) > 1 {
            // Spread a vertical end edge linearly over [-e, e].
            let ys = d
                .boundary()
                .iter()
                .map(|&w| d.point(w))
                .filter(|p| &p.x == x)
                .map(|p| p.y.clone());
            let (lo, hi) = (ys.clone().min().unwrap(), ys.max().unwrap());
            -&e + int(2) * &e * (&d.point(v).y - &lo) / (hi - &lo)
        } else if upper.contains(&v) {
            h
        } else if at_end && count_at(x) == 1 {
            int(0)
        } else {
            -h
        };
        out.insert(v, Point::new(x.clone(), y));
    }
    out
}

/// A projective map close to an affine one whose vanishing line stays away
/// from the disk, with positive determinant and positive weights.
pub fn random_projective(d: &SLDisk, rng: &mut ChaCha8Rng) -> ProjectiveMap {
    let scale = d
        .boundary()
        .iter()
        .map(|&v| d.point(v).x.abs() + d.point(v).y.abs())
        .max()
        .unwrap_or_else(Rational::one)
        + Rational::one();
    let linear = pick(
        rng,
        &[
            [int(1), int(0), int(0), int(1)],
            [int(2), int(1), int(0), int(1)],
            [int(1), rat(-1, 2), rat(1, 3), int(1)],
            [int(0), int(-1), int(1), int(0)],
            [rat(3, 2), int(0), rat(1, 2), rat(2, 3)],
        ],
    );
    let mut a = Rational::new(rng.gen_range(-3..=3).into(), 8.into()) / &scale;
    let mut b = Rational::new(rng.gen_range(-3..=3).into(), 8.into()) / &scale;
    loop {
        let g = ProjectiveMap::new([
            [linear[0].clone(), linear[1].clone(), int(rng.gen_range(-2..=2))],
            [linear[2].clone(), linear[3].clone(), int(rng.gen_range(-2..=2))],
            [a.clone(), b.clone(), int(1)],
        ])
        .expect("invertible");
        if g.determinant().is_positive() && d.used_vertices().iter().all(|&v| g.weight(d.point(v)).is_positive()) {
            return g;
        }
        a /= int(2);
        b /= int(2);
    }
}

/// Presses the shorter boundary arc of a random spanning edge onto the edge.
/// `None` for simple disks.
pub fn corner_flattening(d: &SLDisk, rng: &mut ChaCha8Rng) -> Option<SLMap> {
    let spanning = d.spanning_simplices();
    if spanning.is_empty() {
        return None;
    }
    let (a, b) = spanning[rng.gen_range(0..spanning.len())];
    let bd = d.boundary();
    let n = bd.len();
    let (i, j) = (
        bd.iter().position(|&v| v == a).unwrap(),
        bd.iter().position(|&v| v == b).unwrap(),
    );
    let forward = (j + n - i) % n;
    let (from, len) = if forward <= n - forward {
        (i, forward)
    } else {
        (j, n - forward)
    };
    let (p, q) = (d.point(bd[from]).clone(), d.point(bd[(from + len) % n]).clone());
    let mut f = SLMap::boundary_identity(d);
    for k in 1..len {
        let t = Rational::new((k as i64).into(), (len as i64).into());
        f.insert(bd[(from + k) % n], p.lerp(&q, &t));
    }
    Some(f)
}
