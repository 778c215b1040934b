//! Star kernels and a random walk through the space of embeddings.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{radial_to_boundary, AffineForm, HPolytope, PolytopeError};
use crate::complex::SLDisk;
use crate::exact::{Point, Rational};
use crate::extension::{extend, is_embedding, BoundaryMap, ExtendError, SLMap};

/// Region where `v` may be placed, all other vertices fixed at `m`, keeping
/// every triangle around `v` positively oriented. Coordinates are `(x, y)`.
pub fn star_kernel(d: &SLDisk, m: &SLMap, v: usize) -> HPolytope {
    let forms = d
        .triangles()
        .iter()
        .filter(|t| t.contains(&v))
        .map(|t| {
            let k = t.iter().position(|&w| w == v).unwrap();
            let (p, q) = (m.at(t[(k + 1) % 3]), m.at(t[(k + 2) % 3]));
            // det(v, p, q) = x (p.y - q.y) + y (q.x - p.x) + (p.x q.y - p.y q.x)
            AffineForm::new(vec![&p.y - &q.y, &q.x - &p.x], &p.x * &q.y - &p.y * &q.x)
        })
        .collect();
    HPolytope::new(forms, 2).expect("planar forms")
}

#[derive(Debug, Clone)]
pub struct WalkParams {
    pub seed: u64,
    pub steps: usize,
    /// Vertices the walk may move.
    pub movable: Vec<usize>,
    /// Extra planar constraints on the position of particular vertices.
    pub extra: Vec<(usize, AffineForm)>,
}

fn dyadic(r: &Rational, bits: u32) -> Rational {
    let s = Rational::from_integer(num_bigint::BigInt::one() << bits);
    (r * &s).round() / s
}

/// Each step moves one random movable vertex towards a random point of its
/// kernel, by a fraction in `[1/4, 3/4]` of the way to the kernel boundary,
/// then rounds to a nearby dyadic point still strictly inside. Steps the
/// oracle rejects are skipped (the walk stays put). The map after every
/// step is emitted.
pub fn walk_embeddings(d: &SLDisk, start: &SLMap, params: &WalkParams) -> Vec<SLMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut cur = start.clone();
    let mut out = Vec::with_capacity(params.steps);
    for _ in 0..params.steps {
        if params.movable.is_empty() {
            out.push(cur.clone());
            continue;
        }
        let v = params.movable[rng.gen_range(0..params.movable.len())];
        let mut dir = [0i64; 2];
        while dir == [0, 0] {
            dir = [rng.gen_range(-8..=8), rng.gen_range(-8..=8)];
        }
        let lambda = Rational::new(rng.gen_range(4..=12).into(), 16.into());
        if let Some(p) = step(d, &cur, v, &dir, &lambda, &params.extra) {
            let mut next = cur.clone();
            next.insert(v, p);
            if is_embedding(d, &next) {
                cur = next;
            }
        }
        out.push(cur.clone());
    }
    out
}

fn step(
    d: &SLDisk,
    m: &SLMap,
    v: usize,
    dir: &[i64; 2],
    lambda: &Rational,
    extra: &[(usize, AffineForm)],
) -> Option<Point> {
    let mut kernel = star_kernel(d, m, v);
    for (w, f) in extra {
        if *w == v {
            kernel.push(f.clone());
        }
    }
    let c = vec![m.at(v).x.clone(), m.at(v).y.clone()];
    let dirq: Vec<Rational> = dir.iter().map(|&a| Rational::from_integer(a.into())).collect();
    let target: Vec<Rational> = match radial_to_boundary(&kernel, &c, &dirq) {
        Ok(hit) => c.iter().zip(&hit.point).map(|(a, b)| a + lambda * (b - a)).collect(),
        Err(PolytopeError::RayUnbounded) => c.iter().zip(&dirq).map(|(a, b)| a + lambda * b).collect(),
        Err(_) => return None,
    };
    for bits in 3..=48 {
        let q: Vec<Rational> = target.iter().map(|r| dyadic(r, bits)).collect();
        if kernel.strictly_contains(&q) {
            return Some(Point::new(q[0].clone(), q[1].clone()));
        }
    }
    kernel
        .strictly_contains(&target)
        .then(|| Point::new(target[0].clone(), target[1].clone()))
}

/// `n` embeddings of `d` extending `f`, from a random walk started at the
/// extension `extend(d, f)` that moves interior vertices only.
pub fn sample_embeddings(d: &SLDisk, f: &BoundaryMap, n: usize, seed: u64) -> Result<Vec<SLMap>, ExtendError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let base = extend(d, f)?;
    let params = WalkParams {
        seed,
        steps: n,
        movable: d.interior_vertices(),
        extra: Vec::new(),
    };
    Ok(walk_embeddings(d, &base, &params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::fan;
    use crate::exact::int;

    #[test]
    fn fan_kernel_is_the_unit_square() {
        let d = fan();
        let k = star_kernel(&d, &SLMap::identity(&d), 4);
        let expected = vec![
            AffineForm::new(vec![int(0), int(1)], int(0)),
            AffineForm::new(vec![int(-1), int(0)], int(1)),
            AffineForm::new(vec![int(0), int(-1)], int(1)),
            AffineForm::new(vec![int(1), int(0)], int(0)),
        ];
        assert_eq!(k.forms(), expected.as_slice());
        // The kernel ignores where the centre currently sits.
        let mut moved = SLMap::identity(&d);
        moved.insert(4, Point::rat(1, 10, 1, 10));
        assert_eq!(star_kernel(&d, &moved, 4), k);
    }

    #[test]
    fn samples_are_embeddings_and_reproducible() {
        let d = fan();
        let f = SLMap::boundary_identity(&d);
        let a = sample_embeddings(&d, &f, 25, 7).unwrap();
        assert_eq!(a.len(), 25);
        assert!(a.iter().all(|m| is_embedding(&d, m)));
        assert_eq!(a, sample_embeddings(&d, &f, 25, 7).unwrap());
        assert!(a.iter().any(|m| m.at(4) != &Point::rat(1, 2, 1, 2)));
        assert!(sample_embeddings(&d, &f, 0, 7).unwrap().is_empty());
    }
}
