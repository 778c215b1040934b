//! Extension of convex boundary embeddings, by induction on the number of
//! triangles (strictly convex images) and on the number of plateaus.

use super::{
    affine_threshold, check_boundary_data, half_threshold, obstructive_simplices, simplify, vertical_extend,
    ExtendError, SLMap,
};
use crate::complex::{convexity, natural_edges, Convexity, NaturalEdge, SLCircle, SLDisk, Tri};
use crate::exact::{signed_vol, Point, ProjectiveMap, Rational};
use crate::reduction::{default_depth, plateau_collapse, reduce_polygon};

/// Extends a boundary embedding with convex image to an embedding of `d`.
///
/// The boundary must map to a simple, positively oriented convex polygon and
/// no spanning edge may be obstructive. The result agrees with `f` exactly
/// on the boundary.
pub fn extend(d: &SLDisk, f: &SLMap) -> Result<SLMap, ExtendError> {
    check_boundary_data(d, f)?;
    let f = f.restrict_to_boundary(d);
    let out = extend_rec(d, &f)?;
    for &b in d.boundary() {
        if out.at(b) != f.at(b) {
            return Err(internal(format!("boundary vertex {b} moved")));
        }
    }
    Ok(out)
}

fn internal(msg: impl std::fmt::Display) -> ExtendError {
    ExtendError::Internal(msg.to_string())
}

fn nested(e: ExtendError) -> ExtendError {
    match e {
        ExtendError::Internal(_) => e,
        other => internal(format!("inner step failed: {other}")),
    }
}

fn extend_rec(d: &SLDisk, f: &SLMap) -> Result<SLMap, ExtendError> {
    let tris = d.triangles();
    if tris.len() == 1 {
        return Ok(f.restrict(&tris[0]));
    }
    if let Some(&e) = d.spanning_simplices().first() {
        let (a, b) = d.split_at(e).map_err(internal)?;
        let mut m = extend_rec(&a, &f.restrict(a.boundary()))?;
        m.glue(&extend_rec(&b, &f.restrict(b.boundary()))?)
            .map_err(|v| internal(format!("pieces disagree at vertex {v}")))?;
        return Ok(m);
    }
    let poly = f
        .boundary_polygon(d)
        .ok_or_else(|| internal("boundary map not total"))?;
    let circle = SLCircle::new(d.boundary().to_vec(), poly);
    let runs = natural_edges(&circle);
    match runs.iter().find(|r| r.is_plateau()) {
        Some(plateau) => plateau_case(d, f, &circle, plateau),
        None => strictly_convex_case(d, f, &circle, &runs[0]),
    }
}

/// `g` applied to every image of `f`.
fn push(g: &ProjectiveMap, f: &SLMap) -> Result<SLMap, ExtendError> {
    f.map_points(|p| g.apply(p)).map_err(internal)
}

fn strictly_convex_case(d: &SLDisk, f: &SLMap, circle: &SLCircle, rho: &NaturalEdge) -> Result<SLMap, ExtendError> {
    let g = reduce_polygon(&circle.points, rho).map_err(internal)?;
    let fr = push(&g, f)?;
    let (a, b) = (circle.vertices[rho.first()], circle.vertices[rho.last()]);
    let tau_idx = d
        .triangle_with_directed_edge(a, b)
        .ok_or_else(|| internal("base edge has no triangle"))?;
    let tau = d.triangles()[tau_idx];
    let u = *tau.iter().find(|&&w| w != a && w != b).unwrap();
    if d.is_boundary_vertex(u) {
        return Err(internal(
            "apex over the base edge lies on the boundary of a simple disk",
        ));
    }
    let l = d.sub(
        d.triangles()
            .iter()
            .filter(|&&t| t != tau)
            .copied()
            .collect::<Vec<Tri>>(),
    );

    // Push u below the base edge; the boundary of L is then strictly convex.
    let mut f1 = fr.restrict(l.boundary());
    f1.insert(u, Point::rat(1, 2, -1, 2));
    let e1 = extend_rec(&l, &f1)?;

    // Flatten u back onto the base edge, vertically, over the image of L.
    let l1 = e1.realize(&l);
    let mut v = e1.restrict(l.boundary());
    v.insert(u, Point::rat(1, 2, 0, 1));
    let mut e2 = vertical_extend(&l1, &v).map_err(nested)?;

    // Lift u slightly above the base edge.
    let base = Point::rat(1, 2, 0, 1);
    let up = Point::int(0, 1);
    let pairs = star_pairs(&l, &e2, u, &base, &up);
    let h = half_threshold(affine_threshold(pairs));
    e2.insert(u, base.add(&up.scale(&h)));
    e2.insert(a, fr.at(a).clone());
    e2.insert(b, fr.at(b).clone());
    let mut out = push(&g.inverse(), &e2)?;
    simplify(d, &mut out, false);
    Ok(out)
}

fn plateau_case(d: &SLDisk, f: &SLMap, circle: &SLCircle, plateau: &NaturalEdge) -> Result<SLMap, ExtendError> {
    let g = reduce_polygon(&circle.points, plateau).map_err(internal)?;
    let fr = push(&g, f)?;
    let reduced = SLCircle::new(
        circle.vertices.clone(),
        circle.vertices.iter().map(|&v| fr.at(v).clone()).collect(),
    );
    let plateaus = natural_edges(&reduced).iter().filter(|r| r.is_plateau()).count();

    // The default depth always works on a simple disk; halving is a guard.
    let mut h = default_depth();
    let mut collapsed = None;
    for _ in 0..8 {
        let fv = plateau_collapse(&reduced, &h).map_err(internal)?;
        let moved = SLCircle::new(
            circle.vertices.clone(),
            circle.vertices.iter().map(|&v| fv.at(v).clone()).collect(),
        );
        let fewer = natural_edges(&moved).iter().filter(|r| r.is_plateau()).count() < plateaus;
        if fewer && convexity(&moved) != Convexity::NotConvex && obstructive_simplices(d, &fv).is_empty() {
            collapsed = Some(fv);
            break;
        }
        h /= Rational::from_integer(2.into());
    }
    let fv = collapsed.ok_or_else(|| internal("plateau collapse failed"))?;

    let e1 = extend_rec(d, &fv)?;
    let d1 = e1.realize(d);
    let e2 = vertical_extend(&d1, &fr).map_err(nested)?;
    let mut out = push(&g.inverse(), &e2)?;
    simplify(d, &mut out, false);
    Ok(out)
}

/// `(volume, slope)` of every triangle of `l` around `u` when `u` moves
/// from `base` along `dir`, other vertices at their `m` images.
fn star_pairs(l: &SLDisk, m: &SLMap, u: usize, base: &Point, dir: &Point) -> Vec<(Rational, Rational)> {
    l.triangles()
        .iter()
        .filter(|t| t.contains(&u))
        .map(|t| {
            let k = t.iter().position(|&w| w == u).unwrap();
            let (p, q) = (m.at(t[(k + 1) % 3]), m.at(t[(k + 2) % 3]));
            let v0 = signed_vol(base, p, q);
            let v1 = signed_vol(&base.add(dir), p, q);
            (v0.clone(), v1 - v0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;
    use crate::extension::is_embedding;

    fn check(d: &SLDisk, f: &SLMap) -> SLMap {
        let m = extend(d, f).unwrap();
        assert!(is_embedding(d, &m), "not an embedding: {m:?}");
        for &b in d.boundary() {
            assert_eq!(m.at(b), f.at(b));
        }
        m
    }

    #[test]
    fn single_triangle() {
        let d = triangle();
        let mut f = SLMap::new();
        f.insert(0, Point::int(3, 1));
        f.insert(1, Point::int(5, 2));
        f.insert(2, Point::int(2, 4));
        assert_eq!(check(&d, &f), f);
    }

    #[test]
    fn fan_identity() {
        let d = fan();
        check(&d, &SLMap::boundary_identity(&d));
    }

    #[test]
    fn fan_onto_a_kite() {
        let d = fan();
        let mut f = SLMap::new();
        f.insert(0, Point::int(0, -3));
        f.insert(1, Point::int(4, 0));
        f.insert(2, Point::int(1, 5));
        f.insert(3, Point::int(-2, 0));
        check(&d, &f);
    }

    #[test]
    fn plateau_on_fan() {
        // Fan of a square with a flat vertex on the bottom edge.
        let d = SLDisk::new(
            vec![
                Point::int(0, 0),
                Point::int(2, 0),
                Point::int(2, 2),
                Point::int(0, 2),
                Point::int(1, 1),
                Point::int(1, 0),
            ],
            vec![[0, 5, 4], [5, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
        )
        .unwrap();
        check(&d, &SLMap::boundary_identity(&d));
        // Move the flat vertex along the edge and shear the square.
        let mut f = SLMap::boundary_identity(&d);
        f.insert(5, Point::rat(1, 3, 0, 1));
        f.insert(2, Point::int(3, 2));
        f.insert(3, Point::int(1, 2));
        check(&d, &f);
    }

    #[test]
    fn obstructive_is_rejected() {
        let d = square_diagonal();
        let mut f = SLMap::boundary_identity(&d);
        f.insert(3, Point::rat(1, 2, 1, 2));
        assert_eq!(extend(&d, &f), Err(ExtendError::Obstructive(vec![(0, 2)])));
    }

    #[test]
    fn clockwise_data_is_rejected() {
        let d = fan();
        let f: SLMap = SLMap::boundary_identity(&d)
            .images
            .into_iter()
            .map(|(v, p)| (v, Point::new(-p.x, p.y)))
            .collect();
        assert_eq!(extend(&d, &f), Err(ExtendError::NegativeOrientation));
    }
}
