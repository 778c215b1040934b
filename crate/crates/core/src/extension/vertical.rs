//! Vertical extension over disks transverse to the verticals.

use num_traits::One;

use super::{
    affine_threshold, check_boundary_data, half_threshold, obstructive_simplices, simplify, ExtendError, SLMap,
};
use crate::complex::{find_key_or_twinkey, is_trv, roof, Edge, KeyFinding, KeyKind, SLDisk, Tri};
use crate::exact::{signed_vol, Point, Rational};

/// Extends vertical boundary data `v` to a vertical embedding of `d`.
///
/// Requires `d` transverse to the verticals, `v` vertical with a convex,
/// positively oriented image and no `v`-obstructive spanning edge. The
/// recursion removes a key or twin-key, splits off the pieces cut by
/// obstructive chords of the remainder, and pushes the key apex slightly
/// down so that every piece becomes non-degenerate.
pub fn vertical_extend(d: &SLDisk, v: &SLMap) -> Result<SLMap, ExtendError> {
    for &b in d.boundary() {
        match v.get(b) {
            None => return Err(ExtendError::MissingImage(b)),
            Some(p) if p.x != d.point(b).x => return Err(ExtendError::NotVertical(b)),
            Some(_) => {}
        }
    }
    if !is_trv(d) {
        return Err(ExtendError::NotTrV);
    }
    check_boundary_data(d, v)?;
    extend_rec(d, &v.restrict_to_boundary(d))
}

fn internal(msg: impl std::fmt::Display) -> ExtendError {
    ExtendError::Internal(msg.to_string())
}

fn glue(into: &mut SLMap, other: &SLMap) -> Result<(), ExtendError> {
    into.glue(other)
        .map_err(|v| internal(format!("pieces disagree at vertex {v}")))
}

fn has_edge(d: &SLDisk, a: usize, b: usize) -> bool {
    d.triangle_with_directed_edge(a, b).is_some() || d.triangle_with_directed_edge(b, a).is_some()
}

/// One step of the recursion on a simple disk: the key or twin-key, the
/// boundary data of the remainder with the apex placed at the foot, and the
/// remainder cut into its left, middle and right pieces.
pub(crate) struct Decomposition {
    pub key: KeyFinding,
    pub foot: Point,
    pub v1: SLMap,
    pub left: Option<SLDisk>,
    pub right: Option<SLDisk>,
    pub middle: SLDisk,
}

pub(crate) fn decompose(d: &SLDisk, v: &SLMap) -> Result<Decomposition, ExtendError> {
    let key = find_key_or_twinkey(d).map_err(internal)?;
    let apex = key.apex;
    let foot = match key.kind {
        KeyKind::Key => {
            let (a, b) = key.roof_faces[0];
            let t = (&d.point(apex).x - &d.point(a).x) / (&d.point(b).x - &d.point(a).x);
            v.at(a).lerp(v.at(b), &t)
        }
        KeyKind::TwinKey => v.at(key.roof_faces[0].1).clone(),
    };

    let rest: Vec<Tri> = d
        .triangles()
        .iter()
        .filter(|t| !key.triangles.contains(t))
        .copied()
        .collect();
    let k1 = d.sub(rest);
    let mut v1 = v.restrict(k1.boundary());
    v1.insert(apex, foot.clone());

    // Obstructive chords of the remainder all end at the apex; keep the
    // outermost one on each side.
    let roof1 = roof(&k1).map_err(internal)?;
    let apex_pos = roof1
        .position(apex)
        .ok_or_else(|| internal("key apex is not on the roof of the remainder"))?;
    let mut left: Option<(usize, Edge)> = None;
    let mut right: Option<(usize, Edge)> = None;
    for e in obstructive_simplices(&k1, &v1) {
        let other = match e {
            (a, b) if a == apex => b,
            (a, b) if b == apex => a,
            _ => return Err(internal(format!("obstructive edge {e:?} misses the apex"))),
        };
        let p = roof1
            .position(other)
            .ok_or_else(|| internal(format!("obstructive edge {e:?} leaves the roof")))?;
        if p < apex_pos {
            if left.is_none_or(|(q, _)| p < q) {
                left = Some((p, e));
            }
        } else if right.is_none_or(|(q, _)| p > q) {
            right = Some((p, e));
        }
    }

    let mut middle = k1;
    let mut cut = |chord: Option<(usize, Edge)>, nbr: Option<usize>| -> Result<Option<SLDisk>, ExtendError> {
        let Some((_, e)) = chord else { return Ok(None) };
        let nbr = roof1.vertices[nbr.ok_or_else(|| internal("apex at roof end"))?];
        let (p, q) = middle.split_at(e).map_err(internal)?;
        let (side, remain) = if has_edge(&p, apex, nbr) { (p, q) } else { (q, p) };
        middle = remain;
        Ok(Some(side))
    };
    let left = cut(left, apex_pos.checked_sub(1))?;
    let right = cut(right, Some(apex_pos + 1).filter(|&i| i < roof1.vertices.len()))?;
    Ok(Decomposition {
        key,
        foot,
        v1,
        left,
        right,
        middle,
    })
}

fn extend_rec(d: &SLDisk, v: &SLMap) -> Result<SLMap, ExtendError> {
    let tris = d.triangles();
    if tris.len() == 1 {
        return Ok(v.restrict(&tris[0]));
    }

    if let Some(&e) = d.spanning_simplices().first() {
        let (a, b) = d.split_at(e).map_err(internal)?;
        let mut m = extend_rec(&a, &v.restrict(a.boundary()))?;
        glue(&mut m, &extend_rec(&b, &v.restrict(b.boundary()))?)?;
        return Ok(m);
    }

    let Decomposition {
        key,
        foot,
        v1,
        left,
        right,
        middle,
    } = decompose(d, v)?;
    let apex = key.apex;
    let mut out = extend_rec(&middle, &v1.restrict(middle.boundary()))?;

    // Push the apex down its vertical by less than half the distance at
    // which some triangle of the middle piece would degenerate.
    let down = Point::new(Rational::from_integer(0.into()), -Rational::one());
    let pairs: Vec<(Rational, Rational)> = middle
        .triangles()
        .iter()
        .filter(|t| t.contains(&apex))
        .map(|t| {
            let k = t.iter().position(|&w| w == apex).unwrap();
            let (b, c) = (out.at(t[(k + 1) % 3]), out.at(t[(k + 2) % 3]));
            let v0 = signed_vol(&foot, b, c);
            let v1 = signed_vol(&foot.add(&down), b, c);
            (v0.clone(), v1 - v0)
        })
        .collect();
    let eps = half_threshold(affine_threshold(pairs));
    let s_eps = foot.add(&down.scale(&eps));
    out.insert(apex, s_eps.clone());

    for piece in left.iter().chain(right.iter()) {
        let mut vp = v1.restrict(piece.boundary());
        vp.insert(apex, s_eps.clone());
        glue(&mut out, &extend_rec(piece, &vp)?)?;
    }
    for t in &key.triangles {
        let mut m = v.restrict(t);
        m.insert(apex, s_eps.clone());
        glue(&mut out, &m)?;
    }
    simplify(d, &mut out, true);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;
    use crate::exact::rat;
    use crate::extension::{is_embedding, is_vertical};

    fn check(d: &SLDisk, v: &SLMap) -> SLMap {
        let m = vertical_extend(d, v).unwrap();
        assert!(is_vertical(d, &m));
        assert!(is_embedding(d, &m), "not an embedding: {m:?}");
        for &b in d.boundary() {
            assert_eq!(m.at(b), v.at(b));
        }
        m
    }

    #[test]
    fn fan_identity() {
        let d = fan();
        check(&d, &SLMap::boundary_identity(&d));
    }

    #[test]
    fn fan_lifted_corners() {
        let d = fan();
        let mut v = SLMap::boundary_identity(&d);
        v.insert(3, Point::int(0, 2));
        v.insert(2, Point::int(1, 3));
        check(&d, &v);
    }

    #[test]
    fn obstructive_data_is_rejected() {
        let d = square_diagonal();
        let mut v = SLMap::boundary_identity(&d);
        v.insert(3, Point::new(rat(0, 1), rat(0, 1)));
        // Collapsing d onto a is not an embedding of the boundary.
        assert!(vertical_extend(&d, &v).is_err());
        // Flattening the arc a-d-c: move c down onto the line through a
        // and d, which is vertical here, so use a sheared square instead.
        let sq = SLDisk::new(
            vec![Point::int(0, 0), Point::int(2, 0), Point::int(2, 2), Point::int(1, 2)],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let mut w = SLMap::boundary_identity(&sq);
        w.insert(3, Point::int(1, 1));
        assert_eq!(vertical_extend(&sq, &w), Err(ExtendError::Obstructive(vec![(0, 2)])));
    }

    #[test]
    fn non_vertical_data_is_rejected() {
        let d = fan();
        let mut v = SLMap::boundary_identity(&d);
        v.insert(2, Point::rat(3, 2, 1, 1));
        assert_eq!(vertical_extend(&d, &v), Err(ExtendError::NotVertical(2)));
    }

    #[test]
    fn one_sided_obstruction() {
        let (d, v) = crate::complex::fixtures::one_sided_obstruction();
        let (c, dd, s) = (2, 3, 7);
        assert!(d.is_simple());
        let step = decompose(&d, &v).unwrap();
        assert_eq!(step.key.kind, KeyKind::Key);
        assert_eq!(step.key.triangles, vec![[c, s, dd]]);
        assert_eq!(
            step.left.as_ref().map(|p| p.triangles().to_vec()),
            Some(vec![[1, s, c]])
        );
        assert!(step.right.is_none());

        let m = check(&d, &v);
        assert!(m.at(s).y < rat(0, 1));
    }
}
