//! Transversality to the verticals, roofs, keys and twin-keys.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{SLDisk, Tri};
use crate::exact::{sign, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyError {
    #[error("disk is not transverse to the verticals")]
    NotTrV,
    #[error("disk has spanning edges")]
    NotSimple,
    #[error("disk has a single triangle")]
    SingleTriangle,
    #[error("no key or twin-key found (internal consistency failure)")]
    NoKeyFound,
}

/// True when every vertical line meets the closed polygon in a connected
/// set: the nonzero x-steps along the cycle change sign at most twice.
pub fn is_trv_cycle(points: &[Point]) -> bool {
    let n = points.len();
    let signs: Vec<i8> = (0..n)
        .map(|i| sign(&(&points[(i + 1) % n].x - &points[i].x)))
        .filter(|&s| s != 0)
        .collect();
    if signs.is_empty() {
        return false;
    }
    let changes = (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count();
    changes <= 2
}

pub fn is_trv(d: &SLDisk) -> bool {
    let pts: Vec<Point> = d.boundary().iter().map(|&v| d.point(v).clone()).collect();
    is_trv_cycle(&pts)
}

/// Positions (into the counterclockwise cycle) of the roof vertices, listed
/// left to right. The roof runs from the lowest leftmost vertex to the lowest
/// rightmost vertex and includes vertical edges at both ends.
pub fn roof_of_cycle(points: &[Point]) -> Option<Vec<usize>> {
    if !is_trv_cycle(points) {
        return None;
    }
    let n = points.len();
    let lowest = |pick_max: bool| -> usize {
        let xs = points.iter().map(|p| &p.x);
        let target = if pick_max { xs.max() } else { xs.min() }.unwrap().clone();
        (0..n)
            .filter(|&i| points[i].x == target)
            .min_by(|&a, &b| points[a].y.cmp(&points[b].y))
            .unwrap()
    };
    let right = lowest(true);
    let left = lowest(false);
    // Counterclockwise from bottom-right to bottom-left is the upper arc.
    let mut arc = vec![right];
    let mut i = right;
    while i != left {
        i = (i + 1) % n;
        arc.push(i);
    }
    arc.reverse();
    Some(arc)
}

/// The roof of a TrV disk as vertex indices, left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roof {
    pub vertices: Vec<usize>,
}

impl Roof {
    /// Roof edges `(s_i, s_{i+1})`, left to right.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    /// Index `i` such that `(a, b)` is the roof edge `(s_i, s_{i+1})` in
    /// either orientation.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.vertices
            .windows(2)
            .position(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
    }
}

pub fn roof(d: &SLDisk) -> Result<Roof, KeyError> {
    let pts: Vec<Point> = d.boundary().iter().map(|&v| d.point(v).clone()).collect();
    let positions = roof_of_cycle(&pts).ok_or(KeyError::NotTrV)?;
    Ok(Roof {
        vertices: positions.into_iter().map(|i| d.boundary()[i]).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyKind {
    Key,
    TwinKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFinding {
    pub kind: KeyKind,
    /// One triangle for a key; `(tau_left, tau_right)` for a twin-key.
    pub triangles: Vec<Tri>,
    /// Roof faces, left to right, as `(s_i, s_{i+1})`.
    pub roof_faces: Vec<(usize, usize)>,
    /// Interior vertex opposite the roof face(s).
    pub apex: usize,
    /// Point straight above the apex on the roof.
    pub foot: Point,
}

/// The vertex of `t` not in `{a, b}`.
fn opposite(t: &Tri, a: usize, b: usize) -> Option<usize> {
    if !(t.contains(&a) && t.contains(&b)) {
        return None;
    }
    t.iter().copied().find(|&v| v != a && v != b)
}

fn roof_faces_of(roof: &Roof, t: &Tri) -> Vec<usize> {
    roof.edges()
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| t.contains(a) && t.contains(b))
        .map(|(i, _)| i)
        .collect()
}

/// Checks the key condition for `t` directly: a roof face whose opposite
/// vertex is interior and projects vertically into the open face.
pub fn is_key(d: &SLDisk, roof: &Roof, t: &Tri) -> Option<KeyFinding> {
    for i in roof_faces_of(roof, t) {
        let (a, b) = (roof.vertices[i], roof.vertices[i + 1]);
        let apex = opposite(t, a, b)?;
        if d.is_boundary_vertex(apex) {
            continue;
        }
        let (pa, pb, pe) = (d.point(a), d.point(b), d.point(apex));
        let (lo, hi) = if pa.x <= pb.x { (pa, pb) } else { (pb, pa) };
        if lo.x < pe.x && pe.x < hi.x {
            let frac = (&pe.x - &pa.x) / (&pb.x - &pa.x);
            return Some(KeyFinding {
                kind: KeyKind::Key,
                triangles: vec![*t],
                roof_faces: vec![(a, b)],
                apex,
                foot: pa.lerp(pb, &frac),
            });
        }
    }
    None
}

/// Checks the twin-key condition for the ordered pair `(left, right)`.
pub fn is_twin_key(d: &SLDisk, roof: &Roof, left: &Tri, right: &Tri) -> Option<KeyFinding> {
    let lf = roof_faces_of(roof, left);
    let rf = roof_faces_of(roof, right);
    if lf.len() != 1 || rf.len() != 1 || rf[0] != lf[0] + 1 {
        return None;
    }
    let i = lf[0];
    let (s0, s1, s2) = (roof.vertices[i], roof.vertices[i + 1], roof.vertices[i + 2]);
    let apex = opposite(left, s0, s1)?;
    if opposite(right, s1, s2)? != apex || d.is_boundary_vertex(apex) {
        return None;
    }
    // Adjacent along the edge (apex, s1), which must be vertical.
    if d.point(apex).x != d.point(s1).x || d.point(apex) == d.point(s1) {
        return None;
    }
    // The shared edge must not itself touch the roof elsewhere.
    if roof.contains_vertex(apex) {
        return None;
    }
    Some(KeyFinding {
        kind: KeyKind::TwinKey,
        triangles: vec![*left, *right],
        roof_faces: vec![(s0, s1), (s1, s2)],
        apex,
        foot: d.point(s1).clone(),
    })
}

/// Left-to-right scan over the roof faces: the first key or twin-key met is
/// returned, a key winning over a twin-key at the same step.
pub fn find_key_or_twinkey(d: &SLDisk) -> Result<KeyFinding, KeyError> {
    let r = roof(d)?;
    if !d.is_simple() {
        return Err(KeyError::NotSimple);
    }
    if d.triangles().len() < 2 {
        return Err(KeyError::SingleTriangle);
    }
    let faces: Vec<Tri> = r
        .edges()
        .iter()
        .map(|&(a, b)| {
            // Counterclockwise boundary runs right to left along the roof.
            let idx = d
                .triangle_with_directed_edge(b, a)
                .or_else(|| d.triangle_with_directed_edge(a, b))
                .expect("roof edge lies on a triangle");
            d.triangles()[idx]
        })
        .collect();
    for i in 0..faces.len() {
        if let Some(k) = is_key(d, &r, &faces[i]) {
            return Ok(k);
        }
        if i > 0 {
            if let Some(k) = is_twin_key(d, &r, &faces[i - 1], &faces[i]) {
                return Ok(k);
            }
        }
    }
    Err(KeyError::NoKeyFound)
}

/// Whether a finding satisfies the definitions on its own terms.
pub fn verify_finding(d: &SLDisk, k: &KeyFinding) -> bool {
    let r = match roof(d) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let again = match k.kind {
        KeyKind::Key => k.triangles.len() == 1 && is_key(d, &r, &k.triangles[0]).as_ref() == Some(k),
        KeyKind::TwinKey => {
            k.triangles.len() == 2 && is_twin_key(d, &r, &k.triangles[0], &k.triangles[1]).as_ref() == Some(k)
        }
    };
    let foot_above = d.point(k.apex).x == k.foot.x && d.point(k.apex).y < k.foot.y;
    again && foot_above && !d.is_boundary_vertex(k.apex)
}
