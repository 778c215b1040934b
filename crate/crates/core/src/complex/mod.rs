//! Triangulated planar disks with exact coordinates and their combinatorial
//! classifications.

mod circle;
mod generate;
mod roof;

pub use circle::{convexity, natural_edges, Convexity, NaturalEdge, SLCircle};
pub use generate::{generate_disk, generate_disk_with, DiskShape, GenParams, GenerateError};
pub use roof::{
    find_key_or_twinkey, is_key, is_trv, is_trv_cycle, is_twin_key, roof, roof_of_cycle, verify_finding, KeyError,
    KeyFinding, KeyKind, Roof,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{signed_vol, Point, Rational};

/// A triangle as an ordered (counterclockwise) vertex-index triple.
pub type Tri = [usize; 3];

/// Undirected edge with the smaller index first.
pub type Edge = (usize, usize);

pub fn edge(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// An abstract triangulation together with rational coordinates for its
/// vertices.
///
/// The vertex list may contain entries that no triangle references; those are
/// not part of the complex. Sub-disks produced by splitting keep the parent's
/// vertex list so that maps on pieces can be glued by index.
#[derive(Clone, PartialEq, Eq)]
pub struct SLDisk {
    vertices: Vec<Point>,
    triangles: Vec<Tri>,
    boundary: Vec<usize>,
}

impl fmt::Debug for SLDisk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SLDisk")
            .field("triangles", &self.triangles)
            .field("boundary", &self.boundary)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NoTriangles,
    IndexOutOfRange {
        triangle: usize,
    },
    RepeatedVertex {
        triangle: usize,
    },
    NonPositiveTriangle {
        triangle: usize,
        volume: String,
    },
    EdgeOverused {
        edge: Edge,
        count: usize,
    },
    InconsistentOrientation {
        edge: Edge,
    },
    BoundaryNotSingleCycle,
    VertexNotManifold {
        vertex: usize,
    },
    Disconnected,
    EulerCharacteristic {
        vertices: usize,
        edges: usize,
        faces: usize,
    },
    NotEmbedded {
        triangles: (usize, usize),
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoTriangles => write!(f, "no triangles"),
            Violation::IndexOutOfRange { triangle } => {
                write!(f, "triangle {triangle} references a missing vertex")
            }
            Violation::RepeatedVertex { triangle } => write!(f, "triangle {triangle} repeats a vertex"),
            Violation::NonPositiveTriangle { triangle, volume } => {
                write!(f, "triangle {triangle} has non-positive volume {volume}")
            }
            Violation::EdgeOverused { edge, count } => {
                write!(f, "edge {edge:?} is shared by {count} triangles")
            }
            Violation::InconsistentOrientation { edge } => {
                write!(f, "edge {edge:?} is traversed twice in the same direction")
            }
            Violation::BoundaryNotSingleCycle => write!(f, "boundary is not a single cycle"),
            Violation::VertexNotManifold { vertex } => write!(f, "vertex {vertex} has a pinched link"),
            Violation::Disconnected => write!(f, "triangles do not form a connected complex"),
            Violation::EulerCharacteristic { vertices, edges, faces } => {
                write!(f, "Euler characteristic {vertices} - {edges} + {faces} != 1")
            }
            Violation::NotEmbedded { triangles } => {
                write!(f, "triangles {} and {} overlap", triangles.0, triangles.1)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiskError {
    #[error("invalid disk: {0}")]
    Invalid(ValidationReport),
    #[error("edge {0:?} is not a spanning edge")]
    NotSpanning(Edge),
}

/// Derives the counterclockwise boundary cycle from the directed edges that
/// are not matched by a reversed copy. Returns `None` when they do not form a
/// single cycle.
fn derive_boundary(triangles: &[Tri]) -> Option<Vec<usize>> {
    let mut directed = BTreeSet::new();
    for t in triangles {
        for k in 0..3 {
            directed.insert((t[k], t[(k + 1) % 3]));
        }
    }
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    let mut count = 0;
    for &(a, b) in &directed {
        if !directed.contains(&(b, a)) {
            count += 1;
            if next.insert(a, b).is_some() {
                return None;
            }
        }
    }
    let (&start, _) = next.iter().next()?;
    let mut cycle = vec![start];
    let mut cur = next[&start];
    while cur != start {
        if cycle.len() > count {
            return None;
        }
        cycle.push(cur);
        cur = *next.get(&cur)?;
    }
    if cycle.len() != count {
        return None;
    }
    Some(cycle)
}

impl SLDisk {
    /// Builds a disk and checks every invariant.
    pub fn new(vertices: Vec<Point>, triangles: Vec<Tri>) -> Result<Self, DiskError> {
        let d = SLDisk::unchecked(vertices, triangles);
        let report = d.validate();
        if report.is_valid() {
            Ok(d)
        } else {
            Err(DiskError::Invalid(report))
        }
    }

    /// Builds a disk without validation. The boundary is derived on a best
    /// effort basis and left empty when the triangles do not have a single
    /// boundary cycle.
    pub fn unchecked(vertices: Vec<Point>, triangles: Vec<Tri>) -> Self {
        let in_range = triangles.iter().all(|t| t.iter().all(|&v| v < vertices.len()));
        let boundary = if in_range {
            derive_boundary(&triangles).unwrap_or_default()
        } else {
            Vec::new()
        };
        SLDisk {
            vertices,
            triangles,
            boundary,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn point(&self, v: usize) -> &Point {
        &self.vertices[v]
    }

    pub fn triangles(&self) -> &[Tri] {
        &self.triangles
    }

    /// Counterclockwise boundary cycle of vertex indices.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Sorted indices of the vertices used by some triangle.
    pub fn used_vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.triangles.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary.contains(&v)
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        let bd: BTreeSet<usize> = self.boundary.iter().copied().collect();
        self.used_vertices().into_iter().filter(|v| !bd.contains(v)).collect()
    }

    /// Sorted list of undirected edges.
    pub fn edges(&self) -> Vec<Edge> {
        let set: BTreeSet<Edge> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| edge(t[k], t[(k + 1) % 3])))
            .collect();
        set.into_iter().collect()
    }

    /// Boundary edges as `(from, to)` pairs in counterclockwise order.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let n = self.boundary.len();
        (0..n).map(|i| (self.boundary[i], self.boundary[(i + 1) % n])).collect()
    }

    pub fn is_boundary_edge(&self, e: Edge) -> bool {
        self.boundary_edges().iter().any(|&(a, b)| edge(a, b) == e)
    }

    /// Same triangles, different triangle subset; vertex list shared.
    pub fn sub(&self, triangles: Vec<Tri>) -> SLDisk {
        SLDisk::unchecked(self.vertices.clone(), triangles)
    }

    /// Same combinatorics with the coordinates of the given vertices replaced.
    pub fn with_coords<'a, I>(&self, coords: I) -> SLDisk
    where
        I: IntoIterator<Item = (usize, &'a Point)>,
    {
        let mut vertices = self.vertices.clone();
        for (v, p) in coords {
            vertices[v] = p.clone();
        }
        SLDisk {
            vertices,
            triangles: self.triangles.clone(),
            boundary: self.boundary.clone(),
        }
    }

    /// Triangle containing the directed edge `a -> b`, if any.
    pub fn triangle_with_directed_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.triangles
            .iter()
            .position(|t| (0..3).any(|k| t[k] == a && t[(k + 1) % 3] == b))
    }

    /// Triangles containing vertex `v`.
    pub fn star(&self, v: usize) -> Vec<usize> {
        (0..self.triangles.len())
            .filter(|&i| self.triangles[i].contains(&v))
            .collect()
    }

    pub fn volume(&self, t: usize) -> Rational {
        let [a, b, c] = self.triangles[t];
        signed_vol(&self.vertices[a], &self.vertices[b], &self.vertices[c])
    }

    /// Lists every violated invariant.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.triangles.is_empty() {
            violations.push(Violation::NoTriangles);
            return ValidationReport { violations };
        }
        let mut indices_ok = true;
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= self.vertices.len()) {
                violations.push(Violation::IndexOutOfRange { triangle: i });
                indices_ok = false;
            } else if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                violations.push(Violation::RepeatedVertex { triangle: i });
                indices_ok = false;
            }
        }
        if !indices_ok {
            return ValidationReport { violations };
        }
        for i in 0..self.triangles.len() {
            let vol = self.volume(i);
            if !vol.is_positive() {
                violations.push(Violation::NonPositiveTriangle {
                    triangle: i,
                    volume: vol.to_string(),
                });
            }
        }

        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut undirected: BTreeMap<Edge, usize> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *directed.entry((a, b)).or_default() += 1;
                *undirected.entry(edge(a, b)).or_default() += 1;
            }
        }
        for (&e, &count) in &undirected {
            if count > 2 {
                violations.push(Violation::EdgeOverused { edge: e, count });
            } else if directed.get(&e).copied().unwrap_or(0) > 1 || directed.get(&(e.1, e.0)).copied().unwrap_or(0) > 1
            {
                violations.push(Violation::InconsistentOrientation { edge: e });
            }
        }

        if self.boundary.is_empty() {
            violations.push(Violation::BoundaryNotSingleCycle);
        }

        // Link of every vertex must be a single path (boundary vertex) or a
        // single cycle (interior vertex).
        let boundary: BTreeSet<usize> = self.boundary.iter().copied().collect();
        for v in self.used_vertices() {
            let mut next: BTreeMap<usize, usize> = BTreeMap::new();
            let mut bad = false;
            for t in &self.triangles {
                if let Some(k) = t.iter().position(|&w| w == v) {
                    let a = t[(k + 1) % 3];
                    let b = t[(k + 2) % 3];
                    if next.insert(a, b).is_some() {
                        bad = true;
                    }
                }
            }
            if bad || !link_is_single_component(&next, boundary.contains(&v)) {
                violations.push(Violation::VertexNotManifold { vertex: v });
            }
        }

        if !self.dual_connected(&[]) {
            violations.push(Violation::Disconnected);
        }

        let v = self.used_vertices().len();
        let e = undirected.len();
        let f = self.triangles.len();
        if v as i64 - e as i64 + f as i64 != 1 {
            violations.push(Violation::EulerCharacteristic {
                vertices: v,
                edges: e,
                faces: f,
            });
        }

        if violations.is_empty() {
            if let Some(pair) = crate::extension::first_overlap(&self.vertices, &self.triangles) {
                violations.push(Violation::NotEmbedded { triangles: pair });
            }
        }
        ValidationReport { violations }
    }

    fn dual_connected(&self, cut: &[Edge]) -> bool {
        self.dual_components(cut).len() == 1
    }

    /// Connected components of the dual graph, not crossing the given edges.
    /// Each component lists triangle indices in increasing order.
    fn dual_components(&self, cut: &[Edge]) -> Vec<Vec<usize>> {
        let mut by_edge: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let e = edge(t[k], t[(k + 1) % 3]);
                if !cut.contains(&e) {
                    by_edge.entry(e).or_default().push(i);
                }
            }
        }
        let n = self.triangles.len();
        let mut comp = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                let t = self.triangles[i];
                for k in 0..3 {
                    let e = edge(t[k], t[(k + 1) % 3]);
                    if let Some(nbrs) = by_edge.get(&e) {
                        for &j in nbrs {
                            if comp[j] == usize::MAX {
                                comp[j] = id;
                                members.push(j);
                                stack.push(j);
                            }
                        }
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    pub fn boundary_circle(&self) -> SLCircle {
        SLCircle::new(
            self.boundary.clone(),
            self.boundary.iter().map(|&v| self.vertices[v].clone()).collect(),
        )
    }

    /// Interior edges whose endpoints both lie on the boundary.
    pub fn spanning_simplices(&self) -> Vec<Edge> {
        let boundary: BTreeSet<usize> = self.boundary.iter().copied().collect();
        let boundary_edges: BTreeSet<Edge> = self.boundary_edges().into_iter().map(|(a, b)| edge(a, b)).collect();
        self.edges()
            .into_iter()
            .filter(|e| boundary.contains(&e.0) && boundary.contains(&e.1) && !boundary_edges.contains(e))
            .collect()
    }

    pub fn is_simple(&self) -> bool {
        self.spanning_simplices().is_empty()
    }

    /// Cuts the disk along a spanning edge. The first piece is the one
    /// containing the directed edge `e.0 -> e.1`.
    pub fn split_at(&self, e: Edge) -> Result<(SLDisk, SLDisk), DiskError> {
        let e = edge(e.0, e.1);
        if !self.spanning_simplices().contains(&e) {
            return Err(DiskError::NotSpanning(e));
        }
        let comps = self.dual_components(&[e]);
        debug_assert_eq!(comps.len(), 2, "spanning edge must separate the disk");
        let first = self
            .triangle_with_directed_edge(e.0, e.1)
            .expect("spanning edge is an interior edge");
        let (a, b) = if comps[0].contains(&first) {
            (&comps[0], &comps[1])
        } else {
            (&comps[1], &comps[0])
        };
        let pick = |ids: &Vec<usize>| ids.iter().map(|&i| self.triangles[i]).collect::<Vec<_>>();
        Ok((self.sub(pick(a)), self.sub(pick(b))))
    }

    /// The disk with `x` and `y` exchanged; triangles are reoriented so that
    /// they stay positive.
    pub fn transpose(&self) -> SLDisk {
        let vertices = self
            .vertices
            .iter()
            .map(|p| Point::new(p.y.clone(), p.x.clone()))
            .collect();
        let triangles = self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect();
        SLDisk::unchecked(vertices, triangles)
    }
}

fn link_is_single_component(next: &BTreeMap<usize, usize>, on_boundary: bool) -> bool {
    if next.is_empty() {
        return false;
    }
    let targets: BTreeSet<usize> = next.values().copied().collect();
    if targets.len() != next.len() {
        return false;
    }
    let starts: Vec<usize> = next.keys().filter(|k| !targets.contains(k)).copied().collect();
    let start = match (on_boundary, starts.as_slice()) {
        (true, [s]) => *s,
        (false, []) => *next.keys().next().unwrap(),
        _ => return false,
    };
    let mut seen = 1;
    let mut cur = start;
    while let Some(&n) = next.get(&cur) {
        if n == start {
            break;
        }
        seen += 1;
        cur = n;
        if seen > next.len() + 1 {
            return false;
        }
    }
    let expected = if on_boundary { next.len() + 1 } else { next.len() };
    seen == expected
}

/// Small hand-built disks used throughout tests and documentation.
pub mod fixtures {
    use super::*;

    /// Unit square fan around its centre: a, b, c, d, e.
    pub fn fan() -> SLDisk {
        SLDisk::new(
            vec![
                Point::int(0, 0),
                Point::int(1, 0),
                Point::int(1, 1),
                Point::int(0, 1),
                Point::rat(1, 2, 1, 2),
            ],
            vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
        )
        .unwrap()
    }

    /// Unit square split by the diagonal ac.
    pub fn square_diagonal() -> SLDisk {
        SLDisk::new(
            vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    /// Two triangles under the roof (0,0), (1/2,h), (1,0), with the single
    /// lower vertex u = 3 at (1/2,-1/2).
    pub fn tent(h: Rational) -> SLDisk {
        SLDisk::new(
            vec![
                Point::int(0, 0),
                Point::int(1, 0),
                Point::new(crate::exact::rat(1, 2), h),
                Point::rat(1, 2, -1, 2),
            ],
            vec![[0, 3, 2], [3, 1, 2]],
        )
        .unwrap()
    }

    pub fn triangle() -> SLDisk {
        SLDisk::new(
            vec![Point::int(0, 0), Point::int(1, 0), Point::rat(1, 2, 1, 1)],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    /// Flat roof a-b-c-d-e over lower vertices f, g and interior s, with
    /// vertical boundary data pulling e down to (4,-1). Removing the key over
    /// c-d leaves an obstructive chord on the left only.
    pub fn one_sided_obstruction() -> (SLDisk, crate::extension::SLMap) {
        let (a, b, c, dd, e, f, g, s) = (0, 1, 2, 3, 4, 5, 6, 7);
        let d = SLDisk::new(
            vec![
                Point::int(0, 0),
                Point::int(1, 0),
                Point::int(2, 0),
                Point::int(3, 0),
                Point::int(4, 0),
                Point::int(2, -4),
                Point::rat(3, 2, -2, 1),
                Point::rat(5, 2, -1, 1),
            ],
            vec![
                [a, g, b],
                [b, g, s],
                [b, s, c],
                [c, s, dd],
                [dd, s, e],
                [a, f, g],
                [g, f, s],
                [s, f, e],
            ],
        )
        .unwrap();
        let mut v = crate::extension::SLMap::boundary_identity(&d);
        v.insert(e, Point::int(4, -1));
        (d, v)
    }
}
