//! Extending boundary embeddings of a disk to embeddings of the whole disk.
//!
//! [`vertical_extend`] handles vertical boundary data on disks transverse to
//! the verticals; [`extend`] handles arbitrary convex boundary images. Every
//! result can be checked with the brute-force oracle [`is_embedding`], which
//! shares no code with the constructions.

mod bound;
mod general;
mod oracle;
mod vertical;

pub use bound::{evaluation_bound, evaluation_feasible, BoundError};
pub use general::extend;
pub use oracle::{embedding_verdict, first_overlap, is_embedding, Verdict};
pub use vertical::vertical_extend;

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::complex::{convexity, edge, Convexity, Edge, SLCircle, SLDisk};
use crate::exact::{parse_rational, signed_vol, Point, Rational};

/// Image points indexed by vertex. A map need not be total: boundary maps
/// only carry the boundary vertices.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SLMap {
    pub images: BTreeMap<usize, Point>,
}

/// Boundary data is stored the same way; the name documents intent.
pub type BoundaryMap = SLMap;

impl std::fmt::Debug for SLMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.images.iter()).finish()
    }
}

impl SLMap {
    pub fn new() -> Self {
        SLMap::default()
    }

    /// The inclusion of the disk: every used vertex maps to itself.
    pub fn identity(d: &SLDisk) -> Self {
        d.used_vertices().into_iter().map(|v| (v, d.point(v).clone())).collect()
    }

    /// The inclusion restricted to the boundary.
    pub fn boundary_identity(d: &SLDisk) -> Self {
        d.boundary().iter().map(|&v| (v, d.point(v).clone())).collect()
    }

    pub fn get(&self, v: usize) -> Option<&Point> {
        self.images.get(&v)
    }

    /// Panics when `v` has no image; callers check totality first.
    pub fn at(&self, v: usize) -> &Point {
        &self.images[&v]
    }

    pub fn insert(&mut self, v: usize, p: Point) -> Option<Point> {
        self.images.insert(v, p)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_total_on(&self, vertices: &[usize]) -> bool {
        vertices.iter().all(|v| self.images.contains_key(v))
    }

    pub fn restrict(&self, vertices: &[usize]) -> SLMap {
        vertices
            .iter()
            .filter_map(|&v| self.images.get(&v).map(|p| (v, p.clone())))
            .collect()
    }

    pub fn restrict_to_boundary(&self, d: &SLDisk) -> SLMap {
        self.restrict(d.boundary())
    }

    /// The disk with every mapped vertex moved to its image.
    pub fn realize(&self, d: &SLDisk) -> SLDisk {
        d.with_coords(self.images.iter().map(|(&v, p)| (v, p)))
    }

    /// Image points of the boundary cycle, in cycle order.
    pub fn boundary_polygon(&self, d: &SLDisk) -> Option<Vec<Point>> {
        d.boundary().iter().map(|v| self.images.get(v).cloned()).collect()
    }

    /// Signed volume of the image of triangle `t` of `d`.
    pub fn volume(&self, d: &SLDisk, t: usize) -> Rational {
        let [a, b, c] = d.triangles()[t];
        signed_vol(self.at(a), self.at(b), self.at(c))
    }

    /// `x` and `y` exchanged in every image.
    pub fn transpose(&self) -> SLMap {
        self.images
            .iter()
            .map(|(&v, p)| (v, Point::new(p.y.clone(), p.x.clone())))
            .collect()
    }

    /// Applies `g` to every image point.
    pub fn map_points<E>(&self, mut g: impl FnMut(&Point) -> Result<Point, E>) -> Result<SLMap, E> {
        let mut out = SLMap::new();
        for (&v, p) in &self.images {
            out.insert(v, g(p)?);
        }
        Ok(out)
    }

    /// Merges `other` into `self`, failing on the first vertex where the two
    /// maps disagree.
    pub fn glue(&mut self, other: &SLMap) -> Result<(), usize> {
        for (&v, p) in &other.images {
            match self.images.get(&v) {
                Some(q) if q != p => return Err(v),
                Some(_) => {}
                None => {
                    self.images.insert(v, p.clone());
                }
            }
        }
        Ok(())
    }
}

impl FromIterator<(usize, Point)> for SLMap {
    fn from_iter<I: IntoIterator<Item = (usize, Point)>>(iter: I) -> Self {
        SLMap {
            images: iter.into_iter().collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SLMapRepr {
    images: BTreeMap<usize, [String; 2]>,
}

impl Serialize for SLMap {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SLMapRepr {
            images: self
                .images
                .iter()
                .map(|(&v, p)| (v, [p.x.to_string(), p.y.to_string()]))
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SLMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = SLMapRepr::deserialize(de)?;
        let mut images = BTreeMap::new();
        for (v, [x, y]) in repr.images {
            let x = parse_rational(&x).map_err(serde::de::Error::custom)?;
            let y = parse_rational(&y).map_err(serde::de::Error::custom)?;
            images.insert(v, Point::new(x, y));
        }
        Ok(SLMap { images })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("disk is not transverse to the verticals")]
    NotTrV,
    #[error("boundary map moves vertex {0} horizontally")]
    NotVertical(usize),
    #[error("obstructive spanning edges {0:?}")]
    Obstructive(Vec<Edge>),
    #[error("boundary image is not convex")]
    NotConvexImage,
    #[error("boundary map is not an embedding of the boundary circle")]
    NotBoundaryEmbedding,
    #[error("boundary image is negatively oriented")]
    NegativeOrientation,
    #[error("boundary map has no image for vertex {0}")]
    MissingImage(usize),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl ExtendError {
    /// True for failures caused by the input rather than by a bug.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, ExtendError::Internal(_))
    }
}

/// True when `m` keeps the `x`-coordinate of every vertex it maps.
pub fn is_vertical(d: &SLDisk, m: &SLMap) -> bool {
    m.images
        .iter()
        .all(|(&v, p)| v < d.vertices().len() && p.x == d.point(v).x)
}

/// Spanning edges one of whose two boundary arcs has a collinear image.
///
/// Both arcs of a spanning edge have at least two edges in a valid disk, so
/// a straight arc here really is a flattened one.
pub fn obstructive_simplices(d: &SLDisk, f: &SLMap) -> Vec<Edge> {
    let bd = d.boundary();
    let n = bd.len();
    let pos = |v: usize| bd.iter().position(|&w| w == v).expect("boundary vertex");
    let flat = |from: usize, to: usize| -> bool {
        // Positions from..=to walking forward around the cycle.
        let mut pts = Vec::new();
        let mut i = from;
        loop {
            pts.push(f.at(bd[i]));
            if i == to {
                break;
            }
            i = (i + 1) % n;
        }
        debug_assert!(pts.len() >= 3, "arc of a spanning edge has at least two edges");
        let (a, b) = (pts[0], pts[pts.len() - 1]);
        pts.iter()
            .all(|p| signed_vol(a, b, p) == Rational::from_integer(0.into()))
    };
    d.spanning_simplices()
        .into_iter()
        .filter(|&(a, b)| {
            let (i, j) = (pos(a), pos(b));
            flat(i, j) || flat(j, i)
        })
        .map(|(a, b)| edge(a, b))
        .collect()
}

/// Checks the boundary data shared by both extension algorithms: totality on
/// the boundary, a simple positively oriented convex image, and no
/// obstructive spanning edge. Returns the image polygon.
pub(crate) fn check_boundary_data(d: &SLDisk, f: &SLMap) -> Result<Vec<Point>, ExtendError> {
    for &v in d.boundary() {
        if f.get(v).is_none() {
            return Err(ExtendError::MissingImage(v));
        }
    }
    let poly = f.boundary_polygon(d).expect("checked above");
    if !oracle::polygon_is_simple(&poly) {
        return Err(ExtendError::NotBoundaryEmbedding);
    }
    if oracle::polygon_area2(&poly) <= Rational::from_integer(0.into()) {
        return Err(ExtendError::NegativeOrientation);
    }
    let circle = SLCircle::new(d.boundary().to_vec(), poly.clone());
    if convexity(&circle) == Convexity::NotConvex {
        return Err(ExtendError::NotConvexImage);
    }
    let obstructive = obstructive_simplices(d, f);
    if !obstructive.is_empty() {
        return Err(ExtendError::Obstructive(obstructive));
    }
    Ok(poly)
}

/// Largest power of two (at most 1) not exceeding `bound / 2`.
///
/// Used for the small perturbation parameters: any positive value below the
/// exact threshold works, and a dyadic choice keeps denominators small
/// through deep recursions.
/// Moves every interior image of the embedding `m` to the coarsest dyadic
/// point (on its own vertical when `vertical`) that keeps its star positive.
/// The link polygons do not move, so the result is still an embedding; this
/// keeps coordinate sizes from compounding through the recursions.
pub(crate) fn simplify(d: &SLDisk, m: &mut SLMap, vertical: bool) {
    use crate::exact::orientation;
    use num_bigint::BigInt;
    let stars: BTreeMap<usize, Vec<(usize, usize)>> = d
        .interior_vertices()
        .into_iter()
        .map(|v| {
            let links = d
                .triangles()
                .iter()
                .filter_map(|t| {
                    let k = t.iter().position(|&w| w == v)?;
                    Some((t[(k + 1) % 3], t[(k + 2) % 3]))
                })
                .collect();
            (v, links)
        })
        .collect();
    for (v, links) in stars {
        let p = m.at(v).clone();
        let mut scale = Rational::from_integer(BigInt::from(1));
        for _ in 0..=256 {
            let round = |r: &Rational| (r * &scale + Rational::new(1.into(), 2.into())).floor() / &scale;
            let x = if vertical { p.x.clone() } else { round(&p.x) };
            let cand = Point::new(x, round(&p.y));
            if cand == p {
                break;
            }
            if links.iter().all(|&(a, b)| orientation(&cand, m.at(a), m.at(b)) > 0) {
                m.insert(v, cand);
                break;
            }
            scale *= Rational::from_integer(BigInt::from(2));
        }
    }
}

pub(crate) fn half_threshold(bound: Option<Rational>) -> Rational {
    use num_traits::One;
    let mut e = Rational::one();
    if let Some(b) = bound {
        let half = b / Rational::from_integer(2.into());
        while e > half {
            e /= Rational::from_integer(2.into());
        }
    }
    e
}

/// Smallest positive root of the affine functions `v0 + t * slope` that
/// decrease, i.e. the largest `t0` such that all stay positive on `[0, t0)`.
/// `None` when no function decreases.
pub(crate) fn affine_threshold(pairs: impl IntoIterator<Item = (Rational, Rational)>) -> Option<Rational> {
    use num_traits::Signed;
    pairs
        .into_iter()
        .filter(|(_, slope)| slope.is_negative())
        .map(|(v0, slope)| v0 / -slope)
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;

    #[test]
    fn vertical_examples() {
        let d = fan();
        let id = SLMap::identity(&d);
        assert!(is_vertical(&d, &id));
        let up: SLMap = id
            .images
            .iter()
            .map(|(&v, p)| (v, Point::new(p.x.clone(), &p.y + Rational::from_integer(1.into()))))
            .collect();
        assert!(is_vertical(&d, &up));
        let mut side = id.clone();
        side.insert(4, Point::rat(1, 3, 1, 2));
        assert!(!is_vertical(&d, &side));
    }

    #[test]
    fn obstructive_examples() {
        let d = square_diagonal();
        assert!(obstructive_simplices(&d, &SLMap::identity(&d)).is_empty());
        let mut f = SLMap::boundary_identity(&d);
        f.insert(3, Point::rat(1, 2, 1, 2));
        assert_eq!(obstructive_simplices(&d, &f), vec![(0, 2)]);
        assert!(obstructive_simplices(&fan(), &SLMap::boundary_identity(&fan())).is_empty());
    }

    #[test]
    fn map_json_round_trip() {
        let mut m = SLMap::new();
        m.insert(0, Point::rat(1, 2, -3, 4));
        m.insert(12, Point::int(5, 0));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"images":{"0":["1/2","-3/4"],"12":["5","0"]}}"#);
        let back: SLMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn thresholds() {
        use crate::exact::rat;
        assert_eq!(
            affine_threshold(vec![(rat(1, 1), rat(-2, 1)), (rat(3, 1), rat(-1, 1))]),
            Some(rat(1, 2))
        );
        assert_eq!(affine_threshold(vec![(rat(1, 1), rat(2, 1))]), None);
        assert_eq!(half_threshold(Some(rat(1, 2))), rat(1, 4));
        assert_eq!(half_threshold(Some(rat(3, 5))), rat(1, 4));
        assert_eq!(half_threshold(None), rat(1, 1));
    }
}
