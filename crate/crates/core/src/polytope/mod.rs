//! Exact H-polytopes built from signed-volume systems.
//!
//! A polytope is a finite list of affine forms `l(Y) >= 0` on `Q^n`. Its
//! strict interior (all forms positive) is the object of interest: for a
//! volume system it is the set of maps with every triangle positively
//! oriented.

mod fiber;
mod lp;
mod radial;
mod sample;
mod shape;

pub use fiber::{
    fiber_polytopes, perturb_parameters, projection_equality_check, sample_fiber_parameters, Disagreement, FiberCheck,
    FiberError, FiberPolytopes, FiberSetup, Membership, ProjectionReport,
};
pub use lp::{maximize, LpOutcome};
pub use radial::{canonical_direction, radial_to_boundary, RadialChart, RadialHit};
pub use sample::{sample_embeddings, star_kernel, walk_embeddings, WalkParams};
pub use shape::{Direction, Interior};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::complex::SLDisk;
use crate::exact::{Point, Rational};
use crate::extension::SLMap;

/// `coeffs . Y + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl AffineForm {
    pub fn new(coeffs: Vec<Rational>, constant: Rational) -> Self {
        AffineForm { coeffs, constant }
    }

    pub fn constant_form(n: usize, c: Rational) -> Self {
        AffineForm::new(vec![Rational::zero(); n], c)
    }

    /// The coordinate form `Y_i - c` in dimension `n`.
    pub fn coordinate(n: usize, i: usize, c: &Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); n];
        coeffs[i] = Rational::one();
        AffineForm::new(coeffs, -c.clone())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, y: &[Rational]) -> Rational {
        assert_eq!(y.len(), self.coeffs.len(), "form and point dimensions differ");
        self.coeffs.iter().zip(y).map(|(a, b)| a * b).sum::<Rational>() + &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn negated(&self) -> AffineForm {
        AffineForm::new(self.coeffs.iter().map(|c| -c).collect(), -self.constant.clone())
    }

    /// Substitutes `Y_i = value`, dropping that coordinate.
    pub fn substitute(&self, i: usize, value: &Rational) -> AffineForm {
        let mut coeffs = self.coeffs.clone();
        let a = coeffs.remove(i);
        AffineForm::new(coeffs, &self.constant + a * value)
    }
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    #[serde(with = "crate::exact::rational_vec")]
    coeffs: Vec<Rational>,
    #[serde(rename = "const", with = "crate::exact::rational_str")]
    constant: Rational,
}

/// The system `form(Y) >= 0` for every form, in dimension `dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    forms: Vec<AffineForm>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    dim: usize,
    forms: Vec<FormRepr>,
}

impl Serialize for HPolytope {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PolytopeRepr {
            dim: self.dim,
            forms: self
                .forms
                .iter()
                .map(|f| FormRepr {
                    coeffs: f.coeffs.clone(),
                    constant: f.constant.clone(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HPolytope {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let r = PolytopeRepr::deserialize(de)?;
        let forms: Vec<AffineForm> = r
            .forms
            .into_iter()
            .map(|f| AffineForm::new(f.coeffs, f.constant))
            .collect();
        HPolytope::new(forms, r.dim).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("form {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("vertex enumeration supports dimension at most 4, got {0}")]
    DimensionTooHigh(usize),
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("polytope is empty")]
    Empty,
    #[error("polytope has empty interior")]
    EmptyInterior,
    #[error("ray from the centre never leaves the polytope")]
    RayUnbounded,
    #[error("centre is not strictly interior")]
    CenterNotInterior,
    #[error("direction is zero")]
    ZeroDirection,
    #[error("vertex {0} has no image or coordinate")]
    MissingVertex(usize),
    #[error("triangle {0} multiplies two free coordinates")]
    Bilinear(usize),
}

impl HPolytope {
    pub fn new(forms: Vec<AffineForm>, dim: usize) -> Result<Self, PolytopeError> {
        for (index, f) in forms.iter().enumerate() {
            if f.dim() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    index,
                    found: f.dim(),
                    expected: dim,
                });
            }
        }
        Ok(HPolytope { forms, dim })
    }

    /// Axis-aligned box `lo_i <= Y_i <= hi_i`.
    pub fn cube(lo: &[Rational], hi: &[Rational]) -> Self {
        let n = lo.len();
        let mut forms = Vec::new();
        for i in 0..n {
            forms.push(AffineForm::coordinate(n, i, &lo[i]));
            forms.push(AffineForm::coordinate(n, i, &hi[i]).negated());
        }
        HPolytope { forms, dim: n }
    }

    pub fn forms(&self) -> &[AffineForm] {
        &self.forms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn push(&mut self, f: AffineForm) {
        assert_eq!(f.dim(), self.dim);
        self.forms.push(f);
    }

    pub fn with(&self, f: AffineForm) -> HPolytope {
        let mut p = self.clone();
        p.push(f);
        p
    }

    /// Substitutes `Y_i = value` in every form.
    pub fn substitute(&self, i: usize, value: &Rational) -> HPolytope {
        HPolytope {
            forms: self.forms.iter().map(|f| f.substitute(i, value)).collect(),
            dim: self.dim - 1,
        }
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        self.forms.iter().all(|f| !f.eval(y).is_negative())
    }

    pub fn strictly_contains(&self, y: &[Rational]) -> bool {
        self.forms.iter().all(|f| f.eval(y).is_positive())
    }

    /// Optimum of `objective . Y` over the polytope.
    pub fn lp_extremum(&self, objective: &[Rational], sense: Sense) -> LpOutcome {
        match sense {
            Sense::Max => maximize(&self.forms, self.dim, objective),
            Sense::Min => match maximize(&self.forms, self.dim, &objective.iter().map(|c| -c).collect::<Vec<_>>()) {
                LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
                other => other,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

/// Which coordinates of a vertex are unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Both,
}

/// One volume form per triangle of `disk`, as a function of the free
/// coordinates. Coordinates not listed as free take their value from
/// `pinned`, falling back to the disk's own coordinates.
#[derive(Debug, Clone)]
pub struct VolumeSystem {
    pub disk: SLDisk,
    pub free: Vec<(usize, Axis)>,
    pub pinned: SLMap,
}

impl VolumeSystem {
    pub fn new(disk: SLDisk, free: Vec<(usize, Axis)>, pinned: SLMap) -> Self {
        VolumeSystem { disk, free, pinned }
    }

    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        self.free
            .iter()
            .map(|(_, a)| if *a == Axis::Both { 2 } else { 1 })
            .sum()
    }

    fn base(&self, v: usize) -> Result<Point, PolytopeError> {
        if let Some(p) = self.pinned.get(v) {
            return Ok(p.clone());
        }
        self.disk
            .vertices()
            .get(v)
            .cloned()
            .ok_or(PolytopeError::MissingVertex(v))
    }

    /// Unknown indices for the coordinates of `v`, if free.
    fn slots(&self, v: usize) -> (Option<usize>, Option<usize>) {
        let mut k = 0;
        for &(w, a) in &self.free {
            let (sx, sy) = match a {
                Axis::X => (Some(k), None),
                Axis::Y => (None, Some(k)),
                Axis::Both => (Some(k), Some(k + 1)),
            };
            if w == v {
                return (sx, sy);
            }
            k += if a == Axis::Both { 2 } else { 1 };
        }
        (None, None)
    }

    /// A point of the unknowns space read off a map.
    pub fn coordinates_of(&self, m: &SLMap) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.dim());
        for &(v, a) in &self.free {
            let p = m.at(v);
            match a {
                Axis::X => out.push(p.x.clone()),
                Axis::Y => out.push(p.y.clone()),
                Axis::Both => {
                    out.push(p.x.clone());
                    out.push(p.y.clone());
                }
            }
        }
        out
    }

    /// The map with the given unknowns filled in over the pinned values.
    pub fn map_at(&self, y: &[Rational]) -> Result<SLMap, PolytopeError> {
        let mut m = SLMap::new();
        for v in self.disk.used_vertices() {
            let mut p = self.base(v)?;
            let (sx, sy) = self.slots(v);
            if let Some(i) = sx {
                p.x = y[i].clone();
            }
            if let Some(i) = sy {
                p.y = y[i].clone();
            }
            m.insert(v, p);
        }
        Ok(m)
    }
}

/// An affine expression in the unknowns, used while expanding determinants.
#[derive(Clone)]
struct Lin {
    coeffs: Vec<Rational>,
    constant: Rational,
}

impl Lin {
    fn constant(n: usize, c: Rational) -> Lin {
        Lin {
            coeffs: vec![Rational::zero(); n],
            constant: c,
        }
    }

    fn var(n: usize, i: usize) -> Lin {
        let mut l = Lin::constant(n, Rational::zero());
        l.coeffs[i] = Rational::one();
        l
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn sub(&self, o: &Lin) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
            constant: &self.constant - &o.constant,
        }
    }

    /// Product of two expressions, at most one of which is non-constant.
    fn mul(&self, o: &Lin) -> Option<Lin> {
        let (c, l) = match (self.is_constant(), o.is_constant()) {
            (true, _) => (&self.constant, o),
            (_, true) => (&o.constant, self),
            _ => return None,
        };
        Some(Lin {
            coeffs: l.coeffs.iter().map(|a| a * c).collect(),
            constant: &l.constant * c,
        })
    }
}

/// Expands the volume form of every triangle in the free coordinates.
///
/// Each determinant is affine in each vertex separately, so the result is
/// affine unless one triangle has a free `x` at one vertex and a free `y` at
/// another; that case is reported as [`PolytopeError::Bilinear`].
pub fn build_system(vs: &VolumeSystem) -> Result<HPolytope, PolytopeError> {
    let n = vs.dim();
    let coord = |v: usize| -> Result<(Lin, Lin), PolytopeError> {
        let p = vs.base(v)?;
        let (sx, sy) = vs.slots(v);
        let x = sx.map_or_else(|| Lin::constant(n, p.x.clone()), |i| Lin::var(n, i));
        let y = sy.map_or_else(|| Lin::constant(n, p.y.clone()), |i| Lin::var(n, i));
        Ok((x, y))
    };
    let mut forms = Vec::with_capacity(vs.disk.triangles().len());
    for (ti, t) in vs.disk.triangles().iter().enumerate() {
        let (px, py) = coord(t[0])?;
        let (qx, qy) = coord(t[1])?;
        let (rx, ry) = coord(t[2])?;
        // (q - p) x (r - p)
        let (ux, uy) = (qx.sub(&px), qy.sub(&py));
        let (wx, wy) = (rx.sub(&px), ry.sub(&py));
        let bil = || PolytopeError::Bilinear(ti);
        let a = ux.mul(&wy).ok_or_else(bil)?;
        let b = uy.mul(&wx).ok_or_else(bil)?;
        let det = a.sub(&b);
        forms.push(AffineForm::new(det.coeffs, det.constant));
    }
    HPolytope::new(forms, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::{fan, triangle};
    use crate::exact::{int, rat};

    fn f(coeffs: &[Rational], c: Rational) -> AffineForm {
        AffineForm::new(coeffs.to_vec(), c)
    }

    #[test]
    fn fan_centre_free_in_y() {
        let d = fan();
        let mut pinned = SLMap::identity(&d);
        pinned.insert(4, Point::rat(1, 2, 0, 1));
        let p = build_system(&VolumeSystem::new(d, vec![(4, Axis::Y)], pinned)).unwrap();
        // abe: y; bce: 1/2; cde: 1 - y; dae: 1/2.
        assert_eq!(
            p.forms(),
            &[
                f(&[int(1)], int(0)),
                f(&[int(0)], rat(1, 2)),
                f(&[int(-1)], int(1)),
                f(&[int(0)], rat(1, 2)),
            ]
        );
    }

    #[test]
    fn fan_centre_free_in_both() {
        let d = fan();
        let p = build_system(&VolumeSystem::new(
            d.clone(),
            vec![(4, Axis::Both)],
            SLMap::identity(&d),
        ))
        .unwrap();
        assert_eq!(p.dim(), 2);
        assert!(p.strictly_contains(&[rat(1, 2), rat(1, 2)]));
        assert!(!p.strictly_contains(&[int(1), rat(1, 2)]));
        assert!(p.strictly_contains(&[rat(1, 100), rat(99, 100)]));
    }

    #[test]
    fn pinned_triangle_is_a_constant() {
        let d = triangle();
        let p = build_system(&VolumeSystem::new(d.clone(), vec![], SLMap::identity(&d))).unwrap();
        assert_eq!(p.forms(), &[AffineForm::constant_form(0, d.volume(0))]);
    }

    #[test]
    fn mixed_free_axes_are_bilinear() {
        let d = triangle();
        let vs = VolumeSystem::new(d.clone(), vec![(0, Axis::X), (1, Axis::Y)], SLMap::identity(&d));
        assert_eq!(build_system(&vs), Err(PolytopeError::Bilinear(0)));
    }

    #[test]
    fn json_round_trip() {
        let p = HPolytope::cube(&[int(0), rat(-1, 3)], &[int(1), int(2)]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"const\":\"1/3\""));
        assert_eq!(serde_json::from_str::<HPolytope>(&s).unwrap(), p);
    }
}
