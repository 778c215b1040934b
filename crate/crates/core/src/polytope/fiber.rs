//! Fibers of the projection to `x`-coordinates over the maps of `L = K - tau`
//! that fix the upper boundary `T`, for a disk `K` in reduced form.
//!
//! The unknowns of a fiber are the `y`-coordinates of the interior vertices
//! of `K`, listed with the apex `u` of the base triangle `tau` last.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::shape::feasible_point;
use super::{
    build_system, walk_embeddings, AffineForm, Axis, Direction, HPolytope, PolytopeError, VolumeSystem, WalkParams,
};
use crate::complex::{SLDisk, Tri};
use crate::exact::{Point, Rational};
use crate::extension::SLMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiberError {
    #[error("disk is not in reduced form: {0}")]
    NotReduced(String),
    #[error("expected {expected} x-coordinates, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("x-coordinates are not in the projection of the embedding space")]
    XNotInProjection,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

#[derive(Debug, Clone)]
pub struct FiberSetup {
    /// `K`, in reduced form.
    pub disk: SLDisk,
    /// `K` without the base triangle.
    pub l: SLDisk,
    pub base: (usize, usize),
    pub tau: Tri,
    pub apex: usize,
    /// Interior vertices of `K`, apex last.
    pub movable: Vec<usize>,
}

impl FiberSetup {
    /// Requires the boundary edge `(0,0) -> (1,0)` and an interior apex over it.
    pub fn new(k: &SLDisk) -> Result<Self, FiberError> {
        let origin = Point::int(0, 0);
        let unit = Point::int(1, 0);
        let base = k
            .boundary_edges()
            .into_iter()
            .find(|&(a, b)| k.point(a) == &origin && k.point(b) == &unit)
            .ok_or_else(|| FiberError::NotReduced("no boundary edge from (0,0) to (1,0)".into()))?;
        let ti = k
            .triangle_with_directed_edge(base.0, base.1)
            .expect("boundary edge has a triangle");
        let tau = k.triangles()[ti];
        let apex = *tau.iter().find(|&&v| v != base.0 && v != base.1).unwrap();
        if k.is_boundary_vertex(apex) {
            return Err(FiberError::NotReduced(
                "apex of the base triangle is on the boundary".into(),
            ));
        }
        for &v in k.boundary() {
            if v != base.0 && v != base.1 {
                let p = k.point(v);
                if !(p.x.is_positive() && p.x < Rational::one() && p.y.is_positive()) {
                    return Err(FiberError::NotReduced(format!("boundary vertex {v} leaves the strip")));
                }
            }
        }
        let mut movable: Vec<usize> = k.interior_vertices().into_iter().filter(|&v| v != apex).collect();
        movable.push(apex);
        let l = k.sub(k.triangles().iter().filter(|&&t| t != tau).copied().collect());
        Ok(FiberSetup {
            disk: k.clone(),
            l,
            base,
            tau,
            apex,
            movable,
        })
    }

    /// Number of movable vertices.
    pub fn m(&self) -> usize {
        self.movable.len()
    }

    /// The `x`-coordinates of the movable vertices under `f`.
    pub fn x_of(&self, f: &SLMap) -> Vec<Rational> {
        self.movable.iter().map(|&v| f.at(v).x.clone()).collect()
    }

    fn check_len(&self, x: &[Rational]) -> Result<(), FiberError> {
        if x.len() != self.m() {
            return Err(FiberError::WrongLength {
                expected: self.m(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// System (4) at fixed `x`, with the constant forms `x_m >= 0` and
    /// `1 - x_m >= 0` appended.
    pub fn system_at(&self, x: &[Rational]) -> Result<HPolytope, FiberError> {
        self.check_len(x)?;
        let mut pinned = SLMap::identity(&self.disk);
        for (v, xv) in self.movable.iter().zip(x) {
            let y = pinned.at(*v).y.clone();
            pinned.insert(*v, Point::new(xv.clone(), y));
        }
        let free = self.movable.iter().map(|&v| (v, Axis::Y)).collect();
        let mut p = build_system(&VolumeSystem::new(self.l.clone(), free, pinned))?;
        let m = self.m();
        let xm = &x[m - 1];
        p.push(AffineForm::constant_form(m, xm.clone()));
        p.push(AffineForm::constant_form(m, Rational::one() - xm));
        Ok(p)
    }

    fn apex_at_least(&self, y: &Rational) -> AffineForm {
        AffineForm::coordinate(self.m(), self.m() - 1, y)
    }

    /// Which of the four embedding spaces have a point over `x`: no
    /// condition on the apex height, height `y`, height at least `y`,
    /// height above `y`.
    pub fn membership(&self, x: &[Rational], y: &Rational) -> Result<Membership, FiberError> {
        let m = self.m();
        let p = self.system_at(x)?;
        let xm = &x[m - 1];
        let strip = xm.is_positive() && xm < &Rational::one();
        let ge = self.apex_at_least(y);
        let level = p.substitute(m - 1, y);
        Ok(Membership {
            free: strip && p.strict_point().is_some(),
            level: strip && level.strict_point().is_some(),
            at_least: strip && feasible_point(p.forms(), std::slice::from_ref(&ge), m).is_some(),
            above: strip && p.with(ge).strict_point().is_some(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub free: bool,
    pub level: bool,
    pub at_least: bool,
    pub above: bool,
}

impl Membership {
    pub fn agree(&self) -> bool {
        self.free == self.level && self.level == self.at_least && self.at_least == self.above
    }
}

/// The fibers over `x` of the closed spaces with no condition on the apex,
/// apex at least `y`, and apex equal to `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberPolytopes {
    pub full: HPolytope,
    pub at_least: HPolytope,
    pub level: HPolytope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCheck {
    pub dimensions: [Option<usize>; 3],
    pub unbounded: [Vec<Direction>; 3],
    /// Nonempty relative interior for each of the three.
    pub interior: [bool; 3],
}

impl FiberCheck {
    /// Dimensions `m, m, m - 1`, only the first unbounded, all interiors
    /// nonempty.
    pub fn as_expected(&self, m: usize) -> bool {
        self.dimensions == [Some(m), Some(m), Some(m - 1)]
            && !self.unbounded[0].is_empty()
            && self.unbounded[1].is_empty()
            && self.unbounded[2].is_empty()
            && self.interior.iter().all(|&b| b)
    }
}

impl FiberPolytopes {
    pub fn check(&self) -> FiberCheck {
        let polys = [&self.full, &self.at_least, &self.level];
        FiberCheck {
            dimensions: polys.map(|p| p.affine_dimension()),
            unbounded: polys.map(|p| p.unbounded_directions()),
            interior: [
                self.full.strict_point().is_some(),
                self.at_least.strict_point().is_some(),
                self.level_slice().strict_point().is_some(),
            ],
        }
    }

    /// The level fiber with the apex coordinate substituted away.
    pub fn level_slice(&self) -> HPolytope {
        let m = self.full.dim();
        // The last form of the level system is `y - Y_m`.
        let y = self.level.forms().last().expect("level form").constant.clone();
        self.full.substitute(m - 1, &y)
    }
}

pub fn fiber_polytopes(setup: &FiberSetup, x: &[Rational], y: &Rational) -> Result<FiberPolytopes, FiberError> {
    let full = setup.system_at(x)?;
    let xm = &x[setup.m() - 1];
    if !(xm.is_positive() && xm < &Rational::one()) || full.strict_point().is_none() {
        return Err(FiberError::XNotInProjection);
    }
    let ge = setup.apex_at_least(y);
    let at_least = full.with(ge.clone());
    let level = at_least.with(ge.negated());
    Ok(FiberPolytopes { full, at_least, level })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub samples: usize,
    /// Samples lying in the projection.
    pub inside: usize,
    pub disagreements: Vec<Disagreement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    #[serde(with = "crate::exact::rational_vec")]
    pub x: Vec<Rational>,
    pub first: Membership,
    pub second: Membership,
}

/// Compares the four membership predicates at two heights `y1, y2 <= 0`
/// over every sample; all eight answers must coincide.
pub fn projection_equality_check(
    setup: &FiberSetup,
    y1: &Rational,
    y2: &Rational,
    samples: &[Vec<Rational>],
) -> Result<ProjectionReport, FiberError> {
    assert!(!y1.is_positive() && !y2.is_positive(), "heights must be non-positive");
    let mut report = ProjectionReport {
        samples: samples.len(),
        inside: 0,
        disagreements: Vec::new(),
    };
    for x in samples {
        let first = setup.membership(x, y1)?;
        let second = setup.membership(x, y2)?;
        if first.free {
            report.inside += 1;
        }
        if !(first.agree() && second.agree() && first == second) {
            report.disagreements.push(Disagreement {
                x: x.clone(),
                first,
                second,
            });
        }
    }
    Ok(report)
}

/// `x`-coordinates of `n` embeddings of `L` fixing `T`, with the apex kept
/// in the open strip `0 < x < 1`; all lie in the projection.
pub fn sample_fiber_parameters(setup: &FiberSetup, n: usize, seed: u64) -> Vec<Vec<Rational>> {
    let start = SLMap::identity(&setup.l);
    let strip = [
        AffineForm::new(vec![Rational::one(), Rational::zero()], Rational::zero()),
        AffineForm::new(vec![-Rational::one(), Rational::zero()], Rational::one()),
    ];
    let params = WalkParams {
        seed,
        steps: n,
        movable: setup.movable.clone(),
        extra: strip.into_iter().map(|f| (setup.apex, f)).collect(),
    };
    walk_embeddings(&setup.l, &start, &params)
        .iter()
        .map(|f| setup.x_of(f))
        .collect()
}

/// Random perturbations of the given parameters by multiples of `1/8`,
/// which may fall outside the projection.
pub fn perturb_parameters(xs: &[Vec<Rational>], seed: u64) -> Vec<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    xs.iter()
        .map(|x| {
            x.iter()
                .map(|v| v + Rational::new(rng.gen_range(-4..=4).into(), 8.into()))
                .collect()
        })
        .collect()
}
