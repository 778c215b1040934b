//! Radial parametrisation of a bounded polytope from an interior centre.
//!
//! Directions are nonzero rational vectors standing for the ray they span,
//! so no normalisation onto the unit sphere (and no square root) is needed.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{HPolytope, PolytopeError};
use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialHit {
    /// First point of the boundary met by the ray.
    #[serde(with = "crate::exact::rational_vec")]
    pub point: Vec<Rational>,
    /// Ray parameter of `point`: `point = c + t * direction`.
    #[serde(with = "crate::exact::rational_str")]
    pub t: Rational,
    /// Every form vanishing at `point` among those the ray crosses.
    pub active: Vec<usize>,
}

/// Where the ray from `c` along `direction` leaves the polytope.
pub fn radial_to_boundary(p: &HPolytope, c: &[Rational], direction: &[Rational]) -> Result<RadialHit, PolytopeError> {
    if direction.iter().all(Zero::is_zero) {
        return Err(PolytopeError::ZeroDirection);
    }
    if !p.strictly_contains(c) {
        return Err(PolytopeError::CenterNotInterior);
    }
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for (j, f) in p.forms().iter().enumerate() {
        let rate: Rational = f.coeffs.iter().zip(direction).map(|(a, d)| a * d).sum();
        if !rate.is_negative() {
            continue;
        }
        let t = f.eval(c) / -rate;
        match &mut best {
            Some((bt, idx)) if t == *bt => idx.push(j),
            Some((bt, _)) if t > *bt => {}
            _ => best = Some((t, vec![j])),
        }
    }
    let (t, active) = best.ok_or(PolytopeError::RayUnbounded)?;
    let point = c.iter().zip(direction).map(|(x, d)| x + &t * d).collect();
    Ok(RadialHit { point, t, active })
}

/// The positive multiple of `v` with coprime integer entries.
pub fn canonical_direction(v: &[Rational]) -> Vec<Rational> {
    let den = v.iter().fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<num_bigint::BigInt> = v
        .iter()
        .map(|r| (r * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, a| acc.gcd(a));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|a| Rational::from_integer(a / &g)).collect()
}

/// Radial chart of a bounded polytope with a strictly interior centre: the
/// pair `(direction, t)` with `t` in `[0, 1]` goes to `c + t (a - c)`, where
/// `a` is the boundary point hit along `direction`.
#[derive(Debug, Clone)]
pub struct RadialChart {
    polytope: HPolytope,
    center: Vec<Rational>,
}

impl RadialChart {
    pub fn new(polytope: HPolytope, center: Vec<Rational>) -> Result<Self, PolytopeError> {
        if !polytope.strictly_contains(&center) {
            return Err(PolytopeError::CenterNotInterior);
        }
        Ok(RadialChart { polytope, center })
    }

    /// Chart centred at the volume centroid.
    pub fn centered(polytope: HPolytope) -> Result<Self, PolytopeError> {
        let c = polytope.centroid()?;
        RadialChart::new(polytope, c)
    }

    pub fn center(&self) -> &[Rational] {
        &self.center
    }

    pub fn polytope(&self) -> &HPolytope {
        &self.polytope
    }

    pub fn forward(&self, direction: &[Rational], t: &Rational) -> Result<Vec<Rational>, PolytopeError> {
        let hit = radial_to_boundary(&self.polytope, &self.center, direction)?;
        Ok(self
            .center
            .iter()
            .zip(&hit.point)
            .map(|(c, a)| c + t * (a - c))
            .collect())
    }

    /// `(canonical direction, t)`; the direction is `None` at the centre.
    pub fn inverse(&self, y: &[Rational]) -> Result<(Option<Vec<Rational>>, Rational), PolytopeError> {
        let d: Vec<Rational> = y.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        if d.iter().all(Zero::is_zero) {
            return Ok((None, Rational::zero()));
        }
        let hit = radial_to_boundary(&self.polytope, &self.center, &d)?;
        Ok((Some(canonical_direction(&d)), Rational::one() / hit.t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn square() -> HPolytope {
        HPolytope::cube(&[int(0), int(0)], &[int(1), int(1)])
    }

    #[test]
    fn hits_on_the_unit_square() {
        let c = [rat(1, 2), rat(1, 2)];
        let h = radial_to_boundary(&square(), &c, &[int(1), int(0)]).unwrap();
        assert_eq!(h.point, vec![int(1), rat(1, 2)]);
        assert_eq!(h.active, vec![1]);
        let corner = radial_to_boundary(&square(), &c, &[int(1), int(1)]).unwrap();
        assert_eq!(corner.point, vec![int(1), int(1)]);
        assert_eq!(corner.active, vec![1, 3]);
    }

    #[test]
    fn unbounded_ray() {
        let half = HPolytope::new(vec![super::super::AffineForm::coordinate(1, 0, &int(0))], 1).unwrap();
        assert_eq!(
            radial_to_boundary(&half, &[int(1)], &[int(1)]),
            Err(PolytopeError::RayUnbounded)
        );
    }

    #[test]
    fn chart_round_trip() {
        let chart = RadialChart::centered(square()).unwrap();
        assert_eq!(
            chart.forward(&[int(1), int(0)], &int(0)).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
        assert_eq!(
            chart.forward(&[int(1), int(0)], &int(1)).unwrap(),
            vec![int(1), rat(1, 2)]
        );
        let dir = [rat(-2, 3), rat(4, 9)];
        let y = chart.forward(&dir, &rat(2, 5)).unwrap();
        assert_eq!(chart.inverse(&y).unwrap(), (Some(vec![int(-3), int(2)]), rat(2, 5)));
    }

    #[test]
    fn canonical_keeps_sign() {
        assert_eq!(canonical_direction(&[rat(-1, 2), int(0)]), vec![int(-1), int(0)]);
        assert_eq!(canonical_direction(&[rat(2, 3), rat(4, 3)]), vec![int(1), int(2)]);
    }
}
