//! Upper bound of the height of the single non-roof boundary vertex over
//! all vertical embeddings fixing the roof.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::complex::{edge, is_trv, roof, SLDisk};
use crate::exact::{orientation, Point, Rational};
use crate::extension::SLMap;
use crate::polytope::{build_system, Axis, LpOutcome, Sense, VolumeSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("disk is not transverse to the verticals")]
    NotTrV,
    #[error("roof is not concave at vertex {0}")]
    RoofNotConcave(usize),
    #[error("an edge joins the two ends of the roof")]
    EndsJoined,
    #[error("boundary outside the roof is {0:?}, expected the single vertex {1}")]
    NotSingleVertex(Vec<usize>, usize),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

struct Setup {
    /// Vertices whose height is unknown, `u` last.
    free: Vec<usize>,
    ends: (usize, usize),
}

fn preconditions(d: &SLDisk, u: usize) -> Result<Setup, BoundError> {
    if !is_trv(d) {
        return Err(BoundError::NotTrV);
    }
    let r = roof(d).map_err(|_| BoundError::NotTrV)?;
    for w in r.vertices.windows(3) {
        if orientation(d.point(w[0]), d.point(w[1]), d.point(w[2])) > 0 {
            return Err(BoundError::RoofNotConcave(w[1]));
        }
    }
    let ends = (r.vertices[0], *r.vertices.last().unwrap());
    if d.edges().contains(&edge(ends.0, ends.1)) {
        return Err(BoundError::EndsJoined);
    }
    let rest: Vec<usize> = d
        .boundary()
        .iter()
        .copied()
        .filter(|v| !r.contains_vertex(*v))
        .collect();
    if rest != [u] {
        return Err(BoundError::NotSingleVertex(rest, u));
    }
    let mut free = d.interior_vertices();
    free.push(u);
    Ok(Setup { free, ends })
}

/// Supremum `b` of the height of `u` over the vertical embeddings of `d`
/// fixing the roof; these realise exactly the heights below `b`.
///
/// Computed as the maximum of `y_u` over the closed volume system in which
/// the roof is pinned and every other vertex moves vertically. The result is
/// checked to lie strictly above the segment joining the roof ends.
pub fn evaluation_bound(d: &SLDisk, u: usize) -> Result<Rational, BoundError> {
    let s = preconditions(d, u)?;
    let vs = VolumeSystem::new(
        d.clone(),
        s.free.iter().map(|&v| (v, Axis::Y)).collect(),
        SLMap::identity(d),
    );
    let p = build_system(&vs).map_err(|e| BoundError::Internal(e.to_string()))?;
    let mut obj = vec![Rational::zero(); p.dim()];
    *obj.last_mut().unwrap() = Rational::one();
    let b = match p.lp_extremum(&obj, Sense::Max) {
        LpOutcome::Optimal { value, .. } => value,
        other => return Err(BoundError::Internal(format!("bound LP ended with {other:?}"))),
    };
    let (a, c) = (d.point(s.ends.0), d.point(s.ends.1));
    let xu = &d.point(u).x;
    let t = (xu - &a.x) / (&c.x - &a.x);
    let floor = a.lerp(c, &t).y;
    if b <= floor {
        return Err(BoundError::Internal(format!("bound {b} is not above the roof ends")));
    }
    Ok(b)
}

/// Whether some vertical embedding fixing the roof puts `u` at height `y`:
/// the volume system with `y_u = y` has a strictly feasible point.
pub fn evaluation_feasible(d: &SLDisk, u: usize, y: &Rational) -> Result<bool, BoundError> {
    let s = preconditions(d, u)?;
    let mut pinned = SLMap::identity(d);
    pinned.insert(u, Point::new(d.point(u).x.clone(), y.clone()));
    let free = s.free[..s.free.len() - 1].iter().map(|&v| (v, Axis::Y)).collect();
    let p =
        build_system(&VolumeSystem::new(d.clone(), free, pinned)).map_err(|e| BoundError::Internal(e.to_string()))?;
    Ok(p.strict_point().is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::{fan, tent};
    use crate::exact::{int, rat};

    #[test]
    fn tent_bound() {
        let d = tent(rat(1, 2));
        assert_eq!(evaluation_bound(&d, 3), Ok(rat(1, 2)));
        assert_eq!(evaluation_bound(&tent(int(1)), 3), Ok(int(1)));
        for (y, ok) in [(int(0), true), (rat(1, 4), true), (rat(1, 2), false), (int(1), false)] {
            assert_eq!(evaluation_feasible(&d, 3, &y), Ok(ok), "y = {y}");
        }
    }

    #[test]
    fn preconditions_are_checked() {
        // The bottom edge of the square joins the ends of its roof.
        assert_eq!(evaluation_bound(&fan(), 0), Err(BoundError::EndsJoined));
    }
}
