//! Interior points, dimension, boundedness, vertices and centroid.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{maximize, AffineForm, HPolytope, LpOutcome, PolytopeError};
use crate::exact::Rational;

/// Result of searching for a point with every form strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interior {
    /// Strictly interior point of a bounded polytope.
    Bounded(Vec<Rational>),
    /// Strictly interior point of an unbounded polytope.
    Unbounded(Vec<Rational>),
    /// No point makes every form positive.
    Infeasible,
}

impl Interior {
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Interior::Bounded(p) | Interior::Unbounded(p) => Some(p),
            Interior::Infeasible => None,
        }
    }
}

/// A coordinate direction along which the polytope is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Direction {
    pub coordinate: usize,
    pub positive: bool,
}

/// A point where every `strict` form is positive and every `weak` form is
/// non-negative. Found by maximising a common slack `s <= 1`.
pub(crate) fn feasible_point(strict: &[AffineForm], weak: &[AffineForm], n: usize) -> Option<Vec<Rational>> {
    if n == 0 {
        let ok = strict.iter().all(|f| f.constant.is_positive()) && weak.iter().all(|f| !f.constant.is_negative());
        return ok.then(Vec::new);
    }
    let lift = |f: &AffineForm, slack: i64| {
        let mut c = f.coeffs.clone();
        c.push(Rational::from_integer((-slack).into()));
        AffineForm::new(c, f.constant.clone())
    };
    let mut forms: Vec<AffineForm> = strict.iter().map(|f| lift(f, 1)).collect();
    forms.extend(weak.iter().map(|f| lift(f, 0)));
    let mut cap = vec![Rational::zero(); n + 1];
    cap[n] = -Rational::one();
    forms.push(AffineForm::new(cap, Rational::one()));
    let mut obj = vec![Rational::zero(); n + 1];
    obj[n] = Rational::one();
    match maximize(&forms, n + 1, &obj) {
        LpOutcome::Optimal { value, mut point } if value.is_positive() || strict.is_empty() => {
            point.pop();
            Some(point)
        }
        _ => None,
    }
}

impl HPolytope {
    /// A point with every form strictly positive, without classifying
    /// boundedness.
    pub fn strict_point(&self) -> Option<Vec<Rational>> {
        feasible_point(self.forms(), &[], self.dim())
    }

    /// Some point of the closed polytope.
    pub fn any_point(&self) -> Option<Vec<Rational>> {
        feasible_point(&[], self.forms(), self.dim())
    }

    pub fn feasible_interior(&self) -> Interior {
        match self.strict_point() {
            None => Interior::Infeasible,
            Some(p) if self.unbounded_directions().is_empty() => Interior::Bounded(p),
            Some(p) => Interior::Unbounded(p),
        }
    }

    /// Coordinate directions in which the (nonempty) polytope is unbounded.
    pub fn unbounded_directions(&self) -> Vec<Direction> {
        let n = self.dim();
        let mut out = Vec::new();
        for coordinate in 0..n {
            for positive in [true, false] {
                let mut obj = vec![Rational::zero(); n];
                obj[coordinate] = if positive { Rational::one() } else { -Rational::one() };
                if maximize(self.forms(), n, &obj) == LpOutcome::Unbounded {
                    out.push(Direction { coordinate, positive });
                }
            }
        }
        out
    }

    pub fn is_bounded(&self) -> bool {
        self.unbounded_directions().is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.any_point().is_none()
    }

    /// Dimension of the affine hull; `None` for the empty set.
    ///
    /// A strictly interior point gives full dimension directly. Otherwise the
    /// implicit equalities (forms whose maximum over the polytope is zero)
    /// cut out the affine hull.
    pub fn affine_dimension(&self) -> Option<usize> {
        let n = self.dim();
        if self.strict_point().is_some() {
            return Some(n);
        }
        self.any_point()?;
        let mut eqs = Vec::new();
        for f in self.forms() {
            if f.is_constant() {
                continue;
            }
            if let LpOutcome::Optimal { value, .. } = maximize(self.forms(), n, &f.coeffs) {
                if (value + &f.constant).is_zero() {
                    eqs.push(f.coeffs.clone());
                }
            }
        }
        Some(n - rank(eqs))
    }

    /// Exact vertex set by enumeration of basic solutions; dimension at most 4.
    pub fn vertices(&self) -> Result<Vec<Vec<Rational>>, PolytopeError> {
        let n = self.dim();
        if n > 4 {
            return Err(PolytopeError::DimensionTooHigh(n));
        }
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if !self.is_bounded() {
            return Err(PolytopeError::UnboundedPolytope);
        }
        if n == 0 {
            return Ok(vec![Vec::new()]);
        }
        let forms: Vec<&AffineForm> = self.forms().iter().filter(|f| !f.is_constant()).collect();
        let mut found = BTreeSet::new();
        for subset in combinations(forms.len(), n) {
            let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| forms[i].coeffs.clone()).collect();
            let rhs: Vec<Rational> = subset.iter().map(|&i| -forms[i].constant.clone()).collect();
            if let Some(p) = solve(rows, rhs) {
                if self.contains(&p) {
                    found.insert(p);
                }
            }
        }
        Ok(found.into_iter().collect())
    }

    /// Volume centroid. The boundary is triangulated recursively, coning
    /// every face from the average of its vertices.
    pub fn centroid(&self) -> Result<Vec<Rational>, PolytopeError> {
        let verts = self.vertices()?;
        if verts.is_empty() {
            return Err(PolytopeError::Empty);
        }
        let apex = average(&verts);
        self.centroid_from(&verts, &apex)
    }

    /// Centroid using `apex` (any point of the polytope) as the top-level
    /// cone point; lower faces are still coned from their vertex averages.
    /// Different apexes give different triangulations of the same body.
    pub fn centroid_with_apex(&self, apex: &[Rational]) -> Result<Vec<Rational>, PolytopeError> {
        let verts = self.vertices()?;
        if verts.is_empty() {
            return Err(PolytopeError::Empty);
        }
        self.centroid_from(&verts, apex)
    }

    fn centroid_from(&self, verts: &[Vec<Rational>], apex: &[Rational]) -> Result<Vec<Rational>, PolytopeError> {
        let n = self.dim();
        if affine_rank(verts) < n {
            return Err(PolytopeError::EmptyInterior);
        }
        let all: Vec<usize> = (0..verts.len()).collect();
        let mut simplices = Vec::new();
        for facet in self.subfaces(verts, &all, n) {
            for mut s in self.triangulate(verts, &facet, n - 1) {
                s.push(apex.to_vec());
                simplices.push(s);
            }
        }
        let mut total = Rational::zero();
        let mut acc = vec![Rational::zero(); n];
        for s in &simplices {
            let w = simplex_volume(s);
            let c = average(s);
            for i in 0..n {
                acc[i] += &w * &c[i];
            }
            total += w;
        }
        if total.is_zero() {
            return Err(PolytopeError::EmptyInterior);
        }
        Ok(acc.into_iter().map(|a| a / &total).collect())
    }

    /// Faces of dimension `k - 1` of the face spanned by `face` (of
    /// dimension `k`), as vertex index sets.
    fn subfaces(&self, verts: &[Vec<Rational>], face: &[usize], k: usize) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for f in self.forms() {
            if f.is_constant() {
                continue;
            }
            let on: Vec<usize> = face.iter().copied().filter(|&v| f.eval(&verts[v]).is_zero()).collect();
            if on.len() < face.len() && !on.is_empty() {
                let pts: Vec<Vec<Rational>> = on.iter().map(|&v| verts[v].clone()).collect();
                if affine_rank(&pts) + 1 == k {
                    out.insert(on);
                }
            }
        }
        out
    }

    /// Simplices (as point lists of length `k + 1`) triangulating a face of
    /// dimension `k`.
    fn triangulate(&self, verts: &[Vec<Rational>], face: &[usize], k: usize) -> Vec<Vec<Vec<Rational>>> {
        if k == 0 {
            return vec![vec![verts[face[0]].clone()]];
        }
        let pts: Vec<Vec<Rational>> = face.iter().map(|&v| verts[v].clone()).collect();
        let apex = average(&pts);
        let mut out = Vec::new();
        for sub in self.subfaces(verts, face, k) {
            for mut s in self.triangulate(verts, &sub, k - 1) {
                s.push(apex.clone());
                out.push(s);
            }
        }
        out
    }
}

pub(crate) fn average(pts: &[Vec<Rational>]) -> Vec<Rational> {
    let n = pts[0].len();
    let k = Rational::from_integer((pts.len() as i64).into());
    (0..n)
        .map(|i| pts.iter().map(|p| &p[i]).sum::<Rational>() / &k)
        .collect()
}

/// `|det(p_1 - p_0, ..., p_n - p_0)|`, proportional to the volume.
fn simplex_volume(s: &[Vec<Rational>]) -> Rational {
    let rows: Vec<Vec<Rational>> = s[1..]
        .iter()
        .map(|p| p.iter().zip(&s[0]).map(|(a, b)| a - b).collect())
        .collect();
    determinant(rows).abs()
}

fn affine_rank(pts: &[Vec<Rational>]) -> usize {
    if pts.is_empty() {
        return 0;
    }
    rank(
        pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
            .collect(),
    )
}

/// Row echelon form in place; returns the pivot columns.
fn eliminate(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        for r in row + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let k = &m[r][c] / &m[row][c];
            for j in c..cols {
                let d = &k * &m[row][j];
                m[r][j] -= d;
            }
        }
        pivots.push(c);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

pub(crate) fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    eliminate(&mut m).len()
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let k = &m[r][c] / &m[c][c];
            for j in c..n {
                let d = &k * &m[c][j];
                m[r][j] -= d;
            }
        }
    }
    det
}

/// Unique solution of a square system, if the matrix is invertible.
fn solve(rows: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows
        .into_iter()
        .zip(rhs)
        .map(|(mut r, b)| {
            r.push(b);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let inv = Rational::one() / &m[c][c];
        for j in c..=n {
            m[c][j] *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let k = m[r][c].clone();
                for j in c..=n {
                    let d = &k * &m[c][j];
                    m[r][j] -= d;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}
