use serde::{Deserialize, Serialize};

use crate::exact::{orientation, Point};

/// A closed polygon: the boundary of a disk, listed counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SLCircle {
    /// Vertex indices of the owning disk, one per corner of the polygon.
    pub vertices: Vec<usize>,
    pub points: Vec<Point>,
}

impl SLCircle {
    pub fn new(vertices: Vec<usize>, points: Vec<Point>) -> Self {
        assert_eq!(vertices.len(), points.len());
        SLCircle { vertices, points }
    }

    /// Circle from bare points, numbered `0..n`.
    pub fn from_points(points: Vec<Point>) -> Self {
        SLCircle {
            vertices: (0..points.len()).collect(),
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        let n = self.points.len();
        &self.points[i % n]
    }

    /// Orientation of the turn at position `i`.
    pub fn turn(&self, i: usize) -> i8 {
        let n = self.points.len();
        orientation(
            &self.points[(i + n - 1) % n],
            &self.points[i],
            &self.points[(i + 1) % n],
        )
    }

    /// The associated strictly convex circle: only the endpoints of natural
    /// edges are kept.
    pub fn corners(&self) -> SLCircle {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.turn(i) != 0).collect();
        SLCircle {
            vertices: keep.iter().map(|&i| self.vertices[i]).collect(),
            points: keep.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

/// A maximal straight run of the circle, given by consecutive positions in
/// the cycle. The first and last positions are corners; anything in between
/// is a flat vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalEdge {
    pub positions: Vec<usize>,
}

impl NaturalEdge {
    /// Number of polygon edges in the run.
    pub fn len(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.positions.len() < 2
    }

    pub fn is_plateau(&self) -> bool {
        self.len() > 1
    }

    pub fn first(&self) -> usize {
        self.positions[0]
    }

    pub fn last(&self) -> usize {
        *self.positions.last().unwrap()
    }
}

/// Partition of the cyclic edge sequence into maximal collinear runs, in
/// counterclockwise order starting from the first corner.
pub fn natural_edges(c: &SLCircle) -> Vec<NaturalEdge> {
    let n = c.len();
    let corners: Vec<usize> = (0..n).filter(|&i| c.turn(i) != 0).collect();
    if corners.is_empty() {
        return Vec::new();
    }
    let mut runs = Vec::with_capacity(corners.len());
    for (k, &start) in corners.iter().enumerate() {
        let end = corners[(k + 1) % corners.len()];
        let mut positions = vec![start];
        let mut i = start;
        loop {
            i = (i + 1) % n;
            positions.push(i);
            if i == end {
                break;
            }
        }
        runs.push(NaturalEdge { positions });
    }
    runs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convexity {
    NotConvex,
    Convex,
    StrictlyConvex,
}

pub fn convexity(c: &SLCircle) -> Convexity {
    let turns: Vec<i8> = (0..c.len()).map(|i| c.turn(i)).collect();
    if turns.iter().all(|&t| t > 0) {
        Convexity::StrictlyConvex
    } else if turns.iter().all(|&t| t >= 0) && turns.iter().any(|&t| t > 0) {
        Convexity::Convex
    } else {
        Convexity::NotConvex
    }
}
