//! Simplexwise-linear embeddings of triangulated planar disks, computed with
//! exact rational arithmetic.
//!
//! The crate extends boundary embeddings of a triangulated disk to embeddings
//! of the whole disk, and provides exact polyhedral tools (linear programming,
//! vertex enumeration, centroids, radial charts) to probe the spaces of such
//! embeddings.

// Dense matrix code reads best with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod complex;
pub mod corpus;
pub mod exact;
pub mod extension;
pub mod io;
pub mod polytope;
pub mod reduction;

pub use complex::{SLCircle, SLDisk};
pub use exact::{Point, ProjectiveMap, Rational};
pub use extension::SLMap;
