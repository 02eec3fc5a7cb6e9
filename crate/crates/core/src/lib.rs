//! Geometry of constant-curvature spaces, two-point symmetrization of
//! exactly-evaluable regions, and numerical checks of the isodiametric
//! inequality on `R^n`, `S^n` and `H^n`.

pub mod convexity;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod regions;
pub mod rng;
pub mod symmetrize;
pub mod vector;

pub use error::{Error, Result};
pub use geometry::{Ball, Curvature, Hyperplane, Orientation, Point, Side, Space, Tangent};
pub use vector::Vector;
