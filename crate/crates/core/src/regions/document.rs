//! JSON region documents.
//!
//! ```json
//! {
//!   "space": { "curvature": "sphere", "dim": 2 },
//!   "region": {
//!     "kind": "union",
//!     "children": [
//!       { "kind": "ball", "center": [0, 0, 1], "radius": 0.5 },
//!       { "kind": "symmetrized", "normal": [1, 0, 0], "orientation": 1,
//!         "inner": { "kind": "ball", "center": [0.6, 0, 0.8], "radius": 0.3 } }
//!     ]
//!   }
//! }
//! ```
//!
//! `halfspace` and `symmetrized` nodes take an optional `offset` (only
//! meaningful in `R^n`). Coordinates are ambient.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, Orientation, Space};

use super::Region;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDocument {
    pub space: Space,
    pub region: Node,
}

/// Serialized form of a [`Region`] tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Node {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Halfspace {
        normal: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        offset: f64,
        #[serde(default)]
        orientation: Orientation,
    },
    Union {
        children: Vec<Node>,
    },
    Intersection {
        children: Vec<Node>,
    },
    Difference {
        a: Box<Node>,
        b: Box<Node>,
    },
    Symmetrized {
        normal: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        offset: f64,
        #[serde(default)]
        orientation: Orientation,
        inner: Box<Node>,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl Node {
    pub fn from_region(region: &Region) -> Node {
        match region {
            Region::Ball(b) => {
                let ball = b.ball();
                Node::Ball { center: ball.center.coords().to_vec(), radius: ball.radius }
            }
            Region::HalfSpace(h) => {
                Node::Halfspace { normal: h.normal().to_vec(), offset: h.offset(), orientation: h.orientation() }
            }
            Region::Union(c) => Node::Union { children: c.iter().map(|r| Node::from_region(r)).collect() },
            Region::Intersection(c) => Node::Intersection { children: c.iter().map(|r| Node::from_region(r)).collect() },
            Region::Difference(a, b) => {
                Node::Difference { a: Box::new(Node::from_region(a)), b: Box::new(Node::from_region(b)) }
            }
            Region::Symmetrized { plane, inner, .. } => Node::Symmetrized {
                normal: plane.normal().to_vec(),
                offset: plane.offset(),
                orientation: plane.orientation(),
                inner: Box::new(Node::from_region(inner)),
            },
            Region::Cluster(c) => Node::Union {
                children: c
                    .centers()
                    .iter()
                    .map(|p| Node::Ball { center: p.coords().to_vec(), radius: c.radius() })
                    .collect(),
            },
        }
    }

    /// Builds the region, reporting the first invalid element by path.
    pub fn to_region(&self, space: &Space) -> Result<Region> {
        self.build(space, "region")
    }

    fn build(&self, space: &Space, path: &str) -> Result<Region> {
        let invalid = |message: String| Error::Document { path: path.to_string(), message };
        match self {
            Node::Ball { center, radius } => {
                if !(*radius >= 0.0) {
                    return Err(invalid(format!("radius must be nonnegative, got {radius}")));
                }
                let center = space.point(center).map_err(|e| invalid(format!("center: {e}")))?;
                Region::ball(space, center, *radius).map_err(|e| invalid(e.to_string()))
            }
            Node::Halfspace { normal, offset, orientation } => {
                Ok(Region::half_space(plane(space, normal, *offset, *orientation).map_err(invalid)?))
            }
            Node::Union { children } | Node::Intersection { children } => {
                if children.is_empty() {
                    return Err(invalid("needs at least one child".into()));
                }
                let built = children
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.build(space, &format!("{path}.children[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(match self {
                    Node::Union { .. } => Region::union(built),
                    _ => Region::intersection(built),
                })
            }
            Node::Difference { a, b } => {
                Ok(Region::difference(a.build(space, &format!("{path}.a"))?, b.build(space, &format!("{path}.b"))?))
            }
            Node::Symmetrized { normal, offset, orientation, inner } => {
                let h = plane(space, normal, *offset, *orientation).map_err(invalid)?;
                Ok(Region::symmetrized(h, inner.build(space, &format!("{path}.inner"))?))
            }
        }
    }
}

fn plane(space: &Space, normal: &[f64], offset: f64, orientation: Orientation) -> Result<Hyperplane, String> {
    space.hyperplane(normal, offset, orientation).map_err(|e| format!("normal: {e}"))
}

impl RegionDocument {
    pub fn new(space: Space, region: &Region) -> Self {
        RegionDocument { space, region: Node::from_region(region) }
    }

    pub fn to_region(&self) -> Result<Region> {
        self.region.to_region(&self.space)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

/// Reads and validates a region document.
pub fn load_region(path: impl AsRef<Path>) -> Result<(Space, Region)> {
    let text = std::fs::read_to_string(path)?;
    let doc = RegionDocument::from_json(&text)?;
    Ok((doc.space, doc.to_region()?))
}

pub fn save_region(path: impl AsRef<Path>, space: &Space, region: &Region) -> Result<()> {
    std::fs::write(path, RegionDocument::new(*space, region).to_json() + "\n")?;
    Ok(())
}
