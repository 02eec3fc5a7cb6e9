//! Hemisphere certificates, convex hulls through the gnomonic projection and
//! convexity probes for balls.

mod hull;
mod mnp;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Curvature, Point, Space};
use crate::regions::{uniform_in_ball, PointCloud};
use crate::rng;
use crate::vector::Vector;

pub use hull::{hull_contains, hull_diameter_check, HullDiameter, ProjectedHull, MEMBERSHIP_TOLERANCE};
pub use mnp::{min_norm, min_norm_point, min_norm_to, MinNorm, GAP_TOLERANCE};

/// Below this norm the minimum-norm point counts as the origin.
pub const CERTIFICATE_FLOOR: f64 = 1e-9;

/// A vector with positive inner product against every point of a cloud.
#[derive(Clone, Debug, Serialize)]
pub struct HemisphereCertificate {
    pub z: Vector,
    /// `min_i <z, x_i>`.
    pub min_margin: f64,
}

impl HemisphereCertificate {
    /// `z / |z|`.
    pub fn direction(&self) -> Vector {
        self.z.scale(1.0 / self.z.norm())
    }
}

/// Certificate from the nearest point of the Euclidean hull of the cloud's
/// ambient coordinates to the origin, or `None` when that point is the origin
/// or fails to separate.
pub fn hemisphere_center(cloud: &PointCloud) -> Option<HemisphereCertificate> {
    let coords: Vec<Vector> = cloud.points().iter().map(|p| *p.coords()).collect();
    if coords.is_empty() {
        return None;
    }
    let z = min_norm_point(&coords);
    if z.norm() <= CERTIFICATE_FLOOR {
        return None;
    }
    let min_margin = coords.iter().map(|x| z.dot(x)).fold(f64::INFINITY, f64::min);
    (min_margin > 0.0).then_some(HemisphereCertificate { z, min_margin })
}

/// Outcome of [`ball_convexity_probe`].
#[derive(Clone, Debug)]
pub struct ConvexityProbe {
    pub trials: usize,
    /// Pairs whose geodesic midpoint left the ball.
    pub violations: usize,
    /// The first violating pair, in trial order.
    pub witness: Option<(Point, Point)>,
    /// Antipodal pairs, which have no unique midpoint and are not counted.
    pub skipped: usize,
}

// Rounding allowance on the midpoint distance.
const MIDPOINT_SLACK: f64 = 1e-9;

/// Draws `trials` uniform pairs in `ball` and checks that each geodesic
/// midpoint stays inside it.
pub fn ball_convexity_probe(space: &Space, ball: &Ball, trials: usize, seed: u64) -> Result<ConvexityProbe> {
    let ball = space.ball(ball.center, ball.radius)?;
    enum Trial {
        Inside,
        Outside(Point, Point),
        Antipodal,
    }
    let outcomes = rng::chunked_map(seed, trials, |r, _| {
        let x = uniform_in_ball(space, &ball, r);
        let y = uniform_in_ball(space, &ball, r);
        match space.midpoint(&x, &y) {
            Err(_) => Trial::Antipodal,
            Ok(m) if space.distance(&ball.center, &m) <= ball.radius + MIDPOINT_SLACK => Trial::Inside,
            Ok(_) => Trial::Outside(x, y),
        }
    });
    let mut probe = ConvexityProbe { trials, violations: 0, witness: None, skipped: 0 };
    for t in outcomes {
        match t {
            Trial::Inside => {}
            Trial::Antipodal => probe.skipped += 1,
            Trial::Outside(x, y) => {
                probe.violations += 1;
                probe.witness.get_or_insert((x, y));
            }
        }
    }
    Ok(probe)
}

/// Sufficient bound on the diameter of a spherical cloud that
/// guarantees a hemisphere certificate: `arccos(-1/(n+1))`.
pub fn hemisphere_diameter_bound(dim: usize) -> f64 {
    (-1.0 / (dim as f64 + 1.0)).acos()
}

fn require_sphere(space: &Space) -> Result<()> {
    if space.curvature() == Curvature::Sphere {
        Ok(())
    } else {
        Err(Error::Hypothesis("hemisphere certificates are only defined on S^n".into()))
    }
}

/// [`hemisphere_center`] for a cloud that must live on `space`.
pub fn certify(space: &Space, cloud: &PointCloud) -> Result<HemisphereCertificate> {
    require_sphere(space)?;
    for p in cloud.points() {
        space.check_len(p.coords().len())?;
    }
    hemisphere_center(cloud).ok_or(Error::NoCertificate)
}
