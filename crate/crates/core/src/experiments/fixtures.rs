use crate::error::Result;
use crate::geometry::{Point, Space};
use crate::regions::Region;
use crate::vector::Vector;

/// The point at distance `r` from `e` along ambient axis `axis`.
pub fn point_along(space: &Space, axis: usize, r: f64) -> Result<Point> {
    let e = space.base_point();
    let u = space.unit_tangent(&e, &Vector::axis(space.ambient_dim(), axis))?;
    space.geodesic_point(&u, r)
}

/// Two balls of radius 0.4 whose centers sit at distance 0.8 from `e` on
/// opposite sides along the first axis.
pub fn two_caps(space: &Space) -> Result<Region> {
    Ok(Region::union([
        Region::ball(space, point_along(space, 0, 0.8)?, 0.4)?,
        Region::ball(space, point_along(space, 0, -0.8)?, 0.4)?,
    ]))
}

/// `B(e, 0.9)` with a ball of radius 0.35 at distance 0.6 along the first
/// axis removed.
pub fn dented_ball(space: &Space) -> Result<Region> {
    Ok(Region::difference(
        Region::ball(space, space.base_point(), 0.9)?,
        Region::ball(space, point_along(space, 0, 0.6)?, 0.35)?,
    ))
}

/// `B(e, r)`.
pub fn cap(space: &Space, r: f64) -> Result<Region> {
    Region::ball(space, space.base_point(), r)
}
