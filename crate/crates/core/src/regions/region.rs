use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::{Ball, Curvature, Hyperplane, Point, Side, Space};

use super::cluster::BallCluster;

/// Default cap on nested symmetrization layers (each layer doubles the
/// worst-case oracle cost).
pub const DEFAULT_MAX_DEPTH: usize = 24;

/// An exact membership oracle for a compact set.
///
/// Regions are immutable trees; children are shared through `Arc`, so
/// wrapping a region in a symmetrization layer is cheap.
#[derive(Clone, Debug)]
pub enum Region {
    Ball(BallNode),
    HalfSpace(Hyperplane),
    Union(Vec<Arc<Region>>),
    Intersection(Vec<Arc<Region>>),
    Difference(Arc<Region>, Arc<Region>),
    /// Two-point symmetrization `tau_H(inner)` with `H^+` the positive side of `plane`.
    Symmetrized { plane: Hyperplane, inner: Arc<Region>, bound: BoundCache },
    /// Union of equal-radius balls with a distance index; behaves like a
    /// `Union` of `Ball`s.
    Cluster(BallCluster),
}

/// Lazily computed bounding ball of a symmetrized layer, with the squared
/// chord used to reject queries outside it.
#[derive(Clone, Debug, Default)]
pub struct BoundCache(OnceLock<Option<(Ball, f64)>>);

// Radius inflation for bound-based rejection, so that rounding in reflected
// centers never rejects a member.
const BOUND_REJECT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct BallNode {
    ball: Ball,
    chord2: f64,
}

impl BallNode {
    pub fn ball(&self) -> &Ball {
        &self.ball
    }
}

impl Region {
    pub fn ball(space: &Space, center: Point, radius: f64) -> Result<Region> {
        let ball = space.ball(center, radius)?;
        if space.curvature() == Curvature::Sphere && radius >= std::f64::consts::PI {
            return Err(Error::OutOfRange("spherical region balls need radius < pi".into()));
        }
        Ok(Region::Ball(BallNode { ball, chord2: space.chord2_from_distance(radius) }))
    }

    pub fn half_space(plane: Hyperplane) -> Region {
        Region::HalfSpace(plane)
    }

    pub fn union(children: impl IntoIterator<Item = Region>) -> Region {
        Region::Union(children.into_iter().map(Arc::new).collect())
    }

    pub fn intersection(children: impl IntoIterator<Item = Region>) -> Region {
        Region::Intersection(children.into_iter().map(Arc::new).collect())
    }

    pub fn difference(a: Region, b: Region) -> Region {
        Region::Difference(Arc::new(a), Arc::new(b))
    }

    pub fn symmetrized(plane: Hyperplane, inner: impl Into<Arc<Region>>) -> Region {
        Region::Symmetrized { plane, inner: inner.into(), bound: BoundCache::default() }
    }

    /// Exact membership test.
    ///
    /// A symmetrized layer keeps `x` on the closed positive side when `x` or
    /// its mirror image belongs to the inner set, and on the open negative
    /// side only when both do.
    pub fn contains(&self, space: &Space, x: &Point) -> bool {
        match self {
            Region::Ball(b) => space.chord2(&b.ball.center, x) <= b.chord2,
            Region::HalfSpace(h) => space.side(h, x) != Side::Negative,
            Region::Union(children) => children.iter().any(|c| c.contains(space, x)),
            Region::Intersection(children) => children.iter().all(|c| c.contains(space, x)),
            Region::Difference(a, b) => a.contains(space, x) && !b.contains(space, x),
            Region::Symmetrized { plane, inner, bound } => {
                if let Some((b, reject)) = bound.get(space, plane, inner) {
                    if space.chord2(&b.center, x) > reject {
                        return false;
                    }
                }
                let here = inner.contains(space, x);
                match space.side(plane, x) {
                    Side::Negative => here && inner.contains(space, &space.reflect(plane, x)),
                    Side::On | Side::Positive => here || inner.contains(space, &space.reflect(plane, x)),
                }
            }
            Region::Cluster(c) => c.contains(space, x),
        }
    }

    /// Node visits [`Region::contains`] makes for `x`; symmetrized layers can
    /// double it per level.
    pub fn query_cost(&self, space: &Space, x: &Point) -> usize {
        let mut visits = 0;
        self.contains_counted(space, x, &mut visits);
        visits
    }

    fn contains_counted(&self, space: &Space, x: &Point, visits: &mut usize) -> bool {
        *visits += 1;
        match self {
            Region::Ball(_) | Region::HalfSpace(_) | Region::Cluster(_) => self.contains(space, x),
            Region::Union(children) => children.iter().any(|c| c.contains_counted(space, x, visits)),
            Region::Intersection(children) => children.iter().all(|c| c.contains_counted(space, x, visits)),
            Region::Difference(a, b) => a.contains_counted(space, x, visits) && !b.contains_counted(space, x, visits),
            Region::Symmetrized { plane, inner, bound } => {
                if let Some((b, reject)) = bound.get(space, plane, inner) {
                    if space.chord2(&b.center, x) > reject {
                        return false;
                    }
                }
                let here = inner.contains_counted(space, x, visits);
                match space.side(plane, x) {
                    Side::Negative => here && inner.contains_counted(space, &space.reflect(plane, x), visits),
                    Side::On | Side::Positive => here || inner.contains_counted(space, &space.reflect(plane, x), visits),
                }
            }
        }
    }

    /// Longest chain of nested symmetrization layers.
    pub fn symmetrization_depth(&self) -> usize {
        match self {
            Region::Ball(_) | Region::HalfSpace(_) | Region::Cluster(_) => 0,
            Region::Union(c) | Region::Intersection(c) => c.iter().map(|r| r.symmetrization_depth()).max().unwrap_or(0),
            Region::Difference(a, b) => a.symmetrization_depth().max(b.symmetrization_depth()),
            Region::Symmetrized { inner, .. } => 1 + inner.symmetrization_depth(),
        }
    }

    /// A ball guaranteed to contain the region (not necessarily minimal).
    ///
    /// On the sphere an unboundable region gets the whole sphere `B(e, pi)`.
    pub fn bounding_ball(&self, space: &Space) -> Result<Ball> {
        match self.bound(space) {
            Some(b) => Ok(b),
            None if space.curvature() == Curvature::Sphere => {
                Ok(Ball { center: space.base_point(), radius: std::f64::consts::PI })
            }
            None => Err(Error::Unboundable("region contains an unbounded half-space branch".into())),
        }
    }

    /// Bounding ball, or `None` when a half-space branch is unbounded.
    pub(crate) fn bound(&self, space: &Space) -> Option<Ball> {
        match self {
            Region::Ball(b) => Some(b.ball),
            Region::HalfSpace(_) => None,
            Region::Union(children) => {
                let bounds: Option<Vec<Ball>> = children.iter().map(|c| c.bound(space)).collect();
                enclosing_ball(space, &bounds?)
            }
            Region::Intersection(children) => children
                .iter()
                .filter_map(|c| c.bound(space))
                .min_by(|a, b| a.radius.total_cmp(&b.radius)),
            Region::Difference(a, _) => a.bound(space),
            Region::Symmetrized { plane, inner, bound } => bound.get(space, plane, inner).map(|(b, _)| b),
            Region::Cluster(c) => Some(c.bound()),
        }
    }
}

impl BoundCache {
    fn get(&self, space: &Space, plane: &Hyperplane, inner: &Region) -> Option<(Ball, f64)> {
        *self.0.get_or_init(|| {
            let b = symmetrized_bound(space, plane, &inner.bound(space)?);
            let reach = b.radius + BOUND_REJECT_SLACK;
            let reject = if reach >= space.max_radius() { f64::INFINITY } else { space.chord2_from_distance(reach) };
            Some((b, reject))
        })
    }
}

/// If `X` lies in `B(c, r)`, then `tau_H(X)` lies in `B(c, r)` when `c` is in
/// `H^+` and in `B(sigma c, r)` otherwise: two points on the same side of `H`
/// are never farther apart than one of them and the other's mirror image.
pub(crate) fn symmetrized_bound(space: &Space, plane: &Hyperplane, b: &Ball) -> Ball {
    match space.side(plane, &b.center) {
        Side::Negative => Ball { center: space.reflect(plane, &b.center), radius: b.radius },
        _ => *b,
    }
}

/// A ball containing all of `balls`, centered at their normalized mean.
pub(crate) fn enclosing_ball(space: &Space, balls: &[Ball]) -> Option<Ball> {
    let first = balls.first()?;
    if balls.len() == 1 {
        return Some(*first);
    }
    let sum = balls.iter().skip(1).fold(*first.center.coords(), |acc, b| acc + *b.center.coords());
    let center = match space.curvature() {
        Curvature::Euclidean => Point::from_raw(sum.scale(1.0 / balls.len() as f64)),
        _ => space.normalize_to_space(&sum).unwrap_or(first.center),
    };
    let radius = balls
        .iter()
        .map(|b| space.distance(&center, &b.center) + b.radius)
        .fold(0.0, f64::max)
        .min(space.max_radius());
    Some(Ball { center, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Orientation;
    use crate::regions::sampling::uniform_in_ball;
    use crate::rng;

    fn s2() -> Space {
        Space::sphere(2)
    }

    fn cap(space: &Space, coords: &[f64], r: f64) -> Region {
        Region::ball(space, space.normalize_to_space(&coords.into()).unwrap(), r).unwrap()
    }

    #[test]
    fn ball_contains_center() {
        let s = s2();
        let r = Region::ball(&s, s.base_point(), 1.0).unwrap();
        assert!(r.contains(&s, &s.base_point()));
        let far = s.point(&[1.0, 0.0, 0.0]).unwrap();
        assert!(!r.contains(&s, &far));
    }

    #[test]
    fn symmetric_set_is_unchanged() {
        let s = s2();
        // The plane x = 0 and a cap centered on it.
        let h = s.hyperplane(&[1.0, 0.0, 0.0], 0.0, Orientation::Positive).unwrap();
        let x = cap(&s, &[0.0, 0.3, 1.0], 0.8);
        let tau = Region::symmetrized(h, x.clone());
        let env = Ball { center: s.base_point(), radius: 2.0 };
        let mut r = rng::stream(3, 0);
        for _ in 0..1000 {
            let p = uniform_in_ball(&s, &env, &mut r);
            assert_eq!(tau.contains(&s, &p), x.contains(&s, &p));
        }
    }

    #[test]
    fn set_in_negative_side_reflects_wholesale() {
        let s = s2();
        let h = s.hyperplane(&[1.0, 0.0, 0.0], 0.0, Orientation::Positive).unwrap();
        let x = cap(&s, &[-0.6, 0.0, 0.8], 0.4);
        let mirror = cap(&s, &[0.6, 0.0, 0.8], 0.4);
        let tau = Region::symmetrized(h, x);
        let env = Ball { center: s.base_point(), radius: 1.6 };
        let mut r = rng::stream(5, 0);
        for _ in 0..1000 {
            let p = uniform_in_ball(&s, &env, &mut r);
            assert_eq!(tau.contains(&s, &p), mirror.contains(&s, &p));
        }
    }

    #[test]
    fn bounding_balls() {
        let s = s2();
        let a = cap(&s, &[0.0, 0.0, 1.0], 0.3);
        assert_eq!(a.bounding_ball(&s).unwrap().radius, 0.3);
        let b = cap(&s, &[0.0, 1.0, 1.0], 0.9);
        let i = Region::intersection([a.clone(), b.clone()]);
        assert_eq!(i.bounding_ball(&s).unwrap().radius, 0.3);
        let d = Region::difference(b.clone(), a.clone());
        assert_eq!(d.bounding_ball(&s).unwrap().radius, 0.9);

        let h = s.hyperplane(&[0.0, 1.0, 0.0], 0.0, Orientation::Positive).unwrap();
        let half = Region::half_space(h);
        assert_eq!(half.bounding_ball(&s).unwrap().radius, std::f64::consts::PI);
        let r2 = Space::euclidean(2);
        let h = r2.hyperplane(&[0.0, 1.0], 0.0, Orientation::Positive).unwrap();
        assert!(matches!(Region::half_space(h).bounding_ball(&r2), Err(Error::Unboundable(_))));
    }

    #[test]
    fn union_bound_contains_samples() {
        // Union of a cap and its mirror image: every member must lie in the bound.
        let s = s2();
        let h = s.hyperplane(&[1.0, 0.2, 0.0], 0.0, Orientation::Positive).unwrap();
        let a = cap(&s, &[0.5, 0.1, 0.9], 0.5);
        let Region::Ball(node) = &a else { unreachable!() };
        let b = Region::ball(&s, s.reflect(&h, &node.ball().center), 0.5).unwrap();
        let u = Region::union([a, b]);
        let bound = u.bounding_ball(&s).unwrap();
        let env = Ball { center: s.base_point(), radius: std::f64::consts::PI };
        let mut r = rng::stream(9, 0);
        let mut inside = 0;
        while inside < 1000 {
            let p = uniform_in_ball(&s, &env, &mut r);
            if u.contains(&s, &p) {
                inside += 1;
                assert!(s.distance(&bound.center, &p) <= bound.radius + 1e-12);
            }
        }
    }

    #[test]
    fn depth_counts_nested_layers() {
        let s = s2();
        let h = s.hyperplane(&[1.0, 0.0, 0.0], 0.0, Orientation::Positive).unwrap();
        let mut r = cap(&s, &[0.0, 0.0, 1.0], 0.3);
        for _ in 0..3 {
            r = Region::symmetrized(h, r);
        }
        assert_eq!(r.symmetrization_depth(), 3);
    }
}
