use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Point, Space};

use super::region::enclosing_ball;

// Pivot-filter slack; keeps rounding in the triangle-inequality bounds from
// rejecting true members.
const FILTER_SLACK: f64 = 1e-9;

/// Union of many equal-radius balls, indexed by distances to three pivots so
/// a membership query only inspects nearby centers.
#[derive(Clone, Debug)]
pub struct BallCluster {
    data: Arc<ClusterData>,
}

#[derive(Debug)]
struct ClusterData {
    radius: f64,
    chord2: f64,
    pivots: [Point; 3],
    /// Sorted by `keys`.
    centers: Vec<Point>,
    /// Distance from each center to pivot 0, ascending.
    keys: Vec<f64>,
    /// Distances to pivots 1 and 2.
    aux: Vec<[f64; 2]>,
    bound: Ball,
}

impl BallCluster {
    pub fn new(space: &Space, centers: Vec<Point>, radius: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let balls: Vec<Ball> = centers.iter().map(|c| space.ball(*c, radius)).collect::<Result<_>>()?;
        let bound = enclosing_ball(space, &balls).expect("nonempty");
        let farthest = |from: &Point| {
            *centers
                .iter()
                .max_by(|a, b| space.chord2(from, a).total_cmp(&space.chord2(from, b)))
                .expect("nonempty")
        };
        let p0 = bound.center;
        let p1 = farthest(&p0);
        let p2 = farthest(&p1);
        let mut entries: Vec<(f64, [f64; 2], Point)> = centers
            .iter()
            .map(|c| (space.distance(&p0, c), [space.distance(&p1, c), space.distance(&p2, c)], *c))
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(BallCluster {
            data: Arc::new(ClusterData {
                radius,
                chord2: space.chord2_from_distance(radius),
                pivots: [p0, p1, p2],
                keys: entries.iter().map(|e| e.0).collect(),
                aux: entries.iter().map(|e| e.1).collect(),
                centers: entries.into_iter().map(|e| e.2).collect(),
                bound,
            }),
        })
    }

    pub fn radius(&self) -> f64 {
        self.data.radius
    }

    pub fn centers(&self) -> &[Point] {
        &self.data.centers
    }

    pub(crate) fn bound(&self) -> Ball {
        self.data.bound
    }

    pub fn contains(&self, space: &Space, x: &Point) -> bool {
        let d = &self.data;
        let reach = d.radius + FILTER_SLACK;
        let d0 = space.distance(&d.pivots[0], x);
        let lo = d.keys.partition_point(|&k| k < d0 - reach);
        let hi = d.keys.partition_point(|&k| k <= d0 + reach);
        if lo >= hi {
            return false;
        }
        let d1 = space.distance(&d.pivots[1], x);
        let d2 = space.distance(&d.pivots[2], x);
        (lo..hi).any(|i| {
            let [a1, a2] = d.aux[i];
            (a1 - d1).abs() <= reach && (a2 - d2).abs() <= reach && space.chord2(&d.centers[i], x) <= d.chord2
        })
    }
}
