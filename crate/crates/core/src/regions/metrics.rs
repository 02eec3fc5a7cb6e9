use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Point, Space};

use super::sampling::PointCloud;

// Absorbs rounding when comparing triangle-inequality bounds.
const BOUND_SLACK: f64 = 1e-12;

/// Exact diameter of a finite cloud, with a pair attaining it.
///
/// Points whose distance to a pivot cannot reach the running best are
/// discarded before the pairwise scan.
pub fn diameter(space: &Space, cloud: &PointCloud) -> Result<(f64, Point, Point)> {
    point_diameter(space, cloud.points())
}

pub fn point_diameter(space: &Space, points: &[Point]) -> Result<(f64, Point, Point)> {
    let first = *points.first().ok_or(Error::EmptyCloud)?;
    if points.len() == 1 {
        return Ok((0.0, first, first));
    }
    let farthest = |from: &Point| -> (usize, f64) {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, space.chord2(from, p)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    };
    // Double sweep gives a lower bound and a pivot.
    let (i1, _) = farthest(&first);
    let (i2, c2) = farthest(&points[i1]);
    let mut best = (c2, i1, i2);
    let lower = space.distance_from_chord2(c2);

    // d(x, y) <= d(x, p) + ecc(p) for every pivot p, so points whose bound
    // falls short of the double-sweep pair cannot attain the diameter. The
    // midpoint of that pair is what prunes the interior of round clouds.
    let mut pivots = vec![first, points[i1], points[i2]];
    if let Ok(m) = space.midpoint(&points[i1], &points[i2]) {
        pivots.push(m);
    }
    let mut reach = vec![f64::INFINITY; points.len()];
    for p in &pivots {
        let dist: Vec<f64> = points.iter().map(|x| space.distance(p, x)).collect();
        let ecc = dist.iter().copied().fold(0.0, f64::max);
        for (r, d) in reach.iter_mut().zip(&dist) {
            *r = r.min(d + ecc);
        }
    }
    let pivot = points[i1];
    let mut radial: Vec<(f64, usize)> = (0..points.len())
        .filter(|&i| reach[i] + BOUND_SLACK >= lower)
        .map(|i| (space.distance(&pivot, &points[i]), i))
        .collect();
    radial.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best_dist = lower;
    for (a, &(ra, i)) in radial.iter().enumerate() {
        if ra + ra + BOUND_SLACK < best_dist {
            break;
        }
        for &(rb, j) in &radial[a + 1..] {
            if ra + rb + BOUND_SLACK < best_dist {
                break;
            }
            let c = space.chord2(&points[i], &points[j]);
            if c > best.0 {
                best = (c, i, j);
                best_dist = space.distance_from_chord2(c);
            }
        }
    }
    Ok((space.distance_from_chord2(best.0), points[best.1], points[best.2]))
}

/// Exact Hausdorff distance between two finite clouds.
pub fn hausdorff(space: &Space, a: &PointCloud, b: &PointCloud) -> Result<f64> {
    point_hausdorff(space, a.points(), b.points())
}

pub fn point_hausdorff(space: &Space, a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let pivot = a[0];
    let ab = NearestIndex::new(space, &pivot, b).directed(a);
    let ba = NearestIndex::new(space, &pivot, a).directed(b);
    Ok(ab.max(ba))
}

/// Nearest-neighbour search over points sorted by distance to a pivot.
pub struct NearestIndex<'a> {
    space: &'a Space,
    pivot: Point,
    keys: Vec<f64>,
    points: Vec<Point>,
}

impl<'a> NearestIndex<'a> {
    pub fn new(space: &'a Space, pivot: &Point, points: &[Point]) -> Self {
        let mut entries: Vec<(f64, Point)> = points.iter().map(|p| (space.distance(pivot, p), *p)).collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        NearestIndex {
            space,
            pivot: *pivot,
            keys: entries.iter().map(|e| e.0).collect(),
            points: entries.into_iter().map(|e| e.1).collect(),
        }
    }

    /// Distance from `x` to the nearest indexed point.
    pub fn nearest(&self, x: &Point) -> f64 {
        self.nearest_beyond(x, -1.0)
    }

    /// Distance to the nearest indexed point other than `x` itself.
    pub fn nearest_other(&self, x: &Point) -> f64 {
        self.nearest_beyond(x, 0.0)
    }

    /// Mean distance from each indexed point to its nearest neighbour.
    pub fn mean_spacing(&self) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        // Collect before summing so the result does not depend on the worker count.
        let gaps: Vec<f64> = self.points.par_iter().map(|p| self.nearest_other(p)).collect();
        gaps.iter().sum::<f64>() / gaps.len() as f64
    }

    fn nearest_beyond(&self, x: &Point, min_c2: f64) -> f64 {
        let key = self.space.distance(&self.pivot, x);
        let start = self.keys.partition_point(|&k| k < key);
        let mut best_c2 = f64::INFINITY;
        let mut best = f64::INFINITY;
        let (mut lo, mut hi) = (start, start);
        loop {
            let down = lo > 0 && key - self.keys[lo - 1] <= best + BOUND_SLACK;
            let up = hi < self.keys.len() && self.keys[hi] - key <= best + BOUND_SLACK;
            if !down && !up {
                break;
            }
            // Step whichever side is closer in key.
            let take_down = down && (!up || key - self.keys[lo - 1] <= self.keys[hi] - key);
            let idx = if take_down {
                lo -= 1;
                lo
            } else {
                hi += 1;
                hi - 1
            };
            let c = self.space.chord2(&self.points[idx], x);
            if c < best_c2 && c > min_c2 {
                best_c2 = c;
                best = self.space.distance_from_chord2(c);
            }
        }
        best
    }

    /// `max_{x in from} min_{y in self} d(x, y)`.
    pub fn directed(&self, from: &[Point]) -> f64 {
        from.par_iter().map(|x| self.nearest(x)).reduce(|| 0.0, f64::max)
    }
}
