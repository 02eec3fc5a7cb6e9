use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Hyperplane, Orientation, Point, Side, Space};
use crate::regions::{metrics, PointCloud, Region};
use crate::vector::Vector;

/// How the flow picks the next hyperplane.
///
/// Every strategy except `FixedSchedule` keeps the tracked pole in the
/// closed `H^+`, so mass only moves toward the pole.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// Bisector of a diameter-attaining pair of the current cloud.
    FarthestPairBisector { pole: Option<Point> },
    /// Uniformly random hyperplane through the pole, random orientation.
    ///
    /// Reflections fixing the pole preserve every distance to it, so this
    /// strategy never changes the distribution of distances from the pole
    /// and cannot carry a region onto the cap there.
    RandomThroughPole { pole: Point },
    /// The given hyperplanes in order.
    FixedSchedule { planes: Vec<Hyperplane> },
    /// Bisector of a sample lying beyond the reference ball and a hole inside
    /// it. Scores `candidates` random such pairs by how far the reflection
    /// would pull region samples toward the reference ball and keeps the best.
    DeficitBisector { pole: Option<Point>, candidates: usize },
}

impl Strategy {
    pub fn deficit() -> Self {
        Strategy::DeficitBisector { pole: None, candidates: 24 }
    }

    /// The pole mass is pushed toward (`e` unless set).
    pub fn pole(&self, space: &Space) -> Point {
        match self {
            Strategy::FarthestPairBisector { pole } | Strategy::DeficitBisector { pole, .. } => {
                pole.unwrap_or_else(|| space.base_point())
            }
            Strategy::RandomThroughPole { pole } => *pole,
            Strategy::FixedSchedule { .. } => space.base_point(),
        }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        let pole = match self {
            Strategy::FixedSchedule { planes } if planes.is_empty() => {
                return Err(Error::Config("fixed schedule needs at least one hyperplane".into()))
            }
            Strategy::FixedSchedule { planes } => {
                for h in planes {
                    space.check_len(h.normal().len())?;
                }
                return Ok(());
            }
            Strategy::DeficitBisector { candidates: 0, .. } => {
                return Err(Error::Config("deficit strategy needs at least one candidate".into()))
            }
            _ => self.pole(space),
        };
        space.point(pole.coords().as_slice()).map(|_| ())
    }
}

/// State the strategies may look at.
pub struct Choice<'a> {
    /// Samples of the current region.
    pub cloud: &'a PointCloud,
    /// Zero-based index of the step being chosen.
    pub step: usize,
    /// Equal-volume ball at the pole.
    pub reference: &'a Ball,
    /// Samples of the reference ball that are missing from the region.
    pub holes: &'a [Point],
    /// The current region, for strategies that score candidate planes.
    pub region: Option<&'a Region>,
}

pub fn choose_hyperplane<R: Rng + ?Sized>(space: &Space, strategy: &Strategy, choice: &Choice, rng: &mut R) -> Result<Hyperplane> {
    match strategy {
        Strategy::FarthestPairBisector { .. } => farthest_pair(space, &strategy.pole(space), choice.cloud),
        Strategy::RandomThroughPole { pole } => {
            let basis = space.tangent_basis(pole);
            loop {
                let mut v = Vector::zeros(space.ambient_dim());
                for b in &basis {
                    let g: f64 = rng.sample(StandardNormal);
                    v = v.add_scaled(g, b);
                }
                if space.tangent_dot(&v, &v) > 1e-12 {
                    let orientation = if rng.gen::<bool>() { Orientation::Positive } else { Orientation::Negative };
                    return space.hyperplane_through(pole, &v, orientation);
                }
            }
        }
        Strategy::FixedSchedule { planes } => planes.get(choice.step).copied().ok_or(Error::ScheduleExhausted(planes.len())),
        Strategy::DeficitBisector { candidates, .. } => {
            let pole = strategy.pole(space);
            deficit(space, &pole, *candidates, choice, rng).map_or_else(|| farthest_pair(space, &pole, choice.cloud), Ok)
        }
    }
}

fn farthest_pair(space: &Space, pole: &Point, cloud: &PointCloud) -> Result<Hyperplane> {
    let (_, x, y) = metrics::diameter(space, cloud)?;
    let h = space.bisector(&x, &y)?;
    Ok(if space.side(&h, pole) == Side::Negative { h.flipped() } else { h })
}

// Region samples scored per candidate plane.
const SCORE_SAMPLES: usize = 1500;

fn deficit<R: Rng + ?Sized>(space: &Space, pole: &Point, k: usize, choice: &Choice, rng: &mut R) -> Option<Hyperplane> {
    let reference = choice.reference;
    let limit = space.chord2_from_distance(reference.radius);
    let mut excess: Vec<(f64, Point)> = choice
        .cloud
        .points()
        .iter()
        .map(|p| (space.chord2(pole, p), *p))
        .filter(|(c, _)| *c > limit)
        .collect();
    if excess.is_empty() || choice.holes.is_empty() {
        return None;
    }
    excess.sort_by(|a, b| b.0.total_cmp(&a.0));
    let holes = choice.holes;
    // Half the candidates start from the outermost samples, the rest anywhere.
    let mut candidates = Vec::with_capacity(k);
    for i in 0..k {
        let y = if i % 2 == 0 { excess[rng.gen_range(0..8.min(excess.len()))].1 } else { excess[rng.gen_range(0..excess.len())].1 };
        let x = holes[rng.gen_range(0..holes.len())];
        // x is nearer the pole than y, so the pole lands in H^+.
        if let Ok(h) = space.bisector(&x, &y) {
            if space.side(&h, pole) != Side::Negative {
                candidates.push(h);
            }
        }
    }
    let Some(region) = choice.region else {
        return candidates.into_iter().next();
    };
    let points = choice.cloud.points();
    let stride = (points.len() / SCORE_SAMPLES).max(1);
    let scored: Vec<&Point> = points.iter().step_by(stride).collect();
    let excess_of = |q: &Point| (space.distance(pole, q) - reference.radius).max(0.0);
    let score = |h: &Hyperplane| -> f64 {
        scored
            .iter()
            .filter(|p| space.side(h, p) == Side::Negative)
            .map(|p| {
                let q = space.reflect(h, p);
                if region.contains(space, &q) {
                    0.0
                } else {
                    excess_of(p) - excess_of(&q)
                }
            })
            .sum()
    };
    let mut best: Option<(f64, Hyperplane)> = None;
    for h in candidates {
        let s = score(&h);
        if best.as_ref().map_or(true, |(b, _)| s > *b) {
            best = Some((s, h));
        }
    }
    best.map(|(_, h)| h)
}
