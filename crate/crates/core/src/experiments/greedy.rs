use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{Point, Space};
use crate::regions::{BallSampler, PointCloud};
use crate::rng;

use super::admissible::check_diameter_bound;

/// Order in which the greedy pass visits candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyOrder {
    /// Random order.
    Scatter,
    /// Nearest to the pole first.
    Outward,
    /// Candidates inside `B(pole, D / 2)` first, then the rest in random order.
    BallFirst,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyOutcome {
    #[serde(skip)]
    pub cloud: PointCloud,
    pub order: GreedyOrder,
    pub candidates: usize,
    pub accepted: usize,
    /// `accepted * V(B(pole, D)) / candidates`.
    pub volume: f64,
    pub std_error: f64,
    pub ball_volume: f64,
    /// `V(B(D / 2)) - volume`.
    pub deficit: f64,
    /// `volume / V(B(D / 2))`.
    pub ratio: f64,
}

/// [`greedy_maximal_with`] in [`GreedyOrder::Scatter`] order, returning
/// the accepted cloud and the deficit.
pub fn greedy_maximal(space: &Space, d: f64, candidate_count: usize, seed: u64) -> Result<(PointCloud, f64)> {
    let out = greedy_maximal_with(space, d, candidate_count, seed, GreedyOrder::Scatter)?;
    Ok((out.cloud, out.deficit))
}

/// Draws `candidate_count` uniform candidates in `B(e, D)` and accepts each
/// one that lies within `D` of everything accepted so far.
pub fn greedy_maximal_with(space: &Space, d: f64, candidate_count: usize, seed: u64, order: GreedyOrder) -> Result<GreedyOutcome> {
    check_diameter_bound(space, d)?;
    let pole = space.base_point();
    // B(e, D) with D < pi is a valid ball on every space.
    let envelope = space.ball(pole, d)?;
    let sampler = BallSampler::new(space, &envelope);
    let mut candidates: Vec<Point> = rng::chunked_map(seed, candidate_count, |r, _| sampler.sample(r));
    let limit = space.chord2_from_distance(d);
    match order {
        GreedyOrder::Scatter => {}
        GreedyOrder::Outward => {
            candidates.sort_by(|a, b| space.chord2(&pole, a).total_cmp(&space.chord2(&pole, b)));
        }
        GreedyOrder::BallFirst => {
            let half = space.chord2_from_distance(d / 2.0);
            let (mut inner, mut outer): (Vec<Point>, Vec<Point>) =
                candidates.into_iter().partition(|p| space.chord2(&pole, p) <= half);
            outer.shuffle(&mut rng::stream(seed, u64::MAX));
            inner.extend(outer);
            candidates = inner;
        }
    }

    // Accepted points that rejected a candidate are checked first next time.
    let mut accepted: Vec<Point> = Vec::new();
    let mut blockers: Vec<usize> = Vec::new();
    for c in candidates {
        if let Some(k) = blockers.iter().position(|&i| space.chord2(&accepted[i], &c) > limit) {
            blockers[..=k].rotate_right(1);
            continue;
        }
        if let Some(i) = accepted.iter().position(|a| space.chord2(a, &c) > limit) {
            blockers.insert(0, i);
            continue;
        }
        accepted.push(c);
    }

    let env_volume = space.ball_volume(d)?;
    let ball_volume = space.ball_volume(d / 2.0)?;
    let n = candidate_count as f64;
    let p = accepted.len() as f64 / n;
    let volume = env_volume * p;
    let std_error = env_volume * (p * (1.0 - p) / n).sqrt();
    let count = accepted.len();
    Ok(GreedyOutcome {
        cloud: PointCloud::new(accepted, n / env_volume, seed),
        order,
        candidates: candidate_count,
        accepted: count,
        volume,
        std_error,
        ball_volume,
        deficit: ball_volume - volume,
        ratio: volume / ball_volume,
    })
}
