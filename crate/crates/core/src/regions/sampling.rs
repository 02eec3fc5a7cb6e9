use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Point, RadialProfile, Space};
use crate::rng;
use crate::vector::Vector;

use super::Region;

/// Refuse envelopes that would need more proposals than this.
pub const MAX_PROPOSALS: usize = 200_000_000;

/// Uniform sampler for a geodesic ball: uniform direction on the unit
/// tangent sphere at the center, radius by inverse CDF of `s(t)^(n-1)`.
#[derive(Clone, Debug)]
pub struct BallSampler {
    space: Space,
    center: Point,
    basis: Vec<Vector>,
    profile: RadialProfile,
}

impl BallSampler {
    pub fn new(space: &Space, ball: &Ball) -> Self {
        BallSampler {
            space: *space,
            center: ball.center,
            basis: space.tangent_basis(&ball.center),
            profile: RadialProfile::new(space.curvature(), space.dim(), ball.radius),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let dir = self.direction(rng);
        let t = self.profile.invert(rng.gen::<f64>());
        self.space.geodesic_point_unchecked(&self.center, &dir, t)
    }

    /// Uniform unit tangent at the center.
    pub fn direction<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        loop {
            let mut v = Vector::zeros(self.space.ambient_dim());
            for b in &self.basis {
                let g: f64 = rng.sample(StandardNormal);
                v = v.add_scaled(g, b);
            }
            let q = self.space.tangent_dot(&v, &v);
            if q > 1e-12 {
                return v.scale(1.0 / q.sqrt());
            }
        }
    }
}

/// One uniform draw from `ball`. Builds a [`BallSampler`]; reuse one for bulk draws.
pub fn uniform_in_ball<R: Rng + ?Sized>(space: &Space, ball: &Ball, rng: &mut R) -> Point {
    BallSampler::new(space, ball).sample(rng)
}

/// Samples drawn from a region at a known density (samples per unit volume).
#[derive(Clone, Debug)]
pub struct PointCloud {
    points: Vec<Point>,
    density: f64,
    seed: u64,
}

impl PointCloud {
    pub fn new(points: Vec<Point>, density: f64, seed: u64) -> Self {
        PointCloud { points, density, seed }
    }

    /// A cloud with no sampling-density meaning (unit weight per point).
    pub fn from_points(points: Vec<Point>) -> Self {
        PointCloud { points, density: 1.0, seed: 0 }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// Volume represented by each sample, `1 / density`.
    pub fn weight(&self) -> f64 {
        1.0 / self.density
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn volume_estimate(&self) -> f64 {
        self.points.len() as f64 * self.weight()
    }
}

/// Rejection-samples `region` from its bounding ball at `density`.
///
/// An empty region yields an empty cloud.
pub fn sample(space: &Space, region: &Region, density: f64, seed: u64) -> Result<PointCloud> {
    if !(density > 0.0) || !density.is_finite() {
        return Err(Error::OutOfRange(format!("sampling density must be positive, got {density}")));
    }
    let envelope = region.bounding_ball(space)?;
    let proposals = density * space.ball_volume(envelope.radius)?;
    if !(proposals <= MAX_PROPOSALS as f64) {
        return Err(Error::OutOfRange(format!(
            "density {density} needs {proposals:.0} proposals (limit {MAX_PROPOSALS})"
        )));
    }
    let sampler = BallSampler::new(space, &envelope);
    let points = rng::chunked_map(seed, proposals.round() as usize, |r, _| {
        let p = sampler.sample(r);
        region.contains(space, &p).then_some(p)
    })
    .into_iter()
    .flatten()
    .collect();
    Ok(PointCloud::new(points, density, seed))
}

/// Uniform draws from a ball (no rejection), as a cloud at the implied density.
pub fn sample_ball(space: &Space, ball: &Ball, count: usize, seed: u64) -> Result<PointCloud> {
    let volume = space.ball_volume(ball.radius)?;
    let sampler = BallSampler::new(space, ball);
    let points = rng::chunked_map(seed, count, |r, _| sampler.sample(r));
    Ok(PointCloud::new(points, count as f64 / volume, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples_used: usize,
}

impl VolumeEstimate {
    /// `|a - b| <= k * sqrt(sa^2 + sb^2)`.
    pub fn agrees_with(&self, other: &VolumeEstimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.std_error.hypot(other.std_error)
    }
}

/// Hit-or-miss volume estimate over the region's bounding ball.
pub fn volume_estimate(space: &Space, region: &Region, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    let envelope = region.bounding_ball(space)?;
    volume_estimate_in(space, region, &envelope, samples, seed)
}

/// Hit-or-miss estimate with a caller-chosen envelope (which must contain the region).
pub fn volume_estimate_in(
    space: &Space,
    region: &Region,
    envelope: &Ball,
    samples: usize,
    seed: u64,
) -> Result<VolumeEstimate> {
    if samples < 100 {
        return Err(Error::OutOfRange(format!("volume estimates need at least 100 samples, got {samples}")));
    }
    let env_volume = space.ball_volume(envelope.radius)?;
    let sampler = BallSampler::new(space, envelope);
    let hits = rng::chunked_count(seed, samples, |r| region.contains(space, &sampler.sample(r)));
    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        value: env_volume * p,
        std_error: env_volume * (p * (1.0 - p) / samples as f64).sqrt(),
        samples_used: samples,
    })
}
