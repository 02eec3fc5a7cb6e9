use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Hyperplane, Point, Side, Space};
use crate::regions::metrics::{point_diameter, point_hausdorff, NearestIndex};
use crate::regions::{BallCluster, BallSampler, PointCloud, Region, VolumeEstimate, DEFAULT_MAX_DEPTH};
use crate::rng::{self, StreamRng};

use super::strategy::{choose_hyperplane, Choice, Strategy};
use super::{spherical_diameter_warning, symmetrize_reduced, two_point_symmetrize};

// Seed tags for the independent random streams a flow uses.
const TAG_PROPOSALS: u64 = 1;
const TAG_STRATEGY: u64 = 2;
const TAG_IDENTITY: u64 = 3;
const TAG_REBASE: u64 = 4;
const TAG_PRECONDITION: u64 = 5;

pub const DEFAULT_MAX_QUERY_COST: usize = 64;
const COST_PROBES: usize = 256;

#[derive(Clone, Debug, Serialize)]
pub struct FlowConfig {
    pub strategy: Strategy,
    pub max_steps: usize,
    /// Stop once the Hausdorff distance to the reference ball drops below this.
    pub stop_epsilon: f64,
    pub seed: u64,
    /// Proposals drawn from the envelope for every metric evaluation.
    pub samples: usize,
    /// Symmetrization layers allowed before the region is re-based.
    pub max_depth: usize,
    /// Mean node visits per membership query (over a fixed subset of the
    /// proposals) allowed before the region is re-based.
    pub max_query_cost: usize,
    /// Proposals used to place and calibrate re-based ball clusters.
    pub rebase_samples: usize,
    /// Random points per step checked against the counting identity.
    pub identity_checks: usize,
}

impl FlowConfig {
    pub fn new(strategy: Strategy, max_steps: usize, seed: u64) -> Self {
        FlowConfig {
            strategy,
            max_steps,
            stop_epsilon: 0.0,
            seed,
            samples: 20_000,
            max_depth: DEFAULT_MAX_DEPTH,
            max_query_cost: DEFAULT_MAX_QUERY_COST,
            rebase_samples: 100_000,
            identity_checks: 1000,
        }
    }

    fn validate(&self, space: &Space) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if self.samples < 100 || self.rebase_samples < 100 {
            return Err(Error::Config("flows need at least 100 samples per evaluation".into()));
        }
        if !(self.stop_epsilon >= 0.0) {
            return Err(Error::Config(format!("stop_epsilon must be nonnegative, got {}", self.stop_epsilon)));
        }
        self.strategy.validate(space)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub volume: VolumeEstimate,
    /// Exact diameter of the sampled cloud.
    pub diameter: f64,
    /// Hausdorff distance between the region and reference-ball clouds.
    pub hausdorff: f64,
    /// The hyperplane applied to reach this step (none at step 0).
    pub hyperplane: Option<Hyperplane>,
    pub depth: usize,
    /// The region was replaced by a calibrated ball cluster at this step.
    pub rebased: bool,
    /// Counting-identity failures among the step's random checks.
    pub identity_failures: usize,
    pub cloud_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Epsilon,
    MaxSteps,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub space: Space,
    pub pole: Point,
    pub reference_ball: Ball,
    /// Proposals are drawn from this ball, which contains every iterate.
    pub envelope: Ball,
    pub seed: u64,
    pub config: FlowConfig,
    /// Twice the mean nearest-neighbour spacing of the step-0 cloud: the
    /// resolution of the sampled diameter and Hausdorff metrics.
    pub sampling_slack: f64,
    pub stop_reason: StopReason,
    pub rebases: usize,
    pub warnings: Vec<String>,
    pub steps: Vec<StepRecord>,
}

impl FlowReport {
    pub fn last(&self) -> &StepRecord {
        self.steps.last().expect("a report has at least step 0")
    }

    /// Largest `|V_k - V_0| / sqrt(s_k^2 + s_0^2)` over the flow.
    pub fn max_volume_drift_sigmas(&self) -> f64 {
        let v0 = &self.steps[0].volume;
        self.steps
            .iter()
            .map(|r| {
                let s = r.volume.std_error.hypot(v0.std_error);
                let d = (r.volume.value - v0.value).abs();
                if d == 0.0 {
                    0.0
                } else {
                    d / s
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest step-to-step increase of the sampled diameter.
    pub fn max_diameter_increase(&self) -> f64 {
        self.steps.windows(2).map(|w| w[1].diameter - w[0].diameter).fold(0.0, f64::max)
    }

    pub fn identity_failures(&self) -> usize {
        self.steps.iter().map(|r| r.identity_failures).sum()
    }

    /// Columns: step, volume, volume_stderr, diameter, hausdorff, one
    /// `normal_i` per ambient coordinate, offset, orientation, depth, rebased,
    /// identity_failures. Hyperplane cells are empty at step 0.
    pub fn to_csv(&self) -> String {
        let m = self.space.ambient_dim();
        let mut out = String::from("step,volume,volume_stderr,diameter,hausdorff");
        for i in 0..m {
            let _ = write!(out, ",normal_{i}");
        }
        out.push_str(",offset,orientation,depth,rebased,identity_failures\n");
        for r in &self.steps {
            let _ = write!(out, "{},{},{},{},{}", r.step, r.volume.value, r.volume.std_error, r.diameter, r.hausdorff);
            match &r.hyperplane {
                Some(h) => {
                    for c in h.normal().as_slice() {
                        let _ = write!(out, ",{c}");
                    }
                    let _ = write!(out, ",{},{}", h.offset(), h.orientation().sign());
                }
                None => out.push_str(&",".repeat(m + 2)),
            }
            let _ = writeln!(out, ",{},{},{}", r.depth, r.rebased as u8, r.identity_failures);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// An in-progress symmetrization flow.
///
/// All metrics of every step are evaluated on one fixed set of proposals
/// from the envelope, so successive records differ only through the region.
pub struct Flow {
    space: Space,
    config: FlowConfig,
    pole: Point,
    region: Arc<Region>,
    envelope: Ball,
    env_volume: f64,
    proposals: Vec<Point>,
    reference: Ball,
    in_reference: Vec<bool>,
    reference_cloud: Vec<Point>,
    cloud: PointCloud,
    holes: Vec<Point>,
    strategy_rng: StreamRng,
    step: usize,
    rebases: usize,
    warnings: Vec<String>,
    sampling_slack: f64,
    records: Vec<StepRecord>,
}

impl Flow {
    /// Sets up the flow and records step 0.
    pub fn new(space: &Space, initial: impl Into<Arc<Region>>, config: FlowConfig) -> Result<Self> {
        config.validate(space)?;
        let region: Arc<Region> = initial.into();
        let pole = config.strategy.pole(space);
        let bound = region.bounding_ball(space)?;
        let envelope = Ball {
            center: pole,
            radius: (space.distance(&pole, &bound.center) + bound.radius).min(space.max_radius()),
        };
        let mut warnings = Vec::new();
        if let Some(w) = spherical_diameter_warning(space, &region, 4000, rng::derive_seed(config.seed, TAG_PRECONDITION))? {
            warnings.push(w);
        }
        let mut flow = Flow {
            space: *space,
            pole,
            region,
            envelope,
            env_volume: 0.0,
            proposals: Vec::new(),
            reference: Ball { center: pole, radius: 0.0 },
            in_reference: Vec::new(),
            reference_cloud: Vec::new(),
            cloud: PointCloud::from_points(Vec::new()),
            holes: Vec::new(),
            strategy_rng: rng::stream(rng::derive_seed(config.seed, TAG_STRATEGY), 0),
            step: 0,
            rebases: 0,
            warnings,
            sampling_slack: 0.0,
            records: Vec::new(),
            config,
        };
        flow.draw_proposals()?;
        let members = flow.membership();
        let hits = members.iter().filter(|&&m| m).count();
        if hits == 0 {
            return Err(Error::EmptyCloud);
        }
        let v0 = flow.env_volume * hits as f64 / flow.proposals.len() as f64;
        flow.reference = Ball { center: pole, radius: space.radius_for_volume(v0)? };
        flow.mark_reference();
        let record = flow.measure(members, None, 0, false)?;
        flow.sampling_slack = 2.0 * NearestIndex::new(space, &pole, flow.cloud.points()).mean_spacing();
        flow.records.push(record);
        Ok(flow)
    }

    pub fn region(&self) -> &Arc<Region> {
        &self.region
    }

    pub fn reference(&self) -> &Ball {
        &self.reference
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    /// Current region samples.
    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    /// Applies one symmetrization and records the metrics.
    pub fn step(&mut self) -> Result<&StepRecord> {
        let choice = Choice {
            cloud: &self.cloud,
            step: self.step,
            reference: &self.reference,
            holes: &self.holes,
            region: Some(&self.region),
        };
        let h = choose_hyperplane(&self.space, &self.config.strategy, &choice, &mut self.strategy_rng)?;
        self.step += 1;
        let failures = self.check_identity(&h);

        let mut next = Arc::new(symmetrize_reduced(&self.space, &h, &self.region));
        let mut rebased = false;
        if next.symmetrization_depth() > self.config.max_depth || self.query_cost(&next) > self.config.max_query_cost {
            next = Arc::new(self.rebase(&next)?);
            rebased = true;
            self.rebases += 1;
        }
        self.region = next;
        if self.space.side(&h, &self.envelope.center) == Side::Negative {
            // The envelope follows the region to the mirror side.
            self.envelope.center = self.space.reflect(&h, &self.envelope.center);
            self.draw_proposals()?;
            self.mark_reference();
        }
        let members = self.membership();
        let record = self.measure(members, Some(h), failures, rebased)?;
        self.records.push(record);
        Ok(self.records.last().unwrap())
    }

    pub fn finish(self, stop_reason: StopReason) -> FlowReport {
        FlowReport {
            space: self.space,
            pole: self.pole,
            reference_ball: self.reference,
            envelope: self.envelope,
            seed: self.config.seed,
            sampling_slack: self.sampling_slack,
            stop_reason,
            rebases: self.rebases,
            warnings: self.warnings,
            steps: self.records,
            config: self.config,
        }
    }

    fn draw_proposals(&mut self) -> Result<()> {
        self.env_volume = self.space.ball_volume(self.envelope.radius)?;
        let sampler = BallSampler::new(&self.space, &self.envelope);
        let seed = rng::derive_seed(rng::derive_seed(self.config.seed, TAG_PROPOSALS), self.step as u64);
        self.proposals = rng::chunked_map(seed, self.config.samples, |r, _| sampler.sample(r));
        Ok(())
    }

    fn mark_reference(&mut self) {
        let limit = self.space.chord2_from_distance(self.reference.radius);
        let center = self.reference.center;
        self.in_reference = self.proposals.iter().map(|p| self.space.chord2(&center, p) <= limit).collect();
        self.reference_cloud =
            self.proposals.iter().zip(&self.in_reference).filter(|(_, &r)| r).map(|(p, _)| *p).collect();
    }

    fn membership(&self) -> Vec<bool> {
        let (space, region) = (&self.space, &self.region);
        self.proposals.par_iter().map(|p| region.contains(space, p)).collect()
    }

    fn measure(&mut self, members: Vec<bool>, h: Option<Hyperplane>, failures: usize, rebased: bool) -> Result<StepRecord> {
        let n = self.proposals.len();
        let mut points = Vec::new();
        let mut holes = Vec::new();
        for ((p, &m), &r) in self.proposals.iter().zip(&members).zip(&self.in_reference) {
            if m {
                points.push(*p);
            } else if r {
                holes.push(*p);
            }
        }
        let p = points.len() as f64 / n as f64;
        let volume = VolumeEstimate {
            value: self.env_volume * p,
            std_error: self.env_volume * (p * (1.0 - p) / n as f64).sqrt(),
            samples_used: n,
        };
        let (diameter, _, _) = point_diameter(&self.space, &points)?;
        let hausdorff = if self.reference_cloud.is_empty() {
            f64::INFINITY
        } else {
            point_hausdorff(&self.space, &points, &self.reference_cloud)?
        };
        let record = StepRecord {
            step: self.step,
            volume,
            diameter,
            hausdorff,
            hyperplane: h,
            depth: self.region.symmetrization_depth(),
            rebased,
            identity_failures: failures,
            cloud_size: points.len(),
        };
        self.cloud = PointCloud::new(points, n as f64 / self.env_volume, self.config.seed);
        self.holes = holes;
        Ok(record)
    }

    fn query_cost(&self, region: &Region) -> usize {
        let probes = &self.proposals[..COST_PROBES.min(self.proposals.len())];
        let total: usize = probes.iter().map(|p| region.query_cost(&self.space, p)).sum();
        total / probes.len().max(1)
    }

    /// `1_tau(y) + 1_tau(sigma y) = 1_X(y) + 1_X(sigma y)` at random envelope points.
    fn check_identity(&self, h: &Hyperplane) -> usize {
        if self.config.identity_checks == 0 {
            return 0;
        }
        let space = &self.space;
        let tau = two_point_symmetrize(h, self.region.clone());
        let x = &self.region;
        let sampler = BallSampler::new(space, &self.envelope);
        let seed = rng::derive_seed(rng::derive_seed(self.config.seed, TAG_IDENTITY), self.step as u64);
        rng::chunked_count(seed, self.config.identity_checks, |r| {
            let y = sampler.sample(r);
            let sy = space.reflect(h, &y);
            let lhs = tau.contains(space, &y) as u8 + tau.contains(space, &sy) as u8;
            let rhs = x.contains(space, &y) as u8 + x.contains(space, &sy) as u8;
            lhs != rhs
        })
    }

    /// Replaces `region` by a union of equal balls around fresh samples of
    /// it, with the radius chosen so that the union and the region capture
    /// the same number of points from an independent calibration sample.
    fn rebase(&self, region: &Region) -> Result<Region> {
        let space = &self.space;
        let base = rng::derive_seed(rng::derive_seed(self.config.seed, TAG_REBASE), self.step as u64);
        let sampler = BallSampler::new(space, &self.envelope);
        let m = self.config.rebase_samples;
        let centers: Vec<Point> = rng::chunked_map(rng::derive_seed(base, 0), m, |r, _| {
            let p = sampler.sample(r);
            region.contains(space, &p).then_some(p)
        })
        .into_iter()
        .flatten()
        .collect();
        let calibration = rng::chunked_map(rng::derive_seed(base, 1), m, |r, _| sampler.sample(r));
        let hits = calibration.par_iter().filter(|p| region.contains(space, p)).count();
        if centers.is_empty() || hits == 0 {
            return Err(Error::EmptyCloud);
        }
        let index = NearestIndex::new(space, &self.envelope.center, &centers);
        let mut gaps: Vec<f64> = calibration.par_iter().map(|p| index.nearest(p)).collect();
        gaps.sort_by(f64::total_cmp);
        let radius = if hits < gaps.len() { 0.5 * (gaps[hits - 1] + gaps[hits]) } else { gaps[hits - 1] };
        let cluster = Region::Cluster(BallCluster::new(space, centers, radius.min(0.5 * space.max_radius()))?);
        // Clip to the envelope so every proposal set still covers the region.
        if self.envelope.radius >= space.max_radius() {
            return Ok(cluster);
        }
        Ok(Region::intersection([Region::ball(space, self.envelope.center, self.envelope.radius)?, cluster]))
    }
}

/// Iterates [`Flow::step`] until the Hausdorff distance to the reference
/// ball drops below `stop_epsilon` or `max_steps` steps have run.
pub fn run_flow(space: &Space, initial: impl Into<Arc<Region>>, config: FlowConfig) -> Result<FlowReport> {
    let epsilon = config.stop_epsilon;
    let max_steps = config.max_steps;
    let mut flow = Flow::new(space, initial, config)?;
    if flow.records[0].hausdorff < epsilon {
        return Ok(flow.finish(StopReason::Epsilon));
    }
    for _ in 0..max_steps {
        if flow.step()?.hausdorff < epsilon {
            return Ok(flow.finish(StopReason::Epsilon));
        }
    }
    Ok(flow.finish(StopReason::MaxSteps))
}
