use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Ball, Curvature, Space};
use crate::regions::metrics::point_diameter;
use crate::regions::{sample, uniform_in_ball, Region, RegionDocument};
use crate::rng;

/// Candidate balls are placed inside an envelope of radius
/// `ENVELOPE_FACTOR * D`, wider than `D / 2` so that trimming matters.
pub const ENVELOPE_FACTOR: f64 = 0.75;

/// Samples (before rejection) behind each sampled-diameter check.
pub const CHECK_SAMPLES: usize = 20_000;

const MAX_TRIMS: usize = 200;
const MAX_ATTEMPTS: usize = 20;
// Regions with fewer check samples than this are regenerated.
const MIN_POINTS: usize = 200;

/// A generated region whose sampled diameter is at most `D`.
#[derive(Clone, Debug)]
pub struct Admissible {
    pub region: Region,
    pub sampled_diameter: f64,
    /// Trimming balls `B(w, D)` intersected in.
    pub trims: usize,
    pub digest: String,
}

/// Hex SHA-256 of the region's JSON document.
pub fn region_digest(space: &Space, region: &Region) -> String {
    let doc = serde_json::to_string(&RegionDocument::new(*space, region)).expect("region documents serialize");
    Sha256::digest(doc.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn check_diameter_bound(space: &Space, d: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Config(format!("D must be positive and finite, got {d}")));
    }
    if space.curvature() == Curvature::Sphere && d >= std::f64::consts::PI {
        return Err(Error::Config(format!("spherical D must lie in (0, pi), got {d}")));
    }
    Ok(())
}

/// [`generate_admissible`] without the bookkeeping.
pub fn random_admissible_region(space: &Space, d: f64, complexity: usize, seed: u64) -> Result<Region> {
    generate_admissible(space, d, complexity, seed).map(|a| a.region)
}

/// A random union/intersection/difference of `complexity` balls, trimmed
/// by intersecting with `B(w, D)` around sampled diameter endpoints `w`
/// until a fresh sample has diameter at most `D`.
///
/// With `complexity == 1` the result is a single ball of radius at most `D / 2`.
pub fn generate_admissible(space: &Space, d: f64, complexity: usize, seed: u64) -> Result<Admissible> {
    check_diameter_bound(space, d)?;
    if complexity == 0 {
        return Err(Error::Config("complexity must be at least 1".into()));
    }
    for attempt in 0..MAX_ATTEMPTS as u64 {
        let mut r = rng::stream(seed, attempt);
        let core = random_core(space, d, complexity, &mut r)?;
        if let Some(found) = trim(space, d, core, rng::derive_seed(seed, attempt))? {
            return Ok(found);
        }
    }
    Err(Error::Generation(format!("no nonempty admissible region after {MAX_ATTEMPTS} attempts")))
}

fn random_core<R: Rng>(space: &Space, d: f64, complexity: usize, r: &mut R) -> Result<Region> {
    let e = space.base_point();
    let center = match space.curvature() {
        Curvature::Sphere => uniform_in_ball(space, &Ball { center: e, radius: std::f64::consts::PI }, r),
        _ => uniform_in_ball(space, &Ball { center: e, radius: 1.0 }, r),
    };
    if complexity == 1 {
        let radius = r.gen_range(0.5..=1.0) * d / 2.0;
        return Region::ball(space, center, radius);
    }
    let envelope = ENVELOPE_FACTOR * d;
    let ball = |r: &mut R| -> Result<Region> {
        let radius = r.gen_range(0.2..0.5) * d;
        let c = uniform_in_ball(space, &Ball { center, radius: envelope - radius }, r);
        Region::ball(space, c, radius)
    };
    let mut region = ball(r)?;
    for _ in 1..complexity {
        let next = ball(r)?;
        let op: f64 = r.gen();
        region = if op < 0.5 {
            Region::union([region, next])
        } else if op < 0.8 {
            Region::difference(region, next)
        } else {
            Region::intersection([region, next])
        };
    }
    Ok(region)
}

fn trim(space: &Space, d: f64, core: Region, seed: u64) -> Result<Option<Admissible>> {
    let envelope = core.bounding_ball(space)?;
    let density = CHECK_SAMPLES as f64 / space.ball_volume(envelope.radius)?;
    let limit = space.chord2_from_distance(d);
    let mut trims: Vec<Region> = Vec::new();
    let mut pick = rng::stream(seed, u64::MAX);
    let build = |trims: &[Region]| {
        if trims.is_empty() {
            core.clone()
        } else {
            Region::intersection(std::iter::once(core.clone()).chain(trims.iter().cloned()))
        }
    };
    for round in 0..=MAX_TRIMS {
        // A fresh sample of the current region; trimming it by filtering
        // keeps it a uniform sample of each smaller region.
        let region = build(&trims);
        let mut points = sample(space, &region, density, rng::derive_seed(seed, round as u64))?.into_points();
        if points.len() < MIN_POINTS {
            return Ok(None);
        }
        let before = trims.len();
        loop {
            let (diam, x, y) = point_diameter(space, &points)?;
            if diam <= d {
                if trims.len() == before {
                    let digest = region_digest(space, &region);
                    return Ok(Some(Admissible { region, sampled_diameter: diam, trims: trims.len(), digest }));
                }
                break;
            }
            if trims.len() >= MAX_TRIMS {
                break;
            }
            let w = if pick.gen::<bool>() { x } else { y };
            points.retain(|p| space.chord2(&w, p) <= limit);
            trims.push(Region::ball(space, w, d)?);
            if points.len() < MIN_POINTS {
                return Ok(None);
            }
        }
    }
    Err(Error::Generation(format!("sampled diameter still above {d} after {MAX_TRIMS} trims")))
}
