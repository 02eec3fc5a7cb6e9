//! Two-point symmetrization as a region transformer, hyperplane selection
//! strategies and the iterated symmetrization flow.

mod flow;
mod strategy;

use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{Curvature, Hyperplane, Side, Space};
use crate::regions::{metrics, sampling, Region};

pub use flow::{run_flow, Flow, FlowConfig, FlowReport, StepRecord, StopReason, DEFAULT_MAX_QUERY_COST};
pub use strategy::{choose_hyperplane, Choice, Strategy};

/// `tau_H(region)`: a new [`Region::Symmetrized`] layer over `region`.
pub fn two_point_symmetrize(h: &Hyperplane, region: impl Into<Arc<Region>>) -> Region {
    Region::symmetrized(*h, region)
}

/// `tau_H(region)` with exact shortcuts that avoid adding a layer:
///
/// * a ball centered in the closed `H^+` is unchanged, one centered in `H^-`
///   is replaced by its mirror image;
/// * a region whose bounding ball lies in `H^+` is unchanged.
pub fn symmetrize_reduced(space: &Space, h: &Hyperplane, region: &Arc<Region>) -> Region {
    if let Region::Ball(node) = &**region {
        let b = node.ball();
        return match space.side(h, &b.center) {
            Side::Negative => Region::ball(space, space.reflect(h, &b.center), b.radius).expect("mirror of a valid ball"),
            _ => (**region).clone(),
        };
    }
    if let Some(b) = region.bound(space) {
        if space.signed_distance(h, &b.center) >= b.radius + 1e-12 {
            return (**region).clone();
        }
    }
    two_point_symmetrize(h, region.clone())
}

/// Sampled diameter check for the spherical hypothesis `diam X < pi`.
///
/// Returns a warning message when the sampled diameter comes within twice
/// the mean sample spacing of `pi`; sampling can only underestimate, so
/// silence is not a proof.
pub fn spherical_diameter_warning(space: &Space, region: &Region, samples: usize, seed: u64) -> Result<Option<String>> {
    if space.curvature() != Curvature::Sphere {
        return Ok(None);
    }
    let envelope = region.bounding_ball(space)?;
    let density = samples as f64 / space.ball_volume(envelope.radius)?;
    let cloud = sampling::sample(space, region, density, seed)?;
    if cloud.len() < 2 {
        return Ok(None);
    }
    let (d, _, _) = metrics::diameter(space, &cloud)?;
    let slack = 2.0 * metrics::NearestIndex::new(space, &envelope.center, cloud.points()).mean_spacing();
    Ok((d >= std::f64::consts::PI - slack)
        .then(|| format!("sampled spherical diameter {d} is not below pi; symmetrization may not preserve it")))
}

#[cfg(test)]
mod tests;
