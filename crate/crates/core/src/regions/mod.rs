//! Compact regions as exact membership oracles, with Monte Carlo sampling,
//! volume estimation and cloud metrics.

mod cluster;
pub mod document;
pub mod metrics;
mod region;
pub mod sampling;

pub use cluster::BallCluster;
pub use document::{load_region, save_region, Node, RegionDocument};
pub use metrics::{diameter, hausdorff, NearestIndex};
pub use region::{BallNode, Region, DEFAULT_MAX_DEPTH};
pub use sampling::{sample, sample_ball, uniform_in_ball, volume_estimate, BallSampler, PointCloud, VolumeEstimate};
