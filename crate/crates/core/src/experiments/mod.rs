//! Campaigns that check the isodiametric inequality, greedy maximal sets and
//! the symmetrization flow on generated regions, with seeded, reproducible
//! reports.

mod admissible;
mod campaign;
pub mod fixtures;
mod greedy;
mod isodiametric;

pub use admissible::{
    check_diameter_bound, generate_admissible, random_admissible_region, region_digest, Admissible, CHECK_SAMPLES,
    ENVELOPE_FACTOR,
};
pub use campaign::{symmetrization_campaign, FlowCampaign, FlowOutcome};
pub use greedy::{greedy_maximal, greedy_maximal_with, GreedyOrder, GreedyOutcome};
pub use isodiametric::{
    verify_isodiametric, CampaignConfig, CampaignReport, CampaignSummary, FlowSettings, OutputPaths, TrialKind, TrialRecord,
};
