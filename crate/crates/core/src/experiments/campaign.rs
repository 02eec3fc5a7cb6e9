use serde::Serialize;

use crate::error::Result;
use crate::regions::Region;
use crate::rng;
use crate::symmetrize::{run_flow, FlowConfig, FlowReport, Strategy};

use super::admissible::generate_admissible;
use super::fixtures;
use super::isodiametric::CampaignConfig;

/// One flow of the battery with its checks.
#[derive(Clone, Debug, Serialize)]
pub struct FlowOutcome {
    pub name: String,
    /// Whether the final Hausdorff distance must fall below the threshold.
    pub must_converge: bool,
    pub converged: bool,
    pub volume_drift_sigmas: f64,
    pub diameter_increase: f64,
    pub identity_failures: usize,
    /// Every check required of this flow passed.
    pub passed: bool,
    pub report: FlowReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowCampaign {
    pub sigmas: f64,
    pub epsilon: f64,
    pub flows: Vec<FlowOutcome>,
}

impl FlowCampaign {
    pub fn failures(&self) -> usize {
        self.flows.iter().filter(|f| !f.passed).count()
    }

    pub fn reports(&self) -> Vec<&FlowReport> {
        self.flows.iter().map(|f| &f.report).collect()
    }

    /// One row per flow.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "name,must_converge,converged,steps,final_hausdorff,volume_drift_sigmas,diameter_increase,sampling_slack,identity_failures,rebases,passed\n",
        );
        for f in &self.flows {
            let r = &f.report;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                f.name,
                f.must_converge as u8,
                f.converged as u8,
                r.steps.len() - 1,
                r.last().hausdorff,
                f.volume_drift_sigmas,
                f.diameter_increase,
                r.sampling_slack,
                f.identity_failures,
                r.rebases,
                f.passed as u8
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Runs the deficit-strategy flow over the cap, two-cap, dented-ball and
/// `flow.random_regions` random admissible regions.
///
/// Every flow must keep its volume within `sigmas` standard errors, its
/// sampled diameter non-increasing up to the sampling slack, and satisfy the
/// counting identity; the fixtures must also reach the Hausdorff threshold.
pub fn symmetrization_campaign(config: &CampaignConfig) -> Result<FlowCampaign> {
    config.validate()?;
    let space = config.space;
    let settings = &config.flow;
    let mut battery: Vec<(String, Region, bool)> = vec![
        ("cap".into(), fixtures::cap(&space, 0.5)?, true),
        ("two_caps".into(), fixtures::two_caps(&space)?, true),
        ("dented_ball".into(), fixtures::dented_ball(&space)?, true),
    ];
    for k in 0..settings.random_regions {
        let seed = rng::derive_seed(config.seed, 1000 + k as u64);
        let a = generate_admissible(&space, config.d, config.complexity, seed)?;
        battery.push((format!("random_{k}"), a.region, false));
    }

    let mut flows = Vec::with_capacity(battery.len());
    for (i, (name, region, must_converge)) in battery.into_iter().enumerate() {
        let strategy = Strategy::DeficitBisector { pole: None, candidates: settings.candidates };
        let mut flow_config = FlowConfig::new(strategy, settings.max_steps, rng::derive_seed(config.seed, i as u64));
        flow_config.stop_epsilon = settings.epsilon;
        flow_config.samples = settings.samples;
        let report = run_flow(&space, region, flow_config)?;
        let converged = report.last().hausdorff < settings.epsilon;
        let volume_drift_sigmas = report.max_volume_drift_sigmas();
        let diameter_increase = report.max_diameter_increase();
        let identity_failures = report.identity_failures();
        let passed = volume_drift_sigmas <= config.sigmas
            && diameter_increase <= report.sampling_slack
            && identity_failures == 0
            && (converged || !must_converge);
        flows.push(FlowOutcome {
            name,
            must_converge,
            converged,
            volume_drift_sigmas,
            diameter_increase,
            identity_failures,
            passed,
            report,
        });
    }
    Ok(FlowCampaign { sigmas: config.sigmas, epsilon: settings.epsilon, flows })
}
