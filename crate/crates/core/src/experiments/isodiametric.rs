use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Ball, Space};
use crate::regions::sampling::volume_estimate_in;
use crate::regions::Region;
use crate::rng;

use super::admissible::{check_diameter_bound, generate_admissible, region_digest, ENVELOPE_FACTOR};

/// Settings shared by the isodiametric and symmetrization campaigns, read
/// from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub space: Space,
    /// Diameter bound `D`.
    #[serde(rename = "D", alias = "d")]
    pub d: f64,
    pub trials: usize,
    /// Hit-or-miss samples per volume estimate.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Balls combined by the admissible-region generator.
    #[serde(default = "default_complexity")]
    pub complexity: usize,
    pub seed: u64,
    /// Violations are margins above this many standard errors.
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
    #[serde(default)]
    pub flow: FlowSettings,
    #[serde(default)]
    pub output: OutputPaths,
}

/// Parameters for [`super::symmetrization_campaign`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSettings {
    pub max_steps: usize,
    /// Hausdorff threshold the convergent fixtures must reach.
    pub epsilon: f64,
    pub samples: usize,
    /// Random admissible regions appended to the battery.
    pub random_regions: usize,
    /// Deficit-strategy candidate planes per step.
    pub candidates: usize,
}

impl Default for FlowSettings {
    fn default() -> Self {
        FlowSettings { max_steps: 200, epsilon: 0.1, samples: 20_000, random_regions: 2, candidates: 24 }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

fn default_samples() -> usize {
    100_000
}

fn default_complexity() -> usize {
    4
}

fn default_sigmas() -> f64 {
    3.0
}

impl CampaignConfig {
    pub fn new(space: Space, d: f64, trials: usize, seed: u64) -> Self {
        CampaignConfig {
            space,
            d,
            trials,
            samples: default_samples(),
            complexity: default_complexity(),
            seed,
            sigmas: default_sigmas(),
            flow: FlowSettings::default(),
            output: OutputPaths::default(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: CampaignConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_diameter_bound(&self.space, self.d)?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.samples < 100 {
            return Err(Error::Config("samples must be at least 100".into()));
        }
        if self.complexity == 0 {
            return Err(Error::Config("complexity must be at least 1".into()));
        }
        if !(self.sigmas > 0.0) {
            return Err(Error::Config("sigmas must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    /// The ball of radius `D / 2`, where equality holds.
    ExactBall,
    Random,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub kind: TrialKind,
    pub digest: String,
    pub volume: f64,
    pub std_error: f64,
    /// Diameter of the generator's final check sample.
    pub sampled_diameter: f64,
    pub trims: usize,
    /// `volume - V(B(D / 2))`.
    pub margin: f64,
    /// `margin / std_error`.
    pub margin_sigmas: f64,
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignSummary {
    pub trials: usize,
    pub ball_volume: f64,
    pub max_margin: f64,
    pub max_margin_sigmas: f64,
    pub violations: usize,
    /// `|margin| / std_error` of the exact-ball trial.
    pub exact_ball_sigmas: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub summary: CampaignSummary,
    pub records: Vec<TrialRecord>,
}

impl CampaignReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,kind,digest,volume,volume_stderr,sampled_diameter,trims,margin,margin_sigmas,violation\n");
        for r in &self.records {
            let kind = match r.kind {
                TrialKind::ExactBall => "exact_ball",
                TrialKind::Random => "random",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.trial, r.seed, kind, r.digest, r.volume, r.std_error, r.sampled_diameter, r.trims, r.margin, r.margin_sigmas, r.violation as u8
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Writes to the configured output paths, if any.
    pub fn write_outputs(&self) -> Result<()> {
        if let Some(p) = &self.config.output.csv {
            std::fs::write(p, self.to_csv())?;
        }
        if let Some(p) = &self.config.output.json {
            std::fs::write(p, self.to_json())?;
        }
        Ok(())
    }
}

/// Compares estimated volumes of random admissible regions (trial 0: the
/// ball of radius `D / 2` itself) with `V(B(D / 2))`.
pub fn verify_isodiametric(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let space = config.space;
    let d = config.d;
    let ball_volume = space.ball_volume(d / 2.0)?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialRecord> {
            let seed = rng::derive_seed(config.seed, trial as u64);
            let (kind, region, sampled_diameter, trims, digest) = if trial == 0 {
                let region = Region::ball(&space, space.base_point(), d / 2.0)?;
                let digest = region_digest(&space, &region);
                (TrialKind::ExactBall, region, d, 0, digest)
            } else {
                let a = generate_admissible(&space, d, config.complexity, seed)?;
                (TrialKind::Random, a.region, a.sampled_diameter, a.trims, a.digest)
            };
            // The ball is its own bounding ball, which would make the estimate
            // exact; a wider envelope gives the equality case real sampling noise.
            let envelope = match kind {
                TrialKind::ExactBall => Ball { center: space.base_point(), radius: ENVELOPE_FACTOR * d },
                TrialKind::Random => region.bounding_ball(&space)?,
            };
            let v = volume_estimate_in(&space, &region, &envelope, config.samples, rng::derive_seed(seed, 1))?;
            let margin = v.value - ball_volume;
            let margin_sigmas = if margin == 0.0 { 0.0 } else { margin / v.std_error };
            Ok(TrialRecord {
                trial,
                seed,
                kind,
                digest,
                volume: v.value,
                std_error: v.std_error,
                sampled_diameter,
                trims,
                margin,
                margin_sigmas,
                violation: margin > config.sigmas * v.std_error,
            })
        })
        .collect::<Result<_>>()?;
    let summary = CampaignSummary {
        trials: records.len(),
        ball_volume,
        max_margin: records.iter().map(|r| r.margin).fold(f64::NEG_INFINITY, f64::max),
        max_margin_sigmas: records.iter().map(|r| r.margin_sigmas).fold(f64::NEG_INFINITY, f64::max),
        violations: records.iter().filter(|r| r.violation).count(),
        exact_ball_sigmas: records[0].margin_sigmas.abs(),
    };
    Ok(CampaignReport { config: config.clone(), summary, records })
}
