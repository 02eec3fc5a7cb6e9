//! `twopoint`: command-line front end for the geometry, symmetrization,
//! convexity and campaign routines.
//!
//! Exit status: 0 on success, 1 when a check reports a finding (for example
//! an isodiametric violation), 2 on usage or input errors. Worker threads
//! follow `RAYON_NUM_THREADS`; results never depend on it.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twopoint::convexity::{ball_convexity_probe, hemisphere_center, hull_diameter_check};
use twopoint::experiments::{
    greedy_maximal_with, symmetrization_campaign, verify_isodiametric, CampaignConfig, GreedyOrder, OutputPaths,
};
use twopoint::regions::{diameter, load_region, sample, volume_estimate, PointCloud, Region};
use twopoint::symmetrize::{run_flow, FlowConfig, Strategy};
use twopoint::{Ball, Curvature, Error, Point, Space};

#[derive(Parser)]
#[command(name = "twopoint", version, about = "Two-point symmetrization and isodiametric checks on R^n, S^n and H^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume of a ball (quadrature of the radial density), or a Monte Carlo
    /// estimate for a region document.
    Volume(VolumeArgs),
    /// Exact diameter of a sample of a region.
    Diameter(DiameterArgs),
    /// Iterated two-point symmetrization; writes one CSV row per step.
    ///
    /// CSV columns: step, volume, volume_stderr, diameter, hausdorff,
    /// normal_0..normal_n, offset, orientation, depth, rebased,
    /// identity_failures. Step 0 is the initial region and has empty
    /// hyperplane cells. Distances are geodesic (radians on S^n).
    Flow(FlowArgs),
    /// Isodiametric campaign: volumes of random sets of diameter <= D
    /// against V(B(D/2)). Exits 1 on any violation.
    ///
    /// CSV columns: trial, seed, kind, digest, volume, volume_stderr,
    /// sampled_diameter, trims, margin, margin_sigmas, violation.
    Verify(VerifyArgs),
    /// Greedy set of diameter <= D built from uniform candidates in B(e, D).
    Greedy(GreedyArgs),
    /// Open-hemisphere certificate for a spherical point set.
    Hemisphere(CloudArgs),
    /// Compares the diameter of a point set with that of its sampled convex
    /// hull. Exits 1 if the hull is wider.
    HullCheck(HullArgs),
    /// Tests geodesic midpoints of random pairs in a ball. Exits 1 on a
    /// violation for a ball that should be convex (H^n, R^n, or radius
    /// below pi/2 on S^n).
    BallProbe(ProbeArgs),
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// Model space.
    #[arg(long, value_enum)]
    space: SpaceKind,
    /// Intrinsic dimension n (ambient coordinates: n + 1 on S^n and H^n).
    #[arg(long)]
    dim: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceKind {
    Sphere,
    Euclidean,
    Hyperbolic,
}

impl SpaceArgs {
    fn space(&self) -> Result<Space, Error> {
        let curvature = match self.space {
            SpaceKind::Sphere => Curvature::Sphere,
            SpaceKind::Euclidean => Curvature::Euclidean,
            SpaceKind::Hyperbolic => Curvature::Hyperbolic,
        };
        Space::new(curvature, self.dim)
    }
}

#[derive(Args)]
struct VolumeArgs {
    /// Model space (required with --radius).
    #[arg(long, value_enum, requires = "dim")]
    space: Option<SpaceKind>,
    #[arg(long)]
    dim: Option<usize>,
    /// Ball radius in geodesic units (radians on S^n).
    #[arg(long, conflicts_with = "region", requires = "space")]
    radius: Option<f64>,
    /// Region document (JSON) to estimate by hit-or-miss sampling.
    #[arg(long, required_unless_present = "radius")]
    region: Option<PathBuf>,
    /// Proposals for the Monte Carlo estimate.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Random seed (required with --region).
    #[arg(long, required_unless_present = "radius")]
    seed: Option<u64>,
}

#[derive(Args)]
struct DiameterArgs {
    /// Region document (JSON).
    #[arg(long)]
    region: PathBuf,
    /// Proposals drawn from the region's bounding ball.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyKind {
    /// Best-scoring bisector of an outside sample and a hole of the equal-volume cap.
    Deficit,
    /// Bisector of a diameter pair.
    Farthest,
    /// Random hyperplane through the pole (does not converge).
    Random,
}

#[derive(Args)]
struct FlowArgs {
    /// Initial region document (JSON).
    #[arg(long)]
    region: PathBuf,
    /// Symmetrization steps to run (the CSV gets steps + 1 rows unless --epsilon stops it early).
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    seed: u64,
    /// CSV output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON report with configuration and per-step records.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Stop once the Hausdorff distance to the equal-volume cap is below this (geodesic units; 0 never stops).
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Proposals per metric evaluation.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = StrategyKind::Deficit)]
    strategy: StrategyKind,
}

#[derive(Args)]
struct VerifyArgs {
    /// Campaign configuration (JSON); flags below are ignored when given.
    #[arg(long, conflicts_with_all = ["space", "dim", "d", "trials"])]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    space: Option<SpaceKind>,
    #[arg(long, required_unless_present = "config")]
    dim: Option<usize>,
    /// Diameter bound D (geodesic units; below pi on S^n).
    #[arg(long = "D", id = "d", required_unless_present = "config")]
    d: Option<f64>,
    #[arg(long, required_unless_present = "config")]
    trials: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    seed: Option<u64>,
    /// Hit-or-miss samples per volume estimate.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Balls combined per random region.
    #[arg(long, default_value_t = 4)]
    complexity: usize,
    /// Also run the symmetrization-flow battery (cap, two caps, dented ball, random regions).
    #[arg(long)]
    flows: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderKind {
    Scatter,
    Outward,
    BallFirst,
}

#[derive(Args)]
struct GreedyArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Diameter bound D (geodesic units).
    #[arg(long = "D")]
    d: f64,
    /// Uniform candidates drawn in B(e, D).
    #[arg(long, default_value_t = 100_000)]
    candidates: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OrderKind::Scatter)]
    order: OrderKind,
}

#[derive(Args)]
struct CloudArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// JSON array of ambient coordinate arrays.
    #[arg(long, conflicts_with = "region", required_unless_present = "region")]
    points: Option<PathBuf>,
    /// Region document to sample instead of --points.
    #[arg(long, requires = "seed")]
    region: Option<PathBuf>,
    /// Proposals when sampling --region.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct HullArgs {
    #[command(flatten)]
    cloud: CloudArgs,
    /// Random convex combinations added to the hull sample.
    #[arg(long, default_value_t = 20_000)]
    hull_samples: usize,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Ball radius in geodesic units, centered at e.
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Clean,
    Finding,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Finding) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Volume(a) => volume(a),
        Command::Diameter(a) => {
            let (space, region) = load_region(&a.region)?;
            let cloud = sample_count(&space, &region, a.samples, a.seed)?;
            let (d, x, y) = diameter(&space, &cloud)?;
            println!("{d}");
            println!("points {} endpoints {:?} {:?}", cloud.len(), x.coords().to_vec(), y.coords().to_vec());
            Ok(Outcome::Clean)
        }
        Command::Flow(a) => flow(a),
        Command::Verify(a) => verify(a),
        Command::Greedy(a) => {
            let space = a.space.space()?;
            let order = match a.order {
                OrderKind::Scatter => GreedyOrder::Scatter,
                OrderKind::Outward => GreedyOrder::Outward,
                OrderKind::BallFirst => GreedyOrder::BallFirst,
            };
            let out = greedy_maximal_with(&space, a.d, a.candidates, a.seed, order)?;
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(if out.deficit < -3.0 * out.std_error { Outcome::Finding } else { Outcome::Clean })
        }
        Command::Hemisphere(a) => {
            let space = a.space.space()?;
            if space.curvature() != Curvature::Sphere {
                return Err(Error::Config("hemisphere certificates need --space sphere".into()));
            }
            let cloud = load_cloud(&space, &a)?;
            match hemisphere_center(&cloud) {
                Some(cert) => println!("{}", serde_json::to_string_pretty(&cert)?),
                None => println!("none"),
            }
            Ok(Outcome::Clean)
        }
        Command::HullCheck(a) => {
            let space = a.cloud.space.space()?;
            let cloud = load_cloud(&space, &a.cloud)?;
            let seed = a.cloud.seed.ok_or_else(|| Error::Config("hull-check needs --seed".into()))?;
            let res = hull_diameter_check(&space, &cloud, a.hull_samples, seed)?;
            println!("{}", serde_json::to_string_pretty(&res)?);
            Ok(if res.hull > res.cloud + 1e-9 { Outcome::Finding } else { Outcome::Clean })
        }
        Command::BallProbe(a) => {
            let space = a.space.space()?;
            let ball = space.ball(space.base_point(), a.radius)?;
            let probe = ball_convexity_probe(&space, &ball, a.trials, a.seed)?;
            println!("violations {} of {} (antipodal pairs skipped: {})", probe.violations, probe.trials, probe.skipped);
            if let Some((x, y)) = &probe.witness {
                println!("witness {:?} {:?}", x.coords().to_vec(), y.coords().to_vec());
            }
            let should_be_convex = space.curvature() != Curvature::Sphere || a.radius < FRAC_PI_2;
            Ok(if should_be_convex && probe.violations > 0 { Outcome::Finding } else { Outcome::Clean })
        }
    }
}

fn volume(a: VolumeArgs) -> Result<Outcome, Error> {
    if let Some(r) = a.radius {
        let space = SpaceArgs { space: a.space.expect("clap requires --space"), dim: a.dim.expect("clap requires --dim") }.space()?;
        println!("{}", space.ball_volume(r)?);
        return Ok(Outcome::Clean);
    }
    let path = a.region.expect("clap requires --region");
    let (space, region) = load_region(&path)?;
    let v = volume_estimate(&space, &region, a.samples, a.seed.expect("clap requires --seed"))?;
    println!("{} +- {}", v.value, v.std_error);
    Ok(Outcome::Clean)
}

fn flow(a: FlowArgs) -> Result<Outcome, Error> {
    let (space, region) = load_region(&a.region)?;
    let strategy = match a.strategy {
        StrategyKind::Deficit => Strategy::deficit(),
        StrategyKind::Farthest => Strategy::FarthestPairBisector { pole: None },
        StrategyKind::Random => Strategy::RandomThroughPole { pole: space.base_point() },
    };
    let mut config = FlowConfig::new(strategy, a.steps, a.seed);
    config.stop_epsilon = a.epsilon;
    config.samples = a.samples;
    let report = run_flow(&space, region, config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.write_csv(&a.out)?;
    if let Some(p) = &a.json {
        report.write_json(p)?;
    }
    let last = report.last();
    println!(
        "steps {} final hausdorff {} volume drift {:.2} sigma diameter increase {} identity failures {}",
        report.steps.len() - 1,
        last.hausdorff,
        report.max_volume_drift_sigmas(),
        report.max_diameter_increase(),
        report.identity_failures()
    );
    Ok(if report.identity_failures() > 0 { Outcome::Finding } else { Outcome::Clean })
}

fn verify(a: VerifyArgs) -> Result<Outcome, Error> {
    let mut config = match &a.config {
        Some(path) => CampaignConfig::load(path)?,
        None => {
            let space = SpaceArgs { space: a.space.expect("clap requires --space"), dim: a.dim.expect("clap requires --dim") }.space()?;
            let mut c = CampaignConfig::new(space, a.d.expect("clap requires --D"), a.trials.expect("clap requires --trials"), a.seed.expect("clap requires --seed"));
            c.samples = a.samples;
            c.complexity = a.complexity;
            c
        }
    };
    if a.csv.is_some() || a.json.is_some() {
        config.output = OutputPaths { csv: a.csv.clone(), json: a.json.clone() };
    }
    config.validate()?;
    let report = verify_isodiametric(&config)?;
    let s = &report.summary;
    println!(
        "trials {} violations {} max margin {} ({:.2} sigma) exact ball {:.2} sigma",
        s.trials, s.violations, s.max_margin, s.max_margin_sigmas, s.exact_ball_sigmas
    );
    let mut findings = s.violations > 0;
    let flows = if a.flows {
        let campaign = symmetrization_campaign(&config)?;
        print!("{}", campaign.to_csv());
        findings |= campaign.failures() > 0;
        Some(campaign)
    } else {
        None
    };
    report.write_outputs()?;
    if let (Some(campaign), Some(json)) = (&flows, &config.output.json) {
        std::fs::write(with_suffix(json, "flows"), campaign.to_json())?;
    }
    Ok(if findings { Outcome::Finding } else { Outcome::Clean })
}

/// `report.json` -> `report.flows.json`.
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}{ext}"))
}

/// Rejection sample from `count` proposals in the region's bounding ball.
fn sample_count(space: &Space, region: &Region, count: usize, seed: u64) -> Result<PointCloud, Error> {
    let envelope: Ball = region.bounding_ball(space)?;
    sample(space, region, count as f64 / space.ball_volume(envelope.radius)?, seed)
}

fn load_cloud(space: &Space, a: &CloudArgs) -> Result<PointCloud, Error> {
    if let Some(path) = &a.points {
        let text = std::fs::read_to_string(path)?;
        let coords: Vec<Vec<f64>> = serde_json::from_str(&text)?;
        let points = coords.iter().map(|c| space.point(c)).collect::<Result<Vec<Point>, _>>()?;
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        return Ok(PointCloud::from_points(points));
    }
    let path = a.region.as_ref().expect("clap requires --points or --region");
    let (doc_space, region) = load_region(path)?;
    if doc_space != *space {
        return Err(Error::Config(format!("region document is on {doc_space:?}, not {space:?}")));
    }
    sample_count(space, &region, a.samples, a.seed.expect("clap requires --seed with --region"))
}
