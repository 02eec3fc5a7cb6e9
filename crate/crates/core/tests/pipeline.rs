use std::collections::HashSet;
use std::sync::Arc;

use twopoint::experiments::{fixtures, generate_admissible, symmetrization_campaign, CampaignConfig};
use twopoint::regions::{load_region, sample_ball, save_region, Region};
use twopoint::symmetrize::{run_flow, two_point_symmetrize, FlowConfig, Strategy};
use twopoint::{Ball, Space};

#[test]
fn symmetrized_documents_round_trip_through_files() {
    let s = Space::sphere(2);
    let caps = fixtures::two_caps(&s).unwrap();
    let a = fixtures::point_along(&s, 0, 0.8).unwrap();
    let h = s.bisector(&a, &s.base_point()).unwrap();
    let region = two_point_symmetrize(&h, caps);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("region.json");
    save_region(&path, &s, &region).unwrap();
    let (space, loaded) = load_region(&path).unwrap();
    assert_eq!(space, s);
    assert_eq!(loaded.symmetrization_depth(), 1);
    let probe = sample_ball(&s, &Ball { center: s.base_point(), radius: 1.5 }, 5000, 4).unwrap();
    for p in probe.points() {
        assert_eq!(region.contains(&s, p), loaded.contains(&s, p));
    }
}

#[test]
fn query_cost_at_most_doubles_per_layer() {
    let s = Space::hyperbolic(2);
    let mut region: Arc<Region> = Arc::new(fixtures::dented_ball(&s).unwrap());
    let base_cost = 3;
    let probe = sample_ball(&s, &Ball { center: s.base_point(), radius: 1.2 }, 200, 6).unwrap();
    for k in 0..6 {
        let x = fixtures::point_along(&s, k % 2, 0.3 + 0.1 * k as f64).unwrap();
        let h = s.bisector(&x, &s.base_point()).unwrap();
        region = Arc::new(two_point_symmetrize(&h, region));
        let bound = (base_cost + 1) * (1 << (k + 1));
        for p in probe.points() {
            let cost = region.query_cost(&s, p);
            assert!(cost >= 1 && cost <= bound, "layer {k}: {cost} > {bound}");
        }
    }
}

#[test]
fn long_flows_rebase_and_stay_reproducible() {
    let s = Space::sphere(2);
    let run = || {
        let mut config = FlowConfig::new(Strategy::deficit(), 40, 5);
        config.samples = 5000;
        config.rebase_samples = 30_000;
        run_flow(&s, fixtures::two_caps(&s).unwrap(), config).unwrap()
    };
    let a = run();
    assert_eq!(a.steps.len(), 41);
    assert!(a.rebases > 0);
    assert_eq!(a.identity_failures(), 0);
    assert!(a.steps.iter().all(|r| r.depth <= twopoint::regions::DEFAULT_MAX_DEPTH));
    assert!(a.last().hausdorff < 0.1);
    assert_eq!(a.to_csv(), run().to_csv());
}

#[test]
fn hundred_seeds_give_distinct_regions() {
    let h = Space::hyperbolic(2);
    let digests: HashSet<String> = (0..100).map(|seed| generate_admissible(&h, 1.5, 4, seed).unwrap().digest).collect();
    assert_eq!(digests.len(), 100);
}

#[test]
fn symmetrization_campaign_is_reproducible() {
    let mut config = CampaignConfig::new(Space::euclidean(2), 1.0, 1, 21);
    config.flow.random_regions = 1;
    let a = symmetrization_campaign(&config).unwrap();
    let b = symmetrization_campaign(&config).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.failures(), 0, "{}", a.to_csv());
}
