use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::geometry::{Ball, Orientation, Point};
use crate::regions::{sample_ball, uniform_in_ball, PointCloud};
use crate::rng;

fn s2() -> Space {
    Space::sphere(2)
}

fn polar(space: &Space, theta: f64, phi: f64) -> Point {
    space.point(&[theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]).unwrap()
}

fn probe(space: &Space, seed: u64, count: usize) -> Vec<Point> {
    let env = Ball { center: space.base_point(), radius: PI };
    let mut r = rng::stream(seed, 0);
    (0..count).map(|_| uniform_in_ball(space, &env, &mut r)).collect()
}

#[test]
fn ball_centered_on_plane_is_fixed_exactly() {
    let s = s2();
    let h = s.hyperplane(&[0.3, -1.0, 0.0], 0.0, Orientation::Positive).unwrap();
    // A center on the plane <x, p> = 0.
    let c = s.normalize_to_space(&[1.0, 0.3, 0.4].as_slice().into()).unwrap();
    assert!(s.level(&h, &c).abs() < 1e-12);
    let ball = Region::ball(&s, c, 0.7).unwrap();
    let tau = two_point_symmetrize(&h, ball.clone());
    for p in probe(&s, 1, 10_000) {
        assert_eq!(tau.contains(&s, &p), ball.contains(&s, &p));
    }
}

#[test]
fn ball_in_negative_side_is_reflected() {
    let s = s2();
    let h = s.hyperplane(&[1.0, 0.0, 0.0], 0.0, Orientation::Positive).unwrap();
    let x = Region::ball(&s, polar(&s, 0.8, PI), 0.4).unwrap();
    let mirror = Region::ball(&s, polar(&s, 0.8, 0.0), 0.4).unwrap();
    let tau = two_point_symmetrize(&h, x);
    let mut disagreements = 0;
    for p in probe(&s, 2, 10_000) {
        disagreements += (tau.contains(&s, &p) != mirror.contains(&s, &p)) as usize;
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn mirrored_caps_satisfy_counting_identity() {
    let s = s2();
    let a = Region::ball(&s, polar(&s, 0.6, 0.3), 0.35).unwrap();
    let Region::Ball(node) = &a else { unreachable!() };
    let h0 = s.hyperplane(&[0.2, 1.0, 0.1], 0.0, Orientation::Positive).unwrap();
    let b = Region::ball(&s, s.reflect(&h0, &node.ball().center), 0.35).unwrap();
    let x = Region::union([a, b]);
    let h = h0.flipped();
    let tau = two_point_symmetrize(&h, x.clone());
    for y in probe(&s, 3, 10_000) {
        let sy = s.reflect(&h, &y);
        let lhs = tau.contains(&s, &y) as u8 + tau.contains(&s, &sy) as u8;
        let rhs = x.contains(&s, &y) as u8 + x.contains(&s, &sy) as u8;
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn reduced_form_matches_full_layer() {
    let s = Space::hyperbolic(2);
    let mut r = rng::stream(4, 0);
    let env = Ball { center: s.base_point(), radius: 2.0 };
    for _ in 0..30 {
        let c1 = uniform_in_ball(&s, &env, &mut r);
        let c2 = uniform_in_ball(&s, &env, &mut r);
        let region = Arc::new(Region::union([Region::ball(&s, c1, 0.5).unwrap(), Region::ball(&s, c2, 0.3).unwrap()]));
        let ball = Arc::new(Region::ball(&s, c1, 0.6).unwrap());
        let a = uniform_in_ball(&s, &env, &mut r);
        let b = uniform_in_ball(&s, &env, &mut r);
        let h = s.bisector(&a, &b).unwrap();
        for x in [&region, &ball] {
            let full = two_point_symmetrize(&h, x.clone());
            let reduced = symmetrize_reduced(&s, &h, x);
            let mut diffs = 0;
            for _ in 0..500 {
                let p = uniform_in_ball(&s, &Ball { center: s.base_point(), radius: 3.0 }, &mut r);
                diffs += (full.contains(&s, &p) != reduced.contains(&s, &p)) as usize;
            }
            assert_eq!(diffs, 0);
        }
    }
}

#[test]
fn symmetrized_bound_keeps_radius_and_members() {
    let s = s2();
    let x = Region::union([
        Region::ball(&s, polar(&s, 0.5, 0.0), 0.3).unwrap(),
        Region::ball(&s, polar(&s, 0.9, 2.0), 0.2).unwrap(),
    ]);
    let b0 = x.bounding_ball(&s).unwrap();
    let mut r = rng::stream(6, 0);
    let mut region = Arc::new(x);
    for _ in 0..6 {
        let a = uniform_in_ball(&s, &Ball { center: s.base_point(), radius: 1.5 }, &mut r);
        let c = uniform_in_ball(&s, &Ball { center: s.base_point(), radius: 1.5 }, &mut r);
        let h = s.bisector(&a, &c).unwrap();
        region = Arc::new(two_point_symmetrize(&h, region));
    }
    let b = region.bounding_ball(&s).unwrap();
    assert_eq!(b.radius, b0.radius);
    let mut members = 0;
    for p in probe(&s, 7, 20_000) {
        if region.contains(&s, &p) {
            members += 1;
            assert!(s.distance(&b.center, &p) <= b.radius + 1e-9);
        }
    }
    assert!(members > 100);
}

#[test]
fn strategy_examples() {
    let s = s2();
    let x = polar(&s, 0.4, 0.0);
    let y = polar(&s, 0.9, 2.5);
    let cloud = PointCloud::from_points(vec![x, y]);
    let reference = Ball { center: s.base_point(), radius: 0.3 };
    let choice = Choice { cloud: &cloud, step: 0, reference: &reference, holes: &[], region: None };
    let mut r = rng::stream(8, 0);

    let h = choose_hyperplane(&s, &Strategy::FarthestPairBisector { pole: None }, &choice, &mut r).unwrap();
    let b = s.bisector(&x, &y).unwrap();
    assert!((s.level(&h, &x) - s.level(&b, &x)).abs() < 1e-15 || (s.level(&h, &x) + s.level(&b, &x)).abs() < 1e-15);
    assert!((s.distance(&x, &s.reflect(&h, &y))).abs() < 1e-12);
    assert_ne!(s.side(&h, &s.base_point()), Side::Negative);

    // Orientation follows the pole, not the pair order.
    let pole = polar(&s, 1.2, 2.6);
    let h = choose_hyperplane(&s, &Strategy::FarthestPairBisector { pole: Some(pole) }, &choice, &mut r).unwrap();
    assert_ne!(s.side(&h, &pole), Side::Negative);

    let e = s.base_point();
    for _ in 0..100 {
        let h = choose_hyperplane(&s, &Strategy::RandomThroughPole { pole: e }, &choice, &mut r).unwrap();
        assert_eq!(s.side(&h, &e), Side::On);
    }

    let plan = vec![b, b.flipped()];
    let fixed = Strategy::FixedSchedule { planes: plan.clone() };
    let choice2 = Choice { cloud: &cloud, step: 1, reference: &reference, holes: &[], region: None };
    assert_eq!(choose_hyperplane(&s, &fixed, &choice2, &mut r).unwrap(), plan[1]);
    let choice3 = Choice { cloud: &cloud, step: 2, reference: &reference, holes: &[], region: None };
    assert!(matches!(choose_hyperplane(&s, &fixed, &choice3, &mut r), Err(crate::Error::ScheduleExhausted(2))));
}

#[test]
fn deficit_strategy_moves_excess_toward_hole() {
    let s = s2();
    let far = polar(&s, 1.0, 0.0);
    let near = polar(&s, 0.1, 1.0);
    let cloud = PointCloud::from_points(vec![far, polar(&s, 0.05, 2.0)]);
    let reference = Ball { center: s.base_point(), radius: 0.5 };
    let holes = [near];
    let choice = Choice { cloud: &cloud, step: 0, reference: &reference, holes: &holes, region: None };
    let mut r = rng::stream(9, 0);
    let h = choose_hyperplane(&s, &Strategy::deficit(), &choice, &mut r).unwrap();
    assert!(s.distance(&s.reflect(&h, &far), &near) < 1e-12);
    assert_eq!(s.side(&h, &s.base_point()), Side::Positive);
}

#[test]
fn reference_ball_stops_at_step_zero() {
    let s = s2();
    let region = Region::ball(&s, s.base_point(), 0.6).unwrap();
    let mut config = FlowConfig::new(Strategy::deficit(), 10, 3);
    config.samples = 5000;
    config.stop_epsilon = 1e-9;
    let report = run_flow(&s, region, config).unwrap();
    assert_eq!(report.steps.len(), 1);
    assert_eq!(report.stop_reason, StopReason::Epsilon);
    assert_eq!(report.steps[0].hausdorff, 0.0);
    assert!((report.reference_ball.radius - 0.6).abs() < 0.02);
}

#[test]
fn flow_is_deterministic_and_preserves_volume() {
    let s = s2();
    let region = Region::union([
        Region::ball(&s, polar(&s, 0.7, 0.0), 0.35).unwrap(),
        Region::ball(&s, polar(&s, 0.7, PI), 0.35).unwrap(),
    ]);
    let mut config = FlowConfig::new(Strategy::deficit(), 12, 5);
    config.samples = 6000;
    config.max_depth = 5;
    config.rebase_samples = 100_000;
    config.identity_checks = 200;
    let a = run_flow(&s, region.clone(), config.clone()).unwrap();
    let b = run_flow(&s, region, config).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.steps.len(), 13);
    assert!(a.rebases >= 1);
    assert_eq!(a.identity_failures(), 0);
    assert!(a.max_volume_drift_sigmas() <= 3.0, "{}", a.max_volume_drift_sigmas());
    assert!(a.max_diameter_increase() <= a.sampling_slack, "{} > {}\n{}", a.max_diameter_increase(), a.sampling_slack, a.to_csv());
    assert!(a.last().hausdorff < a.steps[0].hausdorff);
    let csv = a.to_csv();
    assert!(csv.starts_with("step,volume,volume_stderr,diameter,hausdorff,normal_0,normal_1,normal_2,offset,orientation"));
    assert_eq!(csv.lines().count(), 14);
}

#[test]
fn spherical_precondition_warns_for_antipodal_caps() {
    let s = s2();
    let e = s.base_point();
    let south = s.point(&[0.0, 0.0, -1.0]).unwrap();
    let region = Region::union([Region::ball(&s, e, 0.2).unwrap(), Region::ball(&s, south, 0.2).unwrap()]);
    assert!(spherical_diameter_warning(&s, &region, 4000, 1).unwrap().is_some());
    let cap = Region::ball(&s, e, 0.5).unwrap();
    assert!(spherical_diameter_warning(&s, &cap, 4000, 1).unwrap().is_none());
    let cloud = sample_ball(&s, &Ball { center: e, radius: 0.5 }, 10, 1).unwrap();
    assert_eq!(cloud.len(), 10);
}
