use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;

use super::*;

fn s2() -> Space {
    Space::sphere(2)
}

fn h2() -> Space {
    Space::hyperbolic(2)
}

fn close(a: &Vector, b: &[f64], tol: f64) -> bool {
    a.as_slice().iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn form_examples() {
    assert_eq!(h2().checked_form(&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0]).unwrap(), 1.0);
    assert_eq!(s2().checked_form(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), 0.0);
    assert_eq!(h2().checked_form(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), -1.0);
    assert!(matches!(
        s2().checked_form(&[1.0, 0.0], &[0.0, 1.0, 0.0]),
        Err(Error::DimensionMismatch { expected: 3, got: 2 })
    ));
}

#[test]
fn distance_examples() {
    let s = s2();
    let x = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let y = s.point(&[0.0, 1.0, 0.0]).unwrap();
    assert!((s.distance(&x, &y) - FRAC_PI_2).abs() < 1e-15);
    assert_eq!(s.distance(&x, &x), 0.0);
    let minus_x = s.point(&[-1.0, 0.0, 0.0]).unwrap();
    assert_eq!(s.distance(&x, &minus_x), PI);

    let h = h2();
    let a = h.base_point();
    let b = h.point(&[1f64.sinh(), 0.0, 1f64.cosh()]).unwrap();
    assert!((h.distance(&a, &b) - 1.0).abs() < 1e-15);
}

#[test]
fn invalid_points_rejected() {
    assert!(matches!(s2().point(&[1.0, 1.0, 0.0]), Err(Error::InvalidPoint(_))));
    assert!(matches!(h2().point(&[0.0, 0.0, -1.0]), Err(Error::InvalidPoint(_))));
    assert!(matches!(h2().point(&[0.5, 0.0, 1.0]), Err(Error::InvalidPoint(_))));
    assert!(Space::euclidean(2).point(&[3.0, -7.0]).is_ok());
}

#[test]
fn geodesic_point_examples() {
    let s = s2();
    let z = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let u = s.tangent(&z, &[0.0, 1.0, 0.0]).unwrap();
    let p = s.geodesic_point(&u, FRAC_PI_2).unwrap();
    assert!(close(p.coords(), &[0.0, 1.0, 0.0], 1e-15));
    assert_eq!(s.geodesic_point(&u, 0.0).unwrap(), z);

    let h = h2();
    let e = h.base_point();
    let u = h.tangent(&e, &[1.0, 0.0, 0.0]).unwrap();
    let p = h.geodesic_point(&u, 1.0).unwrap();
    assert!(close(p.coords(), &[1f64.sinh(), 0.0, 1f64.cosh()], 1e-15));

    let not_unit = h.tangent(&e, &[2.0, 0.0, 0.0]).unwrap();
    assert!(matches!(h.geodesic_point(&not_unit, 1.0), Err(Error::InvalidTangent(_))));
    assert!(matches!(h.tangent(&e, &[0.0, 0.0, 1.0]), Err(Error::InvalidTangent(_))));
}

#[test]
fn tangent_toward_examples() {
    let s = s2();
    let z = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let x = s.point(&[0.0, 1.0, 0.0]).unwrap();
    let (u, t) = s.tangent_toward(&z, &x).unwrap();
    assert!(close(u.vec(), &[0.0, 1.0, 0.0], 1e-15));
    assert!((t - FRAC_PI_2).abs() < 1e-15);

    let h = h2();
    let x = h.point(&[1f64.sinh(), 0.0, 1f64.cosh()]).unwrap();
    let (u, t) = h.tangent_toward(&h.base_point(), &x).unwrap();
    assert!(close(u.vec(), &[1.0, 0.0, 0.0], 1e-14));
    assert!((t - 1.0).abs() < 1e-14);

    let r2 = Space::euclidean(2);
    let (u, t) = r2.tangent_toward(&r2.base_point(), &r2.point(&[3.0, 4.0]).unwrap()).unwrap();
    assert!(close(u.vec(), &[0.6, 0.8], 1e-15));
    assert!((t - 5.0).abs() < 1e-15);

    assert!(matches!(s.tangent_toward(&z, &z), Err(Error::Degenerate(_))));
    let minus_z = s.point(&[-1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(s.tangent_toward(&z, &minus_z), Err(Error::Degenerate(_))));
}

#[test]
fn normalize_examples() {
    let p = s2().normalize_to_space(&Vector::from_slice(&[2.0, 0.0, 0.0])).unwrap();
    assert_eq!(p.coords().as_slice(), &[1.0, 0.0, 0.0]);
    let p = h2().normalize_to_space(&Vector::from_slice(&[0.0, 0.0, 2.0])).unwrap();
    assert_eq!(p.coords().as_slice(), &[0.0, 0.0, 1.0]);
    let unit = Vector::from_slice(&[0.6, 0.0, 0.8]);
    assert_eq!(s2().normalize_to_space(&unit).unwrap().coords(), &unit);
    assert!(s2().normalize_to_space(&Vector::zeros(3)).is_err());
    assert!(h2().normalize_to_space(&Vector::from_slice(&[2.0, 0.0, 1.0])).is_err());
}

#[test]
fn bisector_examples() {
    let s = s2();
    let x = s.point(&[1.0, 0.0, 0.0]).unwrap();
    let y = s.point(&[0.0, 1.0, 0.0]).unwrap();
    let h = s.bisector(&x, &y).unwrap();
    let p = h.normal();
    assert!((p[0] + p[1]).abs() < 1e-15 && p[2] == 0.0);
    assert_eq!(s.side(&h, &x), Side::Positive);
    assert_eq!(s.side(&h, &y), Side::Negative);
    let m = s.midpoint(&x, &y).unwrap();
    assert_eq!(s.side(&h, &m), Side::On);

    let hs = h2();
    let x = hs.point(&[1f64.sinh(), 0.0, 1f64.cosh()]).unwrap();
    let y = hs.point(&[-(1f64.sinh()), 0.0, 1f64.cosh()]).unwrap();
    let h = hs.bisector(&x, &y).unwrap();
    assert!(hs.form(h.normal(), h.normal()) < 0.0);
    assert!((h.normal()[0].abs() - 1.0).abs() < 1e-15 && h.normal()[1] == 0.0 && h.normal()[2] == 0.0);
    assert_eq!(hs.side(&h, &x), Side::Positive);
    assert!(matches!(hs.bisector(&x, &x), Err(Error::Degenerate(_))));
}

#[test]
fn hyperplane_signature_checked() {
    assert!(matches!(
        h2().hyperplane(&[0.0, 0.0, 1.0], 0.0, Orientation::Positive),
        Err(Error::InvalidHyperplane(_))
    ));
    assert!(s2().hyperplane(&[0.0, 0.0, 0.0], 0.0, Orientation::Positive).is_err());
    assert!(s2().hyperplane(&[0.0, 0.0, 1.0], 0.5, Orientation::Positive).is_err());
    assert!(Space::euclidean(2).hyperplane(&[0.0, 2.0], 0.5, Orientation::Negative).is_ok());
}

#[test]
fn gnomonic_examples() {
    let h = h2();
    let e = h.base_point();
    assert_eq!(h.project_gnomonic(&e).unwrap(), *e.coords());
    let t: f64 = 0.8;
    let x = h.point(&[t.sinh(), 0.0, t.cosh()]).unwrap();
    assert!(close(&h.project_gnomonic(&x).unwrap(), &[t.tanh(), 0.0, 1.0], 1e-15));
    let below = s2().point(&[0.0, 0.6, -0.8]).unwrap();
    assert!(matches!(s2().project_gnomonic(&below), Err(Error::OutOfRange(_))));
}

#[test]
fn ball_volume_closed_forms() {
    let s = s2();
    // Oracle: spherical cap area 2 pi (1 - cos r).
    let cap = |r: f64| 2.0 * PI * (1.0 - r.cos());
    assert!((s.ball_volume(FRAC_PI_4).unwrap() - 1.840_302_369_021_7).abs() < 1e-9);
    for r in [0.1f64, 0.5, 1.0, 2.0, 3.0] {
        assert!((s.ball_volume(r).unwrap() - cap(r)).abs() <= 1e-9 * cap(r));
    }
    assert!((s.ball_volume(PI).unwrap() - 4.0 * PI).abs() < 1e-9);
    // Oracle: hyperbolic disc area 2 pi (cosh r - 1).
    let h = h2();
    assert!((h.ball_volume(1.0).unwrap() - 3.412_276_265_284_902).abs() < 1e-9);
    for r in [0.1f64, 1.0, 3.0, 6.0] {
        let want = 2.0 * PI * (r.cosh() - 1.0);
        assert!((h.ball_volume(r).unwrap() - want).abs() <= 1e-9 * want);
    }
    // S^3: 2 pi^2 radial integral of sin^2 = pi (2r - sin 2r).
    let s3 = Space::sphere(3);
    for r in [0.3f64, 1.5, 3.0] {
        let want = PI * (2.0 * r - (2.0 * r).sin());
        assert!((s3.ball_volume(r).unwrap() - want).abs() <= 1e-10 * want);
    }
    assert!(s.ball_volume(3.5).is_err());
    assert!(h.ball_volume(-1.0).is_err());
}

#[test]
fn radius_for_volume_inverts() {
    for space in [s2(), h2(), Space::euclidean(3), Space::sphere(3)] {
        let r = space.radius_for_volume(space.ball_volume(0.9).unwrap()).unwrap();
        assert!((r - 0.9).abs() < 1e-9, "{space:?}: {r}");
    }
}

fn arb_space() -> impl Strategy<Value = Space> {
    (prop_oneof![Just(Curvature::Sphere), Just(Curvature::Euclidean), Just(Curvature::Hyperbolic)], 2usize..=4)
        .prop_map(|(c, n)| Space::new(c, n).unwrap())
}

fn arb_point(space: Space) -> impl Strategy<Value = Point> {
    proptest::collection::vec(-1.5f64..1.5, space.dim()).prop_filter_map("degenerate", move |v| {
        let n = space.ambient_dim();
        let mut raw = Vector::zeros(n);
        match space.curvature() {
            Curvature::Euclidean => raw.as_mut_slice().copy_from_slice(&v),
            Curvature::Sphere => {
                raw.as_mut_slice()[..n - 1].copy_from_slice(&v);
                raw[n - 1] = v.iter().sum::<f64>().sin();
                if raw.norm() < 1e-3 {
                    return None;
                }
            }
            Curvature::Hyperbolic => {
                raw.as_mut_slice()[..n - 1].copy_from_slice(&v);
                raw[n - 1] = (1.0 + v.iter().map(|c| c * c).sum::<f64>()).sqrt();
            }
        }
        space.normalize_to_space(&raw).ok()
    })
}

fn arb_pair() -> impl Strategy<Value = (Space, Point, Point, Point)> {
    arb_space().prop_flat_map(|s| (Just(s), arb_point(s), arb_point(s), arb_point(s)))
}

fn quadric_error(space: &Space, p: &Point) -> f64 {
    match space.curvature() {
        Curvature::Euclidean => 0.0,
        _ => (space.form(p.coords(), p.coords()) - 1.0).abs(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn reflection_is_an_isometric_involution((space, x, y, z) in arb_pair()) {
        prop_assume!(space.distance(&x, &y) > 1e-6);
        prop_assume!(space.curvature() != Curvature::Sphere || space.distance(&x, &y) < PI - 1e-6);
        let h = space.bisector(&x, &y).unwrap();
        let zz = space.reflect(&h, &space.reflect(&h, &z));
        prop_assert!((*zz.coords() - *z.coords()).norm() <= 1e-12 * (1.0 + z.coords().norm()).powi(2));
        let rx = space.reflect(&h, &x);
        prop_assert!(space.distance(&rx, &y) <= 1e-9 * (1.0 + y.coords().norm()));
        let rz = space.reflect(&h, &z);
        prop_assert!(quadric_error(&space, &rz) <= 1e-10);
        let d0 = space.distance(&x, &z);
        let d1 = space.distance(&rx, &rz);
        prop_assert!((d0 - d1).abs() <= 1e-10 * (1.0 + d0));
    }

    #[test]
    fn exp_log_round_trip((space, z, x, _w) in arb_pair()) {
        prop_assume!(space.distance(&z, &x) > 1e-6);
        prop_assume!(space.curvature() != Curvature::Sphere || space.distance(&z, &x) < PI - 1e-4);
        let (u, t) = space.tangent_toward(&z, &x).unwrap();
        prop_assert!((space.tangent_dot(u.vec(), u.vec()) - 1.0).abs() <= 1e-10);
        let back = space.geodesic_point(&u, t).unwrap();
        prop_assert!((*back.coords() - *x.coords()).norm() <= 1e-9 * (1.0 + x.coords().norm()));
    }

    #[test]
    fn midpoint_is_on_bisector((space, x, y, _w) in arb_pair()) {
        prop_assume!(space.distance(&x, &y) > 1e-6);
        prop_assume!(space.curvature() != Curvature::Sphere || space.distance(&x, &y) < PI - 1e-4);
        let h = space.bisector(&x, &y).unwrap();
        let m = space.midpoint(&x, &y).unwrap();
        prop_assert!((space.distance(&m, &x) - space.distance(&m, &y)).abs() <= 1e-9);
        prop_assert!(space.level(&h, &m).abs() <= 1e-9);
    }

    #[test]
    fn distance_to_hyperplane_is_half_the_mirror_gap((space, x, y, z) in arb_pair()) {
        prop_assume!(space.distance(&x, &y) > 1e-6);
        prop_assume!(space.curvature() != Curvature::Sphere || space.distance(&x, &y) < PI - 1e-6);
        let h = space.bisector(&x, &y).unwrap();
        let s = space.signed_distance(&h, &z);
        let gap = space.distance(&z, &space.reflect(&h, &z));
        prop_assert!((2.0 * s.abs() - gap).abs() <= 1e-7 * (1.0 + gap));
        prop_assert!(s * space.level(&h, &z) >= 0.0);
        prop_assert!(space.signed_distance(&h, &x) >= 0.0);
    }
}
