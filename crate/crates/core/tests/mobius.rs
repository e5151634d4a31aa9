use hsnake_core::linalg::{self, Vector};
use hsnake_core::lorentz::{self, LorentzMatrix};
use hsnake_core::mobius::{self, ExtendedPoint, SpherePoint};
use hsnake_core::random;
use proptest::prelude::*;

fn finite(x: Vector) -> ExtendedPoint {
    ExtendedPoint::Finite(x)
}

#[test]
fn far_points_approach_the_pole() {
    let x = Vector::from_vec(vec![1e6, 0.0, 0.0]);
    let z = mobius::stereographic_inv(&finite(x), 4).unwrap();
    assert!(z.distance(&SpherePoint::pole(0, 4)) <= 1e-5);
    let origin = mobius::stereographic_inv(&finite(Vector::zeros(3)), 4).unwrap();
    assert_eq!(origin.as_vector(), &(-linalg::basis(0, 4)));
}

#[test]
fn distance_from_origin_along_an_axis() {
    for t in [1e-8, 0.3, 2.0, 50.0] {
        let d = mobius::hyperbolic_distance(&Vector::zeros(3), &(linalg::basis(0, 3) * t)).unwrap();
        let oracle = (1.0 + t * t).sqrt().acosh();
        assert!((d - t.asinh()).abs() <= 1e-12 * t.asinh().max(1.0));
        if t > 1e-3 {
            assert!((d - oracle).abs() < 1e-10);
        }
    }
}

#[test]
fn isometries_act_linearly_and_boosts_translate() {
    let mut rng = random::rng(20);
    let r = random::random_rotation(&mut rng, 3);
    let x = random::gaussian_vector(&mut rng, 3);
    let y = mobius::lorentz_to_hyperbolic(&LorentzMatrix::from_rotation(&r), &x).unwrap();
    assert!((y - &r * &x).norm() < 1e-14);
    let alpha = 0.9;
    let img = mobius::lorentz_to_hyperbolic(&lorentz::axis_boost(alpha, 3), &Vector::zeros(3)).unwrap();
    assert!((img - linalg::basis(0, 3) * alpha.sinh()).norm() < 1e-15);
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = random::rng(21);
    let h = 1e-6;
    for n in 2..6 {
        let v = random::gaussian_vector(&mut rng, n);
        let z = SpherePoint::new(random::unit_vector(&mut rng, n)).unwrap();
        let t = linalg::project_tangent(&random::gaussian_vector(&mut rng, n), z.as_vector()).normalize();
        // Great circle through z with velocity t.
        let curve = |s: f64| z.as_vector() * s.cos() + &t * s.sin();
        let phi = |p: Vector| v.normalize().dot(&p);
        let fd = (phi(curve(h)) - phi(curve(-h))) / (2.0 * h);
        let grad = mobius::grad_phi(&v, &z).unwrap();
        assert!((grad.vec.dot(&t) - fd).abs() < 1e-6);
        assert!(grad.normal_component().abs() < 1e-15);
    }
}

#[test]
fn xi_fields_and_brackets() {
    let n = 3;
    let e = |i| SpherePoint::pole(i, n);
    assert_eq!(mobius::xi_field(0, &e(0)).unwrap().vec, Vector::zeros(n));
    assert_eq!(mobius::xi_field(0, &e(1)).unwrap().vec, linalg::basis(0, n));
    assert_eq!(mobius::xi_bracket(0, 1, &e(0)).unwrap().vec, linalg::basis(1, n));
    assert_eq!(mobius::xi_bracket(0, 1, &e(2)).unwrap().vec, Vector::zeros(n));
    let mut rng = random::rng(22);
    let z = SpherePoint::new(random::unit_vector(&mut rng, n)).unwrap();
    let xi = mobius::xi_field(2, &z).unwrap().vec;
    let grad = mobius::grad_phi(&linalg::basis(2, n), &z).unwrap().vec;
    assert!((xi - grad).norm() < 1e-14);
}

#[test]
fn bracket_flow_fixes_the_orthogonal_complement() {
    let v = linalg::basis(0, 4);
    let w = Vector::from_vec(vec![1.0, 2.0, 0.0, 0.0]);
    let z = SpherePoint::new(Vector::from_vec(vec![0.0, 0.0, 0.6, 0.8])).unwrap();
    assert_eq!(mobius::bracket_rotation_flow(&v, &w, 0.7, &z).unwrap(), z);
    let z = SpherePoint::pole(0, 4);
    assert_eq!(mobius::bracket_rotation_flow(&v, &w, 0.0, &z).unwrap(), z);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stereographic_roundtrip(seed in any::<u64>(), n in 2usize..7) {
        let z = SpherePoint::new(random::unit_vector(&mut random::rng(seed), n)).unwrap();
        let back = mobius::stereographic_inv(&mobius::stereographic(&z), n).unwrap();
        prop_assert!(back.distance(&z) < 1e-12);
    }

    #[test]
    fn reflections_are_involutions(seed in any::<u64>(), n in 1usize..6, r in 0.1f64..3.0, t in -2.0f64..2.0) {
        let mut rng = random::rng(seed);
        let a = random::gaussian_vector(&mut rng, n);
        let x = random::gaussian_vector(&mut rng, n);
        let twice = mobius::reflect_sphere(&a, r, &mobius::reflect_sphere(&a, r, &finite(x.clone())).unwrap()).unwrap();
        let twice = twice.finite().unwrap().clone();
        prop_assert!((&twice - &x).norm() <= 1e-12 * x.norm().max(1.0) * (1.0 + (&x - &a).norm().recip()));
        let plane = mobius::reflect_plane(&a, t, &mobius::reflect_plane(&a, t, &finite(x.clone())).unwrap()).unwrap();
        prop_assert!((plane.finite().unwrap() - &x).norm() < 1e-12 * x.norm().max(1.0) * (1.0 + t.abs() / a.norm()));
        // Points of the mirror sphere are fixed.
        let on = &a + random::unit_vector(&mut rng, n) * r;
        let fixed = mobius::reflect_sphere(&a, r, &finite(on.clone())).unwrap();
        prop_assert!((fixed.finite().unwrap() - &on).norm() < 1e-12 * (a.norm() + r));
    }

    #[test]
    fn hyperbolic_distance_is_a_metric_preserved_by_the_group(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = random::rng(seed);
        let x = random::gaussian_vector(&mut rng, n);
        let y = random::gaussian_vector(&mut rng, n);
        let z = random::gaussian_vector(&mut rng, n);
        let d = |p: &Vector, q: &Vector| mobius::hyperbolic_distance(p, q).unwrap();
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-10);
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() < 1e-14);
        let a = random::random_so0(&mut rng, n, 1.5);
        let (ax, ay) = (
            mobius::lorentz_to_hyperbolic(&a, &x).unwrap(),
            mobius::lorentz_to_hyperbolic(&a, &y).unwrap(),
        );
        prop_assert!((d(&ax, &ay) - d(&x, &y)).abs() < 1e-9);
    }

    #[test]
    fn sphere_action_is_a_left_action(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = random::rng(seed);
        let a = random::random_so0(&mut rng, n, 1.5);
        let b = random::random_so0(&mut rng, n, 1.5);
        let z = SpherePoint::new(random::unit_vector(&mut rng, n)).unwrap();
        let lhs = mobius::mobius_sphere_action(&a.compose(&b), &z).unwrap();
        let rhs = mobius::mobius_sphere_action(&a, &mobius::mobius_sphere_action(&b, &z).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-10);
    }

    #[test]
    fn gradient_flow_is_a_flow(seed in any::<u64>(), s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let mut rng = random::rng(seed);
        let v = random::gaussian_vector(&mut rng, 3);
        let z = SpherePoint::new(random::unit_vector(&mut rng, 3)).unwrap();
        let two = mobius::gradient_flow(&v, s, &mobius::gradient_flow(&v, t, &z).unwrap()).unwrap();
        let one = mobius::gradient_flow(&v, s + t, &z).unwrap();
        prop_assert!(one.distance(&two) < 1e-10);
    }
}
