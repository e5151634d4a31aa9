use std::f64::consts::PI;

use hsnake_core::linalg::{self, Mat, Vector};
use hsnake_core::lorentz::{LieElement, LorentzMatrix};
use hsnake_core::planner;
use hsnake_core::random;
use hsnake_core::snake::{self, SnakeConfig, DEFAULT_NODES};
use proptest::prelude::*;

fn circle(n: usize, length: f64, segments: usize) -> SnakeConfig {
    let partition = (0..=segments)
        .map(|i| length * i as f64 / segments as f64)
        .collect();
    SnakeConfig::from_fn(partition, DEFAULT_NODES, |_, s| {
        let mut v = Vector::zeros(n);
        v[0] = (2.0 * PI * s / length).cos();
        v[1] = (2.0 * PI * s / length).sin();
        v
    })
    .unwrap()
}

fn constant(n: usize, i: usize, partition: Vec<f64>) -> SnakeConfig {
    SnakeConfig::from_fn(partition, 8, |_, _| linalg::basis(i, n)).unwrap()
}

#[test]
fn full_circle_closes_up() {
    let u = circle(3, 2.0 * PI, 16);
    assert!(snake::endpoint(&u).norm() < 1e-13);
}

#[test]
fn circle_gram_and_margin() {
    let length = 4.0;
    let u = circle(3, length, 8);
    let g = snake::gram_data(&u);
    let mut expected = Mat::zeros(3, 3);
    expected[(0, 0)] = length / 2.0;
    expected[(1, 1)] = length / 2.0;
    assert!((&g.gram - expected).norm() < 1e-12);
    let (singular, margin) = snake::is_singular(&u, snake::default_singular_tol(&u));
    assert!(!singular);
    assert!((margin - length / 2.0).abs() < 1e-12);
}

#[test]
fn straight_snakes_are_singular() {
    let u = constant(3, 0, vec![0.0, 1.0, 2.0]);
    let (singular, margin) = snake::is_singular(&u, snake::default_singular_tol(&u));
    assert!(singular && margin.abs() < 1e-14);
    for t in [0.0, 0.5, 1.5, 2.0] {
        assert!((snake::snake_curve(&u, t).unwrap() - linalg::basis(0, 3) * t).norm() < 1e-14);
    }
}

#[test]
fn two_noncollinear_segments_are_regular() {
    let u = SnakeConfig::from_fn(vec![0.0, 1.0, 2.0], 8, |i, _| linalg::basis(i, 3)).unwrap();
    assert!(!snake::is_singular(&u, snake::default_singular_tol(&u)).0);
}

#[test]
fn endpoint_differential_of_a_horizontal_field() {
    let u = constant(3, 1, vec![0.0, 0.5, 2.0]);
    let v = snake::horizontal_gradient(&linalg::basis(0, 3), &u);
    assert!(v.iter().all(|x| (x - linalg::basis(0, 3)).norm() < 1e-15));
    let d = snake::differential_endpoint(&u, &v);
    assert!((d - linalg::basis(0, 3) * 2.0).norm() < 1e-14);
}

#[test]
fn endpoint_differential_matches_finite_differences() {
    let mut rng = random::rng(30);
    let u = random::random_config(&mut rng, 3, 3).unwrap();
    let w = random::gaussian_vector(&mut rng, 3);
    let r = random::gaussian_vector(&mut rng, 3);
    // Tangent curve: each node moves along a node-dependent direction.
    let dir = |x: &Vector| linalg::project_tangent(&(&w + x.cross(&r)), x);
    let moved = |h: f64| u.map_nodes(|x| Ok(x + dir(x) * h)).unwrap();
    let v = u
        .tangent(u.segments().iter().map(|s| s.iter().map(dir).collect()).collect())
        .unwrap();
    let exact = snake::differential_endpoint(&u, &v);
    let mut errs = Vec::new();
    for h in [1e-2, 5e-3] {
        let fd = (snake::endpoint(&moved(h)) - snake::endpoint(&moved(-h))) / (2.0 * h);
        errs.push((fd - &exact).norm());
    }
    // Second-order convergence of the central difference.
    assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
}

#[test]
fn fit_recovers_the_direction() {
    let mut rng = random::rng(31);
    let u = random::random_config(&mut rng, 4, 3).unwrap();
    let w0 = random::gaussian_vector(&mut rng, 4);
    let v = snake::horizontal_gradient(&w0, &u);
    let fit = snake::fit_horizontal(&u, &v);
    assert!((fit.w - w0).norm() < 1e-9);
    assert!(fit.residual < 1e-12);
    let zero = snake::fit_horizontal(&u, &u.zero_tangent());
    assert_eq!(zero.w, Vector::zeros(4));
}

#[test]
fn vertical_fields_are_pure_residual() {
    let mut rng = random::rng(32);
    let u = random::random_config(&mut rng, 3, 2).unwrap();
    let raw: Vec<Vec<Vector>> = u
        .segments()
        .iter()
        .map(|s| s.iter().map(|_| random::gaussian_vector(&mut rng, 3)).collect())
        .collect();
    let v = u.project(raw).unwrap();
    let fit = snake::fit_horizontal(&u, &v);
    let vertical = v.sub(&snake::horizontal_gradient(&fit.w, &u));
    let again = snake::fit_horizontal(&u, &vertical);
    assert!(again.w.norm() < 1e-10);
    assert!((again.residual - u.l2_norm(&vertical)).abs() < 1e-12);
}

#[test]
fn critical_radii_examples() {
    assert_eq!(snake::critical_radii(&[0.0, 2.0]).unwrap(), vec![2.0]);
    assert_eq!(snake::critical_radii(&[0.0, 1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
    assert_eq!(snake::critical_radii(&[0.0, 1.0, 3.0]).unwrap(), vec![1.0, 3.0]);
    let long: Vec<f64> = (0..=21).map(f64::from).collect();
    assert!(snake::critical_radii(&long).is_err());
}

#[test]
fn rotations_rotate_the_endpoint() {
    let mut rng = random::rng(33);
    let u = random::random_config(&mut rng, 4, 3).unwrap();
    let r = random::random_rotation(&mut rng, 4);
    let moved = planner::act(&LorentzMatrix::from_rotation(&r), &u).unwrap();
    assert!((snake::endpoint(&moved) - r * snake::endpoint(&u)).norm() < 1e-13);
}

#[test]
fn boosts_move_nodes_along_gradient_flows() {
    let mut rng = random::rng(34);
    let u = random::random_config(&mut rng, 3, 2).unwrap();
    let v = random::gaussian_vector(&mut rng, 3);
    let s = 0.4;
    let moved = planner::act(&hsnake_core::lorentz::exp_h(&(v.normalize() * s)), &u).unwrap();
    for (a, x) in moved
        .segments()
        .iter()
        .flatten()
        .zip(u.segments().iter().flatten())
    {
        let z = hsnake_core::SpherePoint::new(x.clone()).unwrap();
        let flowed = hsnake_core::mobius::gradient_flow(&v, s, &z).unwrap();
        assert!((a - flowed.as_vector()).norm() < 1e-14);
    }
}

#[test]
fn infinitesimal_rotation_at_a_straight_snake() {
    let u = constant(3, 0, vec![0.0, 1.0]);
    let field = planner::infinitesimal_action(&LieElement::rotation_generator(0, 1, 3), &u).unwrap();
    assert!(field.iter().all(|v| (v + linalg::basis(1, 3)).norm() < 1e-15));
    let boost = planner::infinitesimal_action(&LieElement::boost_generator(1, 3), &u).unwrap();
    let e1 = snake::e_field(1, &u).unwrap();
    assert!(boost.sub(&e1).max_abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gram_invariants(seed in any::<u64>(), n in 2usize..6, segs in 1usize..5) {
        let u = random::random_config(&mut random::rng(seed), n, segs).unwrap();
        let g = snake::gram_data(&u);
        prop_assert!((g.gram.trace() - u.length()).abs() < 1e-8);
        prop_assert!(g.spectrum.iter().all(|l| *l >= -1e-12 && *l <= u.length() + 1e-12));
        prop_assert!(snake::endpoint(&u).norm() <= u.length() + 1e-12);
    }

    #[test]
    fn horizontal_fields_are_tangent(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = random::rng(seed);
        let u = random::random_config(&mut rng, n, 3).unwrap();
        let w = random::gaussian_vector(&mut rng, n);
        let v = snake::horizontal_gradient(&w, &u);
        for (x, y) in u.segments().iter().flatten().zip(v.iter()) {
            prop_assert!(x.dot(y).abs() < 1e-14 * w.norm().max(1.0));
        }
        // The endpoint differential of E(w) is A_u w.
        let g = snake::gram_data(&u);
        prop_assert!((snake::differential_endpoint(&u, &v) - &g.a_op * &w).norm() < 1e-12 * w.norm().max(1.0));
    }

    #[test]
    fn snake_curve_is_one_lipschitz(seed in any::<u64>(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let u = random::random_config(&mut random::rng(seed), 3, 3).unwrap();
        let (s, t) = (a * u.length(), b * u.length());
        let gap = (snake::snake_curve(&u, s).unwrap() - snake::snake_curve(&u, t).unwrap()).norm();
        prop_assert!(gap <= (s - t).abs() + 1e-12);
    }

    #[test]
    fn critical_radii_contain_the_length(lengths in proptest::collection::vec(0.1f64..3.0, 1..8)) {
        let mut partition = vec![0.0];
        for l in &lengths {
            partition.push(partition.last().unwrap() + l);
        }
        let total = *partition.last().unwrap();
        let radii = snake::critical_radii(&partition).unwrap();
        prop_assert!((radii.last().unwrap() - total).abs() < 1e-12);
        prop_assert!(radii.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(radii.len() <= 1 << (lengths.len() - 1));
    }
}
