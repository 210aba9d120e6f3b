//! Property tests of the manifold layer against independent oracles.

mod support;

use nalgebra::DMatrix;
use proptest::prelude::*;
use support::{central_difference, skew_from, taylor_expm};
use tsd_core::linalg::{expm_skew, logm_orthogonal, random_orthogonal, random_stiefel, seeded_rng, SkewMatrix};
use tsd_core::manifold::{self, Ambient, Point, Tangent};
use tsd_core::objective::LinearTrace;
use tsd_core::Objective;

fn skew_strategy(n: usize, scale: f64) -> impl Strategy<Value = SkewMatrix> {
    prop::collection::vec(-scale..scale, n * n)
        .prop_map(move |e| SkewMatrix::from_matrix(&skew_from(n, &e), 1e-14).unwrap())
}

fn sized_skew(scale: f64) -> impl Strategy<Value = SkewMatrix> {
    (2usize..=8).prop_flat_map(move |n| skew_strategy(n, scale))
}

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0..2.0f64, rows * cols).prop_map(move |e| DMatrix::from_vec(rows, cols, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_matches_taylor_and_is_orthogonal(c in sized_skew(2.0)) {
        let e = expm_skew(&c);
        let n = c.dim();
        prop_assert!((&e - taylor_expm(c.matrix())).norm() <= 1e-12 * (n as f64));
        prop_assert!((e.transpose() * &e - DMatrix::identity(n, n)).norm() <= 1e-12 * (n as f64));
    }

    #[test]
    fn logm_inverts_expm_inside_the_injectivity_radius(c in sized_skew(0.4)) {
        // Entries below 0.4 keep the spectral radius of C below pi.
        let n = c.dim();
        prop_assume!(c.matrix().norm() < 0.9 * std::f64::consts::PI);
        let back = logm_orthogonal(&expm_skew(&c)).unwrap();
        prop_assert!((back.matrix() - c.matrix()).norm() <= 1e-10 * (n as f64));
    }

    #[test]
    fn orthogonal_transport_is_an_isometry(
        (c, u, v) in (2usize..=7).prop_flat_map(|n| (skew_strategy(n, 1.5), skew_strategy(n, 1.0), skew_strategy(n, 1.0))),
        seed in 0u64..1000,
    ) {
        let n = c.dim();
        let x = Point::Orthogonal(random_orthogonal(n, seed));
        let dir = Tangent::Orthogonal(c);
        let (u, v) = (Tangent::Orthogonal(u), Tangent::Orthogonal(v));
        let y = manifold::exp(&x, &dir).unwrap();
        let tu = manifold::transport(&x, &dir, &u).unwrap();
        let tv = manifold::transport(&x, &dir, &v).unwrap();
        let before = manifold::metric(&x, &u, &v).unwrap();
        let after = manifold::metric(&y, &tu, &tv).unwrap();
        prop_assert!((before - after).abs() <= 1e-11 * (1.0 + before.abs()));
    }

    #[test]
    fn transport_carries_the_velocity_to_itself(c in sized_skew(1.0), seed in 0u64..1000) {
        // The geodesic's own velocity is parallel: Expm(C/2)^T C Expm(C/2) = C.
        let x = Point::Orthogonal(random_orthogonal(c.dim(), seed));
        let dir = Tangent::Orthogonal(c.clone());
        let moved = manifold::transport(&x, &dir, &dir).unwrap();
        let Tangent::Orthogonal(m) = moved else { panic!("wrong tangent kind") };
        prop_assert!((m.matrix() - c.matrix()).norm() <= 1e-12 * (1.0 + c.norm()));
    }

    #[test]
    fn orthogonal_distance_is_the_norm_of_the_displacement(c in sized_skew(0.4), seed in 0u64..1000) {
        prop_assume!(c.matrix().norm() < 0.9 * std::f64::consts::PI);
        let x = Point::Orthogonal(random_orthogonal(c.dim(), seed));
        let y = manifold::exp(&x, &Tangent::Orthogonal(c.clone())).unwrap();
        let d = manifold::distance(&x, &y).unwrap();
        prop_assert!((d - c.norm()).abs() <= 1e-10 * (1.0 + c.norm()));
    }

    #[test]
    fn orthogonal_gradient_matches_finite_differences(
        (d, a) in (2usize..=6).prop_flat_map(|n| (matrix_strategy(n, n), skew_strategy(n, 1.0))),
        seed in 0u64..1000,
    ) {
        let n = d.nrows();
        let obj = LinearTrace::new(d);
        let x = Point::Orthogonal(random_orthogonal(n, seed));
        let dir = Tangent::Orthogonal(a);
        let g = manifold::rgrad(&obj, &x).unwrap();
        let analytic = manifold::metric(&x, &g, &dir).unwrap();
        let fd = central_difference(
            |t| obj.value(&manifold::exp(&x, &dir.scale(t)).unwrap()).unwrap(),
            1e-5,
        );
        prop_assert!((analytic - fd).abs() <= 1e-6 * (1.0 + analytic.abs()));
    }

    #[test]
    fn stiefel_gradient_matches_finite_differences_in_the_canonical_metric(
        (n, p, d, z) in (3usize..=7).prop_flat_map(|n| (1..n).prop_flat_map(move |p| {
            (Just(n), Just(p), matrix_strategy(n, p), matrix_strategy(n, p))
        })),
        seed in 0u64..1000,
    ) {
        let mut rng = seeded_rng(seed);
        let x = Point::Stiefel(random_stiefel(n, p, &mut rng));
        let obj = LinearTrace::new(d);
        let dir = manifold::project_ambient(&x, &Ambient::Matrix(z)).unwrap();
        let g = manifold::rgrad(&obj, &x).unwrap();
        let analytic = manifold::metric(&x, &g, &dir).unwrap();
        let fd = central_difference(
            |t| obj.value(&manifold::exp(&x, &dir.scale(t)).unwrap()).unwrap(),
            1e-5,
        );
        prop_assert!((analytic - fd).abs() <= 1e-6 * (1.0 + analytic.abs()));
    }

    #[test]
    fn stiefel_exp_stays_on_the_manifold(
        (n, p, z) in (3usize..=7).prop_flat_map(|n| (1..n).prop_flat_map(move |p| (Just(n), Just(p), matrix_strategy(n, p)))),
        seed in 0u64..1000,
    ) {
        let mut rng = seeded_rng(seed);
        let x = Point::Stiefel(random_stiefel(n, p, &mut rng));
        let v = manifold::project_ambient(&x, &Ambient::Matrix(z)).unwrap();
        let y = manifold::exp(&x, &v).unwrap();
        let u = y.as_matrix().unwrap();
        prop_assert!((u.transpose() * u - DMatrix::identity(p, p)).norm() <= 1e-12 * (n as f64));
    }

    #[test]
    fn tangent_frames_are_orthonormal(n in 2usize..=6, p_off in 0usize..3, seed in 0u64..1000) {
        let mut rng = seeded_rng(seed);
        let points = [
            Point::Orthogonal(random_orthogonal(n, seed)),
            Point::Stiefel(random_stiefel(n + 1, (n - p_off.min(n - 1)).max(1), &mut rng)),
        ];
        for x in &points {
            let frame = manifold::tangent_frame(x).unwrap();
            prop_assert_eq!(frame.len(), x.dimension());
            for (a, u) in frame.iter().enumerate() {
                for (b, v) in frame.iter().enumerate() {
                    let g = manifold::metric(x, u, v).unwrap();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((g - expected).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn tangent_of_the_wrong_geometry_is_rejected() {
    let x = Point::Orthogonal(random_orthogonal(3, 1));
    let v = Tangent::Euclidean(nalgebra::DVector::zeros(3));
    assert!(manifold::exp(&x, &v).is_err());
    assert!(manifold::metric(&x, &v, &v).is_err());
}

#[test]
fn non_orthonormal_points_are_rejected() {
    assert!(Point::orthogonal(DMatrix::from_element(3, 3, 1.0)).is_err());
    assert!(Point::stiefel(DMatrix::from_element(4, 2, 1.0)).is_err());
}
