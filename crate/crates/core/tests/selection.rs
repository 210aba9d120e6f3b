//! Property tests of subspace projections, partitions and selection rules.

mod support;

use nalgebra::DMatrix;
use proptest::prelude::*;
use support::sigma_min;
use tsd_core::linalg::{random_orthogonal, random_stiefel, seeded_rng, SkewMatrix};
use tsd_core::manifold::{self, Point, Tangent};
use tsd_core::selection::{
    conjugated_projection, singleton_givens_decomposition, GivensPartition, GivensRule, RandomizedOrthogonalRule,
    RandomizedStiefelRule, SelectionRule, SubspaceProjection,
};
use tsd_core::verify::{norm_equiv_ratio, seminorm};

fn random_tangent(x: &Point, seed: u64) -> Tangent {
    let mut rng = seeded_rng(seed);
    let coords = tsd_core::linalg::gaussian_vector(x.dimension(), &mut rng);
    manifold::from_coordinates(x, &coords).unwrap()
}

/// A random set of disjoint pairs in `0..n`.
fn pairs_strategy(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_flat_map(move |perm| {
        (0..=n / 2).prop_map(move |k| {
            (0..k)
                .map(|t| {
                    let (a, b) = (perm[2 * t], perm[2 * t + 1]);
                    (a.min(b), a.max(b))
                })
                .collect()
        })
    })
}

fn check_projection(p: &SubspaceProjection) -> Result<(), TestCaseError> {
    let m = p.matrix().unwrap();
    let d = m.nrows();
    prop_assert!((&m * &m - &m).norm() <= 1e-12 * d as f64, "not idempotent");
    prop_assert!((&m - m.transpose()).norm() <= 1e-12 * d as f64, "not self-adjoint");
    prop_assert!((m.trace() - p.rank() as f64).abs() <= 1e-10, "trace {} vs rank {}", m.trace(), p.rank());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn givens_blocks_are_orthogonal_projections(
        (n, pairs) in (2usize..=8).prop_flat_map(|n| (Just(n), pairs_strategy(n))),
        seed in 0u64..1000,
    ) {
        let x = Point::Orthogonal(random_orthogonal(n, seed));
        let p = SubspaceProjection::skew_pairs(x.clone(), pairs).unwrap();
        check_projection(&p)?;
        let v = random_tangent(&x, seed + 1);
        let pv = p.apply(&v).unwrap();
        let ppv = p.apply(&pv).unwrap();
        let (a, b) = (manifold::norm(&x, &pv).unwrap(), manifold::norm(&x, &v).unwrap());
        prop_assert!(a <= b * (1.0 + 1e-12));
        prop_assert!(manifold::norm(&x, &ppv.axpy(-1.0, &pv).unwrap()).unwrap() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn stiefel_projections_are_orthogonal_projections(
        (n, p) in (3usize..=7).prop_flat_map(|n| (Just(n), 2..n)),
        seed in 0u64..1000,
    ) {
        let mut rng = seeded_rng(seed);
        let x = Point::Stiefel(random_stiefel(n, p, &mut rng));
        check_projection(&SubspaceProjection::stiefel_pair(x.clone(), 0, p - 1).unwrap())?;
        let u = x.as_matrix().unwrap();
        let perp = tsd_core::linalg::orth_complement_basis(u).unwrap();
        let kernel = SubspaceProjection::stiefel_kernel(x.clone(), perp.column(0).into_owned(), p - 1).unwrap();
        check_projection(&kernel)?;
    }

    #[test]
    fn conjugation_by_transport_preserves_projection_structure(
        (n, pairs) in (3usize..=7).prop_flat_map(|n| (Just(n), pairs_strategy(n))),
        entries in prop::collection::vec(-0.5..0.5f64, 49),
        seed in 0u64..1000,
    ) {
        prop_assume!(!pairs.is_empty());
        let c = SkewMatrix::skew_part(&DMatrix::from_iterator(n, n, entries.into_iter().take(n * n)));
        let x = Point::Orthogonal(random_orthogonal(n, seed));
        let dir = Tangent::Orthogonal(c);
        let y = manifold::exp(&x, &dir).unwrap();
        let p = SubspaceProjection::skew_pairs(x.clone(), pairs).unwrap();
        let q = conjugated_projection(&x, &y, |v| manifold::transport(&x, &dir, v), &p).unwrap();
        prop_assert!(q.base().approx_eq(&y, 1e-12));
        prop_assert_eq!(q.rank(), p.rank());
        check_projection(&q)?;
    }

    #[test]
    fn singleton_decomposition_seminorm_is_the_norm(n in 2usize..=7, seed in 0u64..1000) {
        let x = Point::Orthogonal(random_orthogonal(n, seed));
        let decomp = singleton_givens_decomposition(&x).unwrap();
        let v = random_tangent(&x, seed + 7);
        let s = seminorm(&v, &decomp).unwrap();
        let norm = manifold::norm(&x, &v).unwrap();
        prop_assert!((s - norm).abs() <= 1e-12 * (1.0 + norm));
        let (sigma, ratio) = norm_equiv_ratio(&decomp).unwrap();
        prop_assert!((sigma - 1.0).abs() <= 1e-12 && (ratio - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn seminorm_never_exceeds_sqrt_m_times_the_norm(
        (n, blocks) in (3usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(pairs_strategy(n), 1..5))),
        seed in 0u64..1000,
    ) {
        let x = Point::Orthogonal(random_orthogonal(n, seed));
        let projs: Vec<_> = blocks
            .into_iter()
            .map(|b| SubspaceProjection::skew_pairs(x.clone(), b).unwrap())
            .collect();
        let v = random_tangent(&x, seed + 3);
        let s = seminorm(&v, &projs).unwrap();
        let norm = manifold::norm(&x, &v).unwrap();
        prop_assert!(s <= (projs.len() as f64).sqrt() * norm * (1.0 + 1e-12));
        // sigma_min of the stacked operator, recomputed from the frame matrices.
        let d = x.dimension();
        let mut stacked = DMatrix::zeros(d * projs.len(), d);
        for (k, p) in projs.iter().enumerate() {
            stacked.view_mut((k * d, 0), (d, d)).copy_from(&p.matrix().unwrap());
        }
        let (sigma, _) = norm_equiv_ratio(&projs).unwrap();
        prop_assert!((sigma - sigma_min(&stacked)).abs() <= 1e-10);
        prop_assert!(s >= sigma * norm - 1e-10 * (1.0 + norm));
    }
}

#[test]
fn round_robin_partition_covers_every_pair_once() {
    for n in 2..=9 {
        let part = GivensPartition::round_robin(n);
        assert!(part.has_disjoint_indices());
        let mut all: Vec<_> = part.blocks().iter().flatten().copied().collect();
        all.sort_unstable();
        let expected: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        assert_eq!(all, expected, "n = {n}");
        assert_eq!(part.len(), if n % 2 == 0 { n - 1 } else { n });
    }
}

#[test]
fn partitions_reject_repeated_or_missing_pairs() {
    assert!(GivensPartition::new(3, vec![vec![(0, 1)], vec![(0, 1), (0, 2)], vec![(1, 2)]]).is_err());
    assert!(GivensPartition::new(3, vec![vec![(0, 1)], vec![(1, 2)]]).is_err());
    assert!(GivensPartition::new(3, vec![vec![(1, 0)], vec![(0, 2)], vec![(1, 2)]]).is_err());
}

#[test]
fn givens_rule_cycles_through_blocks() {
    let n = 5;
    let part = GivensPartition::round_robin(n);
    let mut rule = GivensRule::new(part.clone()).unwrap();
    assert_eq!(rule.blocks_per_iteration(), part.len());
    let x = Point::Orthogonal(random_orthogonal(n, 3));
    for k in 0..part.len() {
        let p = rule.select(&x, &x, k).unwrap();
        assert_eq!(p.disjoint_pairs().unwrap(), part.blocks()[k].as_slice());
    }
}

#[test]
fn randomized_rules_are_reproducible_from_the_seed() {
    let n = 5;
    let x = Point::Orthogonal(random_orthogonal(n, 4));
    let draw = |seed| {
        let mut rule = RandomizedOrthogonalRule::uniform(n, seed).unwrap();
        (0..50).map(|_| rule.select(&x, &x, 0).unwrap().block().unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(9), draw(9));
    assert_ne!(draw(9), draw(10));

    let mut rng = seeded_rng(2);
    let u = Point::Stiefel(random_stiefel(6, 3, &mut rng));
    let draw = |seed| {
        let mut rule = RandomizedStiefelRule::uniform(6, 3, seed).unwrap();
        (0..50).map(|_| rule.select(&u, &u, 0).unwrap().block().unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(1), draw(1));
}

#[test]
fn invalid_probabilities_are_rejected() {
    assert!(RandomizedOrthogonalRule::new(3, vec![0.5, 0.5, 0.0], 0).is_err());
    assert!(RandomizedOrthogonalRule::new(3, vec![0.5, 0.3, 0.3], 0).is_err());
    assert!(RandomizedOrthogonalRule::new(3, vec![0.2, 0.3], 0).is_err());
    assert!(RandomizedOrthogonalRule::new(3, vec![0.2, 0.3, 0.5], 0).is_ok());
}
