//! Randomized exercises of the peeling decomposition: exact round trips,
//! support shrinkage, and agreement with hull membership.

use nbts_core::behavior::{mix, Behavior};
use nbts_core::catalog::{classical_vertices, generate, VertexFamily};
use nbts_core::decompose::{decompose, recompose, DecomposeError};
use nbts_core::scalar::ExactField;
use nbts_core::scenario::Scenario;
use nbts_core::simplex::{hull_membership, HullMembership};
use nbts_core::Q;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_classical_mixture(s: &Scenario, rng: &mut ChaCha8Rng) -> Behavior<Q> {
    let verts = classical_vertices(s);
    let picks = rng.gen_range(1..=verts.len().min(6));
    let chosen: Vec<_> = (0..picks)
        .map(|_| verts[rng.gen_range(0..verts.len())].clone())
        .collect();
    let raw: Vec<i64> = (0..picks).map(|_| rng.gen_range(1..100)).collect();
    let total: i64 = raw.iter().sum();
    let weights: Vec<Q> = raw.iter().map(|&n| Q::new(n.into(), total.into())).collect();
    let behaviors: Vec<Behavior<Q>> = chosen.iter().map(|v| v.to_behavior(s)).collect();
    mix(&behaviors, &weights).unwrap()
}

#[test]
fn random_mixtures_roundtrip_at_three_scales() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (d, m) in [(2usize, 2usize), (3, 2), (2, 3)] {
        let s = Scenario::two_party(d, d, m, m).unwrap();
        let bound = d * d * m * m;
        for _ in 0..60 {
            let b = random_classical_mixture(&s, &mut rng);
            let (dec, trace) = decompose(&b).unwrap();
            assert!(dec.terms.len() <= bound);
            assert!(trace.len() <= bound);
            assert_eq!(recompose(&dec, &s).unwrap(), b);
        }
    }
}

#[test]
fn support_shrinks_every_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = Scenario::two_party(3, 3, 2, 2).unwrap();
    for _ in 0..25 {
        let b = random_classical_mixture(&s, &mut rng);
        let (_, trace) = decompose(&b).unwrap();
        // Replay the peeling and count zeros after each step.
        let mut rest = b.clone();
        let mut zeros = rest.table().iter().filter(|v| v.is_zero()).count();
        for step in &trace[..trace.len() - 1] {
            let eps = &step.epsilon;
            let one_minus = Q::from_int(1) - eps.clone();
            let mut table = rest.table().to_vec();
            let ix = rest.coordinate_index().clone();
            for x in 0..s.input_card(0) {
                for y in 0..s.input_card(1) {
                    let (a, bb) = step.vertex.outputs_at(x, y);
                    let slot = ix.flat(&[a, bb], &[x, y]);
                    table[slot] = table[slot].clone() - eps.clone();
                }
            }
            for v in &mut table {
                *v = v.clone() / one_minus.clone();
            }
            rest = Behavior::from_raw(s.clone(), table).unwrap();
            let now = rest.table().iter().filter(|v| v.is_zero()).count();
            assert!(now > zeros, "remainder must gain a zero entry");
            zeros = now;
        }
    }
}

#[test]
fn verdicts_agree_with_hull_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = Scenario::binary();
    let nbts: Vec<Behavior<Q>> = [VertexFamily::DetIndefinite, VertexFamily::PrLike]
        .iter()
        .flat_map(|&f| generate::<Q>(f, &s).unwrap())
        .collect();
    let classical: Vec<Vec<Q>> = generate::<Q>(VertexFamily::ClassicalIndefinite, &s)
        .unwrap()
        .iter()
        .map(|b| b.table().to_vec())
        .collect();
    let mut accepted = 0;
    let mut rejected = 0;
    for i in 0..120 {
        // Half the samples mix only classical vertices so both verdicts occur.
        let pool: Vec<&Behavior<Q>> = if i % 2 == 0 {
            nbts.iter().collect()
        } else {
            nbts.iter().filter(|b| classical.contains(&b.table().to_vec())).collect()
        };
        let picks = rng.gen_range(2..=5);
        let chosen: Vec<Behavior<Q>> =
            (0..picks).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        let raw: Vec<i64> = (0..picks).map(|_| rng.gen_range(1..50)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<Q> = raw.iter().map(|&n| Q::new(n.into(), total.into())).collect();
        let b = mix(&chosen, &weights).unwrap();

        let by_peel = decompose(&b).is_ok();
        let by_lp = matches!(
            hull_membership(&classical, b.table()),
            HullMembership::Inside(_)
        );
        assert_eq!(by_peel, by_lp);
        if by_peel {
            accepted += 1;
        } else {
            rejected += 1;
        }
    }
    assert!(accepted > 20 && rejected > 20, "accepted={accepted} rejected={rejected}");
}

#[test]
fn pr_mixtures_raise_precondition_failed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = Scenario::binary();
    let pr = generate::<Q>(VertexFamily::PrLike, &s).unwrap();
    for _ in 0..20 {
        let picks = rng.gen_range(1..=4);
        let chosen: Vec<Behavior<Q>> =
            (0..picks).map(|_| pr[rng.gen_range(0..pr.len())].clone()).collect();
        let raw: Vec<i64> = (0..picks).map(|_| rng.gen_range(1..50)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<Q> = raw.iter().map(|&n| Q::new(n.into(), total.into())).collect();
        let b = mix(&chosen, &weights).unwrap();
        assert!(matches!(decompose(&b), Err(DecomposeError::PreconditionFailed(_))));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// recompose ∘ decompose is the identity on random classical mixtures.
    #[test]
    fn prop_roundtrip_binary(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Scenario::binary();
        let b = random_classical_mixture(&s, &mut rng);
        let (dec, _) = decompose(&b).unwrap();
        prop_assert_eq!(recompose(&dec, &s).unwrap(), b);
    }

    /// Decomposition weights are positive and sum to one exactly.
    #[test]
    fn prop_weights_partition_unity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Scenario::two_party(2, 3, 3, 2).unwrap();
        let b = random_classical_mixture(&s, &mut rng);
        let (dec, _) = decompose(&b).unwrap();
        let total: Q = dec.terms.iter().map(|(w, _)| w.clone()).sum();
        prop_assert!(total == Q::from_int(1));
        prop_assert!(dec.terms.iter().all(|(w, _)| w > &Q::zero()));
    }
}
