//! Consequence tests: single-party witness vs structural form, linear-state
//! classicality, definite-timing independence, and bullet algebra on random
//! tensors.

use nalgebra::{DMatrix, DVector};
use nbts_core::behavior::{classicality_deviation, nbts_deviation};
use nbts_core::catalog::{generate, VertexFamily};
use nbts_core::scenario::{Scenario, TimingRegime};
use nbts_core::simplex::{hull_membership, HullMembership};
use nbts_core::Q;
use nbts_twotime::bridge::{classical_projection_span, extract_behavior, Strategy};
use nbts_twotime::checks::{
    is_linear_two_time, nbts_witness_single, structural_form_check, StructuralForm,
};
use nbts_twotime::ops::{measure_prepare_zero, unitary_channel};
use nbts_twotime::states::{
    mix_states, product_pair, product_single, random_density, random_kraus, random_single_state,
    random_unitary, sequential_a_to_b, sequential_b_to_a,
};
use nbts_twotime::tensor::{LabeledTensor, Side, Variance, WireIndex};
use nbts_twotime::{wires, DEFAULT_TOL};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_strategy(rng: &mut ChaCha8Rng, in_wire: &str, mid: &str, out: &str, inputs: usize) -> Strategy {
    let u = random_unitary(rng, 2);
    let basis: Vec<DVector<C64>> = (0..2).map(|k| u.column(k).into_owned()).collect();
    let measurement = measure_prepare_zero(in_wire, mid, &basis, 2, DEFAULT_TOL).unwrap();
    let channels = (0..inputs)
        .map(|_| unitary_channel(mid, out, &random_unitary(rng, 2)))
        .collect();
    Strategy { measurement, channels }
}

fn alice_strategy(rng: &mut ChaCha8Rng) -> Strategy {
    random_strategy(rng, wires::A1, wires::A2, wires::A3, 2)
}

fn bob_strategy(rng: &mut ChaCha8Rng) -> Strategy {
    random_strategy(rng, wires::B1, wires::B2, wires::B3, 2)
}

fn random_linear_state(rng: &mut ChaCha8Rng) -> LabeledTensor {
    match rng.gen_range(0..4) {
        0 => product_pair(&random_density(rng, 4), 2, 2, 2, 2),
        1 => sequential_a_to_b(&random_density(rng, 4), 2, 2, &random_kraus(rng, 4, 2, 4), 2, 2, 2),
        2 => sequential_b_to_a(&random_density(rng, 4), 2, 2, &random_kraus(rng, 4, 2, 4), 2, 2, 2),
        _ => {
            let w = rng.gen_range(0.1..0.9);
            let a = product_pair(&random_density(rng, 4), 2, 2, 2, 2);
            let b = sequential_a_to_b(
                &random_density(rng, 4),
                2,
                2,
                &random_kraus(rng, 4, 2, 4),
                2,
                2,
                2,
            );
            mix_states(&[a, b], &[w, 1.0 - w])
        }
    }
}

#[test]
fn witness_matches_structural_form_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..40 {
        let eta = if i % 2 == 0 {
            product_single(&random_density(&mut rng, 2), 2)
        } else {
            random_single_state(&mut rng, 2, 2)
        };
        let witness = nbts_witness_single(&eta, DEFAULT_TOL).unwrap();
        let structural = structural_form_check(&eta, StructuralForm::ProductIdentitySingle, DEFAULT_TOL)
            .unwrap();
        assert_eq!(witness.nbts, structural.matches, "case {i}");
        if i % 2 == 0 {
            assert!(witness.worst_deviation <= 1e-9);
        }
    }
}

#[test]
fn linear_states_yield_classical_behaviors() {
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    let s = Scenario::binary();
    let span = classical_projection_span(&s);
    let classical: Vec<Vec<Q>> = generate::<Q>(VertexFamily::ClassicalIndefinite, &s)
        .unwrap()
        .iter()
        .map(|b| b.table().to_vec())
        .collect();
    for trial in 0..12 {
        let eta = random_linear_state(&mut rng);
        assert!(is_linear_two_time(&eta, 1e-8).unwrap().linear, "trial {trial}");
        let alice = alice_strategy(&mut rng);
        let bob = bob_strategy(&mut rng);
        let extracted = extract_behavior(&eta, &alice, &bob, &span, 1_000_000, DEFAULT_TOL).unwrap();

        let nbts_dev = nbts_deviation(&extracted.float, &TimingRegime::Indefinite);
        assert!(nbts_dev <= 1e-8, "trial {trial}: NBTS deviation {nbts_dev}");
        let cls_dev = classicality_deviation(&extracted.float).unwrap();
        assert!(cls_dev <= 1e-8, "trial {trial}: classicality deviation {cls_dev}");

        assert!(
            extracted.rationalization_error < 1e-6,
            "trial {trial}: rationalization error {}",
            extracted.rationalization_error
        );
        match hull_membership(&classical, extracted.rational.table()) {
            HullMembership::Inside(_) => {}
            HullMembership::Separated { .. } => {
                panic!("trial {trial}: rationalized behavior escaped the classical polytope")
            }
        }
    }
}

#[test]
fn parallel_form_states_give_input_independent_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(512);
    let s = Scenario::binary();
    let span = classical_projection_span(&s);
    for _ in 0..8 {
        let eta = product_pair(&random_density(&mut rng, 4), 2, 2, 2, 2);
        let extracted =
            extract_behavior(&eta, &alice_strategy(&mut rng), &bob_strategy(&mut rng), &span, 1_000_000, DEFAULT_TOL)
                .unwrap();
        let b = &extracted.float;
        let mut worst = 0.0f64;
        for a in 0..2 {
            for bb in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        let d = (b.get(&[a, bb], &[x, y]) - b.get(&[a, bb], &[0, 0])).abs();
                        worst = worst.max(d);
                    }
                }
            }
        }
        assert!(worst <= 1e-8, "parallel-form table varies with inputs: {worst}");
    }
}

#[test]
fn sequential_form_states_are_y_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(513);
    let s = Scenario::binary();
    let span = classical_projection_span(&s);
    for _ in 0..8 {
        let eta =
            sequential_a_to_b(&random_density(&mut rng, 4), 2, 2, &random_kraus(&mut rng, 4, 2, 4), 2, 2, 2);
        assert!(structural_form_check(&eta, StructuralForm::SequentialBIdentity, DEFAULT_TOL)
            .unwrap()
            .matches);
        let extracted =
            extract_behavior(&eta, &alice_strategy(&mut rng), &bob_strategy(&mut rng), &span, 1_000_000, DEFAULT_TOL)
                .unwrap();
        let b = &extracted.float;
        let mut worst = 0.0f64;
        for a in 0..2 {
            for bb in 0..2 {
                for x in 0..2 {
                    let d = (b.get(&[a, bb], &[x, 0]) - b.get(&[a, bb], &[x, 1])).abs();
                    worst = worst.max(d);
                }
            }
        }
        assert!(worst <= 1e-8, "sequential-form table depends on y: {worst}");
    }
}

#[test]
fn constant_channels_give_exactly_constant_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(514);
    let s = Scenario::binary();
    let span = classical_projection_span(&s);
    let eta = random_linear_state(&mut rng);
    let mut alice = alice_strategy(&mut rng);
    alice.channels[1] = alice.channels[0].clone();
    let extracted =
        extract_behavior(&eta, &alice, &bob_strategy(&mut rng), &span, 1_000_000, DEFAULT_TOL).unwrap();
    let b = &extracted.float;
    for a in 0..2 {
        for bb in 0..2 {
            for y in 0..2 {
                assert_eq!(b.get(&[a, bb], &[0, y]), b.get(&[a, bb], &[1, y]));
            }
        }
    }
}

#[test]
fn probability_outputs_are_proper_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(515);
    let span = classical_projection_span(&Scenario::binary());
    for _ in 0..6 {
        let eta = random_linear_state(&mut rng);
        let extracted =
            extract_behavior(&eta, &alice_strategy(&mut rng), &bob_strategy(&mut rng), &span, 1_000_000, DEFAULT_TOL)
                .unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let mut total = 0.0;
                for a in 0..2 {
                    for bb in 0..2 {
                        let p = *extracted.float.get(&[a, bb], &[x, y]);
                        assert!(p >= -1e-9 && p <= 1.0 + 1e-9);
                        total += p;
                    }
                }
                assert!((total - 1.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn bullet_is_associative_and_commutative_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(516);
    for _ in 0..25 {
        let rand_data = |n: usize, rng: &mut ChaCha8Rng| -> Vec<C64> {
            (0..n)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        // t1: state on wire P; t2: channel P -> R with spectator S; t3: effect
        // on R.
        let t1 = LabeledTensor::new(
            vec![
                WireIndex::new("P", Side::Ket, Variance::Raised, 2),
                WireIndex::new("P", Side::Bra, Variance::Lowered, 2),
            ],
            rand_data(4, &mut rng),
        )
        .unwrap();
        let t2 = LabeledTensor::new(
            vec![
                WireIndex::new("R", Side::Ket, Variance::Raised, 2),
                WireIndex::new("R", Side::Bra, Variance::Lowered, 2),
                WireIndex::new("P", Side::Ket, Variance::Lowered, 2),
                WireIndex::new("P", Side::Bra, Variance::Raised, 2),
                WireIndex::new("S", Side::Ket, Variance::Raised, 3),
            ],
            rand_data(48, &mut rng),
        )
        .unwrap();
        let t3 = LabeledTensor::new(
            vec![
                WireIndex::new("R", Side::Ket, Variance::Lowered, 2),
                WireIndex::new("R", Side::Bra, Variance::Raised, 2),
            ],
            rand_data(4, &mut rng),
        )
        .unwrap();

        let left = t3.bullet(&t2.bullet(&t1).unwrap()).unwrap();
        let right = t3.bullet(&t2).unwrap().bullet(&t1).unwrap();
        assert!(left.max_abs_diff(&right).unwrap() < 1e-12);

        let ab = t2.bullet(&t1).unwrap();
        let ba = t1.bullet(&t2).unwrap();
        assert!(ab.max_abs_diff(&ba).unwrap() < 1e-12);
    }
}

#[test]
fn trivial_ancilla_postselection_is_nbts() {
    // Prepare a correlated state on (A1, ancilla), post-select the ancilla:
    // the effective single-party state is still of product-identity form.
    let mut rng = ChaCha8Rng::seed_from_u64(517);
    let rho = random_density(&mut rng, 4);
    let joint = nbts_twotime::ops::state_from_density_pair(wires::A1, 2, "ANC", 2, &rho);
    let post = DMatrix::from_fn(2, 2, |i, j| {
        let v = [C64::new(0.6, 0.0), C64::new(0.8, 0.0)];
        v[i] * v[j].conj()
    });
    let eta = nbts_twotime::ops::effect_from_operator("ANC", &post)
        .bullet(&joint)
        .unwrap()
        .bullet(&nbts_twotime::ops::identity_vector(
            wires::A3,
            2,
            Variance::Lowered,
        ))
        .unwrap();
    let r = nbts_witness_single(&eta, DEFAULT_TOL).unwrap();
    assert!(r.nbts, "deviation {}", r.worst_deviation);
}
