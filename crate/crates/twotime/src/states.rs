//! Two-time state constructors: product states, sequential channel circuits,
//! and random instances for property tests.

use crate::ops::{
    channel_from_kraus_two_in, identity_vector, state_from_density, state_from_density_pair,
};
use crate::tensor::{LabeledTensor, Side, Variance, WireIndex};
use crate::wires;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-party state with no post-selection: ρ^{A1} ⊗ 𝕀_{A3}.
pub fn product_single(rho: &DMatrix<C64>, d_out: usize) -> LabeledTensor {
    state_from_density(wires::A1, rho)
        .bullet(&identity_vector(wires::A3, d_out, Variance::Lowered))
        .expect("disjoint wires")
}

/// Single-party state with explicit pre- and post-selection operators.
pub fn pre_post_single(pre: &DMatrix<C64>, post: &DMatrix<C64>) -> LabeledTensor {
    let d_out = post.nrows();
    state_from_density(wires::A1, pre)
        .bullet(&crate::ops::effect_from_operator(wires::A3, post))
        .expect("disjoint wires")
        .aligned_to(&[
            WireIndex::new(wires::A1, Side::Ket, Variance::Raised, pre.nrows()),
            WireIndex::new(wires::A1, Side::Bra, Variance::Lowered, pre.nrows()),
            WireIndex::new(wires::A3, Side::Ket, Variance::Lowered, d_out),
            WireIndex::new(wires::A3, Side::Bra, Variance::Raised, d_out),
        ])
        .expect("known index set")
}

/// Single-party state from an arbitrary operator block on A1 ⊗ A3
/// (row index i_{A1}·d3 + i_{A3}).
pub fn single_from_block(block: &DMatrix<C64>, d1: usize, d3: usize) -> LabeledTensor {
    assert_eq!(block.nrows(), d1 * d3);
    LabeledTensor::from_fn(
        vec![
            WireIndex::new(wires::A1, Side::Ket, Variance::Raised, d1),
            WireIndex::new(wires::A1, Side::Bra, Variance::Lowered, d1),
            WireIndex::new(wires::A3, Side::Ket, Variance::Lowered, d3),
            WireIndex::new(wires::A3, Side::Bra, Variance::Raised, d3),
        ],
        |v| block[(v[0] * d3 + v[2], v[1] * d3 + v[3])],
    )
}

/// Two-party parallel-form state ρ^{A1 B1} ⊗ 𝕀_{A3} ⊗ 𝕀_{B3}.
pub fn product_pair(rho_a1b1: &DMatrix<C64>, d1a: usize, d1b: usize, d3a: usize, d3b: usize) -> LabeledTensor {
    state_from_density_pair(wires::A1, d1a, wires::B1, d1b, rho_a1b1)
        .bullet(&identity_vector(wires::A3, d3a, Variance::Lowered))
        .expect("disjoint")
        .bullet(&identity_vector(wires::B3, d3b, Variance::Lowered))
        .expect("disjoint")
}

/// Sequential A→B state: prepare ρ on A1 ⊗ memory, feed Alice's output and
/// the memory through a channel into B1, leave B3 unpost-selected:
/// η = (C^{B1}_{A3 M} • ρ^{A1 M}) ⊗ 𝕀_{B3}.
pub fn sequential_a_to_b(
    rho_a1m: &DMatrix<C64>,
    d_a1: usize,
    d_m: usize,
    kraus_a3m_to_b1: &[DMatrix<C64>],
    d_a3: usize,
    d_b1: usize,
    d_b3: usize,
) -> LabeledTensor {
    assert_eq!(rho_a1m.nrows(), d_a1 * d_m);
    assert_eq!(kraus_a3m_to_b1[0].ncols(), d_a3 * d_m);
    assert_eq!(kraus_a3m_to_b1[0].nrows(), d_b1);
    let state = state_from_density_pair(wires::A1, d_a1, "M", d_m, rho_a1m);
    let chan = channel_from_kraus_two_in("A3", d_a3, "M", d_m, wires::B1, kraus_a3m_to_b1);
    chan.bullet(&state)
        .expect("memory wires contract")
        .bullet(&identity_vector(wires::B3, d_b3, Variance::Lowered))
        .expect("disjoint")
}

/// Mirror image of [`sequential_a_to_b`]: Bob acts first.
pub fn sequential_b_to_a(
    rho_b1m: &DMatrix<C64>,
    d_b1: usize,
    d_m: usize,
    kraus_b3m_to_a1: &[DMatrix<C64>],
    d_b3: usize,
    d_a1: usize,
    d_a3: usize,
) -> LabeledTensor {
    assert_eq!(rho_b1m.nrows(), d_b1 * d_m);
    assert_eq!(kraus_b3m_to_a1[0].ncols(), d_b3 * d_m);
    assert_eq!(kraus_b3m_to_a1[0].nrows(), d_a1);
    let state = state_from_density_pair(wires::B1, d_b1, "M", d_m, rho_b1m);
    let chan = channel_from_kraus_two_in("B3", d_b3, "M", d_m, wires::A1, kraus_b3m_to_a1);
    chan.bullet(&state)
        .expect("memory wires contract")
        .bullet(&identity_vector(wires::A3, d_a3, Variance::Lowered))
        .expect("disjoint")
}

/// Convex mixture of two-time states on the same wires.
pub fn mix_states(states: &[LabeledTensor], weights: &[f64]) -> LabeledTensor {
    assert_eq!(states.len(), weights.len());
    assert!(!states.is_empty());
    let mut acc = states[0].scale(c(weights[0], 0.0));
    for (s, &w) in states.iter().zip(weights).skip(1) {
        acc = acc.add(&s.scale(c(w, 0.0))).expect("same wires");
    }
    acc
}

pub fn random_complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random density operator GG†/tr.
pub fn random_density(rng: &mut impl Rng, d: usize) -> DMatrix<C64> {
    let g = random_complex_matrix(rng, d, d);
    let m = &g * g.adjoint();
    let tr: C64 = (0..d).map(|i| m[(i, i)]).sum();
    m / tr
}

/// Haar-ish random unitary via QR with phase fixing.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> DMatrix<C64> {
    let g = random_complex_matrix(rng, d, d);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 1e-12 { diag / diag.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}

/// Random channel (d_in → d_out) from a random isometry into d_out ⊗ env.
pub fn random_kraus(rng: &mut impl Rng, d_in: usize, d_out: usize, env: usize) -> Vec<DMatrix<C64>> {
    assert!(d_out * env >= d_in);
    let u = random_unitary(rng, d_out * env);
    // First d_in columns form the isometry; split rows by environment index.
    (0..env)
        .map(|e| {
            DMatrix::from_fn(d_out, d_in, |o, i| u[(o * env + e, i)])
        })
        .collect()
}

/// Random positive two-time state on (A1, A3): generically not of the
/// product-identity form.
pub fn random_single_state(rng: &mut impl Rng, d1: usize, d3: usize) -> LabeledTensor {
    let n = d1 * d3;
    let g = random_complex_matrix(rng, n, n);
    let m = &g * g.adjoint();
    let tr: C64 = (0..n).map(|i| m[(i, i)]).sum();
    single_from_block(&(m / tr * c(d3 as f64, 0.0)), d1, d3)
}
