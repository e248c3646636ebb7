//! The probability rule and the signalling / structure / linearity checks for
//! two-time states.

use crate::ops::{
    computational_basis, discard_randomize, identity_channel, identity_vector,
    measure_prepare_zero, superposition_basis, throw_away_replace, tomographic_unitaries,
    unitary_channel, Measurement,
};
use crate::tensor::{LabeledTensor, Side, TensorError, Variance};
use crate::wires;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("post-selection probability vanishes (denominator {0:.3e})")]
    ZeroDenominator(f64),
    #[error("probabilities came out non-real or out of range: {0}")]
    BadProbability(String),
    #[error("state is missing wire {0}")]
    WrongWireSet(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Outcome probabilities by the composition rule: each element is the full
/// operation tensor for its outcome; p(k) is that contraction divided by the
/// sum over all outcomes.
///
/// The results must be real, nonnegative and normalized within `tol`.
pub fn probability<K: Ord + Clone + std::fmt::Debug>(
    eta: &LabeledTensor,
    elements: &BTreeMap<K, LabeledTensor>,
    tol: f64,
) -> Result<BTreeMap<K, f64>, CheckError> {
    let mut numerators: BTreeMap<K, C64> = BTreeMap::new();
    for (k, el) in elements {
        let n = el.bullet_scalar(eta)?;
        numerators.insert(k.clone(), n);
    }
    let den: C64 = numerators.values().sum();
    if den.norm() <= tol {
        return Err(CheckError::ZeroDenominator(den.norm()));
    }
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for (k, n) in numerators {
        let p = n / den;
        if p.im.abs() > 1e3 * tol {
            return Err(CheckError::BadProbability(format!(
                "imaginary part {:.3e} at outcome {k:?}",
                p.im
            )));
        }
        if p.re < -1e3 * tol || p.re > 1.0 + 1e3 * tol {
            return Err(CheckError::BadProbability(format!(
                "p({k:?}) = {:.6} out of range",
                p.re
            )));
        }
        total += p.re;
        out.insert(k, p.re);
    }
    if (total - 1.0).abs() > 1e3 * tol {
        return Err(CheckError::BadProbability(format!("outcomes sum to {total:.9}")));
    }
    Ok(out)
}

/// Compose a measurement element with a transformation channel into the full
/// per-outcome operation of one party.
pub fn party_elements(
    measurement: &Measurement,
    channel: &LabeledTensor,
) -> Result<BTreeMap<usize, LabeledTensor>, TensorError> {
    let mut out = BTreeMap::new();
    for (&a, el) in &measurement.elements {
        out.insert(a, channel.bullet(el)?);
    }
    Ok(out)
}

/// One tested configuration in the single-party witness sweep.
#[derive(Debug, Clone)]
pub struct WitnessConfig {
    pub family: String,
    pub channel_a: String,
    pub channel_b: String,
    pub outcome: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct SingleWitnessReport {
    pub nbts: bool,
    pub worst_deviation: f64,
    /// The configuration achieving the worst deviation.
    pub witness: Option<WitnessConfig>,
}

/// Sweep the proof family on a single-party state η on wires (A1, A3):
/// destructive measurements in the computational, superposition and
/// imaginary-superposition bases (each followed by |0⟩ preparation), plus the
/// discard-and-randomize measurement, against the tomographically complete
/// unitary family. The state obeys no-backwards-in-time-signalling iff the
/// outcome distribution never depends on the later unitary.
///
/// A configuration whose post-selection succeeds for one unitary and fails
/// for another is itself maximal evidence of signalling and scores deviation 1.
pub fn nbts_witness_single(eta: &LabeledTensor, tol: f64) -> Result<SingleWitnessReport, CheckError> {
    let d1 = eta
        .wire_dim(wires::A1)
        .ok_or_else(|| CheckError::WrongWireSet(wires::A1.into()))?;
    let d3 = eta
        .wire_dim(wires::A3)
        .ok_or_else(|| CheckError::WrongWireSet(wires::A3.into()))?;

    let mut families: Vec<(String, Measurement)> = Vec::new();
    families.push((
        "computational".into(),
        measure_prepare_zero(wires::A1, wires::A2, &computational_basis(d1), d3, tol)
            .map_err(CheckError::Tensor)?,
    ));
    for r in 0..d1 {
        for s in (r + 1)..d1 {
            families.push((
                format!("superpose({r},{s})"),
                measure_prepare_zero(
                    wires::A1,
                    wires::A2,
                    &superposition_basis(d1, r, s, false),
                    d3,
                    tol,
                )?,
            ));
            families.push((
                format!("superpose_i({r},{s})"),
                measure_prepare_zero(
                    wires::A1,
                    wires::A2,
                    &superposition_basis(d1, r, s, true),
                    d3,
                    tol,
                )?,
            ));
        }
    }
    families.push((
        "discard-randomize".into(),
        discard_randomize(wires::A1, wires::A2, d1, d3, tol)?,
    ));

    let channels: Vec<(String, LabeledTensor)> = tomographic_unitaries(d3)
        .into_iter()
        .map(|(name, u)| (name, unitary_channel(wires::A2, wires::A3, &u)))
        .collect();

    let mut worst: Option<WitnessConfig> = None;
    for (fname, meas) in &families {
        // Outcome distributions per channel; post-selection failure is noted.
        let mut dists: Vec<(String, Option<BTreeMap<usize, f64>>)> = Vec::new();
        for (cname, ch) in &channels {
            let elements = party_elements(meas, ch)?;
            match probability(eta, &elements, tol) {
                Ok(p) => dists.push((cname.clone(), Some(p))),
                Err(CheckError::ZeroDenominator(_)) => dists.push((cname.clone(), None)),
                Err(e) => return Err(e),
            }
        }
        for i in 0..dists.len() {
            for j in (i + 1)..dists.len() {
                let (dev, outcome) = match (&dists[i].1, &dists[j].1) {
                    (Some(p), Some(q)) => {
                        let mut best = (0.0f64, 0usize);
                        for (k, pv) in p {
                            let d = (pv - q[k]).abs();
                            if d > best.0 {
                                best = (d, *k);
                            }
                        }
                        best
                    }
                    (None, None) => continue,
                    // Success probability depends on the unitary.
                    _ => (1.0, 0),
                };
                if worst.as_ref().is_none_or(|w| dev > w.deviation) {
                    worst = Some(WitnessConfig {
                        family: fname.clone(),
                        channel_a: dists[i].0.clone(),
                        channel_b: dists[j].0.clone(),
                        outcome,
                        deviation: dev,
                    });
                }
            }
        }
    }
    let worst_deviation = worst.as_ref().map_or(0.0, |w| w.deviation);
    Ok(SingleWitnessReport {
        nbts: worst_deviation <= tol,
        worst_deviation,
        witness: worst,
    })
}

/// Structural forms certified by the throw-away-and-replace fixed point
/// T • η = I • η on the designated output wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuralForm {
    /// η = ρ^{A1} ⊗ 𝕀_{A3}
    ProductIdentitySingle,
    /// η = ρ^{A1 B1} ⊗ 𝕀_{A3} ⊗ 𝕀_{B3}
    ProductIdentityPair,
    /// η = η^{A1 B1}_{A3} ⊗ 𝕀_{B3}
    SequentialBIdentity,
}

#[derive(Debug, Clone)]
pub struct StructuralReport {
    pub matches: bool,
    pub residual: f64,
    /// The reduced state on the remaining wires when the form matches
    /// (the output-wire identities divided out).
    pub extracted: Option<LabeledTensor>,
}

fn fixed_point_residual(eta: &LabeledTensor, wire: &str) -> Result<f64, CheckError> {
    let d = eta.wire_dim(wire).ok_or_else(|| CheckError::WrongWireSet(wire.into()))?;
    if eta.find(wire, Side::Ket, Variance::Lowered).is_none() {
        return Err(CheckError::WrongWireSet(wire.into()));
    }
    let probe = "__probe";
    let t = throw_away_replace(probe, wire, d, d).bullet(eta)?;
    let i = identity_channel(probe, wire, d).bullet(eta)?;
    Ok(t.max_abs_diff(&i)?)
}

/// Partial trace over a lowered (post-selection side) wire.
fn trace_out_lowered(eta: &LabeledTensor, wire: &str) -> Result<LabeledTensor, CheckError> {
    let d = eta.wire_dim(wire).ok_or_else(|| CheckError::WrongWireSet(wire.into()))?;
    Ok(identity_vector(wire, d, Variance::Raised).bullet(eta)?)
}

/// Test η against a product-identity structural form; the residual is the
/// worst fixed-point deviation over the designated output wires, scaled
/// relative to the state's magnitude.
pub fn structural_form_check(
    eta: &LabeledTensor,
    form: StructuralForm,
    tol: f64,
) -> Result<StructuralReport, CheckError> {
    let output_wires: &[&str] = match form {
        StructuralForm::ProductIdentitySingle => &[wires::A3],
        StructuralForm::ProductIdentityPair => &[wires::A3, wires::B3],
        StructuralForm::SequentialBIdentity => &[wires::B3],
    };
    let mut residual = 0.0f64;
    for w in output_wires {
        residual = residual.max(fixed_point_residual(eta, w)?);
    }
    let scale = eta.max_abs().max(1e-30);
    let matches = residual <= tol * scale.max(1.0);
    let extracted = if matches {
        let mut reduced = eta.clone();
        let mut norm = 1.0;
        for w in output_wires {
            let d = eta.wire_dim(w).expect("checked above");
            reduced = trace_out_lowered(&reduced, w)?;
            norm *= d as f64;
        }
        Some(reduced.scale(C64::new(1.0 / norm, 0.0)))
    } else {
        None
    };
    Ok(StructuralReport { matches, residual, extracted })
}

#[derive(Debug, Clone)]
pub struct LinearityReport {
    pub linear: bool,
    /// Residuals of the four conditions: normalization of the full identity
    /// contraction, then the three I/T channel identities.
    pub residuals: [f64; 4],
}

/// The four necessary and sufficient linearity conditions for a two-party
/// two-time state on (A1, B1; A3, B3). Linear states price every strategy by
/// direct composition with no state-dependent denominator.
pub fn is_linear_two_time(eta: &LabeledTensor, tol: f64) -> Result<LinearityReport, CheckError> {
    for w in [wires::A1, wires::B1, wires::A3, wires::B3] {
        if eta.wire_dim(w).is_none() {
            return Err(CheckError::WrongWireSet(w.into()));
        }
    }
    let d_a1 = eta.wire_dim(wires::A1).unwrap();
    let d_b1 = eta.wire_dim(wires::B1).unwrap();
    let d_a3 = eta.wire_dim(wires::A3).unwrap();
    let d_b3 = eta.wire_dim(wires::B3).unwrap();

    // Normalization: full identity contraction equals d_{A3} d_{B3}.
    let full = identity_vector(wires::A1, d_a1, Variance::Lowered)
        .bullet(&identity_vector(wires::B1, d_b1, Variance::Lowered))?
        .bullet(&identity_vector(wires::A3, d_a3, Variance::Raised))?
        .bullet(&identity_vector(wires::B3, d_b3, Variance::Raised))?;
    let s = full.bullet_scalar(eta)?;
    let r1 = (s - C64::new((d_a3 * d_b3) as f64, 0.0)).norm();

    // (I^{A3}_{A2} ⊗ T^{B3}_{B1}) η = (T^{A3}_{A2} ⊗ T^{B3}_{B1}) η
    let tb_full = throw_away_replace(wires::B1, wires::B3, d_b1, d_b3);
    let u = tb_full.bullet(eta)?;
    let lhs = identity_channel(wires::A2, wires::A3, d_a3).bullet(&u)?;
    let rhs = throw_away_replace(wires::A2, wires::A3, d_a3, d_a3).bullet(&u)?;
    let r2 = lhs.max_abs_diff(&rhs)?;

    // (T^{A3}_{A1} ⊗ I^{B3}_{B2}) η = (T^{A3}_{A1} ⊗ T^{B3}_{B2}) η
    let ta_full = throw_away_replace(wires::A1, wires::A3, d_a1, d_a3);
    let v = ta_full.bullet(eta)?;
    let lhs = identity_channel(wires::B2, wires::B3, d_b3).bullet(&v)?;
    let rhs = throw_away_replace(wires::B2, wires::B3, d_b3, d_b3).bullet(&v)?;
    let r3 = lhs.max_abs_diff(&rhs)?;

    // (I ⊗ I) η = (I ⊗ T) η + (T ⊗ I) η − (T ⊗ T) η on the A2/B2 legs.
    let ia = identity_channel(wires::A2, wires::A3, d_a3);
    let ib = identity_channel(wires::B2, wires::B3, d_b3);
    let ta = throw_away_replace(wires::A2, wires::A3, d_a3, d_a3);
    let tb = throw_away_replace(wires::B2, wires::B3, d_b3, d_b3);
    let ii = ia.bullet(&ib)?.bullet(eta)?;
    let it = ia.bullet(&tb)?.bullet(eta)?;
    let ti = ta.bullet(&ib)?.bullet(eta)?;
    let tt = ta.bullet(&tb)?.bullet(eta)?;
    let rhs = it.add(&ti)?.sub(&tt)?;
    let r4 = ii.max_abs_diff(&rhs)?;

    let scale = eta.max_abs().max(1.0);
    let residuals = [r1, r2, r3, r4];
    Ok(LinearityReport {
        linear: residuals.iter().all(|r| *r <= tol * scale),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::state_from_density;
    use crate::states::{
        mix_states, pre_post_single, product_pair, product_single, random_density,
        random_kraus, random_single_state, random_unitary, sequential_a_to_b,
    };
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn cc(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn proj(v: &[C64]) -> DMatrix<C64> {
        let n = v.len();
        DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    fn ket0() -> DMatrix<C64> {
        proj(&[cc(1.0, 0.0), cc(0.0, 0.0)])
    }

    fn ket_plus() -> DMatrix<C64> {
        let s = 1.0 / 2f64.sqrt();
        proj(&[cc(s, 0.0), cc(s, 0.0)])
    }

    #[test]
    fn no_postselection_reproduces_born_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rho = random_density(&mut rng, 2);
        let eta = product_single(&rho, 2);
        // Measure in a random basis (prepare |0>), identity channel after.
        let u = random_unitary(&mut rng, 2);
        let basis: Vec<nalgebra::DVector<C64>> =
            (0..2).map(|k| u.column(k).into_owned()).collect();
        let meas = measure_prepare_zero(wires::A1, wires::A2, &basis, 2, TOL).unwrap();
        let ch = identity_channel(wires::A2, wires::A3, 2);
        let p = probability(&eta, &party_elements(&meas, &ch).unwrap(), TOL).unwrap();
        for (a, v) in &basis.iter().enumerate().collect::<Vec<_>>() {
            // Independent oracle: Born rule from the density matrix.
            let want = (v.adjoint() * &rho * *v)[(0, 0)].re;
            assert!((p[a] - want).abs() < 1e-12, "outcome {a}");
        }
    }

    #[test]
    fn postselected_state_shows_input_dependence() {
        // Pre |0><0|, post |+><+|: under discard-and-randomize the outcome
        // distribution follows |<+|U|a>|^2, which differs between the
        // identity and the fourier rotation.
        let eta = pre_post_single(&ket0(), &ket_plus());
        let meas = discard_randomize(wires::A1, wires::A2, 2, 2, TOL).unwrap();
        let id = identity_channel(wires::A2, wires::A3, 2);
        let h = unitary_channel(wires::A2, wires::A3, &crate::ops::fourier_matrix(2));
        let p_id = probability(&eta, &party_elements(&meas, &id).unwrap(), TOL).unwrap();
        let p_h = probability(&eta, &party_elements(&meas, &h).unwrap(), TOL).unwrap();
        assert!((p_id[&0] - 0.5).abs() < 1e-12);
        assert!((p_h[&0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_denominator_detected() {
        // Post-select on |+> but rotate the prepared |0> to |->.
        let eta = pre_post_single(&ket0(), &ket_plus());
        let meas = measure_prepare_zero(
            wires::A1,
            wires::A2,
            &computational_basis(2),
            2,
            TOL,
        )
        .unwrap();
        let minus_rot = crate::ops::rotation_to_superposition(2, 0, 1, cc(-1.0, 0.0));
        let ch = unitary_channel(wires::A2, wires::A3, &minus_rot);
        match probability(&eta, &party_elements(&meas, &ch).unwrap(), TOL) {
            Err(CheckError::ZeroDenominator(_)) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn witness_accepts_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..5 {
            let rho = random_density(&mut rng, 2);
            let r = nbts_witness_single(&product_single(&rho, 2), TOL).unwrap();
            assert!(r.nbts, "deviation {}", r.worst_deviation);
            assert!(r.worst_deviation <= 1e-9);
        }
        // Maximally mixed in particular.
        let mm = DMatrix::from_diagonal_element(2, 2, cc(0.5, 0.0));
        assert!(nbts_witness_single(&product_single(&mm, 2), TOL).unwrap().nbts);
    }

    #[test]
    fn witness_rejects_postselected_counterexample() {
        let eta = pre_post_single(&ket0(), &ket_plus());
        let r = nbts_witness_single(&eta, TOL).unwrap();
        assert!(!r.nbts);
        assert!(r.worst_deviation >= 0.1, "deviation {}", r.worst_deviation);
        assert!(r.witness.is_some());
    }

    #[test]
    fn witness_rejects_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..5 {
            let eta = random_single_state(&mut rng, 2, 2);
            let product = structural_form_check(&eta, StructuralForm::ProductIdentitySingle, TOL)
                .unwrap()
                .matches;
            let r = nbts_witness_single(&eta, TOL).unwrap();
            assert_eq!(r.nbts, product);
            assert!(!r.nbts, "random block states are generically signalling");
        }
    }

    #[test]
    fn structural_check_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let rho = random_density(&mut rng, 2);
        let eta = product_single(&rho, 2);
        let rep =
            structural_form_check(&eta, StructuralForm::ProductIdentitySingle, TOL).unwrap();
        assert!(rep.matches);
        assert!(rep.residual <= 1e-12);
        // The reduced part is ρ itself.
        let got = rep.extracted.unwrap();
        assert!(got.max_abs_diff(&state_from_density(wires::A1, &rho)).unwrap() < 1e-12);

        let bad = pre_post_single(&ket0(), &ket_plus());
        let rep = structural_form_check(&bad, StructuralForm::ProductIdentitySingle, TOL).unwrap();
        assert!(!rep.matches);
        assert!(rep.residual > 0.1);
    }

    #[test]
    fn structural_check_pair_and_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let rho = random_density(&mut rng, 4);
        let eta = product_pair(&rho, 2, 2, 2, 2);
        assert!(structural_form_check(&eta, StructuralForm::ProductIdentityPair, TOL)
            .unwrap()
            .matches);
        assert!(structural_form_check(&eta, StructuralForm::SequentialBIdentity, TOL)
            .unwrap()
            .matches);

        // A channel from A3 to B1 is sequential but not parallel-product.
        let kraus = random_kraus(&mut rng, 4, 2, 4);
        let seq = sequential_a_to_b(&random_density(&mut rng, 4), 2, 2, &kraus, 2, 2, 2);
        assert!(!structural_form_check(&seq, StructuralForm::ProductIdentityPair, TOL)
            .unwrap()
            .matches);
        assert!(structural_form_check(&seq, StructuralForm::SequentialBIdentity, TOL)
            .unwrap()
            .matches);
    }

    #[test]
    fn linearity_of_standard_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(111);
        let par = product_pair(&random_density(&mut rng, 4), 2, 2, 2, 2);
        let rep = is_linear_two_time(&par, TOL).unwrap();
        assert!(rep.linear, "residuals {:?}", rep.residuals);

        let seq = sequential_a_to_b(
            &random_density(&mut rng, 4),
            2,
            2,
            &random_kraus(&mut rng, 4, 2, 4),
            2,
            2,
            2,
        );
        let rep = is_linear_two_time(&seq, TOL).unwrap();
        assert!(rep.linear, "residuals {:?}", rep.residuals);

        let mixed = mix_states(&[par.clone(), seq.clone()], &[0.25, 0.75]);
        assert!(is_linear_two_time(&mixed, TOL).unwrap().linear);

        // Scaling breaks only the normalization condition.
        let scaled = par.scale(cc(2.0, 0.0));
        let rep = is_linear_two_time(&scaled, TOL).unwrap();
        assert!(!rep.linear);
        assert!(rep.residuals[0] > 1.0);
        assert!(rep.residuals[1] < 1e-9 && rep.residuals[2] < 1e-9 && rep.residuals[3] < 1e-9);
    }

    #[test]
    fn nonlinear_state_fails_conditions() {
        // Post-selecting Bob on |+> violates the throw-away fixed point.
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let rho = random_density(&mut rng, 4);
        let eta = crate::ops::state_from_density_pair(wires::A1, 2, wires::B1, 2, &rho)
            .bullet(&identity_vector(wires::A3, 2, Variance::Lowered))
            .unwrap()
            .bullet(&crate::ops::effect_from_operator(wires::B3, &ket_plus()))
            .unwrap();
        let rep = is_linear_two_time(&eta, TOL).unwrap();
        assert!(!rep.linear);
    }
}
