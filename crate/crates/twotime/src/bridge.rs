//! From two-time states to behaviors: strategy evaluation, and the exact
//! rationalization that feeds the polytope machinery.

use crate::checks::{party_elements, probability, CheckError};
use crate::ops::Measurement;
use crate::tensor::LabeledTensor;
use nbts_core::behavior::Behavior;
use nbts_core::constraints::LinearConstraint;
use nbts_core::linalg::{project_onto_affine, Mat};
use nbts_core::scenario::Scenario;
use nbts_core::Q;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// One party's local strategy: a measurement followed by an input-indexed
/// family of transformation channels.
#[derive(Debug, Clone)]
pub struct Strategy {
    pub measurement: Measurement,
    pub channels: Vec<LabeledTensor>,
}

impl Strategy {
    pub fn input_count(&self) -> usize {
        self.channels.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.measurement.elements.len()
    }
}

#[derive(Debug, Clone)]
pub struct ExtractedBehavior {
    pub float: Behavior<f64>,
    pub rational: Behavior<Q>,
    /// Largest |float − rational| over the table.
    pub rationalization_error: f64,
}

/// Evaluate p(a,b|x,y) for every input pair by the composition rule, then
/// rationalize the table onto the span of the given equality constraints.
pub fn extract_behavior(
    eta: &LabeledTensor,
    alice: &Strategy,
    bob: &Strategy,
    equalities: &[LinearConstraint<Q>],
    max_den: u64,
    tol: f64,
) -> Result<ExtractedBehavior, CheckError> {
    let scenario = Scenario::two_party(
        alice.outcome_count(),
        bob.outcome_count(),
        alice.input_count(),
        bob.input_count(),
    )
    .expect("strategy cardinalities are positive");

    let mut table = vec![0.0f64; scenario.table_len()];
    let ix = nbts_core::scenario::CoordinateIndex::new(scenario.clone());
    for (x, lx) in alice.channels.iter().enumerate() {
        let a_elems = party_elements(&alice.measurement, lx)?;
        for (y, my) in bob.channels.iter().enumerate() {
            let b_elems = party_elements(&bob.measurement, my)?;
            let mut joint: BTreeMap<(usize, usize), LabeledTensor> = BTreeMap::new();
            for (&a, ea) in &a_elems {
                for (&b, eb) in &b_elems {
                    joint.insert((a, b), ea.bullet(eb).map_err(CheckError::Tensor)?);
                }
            }
            let p = probability(eta, &joint, tol)?;
            for ((a, b), v) in p {
                table[ix.flat(&[a, b], &[x, y])] = v;
            }
        }
    }
    let float = Behavior::from_raw(scenario.clone(), table)
        .expect("table length matches scenario");
    let (rational, rationalization_error) = rationalize(&float, max_den, equalities)
        .map_err(CheckError::BadProbability)?;
    Ok(ExtractedBehavior { float, rational, rationalization_error })
}

/// The equality span of the classical polytope (indefinite timing):
/// normalization, the NBTS marginal equalities, and the classicality
/// equalities. Rationalized behaviors projected onto this span are exact
/// candidates for classical membership tests.
pub fn classical_projection_span(s: &Scenario) -> Vec<LinearConstraint<Q>> {
    use nbts_core::constraints::{
        classicality_constraints, nbts_constraints, normalization_constraints,
    };
    use nbts_core::scenario::TimingRegime;
    let mut eqs = normalization_constraints(s);
    eqs.extend(nbts_constraints(s, &TimingRegime::Indefinite));
    eqs.extend(classicality_constraints(s).expect("two-party scenario"));
    eqs
}

/// Best rational approximation with denominator ≤ max_den, by the continued
/// fraction convergents.
pub fn approximate_rational(x: f64, max_den: u64) -> Q {
    assert!(x.is_finite());
    let negative = x < 0.0;
    let mut x = x.abs();
    // Convergents p/q of the continued fraction expansion.
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let limit = BigInt::from(max_den);
    for _ in 0..64 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > limit {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    let q = Q::new(p1, q1);
    if negative {
        -q
    } else {
        q
    }
}

/// Rationalize a float behavior and project it exactly onto the affine span
/// of the given equality system (which must include normalization for the
/// result to be a valid behavior). Tiny negative entries produced by the
/// projection are repaired by an exact mixture with the uniform behavior.
/// Returns the exact behavior and the max distance to the float table.
pub fn rationalize(
    b: &Behavior<f64>,
    max_den: u64,
    equalities: &[LinearConstraint<Q>],
) -> Result<(Behavior<Q>, f64), String> {
    let s = b.scenario().clone();
    let n = s.table_len();
    let approx: Vec<Q> = b.table().iter().map(|&v| approximate_rational(v, max_den)).collect();

    let mut rows = Mat::zeros(equalities.len(), n);
    let mut rhs = Vec::with_capacity(equalities.len());
    for (r, c) in equalities.iter().enumerate() {
        for (&i, v) in &c.coeffs {
            rows[(r, i)] = v.clone();
        }
        rhs.push(c.rhs.clone());
    }
    let mut point = project_onto_affine(&approx, &rows, &rhs)
        .ok_or_else(|| "equality system is inconsistent".to_string())?;

    // Repair small negatives: mix toward uniform just enough to land on the
    // boundary. The uniform behavior satisfies every equality system in play.
    let worst_negative = point.iter().filter(|&v| v < &Q::zero()).cloned().min();
    if let Some(neg) = worst_negative {
        let delta = -neg;
        let u0 = Q::one() / Q::from(BigInt::from(s.output_tuples()));
        let lambda = delta.clone() / (delta + u0.clone());
        let keep = Q::one() - lambda.clone();
        for v in point.iter_mut() {
            *v = keep.clone() * v.clone() + lambda.clone() * u0.clone();
        }
    }

    let rational = Behavior::new(s, point).map_err(|e| e.to_string())?;
    let err = rational
        .table()
        .iter()
        .zip(b.table())
        .map(|(q, &f)| (q.to_f64().unwrap_or(f64::NAN) - f).abs())
        .fold(0.0, f64::max);
    Ok((rational, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nbts_core::constraints::normalization_constraints;

    #[test]
    fn continued_fractions_hit_simple_targets() {
        assert_eq!(approximate_rational(0.5, 1000), Q::new(1.into(), 2.into()));
        assert_eq!(approximate_rational(1.0 / 3.0, 1000), Q::new(1.into(), 3.into()));
        assert_eq!(approximate_rational(0.0, 1000), Q::zero());
        assert_eq!(approximate_rational(-0.25, 1000), Q::new((-1).into(), 4.into()));
        let pi = approximate_rational(std::f64::consts::PI, 200);
        assert_eq!(pi, Q::new(355.into(), 113.into()));
    }

    #[test]
    fn rationalize_projects_onto_normalization() {
        let s = Scenario::binary();
        // Slightly perturbed uniform table.
        let table: Vec<f64> = (0..16).map(|i| 0.25 + 1e-9 * (i as f64 - 8.0)).collect();
        let bf = Behavior::from_raw(s.clone(), table).unwrap();
        let eqs = normalization_constraints::<Q>(&s);
        let (bq, err) = rationalize(&bf, 1_000_000, &eqs).unwrap();
        bq.validate().unwrap();
        assert!(err < 1e-7, "err {err}");
    }

    #[test]
    fn rationalize_repairs_negative_drift() {
        let s = Scenario::two_party(2, 2, 1, 1).unwrap();
        // A boundary table whose float image dips negative after projection.
        let table = vec![-1e-10, 0.5 + 1e-10, 0.25, 0.25];
        let bf = Behavior::from_raw(s.clone(), table).unwrap();
        let eqs = normalization_constraints::<Q>(&s);
        let (bq, err) = rationalize(&bf, 1_000_000, &eqs).unwrap();
        bq.validate().unwrap();
        assert!(err < 1e-6);
    }
}
