//! H-representations of the NBTS and classical polytopes.
//!
//! Generators favour auditability over minimality: they emit one equality per
//! instance of the defining condition and leave redundancy to the exact rank
//! machinery downstream.

use crate::behavior::BehaviorError;
use crate::linalg::Mat;
use crate::scalar::ExactField;
use crate::scenario::{CoordinateIndex, Scenario, TimingRegime};
use crate::Q;
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Geq,
}

/// Sparse linear constraint Σ coeffs[i]·p[i] {=, ≥} rhs over behavior
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T = Q> {
    pub coeffs: BTreeMap<usize, T>,
    pub rhs: T,
    pub relation: Relation,
}

impl<T: ExactField> LinearConstraint<T> {
    pub fn new(coeffs: BTreeMap<usize, T>, rhs: T, relation: Relation) -> Self {
        let mut coeffs = coeffs;
        coeffs.retain(|_, v| !v.is_zero());
        Self { coeffs, rhs, relation }
    }

    pub fn eq(coeffs: BTreeMap<usize, T>, rhs: T) -> Self {
        Self::new(coeffs, rhs, Relation::Eq)
    }

    pub fn geq(coeffs: BTreeMap<usize, T>, rhs: T) -> Self {
        Self::new(coeffs, rhs, Relation::Geq)
    }

    pub fn lhs_at(&self, point: &[T]) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, (&i, c)| acc + c.clone() * point[i].clone())
    }

    pub fn satisfied_by(&self, point: &[T]) -> bool {
        let v = self.lhs_at(point);
        match self.relation {
            Relation::Eq => v == self.rhs,
            Relation::Geq => v >= self.rhs,
        }
    }

    /// Dense coefficient row.
    pub fn dense(&self, dim: usize) -> Vec<T> {
        let mut row = vec![T::zero(); dim];
        for (&i, c) in &self.coeffs {
            row[i] = c.clone();
        }
        row
    }
}

/// Equality-and-inequality system over behavior coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope<T = Q> {
    pub ambient_dim: usize,
    pub equalities: Vec<LinearConstraint<T>>,
    pub inequalities: Vec<LinearConstraint<T>>,
}

impl<T: ExactField> HPolytope<T> {
    pub fn contains_point(&self, point: &[T]) -> bool {
        self.violated_constraint(point).is_none()
    }

    /// First violated constraint, if any (equalities first, in order).
    pub fn violated_constraint(&self, point: &[T]) -> Option<&LinearConstraint<T>> {
        self.equalities
            .iter()
            .chain(&self.inequalities)
            .find(|c| !c.satisfied_by(point))
    }

    /// Dense matrix of equality rows with their right-hand sides.
    pub fn equality_system(&self) -> (Mat<T>, Vec<T>) {
        let mut m = Mat::zeros(self.equalities.len(), self.ambient_dim);
        let mut rhs = Vec::with_capacity(self.equalities.len());
        for (r, c) in self.equalities.iter().enumerate() {
            for (&i, v) in &c.coeffs {
                m[(r, i)] = v.clone();
            }
            rhs.push(c.rhs.clone());
        }
        (m, rhs)
    }
}

impl HPolytope<Q> {
    pub fn to_json(&self) -> Value {
        let ser = |cs: &[LinearConstraint<Q>]| -> Value {
            Value::Array(
                cs.iter()
                    .map(|c| {
                        let coeffs: serde_json::Map<String, Value> = c
                            .coeffs
                            .iter()
                            .map(|(&i, v)| (i.to_string(), crate::rational_to_json(v)))
                            .collect();
                        json!({"c": coeffs, "rhs": crate::rational_to_json(&c.rhs)})
                    })
                    .collect(),
            )
        };
        json!({
            "dim": self.ambient_dim,
            "eq": ser(&self.equalities),
            "geq": ser(&self.inequalities),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, BehaviorError> {
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| BehaviorError::Json("missing \"dim\"".into()))?
            as usize;
        let parse_list = |key: &str, relation: Relation| -> Result<Vec<LinearConstraint<Q>>, BehaviorError> {
            let Some(arr) = v.get(key) else {
                return Ok(Vec::new());
            };
            let arr = arr
                .as_array()
                .ok_or_else(|| BehaviorError::Json(format!("\"{key}\" must be an array")))?;
            arr.iter()
                .map(|item| {
                    let cmap = item
                        .get("c")
                        .and_then(Value::as_object)
                        .ok_or_else(|| BehaviorError::Json("constraint missing \"c\"".into()))?;
                    let mut coeffs = BTreeMap::new();
                    for (k, val) in cmap {
                        let idx: usize = k
                            .parse()
                            .map_err(|_| BehaviorError::Json(format!("bad index {k:?}")))?;
                        if idx >= dim {
                            return Err(BehaviorError::Json(format!(
                                "coefficient index {idx} >= dim {dim}"
                            )));
                        }
                        coeffs.insert(idx, crate::parse_rational(val).map_err(BehaviorError::Json)?);
                    }
                    let rhs = item
                        .get("rhs")
                        .map(|r| crate::parse_rational(r).map_err(BehaviorError::Json))
                        .transpose()?
                        .unwrap_or_else(Q::zero);
                    Ok(LinearConstraint::new(coeffs, rhs, relation))
                })
                .collect()
        };
        Ok(HPolytope {
            ambient_dim: dim,
            equalities: parse_list("eq", Relation::Eq)?,
            inequalities: parse_list("geq", Relation::Geq)?,
        })
    }
}

/// One normalization equality Σ_a⃗ p(a⃗|x⃗) = 1 per input tuple.
pub fn normalization_constraints<T: ExactField>(s: &Scenario) -> Vec<LinearConstraint<T>> {
    let ix = CoordinateIndex::new(s.clone());
    s.each_input()
        .map(|x| {
            let coeffs = s.each_output().map(|a| (ix.flat(&a, &x), T::one())).collect();
            LinearConstraint::eq(coeffs, T::one())
        })
        .collect()
}

/// The regime's marginal-independence equalities: for every party, output
/// value and input tuple, the marginal at x⃗ equals the marginal at the tuple
/// with the regime-forbidden coordinates zeroed. Redundant rows are fine.
pub fn nbts_constraints<T: ExactField>(
    s: &Scenario,
    regime: &TimingRegime,
) -> Vec<LinearConstraint<T>> {
    let ix = CoordinateIndex::new(s.clone());
    let n = s.party_count();
    let mut out = Vec::new();
    for party in 0..n {
        let forbidden = regime.forbidden_inputs(party, n);
        for x in s.each_input() {
            let mut base = x.clone();
            for &p in &forbidden {
                base[p] = 0;
            }
            if base == x {
                continue;
            }
            for a_i in 0..s.output_card(party) {
                // x and base are distinct input tuples, so the +1 and -1
                // blocks never collide.
                let mut coeffs: BTreeMap<usize, T> = BTreeMap::new();
                for a in s.each_output() {
                    if a[party] != a_i {
                        continue;
                    }
                    coeffs.insert(ix.flat(&a, &x), T::one());
                    coeffs.insert(ix.flat(&a, &base), T::zero() - T::one());
                }
                out.push(LinearConstraint::eq(coeffs, T::zero()));
            }
        }
    }
    out
}

/// All instances of the two-party classicality equality
/// p(a,b|x,y) + p(a,b|x',y') = p(a,b|x,y') + p(a,b|x',y), as
/// (+1,+1,−1,−1)-rows. Scenarios with a single input on either side yield no
/// non-degenerate instances.
pub fn classicality_constraints<T: ExactField>(
    s: &Scenario,
) -> Result<Vec<LinearConstraint<T>>, BehaviorError> {
    if s.party_count() != 2 {
        return Err(BehaviorError::WrongPartyCount(s.party_count()));
    }
    let ix = CoordinateIndex::new(s.clone());
    let mut out = Vec::new();
    for a in 0..s.output_card(0) {
        for b in 0..s.output_card(1) {
            for x in 0..s.input_card(0) {
                for xp in (x + 1)..s.input_card(0) {
                    for y in 0..s.input_card(1) {
                        for yp in (y + 1)..s.input_card(1) {
                            let mut coeffs = BTreeMap::new();
                            coeffs.insert(ix.flat(&[a, b], &[x, y]), T::one());
                            coeffs.insert(ix.flat(&[a, b], &[xp, yp]), T::one());
                            coeffs.insert(ix.flat(&[a, b], &[x, yp]), T::zero() - T::one());
                            coeffs.insert(ix.flat(&[a, b], &[xp, y]), T::zero() - T::one());
                            out.push(LinearConstraint::eq(coeffs, T::zero()));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The equalities that carve the classical polytope out of the regime's NBTS
/// polytope.
///
/// Indefinite timing uses the four-term classicality equalities, which are
/// necessary and sufficient there. With definite timing the classical set is
/// smaller than NBTS ∩ classicality: joint probabilities cannot depend on any
/// input applied after every outcome exists, so parallel timing forces
/// p(a,b|x,y) = p(a,b|0,0) and sequential timing forces independence of the
/// later party's input.
pub fn classical_equalities<T: ExactField>(
    s: &Scenario,
    regime: &TimingRegime,
) -> Result<Vec<LinearConstraint<T>>, BehaviorError> {
    if s.party_count() != 2 {
        return Err(BehaviorError::WrongPartyCount(s.party_count()));
    }
    match regime {
        TimingRegime::Indefinite => classicality_constraints(s),
        TimingRegime::Parallel => Ok(joint_independence(s, &[0, 1])),
        TimingRegime::Sequential(order) => {
            let last = *order.last().expect("two parties");
            Ok(joint_independence(s, &[last]))
        }
    }
}

/// Equalities stating that the joint table is independent of the listed
/// parties' inputs: p(a⃗|x⃗) = p(a⃗|x⃗ with those coordinates zeroed).
fn joint_independence<T: ExactField>(s: &Scenario, parties: &[usize]) -> Vec<LinearConstraint<T>> {
    let ix = CoordinateIndex::new(s.clone());
    let mut out = Vec::new();
    for x in s.each_input() {
        let mut base = x.clone();
        for &p in parties {
            base[p] = 0;
        }
        if base == x {
            continue;
        }
        for a in s.each_output() {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(ix.flat(&a, &x), T::one());
            coeffs.insert(ix.flat(&a, &base), T::zero() - T::one());
            out.push(LinearConstraint::eq(coeffs, T::zero()));
        }
    }
    out
}

/// Number of classicality equalities independent of normalization and the
/// indefinite NBTS conditions, by exact rank. Equals
/// (A−1)(B−1)(X−1)(Y−1) for a two-party scenario.
pub fn count_independent_classicality<T: ExactField>(
    s: &Scenario,
) -> Result<usize, BehaviorError> {
    let cls = classicality_constraints::<T>(s)?;
    let mut base: Vec<LinearConstraint<T>> = normalization_constraints(s);
    base.extend(nbts_constraints(s, &TimingRegime::Indefinite));
    let dim = s.table_len();
    let mut rows: Vec<Vec<T>> = base.iter().map(|c| c.dense(dim)).collect();
    let base_rank = Mat::from_rows(rows.clone()).rank();
    rows.extend(cls.iter().map(|c| c.dense(dim)));
    let full_rank = Mat::from_rows(rows).rank();
    Ok(full_rank - base_rank)
}

/// Assemble the H-representation of a regime's NBTS polytope, optionally
/// intersected with the classical equalities. Inequalities are the positivity
/// box p ≥ 0 (upper bounds are implied by normalization and not emitted).
pub fn build_polytope<T: ExactField>(
    s: &Scenario,
    regime: &TimingRegime,
    classical: bool,
) -> Result<HPolytope<T>, BehaviorError> {
    let dim = s.table_len();
    let mut equalities = normalization_constraints(s);
    equalities.extend(nbts_constraints(s, regime));
    if classical {
        equalities.extend(classical_equalities(s, regime)?);
    }
    let inequalities = (0..dim)
        .map(|i| LinearConstraint::geq([(i, T::one())].into_iter().collect(), T::zero()))
        .collect();
    Ok(HPolytope { ambient_dim: dim, equalities, inequalities })
}
