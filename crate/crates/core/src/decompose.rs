//! Constructive decomposition of classical behaviors into one-way vertices.
//!
//! The procedure peels off, at every step, the smallest nonzero table entry ε
//! times a deterministic one-way vertex, chosen so that the remainder stays a
//! valid behavior satisfying the same conditions and gains at least one new
//! zero entry. Termination within d²m² steps follows because zeros never
//! reappear.

use crate::behavior::{check_classicality_equalities, check_nbts, Behavior, BehaviorError};
use crate::catalog::ClassicalVertex;
use crate::scenario::{Scenario, TimingRegime};
use crate::Q;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DecomposeError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("scenario mismatch between decomposition and target")]
    ScenarioMismatch,
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

/// Which of the three admissible support patterns the peel step hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeelCase {
    /// p(a*,b*|x,y*) and p(a*,b*|x*,y) nonzero for all x, y: peel a
    /// both-constant vertex.
    I,
    /// Some p(a*,b*|x*,y) vanishes: peel a Bob-first vertex a = a_y, b = b*.
    Ii,
    /// Some p(a*,b*|x,y*) vanishes: peel an Alice-first vertex a = a*, b = b_x.
    Iii,
}

impl std::fmt::Display for PeelCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PeelCase::I => write!(f, "i"),
            PeelCase::Ii => write!(f, "ii"),
            PeelCase::Iii => write!(f, "iii"),
        }
    }
}

/// Diagnostic record of one peel step.
#[derive(Debug, Clone, PartialEq)]
pub struct PeelStep {
    pub step: usize,
    /// Location (a*, b*, x*, y*) of the smallest nonzero probability.
    pub at: (usize, usize, usize, usize),
    /// The smallest nonzero probability at the start of the step.
    pub epsilon: Q,
    pub case: PeelCase,
    pub vertex: ClassicalVertex,
}

impl PeelStep {
    pub fn to_json(&self) -> Value {
        let (a, b, x, y) = self.at;
        json!({
            "step": self.step,
            "at": {"a": a, "b": b, "x": x, "y": y},
            "epsilon": crate::rational_to_json(&self.epsilon),
            "case": self.case.to_string(),
            "vertex": self.vertex.to_json(),
        })
    }
}

/// Convex combination of classical vertices, weights exactly summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDecomposition {
    pub terms: Vec<(Q, ClassicalVertex)>,
}

impl ConvexDecomposition {
    pub fn to_json(&self, trace: Option<&[PeelStep]>) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(w, v)| json!({"w": crate::rational_to_json(w), "vertex": v.to_json()}))
            .collect();
        match trace {
            Some(steps) => json!({
                "terms": terms,
                "trace": steps.iter().map(PeelStep::to_json).collect::<Vec<_>>(),
            }),
            None => json!({ "terms": terms }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or("missing \"terms\"")?
            .iter()
            .map(|t| {
                let w = crate::parse_rational(t.get("w").ok_or("term missing \"w\"")?)?;
                let vertex =
                    ClassicalVertex::from_json(t.get("vertex").ok_or("term missing \"vertex\"")?)?;
                Ok((w, vertex))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Self { terms })
    }
}

/// Exact weighted sum of the decomposition's vertex tables.
pub fn recompose(d: &ConvexDecomposition, s: &Scenario) -> Result<Behavior<Q>, DecomposeError> {
    if s.party_count() != 2 {
        return Err(DecomposeError::ScenarioMismatch);
    }
    for (_, v) in &d.terms {
        let fits = match v {
            ClassicalVertex::BothConst { alpha, beta } => {
                *alpha < s.output_card(0) && *beta < s.output_card(1)
            }
            ClassicalVertex::ABeforeB { alpha, beta_x } => {
                *alpha < s.output_card(0)
                    && beta_x.len() == s.input_card(0)
                    && beta_x.iter().all(|&b| b < s.output_card(1))
            }
            ClassicalVertex::BBeforeA { alpha_y, beta } => {
                *beta < s.output_card(1)
                    && alpha_y.len() == s.input_card(1)
                    && alpha_y.iter().all(|&a| a < s.output_card(0))
            }
        };
        if !fits {
            return Err(DecomposeError::ScenarioMismatch);
        }
    }
    let behaviors: Vec<Behavior<Q>> = d.terms.iter().map(|(_, v)| v.to_behavior(s)).collect();
    let weights: Vec<Q> = d.terms.iter().map(|(w, _)| w.clone()).collect();
    crate::behavior::mix(&behaviors, &weights).map_err(DecomposeError::from)
}

/// Decompose a behavior satisfying NBTS (indefinite), normalization and the
/// classicality equalities into an explicit convex combination of classical
/// vertices, with the full step trace.
///
/// The preconditions are always verified first; on valid input the fourth
/// support pattern (vanishing entries in both the x and the y line) and a
/// failed vertex search are impossible, so hitting either reports an internal
/// contradiction rather than a decomposition.
pub fn decompose(
    b: &Behavior<Q>,
) -> Result<(ConvexDecomposition, Vec<PeelStep>), DecomposeError> {
    let s = b.scenario().clone();
    if s.party_count() != 2 {
        return Err(DecomposeError::PreconditionFailed(format!(
            "need exactly 2 parties, got {}",
            s.party_count()
        )));
    }
    b.validate().map_err(|e| DecomposeError::PreconditionFailed(e.to_string()))?;
    if !check_nbts(b, &TimingRegime::Indefinite).holds {
        return Err(DecomposeError::PreconditionFailed(
            "NBTS (indefinite) conditions violated".to_string(),
        ));
    }
    if !check_classicality_equalities(b)
        .map_err(|e| DecomposeError::PreconditionFailed(e.to_string()))?
        .holds
    {
        return Err(DecomposeError::PreconditionFailed(
            "classicality equalities violated".to_string(),
        ));
    }

    let (da, db) = (s.output_card(0), s.output_card(1));
    let (mx, my) = (s.input_card(0), s.input_card(1));
    let bound = da * db * mx * my;

    let mut rest = b.clone();
    let mut remaining_weight = Q::one();
    let mut terms: Vec<(Q, ClassicalVertex)> = Vec::new();
    let mut trace: Vec<PeelStep> = Vec::new();

    for step in 0.. {
        if step > bound {
            return Err(DecomposeError::InternalContradiction(format!(
                "no termination within {bound} steps"
            )));
        }

        // Smallest nonzero entry; ties broken by lexicographically smallest
        // (x*, y*, a*, b*).
        let mut smallest: Option<((usize, usize, usize, usize), Q)> = None;
        for x in 0..mx {
            for y in 0..my {
                for a in 0..da {
                    for bb in 0..db {
                        let p = rest.get(&[a, bb], &[x, y]);
                        if p.is_zero() {
                            continue;
                        }
                        if smallest.as_ref().is_none_or(|(_, best)| p < best) {
                            smallest = Some(((a, bb, x, y), p.clone()));
                        }
                    }
                }
            }
        }
        let Some(((a_star, b_star, x_star, y_star), eps)) = smallest else {
            return Err(DecomposeError::InternalContradiction(
                "normalized behavior with no nonzero entry".to_string(),
            ));
        };

        let x_zero: Vec<usize> = (0..mx)
            .filter(|&x| x != x_star && rest.get(&[a_star, b_star], &[x, y_star]).is_zero())
            .collect();
        let y_zero: Vec<usize> = (0..my)
            .filter(|&y| y != y_star && rest.get(&[a_star, b_star], &[x_star, y]).is_zero())
            .collect();

        let (case, vertex) = match (x_zero.is_empty(), y_zero.is_empty()) {
            (true, true) => {
                (PeelCase::I, ClassicalVertex::BothConst { alpha: a_star, beta: b_star })
            }
            (true, false) => {
                // For every y some a_y has p(a_y, b*|x, y) >= eps for all x;
                // at y* the choice must be a* itself so the minimal entry is
                // consumed.
                let mut alpha_y = Vec::with_capacity(my);
                for y in 0..my {
                    if y == y_star {
                        alpha_y.push(a_star);
                        continue;
                    }
                    let found = (0..da).find(|&a| {
                        (0..mx).all(|x| rest.get(&[a, b_star], &[x, y]) >= &eps)
                    });
                    match found {
                        Some(a) => alpha_y.push(a),
                        None => {
                            return Err(DecomposeError::InternalContradiction(format!(
                                "case ii: no admissible output for y={y}"
                            )))
                        }
                    }
                }
                (PeelCase::Ii, ClassicalVertex::BBeforeA { alpha_y, beta: b_star })
            }
            (false, true) => {
                let mut beta_x = Vec::with_capacity(mx);
                for x in 0..mx {
                    if x == x_star {
                        beta_x.push(b_star);
                        continue;
                    }
                    let found = (0..db).find(|&bb| {
                        (0..my).all(|y| rest.get(&[a_star, bb], &[x, y]) >= &eps)
                    });
                    match found {
                        Some(bb) => beta_x.push(bb),
                        None => {
                            return Err(DecomposeError::InternalContradiction(format!(
                                "case iii: no admissible output for x={x}"
                            )))
                        }
                    }
                }
                (PeelCase::Iii, ClassicalVertex::ABeforeB { alpha: a_star, beta_x })
            }
            (false, false) => {
                return Err(DecomposeError::InternalContradiction(
                    "case iv reached: zeros in both the x and y line".to_string(),
                ))
            }
        };

        trace.push(PeelStep {
            step,
            at: (a_star, b_star, x_star, y_star),
            epsilon: eps.clone(),
            case,
            vertex: vertex.clone(),
        });

        if eps.is_one() {
            terms.push((remaining_weight, vertex.clone()));
            let v = vertex.to_behavior::<Q>(&s);
            if rest != v {
                return Err(DecomposeError::InternalContradiction(
                    "epsilon = 1 but remainder is not the selected vertex".to_string(),
                ));
            }
            break;
        }

        terms.push((remaining_weight.clone() * eps.clone(), vertex.clone()));

        // rest := (rest − eps · vertex) / (1 − eps)
        let one_minus = Q::one() - eps.clone();
        let mut table = rest.into_table();
        let ix = crate::scenario::CoordinateIndex::new(s.clone());
        for x in 0..mx {
            for y in 0..my {
                let (a, bb) = vertex.outputs_at(x, y);
                let slot = ix.flat(&[a, bb], &[x, y]);
                table[slot] = table[slot].clone() - eps.clone();
            }
        }
        for v in &mut table {
            *v = v.clone() / one_minus.clone();
            if *v < Q::zero() {
                return Err(DecomposeError::InternalContradiction(
                    "remainder went negative".to_string(),
                ));
            }
        }
        rest = Behavior::from_raw(s.clone(), table)?;
        if !rest.get(&[a_star, b_star], &[x_star, y_star]).is_zero() {
            return Err(DecomposeError::InternalContradiction(
                "peel did not zero the minimal entry".to_string(),
            ));
        }
        remaining_weight *= one_minus;
    }

    Ok((ConvexDecomposition { terms }, trace))
}
