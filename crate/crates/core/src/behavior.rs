//! Conditional-probability behaviors p(a⃗|x⃗) and the direct condition checks.

use crate::scalar::{ExactField, Scalar, SignedScalar};
use crate::scenario::{CoordinateIndex, Scenario, TimingRegime};
use crate::Q;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BehaviorError {
    #[error("table has {got} entries, scenario needs {want}")]
    TableLength { got: usize, want: usize },
    #[error("negative entry at coordinate {0}")]
    NegativeEntry(usize),
    #[error("block for input tuple {0:?} sums to {1}, expected 1")]
    NotNormalized(Vec<usize>, String),
    #[error("party index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("operation requires exactly 2 parties, scenario has {0}")]
    WrongPartyCount(usize),
    #[error("weights must be nonnegative and sum to 1")]
    WeightError,
    #[error("behaviors belong to different scenarios")]
    ScenarioMismatch,
    #[error("json: {0}")]
    Json(String),
}

/// A behavior: the full table of conditional probabilities over a scenario.
///
/// Stored flat in [`CoordinateIndex`] order. The exact lane (`T = Q`) enforces
/// positivity and exact normalization at construction; the float lane carries
/// whatever the quantum contraction produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior<T = Q> {
    scenario: Scenario,
    index: CoordinateIndex,
    table: Vec<T>,
}

impl<T: Scalar> Behavior<T> {
    /// Build without the exact invariant checks. Used by the float lane and by
    /// internal constructions that are normalized by design.
    pub fn from_raw(scenario: Scenario, table: Vec<T>) -> Result<Self, BehaviorError> {
        let want = scenario.table_len();
        if table.len() != want {
            return Err(BehaviorError::TableLength { got: table.len(), want });
        }
        let index = CoordinateIndex::new(scenario.clone());
        Ok(Self { scenario, index, table })
    }

    /// Build from a closure over (a⃗, x⃗).
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(&[usize], &[usize]) -> T) -> Self {
        let index = CoordinateIndex::new(scenario.clone());
        let mut table = vec![T::zero(); scenario.table_len()];
        for x in scenario.each_input() {
            for a in scenario.each_output() {
                table[index.flat(&a, &x)] = f(&a, &x);
            }
        }
        Self { scenario, index, table }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coordinate_index(&self) -> &CoordinateIndex {
        &self.index
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn into_table(self) -> Vec<T> {
        self.table
    }

    pub fn get(&self, outputs: &[usize], inputs: &[usize]) -> &T {
        &self.table[self.index.flat(outputs, inputs)]
    }

    /// p_i(a_i | x⃗): sum over all other parties' outputs.
    pub fn marginal(&self, party: usize) -> Result<Marginal<T>, BehaviorError> {
        let n = self.scenario.party_count();
        if party >= n {
            return Err(BehaviorError::IndexOutOfRange(party));
        }
        let d = self.scenario.output_card(party);
        let nx = self.scenario.input_tuples();
        let mut values = vec![T::zero(); nx * d];
        for (x_flat, x) in self.scenario.each_input().enumerate() {
            for a in self.scenario.each_output() {
                let v = self.get(&a, &x).clone();
                let slot = x_flat * d + a[party];
                values[slot] = values[slot].clone() + v;
            }
        }
        Ok(Marginal { scenario: self.scenario.clone(), party, values })
    }

    /// Swap the two parties of a two-party behavior.
    pub fn swap_parties(&self) -> Result<Self, BehaviorError> {
        if self.scenario.party_count() != 2 {
            return Err(BehaviorError::WrongPartyCount(self.scenario.party_count()));
        }
        let swapped = Scenario::new(
            vec![self.scenario.output_card(1), self.scenario.output_card(0)],
            vec![self.scenario.input_card(1), self.scenario.input_card(0)],
        )
        .expect("valid scenario");
        Ok(Behavior::from_fn(swapped, |a, x| {
            self.get(&[a[1], a[0]], &[x[1], x[0]]).clone()
        }))
    }
}

impl<T: ExactField> Behavior<T> {
    /// Build and check the full invariants: positivity and exact per-block
    /// normalization.
    pub fn new(scenario: Scenario, table: Vec<T>) -> Result<Self, BehaviorError> {
        let b = Self::from_raw(scenario, table)?;
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), BehaviorError> {
        for (i, v) in self.table.iter().enumerate() {
            if v < &T::zero() {
                return Err(BehaviorError::NegativeEntry(i));
            }
        }
        for x in self.scenario.each_input() {
            let mut sum = T::zero();
            for a in self.scenario.each_output() {
                sum = sum + self.get(&a, &x).clone();
            }
            if !sum.is_one() {
                return Err(BehaviorError::NotNormalized(x, format!("{sum}")));
            }
        }
        Ok(())
    }

    /// The uniform behavior p(a⃗|x⃗) = 1/∏dᵢ, interior to every polytope here.
    pub fn uniform(scenario: &Scenario) -> Self {
        let d = T::from_int(scenario.output_tuples() as i64);
        Behavior::from_fn(scenario.clone(), |_, _| T::one() / d.clone())
    }
}

/// A party's outcome marginal p_i(a_i | x⃗), indexed by full input tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal<T> {
    scenario: Scenario,
    party: usize,
    values: Vec<T>,
}

impl<T: Scalar> Marginal<T> {
    pub fn party(&self) -> usize {
        self.party
    }

    pub fn get(&self, output: usize, inputs: &[usize]) -> &T {
        let mut x_flat = 0;
        for (i, &x) in inputs.iter().enumerate() {
            x_flat = x_flat * self.scenario.input_card(i) + x;
        }
        &self.values[x_flat * self.scenario.output_card(self.party) + output]
    }
}

/// One violated NBTS equality: party `party`'s marginal of `output` differs
/// between the two listed input tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct NbtsViolation<T> {
    pub party: usize,
    pub output: usize,
    pub inputs: Vec<usize>,
    pub inputs_baseline: Vec<usize>,
    pub lhs: T,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbtsReport<T> {
    pub holds: bool,
    pub violations: Vec<NbtsViolation<T>>,
}

/// Zero out, per party, the input coordinates the regime forbids dependence
/// on. Two tuples are regime-equivalent iff they share a baseline.
fn regime_baseline(regime: &TimingRegime, party: usize, n: usize, x: &[usize]) -> Vec<usize> {
    let mut base = x.to_vec();
    for p in regime.forbidden_inputs(party, n) {
        base[p] = 0;
    }
    base
}

/// Check the NBTS conditions of a regime exactly, listing every violated
/// marginal equality (against the canonical baseline input tuple).
pub fn check_nbts<T: ExactField>(b: &Behavior<T>, regime: &TimingRegime) -> NbtsReport<T> {
    let n = b.scenario().party_count();
    let mut violations = Vec::new();
    for party in 0..n {
        let marg = b.marginal(party).expect("party in range");
        for x in b.scenario().each_input() {
            let base = regime_baseline(regime, party, n, &x);
            if base == x {
                continue;
            }
            for a in 0..b.scenario().output_card(party) {
                let lhs = marg.get(a, &x).clone();
                let rhs = marg.get(a, &base).clone();
                if lhs != rhs {
                    violations.push(NbtsViolation {
                        party,
                        output: a,
                        inputs: x.clone(),
                        inputs_baseline: base.clone(),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    NbtsReport { holds: violations.is_empty(), violations }
}

/// Largest |p_i(a|x⃗) − p_i(a|x⃗')| over the regime's marginal equalities.
/// Zero for exact scalars iff `check_nbts` holds; the float lane compares the
/// result against a tolerance.
pub fn nbts_deviation<T: SignedScalar>(b: &Behavior<T>, regime: &TimingRegime) -> T {
    let n = b.scenario().party_count();
    let mut worst = T::zero();
    for party in 0..n {
        let marg = b.marginal(party).expect("party in range");
        for x in b.scenario().each_input() {
            let base = regime_baseline(regime, party, n, &x);
            if base == x {
                continue;
            }
            for a in 0..b.scenario().output_card(party) {
                let d = (marg.get(a, &x).clone() - marg.get(a, &base).clone()).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    worst
}

/// One violated classicality equality
/// p(a,b|x,y) + p(a,b|x',y') = p(a,b|x,y') + p(a,b|x',y).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalityViolation<T> {
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub x_prime: usize,
    pub y: usize,
    pub y_prime: usize,
    pub lhs: T,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalityReport<T> {
    pub holds: bool,
    pub violations: Vec<ClassicalityViolation<T>>,
}

/// Check the two-party classicality equalities exactly, over all outcome pairs
/// and all pairs of distinct inputs on each side.
pub fn check_classicality_equalities<T: ExactField>(
    b: &Behavior<T>,
) -> Result<ClassicalityReport<T>, BehaviorError> {
    let s = b.scenario();
    if s.party_count() != 2 {
        return Err(BehaviorError::WrongPartyCount(s.party_count()));
    }
    let mut violations = Vec::new();
    for a in 0..s.output_card(0) {
        for bb in 0..s.output_card(1) {
            for x in 0..s.input_card(0) {
                for xp in (x + 1)..s.input_card(0) {
                    for y in 0..s.input_card(1) {
                        for yp in (y + 1)..s.input_card(1) {
                            let lhs = b.get(&[a, bb], &[x, y]).clone()
                                + b.get(&[a, bb], &[xp, yp]).clone();
                            let rhs = b.get(&[a, bb], &[x, yp]).clone()
                                + b.get(&[a, bb], &[xp, y]).clone();
                            if lhs != rhs {
                                violations.push(ClassicalityViolation {
                                    a,
                                    b: bb,
                                    x,
                                    x_prime: xp,
                                    y,
                                    y_prime: yp,
                                    lhs,
                                    rhs,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(ClassicalityReport { holds: violations.is_empty(), violations })
}

/// Float-lane counterpart of [`check_classicality_equalities`]: worst
/// |lhs − rhs| over all equality instances.
pub fn classicality_deviation<T: SignedScalar>(b: &Behavior<T>) -> Result<T, BehaviorError> {
    let s = b.scenario();
    if s.party_count() != 2 {
        return Err(BehaviorError::WrongPartyCount(s.party_count()));
    }
    let mut worst = T::zero();
    for a in 0..s.output_card(0) {
        for bb in 0..s.output_card(1) {
            for x in 0..s.input_card(0) {
                for xp in (x + 1)..s.input_card(0) {
                    for y in 0..s.input_card(1) {
                        for yp in (y + 1)..s.input_card(1) {
                            let lhs = b.get(&[a, bb], &[x, y]).clone()
                                + b.get(&[a, bb], &[xp, yp]).clone();
                            let rhs = b.get(&[a, bb], &[x, yp]).clone()
                                + b.get(&[a, bb], &[xp, y]).clone();
                            let d = (lhs - rhs).abs();
                            if d > worst {
                                worst = d;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Exact pointwise convex combination of behaviors over one scenario.
pub fn mix<T: ExactField>(
    behaviors: &[Behavior<T>],
    weights: &[T],
) -> Result<Behavior<T>, BehaviorError> {
    if behaviors.is_empty() || behaviors.len() != weights.len() {
        return Err(BehaviorError::WeightError);
    }
    let mut sum = T::zero();
    for w in weights {
        if w < &T::zero() {
            return Err(BehaviorError::WeightError);
        }
        sum = sum + w.clone();
    }
    if !sum.is_one() {
        return Err(BehaviorError::WeightError);
    }
    let scenario = behaviors[0].scenario().clone();
    if behaviors.iter().any(|b| b.scenario() != &scenario) {
        return Err(BehaviorError::ScenarioMismatch);
    }
    let mut table = vec![T::zero(); scenario.table_len()];
    for (b, w) in behaviors.iter().zip(weights) {
        for (slot, v) in table.iter_mut().zip(b.table()) {
            *slot = slot.clone() + w.clone() * v.clone();
        }
    }
    Behavior::from_raw(scenario, table)
}

// --- JSON wire format -------------------------------------------------------
//
// {"scenario":{"outputs":[2,2],"inputs":[2,2]},
//  "p":[[[["1/2","0"],["0","1/2"]], ...]]}
//
// Nesting: inputs outermost in party order, then outputs in party order
// ([x][y][a][b] for two parties). Rationals are "num/den" strings; bare JSON
// integers are accepted as n/1 on input. Floating-point tokens are rejected.

impl Behavior<Q> {
    pub fn to_json(&self) -> Value {
        let dims: Vec<usize> = self
            .scenario
            .inputs()
            .iter()
            .chain(self.scenario.outputs())
            .copied()
            .collect();
        let leaves: Vec<Value> = self.table.iter().map(crate::rational_to_json).collect();
        json!({
            "scenario": {
                "outputs": self.scenario.outputs(),
                "inputs": self.scenario.inputs(),
            },
            "p": nest(&leaves, &dims),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, BehaviorError> {
        let scen = v
            .get("scenario")
            .ok_or_else(|| BehaviorError::Json("missing \"scenario\"".into()))?;
        let outputs = usize_list(scen.get("outputs"))?;
        let inputs = usize_list(scen.get("inputs"))?;
        let scenario =
            Scenario::new(outputs, inputs).map_err(|e| BehaviorError::Json(e.to_string()))?;
        let p = v.get("p").ok_or_else(|| BehaviorError::Json("missing \"p\"".into()))?;
        let dims: Vec<usize> =
            scenario.inputs().iter().chain(scenario.outputs()).copied().collect();
        let mut leaves = Vec::with_capacity(scenario.table_len());
        flatten(p, &dims, &mut leaves).map_err(BehaviorError::Json)?;
        let table = leaves
            .iter()
            .map(|leaf| crate::parse_rational(leaf).map_err(BehaviorError::Json))
            .collect::<Result<Vec<_>, _>>()?;
        Behavior::new(scenario, table)
    }
}

fn usize_list(v: Option<&Value>) -> Result<Vec<usize>, BehaviorError> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| BehaviorError::Json("expected array of cardinalities".into()))?;
    arr.iter()
        .map(|x| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| BehaviorError::Json(format!("bad cardinality {x}")))
        })
        .collect()
}

fn nest(leaves: &[Value], dims: &[usize]) -> Value {
    if dims.is_empty() {
        return leaves[0].clone();
    }
    let chunk = leaves.len() / dims[0];
    Value::Array(
        (0..dims[0])
            .map(|i| nest(&leaves[i * chunk..(i + 1) * chunk], &dims[1..]))
            .collect(),
    )
}

fn flatten<'v>(v: &'v Value, dims: &[usize], out: &mut Vec<&'v Value>) -> Result<(), String> {
    if dims.is_empty() {
        out.push(v);
        return Ok(());
    }
    let arr = v
        .as_array()
        .ok_or_else(|| format!("expected array of length {}, got {v}", dims[0]))?;
    if arr.len() != dims[0] {
        return Err(format!("expected array of length {}, got {}", dims[0], arr.len()));
    }
    for inner in arr {
        flatten(inner, &dims[1..], out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half;
    use num_traits::{One, Zero};

    fn pr_like(gamma: usize, delta: usize, eps: usize) -> Behavior<Q> {
        Behavior::from_fn(Scenario::binary(), |ab, xy| {
            let (a, b, x, y) = (ab[0], ab[1], xy[0], xy[1]);
            if (a + b) % 2 == ((x ^ gamma) & (y ^ delta)) ^ eps {
                half()
            } else {
                Q::zero()
            }
        })
    }

    fn det_indef(alpha: usize, mu: usize, beta: usize, nu: usize) -> Behavior<Q> {
        Behavior::from_fn(Scenario::binary(), |ab, xy| {
            let (a, b, x, y) = (ab[0], ab[1], xy[0], xy[1]);
            if a == (mu * y + alpha) % 2 && b == (nu * x + beta) % 2 {
                Q::one()
            } else {
                Q::zero()
            }
        })
    }

    #[test]
    fn uniform_marginal_is_half() {
        let u = Behavior::<Q>::uniform(&Scenario::binary());
        let m = u.marginal(0).unwrap();
        for x in u.scenario().each_input() {
            for a in 0..2 {
                assert_eq!(m.get(a, &x), &half());
            }
        }
    }

    #[test]
    fn pr_like_marginal_is_half() {
        let b = pr_like(0, 0, 0);
        b.validate().unwrap();
        let m = b.marginal(0).unwrap();
        for x in b.scenario().each_input() {
            for a in 0..2 {
                assert_eq!(m.get(a, &x), &half());
            }
        }
    }

    #[test]
    fn deterministic_marginal_follows_y() {
        // alpha=0, mu=1, beta=0, nu=0: a = y, b = 0.
        let b = det_indef(0, 1, 0, 0);
        let m = b.marginal(0).unwrap();
        for x in b.scenario().each_input() {
            let y = x[1];
            assert_eq!(m.get(0, &x).clone(), if y == 0 { Q::one() } else { Q::zero() });
            assert_eq!(m.get(1, &x).clone(), if y == 1 { Q::one() } else { Q::zero() });
        }
    }

    #[test]
    fn marginal_resums_to_one() {
        let b = pr_like(1, 0, 1);
        for party in 0..2 {
            let m = b.marginal(party).unwrap();
            for x in b.scenario().each_input() {
                let total: Q = (0..2).map(|a| m.get(a, &x).clone()).sum();
                assert!(total.is_one());
            }
        }
    }

    #[test]
    fn marginal_party_out_of_range() {
        let b = Behavior::<Q>::uniform(&Scenario::binary());
        assert_eq!(b.marginal(2).unwrap_err(), BehaviorError::IndexOutOfRange(2));
    }

    #[test]
    fn nbts_pr_like_indefinite_holds() {
        let r = check_nbts(&pr_like(0, 0, 0), &TimingRegime::Indefinite);
        assert!(r.holds);
        // PR-like marginals are fully uniform, so even parallel holds.
        assert!(check_nbts(&pr_like(0, 0, 0), &TimingRegime::Parallel).holds);
    }

    #[test]
    fn nbts_own_input_copy_fails_at_party_a() {
        // p(a,b|x,y) = [a=x][b=0]: a copies its own later input.
        let b = Behavior::from_fn(Scenario::binary(), |ab, xy| {
            if ab[0] == xy[0] && ab[1] == 0 {
                Q::one()
            } else {
                Q::zero()
            }
        });
        let r = check_nbts(&b, &TimingRegime::Indefinite);
        assert!(!r.holds);
        assert!(r.violations.iter().all(|v| v.party == 0));
    }

    #[test]
    fn nbts_gyni_vertex_by_regime() {
        // mu=nu=1, alpha=beta=0: a = y, b = x.
        let b = det_indef(0, 1, 0, 1);
        assert!(check_nbts(&b, &TimingRegime::Indefinite).holds);
        assert!(!check_nbts(&b, &TimingRegime::Parallel).holds);
        assert!(!check_nbts(&b, &TimingRegime::seq_ab()).holds);
    }

    #[test]
    fn nbts_deviation_matches_report() {
        let good = pr_like(0, 0, 0);
        assert!(nbts_deviation(&good, &TimingRegime::Indefinite).is_zero());
        let bad = det_indef(0, 1, 0, 1);
        assert!(!nbts_deviation(&bad, &TimingRegime::Parallel).is_zero());
    }

    #[test]
    fn classicality_product_holds() {
        let b = Behavior::from_fn(Scenario::binary(), |ab, _| {
            // p_A = (1/2,1/2), p_B = (1/2,1/2) product
            if ab[0] < 2 && ab[1] < 2 {
                Q::new(1.into(), 4.into())
            } else {
                Q::zero()
            }
        });
        assert!(check_classicality_equalities(&b).unwrap().holds);
    }

    #[test]
    fn classicality_pr_like_fails() {
        let r = check_classicality_equalities(&pr_like(0, 0, 0)).unwrap();
        assert!(!r.holds);
        // a=b=0: p(00|00)+p(00|11) = 1/2 + 0 against p(00|01)+p(00|10) = 1.
        let v = r
            .violations
            .iter()
            .find(|v| v.a == 0 && v.b == 0)
            .expect("violation at a=b=0");
        assert_eq!(v.lhs, half());
        assert_eq!(v.rhs, Q::one());
    }

    #[test]
    fn classicality_mixture_of_one_way_vertices_holds() {
        // 1/3 (A->B: a=0, b=x) + 2/3 (B->A: a=1+y mod 2, b=1)
        let ab = det_indef(0, 0, 0, 1);
        let ba = det_indef(1, 1, 1, 0);
        let w = vec![Q::new(1.into(), 3.into()), Q::new(2.into(), 3.into())];
        let m = mix(&[ab, ba], &w).unwrap();
        m.validate().unwrap();
        assert!(check_classicality_equalities(&m).unwrap().holds);
        assert!(check_nbts(&m, &TimingRegime::Indefinite).holds);
    }

    #[test]
    fn classicality_wrong_party_count() {
        let s = Scenario::new(vec![2], vec![2]).unwrap();
        let b = Behavior::<Q>::uniform(&s);
        assert_eq!(
            check_classicality_equalities(&b).unwrap_err(),
            BehaviorError::WrongPartyCount(1)
        );
    }

    #[test]
    fn mix_identity_and_two_point() {
        let v = det_indef(0, 0, 0, 0);
        assert_eq!(mix(&[v.clone()], &[Q::one()]).unwrap(), v);

        let w = det_indef(1, 0, 1, 0);
        let m = mix(&[v, w], &[half(), half()]).unwrap();
        for entry in m.table() {
            assert!(entry.is_zero() || *entry == half() || entry.is_one());
        }
    }

    #[test]
    fn mix_of_all_eight_pr_like_is_uniform() {
        let mut vs = Vec::new();
        for g in 0..2 {
            for d in 0..2 {
                for e in 0..2 {
                    vs.push(pr_like(g, d, e));
                }
            }
        }
        let w = vec![Q::new(1.into(), 8.into()); 8];
        assert_eq!(mix(&vs, &w).unwrap(), Behavior::<Q>::uniform(&Scenario::binary()));
    }

    #[test]
    fn mix_rejects_bad_weights() {
        let v = Behavior::<Q>::uniform(&Scenario::binary());
        assert_eq!(
            mix(&[v.clone(), v.clone()], &[half(), half() + half()]).unwrap_err(),
            BehaviorError::WeightError
        );
        let other = Behavior::<Q>::uniform(&Scenario::two_party(3, 2, 2, 2).unwrap());
        assert_eq!(
            mix(&[v, other], &[half(), half()]).unwrap_err(),
            BehaviorError::ScenarioMismatch
        );
    }

    #[test]
    fn degenerate_scenario_checks_hold_vacuously() {
        let s = Scenario::new(vec![1, 1], vec![1, 1]).unwrap();
        let b = Behavior::<Q>::uniform(&s);
        assert!(check_nbts(&b, &TimingRegime::Indefinite).holds);
        assert!(check_classicality_equalities(&b).unwrap().holds);
    }

    #[test]
    fn json_roundtrip_and_rejections() {
        let b = pr_like(1, 1, 0);
        let v = b.to_json();
        assert_eq!(Behavior::from_json(&v).unwrap(), b);

        // Bare integers accepted as n/1.
        let txt = r#"{"scenario":{"outputs":[2,2],"inputs":[1,1]},
                      "p":[[[[1,0],[0,0]]]]}"#;
        let parsed = Behavior::from_json(&serde_json::from_str(txt).unwrap()).unwrap();
        assert!(parsed.get(&[0, 0], &[0, 0]).is_one());

        // Floats rejected.
        let bad = r#"{"scenario":{"outputs":[2,2],"inputs":[1,1]},
                      "p":[[[[0.5,0.5],[0,0]]]]}"#;
        assert!(Behavior::from_json(&serde_json::from_str(bad).unwrap()).is_err());

        // Non-normalized rejected.
        let bad = r#"{"scenario":{"outputs":[2,2],"inputs":[1,1]},
                      "p":[[[["1/2","1/3"],[0,0]]]]}"#;
        assert!(matches!(
            Behavior::from_json(&serde_json::from_str(bad).unwrap()),
            Err(BehaviorError::NotNormalized(..))
        ));
    }
}
