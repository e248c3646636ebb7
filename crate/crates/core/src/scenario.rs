//! Scenarios, timing regimes, and the flat coordinatization of behavior space.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("all cardinalities must be >= 1")]
    ZeroCardinality,
    #[error("outputs and inputs must list one cardinality per party")]
    LengthMismatch,
    #[error("need at least one party")]
    NoParties,
    #[error("sequential order must be a permutation of the parties")]
    BadOrder,
    #[error("party index {0} out of range")]
    IndexOutOfRange(usize),
}

/// A multi-party measurement scenario: per-party output and input
/// cardinalities. For two parties the paper's (A, B, X, Y) is
/// (outputs[0], outputs[1], inputs[0], inputs[1]).
///
/// Cardinality-1 entries are degenerate but legal; every condition holds
/// vacuously on the missing freedom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    outputs: Vec<usize>,
    inputs: Vec<usize>,
}

impl Scenario {
    pub fn new(outputs: Vec<usize>, inputs: Vec<usize>) -> Result<Self, ScenarioError> {
        if outputs.is_empty() {
            return Err(ScenarioError::NoParties);
        }
        if outputs.len() != inputs.len() {
            return Err(ScenarioError::LengthMismatch);
        }
        if outputs.iter().chain(&inputs).any(|&c| c == 0) {
            return Err(ScenarioError::ZeroCardinality);
        }
        Ok(Self { outputs, inputs })
    }

    /// Two-party scenario with outputs (a, b) and inputs (x, y).
    pub fn two_party(a: usize, b: usize, x: usize, y: usize) -> Result<Self, ScenarioError> {
        Self::new(vec![a, b], vec![x, y])
    }

    /// The binary two-party scenario of the closed-form vertex families.
    pub fn binary() -> Self {
        Self::two_party(2, 2, 2, 2).unwrap()
    }

    pub fn party_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn output_card(&self, party: usize) -> usize {
        self.outputs[party]
    }

    pub fn input_card(&self, party: usize) -> usize {
        self.inputs[party]
    }

    /// Number of joint output tuples.
    pub fn output_tuples(&self) -> usize {
        self.outputs.iter().product()
    }

    /// Number of joint input tuples.
    pub fn input_tuples(&self) -> usize {
        self.inputs.iter().product()
    }

    /// Ambient dimension of behavior space: one coordinate per (a⃗, x⃗).
    pub fn table_len(&self) -> usize {
        self.output_tuples() * self.input_tuples()
    }

    /// All input tuples in lexicographic order, party 0 outermost.
    pub fn each_input(&self) -> TupleIter {
        TupleIter::new(self.inputs.clone())
    }

    /// All output tuples in lexicographic order, party 0 outermost.
    pub fn each_output(&self) -> TupleIter {
        TupleIter::new(self.outputs.clone())
    }
}

/// Lexicographic iterator over mixed-radix tuples.
pub struct TupleIter {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl TupleIter {
    fn new(radices: Vec<usize>) -> Self {
        let next = Some(vec![0; radices.len()]);
        Self { radices, next }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut bump = current.clone();
        for i in (0..bump.len()).rev() {
            bump[i] += 1;
            if bump[i] < self.radices[i] {
                self.next = Some(bump);
                return Some(current);
            }
            bump[i] = 0;
        }
        Some(current)
    }
}

/// Relative-timing knowledge between the laboratories. Selects which NBTS
/// equalities apply.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TimingRegime {
    /// No knowledge of relative timing: each party's marginal must be
    /// independent of that party's own input only.
    Indefinite,
    /// All actions happen in parallel: every marginal is independent of the
    /// entire input tuple.
    Parallel,
    /// A known total order of the laboratories (`order[k]` = party acting at
    /// position k). A party's marginal must be independent of its own input
    /// and of the inputs of every later party.
    Sequential(Vec<usize>),
}

impl TimingRegime {
    /// The standard two-party orders.
    pub fn seq_ab() -> Self {
        TimingRegime::Sequential(vec![0, 1])
    }

    pub fn seq_ba() -> Self {
        TimingRegime::Sequential(vec![1, 0])
    }

    pub fn validate(&self, party_count: usize) -> Result<(), ScenarioError> {
        match self {
            TimingRegime::Indefinite | TimingRegime::Parallel => Ok(()),
            TimingRegime::Sequential(order) => {
                let mut seen = vec![false; party_count];
                if order.len() != party_count {
                    return Err(ScenarioError::BadOrder);
                }
                for &p in order {
                    if p >= party_count || seen[p] {
                        return Err(ScenarioError::BadOrder);
                    }
                    seen[p] = true;
                }
                Ok(())
            }
        }
    }

    /// Parties whose inputs the marginal of `party` must not depend on.
    ///
    /// The sequential rule for more than two parties ("own input and all later
    /// inputs") is our specialization; the two-party case is the paper's.
    pub fn forbidden_inputs(&self, party: usize, party_count: usize) -> Vec<usize> {
        match self {
            TimingRegime::Indefinite => vec![party],
            TimingRegime::Parallel => (0..party_count).collect(),
            TimingRegime::Sequential(order) => {
                let pos = order.iter().position(|&p| p == party).expect("valid order");
                order[pos..].to_vec()
            }
        }
    }
}

impl std::fmt::Display for TimingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimingRegime::Indefinite => write!(f, "indefinite"),
            TimingRegime::Parallel => write!(f, "parallel"),
            TimingRegime::Sequential(order) => {
                write!(f, "seq:")?;
                for &p in order {
                    let c = (b'A' + (p as u8 % 26)) as char;
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Bijection between (a⃗, x⃗) pairs and flat coordinates 0..D−1.
///
/// Ordering is lexicographic with inputs outermost in party order, then
/// outputs in party order; this matches the nested-array JSON layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateIndex {
    scenario: Scenario,
}

impl CoordinateIndex {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn dim(&self) -> usize {
        self.scenario.table_len()
    }

    pub fn flat(&self, outputs: &[usize], inputs: &[usize]) -> usize {
        debug_assert_eq!(outputs.len(), self.scenario.party_count());
        debug_assert_eq!(inputs.len(), self.scenario.party_count());
        let mut idx = 0;
        for (i, &x) in inputs.iter().enumerate() {
            debug_assert!(x < self.scenario.inputs[i]);
            idx = idx * self.scenario.inputs[i] + x;
        }
        for (i, &a) in outputs.iter().enumerate() {
            debug_assert!(a < self.scenario.outputs[i]);
            idx = idx * self.scenario.outputs[i] + a;
        }
        idx
    }

    pub fn unflat(&self, mut idx: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.scenario.party_count();
        let mut outputs = vec![0; n];
        let mut inputs = vec![0; n];
        for i in (0..n).rev() {
            outputs[i] = idx % self.scenario.outputs[i];
            idx /= self.scenario.outputs[i];
        }
        for i in (0..n).rev() {
            inputs[i] = idx % self.scenario.inputs[i];
            idx /= self.scenario.inputs[i];
        }
        (outputs, inputs)
    }
}
