//! Closed-form generators for every vertex family of the binary polytopes and
//! the general classical one-way families, used as ground truth against
//! enumeration.

use crate::behavior::Behavior;
use crate::scalar::ExactField;
use crate::scenario::Scenario;
use crate::Q;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("family {family} is not defined for scenario {got:?}")]
    UnsupportedScenario { family: String, got: (Vec<usize>, Vec<usize>) },
    #[error("behavior is not deterministic")]
    NotDeterministic,
    #[error("unknown family name {0:?}")]
    UnknownFamily(String),
}

/// The named vertex families. The binary families require the (2,2,2,2)
/// scenario; `ClassicalGeneral` covers any two-party scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexFamily {
    /// a = μy ⊕ α, b = νx ⊕ β: the 16 deterministic extremal behaviors of the
    /// indefinite-timing polytope.
    DetIndefinite,
    /// Uniform on a ⊕ b = (x⊕γ)(y⊕δ) ⊕ ε: the 8 PR-like vertices.
    PrLike,
    /// Deterministic with μ and ν not both one: the 12 classical vertices.
    ClassicalIndefinite,
    /// Constant outputs a = α, b = β: 4 vertices.
    DetParallel,
    /// Uniform on a ⊕ b = αx ⊕ βy ⊕ δ with (α, β) ≠ (0, 0): 6 vertices.
    LinCorrParallel,
    /// a = α, b = βx ⊕ γ (A acts first): 8 vertices.
    DetSequential,
    /// Uniform on a ⊕ b = y ⊕ αx ⊕ β: the 4 correlation vertices that
    /// survive sequential timing.
    LinCorrSequential,
    /// For one of Alice's inputs Bob answers a constant β (a uniform); for the
    /// other the outputs are correlation-locked to Bob's later input,
    /// a ⊕ b = y ⊕ δ. These 8 complete the sequential vertex list: they obey
    /// p_A(a|x,y) = p_A(a) and p_B(b|x,y) = p_B(b|x) yet are not mixtures of
    /// the deterministic, PR-like or linear-correlation vertices.
    HybridSequential,
    /// Deduplicated union of the one-way deterministic families for any
    /// two-party scenario.
    ClassicalGeneral,
}

impl VertexFamily {
    pub const ALL: [VertexFamily; 9] = [
        VertexFamily::DetIndefinite,
        VertexFamily::PrLike,
        VertexFamily::ClassicalIndefinite,
        VertexFamily::DetParallel,
        VertexFamily::LinCorrParallel,
        VertexFamily::DetSequential,
        VertexFamily::LinCorrSequential,
        VertexFamily::HybridSequential,
        VertexFamily::ClassicalGeneral,
    ];

    pub fn cli_name(&self) -> &'static str {
        match self {
            VertexFamily::DetIndefinite => "det-indef",
            VertexFamily::PrLike => "pr-like",
            VertexFamily::ClassicalIndefinite => "classical-indef",
            VertexFamily::DetParallel => "det-par",
            VertexFamily::LinCorrParallel => "lincorr-par",
            VertexFamily::DetSequential => "det-seq",
            VertexFamily::LinCorrSequential => "lincorr-seq",
            VertexFamily::HybridSequential => "hybrid-seq",
            VertexFamily::ClassicalGeneral => "classical-general",
        }
    }

    pub fn from_cli_name(name: &str) -> Result<Self, CatalogError> {
        Self::ALL
            .into_iter()
            .find(|f| f.cli_name() == name)
            .ok_or_else(|| CatalogError::UnknownFamily(name.to_string()))
    }
}

fn require_binary(family: VertexFamily, s: &Scenario) -> Result<(), CatalogError> {
    if s != &Scenario::binary() {
        return Err(CatalogError::UnsupportedScenario {
            family: family.cli_name().to_string(),
            got: (s.outputs().to_vec(), s.inputs().to_vec()),
        });
    }
    Ok(())
}

fn require_two_party(family: VertexFamily, s: &Scenario) -> Result<(), CatalogError> {
    if s.party_count() != 2 {
        return Err(CatalogError::UnsupportedScenario {
            family: family.cli_name().to_string(),
            got: (s.outputs().to_vec(), s.inputs().to_vec()),
        });
    }
    Ok(())
}

fn det_binary<T: ExactField>(f: impl Fn(usize, usize) -> (usize, usize)) -> Behavior<T> {
    Behavior::from_fn(Scenario::binary(), move |ab, xy| {
        let (a, b) = f(xy[0], xy[1]);
        if ab[0] == a && ab[1] == b {
            T::one()
        } else {
            T::zero()
        }
    })
}

fn correlated_binary<T: ExactField>(f: impl Fn(usize, usize) -> usize) -> Behavior<T> {
    let half = T::one() / T::from_int(2);
    Behavior::from_fn(Scenario::binary(), move |ab, xy| {
        if (ab[0] + ab[1]) % 2 == f(xy[0], xy[1]) % 2 {
            half.clone()
        } else {
            T::zero()
        }
    })
}

/// Generate the complete family for the scenario, deduplicated.
pub fn generate<T: ExactField>(
    family: VertexFamily,
    s: &Scenario,
) -> Result<Vec<Behavior<T>>, CatalogError> {
    let mut out: Vec<Behavior<T>> = Vec::new();
    match family {
        VertexFamily::DetIndefinite => {
            require_binary(family, s)?;
            for alpha in 0..2 {
                for mu in 0..2 {
                    for beta in 0..2 {
                        for nu in 0..2 {
                            out.push(det_binary(move |x, y| {
                                ((mu * y + alpha) % 2, (nu * x + beta) % 2)
                            }));
                        }
                    }
                }
            }
        }
        VertexFamily::PrLike => {
            require_binary(family, s)?;
            for gamma in 0..2 {
                for delta in 0..2 {
                    for eps in 0..2 {
                        out.push(correlated_binary(move |x, y| {
                            ((x ^ gamma) & (y ^ delta)) ^ eps
                        }));
                    }
                }
            }
        }
        VertexFamily::ClassicalIndefinite => {
            require_binary(family, s)?;
            for alpha in 0..2 {
                for mu in 0..2 {
                    for beta in 0..2 {
                        for nu in 0..2 {
                            if mu == 1 && nu == 1 {
                                continue;
                            }
                            out.push(det_binary(move |x, y| {
                                ((mu * y + alpha) % 2, (nu * x + beta) % 2)
                            }));
                        }
                    }
                }
            }
        }
        VertexFamily::DetParallel => {
            require_binary(family, s)?;
            for alpha in 0..2 {
                for beta in 0..2 {
                    out.push(det_binary(move |_, _| (alpha, beta)));
                }
            }
        }
        VertexFamily::LinCorrParallel => {
            require_binary(family, s)?;
            for alpha in 0..2 {
                for beta in 0..2 {
                    if alpha == 0 && beta == 0 {
                        continue;
                    }
                    for delta in 0..2 {
                        out.push(correlated_binary(move |x, y| alpha * x + beta * y + delta));
                    }
                }
            }
        }
        VertexFamily::DetSequential => {
            require_binary(family, s)?;
            for alpha in 0..2 {
                for beta in 0..2 {
                    for gamma in 0..2 {
                        out.push(det_binary(move |x, _| (alpha, (beta * x + gamma) % 2)));
                    }
                }
            }
        }
        VertexFamily::LinCorrSequential => {
            require_binary(family, s)?;
            for alpha in 0..2 {
                for beta in 0..2 {
                    out.push(correlated_binary(move |x, y| y + alpha * x + beta));
                }
            }
        }
        VertexFamily::HybridSequential => {
            require_binary(family, s)?;
            for x0 in 0..2usize {
                for beta in 0..2usize {
                    for delta in 0..2usize {
                        let h = T::one() / T::from_int(2);
                        out.push(Behavior::from_fn(Scenario::binary(), move |ab, xy| {
                            let hit = if xy[0] == x0 {
                                ab[1] == beta
                            } else {
                                (ab[0] + ab[1]) % 2 == (xy[1] + delta) % 2
                            };
                            if hit {
                                h.clone()
                            } else {
                                T::zero()
                            }
                        }));
                    }
                }
            }
        }
        VertexFamily::ClassicalGeneral => {
            require_two_party(family, s)?;
            for v in classical_vertices(s) {
                out.push(v.to_behavior(s));
            }
        }
    }
    dedup_behaviors(&mut out);
    Ok(out)
}

fn dedup_behaviors<T: ExactField>(behaviors: &mut Vec<Behavior<T>>) {
    let mut seen: Vec<Behavior<T>> = Vec::new();
    behaviors.retain(|b| {
        if seen.contains(b) {
            false
        } else {
            seen.push(b.clone());
            true
        }
    });
}

/// Deterministic one-way classical vertex: the three families of the general
/// classical polytope. `BothConst` is the overlap of the other two and is kept
/// as its own tag because the decomposition procedure distinguishes it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClassicalVertex {
    /// a = alpha, b = beta for every input.
    BothConst { alpha: usize, beta: usize },
    /// Alice acts first: a = alpha, b = beta_x[x].
    ABeforeB { alpha: usize, beta_x: Vec<usize> },
    /// Bob acts first: a = alpha_y[y], b = beta.
    BBeforeA { alpha_y: Vec<usize>, beta: usize },
}

impl ClassicalVertex {
    /// The deterministic outputs at input (x, y).
    pub fn outputs_at(&self, x: usize, y: usize) -> (usize, usize) {
        match self {
            ClassicalVertex::BothConst { alpha, beta } => (*alpha, *beta),
            ClassicalVertex::ABeforeB { alpha, beta_x } => (*alpha, beta_x[x]),
            ClassicalVertex::BBeforeA { alpha_y, beta } => (alpha_y[y], *beta),
        }
    }

    pub fn to_behavior<T: ExactField>(&self, s: &Scenario) -> Behavior<T> {
        Behavior::from_fn(s.clone(), |ab, xy| {
            let (a, b) = self.outputs_at(xy[0], xy[1]);
            if ab[0] == a && ab[1] == b {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            ClassicalVertex::BothConst { alpha, beta } => {
                json!({"family": "both_const", "alpha": alpha, "beta": beta})
            }
            ClassicalVertex::ABeforeB { alpha, beta_x } => {
                json!({"family": "A_before_B", "alpha": alpha, "beta_x": beta_x})
            }
            ClassicalVertex::BBeforeA { alpha_y, beta } => {
                json!({"family": "B_before_A", "alpha_y": alpha_y, "beta": beta})
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let family = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or("vertex missing \"family\"")?;
        let get_usize = |key: &str| -> Result<usize, String> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|u| u as usize)
                .ok_or_else(|| format!("vertex missing \"{key}\""))
        };
        let get_list = |key: &str| -> Result<Vec<usize>, String> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| format!("vertex missing \"{key}\""))?
                .iter()
                .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| format!("bad {key}")))
                .collect()
        };
        match family {
            "both_const" => Ok(ClassicalVertex::BothConst {
                alpha: get_usize("alpha")?,
                beta: get_usize("beta")?,
            }),
            "A_before_B" => Ok(ClassicalVertex::ABeforeB {
                alpha: get_usize("alpha")?,
                beta_x: get_list("beta_x")?,
            }),
            "B_before_A" => Ok(ClassicalVertex::BBeforeA {
                alpha_y: get_list("alpha_y")?,
                beta: get_usize("beta")?,
            }),
            other => Err(format!("unknown vertex family {other:?}")),
        }
    }
}

/// All classical vertices of a two-party scenario, as descriptors,
/// deduplicated across the overlapping families (a one-way vertex with a
/// constant dependent output is canonicalized to `BothConst`).
pub fn classical_vertices(s: &Scenario) -> Vec<ClassicalVertex> {
    assert_eq!(s.party_count(), 2);
    let (da, db) = (s.output_card(0), s.output_card(1));
    let (mx, my) = (s.input_card(0), s.input_card(1));
    let mut out = Vec::new();
    for alpha in 0..da {
        for beta in 0..db {
            out.push(ClassicalVertex::BothConst { alpha, beta });
        }
    }
    for alpha in 0..da {
        for beta_x in Scenario::new(vec![db; mx], vec![1; mx]).unwrap().each_output() {
            if beta_x.iter().all(|&b| b == beta_x[0]) {
                continue; // already listed as BothConst
            }
            out.push(ClassicalVertex::ABeforeB { alpha, beta_x });
        }
    }
    for beta in 0..db {
        for alpha_y in Scenario::new(vec![da; my], vec![1; my]).unwrap().each_output() {
            if alpha_y.iter().all(|&a| a == alpha_y[0]) {
                continue;
            }
            out.push(ClassicalVertex::BBeforeA { alpha_y, beta });
        }
    }
    out
}

/// True iff the behavior is the guess-your-neighbour's-input deterministic
/// strategy a = y ⊕ α, b = x ⊕ β (both outputs copy the other party's later
/// input, up to relabeling).
pub fn is_gyni_vertex(b: &Behavior<Q>) -> Result<bool, CatalogError> {
    let s = b.scenario();
    if s != &Scenario::binary() {
        return Err(CatalogError::UnsupportedScenario {
            family: "gyni".to_string(),
            got: (s.outputs().to_vec(), s.inputs().to_vec()),
        });
    }
    // Extract the deterministic output map, rejecting non-deterministic input.
    let mut outputs = [[None; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for bb in 0..2 {
                    let p = b.get(&[a, bb], &[x, y]);
                    if p.is_one() {
                        outputs[x][y] = Some((a, bb));
                    } else if !p.is_zero() {
                        return Err(CatalogError::NotDeterministic);
                    }
                }
            }
        }
    }
    let table: Vec<(usize, usize)> = (0..2)
        .flat_map(|x| (0..2).map(move |y| (x, y)))
        .map(|(x, y)| outputs[x][y].ok_or(CatalogError::NotDeterministic))
        .collect::<Result<_, _>>()?;
    let (alpha, beta) = {
        let (a00, b00) = table[0];
        (a00, b00)
    };
    let ok = (0..2).all(|x| {
        (0..2).all(|y| {
            let (a, bb) = table[x * 2 + y];
            a == (y + alpha) % 2 && bb == (x + beta) % 2
        })
    });
    Ok(ok)
}
