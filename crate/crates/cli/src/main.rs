//! Command-line front end: every computation of the toolkit with JSON I/O.
//!
//! Exit codes: 0 on success, 1 on domain errors (reported as structured JSON
//! on stderr), 2 on usage errors.

mod qstate;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nbts_core::behavior::{check_classicality_equalities, check_nbts};
use nbts_core::catalog::{generate, VertexFamily};
use nbts_core::constraints::build_polytope;
use nbts_core::decompose::decompose;
use nbts_core::polytope::{
    affine_dimension, contains, enumerate_vertices, MembershipCertificate,
};
use nbts_core::scenario::{Scenario, TimingRegime};
use nbts_core::{Behavior, Q};
use serde_json::{json, Value};
use std::io::Read;

#[derive(Parser)]
#[command(name = "nbts", about = "No-backwards-in-time-signalling polytopes and two-time states", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PolytopeSelector {
    /// Scenario as outputs-then-inputs, e.g. 2,2,2,2 for (A,B,X,Y)
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Timing regime: indefinite | parallel | seq:AB | seq:BA
    #[arg(long, value_parser = parse_regime)]
    regime: Option<TimingRegime>,
    /// Intersect with the regime's classical equalities
    #[arg(long)]
    classical: bool,
    /// Explicit H-polytope JSON file (overrides scenario/regime)
    #[arg(long)]
    hpoly: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the vertices of a polytope exactly
    Vertices {
        #[command(flatten)]
        sel: PolytopeSelector,
        /// Emit one vertex per line instead of a single JSON document
        #[arg(long)]
        stream: bool,
    },
    /// Affine dimension of a polytope
    Dim {
        #[command(flatten)]
        sel: PolytopeSelector,
    },
    /// Decide membership of a behavior (stdin JSON), with certificate
    Member {
        #[command(flatten)]
        sel: PolytopeSelector,
    },
    /// Decompose a classical behavior (stdin JSON) into one-way vertices
    Decompose {
        /// Include the per-step peeling trace
        #[arg(long)]
        trace: bool,
    },
    /// Check the NBTS marginal equalities of a behavior (stdin JSON)
    NbtsCheck {
        /// Timing regime: indefinite | parallel | seq:AB | seq:BA
        #[arg(long, value_parser = parse_regime, default_value = "indefinite")]
        regime: TimingRegime,
    },
    /// Check the two-party classicality equalities of a behavior (stdin JSON)
    ClassicalCheck,
    /// Print a closed-form vertex family
    Catalog {
        /// Family name (det-indef, pr-like, classical-indef, det-par,
        /// lincorr-par, det-seq, lincorr-seq, hybrid-seq, classical-general)
        #[arg(long)]
        family: String,
        #[arg(long, value_parser = parse_scenario, default_value = "2,2,2,2")]
        scenario: Scenario,
        /// Print flat coordinate vectors instead of behavior tables
        #[arg(long)]
        points: bool,
    },
    /// Reproduce the summary table of dimensions and vertex counts
    Table {
        #[arg(long, value_parser = parse_scenario, default_value = "2,2,2,2")]
        scenario: Scenario,
    },
    /// Independent classicality equalities beyond normalization and NBTS
    EqualityCount {
        #[arg(long, value_parser = parse_scenario)]
        scenario: Scenario,
    },
    /// Signalling analysis of a two-time state (stdin tensor JSON)
    QstateNbts {
        /// Tolerance for all floating-point checks
        #[arg(long, default_value_t = nbts_twotime::DEFAULT_TOL)]
        tol: f64,
    },
    /// Linearity conditions of a two-party two-time state (stdin tensor JSON)
    QstateLinear {
        #[arg(long, default_value_t = nbts_twotime::DEFAULT_TOL)]
        tol: f64,
    },
    /// Behavior generated by a two-time state under local strategies
    QstateBehavior {
        /// Strategy description JSON file
        #[arg(long)]
        strategies: std::path::PathBuf,
        #[arg(long, default_value_t = nbts_twotime::DEFAULT_TOL)]
        tol: f64,
        /// Largest denominator for the rationalized table
        #[arg(long, default_value_t = 1_000_000)]
        max_den: u64,
        /// Equality span for the exact projection:
        /// normalization | nbts | classical
        #[arg(long, default_value = "classical")]
        project: String,
    },
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    let nums: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad cardinality {t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if nums.is_empty() || !nums.len().is_multiple_of(2) {
        return Err("expected an even list: outputs then inputs (d1,..,dN,m1,..,mN)".into());
    }
    let n = nums.len() / 2;
    Scenario::new(nums[..n].to_vec(), nums[n..].to_vec()).map_err(|e| e.to_string())
}

fn parse_regime(s: &str) -> Result<TimingRegime, String> {
    match s {
        "indefinite" => Ok(TimingRegime::Indefinite),
        "parallel" => Ok(TimingRegime::Parallel),
        "seq:AB" | "seq:ab" => Ok(TimingRegime::seq_ab()),
        "seq:BA" | "seq:ba" => Ok(TimingRegime::seq_ba()),
        other => Err(format!(
            "unknown regime {other:?} (expected indefinite, parallel, seq:AB or seq:BA)"
        )),
    }
}

fn read_stdin_json() -> Result<Value> {
    let mut buf = String::new();
    std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
    serde_json::from_str(&buf).context("parsing stdin as JSON")
}

fn read_behavior_stdin() -> Result<Behavior> {
    Behavior::from_json(&read_stdin_json()?).map_err(|e| anyhow!("invalid behavior: {e}"))
}

fn selected_polytope(sel: &PolytopeSelector) -> Result<nbts_core::HPolytope<Q>> {
    if let Some(path) = &sel.hpoly {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let v: Value = serde_json::from_str(&text).context("parsing H-polytope JSON")?;
        return nbts_core::HPolytope::from_json(&v).map_err(|e| anyhow!("invalid H-polytope: {e}"));
    }
    let scenario = sel
        .scenario
        .clone()
        .ok_or_else(|| anyhow!("either --scenario/--regime or --hpoly is required"))?;
    let regime = sel.regime.clone().unwrap_or(TimingRegime::Indefinite);
    regime.validate(scenario.party_count()).map_err(|e| anyhow!("{e}"))?;
    build_polytope(&scenario, &regime, sel.classical).map_err(|e| anyhow!("{e}"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Vertices { sel, stream } => {
            let h = selected_polytope(&sel)?;
            let v = enumerate_vertices(&h)?;
            if stream {
                for vert in &v.vertices {
                    let row: Vec<Value> =
                        vert.iter().map(nbts_core::rational_to_json).collect();
                    println!("{}", Value::Array(row));
                }
            } else {
                println!("{}", serde_json::to_string_pretty(&v.to_json())?);
            }
        }
        Command::Dim { sel } => {
            let h = selected_polytope(&sel)?;
            let dim = affine_dimension(&h)?;
            println!("{}", json!({"ambient_dim": h.ambient_dim, "dim": dim}));
        }
        Command::Member { sel } => {
            let b = read_behavior_stdin()?;
            let h = selected_polytope(&sel)?;
            if b.table().len() != h.ambient_dim {
                bail!("behavior has {} coordinates, polytope {}", b.table().len(), h.ambient_dim);
            }
            let v = enumerate_vertices(&h)?;
            let cert = contains(&h, Some(&v), b.table())?;
            println!("{}", serde_json::to_string_pretty(&certificate_json(&cert))?);
        }
        Command::Decompose { trace } => {
            let b = read_behavior_stdin()?;
            let (dec, steps) = decompose(&b)?;
            let out = dec.to_json(trace.then_some(steps.as_slice()));
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::NbtsCheck { regime } => {
            let b = read_behavior_stdin()?;
            regime.validate(b.scenario().party_count()).map_err(|e| anyhow!("{e}"))?;
            let report = check_nbts(&b, &regime);
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "party": v.party,
                        "output": v.output,
                        "inputs": v.inputs,
                        "inputs_baseline": v.inputs_baseline,
                        "lhs": nbts_core::rational_to_json(&v.lhs),
                        "rhs": nbts_core::rational_to_json(&v.rhs),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "regime": regime.to_string(),
                    "holds": report.holds,
                    "violations": violations,
                }))?
            );
        }
        Command::ClassicalCheck => {
            let b = read_behavior_stdin()?;
            let report = check_classicality_equalities(&b)?;
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "a": v.a, "b": v.b,
                        "x": v.x, "x_prime": v.x_prime,
                        "y": v.y, "y_prime": v.y_prime,
                        "lhs": nbts_core::rational_to_json(&v.lhs),
                        "rhs": nbts_core::rational_to_json(&v.rhs),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "holds": report.holds,
                    "violations": violations,
                }))?
            );
        }
        Command::Catalog { family, scenario, points } => {
            let fam = VertexFamily::from_cli_name(&family)?;
            let behaviors = generate::<Q>(fam, &scenario)?;
            let out: Vec<Value> = if points {
                behaviors
                    .iter()
                    .map(|b| {
                        Value::Array(b.table().iter().map(nbts_core::rational_to_json).collect())
                    })
                    .collect()
            } else {
                behaviors.iter().map(Behavior::to_json).collect()
            };
            println!("{}", serde_json::to_string_pretty(&Value::Array(out))?);
        }
        Command::Table { scenario } => {
            let all_pass = print_table(&scenario)?;
            if !all_pass {
                bail!("table reproduction mismatch (see diffs above)");
            }
        }
        Command::EqualityCount { scenario } => {
            let count = nbts_core::constraints::count_independent_classicality::<Q>(&scenario)?;
            let f = |n: usize| n.saturating_sub(1);
            let formula = f(scenario.output_card(0))
                * f(scenario.output_card(1))
                * f(scenario.input_card(0))
                * f(scenario.input_card(1));
            println!(
                "{}",
                json!({"count": count, "formula": formula, "matches": count == formula})
            );
        }
        Command::QstateNbts { tol } => qstate::run_nbts(tol)?,
        Command::QstateLinear { tol } => qstate::run_linear(tol)?,
        Command::QstateBehavior { strategies, tol, max_den, project } => {
            qstate::run_behavior(&strategies, tol, max_den, &project)?
        }
    }
    Ok(())
}

fn certificate_json(cert: &MembershipCertificate) -> Value {
    match cert {
        MembershipCertificate::Member { weights } => {
            let w: Value = match weights {
                Some(map) => Value::Object(
                    map.iter()
                        .map(|(i, q)| (i.to_string(), nbts_core::rational_to_json(q)))
                        .collect(),
                ),
                None => Value::Null,
            };
            json!({"member": true, "weights": w})
        }
        MembershipCertificate::NotMember { separator } => json!({
            "member": false,
            "separator": {
                "coeffs": separator.coeffs.iter().map(nbts_core::rational_to_json).collect::<Vec<_>>(),
                "rhs": nbts_core::rational_to_json(&separator.rhs),
            }
        }),
    }
}

/// Expected dimensions and vertex counts at (2,2,2,2) for each
/// (regime, classical) row of the summary table.
fn expected_cell(regime: &TimingRegime, classical: bool) -> Option<(usize, usize)> {
    match (regime, classical) {
        (TimingRegime::Indefinite, false) => Some((8, 24)),
        (TimingRegime::Indefinite, true) => Some((7, 12)),
        (TimingRegime::Parallel, false) => Some((6, 18)),
        (TimingRegime::Parallel, true) => Some((3, 4)),
        (TimingRegime::Sequential(_), false) => Some((7, 20)),
        (TimingRegime::Sequential(_), true) => Some((5, 8)),
    }
}

fn print_table(scenario: &Scenario) -> Result<bool> {
    let rows = [
        (TimingRegime::Indefinite, false),
        (TimingRegime::Indefinite, true),
        (TimingRegime::Parallel, false),
        (TimingRegime::Parallel, true),
        (TimingRegime::seq_ab(), false),
        (TimingRegime::seq_ab(), true),
    ];
    let compare = scenario == &Scenario::binary();
    println!(
        "{:<12} {:<10} {:>4} {:>8} {:>9} {:>8}  status",
        "order", "set", "dim", "exp.dim", "vertices", "exp.vrt"
    );
    let mut all_pass = true;
    for (regime, classical) in rows {
        let h = build_polytope::<Q>(scenario, &regime, classical)?;
        let dim = affine_dimension(&h)?;
        let count = enumerate_vertices(&h)?.len();
        let set = if classical { "classical" } else { "nbts" };
        if compare {
            let (edim, ecount) = expected_cell(&regime, classical).expect("all rows covered");
            let ok = dim == edim && count == ecount;
            all_pass &= ok;
            println!(
                "{:<12} {:<10} {:>4} {:>8} {:>9} {:>8}  {}",
                regime.to_string(),
                set,
                dim,
                edim,
                count,
                ecount,
                if ok { "PASS" } else { "FAIL" }
            );
        } else {
            println!(
                "{:<12} {:<10} {:>4} {:>8} {:>9} {:>8}  -",
                regime.to_string(),
                set,
                dim,
                "-",
                count,
                "-"
            );
        }
    }
    Ok(all_pass || !compare)
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        let payload = json!({"error": format!("{e:#}")});
        eprintln!("{payload}");
        std::process::exit(1);
    }
}
