//! Two-time state subcommands: tensor input, strategy files, reports.

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use nbts_twotime::bridge::{classical_projection_span, extract_behavior, Strategy};
use nbts_twotime::checks::{
    is_linear_two_time, nbts_witness_single, structural_form_check, StructuralForm,
};
use nbts_twotime::ops::{
    computational_basis, discard_randomize, fourier_matrix, generalized_pauli_x,
    generalized_pauli_z, measure_prepare_zero, rotation_to_superposition, superposition_basis,
    unitary_channel, Measurement,
};
use nbts_twotime::tensor::LabeledTensor;
use nbts_twotime::wires;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use std::io::Read;

fn read_tensor_stdin() -> Result<LabeledTensor> {
    let mut buf = String::new();
    std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
    let v: Value = serde_json::from_str(&buf).context("parsing stdin as JSON")?;
    LabeledTensor::from_json(&v).map_err(|e| anyhow!("invalid tensor: {e}"))
}

fn has_wires(t: &LabeledTensor, names: &[&str]) -> bool {
    names.iter().all(|w| t.wire_dim(w).is_some())
}

pub fn run_nbts(tol: f64) -> Result<()> {
    let eta = read_tensor_stdin()?;
    eta.validate_positive(tol.max(1e-9))
        .map_err(|e| anyhow!("state is not a positive process: {e}"))?;
    if has_wires(&eta, &[wires::B1, wires::B3]) {
        // Two-party state: report the structural forms and linearity.
        let pair = structural_form_check(&eta, StructuralForm::ProductIdentityPair, tol)?;
        let seq = structural_form_check(&eta, StructuralForm::SequentialBIdentity, tol)?;
        let lin = is_linear_two_time(&eta, tol)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "parties": 2,
                "parallel_form": {"matches": pair.matches, "residual": pair.residual},
                "sequential_form_b_trivial": {"matches": seq.matches, "residual": seq.residual},
                "linear": lin.linear,
                "linearity_residuals": lin.residuals.to_vec(),
            }))?
        );
    } else if has_wires(&eta, &[wires::A1, wires::A3]) {
        let witness = nbts_witness_single(&eta, tol)?;
        let form = structural_form_check(&eta, StructuralForm::ProductIdentitySingle, tol)?;
        let witness_json = witness.witness.as_ref().map(|w| {
            json!({
                "family": w.family,
                "channels": [w.channel_a, w.channel_b],
                "outcome": w.outcome,
                "deviation": w.deviation,
            })
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "parties": 1,
                "nbts": witness.nbts,
                "worst_deviation": witness.worst_deviation,
                "witness": witness_json,
                "product_identity_form": {"matches": form.matches, "residual": form.residual},
            }))?
        );
    } else {
        bail!("state must carry wires A1/A3 (one party) or A1/A3/B1/B3 (two parties)");
    }
    Ok(())
}

pub fn run_linear(tol: f64) -> Result<()> {
    let eta = read_tensor_stdin()?;
    let rep = is_linear_two_time(&eta, tol)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "linear": rep.linear,
            "residuals": rep.residuals.to_vec(),
        }))?
    );
    Ok(())
}

fn complex_matrix(v: &Value) -> Result<DMatrix<C64>> {
    let grab = |key: &str| -> Result<Vec<Vec<f64>>> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| anyhow!("matrix missing \"{key}\""))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| anyhow!("matrix rows must be arrays"))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| anyhow!("bad matrix entry")))
                    .collect()
            })
            .collect()
    };
    let re = grab("re")?;
    let im = grab("im")?;
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if im.len() != rows || im.iter().any(|r| r.len() != cols) {
        bail!("re/im shapes differ");
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| C64::new(re[i][j], im[i][j])))
}

fn named_unitary(name: &str, d: usize) -> Result<DMatrix<C64>> {
    Ok(match name {
        "identity" | "I" => DMatrix::identity(d, d),
        "X" => generalized_pauli_x(d),
        "Z" => generalized_pauli_z(d),
        "fourier" | "H" => fourier_matrix(d),
        other => bail!("unknown unitary {other:?} (expected identity, X, Z, fourier)"),
    })
}

fn parse_channel(v: &Value, mid: &str, out: &str, d: usize) -> Result<nbts_twotime::LabeledTensor> {
    if let Some(u) = v.get("unitary") {
        let m = match u {
            Value::String(name) => named_unitary(name, d)?,
            obj => complex_matrix(obj)?,
        };
        if m.nrows() != d || m.ncols() != d {
            bail!("unitary must be {d}x{d}");
        }
        return Ok(unitary_channel(mid, out, &m));
    }
    if let Some(rot) = v.get("rotation") {
        let r = rot.get("r").and_then(Value::as_u64).ok_or_else(|| anyhow!("rotation.r"))? as usize;
        let s = rot.get("s").and_then(Value::as_u64).ok_or_else(|| anyhow!("rotation.s"))? as usize;
        let phase = match rot.get("phase").and_then(Value::as_str) {
            Some("plus") | None => C64::new(1.0, 0.0),
            Some("minus") => C64::new(-1.0, 0.0),
            Some("plus_i") => C64::new(0.0, 1.0),
            Some("minus_i") => C64::new(0.0, -1.0),
            Some(other) => bail!("unknown rotation phase {other:?}"),
        };
        return Ok(unitary_channel(mid, out, &rotation_to_superposition(d, r, s, phase)));
    }
    bail!("channel must specify \"unitary\" or \"rotation\"")
}

fn parse_measurement(
    v: &Value,
    in_wire: &str,
    mid: &str,
    d_in: usize,
    d_mid: usize,
    tol: f64,
) -> Result<Measurement> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("measurement missing \"kind\""))?;
    Ok(match kind {
        "computational" => {
            measure_prepare_zero(in_wire, mid, &computational_basis(d_in), d_mid, tol)?
        }
        "discard-randomize" => discard_randomize(in_wire, mid, d_in, d_mid, tol)?,
        "superposition" => {
            let r = v.get("r").and_then(Value::as_u64).unwrap_or(0) as usize;
            let s = v.get("s").and_then(Value::as_u64).unwrap_or(1) as usize;
            let imaginary = v.get("imaginary").and_then(Value::as_bool).unwrap_or(false);
            measure_prepare_zero(in_wire, mid, &superposition_basis(d_in, r, s, imaginary), d_mid, tol)?
        }
        "basis" => {
            let m = complex_matrix(v.get("vectors").ok_or_else(|| anyhow!("basis.vectors"))?)?;
            if m.ncols() != d_in {
                bail!("basis vectors must have length {d_in}");
            }
            let basis: Vec<DVector<C64>> =
                (0..m.nrows()).map(|r| m.row(r).transpose()).collect();
            measure_prepare_zero(in_wire, mid, &basis, d_mid, tol)?
        }
        other => bail!("unknown measurement kind {other:?}"),
    })
}

fn parse_strategy(
    v: &Value,
    in_wire: &str,
    mid: &str,
    out: &str,
    d_in: usize,
    d_out: usize,
    tol: f64,
) -> Result<Strategy> {
    let meas = v.get("measurement").ok_or_else(|| anyhow!("strategy missing \"measurement\""))?;
    let measurement = parse_measurement(meas, in_wire, mid, d_in, d_out, tol)?;
    let channels: Vec<nbts_twotime::LabeledTensor> = v
        .get("channels")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("strategy missing \"channels\""))?
        .iter()
        .map(|c| parse_channel(c, mid, out, d_out))
        .collect::<Result<_>>()?;
    if channels.is_empty() {
        bail!("strategy needs at least one channel");
    }
    Ok(Strategy { measurement, channels })
}

pub fn run_behavior(path: &std::path::Path, tol: f64, max_den: u64, project: &str) -> Result<()> {
    let eta = read_tensor_stdin()?;
    for w in [wires::A1, wires::A3, wires::B1, wires::B3] {
        if eta.wire_dim(w).is_none() {
            bail!("state must carry wires A1, A3, B1, B3");
        }
    }
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).context("parsing strategies JSON")?;
    let alice = parse_strategy(
        v.get("alice").ok_or_else(|| anyhow!("strategies missing \"alice\""))?,
        wires::A1,
        wires::A2,
        wires::A3,
        eta.wire_dim(wires::A1).unwrap(),
        eta.wire_dim(wires::A3).unwrap(),
        tol,
    )?;
    let bob = parse_strategy(
        v.get("bob").ok_or_else(|| anyhow!("strategies missing \"bob\""))?,
        wires::B1,
        wires::B2,
        wires::B3,
        eta.wire_dim(wires::B1).unwrap(),
        eta.wire_dim(wires::B3).unwrap(),
        tol,
    )?;

    let scenario = nbts_core::Scenario::two_party(
        alice.outcome_count(),
        bob.outcome_count(),
        alice.input_count(),
        bob.input_count(),
    )
    .map_err(|e| anyhow!("{e}"))?;
    let span = match project {
        "classical" => classical_projection_span(&scenario),
        "nbts" => {
            let mut eqs = nbts_core::constraints::normalization_constraints(&scenario);
            eqs.extend(nbts_core::constraints::nbts_constraints(
                &scenario,
                &nbts_core::TimingRegime::Indefinite,
            ));
            eqs
        }
        "normalization" => nbts_core::constraints::normalization_constraints(&scenario),
        other => bail!("unknown projection span {other:?}"),
    };

    let extracted = extract_behavior(&eta, &alice, &bob, &span, max_den, tol)?;
    let dims: Vec<usize> = scenario
        .inputs()
        .iter()
        .chain(scenario.outputs())
        .copied()
        .collect();
    let floats: Vec<Value> = extracted
        .float
        .table()
        .iter()
        .map(|&x| json!(x))
        .collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "behavior_float": {
                "scenario": {"outputs": scenario.outputs(), "inputs": scenario.inputs()},
                "p": nest(&floats, &dims),
            },
            "behavior_rational": extracted.rational.to_json(),
            "rationalization_error": extracted.rationalization_error,
            "projection": project,
        }))?
    );
    Ok(())
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
