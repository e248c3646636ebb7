//! Standard processes: identity vectors, channels, measurements, and the
//! unitary families used by the signalling witnesses.

use crate::tensor::{LabeledTensor, Side, TensorError, Variance, WireIndex};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn czero() -> C64 {
    c(0.0, 0.0)
}

/// The identity vector 𝕀 on one wire: Σᵢ |i⟩⟨i| with the given variance.
/// Raised is the state-side object (contracts effects), lowered the
/// effect-side one (contracts states).
pub fn identity_vector(wire: &str, dim: usize, variance: Variance) -> LabeledTensor {
    let (ket_var, bra_var) = (variance, variance.flip());
    LabeledTensor::from_fn(
        vec![
            WireIndex::new(wire, Side::Ket, ket_var, dim),
            WireIndex::new(wire, Side::Bra, bra_var, dim),
        ],
        |v| if v[0] == v[1] { c(1.0, 0.0) } else { czero() },
    )
}

/// State vector ρ on a wire from a density operator.
pub fn state_from_density(wire: &str, rho: &DMatrix<C64>) -> LabeledTensor {
    let d = rho.nrows();
    assert_eq!(rho.ncols(), d);
    LabeledTensor::from_fn(
        vec![
            WireIndex::new(wire, Side::Ket, Variance::Raised, d),
            WireIndex::new(wire, Side::Bra, Variance::Lowered, d),
        ],
        |v| rho[(v[0], v[1])],
    )
}

/// Joint state on two wires from a density operator on their tensor product
/// (row index i1·d2 + i2).
pub fn state_from_density_pair(
    w1: &str,
    d1: usize,
    w2: &str,
    d2: usize,
    rho: &DMatrix<C64>,
) -> LabeledTensor {
    assert_eq!(rho.nrows(), d1 * d2);
    LabeledTensor::from_fn(
        vec![
            WireIndex::new(w1, Side::Ket, Variance::Raised, d1),
            WireIndex::new(w1, Side::Bra, Variance::Lowered, d1),
            WireIndex::new(w2, Side::Ket, Variance::Raised, d2),
            WireIndex::new(w2, Side::Bra, Variance::Lowered, d2),
        ],
        |v| rho[(v[0] * d2 + v[2], v[1] * d2 + v[3])],
    )
}

/// Effect (post-selection element) on a wire from an operator Ê; composing
/// with a state gives tr(Ê ρ̂).
pub fn effect_from_operator(wire: &str, e: &DMatrix<C64>) -> LabeledTensor {
    let d = e.nrows();
    LabeledTensor::from_fn(
        vec![
            WireIndex::new(wire, Side::Ket, Variance::Lowered, d),
            WireIndex::new(wire, Side::Bra, Variance::Raised, d),
        ],
        |v| e[(v[1], v[0])],
    )
}

/// Channel tensor from Kraus operators (out × in matrices):
/// C[k,l,i,j] = Σ_α K_α[k,i] · conj(K_α[l,j]).
pub fn channel_from_kraus(
    in_wire: &str,
    out_wire: &str,
    kraus: &[DMatrix<C64>],
) -> LabeledTensor {
    assert!(!kraus.is_empty());
    let d_out = kraus[0].nrows();
    let d_in = kraus[0].ncols();
    LabeledTensor::from_fn(
        vec![
            WireIndex::new(out_wire, Side::Ket, Variance::Raised, d_out),
            WireIndex::new(out_wire, Side::Bra, Variance::Lowered, d_out),
            WireIndex::new(in_wire, Side::Ket, Variance::Lowered, d_in),
            WireIndex::new(in_wire, Side::Bra, Variance::Raised, d_in),
        ],
        |v| {
            kraus
                .iter()
                .map(|k| k[(v[0], v[2])] * k[(v[1], v[3])].conj())
                .sum()
        },
    )
}

/// Channel with a two-wire input (in1 ⊗ in2, row index i1·d2 + i2).
pub fn channel_from_kraus_two_in(
    in1: &str,
    d1: usize,
    in2: &str,
    d2: usize,
    out_wire: &str,
    kraus: &[DMatrix<C64>],
) -> LabeledTensor {
    assert!(!kraus.is_empty());
    let d_out = kraus[0].nrows();
    assert_eq!(kraus[0].ncols(), d1 * d2);
    LabeledTensor::from_fn(
        vec![
            WireIndex::new(out_wire, Side::Ket, Variance::Raised, d_out),
            WireIndex::new(out_wire, Side::Bra, Variance::Lowered, d_out),
            WireIndex::new(in1, Side::Ket, Variance::Lowered, d1),
            WireIndex::new(in1, Side::Bra, Variance::Raised, d1),
            WireIndex::new(in2, Side::Ket, Variance::Lowered, d2),
            WireIndex::new(in2, Side::Bra, Variance::Raised, d2),
        ],
        |v| {
            let i = v[2] * d2 + v[4];
            let j = v[3] * d2 + v[5];
            kraus.iter().map(|k| k[(v[0], i)] * k[(v[1], j)].conj()).sum()
        },
    )
}

pub fn identity_channel(in_wire: &str, out_wire: &str, dim: usize) -> LabeledTensor {
    channel_from_kraus(in_wire, out_wire, &[DMatrix::identity(dim, dim)])
}

pub fn unitary_channel(in_wire: &str, out_wire: &str, u: &DMatrix<C64>) -> LabeledTensor {
    channel_from_kraus(in_wire, out_wire, std::slice::from_ref(u))
}

/// The throw-away-and-replace channel T = (1/d_out) 𝕀^out • 𝕀_in: discard the
/// input, emit the maximally mixed state.
pub fn throw_away_replace(in_wire: &str, out_wire: &str, d_in: usize, d_out: usize) -> LabeledTensor {
    identity_vector(out_wire, d_out, Variance::Raised)
        .scale(c(1.0 / d_out as f64, 0.0))
        .bullet(&identity_vector(in_wire, d_in, Variance::Lowered))
        .expect("disjoint wires")
}

/// ‖𝕀_out • c − 𝕀_in‖_max ≤ tol: the channel preserves the future identity.
pub fn is_trace_preserving(
    ch: &LabeledTensor,
    in_wire: &str,
    out_wire: &str,
    tol: f64,
) -> Result<bool, TensorError> {
    let d_out = ch.wire_dim(out_wire).ok_or_else(|| TensorError::MissingWire(out_wire.into()))?;
    let d_in = ch.wire_dim(in_wire).ok_or_else(|| TensorError::MissingWire(in_wire.into()))?;
    if ch.rank() != 4
        || ch.find(out_wire, Side::Ket, Variance::Raised).is_none()
        || ch.find(in_wire, Side::Ket, Variance::Lowered).is_none()
    {
        return Err(TensorError::MissingWire(format!("{in_wire}->{out_wire} channel legs")));
    }
    let traced = identity_vector(out_wire, d_out, Variance::Lowered).bullet(ch)?;
    let target = identity_vector(in_wire, d_in, Variance::Lowered);
    Ok(traced.max_abs_diff(&target)? <= tol)
}

/// A measurement: outcome-indexed processes summing to a trace-preserving
/// channel.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub in_wire: String,
    pub out_wire: String,
    pub elements: BTreeMap<usize, LabeledTensor>,
}

impl Measurement {
    pub fn new(
        in_wire: &str,
        out_wire: &str,
        elements: BTreeMap<usize, LabeledTensor>,
        tol: f64,
    ) -> Result<Self, TensorError> {
        assert!(!elements.is_empty());
        let mut total: Option<LabeledTensor> = None;
        for el in elements.values() {
            total = Some(match total {
                None => el.clone(),
                Some(t) => t.add(el)?,
            });
        }
        let total = total.expect("nonempty");
        if !is_trace_preserving(&total, in_wire, out_wire, tol)? {
            return Err(TensorError::MissingWire(format!(
                "measurement elements on {in_wire}->{out_wire} do not sum to a channel"
            )));
        }
        Ok(Self { in_wire: in_wire.into(), out_wire: out_wire.into(), elements })
    }

    /// Σ_a M_a, the induced channel.
    pub fn channel(&self) -> LabeledTensor {
        let mut total: Option<LabeledTensor> = None;
        for el in self.elements.values() {
            total = Some(match total {
                None => el.clone(),
                Some(t) => t.add(el).expect("validated at construction"),
            });
        }
        total.expect("nonempty")
    }
}

/// Destructive measurement in an orthonormal basis followed by preparation of
/// |0⟩: element a has the single Kraus |0⟩⟨v_a|.
pub fn measure_prepare_zero(
    in_wire: &str,
    out_wire: &str,
    basis: &[DVector<C64>],
    d_out: usize,
    tol: f64,
) -> Result<Measurement, TensorError> {
    let d_in = basis[0].len();
    let mut elements = BTreeMap::new();
    for (a, v) in basis.iter().enumerate() {
        let mut k = DMatrix::<C64>::zeros(d_out, d_in);
        for i in 0..d_in {
            k[(0, i)] = v[i].conj();
        }
        elements.insert(a, channel_from_kraus(in_wire, out_wire, &[k]));
    }
    Measurement::new(in_wire, out_wire, elements, tol)
}

/// Discard the input, emit a uniformly random classical label a prepared as
/// |a⟩: element a is (1/d_out)|a⟩⟨a| ⊗ 𝕀_in.
pub fn discard_randomize(
    in_wire: &str,
    out_wire: &str,
    d_in: usize,
    d_out: usize,
    tol: f64,
) -> Result<Measurement, TensorError> {
    let mut elements = BTreeMap::new();
    for a in 0..d_out {
        let mut proj = DMatrix::<C64>::zeros(d_out, d_out);
        proj[(a, a)] = c(1.0 / d_out as f64, 0.0);
        let t = LabeledTensor::from_fn(
            vec![
                WireIndex::new(out_wire, Side::Ket, Variance::Raised, d_out),
                WireIndex::new(out_wire, Side::Bra, Variance::Lowered, d_out),
            ],
            |v| proj[(v[0], v[1])],
        )
        .bullet(&identity_vector(in_wire, d_in, Variance::Lowered))
        .expect("disjoint wires");
        elements.insert(a, t);
    }
    Measurement::new(in_wire, out_wire, elements, tol)
}

pub fn computational_basis(d: usize) -> Vec<DVector<C64>> {
    (0..d)
        .map(|a| DVector::from_fn(d, |i, _| if i == a { c(1.0, 0.0) } else { czero() }))
        .collect()
}

/// Computational basis with levels r, s replaced by (|r⟩ ± z|s⟩)/√2 where z is
/// 1 or i.
pub fn superposition_basis(d: usize, r: usize, s: usize, imaginary: bool) -> Vec<DVector<C64>> {
    let z = if imaginary { c(0.0, 1.0) } else { c(1.0, 0.0) };
    let mut basis = computational_basis(d);
    let inv = 1.0 / 2f64.sqrt();
    let plus = DVector::from_fn(d, |i, _| {
        if i == r {
            c(inv, 0.0)
        } else if i == s {
            z * inv
        } else {
            czero()
        }
    });
    let minus = DVector::from_fn(d, |i, _| {
        if i == r {
            c(inv, 0.0)
        } else if i == s {
            -z * inv
        } else {
            czero()
        }
    });
    basis[r] = plus;
    basis[s] = minus;
    basis
}

pub fn generalized_pauli_x(d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |k, j| if k == (j + 1) % d { c(1.0, 0.0) } else { czero() })
}

pub fn generalized_pauli_z(d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |k, j| {
        if k == j {
            let phi = 2.0 * PI * j as f64 / d as f64;
            c(phi.cos(), phi.sin())
        } else {
            czero()
        }
    })
}

pub fn fourier_matrix(d: usize) -> DMatrix<C64> {
    let inv = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |k, j| {
        let phi = 2.0 * PI * (k * j) as f64 / d as f64;
        c(phi.cos() * inv, phi.sin() * inv)
    })
}

/// A unitary mapping |0⟩ to (|r⟩ + z|s⟩)/√2, completed by deterministic
/// Gram–Schmidt over the standard basis.
pub fn rotation_to_superposition(d: usize, r: usize, s: usize, z: C64) -> DMatrix<C64> {
    assert!(r != s && r < d && s < d);
    let inv = 1.0 / 2f64.sqrt();
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(d);
    cols.push(DVector::from_fn(d, |i, _| {
        if i == r {
            c(inv, 0.0)
        } else if i == s {
            z * inv
        } else {
            czero()
        }
    }));
    for cand in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = DVector::from_fn(d, |i, _| if i == cand { c(1.0, 0.0) } else { czero() });
        for u in &cols {
            let overlap: C64 = u.dotc(&v);
            v -= u * overlap;
        }
        let norm = v.norm();
        if norm > 1e-9 {
            v /= c(norm, 0.0);
            cols.push(v);
        }
    }
    assert_eq!(cols.len(), d);
    DMatrix::from_columns(&cols)
}

/// Unitaries whose images of |0⟩⟨0| span the operator space: identity, the
/// generalized Pauli powers, the Fourier transform, and every two-level
/// rotation onto (|r⟩ ± |s⟩)/√2 and (|r⟩ ± i|s⟩)/√2.
pub fn tomographic_unitaries(d: usize) -> Vec<(String, DMatrix<C64>)> {
    let mut out: Vec<(String, DMatrix<C64>)> = Vec::new();
    out.push(("identity".into(), DMatrix::identity(d, d)));
    let x = generalized_pauli_x(d);
    let z = generalized_pauli_z(d);
    let mut xp = x.clone();
    let mut zp = z.clone();
    for k in 1..d {
        out.push((format!("X^{k}"), xp.clone()));
        out.push((format!("Z^{k}"), zp.clone()));
        xp = &xp * &x;
        zp = &zp * &z;
    }
    out.push(("fourier".into(), fourier_matrix(d)));
    for r in 0..d {
        for s in (r + 1)..d {
            for (tag, ph) in [
                ("plus", c(1.0, 0.0)),
                ("minus", c(-1.0, 0.0)),
                ("plus_i", c(0.0, 1.0)),
                ("minus_i", c(0.0, -1.0)),
            ] {
                out.push((
                    format!("rot({r},{s},{tag})"),
                    rotation_to_superposition(d, r, s, ph),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn identity_channel_is_trace_preserving() {
        let ch = identity_channel("A1", "A2", 2);
        assert!(is_trace_preserving(&ch, "A1", "A2", TOL).unwrap());
        let ch3 = identity_channel("A1", "A2", 3);
        assert!(is_trace_preserving(&ch3, "A1", "A2", TOL).unwrap());
    }

    #[test]
    fn throw_away_replace_is_trace_preserving() {
        let t = throw_away_replace("B1", "B3", 2, 3);
        assert!(is_trace_preserving(&t, "B1", "B3", TOL).unwrap());
    }

    #[test]
    fn projector_is_trace_decreasing() {
        let mut p = DMatrix::<C64>::zeros(2, 2);
        p[(0, 0)] = c(1.0, 0.0);
        let ch = channel_from_kraus("A1", "A2", &[p]);
        assert!(!is_trace_preserving(&ch, "A1", "A2", TOL).unwrap());
    }

    #[test]
    fn measure_prepare_sums_to_channel() {
        let m =
            measure_prepare_zero("A1", "A2", &computational_basis(2), 2, TOL).unwrap();
        assert!(is_trace_preserving(&m.channel(), "A1", "A2", TOL).unwrap());
        let pm = measure_prepare_zero("A1", "A2", &superposition_basis(3, 0, 2, true), 3, TOL)
            .unwrap();
        assert!(is_trace_preserving(&pm.channel(), "A1", "A2", TOL).unwrap());
    }

    #[test]
    fn discard_randomize_is_measurement() {
        let m = discard_randomize("A1", "A2", 2, 2, TOL).unwrap();
        assert_eq!(m.elements.len(), 2);
        assert!(is_trace_preserving(&m.channel(), "A1", "A2", TOL).unwrap());
    }

    #[test]
    fn identity_contraction_is_trace() {
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let state = state_from_density("A1", &rho);
        let s = identity_vector("A1", 2, Variance::Lowered)
            .bullet_scalar(&state)
            .unwrap();
        assert!((s - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn unitaries_are_unitary() {
        for d in [2usize, 3] {
            for (name, u) in tomographic_unitaries(d) {
                let err = (u.adjoint() * &u - DMatrix::<C64>::identity(d, d)).norm();
                assert!(err < 1e-12, "{name} at d={d}: {err}");
            }
        }
    }

    #[test]
    fn channel_maps_density_correctly() {
        // Bit flip on |0><0| gives |1><1|.
        let x = generalized_pauli_x(2);
        let ch = unitary_channel("A1", "A2", &x);
        let mut rho = DMatrix::<C64>::zeros(2, 2);
        rho[(0, 0)] = c(1.0, 0.0);
        let out = ch.bullet(&state_from_density("A1", &rho)).unwrap();
        let expected = state_from_density("A2", &DMatrix::from_row_slice(2, 2, &[
            czero(), czero(), czero(), c(1.0, 0.0),
        ]));
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn effect_gives_born_rule() {
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.4, 0.0)]);
        let plus = DMatrix::from_fn(2, 2, |i, j| {
            let v = [c(1.0, 0.0), c(1.0, 0.0)];
            v[i] * v[j].conj() * 0.5
        });
        let p = effect_from_operator("A", &plus)
            .bullet_scalar(&state_from_density("A", &rho))
            .unwrap();
        // tr(|+><+| rho) = (0.6 + 0.4 + 2*0.2) / 2
        assert!((p - c(0.7, 0.0)).norm() < 1e-14);
    }
}
