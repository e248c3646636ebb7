//! Labeled wire tensors and the bullet composition.
//!
//! Every process (state, effect, channel, measurement element) is a complex
//! tensor whose indices carry a wire label, a ket/bra side and a raised or
//! lowered variance. The bullet operation contracts index pairs that share
//! (wire, side) with opposite variance and tensors everything else, so
//! composing processes is a single associative primitive.

use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("duplicate index {0} within one tensor")]
    DuplicateIndex(String),
    #[error("identical uncontractible index {0} on both operands")]
    IndexCollision(String),
    #[error("entry count {got} does not match index dimensions (need {want})")]
    ShapeMismatch { got: usize, want: usize },
    #[error("expected a scalar (rank-0) result, got rank {0}")]
    NonScalarResult(usize),
    #[error("tensors are not defined on the same index set")]
    IndexSetMismatch,
    #[error("operator block is not hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator block is not positive (eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("wire {0} not present with the expected indices")]
    MissingWire(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Ket,
    Bra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variance {
    Raised,
    Lowered,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Raised => Variance::Lowered,
            Variance::Lowered => Variance::Raised,
        }
    }
}

/// One tensor leg: wire label, ket/bra side, variance, dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WireIndex {
    pub wire: String,
    pub side: Side,
    pub variance: Variance,
    pub dim: usize,
}

impl WireIndex {
    pub fn new(wire: &str, side: Side, variance: Variance, dim: usize) -> Self {
        Self { wire: wire.to_string(), side, variance, dim }
    }

    /// The (wire, side, variance) key; two legs with equal keys collide.
    fn key(&self) -> (&str, Side, Variance) {
        (&self.wire, self.side, self.variance)
    }

    /// bullet contracts this leg with one of equal (wire, side) and opposite
    /// variance.
    fn contracts_with(&self, other: &WireIndex) -> bool {
        self.wire == other.wire && self.side == other.side && self.variance != other.variance
    }

    fn describe(&self) -> String {
        let side = match self.side {
            Side::Ket => "ket",
            Side::Bra => "bra",
        };
        let var = match self.variance {
            Variance::Raised => "up",
            Variance::Lowered => "down",
        };
        format!("{}:{side}:{var}", self.wire)
    }
}

/// Dense complex tensor over an ordered list of wire indices (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTensor {
    indices: Vec<WireIndex>,
    data: Vec<C64>,
}

fn strides(indices: &[WireIndex]) -> Vec<usize> {
    let mut s = vec![1usize; indices.len()];
    for i in (0..indices.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * indices[i + 1].dim;
    }
    s
}

impl LabeledTensor {
    pub fn new(indices: Vec<WireIndex>, data: Vec<C64>) -> Result<Self, TensorError> {
        for (i, a) in indices.iter().enumerate() {
            for b in &indices[i + 1..] {
                if a.key() == b.key() {
                    return Err(TensorError::DuplicateIndex(a.describe()));
                }
            }
        }
        let want: usize = indices.iter().map(|ix| ix.dim).product();
        if data.len() != want {
            return Err(TensorError::ShapeMismatch { got: data.len(), want });
        }
        Ok(Self { indices, data })
    }

    /// Rank-0 tensor holding one number.
    pub fn scalar_tensor(v: C64) -> Self {
        Self { indices: Vec::new(), data: vec![v] }
    }

    pub fn from_fn(indices: Vec<WireIndex>, f: impl Fn(&[usize]) -> C64) -> Self {
        let total: usize = indices.iter().map(|ix| ix.dim).product();
        let mut data = Vec::with_capacity(total);
        let mut vals = vec![0usize; indices.len()];
        for _ in 0..total {
            data.push(f(&vals));
            for k in (0..indices.len()).rev() {
                vals[k] += 1;
                if vals[k] < indices[k].dim {
                    break;
                }
                vals[k] = 0;
            }
        }
        Self { indices, data }
    }

    pub fn indices(&self) -> &[WireIndex] {
        &self.indices
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    /// The single entry of a rank-0 tensor.
    pub fn scalar(&self) -> Result<C64, TensorError> {
        if self.rank() != 0 {
            return Err(TensorError::NonScalarResult(self.rank()));
        }
        Ok(self.data[0])
    }

    pub fn find(&self, wire: &str, side: Side, variance: Variance) -> Option<&WireIndex> {
        self.indices
            .iter()
            .find(|ix| ix.wire == wire && ix.side == side && ix.variance == variance)
    }

    /// Dimension of a wire (from any of its legs).
    pub fn wire_dim(&self, wire: &str) -> Option<usize> {
        self.indices.iter().find(|ix| ix.wire == wire).map(|ix| ix.dim)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            indices: self.indices.clone(),
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Entrywise sum; the operand is aligned to this tensor's index order.
    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        let other = other.aligned_to(&self.indices)?;
        Ok(Self {
            indices: self.indices.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Largest entry magnitude of the difference, after index alignment.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, TensorError> {
        let other = other.aligned_to(&self.indices)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Permute the axes to the given index list (same set, any order).
    pub fn aligned_to(&self, target: &[WireIndex]) -> Result<Self, TensorError> {
        if self.indices.len() != target.len() {
            return Err(TensorError::IndexSetMismatch);
        }
        if self.indices == target {
            return Ok(self.clone());
        }
        let mut perm = Vec::with_capacity(target.len());
        for t in target {
            let pos = self
                .indices
                .iter()
                .position(|ix| ix == t)
                .ok_or(TensorError::IndexSetMismatch)?;
            if perm.contains(&pos) {
                return Err(TensorError::IndexSetMismatch);
            }
            perm.push(pos);
        }
        let old_strides = strides(&self.indices);
        let new_indices: Vec<WireIndex> = target.to_vec();
        let total = self.data.len();
        let mut data = vec![C64::new(0.0, 0.0); total];
        let mut vals = vec![0usize; new_indices.len()];
        for slot in data.iter_mut() {
            let mut off = 0;
            for (k, &v) in vals.iter().enumerate() {
                off += v * old_strides[perm[k]];
            }
            *slot = self.data[off];
            for k in (0..new_indices.len()).rev() {
                vals[k] += 1;
                if vals[k] < new_indices[k].dim {
                    break;
                }
                vals[k] = 0;
            }
        }
        Ok(Self { indices: new_indices, data })
    }

    /// The bullet composition: contract every (wire, side) pair with opposite
    /// variance, tensor the remaining legs (self's free legs first).
    pub fn bullet(&self, other: &Self) -> Result<Self, TensorError> {
        // Collisions: identical keys on both operands are uncontractible.
        for a in &self.indices {
            if other.indices.iter().any(|b| a.key() == b.key()) {
                return Err(TensorError::IndexCollision(a.describe()));
            }
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (i, a) in self.indices.iter().enumerate() {
            for (j, b) in other.indices.iter().enumerate() {
                if a.contracts_with(b) {
                    debug_assert_eq!(a.dim, b.dim, "wire dimensions must agree");
                    pairs.push((i, j));
                }
            }
        }
        let free1: Vec<usize> =
            (0..self.indices.len()).filter(|i| !pairs.iter().any(|&(a, _)| a == *i)).collect();
        let free2: Vec<usize> =
            (0..other.indices.len()).filter(|j| !pairs.iter().any(|&(_, b)| b == *j)).collect();

        let s1 = strides(&self.indices);
        let s2 = strides(&other.indices);
        let out_indices: Vec<WireIndex> = free1
            .iter()
            .map(|&i| self.indices[i].clone())
            .chain(free2.iter().map(|&j| other.indices[j].clone()))
            .collect();
        let out_total: usize = out_indices.iter().map(|ix| ix.dim).product();
        let contract_dims: Vec<usize> = pairs.iter().map(|&(i, _)| self.indices[i].dim).collect();
        let contract_total: usize = contract_dims.iter().product();

        let mut data = vec![C64::new(0.0, 0.0); out_total];
        let mut free_vals = vec![0usize; out_indices.len()];
        for slot in data.iter_mut() {
            let mut base1 = 0;
            let mut base2 = 0;
            for (k, &v) in free_vals.iter().enumerate() {
                if k < free1.len() {
                    base1 += v * s1[free1[k]];
                } else {
                    base2 += v * s2[free2[k - free1.len()]];
                }
            }
            let mut acc = C64::new(0.0, 0.0);
            let mut cvals = vec![0usize; pairs.len()];
            for _ in 0..contract_total {
                let mut off1 = base1;
                let mut off2 = base2;
                for (k, &v) in cvals.iter().enumerate() {
                    off1 += v * s1[pairs[k].0];
                    off2 += v * s2[pairs[k].1];
                }
                acc += self.data[off1] * other.data[off2];
                for k in (0..pairs.len()).rev() {
                    cvals[k] += 1;
                    if cvals[k] < contract_dims[k] {
                        break;
                    }
                    cvals[k] = 0;
                }
            }
            *slot = acc;
            for k in (0..out_indices.len()).rev() {
                free_vals[k] += 1;
                if free_vals[k] < out_indices[k].dim {
                    break;
                }
                free_vals[k] = 0;
            }
        }
        Self::new(out_indices, data)
    }

    /// Contract to a scalar, erroring when legs remain.
    pub fn bullet_scalar(&self, other: &Self) -> Result<C64, TensorError> {
        self.bullet(other)?.scalar()
    }

    /// The operator block of the tensor: rows run over ket legs, columns over
    /// bra legs, both in sorted wire order. Physical processes have a
    /// hermitian positive semidefinite block.
    pub fn operator_block(&self) -> Result<nalgebra::DMatrix<C64>, TensorError> {
        let mut kets: Vec<usize> = (0..self.indices.len())
            .filter(|&i| self.indices[i].side == Side::Ket)
            .collect();
        let mut bras: Vec<usize> = (0..self.indices.len())
            .filter(|&i| self.indices[i].side == Side::Bra)
            .collect();
        kets.sort_by(|&a, &b| self.indices[a].wire.cmp(&self.indices[b].wire));
        bras.sort_by(|&a, &b| self.indices[a].wire.cmp(&self.indices[b].wire));
        if kets.len() != bras.len() {
            return Err(TensorError::IndexSetMismatch);
        }
        for (&k, &b) in kets.iter().zip(&bras) {
            if self.indices[k].wire != self.indices[b].wire
                || self.indices[k].dim != self.indices[b].dim
            {
                return Err(TensorError::MissingWire(self.indices[k].wire.clone()));
            }
        }
        let s = strides(&self.indices);
        let rows: usize = kets.iter().map(|&i| self.indices[i].dim).product();
        let cols: usize = bras.iter().map(|&i| self.indices[i].dim).product();
        let mut m = nalgebra::DMatrix::<C64>::zeros(rows, cols);
        for r in 0..rows {
            let mut rv = r;
            let mut off_r = 0;
            for &i in kets.iter().rev() {
                off_r += (rv % self.indices[i].dim) * s[i];
                rv /= self.indices[i].dim;
            }
            for c in 0..cols {
                let mut cv = c;
                let mut off = off_r;
                for &j in bras.iter().rev() {
                    off += (cv % self.indices[j].dim) * s[j];
                    cv /= self.indices[j].dim;
                }
                m[(r, c)] = self.data[off];
            }
        }
        Ok(m)
    }

    /// Check that the operator block is hermitian and positive semidefinite
    /// up to `tol` (smallest eigenvalue ≥ −tol).
    pub fn validate_positive(&self, tol: f64) -> Result<(), TensorError> {
        let m = self.operator_block()?;
        let herm_dev = (&m - m.adjoint()).norm() / (1.0 + m.norm());
        if herm_dev > tol.max(1e-12) {
            return Err(TensorError::NotHermitian(herm_dev));
        }
        let herm = (&m + m.adjoint()).scale(0.5);
        let eigs = herm.symmetric_eigenvalues();
        let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -tol.max(1e-9) * (1.0 + m.norm()) {
            return Err(TensorError::NotPositive(min));
        }
        Ok(())
    }

    // JSON wire format:
    // {"indices":[{"wire":"A1","side":"ket","var":"up","dim":2},...],
    //  "re":[...], "im":[...]} row-major over the index order.
    pub fn to_json(&self) -> Value {
        json!({
            "indices": self
                .indices
                .iter()
                .map(|ix| {
                    json!({
                        "wire": ix.wire,
                        "side": match ix.side { Side::Ket => "ket", Side::Bra => "bra" },
                        "var": match ix.variance { Variance::Raised => "up", Variance::Lowered => "down" },
                        "dim": ix.dim,
                    })
                })
                .collect::<Vec<_>>(),
            "re": self.data.iter().map(|v| v.re).collect::<Vec<_>>(),
            "im": self.data.iter().map(|v| v.im).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, TensorError> {
        let idx = v
            .get("indices")
            .and_then(Value::as_array)
            .ok_or_else(|| TensorError::Json("missing \"indices\"".into()))?;
        let mut indices = Vec::with_capacity(idx.len());
        for item in idx {
            let wire = item
                .get("wire")
                .and_then(Value::as_str)
                .ok_or_else(|| TensorError::Json("index missing \"wire\"".into()))?;
            let side = match item.get("side").and_then(Value::as_str) {
                Some("ket") => Side::Ket,
                Some("bra") => Side::Bra,
                other => return Err(TensorError::Json(format!("bad side {other:?}"))),
            };
            let variance = match item.get("var").and_then(Value::as_str) {
                Some("up") => Variance::Raised,
                Some("down") => Variance::Lowered,
                other => return Err(TensorError::Json(format!("bad var {other:?}"))),
            };
            let dim = item
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or_else(|| TensorError::Json("index missing \"dim\"".into()))?
                as usize;
            indices.push(WireIndex::new(wire, side, variance, dim));
        }
        let nums = |key: &str| -> Result<Vec<f64>, TensorError> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| TensorError::Json(format!("missing \"{key}\"")))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| TensorError::Json(format!("bad number in {key}"))))
                .collect()
        };
        let re = nums("re")?;
        let im = nums("im")?;
        if re.len() != im.len() {
            return Err(TensorError::Json("re/im length mismatch".into()));
        }
        let data = re.into_iter().zip(im).map(|(r, i)| C64::new(r, i)).collect();
        Self::new(indices, data)
    }
}
