//! Exact convex-geometry kernel: vertex enumeration by the double description
//! method, affine dimension, and membership testing with certificates.
//!
//! Everything here is exact and deterministic: constraint insertion order is
//! fixed, pivots are exact comparisons, and vertex lists come out in canonical
//! lexicographic order, so repeated runs are byte-identical.

use crate::constraints::{HPolytope, LinearConstraint, Relation};
use crate::linalg::{self, Mat};
use crate::scalar::ExactField;
use crate::simplex::{self, HullMembership, LpOutcome};
use crate::Q;
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

/// Exact enumeration is exponential; refuse absurd ambient dimensions loudly.
pub const MAX_AMBIENT_DIM: usize = 256;

#[derive(Debug, Error, PartialEq)]
pub enum PolytopeError {
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is empty")]
    Empty,
    #[error("point has dimension {got}, expected {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("point does not satisfy the H-representation")]
    NotInPolytope,
    #[error("ambient dimension {0} exceeds the guardrail {MAX_AMBIENT_DIM}")]
    CapacityExceeded(usize),
}

/// Explicit vertex list in canonical (lexicographically sorted) order.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope<T = Q> {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<T>>,
}

impl<T: ExactField> VPolytope<T> {
    pub fn new(ambient_dim: usize, mut vertices: Vec<Vec<T>>) -> Self {
        assert!(vertices.iter().all(|v| v.len() == ambient_dim));
        sort_points(&mut vertices);
        vertices.dedup();
        Self { ambient_dim, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn sort_points<T: ExactField>(points: &mut [Vec<T>]) {
    points.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match x.partial_cmp(y).expect("exact field order is total") {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
}

impl VPolytope<Q> {
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.ambient_dim,
            "vertices": self
                .vertices
                .iter()
                .map(|v| Value::Array(v.iter().map(crate::rational_to_json).collect()))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let dim = v.get("dim").and_then(Value::as_u64).ok_or("missing \"dim\"")? as usize;
        let arr = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or("missing \"vertices\"")?;
        let mut vertices = Vec::with_capacity(arr.len());
        for row in arr {
            let row = row.as_array().ok_or("vertex must be an array")?;
            if row.len() != dim {
                return Err(format!("vertex length {} != dim {dim}", row.len()));
            }
            vertices.push(row.iter().map(crate::parse_rational).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(Self::new(dim, vertices))
    }
}

/// Certificate accompanying a membership verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum MembershipCertificate {
    /// Member. Convex weights over vertex indices are present when the test
    /// ran against a V-representation.
    Member { weights: Option<BTreeMap<usize, Q>> },
    /// Not a member, witnessed by a hyperplane.
    NotMember { separator: Separator },
}

/// coeffs·point < rhs ≤ coeffs·v for every point v of the polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Separator {
    pub coeffs: Vec<Q>,
    pub rhs: Q,
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipCertificate::Member { .. })
    }
}

/// Decide membership of `point`. With a V-representation the verdict carries
/// exact convex weights or an exact separating hyperplane; against the
/// H-representation alone it is decided by direct evaluation and a violated
/// constraint doubles as the separator.
pub fn contains(
    h: &HPolytope<Q>,
    v: Option<&VPolytope<Q>>,
    point: &[Q],
) -> Result<MembershipCertificate, PolytopeError> {
    if point.len() != h.ambient_dim {
        return Err(PolytopeError::DimensionMismatch { got: point.len(), want: h.ambient_dim });
    }
    if let Some(vp) = v {
        if vp.ambient_dim != h.ambient_dim {
            return Err(PolytopeError::DimensionMismatch {
                got: vp.ambient_dim,
                want: h.ambient_dim,
            });
        }
        return Ok(match simplex::hull_membership(&vp.vertices, point) {
            HullMembership::Inside(weights) => MembershipCertificate::Member {
                weights: Some(weights.into_iter().collect()),
            },
            HullMembership::Separated { coeffs, rhs } => {
                MembershipCertificate::NotMember { separator: Separator { coeffs, rhs } }
            }
        });
    }
    match h.violated_constraint(point) {
        None => Ok(MembershipCertificate::Member { weights: None }),
        Some(c) => {
            let mut coeffs = c.dense(h.ambient_dim);
            let mut rhs = c.rhs.clone();
            let at = c.lhs_at(point);
            // Orient so that coeffs·point < rhs holds.
            if at > rhs {
                for x in &mut coeffs {
                    *x = -x.clone();
                }
                rhs = -rhs;
            }
            Ok(MembershipCertificate::NotMember { separator: Separator { coeffs, rhs } })
        }
    }
}

/// True iff the constraints tight at `point` pin it completely
/// (rank = ambient dimension).
pub fn is_vertex<T: ExactField>(h: &HPolytope<T>, point: &[T]) -> Result<bool, PolytopeError> {
    if point.len() != h.ambient_dim {
        return Err(PolytopeError::DimensionMismatch { got: point.len(), want: h.ambient_dim });
    }
    if h.violated_constraint(point).is_some() {
        return Err(PolytopeError::NotInPolytope);
    }
    let mut tight = Mat::zeros(0, h.ambient_dim);
    for c in &h.equalities {
        tight.push_row(c.dense(h.ambient_dim));
    }
    for c in &h.inequalities {
        if c.lhs_at(point) == c.rhs {
            tight.push_row(c.dense(h.ambient_dim));
        }
    }
    Ok(tight.rank() == h.ambient_dim)
}

/// Indices of inequalities that hold with equality on the whole polytope,
/// found by maximizing each inequality's left-hand side exactly.
pub fn implicit_equalities<T: ExactField>(h: &HPolytope<T>) -> Result<Vec<usize>, PolytopeError> {
    let mut out = Vec::new();
    for (i, c) in h.inequalities.iter().enumerate() {
        match simplex::optimize(h, &c.dense(h.ambient_dim)) {
            LpOutcome::Optimal { value, .. } => {
                debug_assert!(value >= c.rhs);
                if value == c.rhs {
                    out.push(i);
                }
            }
            LpOutcome::Unbounded => {}
            LpOutcome::Infeasible { .. } => return Err(PolytopeError::Empty),
        }
    }
    Ok(out)
}

/// Dimension of the affine hull of the solution set: ambient dimension minus
/// the rank of declared plus implicit equalities.
pub fn affine_dimension<T: ExactField>(h: &HPolytope<T>) -> Result<usize, PolytopeError> {
    if simplex::feasible_point(h).is_none() {
        return Err(PolytopeError::Empty);
    }
    let implicit = implicit_equalities(h)?;
    let mut rows = Mat::zeros(0, h.ambient_dim);
    for c in &h.equalities {
        rows.push_row(c.dense(h.ambient_dim));
    }
    for &i in &implicit {
        rows.push_row(h.inequalities[i].dense(h.ambient_dim));
    }
    Ok(h.ambient_dim - rows.rank())
}

/// Enumerate the vertices of a bounded H-polytope exactly.
///
/// Pipeline: detect implicit equalities, parameterize the affine hull, then
/// run the double description method on the full-dimensional reduction,
/// inserting the remaining halfspaces in input order. A recession direction
/// (a final ray with vanishing homogenizing coordinate) reports `Unbounded`.
pub fn enumerate_vertices<T: ExactField>(
    h: &HPolytope<T>,
) -> Result<VPolytope<T>, PolytopeError> {
    if h.ambient_dim > MAX_AMBIENT_DIM {
        return Err(PolytopeError::CapacityExceeded(h.ambient_dim));
    }
    let n = h.ambient_dim;
    if simplex::feasible_point(h).is_none() {
        return Ok(VPolytope::new(n, Vec::new()));
    }

    // Fold implicit equalities into the equality system.
    let implicit = implicit_equalities(h)?;
    let mut eq_rows = Mat::zeros(0, n);
    let mut eq_rhs = Vec::new();
    for c in &h.equalities {
        eq_rows.push_row(c.dense(n));
        eq_rhs.push(c.rhs.clone());
    }
    for &i in &implicit {
        eq_rows.push_row(h.inequalities[i].dense(n));
        eq_rhs.push(h.inequalities[i].rhs.clone());
    }

    // Affine hull x = p0 + N t.
    let (p0, basis) = if eq_rows.rows() == 0 {
        let mut basis = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            basis.push(e);
        }
        (vec![T::zero(); n], basis)
    } else {
        let sol = linalg::solve_affine(&eq_rows, &eq_rhs)
            .expect("equality system is consistent on a nonempty polytope");
        (sol.particular, sol.nullspace)
    };
    let k = basis.len();
    if k == 0 {
        debug_assert!(h.contains_point(&p0));
        return Ok(VPolytope::new(n, vec![p0]));
    }

    // Reduce the inequalities to t-space: c·x >= r becomes (c·N)·t >= r − c·p0.
    let mut reduced: Vec<(Vec<T>, T)> = Vec::new();
    for c in &h.inequalities {
        let dense = c.dense(n);
        let coeffs: Vec<T> = basis.iter().map(|col| linalg::dot(&dense, col)).collect();
        let rhs = c.rhs.clone() - linalg::dot(&dense, &p0);
        if coeffs.iter().all(Zero::is_zero) {
            debug_assert!(rhs <= T::zero());
            continue;
        }
        reduced.push((coeffs, rhs));
    }

    // Homogenize: rows a with a·(s, t) >= 0; row 0 encodes s >= 0.
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(reduced.len() + 1);
    let mut s_row = vec![T::zero(); k + 1];
    s_row[0] = T::one();
    rows.push(s_row);
    for (coeffs, rhs) in &reduced {
        let mut row = Vec::with_capacity(k + 1);
        row.push(T::zero() - rhs.clone());
        row.extend(coeffs.iter().cloned());
        rows.push(row);
    }

    let rays = double_description(&rows, k + 1).ok_or(PolytopeError::Unbounded)?;

    // Rays with s = 0 are recession directions.
    let mut vertices = Vec::with_capacity(rays.len());
    for ray in rays {
        if ray[0].is_zero() {
            return Err(PolytopeError::Unbounded);
        }
        debug_assert!(ray[0] > T::zero());
        let inv = T::one() / ray[0].clone();
        let mut x = p0.clone();
        for (col, t_j) in basis.iter().zip(ray[1..].iter()) {
            let t = t_j.clone() * inv.clone();
            for (xi, ci) in x.iter_mut().zip(col) {
                *xi = xi.clone() + t.clone() * ci.clone();
            }
        }
        vertices.push(x);
    }
    Ok(VPolytope::new(n, vertices))
}

/// Extreme rays of the pointed cone {z : row·z ≥ 0 for every row}.
/// `None` when the cone is not pointed (the defining rows do not have full
/// column rank), which for a homogenized polytope means lines at infinity.
fn double_description<T: ExactField>(rows: &[Vec<T>], dim: usize) -> Option<Vec<Vec<T>>> {
    // Greedy initial subset of `dim` linearly independent rows.
    let mut chosen: Vec<usize> = Vec::new();
    let mut probe = Mat::zeros(0, dim);
    for (i, row) in rows.iter().enumerate() {
        let before = probe.rank();
        probe.push_row(row.clone());
        if probe.rank() > before {
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    if chosen.len() < dim {
        return None;
    }
    let a0 = Mat::from_rows(chosen.iter().map(|&i| rows[i].clone()).collect());
    let inv = a0.inverse().expect("chosen rows are independent");
    let mut rays: Vec<Vec<T>> = (0..dim)
        .map(|j| {
            let mut r: Vec<T> = (0..dim).map(|i| inv[(i, j)].clone()).collect();
            normalize_ray(&mut r);
            r
        })
        .collect();

    let mut processed: Vec<usize> = chosen.clone();
    for (i, row) in rows.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let vals: Vec<T> = rays.iter().map(|r| linalg::dot(row, r)).collect();
        let neg: Vec<usize> =
            (0..rays.len()).filter(|&j| vals[j] < T::zero()).collect();
        if neg.is_empty() {
            processed.push(i);
            continue;
        }
        let pos: Vec<usize> =
            (0..rays.len()).filter(|&j| vals[j] > T::zero()).collect();

        let tight = tight_sets(&rays, rows, &processed);
        let mut next: Vec<Vec<T>> = Vec::new();
        for (j, ray) in rays.iter().enumerate() {
            if vals[j] >= T::zero() {
                next.push(ray.clone());
            }
        }
        for &p in &pos {
            for &m in &neg {
                if !adjacent(&tight, p, m) {
                    continue;
                }
                // Positive combination landing on the new hyperplane.
                let mut r: Vec<T> = (0..dim)
                    .map(|c| {
                        vals[p].clone() * rays[m][c].clone()
                            - vals[m].clone() * rays[p][c].clone()
                    })
                    .collect();
                normalize_ray(&mut r);
                next.push(r);
            }
        }
        rays = next;
        processed.push(i);
    }
    Some(rays)
}

/// Scale a ray by a positive factor: homogenizing coordinate to one when
/// positive, otherwise first nonzero coordinate to ±1.
fn normalize_ray<T: ExactField>(ray: &mut [T]) {
    let pivot = if ray[0] > T::zero() {
        ray[0].clone()
    } else {
        match ray.iter().find(|v| !v.is_zero()) {
            Some(v) => v.abs(),
            None => return,
        }
    };
    for v in ray.iter_mut() {
        *v = v.clone() / pivot.clone();
    }
}

fn tight_sets<T: ExactField>(
    rays: &[Vec<T>],
    rows: &[Vec<T>],
    processed: &[usize],
) -> Vec<Vec<bool>> {
    rays.iter()
        .map(|ray| {
            processed
                .iter()
                .map(|&i| linalg::dot(&rows[i], ray).is_zero())
                .collect()
        })
        .collect()
}

/// Combinatorial adjacency: rays p and m are adjacent iff no third ray is
/// tight on every constraint both of them are tight on.
fn adjacent(tight: &[Vec<bool>], p: usize, m: usize) -> bool {
    let common: Vec<bool> =
        tight[p].iter().zip(&tight[m]).map(|(&a, &b)| a && b).collect();
    for (j, other) in tight.iter().enumerate() {
        if j == p || j == m {
            continue;
        }
        if common.iter().zip(other).all(|(&c, &o)| !c || o) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::LinearConstraint;
    use num_traits::One;

    fn qi(n: i64) -> Q {
        Q::new(n.into(), 1.into())
    }

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&n| qi(n)).collect()
    }

    fn eq(coeffs: Vec<(usize, i64)>, rhs: i64) -> LinearConstraint<Q> {
        LinearConstraint::eq(coeffs.into_iter().map(|(i, c)| (i, qi(c))).collect(), qi(rhs))
    }

    fn ge(coeffs: Vec<(usize, i64)>, rhs: i64) -> LinearConstraint<Q> {
        LinearConstraint::geq(coeffs.into_iter().map(|(i, c)| (i, qi(c))).collect(), qi(rhs))
    }

    fn cube(n: usize) -> HPolytope<Q> {
        let mut ineq = Vec::new();
        for i in 0..n {
            ineq.push(ge(vec![(i, 1)], 0));
            ineq.push(ge(vec![(i, -1)], -1));
        }
        HPolytope { ambient_dim: n, equalities: vec![], inequalities: ineq }
    }

    #[test]
    fn cube_vertices() {
        let v = enumerate_vertices(&cube(3)).unwrap();
        assert_eq!(v.len(), 8);
        for vert in &v.vertices {
            assert!(vert.iter().all(|x| x.is_zero() || x.is_one()));
            assert!(is_vertex(&cube(3), vert).unwrap());
        }
        assert_eq!(affine_dimension(&cube(3)).unwrap(), 3);
    }

    #[test]
    fn simplex_via_equality() {
        // x + y + z = 1, coords >= 0: a triangle in 3-space.
        let h = HPolytope {
            ambient_dim: 3,
            equalities: vec![eq(vec![(0, 1), (1, 1), (2, 1)], 1)],
            inequalities: (0..3).map(|i| ge(vec![(i, 1)], 0)).collect(),
        };
        let v = enumerate_vertices(&h).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(affine_dimension(&h).unwrap(), 2);
        // Canonical order is deterministic.
        let again = enumerate_vertices(&h).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn implicit_equality_detected() {
        // x >= 0 and -x >= 0 pin x = 0; y in [0,1].
        let h = HPolytope {
            ambient_dim: 2,
            equalities: vec![],
            inequalities: vec![
                ge(vec![(0, 1)], 0),
                ge(vec![(0, -1)], 0),
                ge(vec![(1, 1)], 0),
                ge(vec![(1, -1)], -1),
            ],
        };
        assert_eq!(implicit_equalities(&h).unwrap(), vec![0, 1]);
        assert_eq!(affine_dimension(&h).unwrap(), 1);
        let v = enumerate_vertices(&h).unwrap();
        assert_eq!(v.vertices, vec![qv(&[0, 0]), qv(&[0, 1])]);
    }

    #[test]
    fn unbounded_detected() {
        let h = HPolytope {
            ambient_dim: 2,
            equalities: vec![],
            inequalities: vec![ge(vec![(0, 1)], 0), ge(vec![(1, 1)], 0)],
        };
        assert_eq!(enumerate_vertices(&h).unwrap_err(), PolytopeError::Unbounded);
    }

    #[test]
    fn empty_polytope() {
        let h = HPolytope {
            ambient_dim: 1,
            equalities: vec![],
            inequalities: vec![ge(vec![(0, 1)], 1), ge(vec![(0, -1)], 0)],
        };
        assert!(enumerate_vertices(&h).unwrap().is_empty());
        assert_eq!(affine_dimension(&h).unwrap_err(), PolytopeError::Empty);
    }

    #[test]
    fn single_point_polytope() {
        let h = HPolytope {
            ambient_dim: 2,
            equalities: vec![eq(vec![(0, 1)], 1), eq(vec![(1, 1)], 2)],
            inequalities: vec![ge(vec![(0, 1)], 0), ge(vec![(1, 1)], 0)],
        };
        let v = enumerate_vertices(&h).unwrap();
        assert_eq!(v.vertices, vec![qv(&[1, 2])]);
        assert_eq!(affine_dimension(&h).unwrap(), 0);
    }

    #[test]
    fn membership_certificates() {
        let h = cube(2);
        let v = enumerate_vertices(&h).unwrap();
        let mid = vec![Q::new(1.into(), 2.into()), Q::new(1.into(), 2.into())];
        match contains(&h, Some(&v), &mid).unwrap() {
            MembershipCertificate::Member { weights: Some(w) } => {
                let total: Q = w.values().cloned().sum();
                assert!(total.is_one());
            }
            other => panic!("{other:?}"),
        }
        // H-form evaluation path.
        assert!(contains(&h, None, &mid).unwrap().is_member());
        let outside = qv(&[2, 0]);
        match contains(&h, Some(&v), &outside).unwrap() {
            MembershipCertificate::NotMember { separator } => {
                let at = linalg::dot(&separator.coeffs, &outside);
                assert!(at < separator.rhs);
            }
            other => panic!("{other:?}"),
        }
        match contains(&h, None, &outside).unwrap() {
            MembershipCertificate::NotMember { separator } => {
                assert!(linalg::dot(&separator.coeffs, &outside) < separator.rhs);
                for vert in &v.vertices {
                    assert!(linalg::dot(&separator.coeffs, vert) >= separator.rhs);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn is_vertex_cases() {
        let h = cube(2);
        assert!(is_vertex(&h, &qv(&[0, 1])).unwrap());
        let mid = vec![Q::new(1.into(), 2.into()), Q::zero()];
        assert!(!is_vertex(&h, &mid).unwrap());
        assert_eq!(is_vertex(&h, &qv(&[3, 0])).unwrap_err(), PolytopeError::NotInPolytope);
    }

    #[test]
    fn capacity_guardrail() {
        let h = HPolytope::<Q> { ambient_dim: 300, equalities: vec![], inequalities: vec![] };
        assert_eq!(
            enumerate_vertices(&h).unwrap_err(),
            PolytopeError::CapacityExceeded(300)
        );
    }

    #[test]
    fn vpolytope_json_roundtrip() {
        let v = enumerate_vertices(&cube(2)).unwrap();
        let back = VPolytope::from_json(&v.to_json()).unwrap();
        assert_eq!(back, v);
    }
}
