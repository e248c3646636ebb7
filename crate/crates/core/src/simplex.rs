//! Exact simplex over an ordered field.
//!
//! Two-phase tableau method with Bland's rule, so every pivot decision is an
//! exact comparison and the solver cannot cycle. Infeasibility comes with a
//! Farkas certificate read off the artificial columns.

use crate::constraints::{HPolytope, Relation};
use crate::linalg::Mat;
use crate::scalar::ExactField;

/// Result of maximizing cᵀx subject to Ax = b, x ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { value: T, solution: Vec<T> },
    Unbounded,
    /// Certificate y with yᵀA ≥ 0 componentwise and yᵀb < 0.
    Infeasible { farkas: Vec<T> },
}

struct Tableau<T> {
    // rows x (cols + 1); last column is the rhs
    t: Mat<T>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    obj: Vec<T>, // current objective coefficients per column
}

impl<T: ExactField> Tableau<T> {
    fn reduced_cost(&self, j: usize) -> T {
        // z_j - c_j with z_j = c_Bᵀ B⁻¹ A_j
        let mut z = T::zero();
        for i in 0..self.rows {
            let cb = self.obj[self.basis[i]].clone();
            if !cb.is_zero() {
                z = z + cb * self.t[(i, j)].clone();
            }
        }
        z - self.obj[j].clone()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = T::one() / self.t[(row, col)].clone();
        for j in 0..=self.cols {
            self.t[(row, j)] = self.t[(row, j)].clone() * inv.clone();
        }
        for i in 0..self.rows {
            if i != row && !self.t[(i, col)].is_zero() {
                let f = self.t[(i, col)].clone();
                for j in 0..=self.cols {
                    self.t[(i, j)] =
                        self.t[(i, j)].clone() - f.clone() * self.t[(row, j)].clone();
                }
            }
        }
        self.basis[row] = col;
    }

    /// Bland: entering = lowest-index column with negative reduced cost;
    /// leaving = lowest-index basic variable among the minimal ratios.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<(), Unbounded> {
        loop {
            let mut entering = None;
            for j in 0..self.cols {
                if allowed(j) && !self.basis.contains(&j) && self.reduced_cost(j) < T::zero() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(T, usize)> = None;
            for i in 0..self.rows {
                let a = self.t[(i, col)].clone();
                if a > T::zero() {
                    let ratio = self.t[(i, self.cols)].clone() / a;
                    let better = match &best {
                        None => true,
                        Some((r, bi)) => {
                            ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            let Some((_, row)) = best else {
                return Err(Unbounded);
            };
            self.pivot(row, col);
        }
    }

    fn solution(&self, nvars: usize) -> Vec<T> {
        let mut x = vec![T::zero(); nvars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < nvars {
                x[b] = self.t[(i, self.cols)].clone();
            }
        }
        x
    }

    fn objective_value(&self) -> T {
        let mut v = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.obj[b].clone();
            if !cb.is_zero() {
                v = v + cb * self.t[(i, self.cols)].clone();
            }
        }
        v
    }
}

struct Unbounded;

/// Maximize cᵀx subject to A x = b, x ≥ 0 (standard form), exactly.
pub fn solve_standard<T: ExactField>(a: &Mat<T>, b: &[T], c: &[T]) -> LpOutcome<T> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);

    // Flip rows so rhs >= 0, then append one artificial per row.
    let cols = n + m;
    let mut t = Mat::zeros(m, cols + 1);
    for i in 0..m {
        let flip = b[i] < T::zero();
        for j in 0..n {
            let v = a[(i, j)].clone();
            t[(i, j)] = if flip { T::zero() - v } else { v };
        }
        t[(i, cols)] = if flip { T::zero() - b[i].clone() } else { b[i].clone() };
        t[(i, n + i)] = T::one();
    }

    // Phase 1: maximize -(sum of artificials); bounded, cannot be unbounded.
    let mut obj = vec![T::zero(); cols];
    for slot in obj.iter_mut().skip(n) {
        *slot = T::zero() - T::one();
    }
    let basis = (n..cols).collect();
    let mut tab = Tableau { t, rows: m, cols, basis, obj };
    if tab.run(&|_| true).is_err() {
        unreachable!("phase 1 objective is bounded above by zero");
    }

    let p1 = tab.objective_value();
    if p1 < T::zero() {
        // Infeasible. Dual y from the artificial columns: the reduced cost of
        // artificial i is yᵀe_i + 1, and row flips fold back into y.
        let mut farkas = Vec::with_capacity(m);
        for i in 0..m {
            let y_i = tab.reduced_cost(n + i) - T::one();
            let flip = b[i] < T::zero();
            farkas.push(if flip { T::zero() - y_i } else { y_i });
        }
        debug_assert!({
            let yb = (0..m)
                .map(|i| farkas[i].clone() * b[i].clone())
                .fold(T::zero(), |acc, v| acc + v);
            yb < T::zero()
        });
        return LpOutcome::Infeasible { farkas };
    }

    // Drive lingering artificials out of the basis with degenerate pivots;
    // a row with no nonzero structural entry is redundant and its artificial
    // is pinned at zero for good.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[(i, j)].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase 2 over the original objective; artificials may not re-enter.
    tab.obj = {
        let mut o = vec![T::zero(); cols];
        o[..n].clone_from_slice(c);
        o
    };
    match tab.run(&|j| j < n) {
        Ok(()) => LpOutcome::Optimal { value: tab.objective_value(), solution: tab.solution(n) },
        Err(Unbounded) => LpOutcome::Unbounded,
    }
}

/// Maximize a linear objective over an H-polytope with free variables.
///
/// Conversion to standard form: x = u − w with u, w ≥ 0 and one surplus
/// variable per inequality (cᵀx − s = rhs).
pub fn optimize<T: ExactField>(h: &HPolytope<T>, objective: &[T]) -> LpOutcome<T> {
    assert_eq!(objective.len(), h.ambient_dim);
    let n = h.ambient_dim;
    let rows: Vec<_> = h.equalities.iter().chain(&h.inequalities).collect();
    let m = rows.len();
    let nslack = h.inequalities.len();
    let total = 2 * n + nslack;
    let mut a = Mat::zeros(m, total);
    let mut b = Vec::with_capacity(m);
    let mut slack = 0;
    for (i, cons) in rows.iter().enumerate() {
        for (&j, v) in &cons.coeffs {
            a[(i, j)] = v.clone();
            a[(i, n + j)] = T::zero() - v.clone();
        }
        if cons.relation == Relation::Geq {
            a[(i, 2 * n + slack)] = T::zero() - T::one();
            slack += 1;
        }
        b.push(cons.rhs.clone());
    }
    let mut c = vec![T::zero(); total];
    for j in 0..n {
        c[j] = objective[j].clone();
        c[n + j] = T::zero() - objective[j].clone();
    }
    match solve_standard(&a, &b, &c) {
        LpOutcome::Optimal { value, solution } => {
            let x = (0..n).map(|j| solution[j].clone() - solution[n + j].clone()).collect();
            LpOutcome::Optimal { value, solution: x }
        }
        other => other,
    }
}

/// A point of the polytope, or `None` when it is empty.
pub fn feasible_point<T: ExactField>(h: &HPolytope<T>) -> Option<Vec<T>> {
    match optimize(h, &vec![T::zero(); h.ambient_dim]) {
        LpOutcome::Optimal { solution, .. } => Some(solution),
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
        LpOutcome::Infeasible { .. } => None,
    }
}

/// Membership of `point` in the convex hull of `vertices`.
#[derive(Debug, Clone, PartialEq)]
pub enum HullMembership<T> {
    /// Convex weights over vertex indices reproducing the point exactly.
    Inside(Vec<(usize, T)>),
    /// Hyperplane with coeffs·point < rhs ≤ coeffs·v for every vertex v.
    Separated { coeffs: Vec<T>, rhs: T },
}

/// Decide p ∈ conv(vertices) by exact feasibility of
/// { Σ wⱼ vⱼ = p, Σ wⱼ = 1, w ≥ 0 }; an infeasibility certificate is turned
/// into a separating hyperplane and re-verified before being returned.
pub fn hull_membership<T: ExactField>(vertices: &[Vec<T>], point: &[T]) -> HullMembership<T> {
    let dim = point.len();
    assert!(vertices.iter().all(|v| v.len() == dim));
    let k = vertices.len();
    let mut a = Mat::zeros(dim + 1, k);
    let mut b = Vec::with_capacity(dim + 1);
    for i in 0..dim {
        for (j, v) in vertices.iter().enumerate() {
            a[(i, j)] = v[i].clone();
        }
        b.push(point[i].clone());
    }
    for j in 0..k {
        a[(dim, j)] = T::one();
    }
    b.push(T::one());

    match solve_standard(&a, &b, &vec![T::zero(); k]) {
        LpOutcome::Optimal { solution, .. } => {
            let weights = solution
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .collect();
            HullMembership::Inside(weights)
        }
        LpOutcome::Infeasible { farkas } => {
            // y = (coeff vector, offset): yᵀcolumn_j ≥ 0 for all j and
            // yᵀ(p, 1) < 0, i.e. coeffs·vⱼ ≥ −offset > coeffs·p.
            let coeffs: Vec<T> = farkas[..dim].to_vec();
            let rhs = T::zero() - farkas[dim].clone();
            let at_point = crate::linalg::dot(&coeffs, point);
            assert!(at_point < rhs, "separator failed at the query point");
            for v in vertices {
                assert!(crate::linalg::dot(&coeffs, v) >= rhs, "separator failed at a vertex");
            }
            HullMembership::Separated { coeffs, rhs }
        }
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}
