//! Dense exact linear algebra over a generic field.
//!
//! First-nonzero pivoting everywhere: with exact scalars a pivot is a pivot,
//! and the fixed choice keeps every downstream computation deterministic.

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: Vec<T>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].clone() * inv.clone();
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        self[(i, j)] = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Mat<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = T::one();
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(k, &c)| k != c) {
            return None;
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Outcome of reducing the linear system A x = b.
pub struct AffineSolution<T> {
    /// One solution of the system.
    pub particular: Vec<T>,
    /// Basis of the nullspace of A; the solution set is particular + span.
    pub nullspace: Vec<Vec<T>>,
}

/// Solve A x = b exactly. `None` when inconsistent.
pub fn solve_affine<T: Scalar>(a: &Mat<T>, b: &[T]) -> Option<AffineSolution<T>> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = Mat::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let pivots = aug.rref();
    if pivots.contains(&n) {
        return None; // a row reduces to 0 = 1
    }
    let mut particular = vec![T::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[(r, n)].clone();
    }
    let mut free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.sort_unstable();
    let mut nullspace = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![T::zero(); n];
        v[f] = T::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = T::zero() - aug[(r, f)].clone();
        }
        nullspace.push(v);
    }
    Some(AffineSolution { particular, nullspace })
}

/// Euclidean projection of `point` onto the affine subspace {x : E x = f},
/// computed exactly via the KKT system of the least-squares problem.
///
/// Redundant rows are fine; a row basis is extracted first. `None` when the
/// system is inconsistent.
pub fn project_onto_affine<T: Scalar>(point: &[T], e: &Mat<T>, f: &[T]) -> Option<Vec<T>> {
    assert_eq!(e.rows(), f.len());
    assert_eq!(e.cols(), point.len());
    let n = point.len();

    // Row basis of [E | f].
    let mut aug = Mat::zeros(e.rows(), n + 1);
    for i in 0..e.rows() {
        for j in 0..n {
            aug[(i, j)] = e[(i, j)].clone();
        }
        aug[(i, n)] = f[i].clone();
    }
    let pivots = aug.rref();
    if pivots.contains(&n) {
        return None;
    }
    let m = pivots.len();
    if m == 0 {
        return Some(point.to_vec());
    }

    // KKT: [I Rᵀ; R 0] [x; λ] = [point; g] with R the reduced row basis.
    let mut kkt = Mat::zeros(n + m, n + m);
    let mut rhs = vec![T::zero(); n + m];
    for i in 0..n {
        kkt[(i, i)] = T::one();
        rhs[i] = point[i].clone();
    }
    for r in 0..m {
        for j in 0..n {
            kkt[(n + r, j)] = aug[(r, j)].clone();
            kkt[(j, n + r)] = aug[(r, j)].clone();
        }
        rhs[n + r] = aug[(r, n)].clone();
    }
    let sol = solve_affine(&kkt, &rhs)?;
    Some(sol.particular[..n].to_vec())
}
