//! Dense and sparse complex linear algebra used by the Fock and matrix-level
//! checks: Hermitian top eigenvalues, operator norms and rank.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Matrices up to this dimension use dense decompositions; larger ones use
/// power iteration on the sparse operator.
pub const DENSE_LIMIT: usize = 512;

const POWER_MAX_ITERS: usize = 20_000;
const POWER_REL_TOL: f64 = 1e-15;

/// Complex sparse matrix in merged triplet form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, Complex64)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (c, r));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            debug_assert!(r < rows && c < cols);
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != Complex64::new(0.0, 0.0));
        SparseMatrix { rows, cols, entries: merged }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Nonzero entries ordered by column, then row.
    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.0 == r && e.1 == c)
            .map_or(Complex64::new(0.0, 0.0), |e| e.2)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.cols];
        for &(r, c, v) in &self.entries {
            y[c] += v.conj() * x[r];
        }
        y
    }

    pub fn adjoint(&self) -> SparseMatrix {
        SparseMatrix::new(
            self.cols,
            self.rows,
            self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> SparseMatrix {
        SparseMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect(),
        )
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut e = self.entries.clone();
        e.extend_from_slice(&other.entries);
        SparseMatrix::new(self.rows, self.cols, e)
    }

    /// `self · other`.
    pub fn matmul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        // index self's entries by column (= other's row)
        let mut by_col: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.cols];
        for &(r, c, v) in &self.entries {
            by_col[c].push((r, v));
        }
        let mut out = Vec::new();
        for &(k, c, w) in &other.entries {
            for &(r, v) in &by_col[k] {
                out.push((r, c, v * w));
            }
        }
        SparseMatrix::new(self.rows, other.cols, out)
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// One `row col re im` line per nonzero entry (1-based indices).
    pub fn to_triplets(&self) -> String {
        let mut s = String::new();
        for &(r, c, v) in &self.entries {
            s.push_str(&format!("{} {} {:.17e} {:.17e}\n", r + 1, c + 1, v.re, v.im));
        }
        s
    }
}

/// Largest eigenvalue of a Hermitian matrix (the Hermitian part is used).
pub fn hermitian_max_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Largest singular value.
pub fn dense_operator_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let sv = m.singular_values();
    sv.iter().cloned().fold(0.0, f64::max)
}

/// Operator norm `√λ_max(A*A)`, via [`psd_max_eigenvalue`] on the Gram matrix.
pub fn operator_norm(a: &SparseMatrix) -> f64 {
    psd_max_eigenvalue(&a.adjoint().matmul(a)).max(0.0).sqrt()
}

/// Largest eigenvalue of a positive semidefinite sparse matrix.
///
/// The matrix is split into the connected blocks of its nonzero pattern;
/// each block is solved densely up to [`DENSE_LIMIT`] and by power iteration
/// above.
pub fn psd_max_eigenvalue(a: &SparseMatrix) -> f64 {
    assert_eq!(a.rows(), a.cols());
    let blocks = pattern_blocks(a);
    let mut local = vec![usize::MAX; a.rows()];
    let mut best = 0.0f64;
    let mut block_entries: Vec<Vec<(usize, usize, Complex64)>> = vec![Vec::new(); blocks.len()];
    let mut block_of = vec![usize::MAX; a.rows()];
    for (b, rows) in blocks.iter().enumerate() {
        for (k, &r) in rows.iter().enumerate() {
            local[r] = k;
            block_of[r] = b;
        }
    }
    for &(r, c, v) in a.entries() {
        block_entries[block_of[r]].push((local[r], local[c], v));
    }
    for (rows, entries) in blocks.iter().zip(block_entries) {
        let dim = rows.len();
        let top = if dim <= DENSE_LIMIT {
            let mut m = CMatrix::zeros(dim, dim);
            for (r, c, v) in entries {
                m[(r, c)] += v;
            }
            hermitian_max_eigenvalue(&m)
        } else {
            let sub = SparseMatrix::new(dim, dim, entries);
            power_iteration(dim, |x| sub.mul_vec(x))
        };
        best = best.max(top);
    }
    best
}

/// Connected components of the symmetric nonzero pattern of a square matrix,
/// skipping indices with no entries at all.
fn pattern_blocks(a: &SparseMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut touched = vec![false; n];
    for &(r, c, _) in a.entries() {
        touched[r] = true;
        touched[c] = true;
        let (ra, rb) = (find(&mut parent, r), find(&mut parent, c));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in (0..n).filter(|&i| touched[i]) {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Dominant eigenvalue of a positive semidefinite operator given by `apply`.
pub fn power_iteration(dim: usize, apply: impl Fn(&[Complex64]) -> Vec<Complex64>) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    // deterministic start with a component along every basis vector
    let mut x: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::new(1.0 + 1e-3 * ((i * 7919) % 101) as f64, 0.0))
        .collect();
    normalize(&mut x);
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let mut y = apply(&x);
        let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        let norm = normalize(&mut y);
        if norm == 0.0 {
            return 0.0;
        }
        x = y;
        if (rayleigh - estimate).abs() <= POWER_REL_TOL * rayleigh.abs().max(1e-300) {
            return rayleigh;
        }
        estimate = rayleigh;
    }
    estimate
}

fn normalize(x: &mut [Complex64]) -> f64 {
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

/// Numerical rank: singular values above `rel_tol · σ_max`.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// `max |(U*U − I)_{ij}|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u - CMatrix::identity(n, n);
    g.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = SparseMatrix::new(3, 3, vec![(1, 0, c(2.0)), (2, 1, c(3.0)), (0, 2, Complex64::new(0.0, 1.0))]);
        let b = SparseMatrix::new(3, 3, vec![(0, 0, c(1.0)), (2, 1, c(-1.0)), (1, 1, c(4.0))]);
        let dense = a.to_dense() * b.to_dense();
        assert_eq!(a.matmul(&b).to_dense(), dense);
        assert_eq!(a.adjoint().to_dense(), a.to_dense().adjoint());
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        // diagonal-plus-shift operator of dimension 600 exercises the sparse path
        let n = 600;
        let mut e: Vec<_> = (0..n).map(|i| (i, i, c(1.0 + (i % 7) as f64 * 0.1))).collect();
        e.push((0, 1, c(0.3)));
        e.push((1, 0, c(0.3)));
        let a = SparseMatrix::new(n, n, e);
        let dense = hermitian_max_eigenvalue(&a.to_dense());
        let blocked = psd_max_eigenvalue(&a);
        assert!((blocked - dense).abs() < 1e-9, "{blocked} vs {dense}");
        let power = power_iteration(n, |x| a.mul_vec(x));
        assert!((power - dense).abs() < 1e-9, "{power} vs {dense}");
        let norm = operator_norm(&a);
        assert!((norm - dense_operator_norm(&a.to_dense())).abs() < 1e-9);
    }

    #[test]
    fn large_connected_block_uses_power_iteration() {
        // a path of 700 vertices is one block above the dense limit
        let n = 700;
        let mut e: Vec<_> = (0..n).map(|i| (i, i, c(if i == 0 { 6.0 } else { 2.0 }))).collect();
        for i in 0..n - 1 {
            e.push((i, i + 1, c(-1.0)));
            e.push((i + 1, i, c(-1.0)));
        }
        let a = SparseMatrix::new(n, n, e);
        let expected = hermitian_max_eigenvalue(&a.to_dense());
        let got = psd_max_eigenvalue(&a);
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn rank_and_unitarity() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert_eq!(rank(&m, 1e-8), 1);
        assert!(unitarity_defect(&CMatrix::identity(3, 3)) < 1e-15);
        assert!(unitarity_defect(&m) > 1.0);
    }
}
