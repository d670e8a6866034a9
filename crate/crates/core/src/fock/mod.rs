//! Weights `b_α` and truncated weighted shifts on the full Fock space
//! `ℓ²(F_n^+)`.
//!
//! The weights are the coefficients of the formal geometric series
//! `Σ_k f^k`: `b_{g_0} = 1` and `b_α = Σ_{γβ = α, |γ| ≥ 1} a_γ b_β`. The shift
//! `W_i` sends `δ_α` to `√(b_α / b_{g_i α}) δ_{g_i α}` and annihilates the top
//! level of the truncation, so the span of short words stays invariant under
//! every `W_i*`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, psd_max_eigenvalue, SparseMatrix};
use crate::rational::{self, Rational};
use crate::symbol::{FreePolynomial, Word};

pub const DEFAULT_MAX_LEN: usize = 5;
pub const MAX_DIM: usize = 100_000;

/// Basis `{δ_α : |α| ≤ L}` in length-lex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedFock {
    n: usize,
    max_len: usize,
}

impl TruncatedFock {
    pub fn new(n: usize, max_len: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("alphabet size must be at least 1".into()));
        }
        let dim = Self::dim_for(n, max_len);
        match dim {
            Some(d) if d <= MAX_DIM => Ok(TruncatedFock { n, max_len }),
            _ => Err(Error::DimensionCap { dim: dim.unwrap_or(usize::MAX), cap: MAX_DIM }),
        }
    }

    fn dim_for(n: usize, max_len: usize) -> Option<usize> {
        let mut total: usize = 0;
        let mut level: usize = 1;
        for _ in 0..=max_len {
            total = total.checked_add(level)?;
            level = level.checked_mul(n)?;
        }
        Some(total)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn dim(&self) -> usize {
        Self::dim_for(self.n, self.max_len).expect("checked at construction")
    }

    /// Number of basis words shorter than `len`.
    fn offset(&self, len: usize) -> usize {
        (0..len).map(|l| self.n.pow(l as u32)).sum()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        if w.len() > self.max_len || w.letters().iter().any(|&l| l >= self.n) {
            return None;
        }
        let within = w.letters().iter().fold(0usize, |acc, &l| acc * self.n + l);
        Some(self.offset(w.len()) + within)
    }

    pub fn word_at(&self, mut idx: usize) -> Word {
        let mut len = 0;
        while idx >= self.n.pow(len as u32) {
            idx -= self.n.pow(len as u32);
            len += 1;
        }
        let mut letters = vec![0; len];
        for slot in letters.iter_mut().rev() {
            *slot = idx % self.n;
            idx /= self.n;
        }
        Word::new(letters)
    }

    pub fn basis(&self) -> Vec<Word> {
        Word::all_up_to(self.n, self.max_len)
    }
}

/// Exact weights `b_α` for all `|α| ≤ L`, indexed like [`TruncatedFock`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    space: TruncatedFock,
    weights: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightRow {
    pub word: Vec<usize>,
    pub b: String,
}

impl WeightTable {
    pub fn space(&self) -> TruncatedFock {
        self.space
    }

    pub fn get(&self, w: &Word) -> Option<&Rational> {
        self.space.index_of(w).map(|i| &self.weights[i])
    }

    pub fn by_index(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, &Rational)> + '_ {
        self.weights.iter().enumerate().map(|(i, b)| (self.space.word_at(i), b))
    }

    /// JSON rows `{"word": [...], "b": "p/q"}` in length-lex order.
    pub fn rows(&self) -> Vec<WeightRow> {
        self.iter()
            .map(|(w, b)| WeightRow { word: w.to_one_based(), b: rational::format(b) })
            .collect()
    }
}

pub fn compute_weights(f: &FreePolynomial, max_len: usize) -> Result<WeightTable> {
    f.ensure_valid()?;
    if max_len < 1 {
        return Err(Error::InvalidArgument("word-length cutoff must be at least 1".into()));
    }
    let space = TruncatedFock::new(f.n(), max_len)?;
    let deg = f.degree();
    let mut weights: Vec<Rational> = Vec::with_capacity(space.dim());
    for idx in 0..space.dim() {
        let alpha = space.word_at(idx);
        if alpha.is_empty() {
            weights.push(Rational::from_integer(1.into()));
            continue;
        }
        let mut b = Rational::zero();
        for k in 1..=alpha.len().min(deg) {
            let (gamma, beta) = alpha.split_at(k);
            if let Some(a) = f.terms().get(&gamma) {
                // β is shorter than α, so its weight is already known
                b += a * &weights[space.index_of(&beta).unwrap()];
            }
        }
        if !rational::is_positive(&b) {
            return Err(Error::Internal(format!("weight for {alpha:?} is not positive")));
        }
        weights.push(b);
    }
    Ok(WeightTable { space, weights })
}

/// Truncated weighted shifts `W_1, …, W_n`.
#[derive(Debug, Clone)]
pub struct ShiftFamily {
    weights: WeightTable,
    shifts: Vec<SparseMatrix>,
}

impl ShiftFamily {
    pub fn space(&self) -> TruncatedFock {
        self.weights.space
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    pub fn shift(&self, i: usize) -> &SparseMatrix {
        &self.shifts[i]
    }

    pub fn shifts(&self) -> &[SparseMatrix] {
        &self.shifts
    }

    /// `W_α = W_{i_1} ⋯ W_{i_k}`; the identity for the empty word.
    pub fn word_operator(&self, alpha: &Word) -> Result<SparseMatrix> {
        let space = self.space();
        if alpha.letters().iter().any(|&l| l >= space.n()) {
            return Err(Error::IndexOutOfRange { index: alpha.alphabet_bound(), n: space.n() });
        }
        let dim = space.dim();
        let identity = SparseMatrix::new(
            dim,
            dim,
            (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect(),
        );
        Ok(alpha
            .letters()
            .iter()
            .fold(identity, |acc, &l| acc.matmul(&self.shifts[l])))
    }

    /// `Σ_α a_α W_α W_α*`.
    pub fn defect_operator(&self, f: &FreePolynomial) -> Result<SparseMatrix> {
        let dim = self.space().dim();
        let mut sum = SparseMatrix::zeros(dim, dim);
        for (w, a) in f.terms() {
            let wa = self.word_operator(w)?;
            let term = wa.matmul(&wa.adjoint()).scale(Complex64::new(rational::to_f64(a), 0.0));
            sum = sum.add(&term);
        }
        Ok(sum)
    }
}

pub fn build_shifts(f: &FreePolynomial, max_len: usize) -> Result<ShiftFamily> {
    let weights = compute_weights(f, max_len)?;
    let space = weights.space;
    let dim = space.dim();
    let shifts = (0..f.n())
        .map(|i| {
            let entries = (0..dim)
                .filter_map(|col| {
                    let alpha = space.word_at(col);
                    if alpha.len() == space.max_len() {
                        return None;
                    }
                    let target = alpha.prepend(i);
                    let row = space.index_of(&target).unwrap();
                    let ratio = weights.by_index(col) / weights.by_index(row);
                    Some((row, col, Complex64::new(rational::to_f64(&ratio).sqrt(), 0.0)))
                })
                .collect();
            SparseMatrix::new(dim, dim, entries)
        })
        .collect();
    Ok(ShiftFamily { weights, shifts })
}

/// Operator norm of the truncated `W_α`; equals `1/√b_α`, attained at `δ_{g_0}`.
pub fn shift_norm(f: &FreePolynomial, alpha: &Word, max_len: usize) -> Result<f64> {
    if alpha.len() > max_len {
        return Err(Error::InvalidArgument(format!(
            "word of length {} exceeds the cutoff {max_len}",
            alpha.len()
        )));
    }
    let family = build_shifts(f, max_len)?;
    Ok(operator_norm(&family.word_operator(alpha)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub max_len: usize,
    pub dim: usize,
    pub max_eigenvalue: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Checks `Σ a_α W_α W_α* ≤ 1` on the truncation.
pub fn verify_shift_membership(f: &FreePolynomial, max_len: usize, tol: f64) -> Result<MembershipReport> {
    let family = build_shifts(f, max_len)?;
    verify_family_membership(f, &family, tol)
}

pub fn verify_family_membership(f: &FreePolynomial, family: &ShiftFamily, tol: f64) -> Result<MembershipReport> {
    let max_eigenvalue = psd_max_eigenvalue(&family.defect_operator(f)?);
    Ok(MembershipReport {
        max_len: family.space().max_len(),
        dim: family.space().dim(),
        max_eigenvalue,
        tol,
        passed: max_eigenvalue <= 1.0 + tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PythagorasReport {
    /// `‖Σ c_j W_{α_j}‖²`
    pub combined_norm_sq: f64,
    /// `Σ |c_j|² ‖W_{α_j}‖²`
    pub weighted_sum: f64,
    pub residual: f64,
}

/// `| ‖Σ c_j W_{α_j}‖² − Σ |c_j|² ‖W_{α_j}‖² |` for distinct words of one length.
pub fn pythagoras_residual(
    f: &FreePolynomial,
    words: &[Word],
    coeffs: &[Complex64],
    max_len: usize,
) -> Result<PythagorasReport> {
    let family = build_shifts(f, max_len)?;
    pythagoras_on_family(&family, words, coeffs)
}

pub fn pythagoras_on_family(family: &ShiftFamily, words: &[Word], coeffs: &[Complex64]) -> Result<PythagorasReport> {
    if words.len() != coeffs.len() {
        return Err(Error::DimensionMismatch("one coefficient per word is required".into()));
    }
    let Some(first) = words.first() else {
        return Err(Error::InvalidArgument("empty word family".into()));
    };
    if words.iter().any(|w| w.len() != first.len()) {
        return Err(Error::InvalidArgument("words have mixed lengths".into()));
    }
    let mut sorted = words.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::InvalidArgument("duplicate words".into()));
    }
    if first.len() > family.space().max_len() {
        return Err(Error::InvalidArgument("words longer than the cutoff".into()));
    }
    let dim = family.space().dim();
    let mut combined = SparseMatrix::zeros(dim, dim);
    let mut weighted_sum = 0.0;
    for (w, &c) in words.iter().zip(coeffs) {
        let op = family.word_operator(w)?;
        weighted_sum += c.norm_sqr() * operator_norm(&op).powi(2);
        combined = combined.add(&op.scale(c));
    }
    let combined_norm_sq = operator_norm(&combined).powi(2);
    Ok(PythagorasReport {
        combined_norm_sq,
        weighted_sum,
        residual: (combined_norm_sq - weighted_sum).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::symbol::parse_symbol;

    fn sym(s: &str) -> FreePolynomial {
        parse_symbol(s, None).unwrap()
    }

    fn w(letters: &[usize]) -> Word {
        Word::from_one_based(letters).unwrap()
    }

    #[test]
    fn basis_indexing() {
        let space = TruncatedFock::new(3, 3).unwrap();
        assert_eq!(space.dim(), 40);
        for (i, word) in space.basis().iter().enumerate() {
            assert_eq!(space.index_of(word), Some(i));
            assert_eq!(&space.word_at(i), word);
        }
        assert_eq!(TruncatedFock::new(1, 4).unwrap().dim(), 5);
        assert!(matches!(TruncatedFock::new(2, 17), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn weights_examples() {
        let disk = compute_weights(&sym("X1 + X2 + X3"), 3).unwrap();
        assert!(disk.iter().all(|(_, b)| *b == int(1)));

        let two = compute_weights(&sym("2 X1"), 4).unwrap();
        for k in 0..=4usize {
            assert_eq!(two.get(&Word::new(vec![0; k])).unwrap(), &int(1 << k));
        }

        let f = compute_weights(&sym("X1 + X2 + 3 X1*X2"), 2).unwrap();
        assert_eq!(f.get(&w(&[1])).unwrap(), &int(1));
        assert_eq!(f.get(&w(&[2])).unwrap(), &int(1));
        assert_eq!(f.get(&w(&[1, 1])).unwrap(), &int(1));
        assert_eq!(f.get(&w(&[2, 1])).unwrap(), &int(1));
        assert_eq!(f.get(&w(&[1, 2])).unwrap(), &int(4));

        assert!(compute_weights(&sym("X1"), 0).is_err());
        assert!(compute_weights(&parse_symbol("X2", Some(2)).unwrap(), 2).is_err());
    }

    #[test]
    fn shift_examples() {
        let s = build_shifts(&sym("X1"), 2).unwrap();
        let d = s.shift(0).to_dense();
        assert_eq!(d[(1, 0)].re, 1.0);
        assert_eq!(d[(2, 1)].re, 1.0);
        assert_eq!(s.shift(0).nnz(), 2);

        let s = build_shifts(&sym("2 X1"), 2).unwrap();
        let d = s.shift(0).to_dense();
        assert!((d[(1, 0)].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((d[(2, 1)].re - 0.5f64.sqrt()).abs() < 1e-15);

        let s = build_shifts(&sym("X1 + X2"), 1).unwrap();
        assert_eq!(s.shift(0).entries(), &[(1, 0, Complex64::new(1.0, 0.0))]);
        assert_eq!(s.shift(1).entries(), &[(2, 0, Complex64::new(1.0, 0.0))]);
    }

    #[test]
    fn shifts_have_one_entry_per_row_and_column() {
        let s = build_shifts(&sym("X1 + 2 X2 + X1*X2 + 1/2 X2*X2*X1"), 4).unwrap();
        for op in s.shifts() {
            let mut rows = std::collections::HashSet::new();
            let mut cols = std::collections::HashSet::new();
            for &(r, c, _) in op.entries() {
                assert!(rows.insert(r));
                assert!(cols.insert(c));
            }
        }
    }

    #[test]
    fn shift_norm_examples() {
        for word in [w(&[1]), w(&[2, 1]), w(&[1, 2, 2])] {
            let norm = shift_norm(&sym("X1 + X2"), &word, word.len()).unwrap();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        let norm = shift_norm(&sym("2 X1"), &w(&[1, 1]), 2).unwrap();
        assert!((norm - 0.5).abs() < 1e-12);
        let norm = shift_norm(&sym("X1 + X2 + 3 X1*X2"), &w(&[1, 2]), 2).unwrap();
        assert!((norm - 0.5).abs() < 1e-12);
        assert!(shift_norm(&sym("X1"), &w(&[1, 1, 1]), 2).is_err());
    }

    #[test]
    fn membership_examples() {
        let r = verify_shift_membership(&sym("X1 + X2"), 3, 1e-9).unwrap();
        assert!(r.passed);
        assert!((r.max_eigenvalue - 1.0).abs() < 1e-12);
        assert!(verify_shift_membership(&sym("2 X1"), 4, 1e-9).unwrap().passed);
        assert!(verify_shift_membership(&sym("X1 + X2 + 3 X1*X2"), 4, 1e-9).unwrap().passed);
    }

    #[test]
    fn membership_detects_wrong_weights() {
        // weights of the disk symbol do not model a symbol with a larger quadratic part
        let disk = build_shifts(&sym("X1 + X2"), 3).unwrap();
        let r = verify_family_membership(&sym("X1 + X2 + X1*X2"), &disk, 1e-9).unwrap();
        assert!(!r.passed, "{r:?}");
    }

    #[test]
    fn pythagoras_examples() {
        let c1 = Complex64::new(1.0, 0.0);
        let r = pythagoras_residual(&sym("X1 + X2"), &[w(&[1]), w(&[2])], &[c1, c1], 2).unwrap();
        assert!(r.residual < 1e-12);
        assert!((r.combined_norm_sq - 2.0).abs() < 1e-12);

        let r = pythagoras_residual(&sym("X1 + X2"), &[w(&[2])], &[Complex64::new(0.3, -2.0)], 2).unwrap();
        assert!(r.residual < 1e-12);

        let r = pythagoras_residual(&sym("X1 + X2 + 3 X1*X2"), &[w(&[1, 2]), w(&[2, 1])], &[c1, c1], 3).unwrap();
        assert!(r.residual < 1e-12);
        assert!((r.combined_norm_sq - 1.25).abs() < 1e-12);

        assert!(pythagoras_residual(&sym("X1 + X2"), &[w(&[1]), w(&[1, 2])], &[c1, c1], 2).is_err());
        assert!(pythagoras_residual(&sym("X1 + X2"), &[w(&[1]), w(&[1])], &[c1, c1], 2).is_err());
    }
}
