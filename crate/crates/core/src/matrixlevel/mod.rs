//! Matrix-level domains `𝔻_f^k = { T ∈ M_k^n : Σ a_α T_α T_α* < 1 }`: word
//! evaluation, membership, dual maps and free holomorphic maps.

mod cartan;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use cartan::{cartan_forced_zeros, cartan_forced_zeros_with, LevelSummary, LinearityReport, RelationMatrix};

use crate::error::{Error, Result};
use crate::io::ComplexJson;
use crate::linalg::{hermitian_max_eigenvalue, rank, CMatrix};
use crate::rational;
use crate::symbol::{FreePolynomial, Word};

pub const DEFAULT_EIG_TOL: f64 = 1e-10;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-8;
const MAX_RESEEDS: u64 = 32;

/// `n` square complex matrices of a common size `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<CMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::InvalidArgument("a tuple needs at least one matrix".into()));
        };
        let k = first.nrows();
        if k == 0 || mats.iter().any(|m| m.nrows() != k || m.ncols() != k) {
            return Err(Error::DimensionMismatch("tuple entries must be square of one common size".into()));
        }
        Ok(MatrixTuple { mats })
    }

    /// Scalar point `z ∈ C^n` as a level-1 tuple.
    pub fn scalar(z: &[Complex64]) -> Result<Self> {
        Self::new(z.iter().map(|&x| CMatrix::from_element(1, 1, x)).collect())
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn level(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.mats[i]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn scale(&self, s: Complex64) -> MatrixTuple {
        MatrixTuple { mats: self.mats.iter().map(|m| m * s).collect() }
    }

    /// `T_i ↦ e^{iθ_i} T_i`.
    pub fn rotate(&self, phases: &[f64]) -> MatrixTuple {
        MatrixTuple {
            mats: self
                .mats
                .iter()
                .zip(phases)
                .map(|(m, &th)| m * Complex64::from_polar(1.0, th))
                .collect(),
        }
    }
}

/// `T_{i_1} ⋯ T_{i_k}`; the identity for the empty word.
pub fn evaluate_word(t: &MatrixTuple, alpha: &Word) -> Result<CMatrix> {
    if let Some(&l) = alpha.letters().iter().find(|&&l| l >= t.n()) {
        return Err(Error::IndexOutOfRange { index: l + 1, n: t.n() });
    }
    let k = t.level();
    Ok(alpha
        .letters()
        .iter()
        .fold(CMatrix::identity(k, k), |acc, &l| acc * &t.mats[l]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixMembership {
    pub max_eigenvalue: f64,
    pub member: bool,
    pub strict: bool,
    pub tol: f64,
    /// `1 − max_eigenvalue`: distance to the boundary, negative outside.
    pub margin: f64,
}

/// `Σ_α a_α T_α T_α*`.
pub fn defining_operator(f: &FreePolynomial, t: &MatrixTuple) -> Result<CMatrix> {
    if t.n() != f.n() {
        return Err(Error::DimensionMismatch(format!(
            "tuple has {} matrices, symbol has {} variables",
            t.n(),
            f.n()
        )));
    }
    let k = t.level();
    let mut sum = CMatrix::zeros(k, k);
    for (w, a) in f.terms() {
        let ta = evaluate_word(t, w)?;
        sum += (&ta * ta.adjoint()) * Complex64::new(rational::to_f64(a), 0.0);
    }
    Ok(sum)
}

/// Largest eigenvalue of `Σ a_α T_α T_α*`; membership is `< 1 − tol` in the
/// interior (`strict`) or `≤ 1 + tol` in the closed domain.
pub fn matrix_membership(f: &FreePolynomial, t: &MatrixTuple, strict: bool, tol: f64) -> Result<MatrixMembership> {
    f.ensure_valid()?;
    let max_eigenvalue = hermitian_max_eigenvalue(&defining_operator(f, t)?);
    let member = if strict {
        max_eigenvalue < 1.0 - tol
    } else {
        max_eigenvalue <= 1.0 + tol
    };
    Ok(MatrixMembership {
        max_eigenvalue,
        member,
        strict,
        tol,
        margin: 1.0 - max_eigenvalue,
    })
}

/// `S_i = Σ_j M[i][j] T_j`.
pub fn dual_map_apply(m: &CMatrix, t: &MatrixTuple) -> Result<MatrixTuple> {
    if m.nrows() != t.n() || m.ncols() != t.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} matrix cannot act on a {}-tuple",
            m.nrows(),
            m.ncols(),
            t.n()
        )));
    }
    let k = t.level();
    let mats = (0..t.n())
        .map(|i| {
            (0..t.n()).fold(CMatrix::zeros(k, k), |acc, j| acc + &t.mats[j] * m[(i, j)])
        })
        .collect();
    MatrixTuple::new(mats)
}

/// Coefficients `c[j][α]`, `1 ≤ |α| ≤ D`, of an origin-fixing free map
/// `F = (Σ_α c_{1,α} X_α, …, Σ_α c_{n,α} X_α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeMapCoefficients {
    n: usize,
    degree: usize,
    coords: Vec<BTreeMap<Word, Complex64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeMapTermJson {
    pub word: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// `{"n": 2, "degree": 2, "coords": [[{"word": [1], "re": 1.0, "im": 0.0}, …], …]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeMapJson {
    pub n: usize,
    pub degree: usize,
    pub coords: Vec<Vec<FreeMapTermJson>>,
}

impl FreeMapCoefficients {
    pub fn new(n: usize, degree: usize, coords: Vec<BTreeMap<Word, Complex64>>) -> Result<Self> {
        if n == 0 || coords.len() != n {
            return Err(Error::DimensionMismatch(format!("expected {n} coordinate functions, got {}", coords.len())));
        }
        for (j, c) in coords.iter().enumerate() {
            for w in c.keys() {
                if w.is_empty() {
                    return Err(Error::InvalidArgument(format!("coordinate {} has a constant term; F(0) must be 0", j + 1)));
                }
                if w.len() > degree {
                    return Err(Error::InvalidArgument(format!("word {w:?} exceeds the degree cap {degree}")));
                }
                if w.letters().iter().any(|&l| l >= n) {
                    return Err(Error::IndexOutOfRange { index: w.alphabet_bound(), n });
                }
            }
        }
        let coords = coords
            .into_iter()
            .map(|mut c| {
                c.retain(|_, v| v.norm() != 0.0);
                c
            })
            .collect();
        Ok(FreeMapCoefficients { n, degree, coords })
    }

    /// The linear map `X ↦ M X`.
    pub fn linear(m: &CMatrix) -> Result<Self> {
        let n = m.nrows();
        let coords = (0..n)
            .map(|i| (0..n).map(|j| (Word::letter(j), m[(i, j)])).collect())
            .collect();
        Self::new(n, 1, coords)
    }

    /// Pseudorandom coefficients on every word with `1 ≤ |α| ≤ degree`.
    pub fn random(n: usize, degree: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n)
            .map(|_| {
                (1..=degree)
                    .flat_map(|d| Word::all_of_length(n, d))
                    .map(|w| (w, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                    .collect()
            })
            .collect();
        Self::new(n, degree, coords)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, j: usize, w: &Word) -> Complex64 {
        self.coords[j].get(w).copied().unwrap_or_default()
    }

    pub fn coords(&self) -> &[BTreeMap<Word, Complex64>] {
        &self.coords
    }

    pub fn from_json(doc: &FreeMapJson) -> Result<Self> {
        let coords = doc
            .coords
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| {
                        let w = Word::from_one_based(&t.word)
                            .ok_or(Error::UnknownVariable { index: 0, pos: 0 })?;
                        Ok((w, Complex64::new(t.re, t.im)))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.n, doc.degree, coords)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: FreeMapJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json(&doc)
    }

    pub fn to_json(&self) -> FreeMapJson {
        FreeMapJson {
            n: self.n,
            degree: self.degree,
            coords: self
                .coords
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|(w, z)| FreeMapTermJson { word: w.to_one_based(), re: z.re, im: z.im })
                        .collect()
                })
                .collect(),
        }
    }
}

/// `F(T)_j = Σ_α c[j][α] T_α`.
pub fn evaluate_free_map(map: &FreeMapCoefficients, t: &MatrixTuple) -> Result<MatrixTuple> {
    if t.n() != map.n {
        return Err(Error::DimensionMismatch(format!(
            "map has {} coordinates, tuple has {} matrices",
            map.n,
            t.n()
        )));
    }
    let k = t.level();
    let mut cache: BTreeMap<Word, CMatrix> = BTreeMap::new();
    let mut out = Vec::with_capacity(map.n);
    for coord in &map.coords {
        let mut acc = CMatrix::zeros(k, k);
        for (w, &c) in coord {
            if !cache.contains_key(w) {
                cache.insert(w.clone(), evaluate_word(t, w)?);
            }
            acc += &cache[w] * c;
        }
        out.push(acc);
    }
    MatrixTuple::new(out)
}

pub(crate) fn random_matrix(k: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(k, k, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Pseudorandom tuple of `n` matrices of size `k`.
pub fn random_tuple(n: usize, k: usize, rng: &mut impl Rng) -> MatrixTuple {
    MatrixTuple { mats: (0..n).map(|_| random_matrix(k, rng)).collect() }
}

/// Level used by [`separating_tuple`]: at least `ℓ + 1`, and large enough
/// that `k² ≥ n^ℓ` so the `n^ℓ` products can be independent.
pub fn separating_level(n: usize, ell: usize) -> usize {
    let words = n.pow(ell as u32);
    let mut k = ell + 1;
    while k * k < words {
        k += 1;
    }
    k
}

/// Pseudorandom tuple whose products `{T_α : |α| = ℓ}` are linearly
/// independent, at level [`separating_level`]. Entries are scaled so every
/// matrix has spectral norm at most `1/(2n)`.
pub fn separating_tuple(n: usize, ell: usize, seed: u64) -> Result<MatrixTuple> {
    separating_tuple_at_level(n, ell, separating_level(n, ell), seed)
}

pub fn separating_tuple_at_level(n: usize, ell: usize, k: usize, seed: u64) -> Result<MatrixTuple> {
    if ell < 1 || n < 1 || k < 1 {
        return Err(Error::InvalidArgument("n, ℓ and the level must be positive".into()));
    }
    let words = Word::all_of_length(n, ell);
    for attempt in 0..MAX_RESEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let raw = random_tuple(n, k, &mut rng);
        let largest = raw.mats.iter().map(crate::linalg::dense_operator_norm).fold(0.0, f64::max);
        if largest == 0.0 {
            continue;
        }
        let t = raw.scale(Complex64::new(1.0 / (2.0 * n as f64 * largest), 0.0));
        let mut stacked = CMatrix::zeros(k * k, words.len());
        for (col, w) in words.iter().enumerate() {
            let p = evaluate_word(&t, w)?;
            for (r, v) in p.iter().enumerate() {
                stacked[(r, col)] = *v;
            }
        }
        if rank(&stacked, RANK_TOL) == words.len() {
            return Ok(t);
        }
    }
    Err(Error::InvalidArgument(format!(
        "no tuple at level {k} separates the {} words of length {ell} over {n} letters",
        words.len()
    )))
}

/// Rescales `t` by a positive scalar so the top eigenvalue of the defining
/// operator equals `target ∈ (0, 1)`; the eigenvalue is increasing in the scale.
pub fn scale_into_interior(f: &FreePolynomial, t: &MatrixTuple, target: f64) -> Result<MatrixTuple> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!("target {target} must lie in (0, 1)")));
    }
    // the operator at scale s is Σ_d s^{2d} A_d with A_d collecting degree d
    let mut by_degree: Vec<CMatrix> = Vec::new();
    let k = t.level();
    for (w, a) in f.terms() {
        if by_degree.len() <= w.len() {
            by_degree.resize(w.len() + 1, CMatrix::zeros(k, k));
        }
        let ta = evaluate_word(t, w)?;
        by_degree[w.len()] += (&ta * ta.adjoint()) * Complex64::new(rational::to_f64(a), 0.0);
    }
    if t.n() != f.n() {
        return Err(Error::DimensionMismatch("tuple and symbol sizes differ".into()));
    }
    let top = |s: f64| {
        let s2 = s * s;
        let sum = by_degree
            .iter()
            .rev()
            .fold(CMatrix::zeros(k, k), |acc, a| acc * Complex64::new(s2, 0.0) + a);
        hermitian_max_eigenvalue(&sum)
    };
    if top(1.0) == 0.0 {
        return Err(Error::InvalidArgument("tuple is annihilated by the defining operator".into()));
    }
    let mut hi = 1.0;
    while top(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        if hi - lo <= 1e-16 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if top(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(t.scale(Complex64::new(lo, 0.0)))
}

pub fn tuple_to_json(t: &MatrixTuple) -> Vec<crate::io::MatrixJson> {
    crate::io::tuple_to_json(&t.mats)
}

pub fn complex_json(z: Complex64) -> ComplexJson {
    z.into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{certificate_matrix, rational_matrix_to_complex, EquivalenceCertificate};
    use crate::geometry::scalar_membership;
    use crate::rational::{int, ratio};
    use crate::symbol::{parse_symbol, Permutation};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn real(k: usize, vals: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(k, k, &vals.iter().map(|&v| c(v)).collect::<Vec<_>>())
    }

    fn mn() -> MatrixTuple {
        MatrixTuple::new(vec![real(2, &[1.0, 2.0, 3.0, 4.0]), real(2, &[5.0, 6.0, 7.0, 8.0])]).unwrap()
    }

    fn w(l: &[usize]) -> Word {
        Word::from_one_based(l).unwrap()
    }

    #[test]
    fn word_evaluation_examples() {
        let t = mn();
        assert_eq!(evaluate_word(&t, &Word::empty()).unwrap(), CMatrix::identity(2, 2));
        assert_eq!(evaluate_word(&t, &w(&[1, 2])).unwrap()[(0, 1)], c(22.0));
        assert_eq!(evaluate_word(&t, &w(&[2, 1])).unwrap()[(0, 1)], c(34.0));
        assert!(evaluate_word(&t, &w(&[3])).is_err());
    }

    #[test]
    fn membership_examples() {
        let disk = parse_symbol("X1 + X2", None).unwrap();
        let m = matrix_membership(&disk, &MatrixTuple::scalar(&[c(0.5), c(0.5)]).unwrap(), true, DEFAULT_EIG_TOL).unwrap();
        assert!((m.max_eigenvalue - 0.5).abs() < 1e-15);
        assert!(m.member);

        let f = parse_symbol("X1 + X2 + 3 X1*X2", None).unwrap();
        let t = 0.5f64.sqrt();
        let nil = real(2, &[0.0, t, 0.0, 0.0]);
        let tuple = MatrixTuple::new(vec![nil.clone(), nil]).unwrap();
        let m = matrix_membership(&f, &tuple, true, DEFAULT_EIG_TOL).unwrap();
        assert!((m.max_eigenvalue - 1.0).abs() < 1e-14);
        assert!(!m.member);
        assert!(matrix_membership(&f, &tuple, false, DEFAULT_EIG_TOL).unwrap().member);

        let zero = MatrixTuple::new(vec![CMatrix::zeros(3, 3), CMatrix::zeros(3, 3)]).unwrap();
        let m = matrix_membership(&f, &zero, true, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(m.max_eigenvalue, 0.0);
        assert!(m.member);

        assert!(matrix_membership(&f, &MatrixTuple::scalar(&[c(0.1)]).unwrap(), true, 0.0).is_err());
    }

    #[test]
    fn dual_map_examples() {
        let t = mn();
        assert_eq!(dual_map_apply(&CMatrix::identity(2, 2), &t).unwrap(), t);

        let cert = EquivalenceCertificate::new(Permutation::swap(2, 0, 1), vec![ratio(1, 2), int(1)]).unwrap();
        let m = rational_matrix_to_complex(&certificate_matrix(&cert));
        let s = dual_map_apply(&m, &t).unwrap();
        assert_eq!(s.get(0), &(t.get(1) * c(0.5)));
        assert_eq!(s.get(1), t.get(0));

        let diag = real(2, &[0.5, 0.0, 0.0, 1.0]);
        let z = MatrixTuple::scalar(&[c(0.4), c(-0.2)]).unwrap();
        let s = dual_map_apply(&diag, &z).unwrap();
        assert_eq!(s.get(0)[(0, 0)], c(0.2));
        assert_eq!(s.get(1)[(0, 0)], c(-0.2));

        assert!(dual_map_apply(&CMatrix::identity(3, 3), &t).is_err());
    }

    #[test]
    fn free_map_examples() {
        let m = real(2, &[0.0, 0.5, 1.0, 0.0]);
        let linear = FreeMapCoefficients::linear(&m).unwrap();
        let t = mn();
        assert_eq!(evaluate_free_map(&linear, &t).unwrap(), dual_map_apply(&m, &t).unwrap());

        let mut first = BTreeMap::new();
        first.insert(w(&[1, 1]), c(1.0));
        let square = FreeMapCoefficients::new(2, 2, vec![first, BTreeMap::new()]).unwrap();
        let out = evaluate_free_map(&square, &t).unwrap();
        assert_eq!(out.get(0), &(t.get(0) * t.get(0)));
        assert_eq!(out.get(1), &CMatrix::zeros(2, 2));

        // entry (1,2) of coordinate j collects c[j][12]·22 + c[j][21]·34
        let mut coord = BTreeMap::new();
        coord.insert(w(&[1, 2]), c(1.0));
        coord.insert(w(&[2, 1]), c(10.0));
        let map = FreeMapCoefficients::new(2, 2, vec![coord, BTreeMap::new()]).unwrap();
        assert_eq!(evaluate_free_map(&map, &t).unwrap().get(0)[(0, 1)], c(22.0 + 340.0));

        let mut constant = BTreeMap::new();
        constant.insert(Word::empty(), c(1.0));
        assert!(FreeMapCoefficients::new(1, 1, vec![constant]).is_err());
    }

    #[test]
    fn free_map_json_round_trip() {
        let map = FreeMapCoefficients::random(2, 2, 5).unwrap();
        let text = serde_json::to_string(&map.to_json()).unwrap();
        assert_eq!(FreeMapCoefficients::from_json_str(&text).unwrap(), map);
    }

    #[test]
    fn separating_tuple_examples() {
        let t = separating_tuple(1, 1, 3).unwrap();
        assert_eq!(t.level(), 2);
        assert!(t.get(0).iter().any(|v| v.norm() > 0.0));

        let t = separating_tuple(2, 2, 11).unwrap();
        assert_eq!(t.level(), 3);
        let products: Vec<CMatrix> = Word::all_of_length(2, 2).iter().map(|a| evaluate_word(&t, a).unwrap()).collect();
        let mut stacked = CMatrix::zeros(9, 4);
        for (col, p) in products.iter().enumerate() {
            for (r, v) in p.iter().enumerate() {
                stacked[(r, col)] = *v;
            }
        }
        assert_eq!(rank(&stacked, RANK_TOL), 4);

        // scalars commute, so X1X2 and X2X1 coincide at level 1
        assert!(separating_tuple_at_level(2, 2, 1, 0).is_err());
        assert_eq!(separating_level(3, 3), 6);
    }

    #[test]
    fn level_one_matches_scalar_membership() {
        let f = parse_symbol("X1 + 2 X2 + X1*X2 + 1/3 X2*X1*X1", None).unwrap();
        let z = [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)];
        let a = matrix_membership(&f, &MatrixTuple::scalar(&z).unwrap(), true, DEFAULT_EIG_TOL).unwrap();
        let b = scalar_membership(&f, &z).unwrap();
        assert!((a.max_eigenvalue - b.value).abs() < 1e-12);
    }

    #[test]
    fn interior_scaling_hits_target() {
        let f = parse_symbol("X1 + X2 + 3 X1*X2", None).unwrap();
        let t = separating_tuple(2, 2, 1).unwrap();
        let s = scale_into_interior(&f, &t, 0.7).unwrap();
        let m = matrix_membership(&f, &s, true, DEFAULT_EIG_TOL).unwrap();
        assert!((m.max_eigenvalue - 0.7).abs() < 1e-12);
    }
}
