//! Linearity analysis for origin-fixing free maps: the identity
//! `Σ_{|α|=d} c_α T_α = 0`, imposed on enough tuples at levels `1..=K`,
//! forces coefficients to vanish. Level 1 is solved exactly; higher levels
//! use pseudorandom sample tuples and a numerical null space.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{evaluate_word, random_tuple, FreeMapCoefficients};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::io::ComplexJson;
use crate::linalg::CMatrix;
use crate::symbol::Word;

pub const DEFAULT_SEED: u64 = 0x5EED;
/// Singular values below this fraction of the largest are treated as zero.
pub const NULL_TOL: f64 = 1e-8;
/// A coefficient is forced when its unit vector lies this close to the row space.
pub const FORCE_TOL: f64 = 1e-6;
const CLEAN_TOL: f64 = 1e-10;
/// Extra sample tuples beyond the dimension count, per level and degree.
const EXTRA_SAMPLES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub forced: usize,
    pub unresolved: usize,
}

/// Linear relations left on the unforced unknowns, in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationMatrix {
    pub unknowns: Vec<Vec<usize>>,
    pub rows: Vec<Vec<ComplexJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearityReport {
    pub n: usize,
    pub degree: usize,
    pub levels: usize,
    pub per_level: Vec<LevelSummary>,
    /// Words (1-based) whose coefficient vanishes in every coordinate.
    pub forced_words: Vec<Vec<usize>>,
    /// `(j, α)` pairs, both 1-based.
    pub forced_indices: Vec<(usize, Vec<usize>)>,
    pub relations: RelationMatrix,
    pub unresolved_directions: usize,
    /// Every coefficient of degree at least 2 is forced.
    pub complete: bool,
    /// Nonzero coefficients of `F` at forced indices.
    pub violations: Vec<(usize, Vec<usize>, ComplexJson)>,
}

struct DegreeState {
    words: Vec<Word>,
    rows: Vec<Vec<Complex64>>,
}

struct DegreeResult {
    forced: Vec<bool>,
    relations: Vec<Vec<Complex64>>,
    unresolved: usize,
}

pub fn cartan_forced_zeros(map: &FreeMapCoefficients, levels: usize) -> Result<LinearityReport> {
    cartan_forced_zeros_with(map, levels, DEFAULT_SEED, Execution::default())
}

pub fn cartan_forced_zeros_with(
    map: &FreeMapCoefficients,
    levels: usize,
    seed: u64,
    exec: Execution,
) -> Result<LinearityReport> {
    if levels < 1 {
        return Err(Error::InvalidArgument("at least one level is required".into()));
    }
    let n = map.n();
    let degree = map.degree();
    let mut states: Vec<DegreeState> = (2..=degree)
        .map(|d| DegreeState { words: Word::all_of_length(n, d), rows: level_one_rows(n, d) })
        .collect();

    let mut per_level = Vec::with_capacity(levels);
    let mut results = Vec::new();
    for k in 1..=levels {
        if k > 1 {
            for (idx, state) in states.iter_mut().enumerate() {
                let d = idx + 2;
                let samples = state.words.len().div_ceil(k * k) + EXTRA_SAMPLES;
                let words = &state.words;
                let batches = exec.map_range(samples, |s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, k, d, s));
                    let t = random_tuple(n, k, &mut rng);
                    sample_rows(&t, words)
                });
                for batch in batches {
                    state.rows.extend(batch?);
                }
            }
        }
        results = states.iter().map(analyse).collect();
        per_level.push(LevelSummary {
            level: k,
            forced: results.iter().map(|r| r.forced.iter().filter(|&&f| f).count()).sum(),
            unresolved: results.iter().map(|r| r.unresolved).sum(),
        });
    }

    let mut forced_words = Vec::new();
    let mut unknowns = Vec::new();
    let mut rows = Vec::new();
    let total_unforced: usize = results.iter().map(|r| r.forced.iter().filter(|&&f| !f).count()).sum();
    let mut offset = 0;
    for (state, res) in states.iter().zip(&results) {
        let free: Vec<&Word> = state.words.iter().zip(&res.forced).filter(|(_, &f)| !f).map(|(w, _)| w).collect();
        for (w, &f) in state.words.iter().zip(&res.forced) {
            if f {
                forced_words.push(w.clone());
            }
        }
        for rel in &res.relations {
            let mut row = vec![ComplexJson { re: 0.0, im: 0.0 }; total_unforced];
            for (i, z) in rel.iter().enumerate() {
                row[offset + i] = (*z).into();
            }
            rows.push(row);
        }
        unknowns.extend(free.iter().map(|w| w.to_one_based()));
        offset += free.len();
    }

    let mut forced_indices = Vec::new();
    let mut violations = Vec::new();
    for j in 0..n {
        for w in &forced_words {
            forced_indices.push((j + 1, w.to_one_based()));
            let c = map.coeff(j, w);
            if c.norm() > 0.0 {
                violations.push((j + 1, w.to_one_based(), c.into()));
            }
        }
    }
    let unresolved_directions = results.iter().map(|r| r.unresolved).sum();
    Ok(LinearityReport {
        n,
        degree,
        levels,
        per_level,
        complete: total_unforced == 0,
        forced_words: forced_words.iter().map(Word::to_one_based).collect(),
        forced_indices,
        relations: RelationMatrix { unknowns, rows },
        unresolved_directions,
        violations,
    })
}

fn sample_seed(seed: u64, k: usize, d: usize, s: usize) -> u64 {
    seed ^ ((k as u64) << 48) ^ ((d as u64) << 32) ^ s as u64
}

/// Scalars commute: one exact equation per multidegree.
fn level_one_rows(n: usize, d: usize) -> Vec<Vec<Complex64>> {
    let words = Word::all_of_length(n, d);
    let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (i, w) in words.iter().enumerate() {
        groups.entry(w.counts(n)).or_default().push(i);
    }
    groups
        .into_values()
        .map(|idx| {
            let mut row = vec![Complex64::new(0.0, 0.0); words.len()];
            for i in idx {
                row[i] = Complex64::new(1.0, 0.0);
            }
            row
        })
        .collect()
}

/// One equation per matrix entry: `Σ_α c_α (T_α)_{rs} = 0`.
fn sample_rows(t: &super::MatrixTuple, words: &[Word]) -> Result<Vec<Vec<Complex64>>> {
    let k = t.level();
    let products = words.iter().map(|w| evaluate_word(t, w)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(k * k);
    for r in 0..k {
        for s in 0..k {
            let row: Vec<Complex64> = products.iter().map(|p| p[(r, s)]).collect();
            let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                rows.push(row.into_iter().map(|z| z / norm).collect());
            }
        }
    }
    Ok(rows)
}

fn to_matrix(rows: &[Vec<Complex64>], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |r, c| rows[r][cols[c]])
}

/// Orthonormal basis of the row space, one basis vector per row.
fn row_space(a: &CMatrix) -> CMatrix {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMatrix::zeros(0, a.ncols());
    }
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > NULL_TOL * top)
        .collect();
    CMatrix::from_fn(keep.len(), a.ncols(), |r, c| v_t[(keep[r], c)])
}

fn analyse(state: &DegreeState) -> DegreeResult {
    let all: Vec<usize> = (0..state.words.len()).collect();
    let basis = row_space(&to_matrix(&state.rows, &all));
    let forced: Vec<bool> = all
        .iter()
        .map(|&c| {
            let inside: f64 = (0..basis.nrows()).map(|r| basis[(r, c)].norm_sqr()).sum();
            (1.0 - inside).max(0.0).sqrt() <= FORCE_TOL
        })
        .collect();
    let free: Vec<usize> = all.iter().copied().filter(|&c| !forced[c]).collect();
    let rel = row_space(&to_matrix(&state.rows, &free));
    let relations = reduced_echelon(rel);
    DegreeResult { unresolved: free.len() - relations.len(), forced, relations }
}

/// Gauss–Jordan with partial pivoting; pivots scaled to 1, tiny entries cleared.
fn reduced_echelon(mut m: CMatrix) -> Vec<Vec<Complex64>> {
    let (rows, cols) = m.shape();
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows {
            break;
        }
        let (best, size) = (pivot_row..rows)
            .map(|r| (r, m[(r, c)].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if size <= CLEAN_TOL {
            continue;
        }
        m.swap_rows(pivot_row, best);
        let p = m[(pivot_row, c)];
        for j in 0..cols {
            m[(pivot_row, j)] /= p;
        }
        for r in 0..rows {
            if r != pivot_row {
                let factor = m[(r, c)];
                if factor.norm() > 0.0 {
                    for j in 0..cols {
                        let v = m[(pivot_row, j)];
                        m[(r, j)] -= factor * v;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    (0..pivot_row)
        .map(|r| {
            (0..cols)
                .map(|c| {
                    let z = m[(r, c)];
                    Complex64::new(clean(z.re), clean(z.im))
                })
                .collect()
        })
        .collect()
}

fn clean(x: f64) -> f64 {
    if x.abs() < CLEAN_TOL {
        0.0
    } else if (x - x.round()).abs() < CLEAN_TOL {
        x.round()
    } else {
        x
    }
}
