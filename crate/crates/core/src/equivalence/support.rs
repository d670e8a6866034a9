use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{unitarity_defect, CMatrix};

pub const DEFAULT_SUPPORT_EPS: f64 = 1e-9;
/// `U` counts as unitary when `max |(U*U − I)_{ij}| ≤ UNITARY_TOL`.
pub const UNITARY_TOL: f64 = 1e-8;

/// Paired row blocks `σ_i` and column blocks `ψ_i = s_Φ(σ_i)` (0-based;
/// serialized 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPartition {
    pub sigma_blocks: Vec<Vec<usize>>,
    pub psi_blocks: Vec<Vec<usize>>,
    pub eps: f64,
    pub unitary: bool,
}

impl SupportPartition {
    pub fn len(&self) -> usize {
        self.sigma_blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_blocks.is_empty()
    }
}

impl Serialize for SupportPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            sigma_blocks: Vec<Vec<usize>>,
            psi_blocks: Vec<Vec<usize>>,
            eps: f64,
            unitary: bool,
        }
        let one = |bs: &[Vec<usize>]| bs.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect();
        Out {
            sigma_blocks: one(&self.sigma_blocks),
            psi_blocks: one(&self.psi_blocks),
            eps: self.eps,
            unitary: self.unitary,
        }
        .serialize(s)
    }
}

struct Support<'a> {
    u: &'a CMatrix,
    eps: f64,
}

impl Support<'_> {
    fn nonzero(&self, i: usize, j: usize) -> bool {
        self.u[(i, j)].norm() > self.eps
    }

    /// Columns carrying a nonzero entry in some row of `rows`.
    fn forward(&self, rows: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.u.ncols())
            .filter(|&j| rows.iter().any(|&i| self.nonzero(i, j)))
            .collect()
    }

    /// Rows carrying a nonzero entry in some column of `cols`.
    fn backward(&self, cols: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.u.nrows())
            .filter(|&i| cols.iter().any(|&j| self.nonzero(i, j)))
            .collect()
    }

    /// Fixed point of `A ↦ A ∪ s_{Φ⁻¹}(s_Φ(A))` from `{start}`.
    fn closure(&self, start: usize) -> BTreeSet<usize> {
        let mut a: BTreeSet<usize> = [start].into_iter().collect();
        loop {
            let mut next = self.backward(&self.forward(&a));
            next.extend(a.iter().copied());
            if next == a {
                return a;
            }
            a = next;
        }
    }
}

/// Partitions the rows of `u` into closures `cl(i)` under "shares a nonzero
/// column", pairing each block with the columns it reaches.
pub fn support_partition(u: &CMatrix, eps: f64) -> Result<SupportPartition> {
    if u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "support partition needs a square matrix, got {}×{}",
            u.nrows(),
            u.ncols()
        )));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {eps}")));
    }
    let n = u.nrows();
    let sup = Support { u, eps };
    let mut assigned = vec![false; n];
    let mut sigma_blocks = Vec::new();
    let mut psi_blocks = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let block = sup.closure(i);
        for &r in &block {
            assigned[r] = true;
        }
        let psi = sup.forward(&block);
        if sup.backward(&psi).iter().any(|r| !block.contains(r)) {
            return Err(Error::Internal("closure is not stable under s_Φ⁻¹ ∘ s_Φ".into()));
        }
        sigma_blocks.push(block.into_iter().collect::<Vec<_>>());
        psi_blocks.push(psi.into_iter().collect::<Vec<_>>());
    }
    let unitary = unitarity_defect(u) <= UNITARY_TOL;
    if unitary {
        for (s, p) in sigma_blocks.iter().zip(&psi_blocks) {
            if s.len() != p.len() {
                return Err(Error::Internal(format!(
                    "unitary matrix with block sizes |σ| = {} ≠ |ψ| = {}",
                    s.len(),
                    p.len()
                )));
            }
        }
    }
    Ok(SupportPartition { sigma_blocks, psi_blocks, eps, unitary })
}
