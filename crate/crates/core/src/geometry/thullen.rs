//! Thullen-domain refutation.
//!
//! If `𝔻_f^1 = {|z_1|² + |z_2|^{2q} < 1}` then on the boundary curve
//! `s = 1 − u^q` (with `s = |z_1|²`, `u = |z_2|²`) the gradients of both
//! defining functions are colinear, which forces
//! `R(u) = p_s(1 − u^q, u) · q u^{q−1} − p_u(1 − u^q, u) ≡ 0` on `(0, 1)`.
//! As `u → 0`, `R` diverges for `q < 1` and tends to `−p_u(1, 0) < 0` for
//! `q > 1`, so no exponent works.

use serde::Serialize;

use super::{decide_spherical, Verdict};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rational;
use crate::symbol::{collapse, normalize_degree_one, FreePolynomial};

/// `q ∈ {0.1, …, 0.9}`.
pub const Q_GRID_BELOW: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// `q ∈ {1.1, 1.2, …, 8.0}` (70 values).
pub const Q_GRID_ABOVE: (f64, f64, usize) = (1.1, 0.1, 70);
pub const U_SAMPLES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn q_grid() -> Vec<f64> {
    let (start, step, count) = Q_GRID_ABOVE;
    Q_GRID_BELOW
        .iter()
        .copied()
        .chain((0..count).map(|k| ((start + step * k as f64) * 10.0).round() / 10.0))
        .collect()
}

fn check_two_variables(f: &FreePolynomial) -> Result<()> {
    if f.n() != 2 {
        return Err(Error::InvalidArgument(format!(
            "Thullen analysis needs 2 variables, symbol has {}",
            f.n()
        )));
    }
    Ok(())
}

/// `R(u)` for the collapsed polynomial of `f`.
pub fn thullen_colinearity_residual(f: &FreePolynomial, q: f64, u: f64) -> Result<f64> {
    f.ensure_valid()?;
    check_two_variables(f)?;
    if !q.is_finite() || q <= 0.0 || q == 1.0 {
        return Err(Error::InvalidArgument(format!("exponent q = {q} must be positive and ≠ 1")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidArgument(format!("sample u = {u} must lie in (0, 1)")));
    }
    let p = collapse(f);
    let t = [1.0 - u.powf(q), u];
    Ok(p.partial(0, &t) * q * u.powf(q - 1.0) - p.partial(1, &t))
}

/// Largest `|R(u)|` over the sample grid for one exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThullenRefutation {
    pub q: f64,
    pub u: f64,
    pub residual: f64,
}

/// `q < 1`: `R(u) ≈ p_s(1, 0) · q u^{q−1} → +∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitBelowOne {
    pub leading_coefficient: f64,
    pub divergent: bool,
}

/// `q > 1`: `R(u) → −p_u(1, 0) = −Σ_k c_{k,1}`, which is at most `−c_{0,1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitAboveOne {
    pub limit: f64,
    pub c01: f64,
    pub negative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThullenReport {
    pub normalization: Vec<String>,
    pub tol: f64,
    pub grid: Vec<ThullenRefutation>,
    pub below_one: LimitBelowOne,
    pub above_one: LimitAboveOne,
    pub refuted: bool,
}

pub fn refute_thullen(f: &FreePolynomial, tol: f64) -> Result<ThullenReport> {
    refute_thullen_with(f, tol, Execution::default())
}

/// Scans the `q` grid on the degree-one normalized symbol and records the
/// decisive `u → 0` limits.
pub fn refute_thullen_with(f: &FreePolynomial, tol: f64, exec: Execution) -> Result<ThullenReport> {
    check_two_variables(f)?;
    if decide_spherical(f, tol)?.verdict == Verdict::Spherical {
        return Err(Error::InvalidArgument(
            "symbol is spherical; its scalar domain is a ball, not a Thullen domain candidate".into(),
        ));
    }
    let (g, lambda) = normalize_degree_one(f)?;
    let grid = exec.map(&q_grid(), |&q| {
        U_SAMPLES
            .iter()
            .map(|&u| ThullenRefutation {
                q,
                u,
                residual: thullen_colinearity_residual(&g, q, u).expect("grid values are in range"),
            })
            .max_by(|a, b| a.residual.abs().total_cmp(&b.residual.abs()))
            .unwrap()
    });
    let p = collapse(&g);
    let below_one = LimitBelowOne {
        leading_coefficient: p.partial(0, &[1.0, 0.0]),
        divergent: p.partial(0, &[1.0, 0.0]) > 0.0,
    };
    let limit = -p.partial(1, &[1.0, 0.0]);
    let above_one = LimitAboveOne {
        limit,
        c01: rational::to_f64(&p.coeff(&[0, 1])),
        negative: limit < 0.0,
    };
    let refuted = grid.iter().all(|e| e.residual.abs() > tol) && below_one.divergent && above_one.negative;
    Ok(ThullenReport {
        normalization: lambda.iter().map(rational::format).collect(),
        tol,
        grid,
        below_one,
        above_one,
        refuted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::parse_symbol;

    fn sym(s: &str) -> FreePolynomial {
        parse_symbol(s, None).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = q_grid();
        assert_eq!(g.len(), 79);
        assert_eq!(g[9], 1.1);
        assert_eq!(*g.last().unwrap(), 8.0);
        assert!(!g.contains(&1.0));
    }

    #[test]
    fn residual_examples() {
        let f = sym("X1 + X2 + 3 X1*X2");
        let r = thullen_colinearity_residual(&f, 2.0, 0.5).unwrap();
        assert!((r + 0.75).abs() < 1e-14);

        let ball = sym("X1 + X2");
        for &(q, u) in &[(2.0, 0.3), (0.5, 0.7), (3.5, 0.1)] {
            let r = thullen_colinearity_residual(&ball, q, u).unwrap();
            assert!((r - (q * f64::powf(u, q - 1.0) - 1.0)).abs() < 1e-14);
        }

        let near_zero = thullen_colinearity_residual(&f, 2.0, 1e-9).unwrap();
        assert!((near_zero + 4.0).abs() < 1e-6);

        assert!(thullen_colinearity_residual(&f, 1.0, 0.5).is_err());
        assert!(thullen_colinearity_residual(&f, 2.0, 1.0).is_err());
        assert!(thullen_colinearity_residual(&sym("X1"), 2.0, 0.5).is_err());
    }

    #[test]
    fn refutation_examples() {
        let r = refute_thullen(&sym("X1 + X2 + 3 X1*X2"), 1e-9).unwrap();
        assert!(r.refuted);
        let q2 = r.grid.iter().find(|e| e.q == 2.0).unwrap();
        assert!(q2.residual.abs() >= 0.75);
        assert!((r.above_one.limit + 4.0).abs() < 1e-15);
        assert_eq!(r.above_one.c01, 1.0);

        let h = refute_thullen(&sym("X1 + 2 X2 + X1*X1"), 1e-9).unwrap();
        assert!(h.refuted);
        assert_eq!(h.normalization, vec!["1", "1/2"]);
        assert!(h.above_one.limit <= -1.0);

        assert!(refute_thullen(&sym("X1 + X2"), 1e-9).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = sym("X1 + X2 + 2 X1*X2*X2 + 1/3 X2*X1");
        let a = refute_thullen_with(&f, 1e-9, Execution::Sequential).unwrap();
        let b = refute_thullen_with(&f, 1e-9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
