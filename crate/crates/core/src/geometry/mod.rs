//! The scalar-level domain `𝔻_f^1 = { z ∈ C^n : Σ a_α |z_α|² < 1 }`, a
//! bounded Reinhardt domain: membership, boundary points, sphericality and
//! the witnesses showing it is neither a proper product nor a Thullen
//! domain.

mod mpoly;
pub mod thullen;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::Value;

pub use mpoly::{Coefficient, MPoly};
pub use thullen::{
    refute_thullen, refute_thullen_with, thullen_colinearity_residual, LimitAboveOne, LimitBelowOne,
    ThullenRefutation, ThullenReport, Q_GRID_ABOVE, Q_GRID_BELOW, U_SAMPLES,
};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::symbol::{collapse, normalize_degree_one, restrict, CollapsedPolynomial, FreePolynomial};

pub const DEFAULT_TOL: f64 = 1e-9;
/// Size of the complement perturbation in [`refute_product`].
pub const PRODUCT_PERTURBATION: f64 = 0.1;
const ROOT_TOL: f64 = 1e-14;
const MAX_RATIONAL_DEN: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarMembership {
    pub value: f64,
    pub inside: bool,
}

/// `Σ a_α |z_α|²`, i.e. the collapsed polynomial at `t_i = |z_i|²`.
pub fn scalar_membership(f: &FreePolynomial, z: &[Complex64]) -> Result<ScalarMembership> {
    if z.len() != f.n() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, symbol has {} variables",
            z.len(),
            f.n()
        )));
    }
    let t: Vec<f64> = z.iter().map(|x| x.norm_sqr()).collect();
    let value = collapse(f).eval(&t);
    Ok(ScalarMembership { value, inside: value < 1.0 })
}

/// Value along the ray `ρ ↦ ρ d`, increasing in `ρ ≥ 0`.
fn ray_value(p: &CollapsedPolynomial, d2: &[f64], rho: f64) -> f64 {
    let t: Vec<f64> = d2.iter().map(|x| x * rho * rho).collect();
    p.eval(&t)
}

/// Bisection for the unique `x > 0` with `g(x) = 1`, `g` increasing from `g(0) = 0`.
fn increasing_root(g: impl Fn(f64) -> f64) -> f64 {
    let mut hi = 1.0;
    while g(hi) < 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the endpoint whose value is closer to 1
    if (g(lo) - 1.0).abs() <= (g(hi) - 1.0).abs() {
        lo
    } else {
        hi
    }
}

/// The point `ρ d` on the boundary of `𝔻_f^1`.
pub fn boundary_point_on_ray(f: &FreePolynomial, d: &[Complex64]) -> Result<Vec<Complex64>> {
    f.ensure_valid()?;
    if d.len() != f.n() {
        return Err(Error::DimensionMismatch("direction length differs from the number of variables".into()));
    }
    if d.iter().all(|x| x.norm_sqr() == 0.0) {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    let p = collapse(f);
    let d2: Vec<f64> = d.iter().map(|x| x.norm_sqr()).collect();
    let rho = increasing_root(|r| ray_value(&p, &d2, r));
    Ok(d.iter().map(|x| x * rho).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Spherical,
    Aspherical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalityResult {
    pub verdict: Verdict,
    /// Axis solutions `μ_i` of `Σ_k c_{k e_i} μ^k = 1`.
    pub mu: Vec<f64>,
    /// `μ` as `p/q` strings when every axis root is rational.
    pub mu_exact: Option<Vec<String>>,
    /// Largest absolute coefficient of the restricted polynomial.
    pub residual: f64,
    /// Whether the coefficient test ran in exact arithmetic.
    pub exact: bool,
    pub tol: f64,
    /// Restricted polynomial `q(t)|_{t_n = 1 − t_1 − … − t_{n−1}}` as
    /// `(exponents of t_1..t_{n−1}, coefficient)`.
    pub restricted: Vec<(Vec<u32>, Value)>,
}

/// Unique positive root of the axis polynomial, with an exact rational value
/// when one with a small denominator satisfies the equation exactly.
fn axis_root(coeffs: &[Rational]) -> (f64, Option<Rational>) {
    let fc: Vec<f64> = coeffs.iter().map(rational::to_f64).collect();
    let g = |x: f64| fc.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let root = increasing_root(g);
    debug_assert!((g(root) - 1.0).abs() < ROOT_TOL.max(1e-12) * (1.0 + root));
    let exact = rational::convergents(root, MAX_RATIONAL_DEN).into_iter().find(|r| {
        let v = coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * r + c);
        v.is_one()
    });
    (root, exact)
}

fn restricted_polynomial<C: Coefficient>(p: &CollapsedPolynomial, mu: &[C], conv: impl Fn(&Rational) -> C) -> MPoly<C> {
    let n = p.n();
    let vars = n - 1;
    // t_n = 1 − Σ_{i<n} t_i
    let mut last = MPoly::constant(vars, C::one());
    for i in 0..vars {
        last = last.add(&MPoly::var(vars, i).scale(&(C::zero() - C::one())));
    }
    let max_last = p.terms().keys().map(|d| d[n - 1]).max().unwrap_or(0);
    let last_powers = mpoly::powers(&last, max_last);
    let mut q = MPoly::constant(vars, C::zero() - C::one());
    for (d, c) in p.terms() {
        let mut scale = conv(c);
        for (i, &e) in d.iter().enumerate() {
            for _ in 0..e {
                scale = scale * mu[i].clone();
            }
        }
        let mut mono = vec![0u32; vars];
        mono.copy_from_slice(&d[..vars]);
        let mut term = MPoly::zero(vars);
        term.add_term(mono, scale);
        q = q.add(&term.mul(&last_powers[d[n - 1] as usize]));
    }
    q
}

/// Decides whether `𝔻_f^1` is, after rescaling, the unit ball: with `μ_i`
/// the axis roots, the ball condition is that `p(μ_1 t_1, …, μ_n t_n) − 1`
/// vanishes on the hyperplane `Σ t_i = 1`.
pub fn decide_spherical(f: &FreePolynomial, tol: f64) -> Result<SphericalityResult> {
    f.ensure_valid()?;
    let p = collapse(f);
    let n = f.n();
    let roots: Vec<(f64, Option<Rational>)> = (0..n).map(|i| axis_root(&p.axis_coeffs(i))).collect();
    let mu: Vec<f64> = roots.iter().map(|r| r.0).collect();
    let exact_mu: Option<Vec<Rational>> = roots.iter().map(|r| r.1.clone()).collect();

    let (residual, exact, restricted) = match &exact_mu {
        Some(mu_q) => {
            let q = restricted_polynomial(&p, mu_q, Clone::clone);
            let rows = q
                .terms()
                .iter()
                .map(|(e, c)| (e.clone(), Value::String(rational::format(c))))
                .collect();
            (q.max_abs_coeff(), true, rows)
        }
        None => {
            let q = restricted_polynomial(&p, &mu, rational::to_f64);
            let rows = q
                .terms()
                .iter()
                .map(|(e, c)| (e.clone(), serde_json::json!(c)))
                .collect();
            (q.max_abs_coeff(), false, rows)
        }
    };
    let spherical = if exact { residual == 0.0 } else { residual <= tol };
    Ok(SphericalityResult {
        verdict: if spherical { Verdict::Spherical } else { Verdict::Aspherical },
        mu,
        mu_exact: exact_mu.map(|m| m.iter().map(rational::format).collect()),
        residual,
        exact,
        tol,
        restricted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductRefutation {
    /// The block `A` (1-based).
    pub block: Vec<usize>,
    /// Its complement `B` (1-based).
    pub complement: Vec<usize>,
    /// Scaling applied to reach the degree-one normalized symbol.
    pub normalization: Vec<String>,
    /// Boundary point of `𝔻^1` of the restriction to `A`, embedded in `C^n`.
    pub z: Vec<f64>,
    /// Perturbation on the `B` coordinates.
    pub w: Vec<f64>,
    /// Membership value at `z + w`; exceeds 1.
    pub value: f64,
}

/// Witness that `𝔻_f^1 ≠ D_A × D_B`: `z` lies on the boundary of the slice
/// over `A` and `z + w` is outside the domain although `w` is an interior
/// point of the slice over `B`.
pub fn refute_product(f: &FreePolynomial, block: &[usize]) -> Result<ProductRefutation> {
    let n = f.n();
    let mut a: Vec<usize> = block.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() >= n || a.iter().any(|&i| i >= n) {
        return Err(Error::InvalidArgument(format!(
            "block must be a proper nonempty subset of 1..{n}"
        )));
    }
    let (g, lambda) = normalize_degree_one(f)?;
    let slice = restrict(&g, &a)?;
    let ones = vec![Complex64::new(1.0, 0.0); a.len()];
    let zs = boundary_point_on_ray(&slice.symbol, &ones)?;
    let mut z = vec![0.0; n];
    for (k, &i) in slice.mapping.iter().enumerate() {
        z[i] = zs[k].re;
    }
    let complement: Vec<usize> = (0..n).filter(|i| !a.contains(i)).collect();
    let mut w = vec![0.0; n];
    for &i in &complement {
        w[i] = PRODUCT_PERTURBATION;
    }
    let point: Vec<Complex64> = z.iter().zip(&w).map(|(a, b)| Complex64::new(a + b, 0.0)).collect();
    let value = scalar_membership(&g, &point)?.value;
    let floor = 1.0 + complement.len() as f64 * PRODUCT_PERTURBATION.powi(2);
    if value < floor - 1e-12 {
        return Err(Error::Internal(format!(
            "product witness value {value} below the guaranteed bound {floor}"
        )));
    }
    Ok(ProductRefutation {
        block: a.iter().map(|i| i + 1).collect(),
        complement: complement.iter().map(|i| i + 1).collect(),
        normalization: lambda.iter().map(rational::format).collect(),
        z,
        w,
        value,
    })
}

/// All proper nonempty blocks of `0..n` (as sorted index lists).
pub fn proper_blocks(n: usize) -> Vec<Vec<usize>> {
    (1..(1u64 << n) - 1)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}
