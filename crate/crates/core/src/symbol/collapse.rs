use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use super::FreePolynomial;
use crate::rational::{self, Rational};

/// Exponent vector of a commutative monomial.
pub type MultiDegree = Vec<u32>;

/// Commutative image of a symbol: `c_d = Σ { a_α : per-letter counts of α = d }`.
///
/// `p(t_1,…,t_n) = Σ c_d t^d` evaluated at `t_i = |z_i|²` is the scalar
/// defining function `Σ a_α |z_α|²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapsedPolynomial {
    n: usize,
    terms: BTreeMap<MultiDegree, Rational>,
}

impl CollapsedPolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<MultiDegree, Rational> {
        &self.terms
    }

    pub fn coeff(&self, d: &[u32]) -> Rational {
        self.terms.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    /// Float coefficients, for the numeric paths.
    pub fn float_terms(&self) -> Vec<(MultiDegree, f64)> {
        self.terms.iter().map(|(d, c)| (d.clone(), rational::to_f64(c))).collect()
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(d, c)| rational::to_f64(c) * monomial(d, t))
            .sum()
    }

    /// `∂p/∂t_var` at `t`.
    pub fn partial(&self, var: usize, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .filter(|(d, _)| d[var] > 0)
            .map(|(d, c)| {
                let mut lowered = d.clone();
                lowered[var] -= 1;
                rational::to_f64(c) * d[var].to_f64().unwrap() * monomial(&lowered, t)
            })
            .sum()
    }

    /// Coefficients `c_{k e_i}` of the axis polynomial in variable `i`, indexed by `k`.
    pub fn axis_coeffs(&self, i: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero()];
        for (d, c) in &self.terms {
            let on_axis = d.iter().enumerate().all(|(j, &e)| j == i || e == 0);
            if on_axis && d[i] > 0 {
                let k = d[i] as usize;
                if out.len() <= k {
                    out.resize(k + 1, Rational::zero());
                }
                out[k] += c;
            }
        }
        out
    }

    /// Variables permuted by `σ` (variable `i` becomes `σ(i)`) and `t_i` scaled by `λ_i`.
    pub fn permute_scale(&self, sigma: &super::Permutation, lambda: &[Rational]) -> CollapsedPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(d, c)| {
                let mut nd = vec![0u32; self.n];
                let mut coeff = c.clone();
                for (i, &e) in d.iter().enumerate() {
                    nd[sigma.apply(i)] = e;
                    coeff *= rational::pow(&lambda[i], e);
                }
                (nd, coeff)
            })
            .collect();
        CollapsedPolynomial { n: self.n, terms }
    }
}

fn monomial(d: &[u32], t: &[f64]) -> f64 {
    d.iter().zip(t).map(|(&e, &x)| x.powi(e as i32)).product()
}

pub fn collapse(f: &FreePolynomial) -> CollapsedPolynomial {
    let n = f.n();
    let mut terms: BTreeMap<MultiDegree, Rational> = BTreeMap::new();
    for (w, c) in f.terms() {
        *terms.entry(w.counts(n)).or_insert_with(Rational::zero) += c;
    }
    terms.retain(|_, c| !c.is_zero());
    CollapsedPolynomial { n, terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::symbol::parse_symbol;

    #[test]
    fn collapse_examples() {
        let f = parse_symbol("X1 + X2 + 3 X1*X2", None).unwrap();
        let p = collapse(&f);
        assert_eq!(p.terms().len(), 3);
        assert_eq!(p.coeff(&[1, 0]), int(1));
        assert_eq!(p.coeff(&[0, 1]), int(1));
        assert_eq!(p.coeff(&[1, 1]), int(3));

        // ½X1+½X2+½(X1+X2)² expanded
        let g = parse_symbol(
            "1/2 X1 + 1/2 X2 + 1/2 X1*X1 + 1/2 X1*X2 + 1/2 X2*X1 + 1/2 X2*X2",
            None,
        )
        .unwrap();
        let p = collapse(&g);
        assert_eq!(p.coeff(&[1, 0]), ratio(1, 2));
        assert_eq!(p.coeff(&[0, 1]), ratio(1, 2));
        assert_eq!(p.coeff(&[2, 0]), ratio(1, 2));
        assert_eq!(p.coeff(&[0, 2]), ratio(1, 2));
        assert_eq!(p.coeff(&[1, 1]), int(1));

        let x = collapse(&parse_symbol("X1", None).unwrap());
        assert_eq!(x.terms().len(), 1);
        assert_eq!(x.coeff(&[1]), int(1));
    }

    #[test]
    fn evaluation_and_partials() {
        let p = collapse(&parse_symbol("X1 + X2 + 3 X1*X2", None).unwrap());
        assert!((p.eval(&[0.5, 0.5]) - (1.0 + 0.75)).abs() < 1e-15);
        assert!((p.partial(0, &[0.25, 0.5]) - 2.5).abs() < 1e-15);
        assert!((p.partial(1, &[0.75, 0.5]) - 3.25).abs() < 1e-15);
        let h = collapse(&parse_symbol("X1 + 2 X2 + X1*X1", None).unwrap());
        assert_eq!(h.axis_coeffs(0), vec![int(0), int(1), int(1)]);
        assert_eq!(h.axis_coeffs(1), vec![int(0), int(2)]);
    }
}
