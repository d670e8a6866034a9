//! Minimal commutative multivariate polynomials over an exact or float
//! coefficient ring, enough for the hyperplane-substitution test.

use std::collections::BTreeMap;

use num_traits::{Num, Signed};

use crate::rational::{self, Rational};

pub trait Coefficient: Clone + Num + PartialEq + Send + Sync {
    fn magnitude(&self) -> f64;
}

impl Coefficient for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for Rational {
    fn magnitude(&self) -> f64 {
        rational::to_f64(&self.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MPoly<C> {
    vars: usize,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coefficient> MPoly<C> {
    pub fn zero(vars: usize) -> Self {
        MPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: C) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, C::one());
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C> {
        &self.terms
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C) {
        let slot = self.terms.entry(exps).or_insert_with(C::zero);
        *slot = slot.clone() + c;
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(Coefficient::magnitude).fold(0.0, f64::max)
    }
}

/// Powers `base^0, …, base^max` by repeated multiplication.
pub fn powers<C: Coefficient>(base: &MPoly<C>, max: u32) -> Vec<MPoly<C>> {
    let mut out = vec![MPoly::constant(base.vars, C::one())];
    for k in 1..=max as usize {
        out.push(out[k - 1].mul(base));
    }
    out
}
