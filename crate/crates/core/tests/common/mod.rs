#![allow(dead_code)]

use ncd_core::rational::{ratio, Rational};
use ncd_core::{FreePolynomial, Permutation, Word};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn sym(text: &str) -> FreePolynomial {
    ncd_core::symbol::parse_symbol(text, None).unwrap()
}

pub fn small_positive(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(1..=6), rng.gen_range(1..=4))
}

/// Valid symbol over `n` letters: every linear term present, plus up to
/// `extra` higher terms of length `2..=max_degree`.
pub fn random_symbol(rng: &mut impl Rng, n: usize, max_degree: usize, extra: usize) -> FreePolynomial {
    let mut terms: Vec<(Word, Rational)> = (0..n).map(|i| (Word::letter(i), small_positive(rng))).collect();
    if max_degree >= 2 {
        for _ in 0..rng.gen_range(0..=extra) {
            let len = rng.gen_range(2..=max_degree);
            let letters: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
            terms.push((Word::new(letters), small_positive(rng)));
        }
    }
    FreePolynomial::new(n, terms).unwrap()
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

pub fn random_lambda(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| small_positive(rng)).collect()
}

/// Substitution `X_i ↦ λ_i X_{σ(i)}`, written out term by term.
pub fn substitute(g: &FreePolynomial, sigma: &Permutation, lambda: &[Rational]) -> FreePolynomial {
    let terms = g.terms().iter().map(|(w, c)| {
        let mut coeff = c.clone();
        let mut letters = Vec::with_capacity(w.len());
        for &l in w.letters() {
            coeff *= &lambda[l];
            letters.push(sigma.apply(l));
        }
        (Word::new(letters), coeff)
    });
    FreePolynomial::new(g.n(), terms.collect::<Vec<_>>()).unwrap()
}

/// Exhaustive search: linear coefficients force `λ_i = f_{σ(i)} / g_i`.
pub fn brute_force_equivalent(f: &FreePolynomial, g: &FreePolynomial) -> bool {
    if f.n() != g.n() || f.len() != g.len() {
        return false;
    }
    let n = f.n();
    Permutation::all(n).iter().any(|sigma| {
        let lambda: Vec<Rational> = (0..n)
            .map(|i| f.coeff(&Word::letter(sigma.apply(i))) / g.coeff(&Word::letter(i)))
            .collect();
        substitute(g, sigma, &lambda) == *f
    })
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}
