//! Free polynomial symbols: representation, validation and the
//! permutation-rescaling action.

mod collapse;
mod json;
mod parse;
mod perm;
mod word;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use collapse::{collapse, CollapsedPolynomial, MultiDegree};
pub use json::{SymbolJson, TermJson};
pub use parse::parse_symbol;
pub use perm::Permutation;
pub use word::Word;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A finitely supported free polynomial `Σ a_α X_α` in `n` noncommuting
/// indeterminates with exact rational coefficients.
///
/// Zero coefficients are never stored. Values that violate the regular
/// positive conditions (constant term, negative or missing linear
/// coefficients) can be represented so that [`validate_regular_positive`]
/// can report on them; operations that need a valid symbol check first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreePolynomial {
    n: usize,
    terms: BTreeMap<Word, Rational>,
}

impl FreePolynomial {
    /// Builds a polynomial, merging repeated words and dropping zeros.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Word, Rational)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("alphabet size must be at least 1".into()));
        }
        let mut map: BTreeMap<Word, Rational> = BTreeMap::new();
        for (w, c) in terms {
            if let Some(&l) = w.letters().iter().find(|&&l| l >= n) {
                return Err(Error::IndexOutOfRange { index: l + 1, n });
            }
            *map.entry(w).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(FreePolynomial { n, terms: map })
    }

    /// Convenience constructor from 1-based words and `(p, q)` coefficients.
    pub fn from_pairs(n: usize, terms: &[(&[usize], i64, i64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for &(w, p, q) in terms {
            let word = Word::from_one_based(w).ok_or(Error::UnknownVariable { index: 0, pos: 0 })?;
            out.push((word, rational::ratio(p, q)));
        }
        Self::new(n, out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        validate_regular_positive(self).passed
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_regular_positive(self);
        if report.passed {
            Ok(())
        } else {
            let failed: Vec<String> = report
                .clauses
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} ({})", c.clause, c.detail))
                .collect();
            Err(Error::InvalidSymbol(failed.join("; ")))
        }
    }

    /// Linear coefficients `a_{g_i}`.
    pub fn linear_coeffs(&self) -> Vec<Rational> {
        (0..self.n).map(|i| self.coeff(&Word::letter(i))).collect()
    }

    pub fn is_degree_one_normalized(&self) -> bool {
        self.linear_coeffs().iter().all(One::is_one)
    }

    /// Text form, terms in length-lex order: `X1 + X2 + 3 X1*X2`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if w.is_empty() {
                write!(f, "{}", rational::format(c))?;
            } else if c.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{} {w}", rational::format(c))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreePolynomial(n={}, {})", self.n, self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseCheck {
    pub clause: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub clauses: Vec<ClauseCheck>,
}

/// Checks the regular positive conditions: no constant term, positive
/// linear coefficients, nonnegative coefficients. The growth condition holds
/// for every polynomial and is recorded as such.
pub fn validate_regular_positive(f: &FreePolynomial) -> ValidationReport {
    let mut clauses = Vec::new();

    let constant = f.coeff(&Word::empty());
    clauses.push(ClauseCheck {
        clause: "a_{g_0}=0".into(),
        passed: constant.is_zero(),
        detail: if constant.is_zero() {
            "no constant term".into()
        } else {
            format!("constant term {}", rational::format(&constant))
        },
    });

    let missing: Vec<String> = (0..f.n)
        .filter(|&i| !f.coeff(&Word::letter(i)).is_positive())
        .map(|i| format!("X{}", i + 1))
        .collect();
    clauses.push(ClauseCheck {
        clause: "a_{g_i}>0".into(),
        passed: missing.is_empty(),
        detail: if missing.is_empty() {
            "every linear coefficient is positive".into()
        } else {
            format!("nonpositive linear coefficient for {}", missing.join(", "))
        },
    });

    let negative: Vec<String> = f
        .terms
        .iter()
        .filter(|(_, c)| c.is_negative())
        .map(|(w, c)| format!("{w}: {}", rational::format(c)))
        .collect();
    clauses.push(ClauseCheck {
        clause: "a_alpha>=0".into(),
        passed: negative.is_empty(),
        detail: if negative.is_empty() {
            "all coefficients nonnegative".into()
        } else {
            format!("negative coefficients {}", negative.join(", "))
        },
    });

    clauses.push(ClauseCheck {
        clause: "growth".into(),
        passed: true,
        detail: "vacuous for polynomials (finite support)".into(),
    });

    ValidationReport {
        passed: clauses.iter().all(|c| c.passed),
        clauses,
    }
}

/// Substitutes `X_i ↦ λ_i X_{σ(i)}` in `g`: the term `(i_1…i_k, c)` becomes
/// `(σ(i_1)…σ(i_k), c·λ_{i_1}⋯λ_{i_k})`.
pub fn apply_permutation_rescaling(
    g: &FreePolynomial,
    sigma: &Permutation,
    lambda: &[Rational],
) -> Result<FreePolynomial> {
    let n = g.n;
    if sigma.len() != n || lambda.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "symbol has {n} variables, permutation {} and scaling {}",
            sigma.len(),
            lambda.len()
        )));
    }
    if let Some(i) = lambda.iter().position(|l| !l.is_positive()) {
        return Err(Error::InvalidArgument(format!(
            "scaling λ_{} = {} is not positive",
            i + 1,
            rational::format(&lambda[i])
        )));
    }
    let terms = g.terms.iter().map(|(w, c)| {
        let scale = w
            .letters()
            .iter()
            .fold(c.clone(), |acc, &l| acc * &lambda[l]);
        (w.map_letters(|l| sigma.apply(l)), scale)
    });
    FreePolynomial::new(n, terms)
}

/// Rescales so every linear coefficient becomes 1; returns `λ_i = 1/a_{g_i}`.
pub fn normalize_degree_one(f: &FreePolynomial) -> Result<(FreePolynomial, Vec<Rational>)> {
    f.ensure_valid()?;
    let lambda: Vec<Rational> = f.linear_coeffs().iter().map(|a| a.recip()).collect();
    let g = apply_permutation_rescaling(f, &Permutation::identity(f.n), &lambda)?;
    Ok((g, lambda))
}

/// Result of [`restrict`]: the restricted symbol and, for each new variable,
/// its original 0-based index.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub symbol: FreePolynomial,
    pub mapping: Vec<usize>,
}

/// Sets the variables outside `keep` to zero and renames the survivors to a
/// contiguous range, preserving their order.
pub fn restrict(f: &FreePolynomial, keep: &[usize]) -> Result<Restriction> {
    let mut mapping: Vec<usize> = keep.to_vec();
    mapping.sort_unstable();
    mapping.dedup();
    if mapping.is_empty() {
        return Err(Error::InvalidArgument("restriction to an empty variable set".into()));
    }
    if let Some(&bad) = mapping.iter().find(|&&i| i >= f.n) {
        return Err(Error::IndexOutOfRange { index: bad + 1, n: f.n });
    }
    let mut rename = vec![usize::MAX; f.n];
    for (new, &old) in mapping.iter().enumerate() {
        rename[old] = new;
    }
    let terms = f
        .terms
        .iter()
        .filter(|(w, _)| w.letters().iter().all(|&l| rename[l] != usize::MAX))
        .map(|(w, c)| (w.map_letters(|l| rename[l]), c.clone()));
    Ok(Restriction {
        symbol: FreePolynomial::new(mapping.len(), terms)?,
        mapping,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn f_example() -> FreePolynomial {
        parse_symbol("X1 + X2 + 3 X1*X2", Some(2)).unwrap()
    }

    fn g_example() -> FreePolynomial {
        parse_symbol("2 X1 + X2 + 6 X2*X1", Some(2)).unwrap()
    }

    #[test]
    fn validation_clauses() {
        assert!(validate_regular_positive(&f_example()).passed);

        let missing = parse_symbol("X2", Some(2)).unwrap();
        let r = validate_regular_positive(&missing);
        assert!(!r.passed);
        let failed: Vec<_> = r.clauses.iter().filter(|c| !c.passed).map(|c| c.clause.as_str()).collect();
        assert_eq!(failed, vec!["a_{g_i}>0"]);

        let constant = FreePolynomial::new(1, [(Word::empty(), int(1)), (Word::letter(0), int(1))]).unwrap();
        let r = validate_regular_positive(&constant);
        let failed: Vec<_> = r.clauses.iter().filter(|c| !c.passed).map(|c| c.clause.as_str()).collect();
        assert_eq!(failed, vec!["a_{g_0}=0"]);

        let negative = FreePolynomial::from_pairs(1, &[(&[1], 1, 1), (&[1, 1], -1, 2)]).unwrap();
        assert!(!validate_regular_positive(&negative).passed);
    }

    #[test]
    fn permutation_rescaling_examples() {
        let swap = Permutation::swap(2, 0, 1);
        let out = apply_permutation_rescaling(&g_example(), &swap, &[ratio(1, 2), int(1)]).unwrap();
        assert_eq!(out, f_example());

        let f = f_example();
        let id = apply_permutation_rescaling(&f, &Permutation::identity(2), &[int(1), int(1)]).unwrap();
        assert_eq!(id, f);

        let disk = parse_symbol("X1 + X2", None).unwrap();
        let scaled = apply_permutation_rescaling(&disk, &Permutation::identity(2), &[int(2), int(3)]).unwrap();
        assert_eq!(scaled, parse_symbol("2 X1 + 3 X2", None).unwrap());

        assert!(apply_permutation_rescaling(&disk, &swap, &[int(0), int(1)]).is_err());
        assert!(apply_permutation_rescaling(&disk, &swap, &[int(1)]).is_err());
    }

    #[test]
    fn normalization_examples() {
        let (g, lambda) = normalize_degree_one(&g_example()).unwrap();
        assert_eq!(g, parse_symbol("X1 + X2 + 3 X2*X1", None).unwrap());
        assert_eq!(lambda, vec![ratio(1, 2), int(1)]);

        let (f, lambda) = normalize_degree_one(&f_example()).unwrap();
        assert_eq!(f, f_example());
        assert_eq!(lambda, vec![int(1), int(1)]);

        let h = parse_symbol("X1 + 2 X2 + X1*X1", None).unwrap();
        let (hn, lambda) = normalize_degree_one(&h).unwrap();
        assert_eq!(hn, parse_symbol("X1 + X2 + X1*X1", None).unwrap());
        assert_eq!(lambda, vec![int(1), ratio(1, 2)]);

        assert!(normalize_degree_one(&parse_symbol("X2", Some(2)).unwrap()).is_err());
    }

    #[test]
    fn restriction_examples() {
        let r = restrict(&f_example(), &[0]).unwrap();
        assert_eq!(r.symbol, parse_symbol("X1", None).unwrap());
        assert_eq!(r.mapping, vec![0]);

        let r = restrict(&f_example(), &[0, 1]).unwrap();
        assert_eq!(r.symbol, f_example());

        let h = parse_symbol("X1 + 2 X2 + X1*X1", None).unwrap();
        let r = restrict(&h, &[1]).unwrap();
        assert_eq!(r.symbol, parse_symbol("2 X1", None).unwrap());
        assert_eq!(r.mapping, vec![1]);

        assert!(restrict(&h, &[]).is_err());
    }

    #[test]
    fn display_is_length_lex() {
        let f = parse_symbol("3 X1*X2 + X2 + X1", None).unwrap();
        assert_eq!(f.to_text(), "X1 + X2 + 3 X1*X2");
        let five = parse_symbol("1/2 X1 + 1/2 X2 + 1/2 X1*X1 + 1/2 X2*X2 + X1*X2", None).unwrap();
        assert_eq!(five.to_text(), "1/2 X1 + 1/2 X2 + 1/2 X1*X1 + X1*X2 + 1/2 X2*X2");
    }
}
