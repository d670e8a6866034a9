//! Permutation-rescaling equivalence: certificates, canonical forms,
//! symmetry groups and the support partition of a unitary.

mod support;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

pub use support::{support_partition, SupportPartition, DEFAULT_SUPPORT_EPS, UNITARY_TOL};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::CMatrix;
use crate::rational::{self, Rational};
use crate::symbol::{apply_permutation_rescaling, normalize_degree_one, FreePolynomial, Permutation, Word};

/// `(σ, λ)` with `apply_permutation_rescaling(g, σ, λ) = f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquivalenceCertificate {
    pub sigma: Permutation,
    pub lambda: Vec<Rational>,
}

impl EquivalenceCertificate {
    pub fn identity(n: usize) -> Self {
        EquivalenceCertificate {
            sigma: Permutation::identity(n),
            lambda: vec![Rational::one(); n],
        }
    }

    pub fn new(sigma: Permutation, lambda: Vec<Rational>) -> Result<Self> {
        if sigma.len() != lambda.len() {
            return Err(Error::DimensionMismatch("σ and λ have different lengths".into()));
        }
        if lambda.iter().any(|l| !rational::is_positive(l)) {
            return Err(Error::InvalidArgument("λ entries must be positive".into()));
        }
        Ok(EquivalenceCertificate { sigma, lambda })
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn apply(&self, g: &FreePolynomial) -> Result<FreePolynomial> {
        apply_permutation_rescaling(g, &self.sigma, &self.lambda)
    }

    /// The certificate equal to applying `self` and then `next`.
    pub fn then(&self, next: &EquivalenceCertificate) -> EquivalenceCertificate {
        let lambda = (0..self.n())
            .map(|i| &self.lambda[i] * &next.lambda[self.sigma.apply(i)])
            .collect();
        EquivalenceCertificate {
            sigma: next.sigma.after(&self.sigma),
            lambda,
        }
    }

    pub fn inverse(&self) -> EquivalenceCertificate {
        let inv = self.sigma.inverse();
        let lambda = (0..self.n())
            .map(|j| self.lambda[inv.apply(j)].recip())
            .collect();
        EquivalenceCertificate { sigma: inv, lambda }
    }

    pub fn lambda_strings(&self) -> Vec<String> {
        self.lambda.iter().map(rational::format).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            sigma: Permutation,
            lambda: Vec<serde_json::Value>,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let lambda = doc
            .lambda
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => rational::parse(s),
                serde_json::Value::Number(x) => rational::parse(&x.to_string()),
                other => Err(Error::Format(format!("bad λ entry {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.sigma, lambda)
    }
}

impl Serialize for EquivalenceCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EquivalenceCertificate", 2)?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field("lambda", &self.lambda_strings())?;
        st.end()
    }
}

/// Scaled permutation matrix `M[i][σ(i)] = λ_i`.
pub fn certificate_matrix(cert: &EquivalenceCertificate) -> Vec<Vec<Rational>> {
    let n = cert.n();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        m[i][cert.sigma.apply(i)] = cert.lambda[i].clone();
    }
    m
}

pub fn rational_matrix_to_complex(m: &[Vec<Rational>]) -> CMatrix {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    CMatrix::from_fn(rows, cols, |r, c| Complex64::new(rational::to_f64(&m[r][c]), 0.0))
}

/// Matrix `D[i][σ(i)] = √λ_i` of the induced map on matrix points: for
/// `S ∈ 𝔻_f^k`, `D·S ∈ 𝔻_g^k` with the same defining operator, since the
/// defining sums are quadratic in the tuple.
pub fn domain_map_matrix(cert: &EquivalenceCertificate) -> CMatrix {
    let n = cert.n();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, cert.sigma.apply(i))] = Complex64::new(rational::to_f64(&cert.lambda[i]).sqrt(), 0.0);
    }
    m
}

/// Compares coefficient tables as dense vectors in length-lex word order
/// (absent words read as 0).
pub fn compare_tables(a: &BTreeMap<Word, Rational>, b: &BTreeMap<Word, Rational>) -> Ordering {
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (None, None) => return Ordering::Equal,
            // a has a positive entry where b reads 0
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((wa, ca)), Some((wb, cb))) => match wa.cmp(wb) {
                Ordering::Less => return (**ca).cmp(&Rational::zero()),
                Ordering::Greater => return Rational::zero().cmp(*cb),
                Ordering::Equal => {
                    let o = (**ca).cmp(*cb);
                    if o != Ordering::Equal {
                        return o;
                    }
                    ia.next();
                    ib.next();
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    /// The canonical representative: degree-one normalized, lexicographically
    /// minimal coefficient table over all variable permutations.
    pub table: FreePolynomial,
    /// Permutation taking the normalized input to `table`.
    pub witness: Permutation,
    /// Scaling used for normalization (`1/a_{g_i}`).
    pub normalization: Vec<Rational>,
}

impl CanonicalForm {
    /// Certificate mapping the original symbol onto the canonical table.
    pub fn certificate(&self) -> EquivalenceCertificate {
        EquivalenceCertificate {
            sigma: self.witness.clone(),
            lambda: self.normalization.clone(),
        }
    }
}

pub fn canonical_form(f: &FreePolynomial) -> Result<CanonicalForm> {
    canonical_form_with(f, Execution::default())
}

/// Exhaustive minimum over all `n!` permutations of the normalized symbol.
pub fn canonical_form_with(f: &FreePolynomial, exec: Execution) -> Result<CanonicalForm> {
    let (normalized, normalization) = normalize_degree_one(f)?;
    let n = f.n();
    let ones = vec![Rational::one(); n];
    let perms = Permutation::all(n);
    let tables = exec.map(&perms, |p| {
        apply_permutation_rescaling(&normalized, p, &ones).expect("normalized symbol and unit scaling")
    });
    let (best, _) = tables
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| compare_tables(a.terms(), b.terms()).then(ia.cmp(ib)))
        .expect("at least one permutation");
    Ok(CanonicalForm {
        table: tables[best].clone(),
        witness: perms[best].clone(),
        normalization,
    })
}

type Signature = Vec<(usize, Vec<usize>, Rational)>;

/// Relabeling-invariant description of variable `v`: for every term
/// containing it, the word length, the positions of `v`, and the coefficient.
fn variable_signature(f: &FreePolynomial, v: usize) -> Signature {
    let mut sig: Signature = f
        .terms()
        .iter()
        .filter_map(|(w, c)| {
            let positions: Vec<usize> = w
                .letters()
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == v)
                .map(|(k, _)| k)
                .collect();
            (!positions.is_empty()).then(|| (w.len(), positions, c.clone()))
        })
        .collect();
    sig.sort();
    sig
}

/// All permutations `π` with `apply(source, π, 1) = target`, for normalized
/// symbols of equal alphabet size, pruned by variable signatures.
fn matching_permutations(
    source: &FreePolynomial,
    target: &FreePolynomial,
    first_only: bool,
    exec: Execution,
) -> Vec<Permutation> {
    let n = source.n();
    if source.len() != target.len() {
        return Vec::new();
    }
    let src_sig: Vec<Signature> = (0..n).map(|v| variable_signature(source, v)).collect();
    let tgt_sig: Vec<Signature> = (0..n).map(|v| variable_signature(target, v)).collect();
    // allowed[v] = targets u with matching signatures
    let allowed: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..n).filter(|&u| src_sig[v] == tgt_sig[u]).collect())
        .collect();
    if allowed.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let ones = vec![Rational::one(); n];
    let matches = |p: &Permutation| {
        apply_permutation_rescaling(source, p, &ones)
            .map(|img| img == *target)
            .unwrap_or(false)
    };

    let branches = exec.map(&allowed[0], |&first| {
        let mut found = Vec::new();
        let mut images = vec![usize::MAX; n];
        let mut used = vec![false; n];
        images[0] = first;
        used[first] = true;
        search(1, &allowed, &mut images, &mut used, &mut found, first_only, &matches);
        found
    });
    let mut out: Vec<Permutation> = branches.into_iter().flatten().collect();
    out.sort();
    if first_only {
        out.truncate(1);
    }
    out
}

fn search(
    v: usize,
    allowed: &[Vec<usize>],
    images: &mut Vec<usize>,
    used: &mut Vec<bool>,
    found: &mut Vec<Permutation>,
    first_only: bool,
    matches: &(dyn Fn(&Permutation) -> bool + Sync),
) {
    if first_only && !found.is_empty() {
        return;
    }
    if v == allowed.len() {
        let p = Permutation::from_images(images.clone()).expect("bijective by construction");
        if matches(&p) {
            found.push(p);
        }
        return;
    }
    for &u in &allowed[v] {
        if !used[u] {
            used[u] = true;
            images[v] = u;
            search(v + 1, allowed, images, used, found, first_only, matches);
            used[u] = false;
        }
    }
}

/// Certificate `(σ, λ)` with `apply_permutation_rescaling(g, σ, λ) = f`, if
/// one exists. Every returned certificate has been checked by exact
/// substitution.
pub fn decide_equivalence(f: &FreePolynomial, g: &FreePolynomial) -> Result<Option<EquivalenceCertificate>> {
    decide_equivalence_with(f, g, Execution::default())
}

pub fn decide_equivalence_with(
    f: &FreePolynomial,
    g: &FreePolynomial,
    exec: Execution,
) -> Result<Option<EquivalenceCertificate>> {
    f.ensure_valid()?;
    g.ensure_valid()?;
    if f.n() != g.n() {
        return Ok(None);
    }
    let (fn_, lambda_f) = normalize_degree_one(f)?;
    let (gn, lambda_g) = normalize_degree_one(g)?;
    let Some(pi) = matching_permutations(&gn, &fn_, true, exec).into_iter().next() else {
        return Ok(None);
    };
    let cert = lift(&pi, &lambda_g, &lambda_f);
    verify(&cert, g, f)?;
    Ok(Some(cert))
}

/// Certificate in original coordinates from a permutation between the
/// normalized symbols: `λ_i = λ_g,i / λ_f,π(i)`.
fn lift(pi: &Permutation, lambda_g: &[Rational], lambda_f: &[Rational]) -> EquivalenceCertificate {
    let lambda = (0..pi.len())
        .map(|i| &lambda_g[i] / &lambda_f[pi.apply(i)])
        .collect();
    EquivalenceCertificate { sigma: pi.clone(), lambda }
}

fn verify(cert: &EquivalenceCertificate, g: &FreePolynomial, f: &FreePolynomial) -> Result<()> {
    if cert.apply(g)? == *f {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "certificate {:?} failed exact verification",
            cert
        )))
    }
}

/// All certificates `(σ, λ)` with `apply_permutation_rescaling(f, σ, λ) = f`,
/// ordered by permutation.
pub fn symmetry_group(f: &FreePolynomial) -> Result<Vec<EquivalenceCertificate>> {
    symmetry_group_with(f, Execution::default())
}

pub fn symmetry_group_with(f: &FreePolynomial, exec: Execution) -> Result<Vec<EquivalenceCertificate>> {
    let (normalized, lambda) = normalize_degree_one(f)?;
    matching_permutations(&normalized, &normalized, false, exec)
        .iter()
        .map(|pi| {
            let cert = lift(pi, &lambda, &lambda);
            verify(&cert, f, f)?;
            Ok(cert)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::symbol::parse_symbol;

    fn sym(s: &str) -> FreePolynomial {
        parse_symbol(s, None).unwrap()
    }

    #[test]
    fn canonical_form_examples() {
        let f = sym("X1 + X2 + 3 X1*X2");
        let c = canonical_form(&f).unwrap();
        assert_eq!(c.table, sym("X1 + X2 + 3 X2*X1"));
        assert_eq!(c.witness, Permutation::swap(2, 0, 1));

        let g = sym("2 X1 + X2 + 6 X2*X1");
        let cg = canonical_form(&g).unwrap();
        assert_eq!(cg.table, c.table);
        assert!(cg.witness.is_identity());
        assert_eq!(cg.certificate().apply(&g).unwrap(), cg.table);

        let disk = sym("X1 + X2 + X3");
        let cd = canonical_form(&disk).unwrap();
        assert_eq!(cd.table, disk);
        assert!(cd.witness.is_identity());
    }

    #[test]
    fn decide_equivalence_examples() {
        let f = sym("X1 + X2 + 3 X1*X2");
        let g = sym("2 X1 + X2 + 6 X2*X1");
        let h = sym("X1 + 2 X2 + X1*X1");
        let cert = decide_equivalence(&f, &g).unwrap().unwrap();
        assert_eq!(cert.sigma, Permutation::swap(2, 0, 1));
        assert_eq!(cert.lambda, vec![ratio(1, 2), int(1)]);
        assert!(decide_equivalence(&f, &h).unwrap().is_none());
        assert!(decide_equivalence(&g, &h).unwrap().is_none());
        let refl = decide_equivalence(&f, &f).unwrap().unwrap();
        assert_eq!(refl, EquivalenceCertificate::identity(2));
        assert!(decide_equivalence(&f, &sym("X1")).unwrap().is_none());
        assert!(decide_equivalence(&f, &parse_symbol("X2", Some(2)).unwrap()).is_err());
    }

    #[test]
    fn symmetry_group_examples() {
        let full = symmetry_group(&sym("X1 + X2")).unwrap();
        assert_eq!(full.len(), 2);
        assert!(full.iter().all(|c| c.lambda == vec![int(1), int(1)]));

        let trivial = symmetry_group(&sym("X1 + X2 + 3 X1*X2")).unwrap();
        assert_eq!(trivial, vec![EquivalenceCertificate::identity(2)]);

        let sym2 = symmetry_group(&sym("1/2 X1 + 1/2 X2 + 1/2 X1*X2 + 1/2 X2*X1")).unwrap();
        assert_eq!(sym2.len(), 2);
        assert!(sym2.iter().all(|c| c.lambda == vec![int(1), int(1)]));

        // scaled symmetric symbol: the swap needs a nontrivial rescaling
        let scaled = sym("2 X1 + 3 X2");
        let group = symmetry_group(&scaled).unwrap();
        assert_eq!(group.len(), 2);
        assert_eq!(group[1].lambda, vec![ratio(3, 2), ratio(2, 3)]);
    }

    #[test]
    fn certificate_matrix_examples() {
        let id = certificate_matrix(&EquivalenceCertificate::identity(2));
        assert_eq!(id, vec![vec![int(1), int(0)], vec![int(0), int(1)]]);

        let swap = EquivalenceCertificate::new(Permutation::swap(2, 0, 1), vec![ratio(1, 2), int(1)]).unwrap();
        assert_eq!(
            certificate_matrix(&swap),
            vec![vec![int(0), ratio(1, 2)], vec![int(1), int(0)]]
        );

        let cycle = EquivalenceCertificate::new(
            Permutation::from_one_based(&[2, 3, 1]).unwrap(),
            vec![int(1); 3],
        )
        .unwrap();
        let m = certificate_matrix(&cycle);
        assert_eq!(m[0][1], int(1));
        assert_eq!(m[1][2], int(1));
        assert_eq!(m[2][0], int(1));
        assert_eq!(m.iter().flatten().filter(|x| !x.is_zero()).count(), 3);
    }

    #[test]
    fn certificate_algebra() {
        let f = sym("X1 + 2 X2 + 5 X1*X2*X2 + X3 + 1/3 X3*X1");
        let a = EquivalenceCertificate::new(
            Permutation::from_one_based(&[2, 3, 1]).unwrap(),
            vec![ratio(1, 2), int(3), ratio(5, 7)],
        )
        .unwrap();
        let b = EquivalenceCertificate::new(
            Permutation::from_one_based(&[1, 3, 2]).unwrap(),
            vec![int(2), ratio(1, 9), int(4)],
        )
        .unwrap();
        let two_step = b.apply(&a.apply(&f).unwrap()).unwrap();
        assert_eq!(a.then(&b).apply(&f).unwrap(), two_step);
        assert_eq!(a.inverse().apply(&a.apply(&f).unwrap()).unwrap(), f);
        assert_eq!(a.then(&a.inverse()), EquivalenceCertificate::identity(3));
    }

    #[test]
    fn certificate_json() {
        let c = EquivalenceCertificate::new(Permutation::swap(2, 0, 1), vec![ratio(1, 2), int(1)]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"sigma":[2,1],"lambda":["1/2","1"]}"#);
        assert_eq!(EquivalenceCertificate::from_json_str(&s).unwrap(), c);
    }

    #[test]
    fn table_comparison_reads_absent_as_zero() {
        let a = sym("X1 + X2 + 3 X1*X2");
        let b = sym("X1 + X2 + 3 X2*X1");
        assert_eq!(compare_tables(a.terms(), b.terms()), Ordering::Greater);
        assert_eq!(compare_tables(b.terms(), a.terms()), Ordering::Less);
        assert_eq!(compare_tables(a.terms(), a.terms()), Ordering::Equal);
    }
}
