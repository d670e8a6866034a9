//! `ncd`: every operation of `ncd-core` behind a subcommand, reading symbols,
//! matrices and maps from files and writing one JSON document to stdout.
//!
//! Exit codes: 0 when a decision was rendered (negative answers included),
//! 1 on an internal failure, 2 on invalid input.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use ncd_core::equivalence::{
    canonical_form, certificate_matrix, decide_equivalence, domain_map_matrix, rational_matrix_to_complex,
    support_partition, EquivalenceCertificate, DEFAULT_SUPPORT_EPS,
};
use ncd_core::fock::{build_shifts, compute_weights, verify_family_membership, DEFAULT_MAX_LEN};
use ncd_core::geometry::{decide_spherical, proper_blocks, refute_product, refute_thullen, DEFAULT_TOL, PRODUCT_PERTURBATION};
use ncd_core::io::{matrix_from_json_str, tuple_from_json_str};
use ncd_core::linalg::operator_norm;
use ncd_core::matrixlevel::{
    cartan_forced_zeros_with, dual_map_apply, matrix_membership, tuple_to_json, FreeMapCoefficients, MatrixTuple,
    DEFAULT_EIG_TOL,
};
use ncd_core::rational;
use ncd_core::symbol::{normalize_degree_one, parse_symbol, validate_regular_positive};
use ncd_core::{Error, Execution, FreePolynomial, Word};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const DEFAULT_SEED: u64 = 0x5EED;
/// Words up to this length get an explicit norm check in `fock-verify`.
const NORM_CHECK_LEN: usize = 2;

#[derive(Debug, Parser)]
#[command(name = "ncd", version, about = "Classify noncommutative domain algebras given by free polynomial symbols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Fock-space truncation length L.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: usize,
    /// Numerical tolerance for eigenvalue and residual checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Threshold below which a matrix entry counts as zero.
    #[arg(long, global = true, default_value_t = DEFAULT_SUPPORT_EPS)]
    pub eps: f64,
    /// Seed for pseudorandom sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Require JSON input files (text symbols are rejected).
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the regular-positive clauses.
    Validate { symbol: PathBuf },
    /// Rescale so every linear coefficient is 1.
    Normalize { symbol: PathBuf },
    /// Canonical representative of the permutation-rescaling class.
    Canon { symbol: PathBuf },
    /// Decide equivalence of two symbols; the certificate maps the second onto the first.
    Classify { f: PathBuf, g: PathBuf },
    /// Decide whether the scalar domain is a ball.
    Spherical { symbol: PathBuf },
    /// Weight table b_α for |α| ≤ L.
    Weights { symbol: PathBuf },
    /// Check the truncated weighted-shift model.
    FockVerify {
        symbol: PathBuf,
        /// Include each shift as sparse "row col re im" triplets.
        #[arg(long)]
        triplets: bool,
    },
    /// Support partition of a square matrix.
    SupportPartition { matrix: PathBuf },
    /// Witnesses that the scalar domain is not a product.
    RefuteProduct {
        symbol: PathBuf,
        /// Comma-separated 1-based variables of one factor; all proper splits when omitted.
        #[arg(long, value_delimiter = ',')]
        block: Option<Vec<usize>>,
    },
    /// Evidence that a two-variable scalar domain is not a Thullen domain.
    RefuteThullen { symbol: PathBuf },
    /// Apply S_i = Σ_j M[i][j] T_j to a tuple; M is a matrix or a certificate.
    Dual {
        map: PathBuf,
        tuple: PathBuf,
        /// With a certificate, use the membership-preserving matrix with entries √λ_i.
        #[arg(long)]
        domain: bool,
        /// Report membership of the input tuple for this symbol.
        #[arg(long)]
        source: Option<PathBuf>,
        /// Report membership of the image tuple for this symbol.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Coefficients of a free map forced to vanish by linearity at levels 1..K.
    Cartan {
        map: PathBuf,
        /// Number of matrix levels; defaults to the degree cap.
        #[arg(long)]
        levels: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Normalize { .. } => "normalize",
            Command::Canon { .. } => "canon",
            Command::Classify { .. } => "classify",
            Command::Spherical { .. } => "spherical",
            Command::Weights { .. } => "weights",
            Command::FockVerify { .. } => "fock-verify",
            Command::SupportPartition { .. } => "support-partition",
            Command::RefuteProduct { .. } => "refute-product",
            Command::RefuteThullen { .. } => "refute-thullen",
            Command::Dual { .. } => "dual",
            Command::Cartan { .. } => "cartan",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub command: String,
    pub payload: Value,
    pub exit_code: i32,
}

impl CommandResult {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.payload).expect("JSON values always serialize")
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            CommandResult {
                command: String::new(),
                payload: json!({ "usage": e.to_string() }),
                exit_code: code,
            }
        }
    }
}

pub fn execute(cli: &Cli) -> CommandResult {
    let name = cli.command.name();
    let mut doc = Map::new();
    doc.insert("command".into(), json!(name));
    doc.insert("params".into(), params(cli));
    let exit_code = match dispatch(cli) {
        Ok((payload, code)) => {
            merge(&mut doc, payload);
            code
        }
        Err(e) => {
            let kind = if e.is_input_error() { "invalid_input" } else { "internal" };
            doc.insert("error".into(), json!({ "kind": kind, "message": e.to_string() }));
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    };
    CommandResult { command: name.into(), payload: Value::Object(doc), exit_code }
}

fn params(cli: &Cli) -> Value {
    json!({
        "max_len": cli.max_len,
        "tol": cli.tol,
        "eps": cli.eps,
        "perturbation": PRODUCT_PERTURBATION,
        "eig_tol": DEFAULT_EIG_TOL,
        "seed": cli.seed,
    })
}

fn merge(doc: &mut Map<String, Value>, payload: Value) {
    match payload {
        Value::Object(m) => doc.extend(m),
        other => {
            doc.insert("result".into(), other);
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Error> {
    serde_json::to_value(v).map_err(|e| Error::Internal(format!("serialization failed: {e}")))
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with(['{', '['])
}

/// A symbol file holds either the JSON form or the text grammar.
pub fn load_symbol(path: &Path, require_json: bool) -> Result<FreePolynomial, Error> {
    let text = read(path)?;
    if require_json || looks_like_json(&text) {
        FreePolynomial::from_json_str(&text)
    } else {
        parse_symbol(text.trim(), None)
    }
}

fn load_certificate_or_matrix(path: &Path, domain: bool) -> Result<(ncd_core::linalg::CMatrix, &'static str), Error> {
    let text = read(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    if doc.get("sigma").is_some() {
        let cert = EquivalenceCertificate::from_json_str(&text)?;
        Ok(if domain {
            (domain_map_matrix(&cert), "certificate_domain")
        } else {
            (rational_matrix_to_complex(&certificate_matrix(&cert)), "certificate")
        })
    } else {
        if domain {
            return Err(Error::InvalidArgument("--domain needs a certificate file".into()));
        }
        Ok((matrix_from_json_str(&text)?, "matrix"))
    }
}

fn dispatch(cli: &Cli) -> Result<(Value, i32), Error> {
    let sym = |p: &PathBuf| load_symbol(p, cli.json);
    let exec = Execution::default();
    match &cli.command {
        Command::Validate { symbol } => {
            let report = validate_regular_positive(&sym(symbol)?);
            let code = if report.passed { 0 } else { 2 };
            Ok((to_value(&report)?, code))
        }
        Command::Normalize { symbol } => {
            let (normalized, lambda) = normalize_degree_one(&sym(symbol)?)?;
            Ok((
                json!({
                    "lambda": lambda.iter().map(rational::format).collect::<Vec<_>>(),
                    "text": normalized.to_text(),
                    "symbol": to_value(&normalized.to_json())?,
                }),
                0,
            ))
        }
        Command::Canon { symbol } => {
            let c = canonical_form(&sym(symbol)?)?;
            Ok((
                json!({
                    "text": c.table.to_text(),
                    "symbol": to_value(&c.table.to_json())?,
                    "certificate": to_value(&c.certificate())?,
                }),
                0,
            ))
        }
        Command::Classify { f, g } => {
            let (f, g) = (sym(f)?, sym(g)?);
            let payload = match decide_equivalence(&f, &g)? {
                Some(cert) => {
                    let mut m = Map::new();
                    m.insert("equivalent".into(), json!(true));
                    merge(&mut m, to_value(&cert)?);
                    Value::Object(m)
                }
                None => json!({ "equivalent": false }),
            };
            Ok((payload, 0))
        }
        Command::Spherical { symbol } => Ok((to_value(&decide_spherical(&sym(symbol)?, cli.tol)?)?, 0)),
        Command::Weights { symbol } => {
            let table = compute_weights(&sym(symbol)?, cli.max_len)?;
            Ok((json!({ "weights": to_value(&table.rows())? }), 0))
        }
        Command::FockVerify { symbol, triplets } => {
            let f = sym(symbol)?;
            let family = build_shifts(&f, cli.max_len)?;
            let membership = verify_family_membership(&f, &family, cli.tol)?;
            let mut norms = Vec::new();
            let mut norms_ok = true;
            for alpha in Word::all_up_to(f.n(), NORM_CHECK_LEN.min(cli.max_len)) {
                let norm = operator_norm(&family.word_operator(&alpha)?);
                let b = family.weights().get(&alpha).expect("word within the truncation");
                let expected = 1.0 / rational::to_f64(b);
                let error = (norm * norm - expected).abs();
                norms_ok &= error <= cli.tol;
                norms.push(json!({
                    "word": alpha.to_one_based(),
                    "norm_sq": norm * norm,
                    "expected": expected,
                    "error": error,
                }));
            }
            let mut payload = json!({
                "passed": membership.passed && norms_ok,
                "membership": to_value(&membership)?,
                "shift_norms": norms,
            });
            if *triplets {
                payload["triplets"] = json!(family.shifts().iter().map(|s| s.to_triplets()).collect::<Vec<_>>());
            }
            Ok((payload, 0))
        }
        Command::SupportPartition { matrix } => {
            let u = matrix_from_json_str(&read(matrix)?)?;
            Ok((to_value(&support_partition(&u, cli.eps)?)?, 0))
        }
        Command::RefuteProduct { symbol, block } => {
            let f = sym(symbol)?;
            let blocks = match block {
                Some(b) => {
                    if b.contains(&0) {
                        return Err(Error::InvalidArgument("block indices start at 1".into()));
                    }
                    vec![b.iter().map(|i| i - 1).collect()]
                }
                None => proper_blocks(f.n()),
            };
            let witnesses = blocks.iter().map(|b| refute_product(&f, b)).collect::<Result<Vec<_>, _>>()?;
            Ok((json!({ "refuted": true, "witnesses": to_value(&witnesses)? }), 0))
        }
        Command::RefuteThullen { symbol } => Ok((to_value(&refute_thullen(&sym(symbol)?, cli.tol)?)?, 0)),
        Command::Dual { map, tuple, domain, source, target } => {
            let (m, kind) = load_certificate_or_matrix(map, *domain)?;
            let t = MatrixTuple::new(tuple_from_json_str(&read(tuple)?)?)?;
            let s = dual_map_apply(&m, &t)?;
            let mut payload = json!({ "map": kind, "tuple": to_value(&tuple_to_json(&s))? });
            if let Some(p) = source {
                payload["source_membership"] = to_value(&matrix_membership(&sym(p)?, &t, true, DEFAULT_EIG_TOL)?)?;
            }
            if let Some(p) = target {
                payload["target_membership"] = to_value(&matrix_membership(&sym(p)?, &s, true, DEFAULT_EIG_TOL)?)?;
            }
            Ok((payload, 0))
        }
        Command::Cartan { map, levels } => {
            let f = FreeMapCoefficients::from_json_str(&read(map)?)?;
            let levels = levels.unwrap_or(f.degree().max(1));
            Ok((to_value(&cartan_forced_zeros_with(&f, levels, cli.seed, exec)?)?, 0))
        }
    }
}
