use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{FreePolynomial, Word};
use crate::error::{Error, Result};
use crate::rational;

/// `{"n": 2, "terms": [{"word": [1, 2], "coeff": "3"}]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub word: Vec<usize>,
    /// `"p/q"` string or a JSON number (read exactly from its decimal form).
    pub coeff: Value,
}

impl FreePolynomial {
    pub fn to_json(&self) -> SymbolJson {
        SymbolJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermJson {
                    word: w.to_one_based(),
                    coeff: Value::String(rational::format(c)),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &SymbolJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(doc.terms.len());
        for (k, t) in doc.terms.iter().enumerate() {
            let word = Word::from_one_based(&t.word)
                .ok_or(Error::UnknownVariable { index: 0, pos: k })?;
            let coeff = match &t.coeff {
                Value::String(s) => rational::parse(s)?,
                Value::Number(num) => rational::parse(&num.to_string())?,
                other => {
                    return Err(Error::Format(format!("term {k}: coefficient must be a string or number, got {other}")))
                }
            };
            terms.push((word, coeff));
        }
        FreePolynomial::new(doc.n, terms)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: SymbolJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json(&doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("symbol JSON is always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::symbol::parse_symbol;

    #[test]
    fn reads_strings_and_numbers() {
        let f = FreePolynomial::from_json_str(
            r#"{"n":2,"terms":[{"word":[1],"coeff":1},{"word":[2],"coeff":"1"},{"word":[1,2],"coeff":0.5}]}"#,
        )
        .unwrap();
        assert_eq!(f.coeff(&Word::new(vec![0, 1])), ratio(1, 2));
        assert_eq!(f, parse_symbol("X1 + X2 + 1/2 X1*X2", None).unwrap());
    }

    #[test]
    fn writes_length_lex_with_rational_strings() {
        let f = parse_symbol("3 X1*X2 + X2 + 1/2 X1", None).unwrap();
        assert_eq!(
            f.to_json_string(),
            r#"{"n":2,"terms":[{"word":[1],"coeff":"1/2"},{"word":[2],"coeff":"1"},{"word":[1,2],"coeff":"3"}]}"#
        );
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(FreePolynomial::from_json_str(r#"{"n":2,"terms":[{"word":[3],"coeff":1}]}"#).is_err());
        assert!(FreePolynomial::from_json_str(r#"{"n":2,"terms":[{"word":[0],"coeff":1}]}"#).is_err());
        assert!(FreePolynomial::from_json_str(r#"{"n":2,"terms":[{"word":[1],"coeff":true}]}"#).is_err());
        assert!(FreePolynomial::from_json_str(r#"{"n":2"#).is_err());
    }
}
