//! Parsing and validation of hypersurface instances
//! f(x) = sum_j lambda_j x^{a_j}, a homogeneous polynomial of degree d
//! in x_0..x_n over F_q, q = p^a.
//!
//! Instance files are JSON with top-level keys `p`, `a`, `n`, `d` and a
//! `terms` array of `{exponents, coeff}` records.  Unknown keys are
//! rejected.  Coefficients are written as polynomial expressions in the
//! symbol `g`, the fixed generator of F_q (plain integers for
//! prime-field values).

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::field::{FieldCtx, FieldElement};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    p: u64,
    a: usize,
    n: usize,
    d: u64,
    terms: Vec<RawTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    exponents: Vec<u64>,
    coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub exponents: Vec<u64>,
    pub coeff: FieldElement,
}

/// A validated instance.  Term order in the file defines the index
/// j = 1..N used everywhere downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceSpec {
    pub p: u64,
    pub a: usize,
    pub n: usize,
    pub d: u64,
    pub terms: Vec<Term>,
    field: FieldCtx,
    warnings: Vec<String>,
}

/// Appends the extra 1 to an exponent vector: a_j -> a_j^+.
pub fn augment(a_j: &[u64]) -> Vec<u64> {
    let mut v = a_j.to_vec();
    v.push(1);
    v
}

impl HypersurfaceSpec {
    pub fn parse(text: &str) -> Result<HypersurfaceSpec> {
        let raw: RawSpec = serde_json::from_str(text)
            .map_err(|e| crate::error::Error::Input(format!("instance parse error: {e}")))?;
        HypersurfaceSpec::from_raw(raw)
    }

    pub fn new(
        p: u64,
        a: usize,
        n: usize,
        d: u64,
        terms: Vec<(Vec<u64>, FieldElement)>,
    ) -> Result<HypersurfaceSpec> {
        let field = FieldCtx::new(p, a)?;
        let terms: Vec<Term> = terms
            .into_iter()
            .map(|(exponents, coeff)| Term { exponents, coeff })
            .collect();
        Self::validated(p, a, n, d, terms, field)
    }

    fn from_raw(raw: RawSpec) -> Result<HypersurfaceSpec> {
        let field = FieldCtx::new(raw.p, raw.a)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in &raw.terms {
            let coeff = parse_coeff(&t.coeff, &field)?;
            terms.push(Term {
                exponents: t.exponents.clone(),
                coeff,
            });
        }
        Self::validated(raw.p, raw.a, raw.n, raw.d, terms, field)
    }

    fn validated(
        p: u64,
        a: usize,
        n: usize,
        d: u64,
        terms: Vec<Term>,
        field: FieldCtx,
    ) -> Result<HypersurfaceSpec> {
        if d < 2 {
            return input(format!("degree d = {d} must be >= 2"));
        }
        if a < 1 {
            return input("extension degree a must be >= 1");
        }
        if terms.is_empty() {
            return input("instance must have at least one term");
        }
        let mut warnings = Vec::new();
        for (j, t) in terms.iter().enumerate() {
            if t.exponents.len() != n + 1 {
                return input(format!(
                    "term {}: exponent vector has {} entries, expected n+1 = {}",
                    j + 1,
                    t.exponents.len(),
                    n + 1
                ));
            }
            let sum: u64 = t.exponents.iter().sum();
            if sum != d {
                return input(format!(
                    "term {}: non-homogeneous (exponent sum {sum} != d = {d})",
                    j + 1
                ));
            }
            if field.is_zero(&t.coeff) {
                warnings.push(format!("term {} has zero coefficient", j + 1));
            }
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].exponents == terms[j].exponents {
                    return input(format!(
                        "duplicate exponent vector in terms {} and {}",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        Ok(HypersurfaceSpec {
            p,
            a,
            n,
            d,
            terms,
            field,
            warnings,
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    /// mu with ceil((n+1)/d) = mu + 1.
    pub fn mu(&self) -> i64 {
        crate::lattice::mu_of_size(self.n as u64 + 1, self.d)
    }

    /// The augmented support vectors a_j^+ in file order.
    pub fn support_plus(&self) -> Vec<Vec<u64>> {
        self.terms.iter().map(|t| augment(&t.exponents)).collect()
    }

    pub fn coeffs(&self) -> Vec<FieldElement> {
        self.terms.iter().map(|t| t.coeff.clone()).collect()
    }

    pub fn is_zero_poly(&self) -> bool {
        self.terms.iter().all(|t| self.field.is_zero(&t.coeff))
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Re-serializes to the instance file format.
    pub fn to_text(&self) -> String {
        let raw = RawSpec {
            p: self.p,
            a: self.a,
            n: self.n,
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|t| RawTerm {
                    exponents: t.exponents.clone(),
                    coeff: render_coeff(&t.coeff),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serialization cannot fail")
    }

    /// Returns a spec with permuted coordinates x_i -> x_{perm[i]} and
    /// terms reordered by `order` (indices into the current term list).
    pub fn rearranged(&self, perm: &[usize], order: &[usize]) -> Result<HypersurfaceSpec> {
        if perm.len() != self.n + 1 || order.len() != self.terms.len() {
            return input("rearrangement has wrong shape");
        }
        let terms: Vec<Term> = order
            .iter()
            .map(|&j| {
                let t = &self.terms[j];
                let mut exps = vec![0u64; self.n + 1];
                for (i, &e) in t.exponents.iter().enumerate() {
                    exps[perm[i]] = e;
                }
                Term {
                    exponents: exps,
                    coeff: t.coeff.clone(),
                }
            })
            .collect();
        Self::validated(self.p, self.a, self.n, self.d, terms, self.field.clone())
    }
}

/// Parses a coefficient expression: a sum of terms `c`, `g`, `g^k`,
/// `c*g^k` (also `c g^k`), with `+`/`-` separators.
pub fn parse_coeff(text: &str, field: &FieldCtx) -> Result<FieldElement> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return input("empty coefficient");
    }
    let mut acc = field.zero();
    let g = field.gen();
    let mut rest = s.as_str();
    let mut sign_neg = false;
    if let Some(r) = rest.strip_prefix('-') {
        sign_neg = true;
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    loop {
        let split = rest
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && !rest[..i].ends_with('^'))
            .map(|(i, _)| i);
        let (term, next) = match split {
            Some(i) => (&rest[..i], Some(&rest[i..])),
            None => (rest, None),
        };
        let val = parse_coeff_term(term, field, &g)?;
        acc = if sign_neg {
            field.sub(&acc, &val)
        } else {
            field.add(&acc, &val)
        };
        match next {
            None => break,
            Some(r) => {
                sign_neg = r.starts_with('-');
                rest = &r[1..];
                if rest.is_empty() {
                    return input(format!("malformed coefficient: {text}"));
                }
            }
        }
    }
    Ok(acc)
}

fn parse_coeff_term(term: &str, field: &FieldCtx, g: &FieldElement) -> Result<FieldElement> {
    if term.is_empty() {
        return input("malformed coefficient: empty term");
    }
    let (num_part, g_part) = match term.find('g') {
        Some(i) => (&term[..i], Some(&term[i..])),
        None => (term, None),
    };
    let scalar = {
        let t = num_part.trim_end_matches('*');
        if t.is_empty() {
            1u64
        } else {
            t.parse::<u64>()
                .map_err(|_| crate::error::Error::Input(format!("malformed coefficient: {term}")))?
        }
    };
    let mut val = field.from_prime(scalar);
    if let Some(gp) = g_part {
        if field.degree() == 1 {
            return input(format!(
                "coefficient `{term}` uses the generator g but the base field is prime"
            ));
        }
        let exp = if gp == "g" {
            1u64
        } else if let Some(e) = gp.strip_prefix("g^") {
            e.parse::<u64>()
                .map_err(|_| crate::error::Error::Input(format!("malformed coefficient: {term}")))?
        } else {
            return input(format!("malformed coefficient: {term}"));
        };
        val = field.mul(&val, &field.pow(g, exp));
    }
    Ok(val)
}

/// Renders an element as a coefficient expression in `g`.
pub fn render_coeff(x: &FieldElement) -> String {
    let mut parts = Vec::new();
    for (i, &c) in x.coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let part = match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "g".to_string(),
            (1, c) => format!("{c}*g"),
            (i, 1) => format!("g^{i}"),
            (i, c) => format!("{c}*g^{i}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermat_cubic_text(p: u64) -> String {
        format!(
            r#"{{"p": {p}, "a": 1, "n": 2, "d": 3,
                "terms": [
                  {{"exponents": [3,0,0], "coeff": "1"}},
                  {{"exponents": [0,3,0], "coeff": "1"}},
                  {{"exponents": [0,0,3], "coeff": "1"}}
                ]}}"#
        )
    }

    #[test]
    fn parse_fermat_cubic() {
        let spec = HypersurfaceSpec::parse(&fermat_cubic_text(7)).unwrap();
        assert_eq!(spec.num_terms(), 3);
        assert_eq!(spec.p, 7);
        assert_eq!(spec.mu(), 0);
        assert!(spec.warnings().is_empty());
    }

    #[test]
    fn rejects_non_homogeneous() {
        let text = r#"{"p": 3, "a": 1, "n": 1, "d": 2,
            "terms": [{"exponents": [2,1], "coeff": "1"}]}"#;
        assert!(HypersurfaceSpec::parse(text).is_err());
    }

    #[test]
    fn rejects_duplicate_exponents() {
        let text = r#"{"p": 3, "a": 1, "n": 1, "d": 2,
            "terms": [{"exponents": [1,1], "coeff": "1"},
                      {"exponents": [1,1], "coeff": "2"}]}"#;
        assert!(HypersurfaceSpec::parse(text).is_err());
    }

    #[test]
    fn rejects_low_degree_and_unknown_keys() {
        let text = r#"{"p": 3, "a": 1, "n": 1, "d": 1,
            "terms": [{"exponents": [1,0], "coeff": "1"}]}"#;
        assert!(HypersurfaceSpec::parse(text).is_err());
        let text = r#"{"p": 3, "a": 1, "n": 1, "d": 2, "bogus": 1,
            "terms": [{"exponents": [2,0], "coeff": "1"}]}"#;
        assert!(HypersurfaceSpec::parse(text).is_err());
    }

    #[test]
    fn two_lines_example() {
        // x_1 x_2 = 0 in P^2
        let text = r#"{"p": 3, "a": 1, "n": 2, "d": 2,
            "terms": [{"exponents": [0,1,1], "coeff": "1"}]}"#;
        let spec = HypersurfaceSpec::parse(text).unwrap();
        assert_eq!(spec.num_terms(), 1);
        assert_eq!(spec.mu(), 1);
        assert_eq!(spec.support_plus(), vec![vec![0, 1, 1, 1]]);
    }

    #[test]
    fn augment_examples() {
        assert_eq!(augment(&[3, 0, 0]), vec![3, 0, 0, 1]);
        assert_eq!(augment(&[0, 1, 1]), vec![0, 1, 1, 1]);
        assert_eq!(augment(&[1, 1, 1, 2]), vec![1, 1, 1, 2, 1]);
    }

    #[test]
    fn augmented_support_on_hyperplane() {
        let spec = HypersurfaceSpec::parse(&fermat_cubic_text(5)).unwrap();
        for v in spec.support_plus() {
            let head: u64 = v[..spec.n + 1].iter().sum();
            assert_eq!(head, spec.d * v[spec.n + 1]);
        }
    }

    #[test]
    fn coeff_expressions_over_f4() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let g = f4.gen();
        assert_eq!(parse_coeff("g", &f4).unwrap(), g);
        assert_eq!(parse_coeff("g^2+1", &f4).unwrap(), g); // g^2 = g+1
        assert_eq!(parse_coeff("0", &f4).unwrap(), f4.zero());
        assert!(parse_coeff("h", &f4).is_err());
        assert!(parse_coeff("1+", &f4).is_err());
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert!(parse_coeff("g", &f3).is_err());
        assert_eq!(parse_coeff("-1", &f3).unwrap(), f3.from_prime(2));
    }

    #[test]
    fn roundtrip_idempotent() {
        let text = r#"{"p": 2, "a": 2, "n": 2, "d": 2,
            "terms": [{"exponents": [2,0,0], "coeff": "g"},
                      {"exponents": [0,1,1], "coeff": "g+1"},
                      {"exponents": [1,1,0], "coeff": "0"}]}"#;
        let spec = HypersurfaceSpec::parse(text).unwrap();
        assert_eq!(spec.warnings().len(), 1);
        let spec2 = HypersurfaceSpec::parse(&spec.to_text()).unwrap();
        assert_eq!(spec, spec2);
        assert_eq!(spec.to_text(), spec2.to_text());
    }
}
