// SPDX-License-Identifier: Apache-2.0

//! Nonnegativity certificates: a target is certified when it equals a
//! nonnegative combination of Shannon-nonnegative terms `H(S|T)` and
//! `I(S;S'|T)`.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use super::expr::{parse_atom, parse_rational, Atom, EntropyExpression, Rational};
use super::IdentityError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateTerm {
    pub coefficient: Rational,
    pub term: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub terms: Vec<CertificateTerm>,
}

impl Certificate {
    pub fn new(terms: Vec<(Rational, Atom)>) -> Result<Self, IdentityError> {
        let terms = terms
            .into_iter()
            .map(|(coefficient, term)| {
                if coefficient.is_negative() {
                    return Err(IdentityError::NegativeCoefficient {
                        term: term.to_string(),
                        coefficient: coefficient.to_string(),
                    });
                }
                if matches!(term, Atom::J { .. }) {
                    return Err(IdentityError::NotElementary(term.to_string()));
                }
                Ok(CertificateTerm { coefficient, term })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { terms })
    }

    /// One term per line: `coeff<TAB>kind(S;S'|T)`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (coeff, term) = line.split_once('\t').ok_or_else(|| {
                IdentityError::Parse(format!("certificate line {}: expected coeff<TAB>term", idx + 1))
            })?;
            terms.push((parse_rational(coeff)?, parse_atom(term)?));
        }
        Self::new(terms)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            let _ = writeln!(out, "{}\t{}", t.coefficient, t.term);
        }
        out
    }

    pub fn expression(&self) -> EntropyExpression {
        self.terms
            .iter()
            .filter(|t| !t.coefficient.is_zero())
            .fold(EntropyExpression::zero(), |acc, t| {
                acc + t.term.canonical() * t.coefficient
            })
    }
}

/// True iff `target - sum(cert)` canonicalizes to zero.
pub fn check_certificate(target: &EntropyExpression, cert: &Certificate) -> Result<bool, IdentityError> {
    if let Some(bad) = cert.terms.iter().find(|t| t.coefficient.is_negative()) {
        return Err(IdentityError::NegativeCoefficient {
            term: bad.term.to_string(),
            coefficient: bad.coefficient.to_string(),
        });
    }
    Ok((target.clone() - cert.expression()).is_zero())
}

/// True iff both sides have identical canonical vectors.
pub fn check_identity(lhs: &EntropyExpression, rhs: &EntropyExpression) -> bool {
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target(s: &str) -> EntropyExpression {
        EntropyExpression::parse(s).unwrap()
    }

    #[test]
    fn cut_lemma_certificate() {
        let t = target("I(P;A,B) + C(B|P,A) - C(B|A)");
        let cert = Certificate::parse("1\tI(P;A)\n").unwrap();
        assert!(check_certificate(&t, &cert).unwrap());
    }

    #[test]
    fn key_lemma_certificate() {
        let t = target("I(q;x,y) + C(z|q,y) - I(z;x|y)");
        let cert = Certificate::parse("1\tI(q;y)\n1\tC(z|q,y,x)\n1\tI(q;x|y,z)\n").unwrap();
        assert!(check_certificate(&t, &cert).unwrap());
    }

    #[test]
    fn footnote_certificate() {
        let t = target("C(q) - I(y;q) + C(z|q,y) - C(z|y)");
        let cert = Certificate::parse("1\tC(q|z,y)\n").unwrap();
        assert!(check_certificate(&t, &cert).unwrap());
    }

    #[test]
    fn wrong_certificate_rejected() {
        let t = target("I(P;A,B) + C(B|P,A) - C(B|A)");
        let cert = Certificate::parse("1\tI(P;B)\n").unwrap();
        assert!(!check_certificate(&t, &cert).unwrap());
    }

    #[test]
    fn negative_coefficient_rejected() {
        assert!(matches!(
            Certificate::parse("-1\tI(P;A)\n"),
            Err(IdentityError::NegativeCoefficient { .. })
        ));
        let cert = Certificate {
            terms: vec![CertificateTerm {
                coefficient: Rational::from_integer(-2),
                term: Atom::c(&["x"], &[]),
            }],
        };
        assert!(check_certificate(&target("C(x)"), &cert).is_err());
    }

    #[test]
    fn render_round_trip() {
        let cert = Certificate::parse("# header\n1/2\tC(z|q,y,x)\n3\tI(q;x|y,z)\n").unwrap();
        assert_eq!(Certificate::parse(&cert.render()).unwrap(), cert);
    }
}
