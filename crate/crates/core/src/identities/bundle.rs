// SPDX-License-Identifier: Apache-2.0

//! The fixed list of identities and certified inequalities that the network
//! bounds rely on.

use serde::Serialize;

use super::certificate::{check_certificate, check_identity, Certificate};
use super::expr::{parse_terms, Atom, EntropyExpression, Rational};
use super::numeric::{numeric_terms_check, NumericSummary};
use super::IdentityError;

pub const CUT_LEMMA_CERT: &str = include_str!("../../data/certificates/cut_lemma.cert");
pub const TRANSMISSION_LEMMA_CERT: &str = include_str!("../../data/certificates/transmission_lemma.cert");
pub const FOOTNOTE_CERT: &str = include_str!("../../data/certificates/footnote.cert");
pub const PROGRAM_INFORMATION_CERT: &str = include_str!("../../data/certificates/program_information.cert");

#[derive(Debug, Clone)]
pub enum CheckKind {
    Identity {
        lhs: EntropyExpression,
        rhs: EntropyExpression,
    },
    Inequality {
        target: EntropyExpression,
        certificate: Certificate,
    },
}

#[derive(Debug, Clone)]
pub struct BundleItem {
    pub name: String,
    pub kind: CheckKind,
    /// The item as written, `lhs - rhs` for identities, for the atom-wise
    /// numeric check.
    pub terms: Vec<(Rational, Atom)>,
}

impl BundleItem {
    pub fn identity(name: &str, lhs: &str, rhs: &str) -> Result<Self, IdentityError> {
        let mut terms = parse_terms(lhs)?;
        terms.extend(parse_terms(rhs)?.into_iter().map(|(c, a)| (-c, a)));
        Ok(Self {
            name: name.to_string(),
            terms,
            kind: CheckKind::Identity {
                lhs: EntropyExpression::parse(lhs)?,
                rhs: EntropyExpression::parse(rhs)?,
            },
        })
    }

    pub fn inequality(name: &str, target: &str, cert: &str) -> Result<Self, IdentityError> {
        Ok(Self {
            name: name.to_string(),
            terms: parse_terms(target)?,
            kind: CheckKind::Inequality {
                target: EntropyExpression::parse(target)?,
                certificate: Certificate::parse(cert)?,
            },
        })
    }

    pub fn variable_count(&self) -> usize {
        match &self.kind {
            CheckKind::Identity { lhs, rhs } => {
                let mut v = lhs.variables();
                v.extend(rhs.variables());
                v.len()
            }
            CheckKind::Inequality { target, certificate } => {
                let mut v = target.variables();
                v.extend(certificate.expression().variables());
                v.len()
            }
        }
    }

    /// The expression that must vanish (identities) or be nonnegative
    /// (inequalities) on every distribution.
    pub fn numeric_expression(&self) -> EntropyExpression {
        match &self.kind {
            CheckKind::Identity { lhs, rhs } => lhs.clone() - rhs.clone(),
            CheckKind::Inequality { target, .. } => target.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemReport {
    pub name: String,
    pub kind: &'static str,
    pub variables: usize,
    pub status: ItemStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleReport {
    pub items: Vec<ItemReport>,
    /// Name of the first failing item; later items are not run.
    pub halted_at: Option<String>,
}

impl BundleReport {
    pub fn passed(&self) -> bool {
        self.halted_at.is_none()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NumericSettings {
    pub trials: usize,
    pub alphabet: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self {
            trials: 1000,
            alphabet: 2,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

pub fn bundle_items() -> Vec<BundleItem> {
    let items = [
        BundleItem::identity("chain rule", "C(x,y)", "C(x) + C(y|x)"),
        BundleItem::identity("conditional chain rule", "C(x,y|z)", "C(x|z) + C(y|x,z)"),
        BundleItem::identity("relative chain rule", "I(x,y;u|z)", "I(x;u|z) + I(y;u|x,z)"),
        BundleItem::identity("commutativity", "I(x;y)", "I(y;x)"),
        BundleItem::identity("information symmetry", "I(x;y)", "J(x;y)"),
        BundleItem::identity("conditional information", "I(x;y|z)", "C(y|z) - C(y|x,z)"),
        BundleItem::inequality("cut lemma", "I(P;A,B) + C(B|P,A) - C(B|A)", CUT_LEMMA_CERT),
        BundleItem::inequality(
            "transmission lemma",
            "I(q;x,y) + C(z|q,y) - I(z;x|y)",
            TRANSMISSION_LEMMA_CERT,
        ),
        BundleItem::identity(
            "transmission lemma difference",
            "I(q;x,y) + C(z|q,y) - I(q;y) - C(z|q,y,x) - I(q;x|y,z)",
            "I(q;x|y) + I(x;z|q,y) - I(q;x|y,z)",
        ),
        BundleItem::identity(
            "transmission lemma proof step",
            "I(q;x|y) + I(z;x|q,y)",
            "I(z;x|y) + I(q;x|y,z)",
        ),
        BundleItem::identity("joint information split", "I(q;x|y) + I(z;x|q,y)", "I(q,z;x|y)"),
        BundleItem::inequality(
            "minimal program inequality",
            "C(q) - I(y;q) + C(z|q,y) - C(z|y)",
            FOOTNOTE_CERT,
        ),
        BundleItem::identity("chain disclosure rewrite", "C(z|y) - C(y,z|x)", "I(z;x|y) - C(y|x)"),
        BundleItem::inequality(
            "program information",
            "I(q;x) + C(y|x) - I(q;x,y)",
            PROGRAM_INFORMATION_CERT,
        ),
        BundleItem::identity("conditional mutual information", "I(y;z|x)", "C(z|x) - C(z|x,y)"),
    ];
    items.into_iter().map(|r| r.expect("bundled item parses")).collect()
}

/// Run `items` in order, skipping those with more than `max_vars` variables
/// and halting at the first failure.
pub fn run_bundle(
    items: &[BundleItem],
    max_vars: usize,
    numeric: Option<NumericSettings>,
) -> Result<BundleReport, IdentityError> {
    let mut report = BundleReport {
        items: Vec::new(),
        halted_at: None,
    };
    for item in items {
        let variables = item.variable_count();
        let kind = match item.kind {
            CheckKind::Identity { .. } => "identity",
            CheckKind::Inequality { .. } => "inequality",
        };
        if variables > max_vars {
            report.items.push(ItemReport {
                name: item.name.clone(),
                kind,
                variables,
                status: ItemStatus::Skipped,
                notice: Some(format!("uses {variables} variables, limit is {max_vars}")),
                numeric: None,
            });
            continue;
        }
        let mut ok = match &item.kind {
            CheckKind::Identity { lhs, rhs } => check_identity(lhs, rhs),
            CheckKind::Inequality { target, certificate } => check_certificate(target, certificate)?,
        };
        let mut notice = None;
        let summary = match numeric {
            Some(s) => {
                let summary = numeric_terms_check(&item.terms, s.trials, s.alphabet, s.seed)?;
                let numeric_ok = match item.kind {
                    CheckKind::Identity { .. } => summary.max_abs < s.tolerance,
                    CheckKind::Inequality { .. } => summary.min >= -s.tolerance,
                };
                if ok && !numeric_ok {
                    notice = Some("numeric cross-check disagrees".to_string());
                    ok = false;
                }
                Some(summary)
            }
            None => None,
        };
        if !ok && notice.is_none() {
            notice = Some(match item.kind {
                CheckKind::Identity { .. } => "canonical vectors differ".to_string(),
                CheckKind::Inequality { .. } => "certificate does not match target".to_string(),
            });
        }
        report.items.push(ItemReport {
            name: item.name.clone(),
            kind,
            variables,
            status: if ok { ItemStatus::Pass } else { ItemStatus::Fail },
            notice,
            numeric: summary,
        });
        if !ok {
            report.halted_at = Some(item.name.clone());
            break;
        }
    }
    Ok(report)
}

pub fn bundled_checks(max_vars: usize, numeric: Option<NumericSettings>) -> Result<BundleReport, IdentityError> {
    run_bundle(&bundle_items(), max_vars, numeric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::expr::MAX_VARIABLES;

    #[test]
    fn full_bundle_passes() {
        let report = bundled_checks(MAX_VARIABLES, None).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.items.iter().all(|i| i.status == ItemStatus::Pass));
    }

    #[test]
    fn corrupted_certificate_is_named() {
        let mut items = bundle_items();
        for item in &mut items {
            if item.name == "cut lemma" {
                if let CheckKind::Inequality { certificate, .. } = &mut item.kind {
                    *certificate = Certificate::parse("1\tI(P;B)\n").unwrap();
                }
            }
        }
        let report = run_bundle(&items, MAX_VARIABLES, None).unwrap();
        assert_eq!(report.halted_at.as_deref(), Some("cut lemma"));
        assert_eq!(report.items.last().unwrap().status, ItemStatus::Fail);
    }

    #[test]
    fn small_variable_limit_skips() {
        let report = bundled_checks(2, None).unwrap();
        assert!(report.passed());
        let skipped: Vec<_> = report
            .items
            .iter()
            .filter(|i| i.status == ItemStatus::Skipped)
            .collect();
        assert!(skipped.iter().any(|i| i.variables == 4));
        assert!(skipped.iter().all(|i| i.notice.is_some()));
        assert!(report.items.iter().any(|i| i.status == ItemStatus::Pass));
    }

    #[test]
    fn numeric_cross_check_agrees() {
        let report = bundled_checks(MAX_VARIABLES, Some(NumericSettings::default())).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
