// SPDX-License-Identifier: Apache-2.0

//! Shannon-level identity and inequality checking over the joint-entropy
//! basis, with exact rational arithmetic and a numeric cross-check.

mod bundle;
mod certificate;
pub mod expr;
mod numeric;

use thiserror::Error;

pub use bundle::{
    bundle_items, bundled_checks, run_bundle, BundleItem, BundleReport, CheckKind, ItemReport, ItemStatus,
    NumericSettings,
};
pub use certificate::{check_certificate, check_identity, Certificate, CertificateTerm};
pub use expr::{Atom, EntropyExpression, Rational, VarSet, MAX_VARIABLES};
pub use numeric::{
    atom_value, evaluate, numeric_check, numeric_terms_check, random_distribution, JointDistribution, NumericSummary,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("negative coefficient {coefficient} on {term}")]
    NegativeCoefficient { term: String, coefficient: String },
    #[error("{0} is not an elementary Shannon term")]
    NotElementary(String),
    #[error("{0} variables exceeds the limit of {MAX_VARIABLES}")]
    TooManyVariables(usize),
}
