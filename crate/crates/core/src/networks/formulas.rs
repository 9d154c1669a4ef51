// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Instance, Network, NetworkError, Objective, Topology};
use crate::oracle::ComplexityOracle;

/// Named profile-level values such as `C(y|x)` or `I(x:z|y)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileValues(pub BTreeMap<String, i64>);

impl ProfileValues {
    pub const KEYS: [&'static str; 8] = [
        "C(y|x)", "C(x|y)", "C(z|x)", "C(z|y)", "C(z|w)", "C(y,z|x)", "I(x:z|y)", "I(y:z|x)",
    ];

    pub fn from_pairs<'a, I: IntoIterator<Item = (&'a str, i64)>>(pairs: I) -> Self {
        Self(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn get(&self, key: &str) -> Result<i64, NetworkError> {
        self.0
            .get(key)
            .copied()
            .ok_or_else(|| NetworkError::MissingValue(key.to_string()))
    }

    /// Every key in [`Self::KEYS`] the oracle can evaluate within budget.
    pub fn from_oracle(inst: &Instance, oracle: &ComplexityOracle) -> Self {
        let (w, x, y, z) = (&inst.w, &inst.x, &inst.y, &inst.z);
        let entries = [
            ("C(y|x)", oracle.complexity(y, x).value()),
            ("C(x|y)", oracle.complexity(x, y).value()),
            ("C(z|x)", oracle.complexity(z, x).value()),
            ("C(z|y)", oracle.complexity(z, y).value()),
            ("C(z|w)", oracle.complexity(z, w).value()),
            ("C(y,z|x)", oracle.cond(&[y, z], &[x]).value()),
            ("I(x:z|y)", oracle.cond_info(x, z, y)),
            ("I(y:z|x)", oracle.cond_info(y, z, x)),
        ];
        Self(
            entries
                .into_iter()
                .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaValue {
    Value(i64),
    /// The minimum depends on more than the complexity profile.
    NotAProfileFunction,
    /// The topology has no such quantity.
    NotApplicable,
    /// No closed form is asserted.
    Unspecified,
}

impl FormulaValue {
    pub fn value(self) -> Option<i64> {
        match self {
            FormulaValue::Value(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaEntry {
    pub formula: String,
    pub value: FormulaValue,
}

impl FormulaEntry {
    fn value(formula: &str, v: i64) -> Self {
        Self {
            formula: formula.to_string(),
            value: FormulaValue::Value(v),
        }
    }

    fn marker(formula: &str, value: FormulaValue) -> Self {
        Self {
            formula: formula.to_string(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalValues {
    pub topology: Topology,
    pub min_cp: FormulaEntry,
    pub min_cq: FormulaEntry,
    pub min_cpq: FormulaEntry,
    pub min_private: FormulaEntry,
}

impl MinimalValues {
    pub fn entry(&self, o: Objective) -> Option<&FormulaEntry> {
        match o {
            Objective::Cp => Some(&self.min_cp),
            Objective::Cq => Some(&self.min_cq),
            Objective::Cpq => Some(&self.min_cpq),
            Objective::PrivateDisclosure => Some(&self.min_private),
            Objective::TotalDisclosure => None,
        }
    }
}

pub fn minimal_value_formulas(net: Network, v: &ProfileValues) -> Result<MinimalValues, NetworkError> {
    use FormulaValue::*;
    let not_profile = |f: &str| FormulaEntry::marker(f, NotAProfileFunction);
    let out = match net {
        Topology::A => MinimalValues {
            topology: net,
            min_cp: FormulaEntry::value("C(y|x)", v.get("C(y|x)")?),
            min_cq: FormulaEntry::value("C(z|w)", v.get("C(z|w)")?),
            min_cpq: not_profile("min C(p,q)"),
            min_private: not_profile("min I(p,q:x,w)"),
        },
        Topology::B => MinimalValues {
            topology: net,
            min_cp: FormulaEntry::value("C(y|x)", v.get("C(y|x)")?),
            min_cq: FormulaEntry::marker("-", NotApplicable),
            min_cpq: FormulaEntry::marker("-", Unspecified),
            min_private: FormulaEntry::marker("-", Unspecified),
        },
        Topology::C => {
            let (a, b) = (v.get("C(y|x)")?, v.get("C(x|y)")?);
            MinimalValues {
                topology: net,
                min_cp: FormulaEntry::value("C(y|x)", a),
                min_cq: FormulaEntry::value("C(x|y)", b),
                min_cpq: FormulaEntry::value("max{C(y|x),C(x|y)}", a.max(b)),
                min_private: FormulaEntry::value("0", 0),
            }
        }
        Topology::D => {
            let (a, b) = (v.get("C(z|x)")?, v.get("C(z|y)")?);
            let (ixz, iyz) = (v.get("I(x:z|y)")?, v.get("I(y:z|x)")?);
            MinimalValues {
                topology: net,
                min_cp: FormulaEntry::value("C(z|x)", a),
                min_cq: FormulaEntry::value("C(z|y)", b),
                min_cpq: FormulaEntry::value("max{C(z|x),C(z|y)}", a.max(b)),
                min_private: FormulaEntry::value("max{I(x:z|y),I(y:z|x)}", ixz.max(iyz)),
            }
        }
        Topology::E => MinimalValues {
            topology: net,
            min_cp: FormulaEntry::value("C(y|x)", v.get("C(y|x)")?),
            min_cq: FormulaEntry::value("C(z|x)", v.get("C(z|x)")?),
            min_cpq: FormulaEntry::value("C(y,z|x)", v.get("C(y,z|x)")?),
            min_private: FormulaEntry::value("0", 0),
        },
        Topology::F => {
            let (cyz_x, cz_y) = (v.get("C(y,z|x)")?, v.get("C(z|y)")?);
            MinimalValues {
                topology: net,
                min_cp: FormulaEntry::value("C(y|x)", v.get("C(y|x)")?),
                min_cq: FormulaEntry::value("C(z|y)", cz_y),
                min_cpq: FormulaEntry::value("max{C(y,z|x),C(z|y)}", cyz_x.max(cz_y)),
                min_private: FormulaEntry::value("max{0,C(z|y)-C(y,z|x)}", (cz_y - cyz_x).max(0)),
            }
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values() -> ProfileValues {
        ProfileValues::from_pairs([
            ("C(y|x)", 7),
            ("C(x|y)", 5),
            ("C(z|x)", 4),
            ("C(z|y)", 9),
            ("C(z|w)", 3),
            ("C(y,z|x)", 11),
            ("I(x:z|y)", 2),
            ("I(y:z|x)", 6),
        ])
    }

    #[test]
    fn c_takes_the_max() {
        let m = minimal_value_formulas(Topology::C, &values()).unwrap();
        assert_eq!(m.min_cpq.value, FormulaValue::Value(7));
        assert_eq!(m.min_private.value, FormulaValue::Value(0));
    }

    #[test]
    fn f_case_split() {
        let m = minimal_value_formulas(Topology::F, &values()).unwrap();
        assert_eq!(m.min_cpq.value, FormulaValue::Value(11));
        assert_eq!(m.min_private.value, FormulaValue::Value(0));
        let mut v = values();
        v.0.insert("C(z|y)".into(), 14);
        let m = minimal_value_formulas(Topology::F, &v).unwrap();
        assert_eq!(m.min_cpq.value, FormulaValue::Value(14));
        assert_eq!(m.min_private.value, FormulaValue::Value(3));
    }

    #[test]
    fn a_is_not_a_profile_function() {
        let m = minimal_value_formulas(Topology::A, &values()).unwrap();
        assert_eq!(m.min_cp.value, FormulaValue::Value(7));
        assert_eq!(m.min_cq.value, FormulaValue::Value(3));
        assert_eq!(m.min_cpq.value, FormulaValue::NotAProfileFunction);
        assert_eq!(m.min_private.value, FormulaValue::NotAProfileFunction);
    }

    #[test]
    fn missing_value_is_named() {
        let v = ProfileValues::from_pairs([("C(y|x)", 1)]);
        assert_eq!(
            minimal_value_formulas(Topology::C, &v),
            Err(NetworkError::MissingValue("C(x|y)".into()))
        );
    }

    #[test]
    fn oracle_values_cover_all_keys() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("1", "01", "10", "0");
        let v = ProfileValues::from_oracle(&inst, &o);
        for k in ProfileValues::KEYS {
            assert!(v.0.contains_key(k), "{k}");
        }
        for t in Topology::ALL {
            minimal_value_formulas(t, &v).unwrap();
        }
    }
}
