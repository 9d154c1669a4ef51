// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::GameError;

/// Hard cap on the default horizon.
pub const MAX_DEFAULT_HORIZON: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `C(p,q)` gap on network (e).
    #[serde(rename = "GAP_CPQ_E")]
    GapCpqE,
    /// Private-disclosure gap on network (e).
    #[serde(rename = "GAP_PRIV_E")]
    GapPrivE,
    /// `C(p,q)` gap on network (f).
    #[serde(rename = "GAP_CPQ_F")]
    GapCpqF,
    /// Private-disclosure gap on network (f).
    #[serde(rename = "GAP_PRIV_F")]
    GapPrivF,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::GapCpqE, Theorem::GapPrivE, Theorem::GapCpqF, Theorem::GapPrivF];

    pub fn tag(self) -> &'static str {
        match self {
            Theorem::GapCpqE => "GAP_CPQ_E",
            Theorem::GapPrivE => "GAP_PRIV_E",
            Theorem::GapCpqF => "GAP_CPQ_F",
            Theorem::GapPrivF => "GAP_PRIV_F",
        }
    }

    /// Programs for `z` are conditioned on `y` rather than `x`.
    pub fn chained(self) -> bool {
        matches!(self, Theorem::GapCpqF | Theorem::GapPrivF)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Theorem {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Theorem::ALL
            .into_iter()
            .find(|t| t.tag() == norm)
            .ok_or_else(|| GameError::UnknownTheorem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub theorem: Theorem,
    pub epsilon: u32,
    /// Only meaningful for GAP_PRIV_F.
    pub l: u32,
    /// Lengths of `x`, `y`, `z`.
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub j: u32,
    /// Maximum number of adversary events.
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamViolation {
    pub inequality: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamCheck {
    pub inequality: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// `2^e` for exact powers of two, `2^e` rounded to two places otherwise.
fn log2_label(v: &BigUint) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let e = v.bits() - 1;
    if *v == BigUint::one() << e {
        return format!("2^{e}");
    }
    // Top 53 bits carry all the precision an f64 can hold.
    let shift = e.saturating_sub(52);
    let top = (v >> shift).to_f64().unwrap_or(f64::MAX);
    format!("2^{:.2}", top.log2() + shift as f64)
}

fn pow2(e: i64) -> BigUint {
    if e < 0 {
        BigUint::default()
    } else {
        BigUint::one() << (e as usize)
    }
}

impl GameSpec {
    /// The parameter choice from each construction, with the default horizon.
    pub fn standard(theorem: Theorem, epsilon: u32, l: u32) -> Self {
        let e = epsilon;
        let (n, m, k, j, l) = match theorem {
            Theorem::GapCpqE => (8 * e + 2, 5 * e + 1, 5 * e + 1, 7 * e + 2, 0),
            Theorem::GapPrivE => (5 * e + 8, 9 * e + 10, 9 * e + 10, 15 * e + 18, 0),
            Theorem::GapCpqF => (5 * e + 6, 5 * e + 6, 5 * e + 6, 7 * e + 10, 0),
            Theorem::GapPrivF => (9 * e + l + 16, 7 * e + 15, 9 * e + l + 16, 13 * e + l + 28, l),
        };
        let mut spec = Self {
            theorem,
            epsilon,
            l,
            n,
            m,
            k,
            j,
            horizon: 0,
        };
        spec.horizon = spec.default_horizon();
        spec
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    /// Upper bound on candidate changes from the construction's counting.
    pub fn break_bound(&self) -> BigUint {
        let (e, n, m, k, j, l) = self.signed();
        match self.theorem {
            Theorem::GapCpqE => {
                let advances = pow2(j.max(m) + e);
                &advances + &advances * pow2(m + 2 * e + 1)
            }
            Theorem::GapPrivE => pow2(j + e) + pow2(n + m + 2 * e),
            Theorem::GapCpqF => pow2(j + e) + pow2(n + m + 2 * e) + pow2(m + k + 2 * e),
            Theorem::GapPrivF => pow2(n + k - l) + pow2(j + e) + pow2(n + m + 2 * e) + pow2(m + k + 2 * e + 1),
        }
    }

    pub fn default_horizon(&self) -> u64 {
        let four = self.break_bound() * 4u32;
        four.to_u64().unwrap_or(u64::MAX).min(MAX_DEFAULT_HORIZON)
    }

    fn signed(&self) -> (i64, i64, i64, i64, i64, i64) {
        (
            self.epsilon as i64,
            self.n as i64,
            self.m as i64,
            self.k as i64,
            self.j as i64,
            self.l as i64,
        )
    }

    /// The construction's displayed inequalities that fail for this spec.
    pub fn validate(&self) -> Vec<ParamViolation> {
        self.inequalities()
            .into_iter()
            .filter(|c| !c.holds)
            .map(|c| ParamViolation {
                inequality: c.inequality,
                lhs: c.lhs,
                rhs: c.rhs,
            })
            .collect()
    }

    /// Every inequality the construction needs, evaluated.
    pub fn inequalities(&self) -> Vec<ParamCheck> {
        let (e, n, m, k, j, l) = self.signed();
        let mut out = Vec::new();
        let le = |out: &mut Vec<ParamCheck>, name: &str, lhs: i64, rhs: i64| {
            out.push(ParamCheck {
                inequality: name.to_string(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
                holds: lhs <= rhs,
            });
        };
        le(&mut out, "ε ≥ 1", 1, e);
        if self.theorem != Theorem::GapPrivF {
            le(&mut out, "l = 0", l, 0);
        }
        if !self.theorem.chained() {
            le(&mut out, "k = m", k, m);
            le(&mut out, "m = k", m, k);
        }
        let le_big = |out: &mut Vec<ParamCheck>, name: &str, lhs: BigUint, rhs: BigUint| {
            out.push(ParamCheck {
                inequality: name.to_string(),
                lhs: log2_label(&lhs),
                rhs: log2_label(&rhs),
                holds: lhs <= rhs,
            });
        };
        match self.theorem {
            Theorem::GapCpqE => {
                le(&mut out, "j+3ε ≤ 2m", j + 3 * e, 2 * m);
                le(&mut out, "max{j,m}+ε ≤ n", j.max(m) + e, n);
                le(&mut out, "m+2ε+1 ≤ j", m + 2 * e + 1, j);
            }
            Theorem::GapPrivE => {
                le_big(
                    &mut out,
                    "(2^{j+ε}+2^{n+m+2ε})·2^{4ε+4} ≤ 2^{n+j-3}",
                    (pow2(j + e) + pow2(n + m + 2 * e)) * pow2(4 * e + 4),
                    pow2(n + j - 3),
                );
                le(&mut out, "j+3ε ≤ 2m-2", j + 3 * e, 2 * m - 2);
                le(&mut out, "4ε+4 ≤ j-1", 4 * e + 4, j - 1);
            }
            Theorem::GapCpqF => {
                le_big(
                    &mut out,
                    "2^{j+ε}+2^{n+m+2ε}+2^{m+k+2ε} ≤ 2^{min{n,m}+j-2}",
                    pow2(j + e) + pow2(n + m + 2 * e) + pow2(m + k + 2 * e),
                    pow2(n.min(m) + j - 2),
                );
                le(&mut out, "j+3ε ≤ m+k-2", j + 3 * e, m + k - 2);
            }
            Theorem::GapPrivF => {
                le(
                    &mut out,
                    "max{n+k-l, j+ε, n+m+2ε, m+k+2ε+1} ≤ n+j-l-4ε-12",
                    (n + k - l).max(j + e).max(n + m + 2 * e).max(m + k + 2 * e + 1),
                    n + j - l - 4 * e - 12,
                );
                le(&mut out, "max{k-l, j+3ε} ≤ m+k-3", (k - l).max(j + 3 * e), m + k - 3);
                le(&mut out, "4ε+6 ≤ j-l-1", 4 * e + 6, j - l - 1);
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), GameError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GameError::InvalidParams(v))
        }
    }

    /// Lengths of `x`, `y`, `z`.
    pub fn lengths(&self) -> (usize, usize, usize) {
        (self.n as usize, self.m as usize, self.k as usize)
    }

    /// Strict upper limits: `C(p) < m+ε` for `y`'s programs and the matching
    /// one for `z`'s.
    pub fn program_limits(&self) -> (u32, u32) {
        (self.m + self.epsilon, self.k + self.epsilon)
    }

    /// Length of the fresh keys used for simplifications.
    pub fn key_length(&self) -> u32 {
        match self.theorem {
            Theorem::GapPrivF => self.j - self.l,
            _ => self.j,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_parameters_validate() {
        for t in Theorem::ALL {
            for e in 1..=4 {
                for l in [0, 2, 5] {
                    let l = if t == Theorem::GapPrivF { l } else { 0 };
                    let spec = GameSpec::standard(t, e, l);
                    assert!(spec.validate().is_empty(), "{t} ε={e} l={l}: {:?}", spec.validate());
                }
            }
        }
    }

    #[test]
    fn worked_examples() {
        let s = GameSpec::standard(Theorem::GapCpqE, 1, 0);
        assert_eq!((s.n, s.m, s.j), (10, 6, 9));
        let f = GameSpec::standard(Theorem::GapCpqF, 1, 0);
        assert_eq!((f.n, f.m, f.k, f.j), (11, 11, 11, 17));
        let bad = GameSpec { j: 12, ..s };
        let v = bad.validate();
        assert_eq!(v[0].inequality, "j+3ε ≤ 2m");
        assert_eq!((v[0].lhs.as_str(), v[0].rhs.as_str()), ("15", "12"));
        assert!(v.iter().any(|x| x.inequality == "max{j,m}+ε ≤ n"));
    }

    #[test]
    fn priv_e_tight_at_one() {
        let s = GameSpec::standard(Theorem::GapPrivE, 1, 0);
        assert!(s.check().is_ok());
        let tighter = GameSpec { n: s.n - 1, ..s };
        assert!(tighter.check().is_err());
    }

    #[test]
    fn theorem_tags_parse() {
        for t in Theorem::ALL {
            assert_eq!(t.tag().parse::<Theorem>().unwrap(), t);
        }
        assert_eq!("gap-priv-f".parse::<Theorem>().unwrap(), Theorem::GapPrivF);
        assert!("GAP_X".parse::<Theorem>().is_err());
    }

    #[test]
    fn default_horizon_is_capped() {
        assert_eq!(GameSpec::standard(Theorem::GapCpqE, 1, 0).horizon, MAX_DEFAULT_HORIZON);
    }
}
