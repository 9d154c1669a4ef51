// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{minimal_value_formulas, Instance, Network, NetworkError, Objective, ProfileValues};
use crate::oracle::ComplexityOracle;
use crate::search::{enumerate_feasible, SearchBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Every feasible pair has `quantity >= formula - slack`.
    Lower,
    /// Some feasible pair has `quantity <= formula + slack`.
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimFormula {
    /// The topology's closed-form minimum for the claimed quantity.
    MinimalValue,
    Zero,
}

/// Allowed deviation `c ε + d log2(n) + e`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slack {
    pub c: i64,
    pub d: i64,
    pub e: i64,
}

impl Slack {
    pub fn allowed(&self, epsilon: i64, n_max: usize) -> i64 {
        let log = if n_max < 2 { 0 } else { ((n_max - 1).ilog2() + 1) as i64 };
        self.c * epsilon + self.d * log + self.e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub quantity: Objective,
    pub formula: ClaimFormula,
    pub direction: Direction,
    pub slack: Slack,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum InstanceOutcome {
    Checked {
        instance: Instance,
        formula: i64,
        observed: i64,
        /// Positive means the claim holds with room to spare.
        margin: i64,
        violation: bool,
    },
    NoFeasiblePair {
        instance: Instance,
        violation: bool,
    },
    Skipped {
        instance: Instance,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub claim: Claim,
    pub topology: Network,
    pub epsilon: i64,
    pub instances: usize,
    pub checked: usize,
    pub skipped: usize,
    pub no_feasible: usize,
    pub violations: usize,
    pub worst_margin: Option<i64>,
    /// Smallest `e` (with the configured `c`, `d`) that would clear every
    /// checked instance.
    pub required_constant: Option<i64>,
    pub outcomes: Vec<InstanceOutcome>,
}

fn evaluate(
    claim: &Claim,
    net: Network,
    inst: &Instance,
    epsilon: i64,
    oracle: &ComplexityOracle,
    budget: &SearchBudget,
) -> Result<InstanceOutcome, NetworkError> {
    let formula = match claim.formula {
        ClaimFormula::Zero => 0,
        ClaimFormula::MinimalValue => {
            let values = ProfileValues::from_oracle(inst, oracle);
            let mins = match minimal_value_formulas(net, &values) {
                Ok(m) => m,
                Err(e) => {
                    return Ok(InstanceOutcome::Skipped {
                        instance: inst.clone(),
                        reason: e.to_string(),
                    })
                }
            };
            match mins.entry(claim.quantity).and_then(|e| e.value.value()) {
                Some(v) => v,
                None => {
                    return Ok(InstanceOutcome::Skipped {
                        instance: inst.clone(),
                        reason: format!("no closed form for {}", claim.quantity.name()),
                    })
                }
            }
        }
    };
    let set = enumerate_feasible(net, inst, epsilon, oracle, budget)?;
    let observed = set
        .points
        .iter()
        .filter_map(|pt| pt.metrics.objective(claim.quantity))
        .min();
    let allowed = claim.slack.allowed(epsilon, inst.max_len());
    Ok(match observed {
        None => InstanceOutcome::NoFeasiblePair {
            instance: inst.clone(),
            violation: claim.direction == Direction::Upper,
        },
        Some(observed) => {
            let margin = match claim.direction {
                Direction::Lower => observed - formula,
                Direction::Upper => formula - observed,
            };
            InstanceOutcome::Checked {
                instance: inst.clone(),
                formula,
                observed,
                margin,
                violation: margin < -allowed,
            }
        }
    })
}

pub fn bound_harness(
    claim: &Claim,
    net: Network,
    instances: &[Instance],
    epsilon: i64,
    oracle: &ComplexityOracle,
    budget: &SearchBudget,
) -> Result<HarnessReport, NetworkError> {
    let outcomes = instances
        .par_iter()
        .map(|inst| evaluate(claim, net, inst, epsilon, oracle, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = HarnessReport {
        claim: *claim,
        topology: net,
        epsilon,
        instances: instances.len(),
        checked: 0,
        skipped: 0,
        no_feasible: 0,
        violations: 0,
        worst_margin: None,
        required_constant: None,
        outcomes: Vec::new(),
    };
    for o in &outcomes {
        match o {
            InstanceOutcome::Checked {
                margin,
                violation,
                instance,
                ..
            } => {
                report.checked += 1;
                report.violations += usize::from(*violation);
                report.worst_margin = Some(report.worst_margin.map_or(*margin, |w| w.min(*margin)));
                let fixed = claim.slack.allowed(epsilon, instance.max_len()) - claim.slack.e;
                let need = -margin - fixed;
                report.required_constant = Some(report.required_constant.map_or(need, |r| r.max(need)));
            }
            InstanceOutcome::NoFeasiblePair { violation, .. } => {
                report.no_feasible += 1;
                report.violations += usize::from(*violation);
            }
            InstanceOutcome::Skipped { .. } => report.skipped += 1,
        }
    }
    report.outcomes = outcomes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::{all_instances, Role, Topology};

    fn small() -> Vec<Instance> {
        all_instances(&[Role::X, Role::Y], 2)
    }

    #[test]
    fn vacuous_claim_has_no_violations() {
        let o = ComplexityOracle::table_free();
        let claim = Claim {
            quantity: Objective::Cp,
            formula: ClaimFormula::Zero,
            direction: Direction::Lower,
            slack: Slack::default(),
        };
        let r = bound_harness(&claim, Topology::B, &small(), 6, &o, &SearchBudget::programs(5)).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.checked, r.instances);
    }

    #[test]
    fn minimal_cp_lower_bound_on_b() {
        let o = ComplexityOracle::table_free();
        let claim = Claim {
            quantity: Objective::Cp,
            formula: ClaimFormula::MinimalValue,
            direction: Direction::Lower,
            slack: Slack { c: 1, d: 2, e: 8 },
        };
        let r = bound_harness(&claim, Topology::B, &small(), 6, &o, &SearchBudget::programs(5)).unwrap();
        assert_eq!(r.violations, 0, "{r:?}");
    }

    #[test]
    fn a_pair_claims_are_skipped() {
        let o = ComplexityOracle::table_free();
        let claim = Claim {
            quantity: Objective::Cpq,
            formula: ClaimFormula::MinimalValue,
            direction: Direction::Upper,
            slack: Slack::default(),
        };
        let inst = vec![Instance::new("0", "1", "0", "1")];
        let r = bound_harness(&claim, Topology::A, &inst, 6, &o, &SearchBudget::programs(3)).unwrap();
        assert_eq!(r.skipped, 1);
    }
}
