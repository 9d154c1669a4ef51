// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SearchBudget, SearchError};
use crate::bits::{encode_pair, BitString};
use crate::networks::TransmissionPair;
use crate::oracle::{Complexity, ComplexityOracle};
use crate::system::RunOutcome;

/// Slack on the decoding conditions of [`consistent_pair_witness`].
pub const DEFAULT_WITNESS_SLACK: i64 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum WitnessOutcome<R> {
    Found(R),
    /// Exhaustive within the budget: no program pair qualifies.
    Absent {
        max_program_length: usize,
    },
}

impl<R> WitnessOutcome<R> {
    pub fn found(&self) -> Option<&R> {
        match self {
            WitnessOutcome::Found(r) => Some(r),
            WitnessOutcome::Absent { .. } => None,
        }
    }
}

fn programs_printing(
    oracle: &ComplexityOracle,
    programs: &[BitString],
    input: &BitString,
    output: &BitString,
) -> Vec<BitString> {
    let want = RunOutcome::Output(output.clone());
    programs
        .par_iter()
        .filter(|p| oracle.run(p, input) == want)
        .cloned()
        .collect()
}

/// The pair in `ps x qs` with the least `C([p,q])`, ties broken length-lex on
/// `(p, q)`.
fn least_pair(oracle: &ComplexityOracle, ps: &[BitString], qs: &[BitString]) -> Option<(TransmissionPair, Complexity)> {
    ps.par_iter()
        .filter_map(|p| {
            qs.iter()
                .map(|q| {
                    let c = oracle.unconditional(&encode_pair(p, q));
                    (c, p, q)
                })
                .min()
        })
        .min()
        .map(|(c, p, q)| (TransmissionPair::new(p.clone(), q.clone()), c))
}

fn sub(a: Complexity, b: Complexity) -> Option<i64> {
    Some(a.value()? - b.value()?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoDistanceReport {
    pub pair: TransmissionPair,
    pub cpq: Complexity,
    /// `max{C(y|x), C(x|y)}`.
    pub reference: Complexity,
    /// `cpq - reference`; either sign is possible at finite scale.
    pub slack: Option<i64>,
}

pub fn info_distance_witness(
    oracle: &ComplexityOracle,
    x: &BitString,
    y: &BitString,
    budget: &SearchBudget,
) -> Result<WitnessOutcome<InfoDistanceReport>, SearchError> {
    budget.check()?;
    let programs = budget.candidates();
    let ps = programs_printing(oracle, &programs, x, y);
    let qs = programs_printing(oracle, &programs, y, x);
    Ok(match least_pair(oracle, &ps, &qs) {
        Some((pair, cpq)) => {
            let reference = oracle.complexity(y, x).max(oracle.complexity(x, y));
            WitnessOutcome::Found(InfoDistanceReport {
                slack: sub(cpq, reference),
                pair,
                cpq,
                reference,
            })
        }
        None => WitnessOutcome::Absent {
            max_program_length: budget.max_program_length,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistentPairReport {
    pub pair: TransmissionPair,
    pub slack_bound: i64,
    /// `C(z|[p,x])` and `C(z|[q,y])`, both at most `slack_bound`.
    pub decode_p: Complexity,
    pub decode_q: Complexity,
    /// `|p| - C(z|x)` and `|q| - C(z|y)`.
    pub p_excess: Option<i64>,
    pub q_excess: Option<i64>,
    /// `C([p,q]|z)`.
    pub cpq_given_z: Complexity,
    /// `I(q:y)`, reported, not bounded.
    pub info_q_y: Option<i64>,
}

/// Prefix-consistent `(p, q)` minimizing `max(|p|, |q|)` subject to
/// `C(z|[p,x]) <= s` and `C(z|[q,y]) <= s`; ties length-lex on `(p, q)`.
pub fn consistent_pair_witness(
    oracle: &ComplexityOracle,
    x: &BitString,
    y: &BitString,
    z: &BitString,
    slack: i64,
    budget: &SearchBudget,
) -> Result<WitnessOutcome<ConsistentPairReport>, SearchError> {
    budget.check()?;
    let programs = budget.candidates();
    let decodes = |input: &BitString| -> Vec<BitString> {
        programs
            .par_iter()
            .filter(|p| {
                oracle
                    .complexity(z, &encode_pair(p, input))
                    .value()
                    .is_some_and(|v| v <= slack)
            })
            .cloned()
            .collect()
    };
    let ps = decodes(x);
    let qs = decodes(y);
    let best = ps
        .par_iter()
        .filter_map(|p| {
            qs.iter()
                .filter(|q| p.is_consistent_with(q))
                .map(|q| (p.len().max(q.len()), p, q))
                .min()
        })
        .min();
    Ok(match best {
        Some((_, p, q)) => {
            let pair = TransmissionPair::new(p.clone(), q.clone());
            let decode_p = oracle.complexity(z, &encode_pair(p, x));
            let decode_q = oracle.complexity(z, &encode_pair(q, y));
            let len = |s: &BitString| Complexity::Bits(s.len() as u32);
            WitnessOutcome::Found(ConsistentPairReport {
                slack_bound: slack,
                decode_p,
                decode_q,
                p_excess: sub(len(p), oracle.complexity(z, x)),
                q_excess: sub(len(q), oracle.complexity(z, y)),
                cpq_given_z: oracle.complexity(&pair.observed(), z),
                info_q_y: oracle.info(q, y),
                pair,
            })
        }
        None => WitnessOutcome::Absent {
            max_program_length: budget.max_program_length,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FMinReport {
    pub pair: TransmissionPair,
    /// `min C([p,q])` over `run(p,x) = y`, `run(q,w) = z`.
    pub value: Complexity,
}

pub fn exact_f_min(
    oracle: &ComplexityOracle,
    x: &BitString,
    y: &BitString,
    z: &BitString,
    w: &BitString,
    budget: &SearchBudget,
) -> Result<WitnessOutcome<FMinReport>, SearchError> {
    budget.check()?;
    let programs = budget.candidates();
    let ps = programs_printing(oracle, &programs, x, y);
    let qs = programs_printing(oracle, &programs, w, z);
    Ok(match least_pair(oracle, &ps, &qs) {
        Some((pair, value)) => WitnessOutcome::Found(FMinReport { pair, value }),
        None => WitnessOutcome::Absent {
            max_program_length: budget.max_program_length,
        },
    })
}
