// SPDX-License-Identifier: Apache-2.0

//! Exhaustive search over transmission pairs within a program-length budget.
//!
//! Programs are all strings up to `max_program_length`, in length-lex order.
//! Feasibility splits into one condition set per channel, so the feasible set
//! is the product of the per-channel survivors; only the product positions
//! inside `max_pairs_examined` are visited.

mod frontier;
mod witness;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::networks::{channel_conditions, pair_metrics, Channel, Instance, Metrics, Network, TransmissionPair};
use crate::oracle::{Complexity, ComplexityOracle};

pub use frontier::{pareto_frontier, Frontier, ObjectiveMinimum};
pub use witness::{
    consistent_pair_witness, exact_f_min, info_distance_witness, ConsistentPairReport, FMinReport, InfoDistanceReport,
    WitnessOutcome, DEFAULT_WITNESS_SLACK,
};

/// Longest program length the enumerator accepts.
pub const MAX_PROGRAM_LENGTH: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("max program length {0} exceeds the limit of {MAX_PROGRAM_LENGTH}")]
    ProgramLengthTooLarge(usize),
    #[error("pareto frontier needs at least one point")]
    EmptyPointSet,
    #[error("pareto frontier needs at least one objective")]
    NoObjectives,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_program_length: usize,
    pub max_pairs_examined: Option<u64>,
    #[serde(skip)]
    pub time_cap: Option<Duration>,
}

impl SearchBudget {
    pub fn programs(max_program_length: usize) -> Self {
        Self {
            max_program_length,
            max_pairs_examined: None,
            time_cap: None,
        }
    }

    pub fn with_max_pairs(mut self, n: u64) -> Self {
        self.max_pairs_examined = Some(n);
        self
    }

    pub fn with_time_cap(mut self, cap: Duration) -> Self {
        self.time_cap = Some(cap);
        self
    }

    fn check(&self) -> Result<(), SearchError> {
        if self.max_program_length > MAX_PROGRAM_LENGTH {
            return Err(SearchError::ProgramLengthTooLarge(self.max_program_length));
        }
        Ok(())
    }

    pub fn candidates(&self) -> Vec<BitString> {
        BitString::all_up_to(self.max_program_length).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub pair: TransmissionPair,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleSet {
    pub points: Vec<ParetoPoint>,
    /// Cross-product positions visited.
    pub pairs_examined: u64,
    /// The pair or time budget stopped the enumeration early.
    pub partial: bool,
}

/// Programs passing every condition of `channel`, with the largest
/// condition value, in enumeration order.
fn channel_survivors(
    net: Network,
    inst: &Instance,
    channel: Channel,
    programs: &[BitString],
    epsilon: i64,
    oracle: &ComplexityOracle,
) -> Vec<(usize, Complexity)> {
    programs
        .par_iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let conds = channel_conditions(net, inst, channel, p, oracle);
            if conds.iter().all(|c| c.value.less_than(epsilon)) {
                let worst = conds.iter().map(|c| c.value).max().expect("nonempty");
                Some((i, worst))
            } else {
                None
            }
        })
        .collect()
}

pub fn enumerate_feasible(
    net: Network,
    inst: &Instance,
    epsilon: i64,
    oracle: &ComplexityOracle,
    budget: &SearchBudget,
) -> Result<FeasibleSet, SearchError> {
    budget.check()?;
    let start = Instant::now();
    let programs = budget.candidates();
    let empty = [BitString::empty()];
    let q_programs: &[BitString] = if net.channel_count() == 2 { &programs } else { &empty };
    let total = programs.len() as u64 * q_programs.len() as u64;
    let limit = budget.max_pairs_examined.unwrap_or(u64::MAX).min(total);
    let mut partial = limit < total;

    let ps = channel_survivors(net, inst, Channel::P, &programs, epsilon, oracle);
    let qs: Vec<(usize, Complexity)> = if net.channel_count() == 2 {
        channel_survivors(net, inst, Channel::Q, &programs, epsilon, oracle)
    } else {
        vec![(0, Complexity::Bits(0))]
    };
    let width = q_programs.len() as u64;

    let mut points = Vec::new();
    for &(pi, p_worst) in &ps {
        if pi as u64 * width >= limit {
            break;
        }
        if budget.time_cap.is_some_and(|cap| start.elapsed() > cap) {
            partial = true;
            break;
        }
        let row: Vec<ParetoPoint> = qs
            .par_iter()
            .filter(|&&(qi, _)| pi as u64 * width + (qi as u64) < limit)
            .map(|&(qi, q_worst)| {
                let pair = TransmissionPair::new(programs[pi].clone(), q_programs[qi].clone());
                let metrics = pair_metrics(net, inst, &pair, p_worst.max(q_worst), oracle);
                ParetoPoint { pair, metrics }
            })
            .collect();
        points.extend(row);
    }
    Ok(FeasibleSet {
        points,
        pairs_examined: limit,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::{feasibility, Topology};

    #[test]
    fn literal_pair_is_found() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("", "0", "0", "0");
        let set = enumerate_feasible(Topology::E, &inst, 6, &o, &SearchBudget::programs(3)).unwrap();
        assert!(!set.points.is_empty());
        let lit = TransmissionPair::new("10".parse().unwrap(), "10".parse().unwrap());
        assert!(set.points.iter().any(|pt| pt.pair == lit));
        assert!(!set.partial);
    }

    #[test]
    fn zero_epsilon_is_empty() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("", "0", "1", "0");
        let set = enumerate_feasible(Topology::C, &inst, 0, &o, &SearchBudget::programs(4)).unwrap();
        assert!(set.points.is_empty());
    }

    #[test]
    fn matches_direct_check_and_order() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("", "01", "1", "");
        let budget = SearchBudget::programs(4);
        let set = enumerate_feasible(Topology::C, &inst, 5, &o, &budget).unwrap();
        let mut expect = Vec::new();
        for p in budget.candidates() {
            for q in budget.candidates() {
                let pair = TransmissionPair::new(p.clone(), q);
                if feasibility(Topology::C, &inst, &pair, 5, &o).unwrap().feasible {
                    expect.push(pair);
                }
            }
        }
        let got: Vec<_> = set.points.iter().map(|pt| pt.pair.clone()).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn pair_budget_sets_partial() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("", "0", "0", "0");
        let budget = SearchBudget::programs(3).with_max_pairs(20);
        let set = enumerate_feasible(Topology::E, &inst, 6, &o, &budget).unwrap();
        assert!(set.partial);
        assert_eq!(set.pairs_examined, 20);
        // Only p in the first two rows (15 programs per row) are reachable.
        assert!(set.points.iter().all(|pt| pt.pair.p.len() <= 1));
    }

    #[test]
    fn single_channel_fixes_q() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("", "0", "11", "");
        let set = enumerate_feasible(Topology::B, &inst, 6, &o, &SearchBudget::programs(3)).unwrap();
        assert!(set.points.iter().all(|pt| pt.pair.q.is_empty()));
        assert_eq!(set.pairs_examined, 15);
    }

    #[test]
    fn rejects_huge_budget() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::default();
        assert!(enumerate_feasible(Topology::C, &inst, 1, &o, &SearchBudget::programs(21)).is_err());
    }
}
