// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::{Instance, Network, NetworkError, Node, Role};
use crate::oracle::{Complexity, ComplexityOracle};

/// Default slack for cut bounds at finite scale: `ceil(2 log2 n_max) + 8`.
pub fn c_model(n_max: usize) -> i64 {
    let log = if n_max < 2 {
        0
    } else {
        ((n_max * n_max - 1).ilog2() + 1) as i64
    };
    log + 8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCandidate {
    pub excluded: Vec<Role>,
    pub given: Vec<Role>,
    pub conditional: Complexity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutBound {
    pub cut: Vec<u8>,
    pub outputs: Vec<Role>,
    pub inputs: Vec<Role>,
    /// Every valid exclusion choice, the empty one first.
    pub candidates: Vec<CutCandidate>,
    /// Index into `candidates` of the largest `C(B|A')`.
    pub best: usize,
    pub epsilon_slack: i64,
    pub c_model: i64,
    /// `max C(B|A') - |cut| ε - c_model`, absent when every candidate is
    /// above the oracle budget.
    pub bound: Option<i64>,
}

impl CutBound {
    /// The bound before subtracting `c_model`.
    pub fn raw(&self) -> Option<i64> {
        self.bound.map(|b| b + self.c_model)
    }
}

fn sorted_unique(mut roles: Vec<Role>) -> Vec<Role> {
    roles.sort();
    roles.dedup();
    roles
}

/// Excluding `excluded` from the cut inputs is valid when every excluded
/// string can be rebuilt, to fixpoint, by a cut node whose own input is
/// available.
fn exclusion_valid(nodes: &[Node], inputs: &[Role], excluded: &[Role]) -> bool {
    let mut available: Vec<Role> = inputs.iter().copied().filter(|r| !excluded.contains(r)).collect();
    loop {
        let before = available.len();
        for n in nodes {
            if available.contains(&n.input) && !available.contains(&n.output) {
                available.push(n.output);
            }
        }
        if available.len() == before {
            break;
        }
    }
    excluded.iter().all(|r| available.contains(r))
}

pub fn cut_bound(
    net: Network,
    cut: &[u8],
    inst: &Instance,
    epsilon: i64,
    oracle: &ComplexityOracle,
    c_model: i64,
) -> Result<CutBound, NetworkError> {
    if cut.is_empty() {
        return Err(NetworkError::EmptyCut);
    }
    let mut ids = cut.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let nodes = ids.iter().map(|&id| net.node(id)).collect::<Result<Vec<_>, _>>()?;
    let outputs = sorted_unique(nodes.iter().map(|n| n.output).collect());
    let inputs = sorted_unique(nodes.iter().map(|n| n.input).collect());
    let excludable: Vec<Role> = inputs.iter().copied().filter(|r| outputs.contains(r)).collect();

    let target = inst.join(&outputs);
    let mut candidates = Vec::new();
    for mask in 0u32..(1 << excludable.len()) {
        let excluded: Vec<Role> = excludable
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &r)| r)
            .collect();
        if !exclusion_valid(&nodes, &inputs, &excluded) {
            continue;
        }
        let given: Vec<Role> = inputs.iter().copied().filter(|r| !excluded.contains(r)).collect();
        let conditional = oracle.complexity(&target, &inst.join(&given));
        candidates.push(CutCandidate {
            excluded,
            given,
            conditional,
        });
    }
    let best = candidates
        .iter()
        .enumerate()
        .max_by_key(|(i, c)| (c.conditional.value(), std::cmp::Reverse(*i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let epsilon_slack = nodes.len() as i64 * epsilon;
    let bound = candidates[best]
        .conditional
        .value()
        .map(|v| v - epsilon_slack - c_model);
    Ok(CutBound {
        cut: ids,
        outputs,
        inputs,
        candidates,
        best,
        epsilon_slack,
        c_model,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::Topology;

    #[test]
    fn c_model_values() {
        assert_eq!(c_model(0), 8);
        assert_eq!(c_model(1), 8);
        assert_eq!(c_model(2), 10);
        assert_eq!(c_model(3), 12);
        assert_eq!(c_model(4), 12);
        assert_eq!(c_model(6), 14);
    }

    #[test]
    fn single_node_cut_on_a() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("1", "0", "110", "01");
        let cb = cut_bound(Topology::A, &[2], &inst, 3, &o, 10).unwrap();
        let cyx = o.complexity(&inst.y, &inst.x).value().unwrap();
        assert_eq!(cb.bound, Some(cyx - 3 - 10));
        assert_eq!(cb.candidates.len(), 1);
    }

    #[test]
    fn f_excludes_y() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("", "0", "101", "11");
        let cb = cut_bound(Topology::F, &[2, 3], &inst, 2, &o, 0).unwrap();
        assert_eq!(cb.outputs, vec![Role::Y, Role::Z]);
        assert_eq!(cb.candidates.len(), 2);
        let excl = &cb.candidates[1];
        assert_eq!(excl.excluded, vec![Role::Y]);
        assert_eq!(excl.given, vec![Role::X]);
        let cyz_x = o.cond(&[&inst.y, &inst.z], &[&inst.x]);
        assert_eq!(excl.conditional, cyz_x);
        assert_eq!(cb.bound, Some(cyz_x.value().unwrap() - 4));
    }

    #[test]
    fn c_has_two_exclusion_choices() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::new("", "0110", "1", "");
        let cb = cut_bound(Topology::C, &[2, 3], &inst, 1, &o, 0).unwrap();
        // Nothing excluded, x excluded, y excluded; both excluded is circular.
        let excluded: Vec<_> = cb.candidates.iter().map(|c| c.excluded.clone()).collect();
        assert_eq!(excluded, vec![vec![], vec![Role::X], vec![Role::Y]]);
        let cxy_x = o.cond(&[&inst.x, &inst.y], &[&inst.x]).value().unwrap();
        let cxy_y = o.cond(&[&inst.x, &inst.y], &[&inst.y]).value().unwrap();
        assert_eq!(cb.bound, Some(cxy_x.max(cxy_y) - 2));
    }

    #[test]
    fn errors() {
        let o = ComplexityOracle::table_free();
        let inst = Instance::default();
        assert_eq!(
            cut_bound(Topology::C, &[], &inst, 1, &o, 0),
            Err(NetworkError::EmptyCut)
        );
        assert_eq!(
            cut_bound(Topology::B, &[3], &inst, 1, &o, 0),
            Err(NetworkError::UnknownNode(3))
        );
    }
}
