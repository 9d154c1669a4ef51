// SPDX-License-Identifier: Apache-2.0

//! The six two-receiver topologies, ε-transmission, disclosure metrics, cut
//! bounds and the closed-form minimal values.

mod cut;
mod formulas;
mod harness;
mod instance;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{encode_pair, BitString};
use crate::oracle::{Complexity, ComplexityOracle, Quantity};

pub use cut::{c_model, cut_bound, CutBound, CutCandidate};
pub use formulas::{minimal_value_formulas, FormulaEntry, FormulaValue, MinimalValues, ProfileValues};
pub use harness::{bound_harness, Claim, ClaimFormula, Direction, HarnessReport, InstanceOutcome, Slack};
pub use instance::{all_instances, Instance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("unknown topology {0:?}")]
    UnknownTopology(String),
    #[error("topology (b) has a single channel; q must be empty")]
    SecondChannel,
    #[error("cut must be a nonempty set of receiver nodes")]
    EmptyCut,
    #[error("node {0} does not exist in this topology")]
    UnknownNode(u8),
    #[error("missing profile value {0}")]
    MissingValue(String),
    #[error("instance line {line}: {message}")]
    Instance { line: usize, message: String },
    #[error(transparent)]
    Search(#[from] crate::search::SearchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Topology {
    pub const ALL: [Topology; 6] = [
        Topology::A,
        Topology::B,
        Topology::C,
        Topology::D,
        Topology::E,
        Topology::F,
    ];

    pub fn tag(self) -> char {
        match self {
            Topology::A => 'a',
            Topology::B => 'b',
            Topology::C => 'c',
            Topology::D => 'd',
            Topology::E => 'e',
            Topology::F => 'f',
        }
    }

    pub fn channel_count(self) -> usize {
        if self == Topology::B {
            1
        } else {
            2
        }
    }

    /// Receiver nodes in order (node 2, then node 3 when present).
    pub fn nodes(self) -> &'static [Node] {
        use Role::*;
        const A: [Node; 2] = [Node::new(2, Channel::P, X, Y), Node::new(3, Channel::Q, W, Z)];
        const B: [Node; 1] = [Node::new(2, Channel::P, X, Y)];
        const C: [Node; 2] = [Node::new(2, Channel::P, X, Y), Node::new(3, Channel::Q, Y, X)];
        const D: [Node; 2] = [Node::new(2, Channel::P, X, Z), Node::new(3, Channel::Q, Y, Z)];
        const E: [Node; 2] = [Node::new(2, Channel::P, X, Y), Node::new(3, Channel::Q, X, Z)];
        const F: [Node; 2] = [Node::new(2, Channel::P, X, Y), Node::new(3, Channel::Q, Y, Z)];
        match self {
            Topology::A => &A,
            Topology::B => &B,
            Topology::C => &C,
            Topology::D => &D,
            Topology::E => &E,
            Topology::F => &F,
        }
    }

    pub fn node(self, id: u8) -> Result<Node, NetworkError> {
        self.nodes()
            .iter()
            .copied()
            .find(|n| n.id == id)
            .ok_or(NetworkError::UnknownNode(id))
    }

    /// Every string the sender knows, in canonical order.
    pub fn all_roles(self) -> &'static [Role] {
        use Role::*;
        match self {
            Topology::A => &[W, X, Y, Z],
            Topology::B | Topology::C => &[X, Y],
            Topology::D | Topology::E | Topology::F => &[X, Y, Z],
        }
    }

    pub fn private_roles(self) -> &'static [Role] {
        use Role::*;
        match self {
            Topology::A => &[W, X],
            Topology::B | Topology::E | Topology::F => &[X],
            Topology::C => &[],
            Topology::D => &[X, Y],
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

impl FromStr for Topology {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Topology::A),
            "b" => Ok(Topology::B),
            "c" => Ok(Topology::C),
            "d" => Ok(Topology::D),
            "e" => Ok(Topology::E),
            "f" => Ok(Topology::F),
            _ => Err(NetworkError::UnknownTopology(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    W,
    X,
    Y,
    Z,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::W => "w",
            Role::X => "x",
            Role::Y => "y",
            Role::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: u8,
    pub channel: Channel,
    pub input: Role,
    pub output: Role,
}

impl Node {
    const fn new(id: u8, channel: Channel, input: Role, output: Role) -> Self {
        Self {
            id,
            channel,
            input,
            output,
        }
    }
}

/// A network is a topology; the strings live in an [`Instance`].
pub type Network = Topology;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransmissionPair {
    pub p: BitString,
    pub q: BitString,
}

impl TransmissionPair {
    pub fn new(p: BitString, q: BitString) -> Self {
        Self { p, q }
    }

    pub fn single(p: BitString) -> Self {
        Self {
            p,
            q: BitString::empty(),
        }
    }

    pub fn channel(&self, c: Channel) -> &BitString {
        match c {
            Channel::P => &self.p,
            Channel::Q => &self.q,
        }
    }

    /// What the eavesdropper sees: `[p,q]`.
    pub fn observed(&self) -> BitString {
        encode_pair(&self.p, &self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub value: Complexity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub epsilon: i64,
    pub conditions: Vec<Condition>,
    /// Some condition exceeded the oracle budget.
    pub above_budget: bool,
}

/// The per-channel half of the transmission conditions: `C(c|all)` and
/// `C(out|[c,in])` for the node served by channel `c`.
pub fn channel_conditions(
    net: Network,
    inst: &Instance,
    channel: Channel,
    program: &BitString,
    oracle: &ComplexityOracle,
) -> Vec<Condition> {
    let all = inst.join(net.all_roles());
    let label = match channel {
        Channel::P => "p",
        Channel::Q => "q",
    };
    let mut out = vec![Condition {
        name: format!("C({label}|all)"),
        value: oracle.complexity(program, &all),
    }];
    for node in net.nodes().iter().filter(|n| n.channel == channel) {
        let given = encode_pair(program, inst.get(node.input));
        out.push(Condition {
            name: format!("C({}|{label},{})", node.output.name(), node.input.name()),
            value: oracle.complexity(inst.get(node.output), &given),
        });
    }
    out
}

/// Whether `program` passes every condition of its channel at `epsilon`.
pub fn channel_feasible(
    net: Network,
    inst: &Instance,
    channel: Channel,
    program: &BitString,
    epsilon: i64,
    oracle: &ComplexityOracle,
) -> bool {
    channel_conditions(net, inst, channel, program, oracle)
        .iter()
        .all(|c| c.value.less_than(epsilon))
}

pub fn feasibility(
    net: Network,
    inst: &Instance,
    pair: &TransmissionPair,
    epsilon: i64,
    oracle: &ComplexityOracle,
) -> Result<Feasibility, NetworkError> {
    if net == Topology::B && !pair.q.is_empty() {
        return Err(NetworkError::SecondChannel);
    }
    let mut conditions = channel_conditions(net, inst, Channel::P, &pair.p, oracle);
    if net.channel_count() == 2 {
        conditions.extend(channel_conditions(net, inst, Channel::Q, &pair.q, oracle));
    }
    let above_budget = conditions.iter().any(|c| c.value == Complexity::AboveBudget);
    let feasible = conditions.iter().all(|c| c.value.less_than(epsilon));
    Ok(Feasibility {
        feasible,
        epsilon,
        conditions,
        above_budget,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub achieved_epsilon: Complexity,
    pub cp: Complexity,
    pub cq: Complexity,
    pub cpq: Complexity,
    pub total_disclosure: Quantity,
    pub private_disclosure: Quantity,
}

impl Metrics {
    pub fn objective(&self, o: Objective) -> Option<i64> {
        let q = |v: Quantity| match v {
            Quantity::Value(v) => Some(v),
            Quantity::AboveBudget => None,
        };
        match o {
            Objective::Cp => self.cp.value(),
            Objective::Cq => self.cq.value(),
            Objective::Cpq => self.cpq.value(),
            Objective::TotalDisclosure => q(self.total_disclosure),
            Objective::PrivateDisclosure => q(self.private_disclosure),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Cp,
    Cq,
    Cpq,
    TotalDisclosure,
    PrivateDisclosure,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::Cp,
        Objective::Cq,
        Objective::Cpq,
        Objective::TotalDisclosure,
        Objective::PrivateDisclosure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::Cp => "cp",
            Objective::Cq => "cq",
            Objective::Cpq => "cpq",
            Objective::TotalDisclosure => "total_disclosure",
            Objective::PrivateDisclosure => "private_disclosure",
        }
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Objective::ALL
            .into_iter()
            .find(|o| o.name() == s.trim())
            .or(match s.trim() {
                "total" => Some(Objective::TotalDisclosure),
                "private" => Some(Objective::PrivateDisclosure),
                _ => None,
            })
            .ok_or_else(|| format!("unknown objective {s:?}"))
    }
}

/// `C([p,q]) - C([p,q] | join(roles))`.
pub fn group_disclosure(
    inst: &Instance,
    pair: &TransmissionPair,
    roles: &[Role],
    oracle: &ComplexityOracle,
) -> Quantity {
    disclosure(&pair.observed(), &inst.join(roles), oracle)
}

fn disclosure(observed: &BitString, given: &BitString, oracle: &ComplexityOracle) -> Quantity {
    match (
        oracle.unconditional(observed).value(),
        oracle.complexity(observed, given).value(),
    ) {
        (Some(a), Some(b)) => Quantity::Value(a - b),
        _ => Quantity::AboveBudget,
    }
}

pub fn metrics(net: Network, inst: &Instance, pair: &TransmissionPair, oracle: &ComplexityOracle) -> Metrics {
    let mut conditions = channel_conditions(net, inst, Channel::P, &pair.p, oracle);
    if net.channel_count() == 2 {
        conditions.extend(channel_conditions(net, inst, Channel::Q, &pair.q, oracle));
    }
    let achieved_epsilon = conditions.iter().map(|c| c.value).max().unwrap_or(Complexity::Bits(0));
    pair_metrics(net, inst, pair, achieved_epsilon, oracle)
}

/// [`metrics`] with the transmission conditions already evaluated.
pub fn pair_metrics(
    net: Network,
    inst: &Instance,
    pair: &TransmissionPair,
    achieved_epsilon: Complexity,
    oracle: &ComplexityOracle,
) -> Metrics {
    let observed = pair.observed();
    let cpq = oracle.unconditional(&observed);
    let given = |roles: &[Role]| match (cpq.value(), oracle.complexity(&observed, &inst.join(roles)).value()) {
        (Some(a), Some(b)) => Quantity::Value(a - b),
        _ => Quantity::AboveBudget,
    };
    Metrics {
        achieved_epsilon,
        cp: oracle.unconditional(&pair.p),
        cq: oracle.unconditional(&pair.q),
        cpq,
        total_disclosure: given(net.all_roles()),
        private_disclosure: given(net.private_roles()),
    }
}
