// SPDX-License-Identifier: Apache-2.0

//! Exact conditional complexity relative to a [`DescriptionSystem`].
//!
//! `C(u|v)` is the length of the shortest program `p` with `run(p, v) = u`.
//! Because dispatch is by fixed prefixes, the only programs that can print `u`
//! are the literal, the identity, the three pair opcodes and the table keys
//! bound to `(v, u)`; the oracle scores exactly those and returns the
//! length-lex least among the shortest. `tests/oracle_brute_force.rs` checks
//! this against plain enumeration of every program.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::{join, split_pair, BitString};
use crate::system::{DescriptionSystem, Opcode, RunOutcome};

/// How long a program the oracle is willing to consider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProgramBudget {
    /// `|u| + slack`, so the literal program is always within reach when slack >= 1.
    Relative(u32),
    Absolute(u32),
}

impl Default for ProgramBudget {
    fn default() -> Self {
        ProgramBudget::Relative(8)
    }
}

impl ProgramBudget {
    pub fn for_target(self, u: &BitString) -> u32 {
        match self {
            ProgramBudget::Relative(slack) => u.len() as u32 + slack,
            ProgramBudget::Absolute(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Complexity {
    Bits(u32),
    /// No program within the budget prints the target.
    AboveBudget,
}

impl Complexity {
    pub fn bits(self) -> Option<u32> {
        match self {
            Complexity::Bits(b) => Some(b),
            Complexity::AboveBudget => None,
        }
    }

    pub fn value(self) -> Option<i64> {
        self.bits().map(i64::from)
    }

    /// Strictly below a threshold; above-budget never is.
    pub fn less_than(self, threshold: i64) -> bool {
        self.value().is_some_and(|v| v < threshold)
    }
}

impl std::fmt::Display for Complexity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Complexity::Bits(b) => write!(f, "{b}"),
            Complexity::AboveBudget => f.write_str("above-budget"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub length: u32,
    pub program: BitString,
}

#[derive(Debug, Clone)]
pub struct ComplexityOracle {
    system: DescriptionSystem,
    budget: ProgramBudget,
}

impl ComplexityOracle {
    pub fn new(system: DescriptionSystem) -> Self {
        Self {
            system,
            budget: ProgramBudget::default(),
        }
    }

    pub fn table_free() -> Self {
        Self::new(DescriptionSystem::new())
    }

    pub fn with_budget(mut self, budget: ProgramBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn system(&self) -> &DescriptionSystem {
        &self.system
    }

    pub fn budget(&self) -> ProgramBudget {
        self.budget
    }

    pub fn run(&self, program: &BitString, condition: &BitString) -> RunOutcome {
        self.system.run(program, condition)
    }

    /// Shortest, then length-lex least, program printing `u` on condition `v`.
    pub fn witness(&self, u: &BitString, v: &BitString) -> Option<Witness> {
        let limit = self.budget.for_target(u);
        let mut best: Option<Witness> = None;
        let mut offer = |program: BitString| {
            let length = program.len() as u32;
            if length > limit {
                return;
            }
            let better = match &best {
                None => true,
                Some(b) => (length, &program) < (b.length, &b.program),
            };
            if better {
                best = Some(Witness { length, program });
            }
        };

        let mut literal = BitString::from_bits([true]);
        literal.extend_from(u);
        offer(literal);

        if u == v {
            offer(opcode_program(Opcode::Id));
        }
        if let Some((left, right)) = split_pair(v) {
            if *u == left {
                offer(opcode_program(Opcode::Fst));
            }
            if *u == right {
                offer(opcode_program(Opcode::Snd));
            }
            let apply = opcode_program(Opcode::Apply);
            if self.system.run(&apply, v) == RunOutcome::Output(u.clone()) {
                offer(apply);
            }
        }
        if let Some(r) = self.system.shortest_key(v, u) {
            let mut program = opcode_program(Opcode::Tab);
            program.extend_from(r);
            offer(program);
        }
        debug_assert!(
            best.as_ref().map_or(true, |w| {
                self.system.run(&w.program, v) == RunOutcome::Output(u.clone())
            }),
            "witness must replay"
        );
        best
    }

    pub fn complexity(&self, u: &BitString, v: &BitString) -> Complexity {
        match self.witness(u, v) {
            Some(w) => Complexity::Bits(w.length),
            None => Complexity::AboveBudget,
        }
    }

    pub fn unconditional(&self, u: &BitString) -> Complexity {
        self.complexity(u, &BitString::empty())
    }

    /// `C(targets | givens)` with both sides joined by nested pairing.
    pub fn cond(&self, targets: &[&BitString], givens: &[&BitString]) -> Complexity {
        self.complexity(&join(targets), &join(givens))
    }

    /// `I(a:b) = C(b) - C(b|a)`.
    pub fn info(&self, a: &BitString, b: &BitString) -> Option<i64> {
        Some(self.unconditional(b).value()? - self.complexity(b, a).value()?)
    }

    /// `I(a:b|c) = C(b|c) - C(b|[a,c])`.
    pub fn cond_info(&self, a: &BitString, b: &BitString, c: &BitString) -> Option<i64> {
        Some(self.complexity(b, c).value()? - self.cond(&[b], &[a, c]).value()?)
    }

    /// `J(a:b) = C(a) + C(b) - C([a,b])`.
    pub fn joint_info(&self, a: &BitString, b: &BitString) -> Option<i64> {
        Some(self.unconditional(a).value()? + self.unconditional(b).value()? - self.cond(&[a, b], &[]).value()?)
    }

    /// `J(a:b|c) = C(a|c) + C(b|c) - C([a,b]|c)`.
    pub fn cond_joint_info(&self, a: &BitString, b: &BitString, c: &BitString) -> Option<i64> {
        Some(self.complexity(a, c).value()? + self.complexity(b, c).value()? - self.cond(&[a, b], &[c]).value()?)
    }

    pub fn profile(&self, strings: &[BitString]) -> Profile {
        assert!(
            (1..=4).contains(&strings.len()),
            "profiles are defined for 1 to 4 strings"
        );
        let mut values = Vec::new();
        for subset in subsets_by_size(strings.len()) {
            let parts: Vec<&BitString> = subset.iter().map(|&i| &strings[i]).collect();
            values.push(ProfileEntry {
                members: subset,
                value: self.cond(&parts, &[]),
            });
        }
        Profile {
            strings: strings.to_vec(),
            values,
        }
    }

    /// Profile plus every pairwise `I`, `J` and every conditional `I`, `J`
    /// over distinct index triples.
    pub fn derived_quantities(&self, strings: &[BitString]) -> DerivedQuantities {
        assert!(
            (2..=4).contains(&strings.len()),
            "derived quantities take 2 to 4 strings"
        );
        let profile = self.profile(strings);
        let mut quantities = BTreeMap::new();
        let n = strings.len();
        let mark = |v: Option<i64>| v.map_or(Quantity::AboveBudget, Quantity::Value);
        for a in 0..n {
            for b in 0..n {
                quantities.insert(format!("I(s{a}:s{b})"), mark(self.info(&strings[a], &strings[b])));
                if a < b {
                    quantities.insert(format!("J(s{a}:s{b})"), mark(self.joint_info(&strings[a], &strings[b])));
                }
                for c in 0..n {
                    if c == a || c == b || a == b {
                        continue;
                    }
                    quantities.insert(
                        format!("I(s{a}:s{b}|s{c})"),
                        mark(self.cond_info(&strings[a], &strings[b], &strings[c])),
                    );
                    if a < b {
                        quantities.insert(
                            format!("J(s{a}:s{b}|s{c})"),
                            mark(self.cond_joint_info(&strings[a], &strings[b], &strings[c])),
                        );
                    }
                }
            }
        }
        DerivedQuantities { profile, quantities }
    }
}

fn opcode_program(op: Opcode) -> BitString {
    op.prefix().parse().expect("opcode prefix")
}

/// Nonempty subsets of `0..k`, ordered by size and then lexicographically,
/// e.g. for k = 4: {0},{1},{2},{3},{0,1},{0,2},{0,3},{1,2},...,{0,1,2,3}.
pub fn subsets_by_size(k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << k))
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub members: Vec<usize>,
    pub value: Complexity,
}

/// Joint complexities of every nonempty subset of up to four strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub strings: Vec<BitString>,
    pub values: Vec<ProfileEntry>,
}

impl Profile {
    pub fn get(&self, members: &[usize]) -> Option<Complexity> {
        self.values.iter().find(|e| e.members == members).map(|e| e.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Value(i64),
    AboveBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub profile: Profile,
    pub quantities: BTreeMap<String, Quantity>,
}
