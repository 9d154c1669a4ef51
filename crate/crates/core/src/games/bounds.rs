// SPDX-License-Identifier: Apache-2.0

//! Declared upper bounds on `C(u|v)`, with the per-condition counting budget
//! and the indexes the constructions query.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GameError;
use crate::bits::{split_pair, BitString};

/// Levels at or above this are never binding for any reachable table size.
const UNBOUNDED_LEVEL: u32 = 62;

/// `2^{ℓ+1} - 1`: how many strings can have complexity at most `ℓ` given a
/// fixed condition.
pub fn level_capacity(level: u32) -> u64 {
    if level >= UNBOUNDED_LEVEL {
        u64::MAX
    } else {
        (1u64 << (level + 1)) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclareEffect {
    Tightened {
        previous: Option<u32>,
    },
    /// Same bound as before.
    Unchanged,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct ConditionEntry {
    bounds: BTreeMap<BitString, u32>,
    /// Number of `u` whose bound is exactly the key.
    histogram: BTreeMap<u32, u64>,
}

impl ConditionEntry {
    fn at_most(&self, level: u32) -> u64 {
        self.histogram.range(..=level).map(|(_, c)| c).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundTable {
    by_condition: BTreeMap<BitString, ConditionEntry>,
    /// `(s, u) -> {a -> bound(u | [a,s])}` for every condition that decodes
    /// as a pair.
    programs: BTreeMap<(BitString, BitString), BTreeMap<BitString, u32>>,
    /// `p -> {q -> bound([p,q] | "")}`.
    pairs: BTreeMap<BitString, BTreeMap<BitString, u32>>,
    /// `q -> {p}` for the entries of `pairs`.
    pairs_by_second: BTreeMap<BitString, BTreeSet<BitString>>,
    entries: u64,
}

impl BoundTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, u: &BitString, v: &BitString) -> Option<u32> {
        self.by_condition.get(v)?.bounds.get(u).copied()
    }

    pub fn unconditional(&self, u: &BitString) -> Option<u32> {
        self.get(u, &BitString::empty())
    }

    /// Declared bound is strictly below `limit`.
    pub fn below(&self, u: &BitString, v: &BitString, limit: u32) -> bool {
        self.get(u, v).is_some_and(|b| b < limit)
    }

    pub fn len(&self) -> u64 {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    /// Outputs with a declared bound under `v`.
    pub fn outputs(&self, v: &BitString) -> impl Iterator<Item = (&BitString, u32)> {
        self.by_condition
            .get(v)
            .into_iter()
            .flat_map(|e| e.bounds.iter().map(|(u, b)| (u, *b)))
    }

    pub fn conditions(&self) -> impl Iterator<Item = &BitString> {
        self.by_condition.keys()
    }

    /// `#{u : bound(u|v) <= level}`.
    pub fn count_at_most(&self, v: &BitString, level: u32) -> u64 {
        self.by_condition.get(v).map_or(0, |e| e.at_most(level))
    }

    /// `{a -> bound(u | [a,s])}`.
    pub fn programs_for(&self, s: &BitString, u: &BitString) -> Option<&BTreeMap<BitString, u32>> {
        self.programs.get(&(s.clone(), u.clone()))
    }

    /// Every `(u, {a -> bound})` indexed under second component `s`.
    pub fn programs_under<'a>(
        &'a self,
        s: &'a BitString,
    ) -> impl Iterator<Item = (&'a BitString, &'a BTreeMap<BitString, u32>)> + 'a {
        let start = (s.clone(), BitString::empty());
        self.programs
            .range(start..)
            .take_while(move |((s2, _), _)| s2 == s)
            .map(|((_, u), m)| (u, m))
    }

    /// `{q -> bound([p,q])}`.
    pub fn pairs_with_first(&self, p: &BitString) -> Option<&BTreeMap<BitString, u32>> {
        self.pairs.get(p)
    }

    pub fn pairs_with_second(&self, q: &BitString) -> Option<&BTreeSet<BitString>> {
        self.pairs_by_second.get(q)
    }

    pub fn all_pairs(&self) -> impl Iterator<Item = (&BitString, &BitString, u32)> {
        self.pairs
            .iter()
            .flat_map(|(p, qs)| qs.iter().map(move |(q, b)| (p, q, *b)))
    }

    /// Whether declaring `C(u|v) <= bound` is admissible.
    pub fn check(&self, u: &BitString, v: &BitString, bound: u32) -> Result<DeclareEffect, GameError> {
        let entry = self.by_condition.get(v);
        let previous = entry.and_then(|e| e.bounds.get(u).copied());
        match previous {
            Some(p) if bound == p => return Ok(DeclareEffect::Unchanged),
            Some(p) if bound > p => {
                return Err(GameError::Monotonicity {
                    u: u.clone(),
                    v: v.clone(),
                    current: p,
                    requested: bound,
                })
            }
            _ => {}
        }
        // Levels in [bound, previous) gain one string.
        if let Some(e) = entry {
            let top = previous.unwrap_or(UNBOUNDED_LEVEL).min(UNBOUNDED_LEVEL);
            let total = e.bounds.len() as u64;
            let mut count = e.at_most(bound);
            let mut level = bound;
            while level < top && level_capacity(level) <= total {
                if count + 1 > level_capacity(level) {
                    return Err(GameError::Budget {
                        v: v.clone(),
                        level,
                        capacity: level_capacity(level),
                    });
                }
                level += 1;
                count += e.histogram.get(&level).copied().unwrap_or(0);
            }
        }
        Ok(DeclareEffect::Tightened { previous })
    }

    pub fn declare(&mut self, u: &BitString, v: &BitString, bound: u32) -> Result<DeclareEffect, GameError> {
        let effect = self.check(u, v, bound)?;
        let DeclareEffect::Tightened { previous } = effect else {
            return Ok(effect);
        };
        let entry = self.by_condition.entry(v.clone()).or_default();
        if let Some(p) = previous {
            let slot = entry.histogram.get_mut(&p).expect("histogram tracks bounds");
            *slot -= 1;
            if *slot == 0 {
                entry.histogram.remove(&p);
            }
        } else {
            self.entries += 1;
        }
        entry.bounds.insert(u.clone(), bound);
        *entry.histogram.entry(bound).or_default() += 1;

        if let Some((a, s)) = split_pair(v) {
            self.programs.entry((s, u.clone())).or_default().insert(a, bound);
        }
        if v.is_empty() {
            if let Some((p, q)) = split_pair(u) {
                self.pairs_by_second.entry(q.clone()).or_default().insert(p.clone());
                self.pairs.entry(p).or_default().insert(q, bound);
            }
        }
        Ok(effect)
    }
}
