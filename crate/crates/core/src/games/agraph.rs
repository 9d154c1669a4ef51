// SPDX-License-Identifier: Apache-2.0

//! The constructor's function `A(r, condition)`, enumerated entry by entry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GameError;
use crate::bits::BitString;
use crate::system::{DescriptionSystem, SystemError, TableEntry, TAB_OVERHEAD};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AEntry {
    pub r: BitString,
    pub condition: BitString,
    pub output: BitString,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AGraph {
    entries: Vec<AEntry>,
    /// `(condition, output) -> min |r|`.
    best: BTreeMap<(BitString, BitString), u32>,
    /// `(condition, |r|) -> keys handed out`; keys are issued in index order.
    used: BTreeMap<(BitString, u32), u128>,
}

fn capacity(len: u32) -> u128 {
    if len >= 127 {
        u128::MAX
    } else {
        1u128 << len
    }
}

impl AGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[AEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `min{|r| : A(r, condition) = u}`.
    pub fn c_a(&self, u: &BitString, condition: &BitString) -> Option<u32> {
        self.best.get(&(condition.clone(), u.clone())).copied()
    }

    pub fn used(&self, condition: &BitString, len: u32) -> u128 {
        self.used.get(&(condition.clone(), len)).copied().unwrap_or(0)
    }

    pub fn remaining(&self, condition: &BitString, len: u32) -> u128 {
        capacity(len) - self.used(condition, len)
    }

    /// Largest number of keys of one length used under a single condition.
    pub fn max_used(&self) -> u128 {
        self.used.values().copied().max().unwrap_or(0)
    }

    /// Adds `A(r, condition) = output` with the next unused `r` of length
    /// `len`.
    pub fn add_fresh(&mut self, condition: &BitString, len: u32, output: &BitString) -> Result<&AEntry, GameError> {
        let slot = self.used.entry((condition.clone(), len)).or_default();
        if *slot >= capacity(len) {
            return Err(GameError::Capacity {
                condition: condition.clone(),
                length: len,
            });
        }
        let r = BitString::from_index(*slot, len as usize);
        *slot += 1;
        let best = self.best.entry((condition.clone(), output.clone())).or_insert(len);
        *best = (*best).min(len);
        self.entries.push(AEntry {
            r,
            condition: condition.clone(),
            output: output.clone(),
        });
        Ok(self.entries.last().expect("just pushed"))
    }

    /// Materializes the graph as the table of a description system; a key
    /// `r` then yields the program `0000 r` of length `|r| + 4`.
    pub fn export(&self) -> Result<DescriptionSystem, SystemError> {
        DescriptionSystem::new().extend_with(self.entries.iter().map(|e| TableEntry {
            r: e.r.clone(),
            condition: e.condition.clone(),
            output: e.output.clone(),
        }))
    }

    pub fn export_overhead() -> u32 {
        TAB_OVERHEAD
    }
}
