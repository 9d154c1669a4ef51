// SPDX-License-Identifier: Apache-2.0

//! An explicit finite description system: six prefix-dispatched opcodes plus
//! an append-only lookup table.
//!
//! | program        | result                                               |
//! |----------------|------------------------------------------------------|
//! | `1 u`          | `u` (literal)                                        |
//! | `01`           | the condition itself                                 |
//! | `0010`         | left component of the condition read as a pair       |
//! | `0011`         | right component of the condition read as a pair      |
//! | `0001`         | run(left, right) with the condition read as a pair   |
//! | `0000 r`       | table entry for `(r, condition)`                     |
//!
//! Every other program is undefined. The prefixes are disjoint, so at most one
//! rule matches any program string.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::{split_pair, BitString, BitsError};

pub const DEFAULT_RECURSION_CAP: u32 = 8;

/// Length of the `0000` prefix in front of a table key.
pub const TAB_OVERHEAD: u32 = 4;
/// Length of the FST/SND/APPLY programs.
pub const PAIR_OP_LEN: u32 = 4;
/// Length of the identity program.
pub const ID_LEN: u32 = 2;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("table conflict: ({r}, {condition}) already maps to {existing}, refusing {requested}")]
    Conflict {
        r: BitString,
        condition: BitString,
        existing: BitString,
        requested: BitString,
    },
    #[error("table file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Bits(#[from] BitsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    Lit,
    Id,
    Fst,
    Snd,
    Apply,
    Tab,
}

impl Opcode {
    /// Which rule a program dispatches to, if any.
    pub fn dispatch(program: &BitString) -> Option<Opcode> {
        let n = program.len();
        if n == 0 {
            return None;
        }
        if program.get(0) {
            return Some(Opcode::Lit);
        }
        if n < 2 {
            return None;
        }
        if program.get(1) {
            return (n == 2).then_some(Opcode::Id);
        }
        if n < 4 {
            return None;
        }
        match (program.get(2), program.get(3)) {
            (true, false) => (n == 4).then_some(Opcode::Fst),
            (true, true) => (n == 4).then_some(Opcode::Snd),
            (false, true) => (n == 4).then_some(Opcode::Apply),
            (false, false) => Some(Opcode::Tab),
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Opcode::Lit => "1",
            Opcode::Id => "01",
            Opcode::Fst => "0010",
            Opcode::Snd => "0011",
            Opcode::Apply => "0001",
            Opcode::Tab => "0000",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Output(BitString),
    Undefined,
    /// Nested APPLY went deeper than the configured cap.
    RecursionCap,
}

impl RunOutcome {
    pub fn output(self) -> Option<BitString> {
        match self {
            RunOutcome::Output(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableEntry {
    pub r: BitString,
    pub condition: BitString,
    pub output: BitString,
}

#[derive(Debug, Default, Clone)]
struct Table {
    forward: HashMap<(BitString, BitString), BitString>,
    /// (condition, output) -> keys, length-lex sorted so the first is minimal.
    reverse: HashMap<(BitString, BitString), BTreeSet<BitString>>,
    entries: Vec<TableEntry>,
}

/// Immutable snapshot of the opcode machine and its table. Extending the
/// table yields a new snapshot; clones share the table until then.
#[derive(Debug, Clone)]
pub struct DescriptionSystem {
    table: Arc<Table>,
    recursion_cap: u32,
}

impl Default for DescriptionSystem {
    fn default() -> Self {
        Self::new()
    }
}

impl DescriptionSystem {
    /// The table-free system.
    pub fn new() -> Self {
        Self {
            table: Arc::new(Table::default()),
            recursion_cap: DEFAULT_RECURSION_CAP,
        }
    }

    pub fn with_recursion_cap(mut self, cap: u32) -> Self {
        self.recursion_cap = cap;
        self
    }

    pub fn recursion_cap(&self) -> u32 {
        self.recursion_cap
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.table.entries
    }

    pub fn lookup(&self, r: &BitString, condition: &BitString) -> Option<&BitString> {
        self.table.forward.get(&(r.clone(), condition.clone()))
    }

    /// Shortest (then lex-least) key `r` with `A(r, condition) = output`.
    pub fn shortest_key(&self, condition: &BitString, output: &BitString) -> Option<&BitString> {
        self.table
            .reverse
            .get(&(condition.clone(), output.clone()))
            .and_then(|keys| keys.iter().next())
    }

    /// Functional update. Re-adding an identical entry is a no-op.
    pub fn extend_table(
        &self,
        r: BitString,
        condition: BitString,
        output: BitString,
    ) -> Result<DescriptionSystem, SystemError> {
        if let Some(existing) = self.lookup(&r, &condition) {
            if *existing == output {
                return Ok(self.clone());
            }
            return Err(SystemError::Conflict {
                r,
                condition,
                existing: existing.clone(),
                requested: output,
            });
        }
        let mut table = (*self.table).clone();
        table.forward.insert((r.clone(), condition.clone()), output.clone());
        table
            .reverse
            .entry((condition.clone(), output.clone()))
            .or_default()
            .insert(r.clone());
        table.entries.push(TableEntry { r, condition, output });
        Ok(DescriptionSystem {
            table: Arc::new(table),
            recursion_cap: self.recursion_cap,
        })
    }

    pub fn extend_with<I>(&self, entries: I) -> Result<DescriptionSystem, SystemError>
    where
        I: IntoIterator<Item = TableEntry>,
    {
        entries
            .into_iter()
            .try_fold(self.clone(), |sys, e| sys.extend_table(e.r, e.condition, e.output))
    }

    pub fn run(&self, program: &BitString, condition: &BitString) -> RunOutcome {
        self.run_at_depth(program, condition, 0)
    }

    fn run_at_depth(&self, program: &BitString, condition: &BitString, depth: u32) -> RunOutcome {
        let Some(op) = Opcode::dispatch(program) else {
            return RunOutcome::Undefined;
        };
        match op {
            Opcode::Lit => RunOutcome::Output(program.slice(1, program.len())),
            Opcode::Id => RunOutcome::Output(condition.clone()),
            Opcode::Fst | Opcode::Snd | Opcode::Apply => {
                let Some((left, right)) = split_pair(condition) else {
                    return RunOutcome::Undefined;
                };
                match op {
                    Opcode::Fst => RunOutcome::Output(left),
                    Opcode::Snd => RunOutcome::Output(right),
                    _ => {
                        if depth >= self.recursion_cap {
                            RunOutcome::RecursionCap
                        } else {
                            self.run_at_depth(&left, &right, depth + 1)
                        }
                    }
                }
            }
            Opcode::Tab => {
                let r = program.slice(4, program.len());
                match self.lookup(&r, condition) {
                    Some(out) => RunOutcome::Output(out.clone()),
                    None => RunOutcome::Undefined,
                }
            }
        }
    }

    /// Parse the tab-separated table format: `r<TAB>condition<TAB>output`,
    /// `-` for the empty string, `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<DescriptionSystem, SystemError> {
        Self::read_table(text.as_bytes())
    }

    pub fn read_table<R: BufRead>(reader: R) -> Result<DescriptionSystem, SystemError> {
        let mut sys = DescriptionSystem::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(SystemError::Parse {
                    line: idx + 1,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            let parse = |f: &str| -> Result<BitString, SystemError> {
                f.parse().map_err(|e: BitsError| SystemError::Parse {
                    line: idx + 1,
                    message: e.to_string(),
                })
            };
            sys = sys.extend_table(parse(fields[0])?, parse(fields[1])?, parse(fields[2])?)?;
        }
        Ok(sys)
    }

    pub fn load_table(path: &Path) -> Result<DescriptionSystem, SystemError> {
        let file = std::fs::File::open(path)?;
        Self::read_table(std::io::BufReader::new(file))
    }

    pub fn render_table(&self) -> String {
        let mut out = String::from("# r\tcondition\toutput\n");
        for e in &self.table.entries {
            let _ = writeln!(out, "{}\t{}\t{}", e.r, e.condition, e.output);
        }
        out
    }
}
